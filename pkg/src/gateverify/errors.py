"""Exception types shared across the package.

``ValidationError`` covers violated invariants and malformed inputs
(CLI exit code 2); ``NumericFault`` covers numerical breakdowns such as
probabilities escaping [0, 1] or failed decompositions (exit code 3).
"""


class GateVerifyError(Exception):
    pass


class ValidationError(GateVerifyError):
    pass


class NumericFault(GateVerifyError):
    pass
