import io

import numpy as np
import pytest

from gateverify import _simkernel_py
from gateverify.analysis import trial_count
from gateverify.channels import (
    KrausChannel,
    choi_from_kraus,
    make_noise,
    unitary_channel,
)
from gateverify.errors import NumericFault, ValidationError
from gateverify.linalg import haar_random_unitary
from gateverify.simulate import (
    KERNEL_BACKEND,
    estimate_pass_rate,
    run_summary,
    run_to_csv,
    run_verification,
    verdict,
)
from gateverify.strategies import (
    VerificationPair,
    Strategy,
    omega_from_strategy,
    optimal_strategy,
    trivial_test_mix,
)

try:
    from gateverify import _simkernel

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def tr_omega_choi(strategy, channel):
    omega = omega_from_strategy(strategy)
    choi = choi_from_kraus(channel)
    return float(np.real(np.trace(omega.matrix @ choi.matrix)))


class TestKernels:
    def _tables(self):
        pair_cum = np.array([0.25, 0.75, 1.0])
        sub_offset = np.array([0, 1, 3, 4], dtype=np.int64)
        sub_cum = np.array([1.0, 0.5, 1.0, 1.0])
        q = np.array([0.9, 0.1, 0.8, 0.5])
        return pair_cum, sub_offset, sub_cum, q

    @pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
    def test_backends_bitwise_identical(self):
        tables = self._tables()
        a = _simkernel.simulate_rounds(123, 0, 5000, *tables)
        b = _simkernel_py.simulate_rounds(123, 0, 5000, *tables)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])

    def test_chunking_matches_serial(self):
        tables = self._tables()
        full = _simkernel_py.simulate_rounds(9, 0, 1000, *tables)
        head = _simkernel_py.simulate_rounds(9, 0, 400, *tables)
        tail = _simkernel_py.simulate_rounds(9, 400, 600, *tables)
        assert np.array_equal(np.concatenate([head[0], tail[0]]), full[0])
        assert np.array_equal(np.concatenate([head[1], tail[1]]), full[1])

    def test_seed_sensitivity(self):
        tables = self._tables()
        a = _simkernel_py.simulate_rounds(1, 0, 200, *tables)
        b = _simkernel_py.simulate_rounds(2, 0, 200, *tables)
        assert not np.array_equal(a[1], b[1])

    def test_pair_frequencies(self):
        tables = self._tables()
        pair, _ = _simkernel_py.simulate_rounds(7, 0, 200_000, *tables)
        freqs = np.bincount(pair, minlength=3) / len(pair)
        assert np.allclose(freqs, [0.25, 0.5, 0.25], atol=0.01)


class TestRunVerification:
    def test_ideal_channel_always_passes(self):
        s = optimal_strategy(np.eye(2), 2)
        run = run_verification(unitary_channel(np.eye(2)), s, 5000, 3)
        assert run.all_passed
        assert run.empirical_pass_rate == 1.0

    def test_deterministic(self):
        s = optimal_strategy(np.eye(2), 2)
        ch = make_noise("depolarizing", 0.2, 2)
        a = run_verification(ch, s, 1000, 11)
        b = run_verification(ch, s, 1000, 11)
        assert np.array_equal(a.passed, b.passed)
        assert np.array_equal(a.pair_indices, b.pair_indices)

    def test_depolarizing_rate(self):
        s = optimal_strategy(np.eye(2), 2)
        ch = make_noise("depolarizing", 0.1, 2)
        run = run_verification(ch, s, 100_000, 12345)
        expected = tr_omega_choi(s, ch)
        assert expected == pytest.approx(0.95, abs=1e-12)
        sigma = np.sqrt(expected * (1 - expected) / run.N)
        assert abs(run.empirical_pass_rate - expected) < 3 * sigma

    def test_records_view(self):
        s = optimal_strategy(np.eye(2), 2)
        run = run_verification(make_noise("depolarizing", 0.5, 2), s, 50, 1)
        recs = run.records
        assert len(recs) == 50
        assert recs[3].round_index == 3
        assert recs[3].passed == bool(run.passed[3])

    def test_mixed_input_trivial_test(self):
        # the trivial test samples computational eigenstates of I/d and
        # always passes
        s = trivial_test_mix(optimal_strategy(np.eye(2), 2), 0.5)
        ch = make_noise("depolarizing", 1.0, 2)
        run = run_verification(ch, s, 20_000, 5)
        expected = tr_omega_choi(s, ch)
        sigma = np.sqrt(expected * (1 - expected) / run.N)
        assert abs(run.empirical_pass_rate - expected) < 3 * sigma

    def test_dimension_mismatch(self):
        s = optimal_strategy(np.eye(2), 2)
        with pytest.raises(ValidationError):
            run_verification(make_noise("depolarizing", 0.1, 3), s, 10, 0)


class TestEstimatePassRate:
    def test_ideal(self):
        s = optimal_strategy(np.eye(2), 2)
        rate, err = estimate_pass_rate(unitary_channel(np.eye(2)), s, 1000, 2)
        assert rate == 1.0 and err == 0.0

    def test_dephasing_matches_overlap(self):
        s = optimal_strategy(np.eye(2), 2)
        ch = make_noise("dephasing", 0.2, 2)
        rate, err = estimate_pass_rate(ch, s, 50_000, 21)
        expected = tr_omega_choi(s, ch)
        assert abs(rate - expected) < 3 * max(err, 1e-4)

    def test_channel_drift_averages(self):
        s = optimal_strategy(np.eye(2), 2)
        chans = [
            make_noise("depolarizing", 0.05, 2),
            make_noise("dephasing", 0.3, 2),
            make_noise("amplitude_damping", 0.2, 2),
        ]
        rate, err = estimate_pass_rate(chans, s, 60_000, 8)
        expected = np.mean([tr_omega_choi(s, ch) for ch in chans])
        assert abs(rate - expected) < 3 * max(err, 1e-4)

    def test_minimum_trials(self):
        s = optimal_strategy(np.eye(2), 2)
        with pytest.raises(ValidationError):
            estimate_pass_rate(unitary_channel(np.eye(2)), s, 50, 0)


class TestVerdict:
    def test_accept_at_trial_count(self):
        s = optimal_strategy(np.eye(2), 2)
        omega = omega_from_strategy(s)
        eps, delta = 0.2, 0.1
        n = trial_count(eps, delta, omega)
        run = run_verification(unitary_channel(np.eye(2)), s, n, 4)
        out = verdict(run, eps, delta, omega)
        assert out["accepted"]
        assert "average gate fidelity" in out["statement"]
        assert str((2 * (1 - eps) + 1) / 3) in out["statement"]

    def test_single_failure_rejects(self):
        s = optimal_strategy(np.eye(2), 2)
        omega = omega_from_strategy(s)
        run = run_verification(make_noise("depolarizing", 0.9, 2), s, 50, 6)
        assert not run.all_passed
        out = verdict(run, 0.2, 0.45, omega)
        assert not out["accepted"]
        assert "rejected" in out["statement"]

    def test_insufficient_rounds_refused(self):
        s = optimal_strategy(np.eye(2), 2)
        omega = omega_from_strategy(s)
        run = run_verification(unitary_channel(np.eye(2)), s, 10, 7)
        with pytest.raises(ValidationError, match="refusing"):
            verdict(run, 0.01, 0.01, omega)


class TestStatisticalCoverage:
    @pytest.mark.parametrize("d", [2, 3])
    def test_noise_strategy_matrix(self, d):
        target = haar_random_unitary(d, d)
        s = optimal_strategy(target, d)
        kinds = ["depolarizing", "dephasing", "amplitude_damping"]
        for i, kind in enumerate(kinds):
            noise = make_noise(kind, 0.15, d)
            gate = unitary_channel(target)
            from gateverify.channels import compose

            ch = compose(gate, noise)
            run = run_verification(ch, s, 30_000, 100 + i)
            expected = tr_omega_choi(s, ch)
            sigma = np.sqrt(max(expected * (1 - expected), 1e-8) / run.N)
            assert abs(run.empirical_pass_rate - expected) < 3.5 * sigma

    def test_numeric_fault_on_bad_probability(self):
        # a non-CP "channel" sneaks a pass probability outside [0,1]
        class Broken:
            d = 2

            def apply(self, rho):
                return 1.5 * rho

        s = optimal_strategy(np.eye(2), 2)
        with pytest.raises(NumericFault):
            run_verification(Broken(), s, 10, 0)


class TestOutputs:
    def test_csv_format(self):
        s = optimal_strategy(np.eye(2), 2)
        run = run_verification(unitary_channel(np.eye(2)), s, 3, 9)
        buf = io.StringIO()
        run_to_csv(run, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "round,pair,passed"
        assert len(lines) == 4
        assert lines[1].split(",")[0] == "0"

    def test_summary(self):
        s = optimal_strategy(np.eye(2), 2)
        run = run_verification(unitary_channel(np.eye(2)), s, 5, 10)
        out = run_summary(run, {"accepted": True, "statement": "ok"})
        assert out["seed"] == 10
        assert out["N"] == 5
        assert out["pass_rate"] == 1.0
        assert out["kernel_backend"] == KERNEL_BACKEND
        assert out["verdict"]["accepted"]
