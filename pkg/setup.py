"""Build script for the compiled simulation kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed Cython build degrades gracefully instead of
breaking the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gateverify._simkernel",
                sources=["src/gateverify/_simkernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
