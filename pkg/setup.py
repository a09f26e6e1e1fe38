"""Build script for the compiled scoring kernels.

The package works without the extension (a numpy fallback is selected at
import time), but the Cython kernels are considerably faster for BM25
posting-list accumulation and top-k selection. Build in place with:

    python setup.py build_ext --inplace
"""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "humrank.kernels._native",
        ["src/humrank/kernels/_native.pyx"],
        # -ffp-contract=off keeps results bit-identical to the numpy
        # fallback (no FMA contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
