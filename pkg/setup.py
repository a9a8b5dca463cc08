"""Build script: compiles the optional integer-elimination kernel.

The package is fully functional without the extension (a pure-Python
arbitrary-precision fallback is selected at import time); the extension
only accelerates Smith normal form and mod-p rank on large matrices.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/btq/kernels/_core.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
    include_dirs = [numpy.get_include()]
except Exception:  # no cython/numpy at build time: pure-Python install
    include_dirs = []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
