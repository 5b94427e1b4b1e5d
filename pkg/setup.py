"""Build script for the compiled statevector propagation core.

Everything else is configured in pyproject.toml; this file only wires up the
Cython extension (the package works without it through the numpy fallback).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [Extension("qmvk.qsim._core", ["src/qmvk/qsim/_core.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    extensions = []

setup(ext_modules=extensions)
