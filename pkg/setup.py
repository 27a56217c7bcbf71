import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("JOHNBOX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "johnbox._kernels._core",
                    sources=["src/johnbox/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "language_level": "3",
            },
        )
    except ImportError:
        # Cython unavailable: install pure-Python only; the package selects
        # the numpy fallback at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
