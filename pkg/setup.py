import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FANCOLOUR_PURE"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "fancolour._fastcore",
                    sources=["src/fancolour/_fastcore.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        # no Cython available: install runs pure-Python only
        ext_modules = []

setup(ext_modules=ext_modules)
