import os

from setuptools import setup

ext_modules = []
if os.environ.get("NCX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/ncomplex/_speedups.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Pure-Python install; the kernel selector falls back at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
