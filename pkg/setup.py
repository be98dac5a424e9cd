"""Build script: compiles the optional membership-matching extension.

Set RUAG_SKIP_EXT=1 to skip the compiled kernel entirely; the package then
falls back to the pure-Python matcher at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RUAG_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "ruaguard._matcher_c",
                    sources=["src/ruaguard/_matcher_c.pyx"],
                    language="c++",
                    extra_compile_args=["-O2"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        # No Cython available: ship pure Python only.
        ext_modules = []

setup(ext_modules=ext_modules)
