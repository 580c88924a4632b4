"""Build hook for the optional Cython kernel.

The package works without it: ``tddiff.similarity`` falls back to the
pure-Python implementation when the extension cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TDDIFF_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "tddiff._lcs_ext",
                    ["src/tddiff/_lcs_ext.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
