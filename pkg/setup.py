"""Build script: compiles the optional grouping kernel.

The package works without the compiled extension (a pure-Python kernel is
selected at import time), so a failed cythonize is downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "aegisim.kernels._grouping",
                ["src/aegisim/kernels/_grouping.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    warnings.warn(f"compiled grouping kernel skipped ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
