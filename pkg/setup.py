"""Build script for the optional compiled tie-counting kernel.

The package works without the extension (a pure-Python engine is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "cotravel._kernel",
                ["src/cotravel/_kernel.pyx"],
                language="c++",
                extra_compile_args=["-O3", "-std=c++17"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
