"""Build script for the optional compiled elastic-force kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the Cython module only accelerates the hot
per-element force/tangent loop.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stable_inv._ancf_kernels",
                ["src/stable_inv/_ancf_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
