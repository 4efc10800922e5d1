"""Build script for the optional compiled kernel module.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so the extension is marked optional: if Cython or a
C compiler is unavailable the install proceeds with the pure-Python kernels.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "matchplan._core",
        ["src/matchplan/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
