"""Build the optional compiled curvature kernel.

If Cython or a C compiler is missing the package still installs and falls back
to the numpy implementation at import time.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("corrugate.curvature._kernels",
                   sources=["src/corrugate/curvature/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"],
                   optional=True)],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
