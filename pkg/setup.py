import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    cythonize = None


def extensions():
    if cythonize is None or os.environ.get("DISTOPT_NO_EXT"):
        return []
    ext = Extension(
        "distopt._kernels",
        ["src/distopt/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        optional=True,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
