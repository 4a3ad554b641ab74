import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "impsoh._kernels",
                ["src/impsoh/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython at build time: the package falls back to the pure-Python
    # kernels at import.
    ext_modules = []

setup(ext_modules=ext_modules)
