"""Build script: compiles the hot-kernel extension when Cython and a C
compiler are available, otherwise installs pure Python (the package then
runs on the numpy fallback selected in rrhsim.backend)."""

import warnings

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rrhsim._kernels",
                ["src/rrhsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    warnings.warn("Cython not available; installing without the compiled kernels")

setup(ext_modules=ext_modules)
