"""Build script: compiles the optional Cython kernel when a toolchain is
available; the package falls back to the NumPy backend otherwise."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("diracbag._kernel", ["src/diracbag/_kernel.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
