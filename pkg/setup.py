"""Build script for the optional compiled kernel extension.

The extension is marked optional: if Cython or a C compiler is missing the
install still succeeds and the package falls back to the pure-Python kernels.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "bipcore.kernels._ckernels",
                ["src/bipcore/kernels/_ckernels.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
