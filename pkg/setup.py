"""Build script: compiles the RK stepper extension when Cython is available.

The package works without the extension (halfscat._backend falls back to the
pure-numpy stepper), so any build failure here only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "halfscat._stepper",
                ["src/halfscat/_stepper.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
