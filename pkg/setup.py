from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no compiler toolchain: the pure-Python kernel is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("ioalg._ckernel", ["src/ioalg/_ckernel.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
