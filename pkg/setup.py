import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = cythonize(
    [Extension(
        "beamsync._corekernels",
        ["src/beamsync/_corekernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )],
    compiler_directives={"language_level": "3"},
)

setup(ext_modules=ext_modules)
