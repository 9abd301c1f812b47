import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# The pair-sum kernels are O(n^6 * m_phi); everything here is about making the
# innermost (contiguous) loop auto-vectorizable. OpenMP is used for the offset
# loop; thread count is chosen at run time (DELTABOLT_THREADS).
compile_args = ["-O3", "-fopenmp"]
link_args = ["-fopenmp"]
if os.environ.get("DELTABOLT_PORTABLE", "") != "1":
    compile_args.append("-march=native")

extensions = [
    Extension(
        "deltabolt._core",
        ["src/deltabolt/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3),
)
