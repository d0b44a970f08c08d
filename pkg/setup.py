from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off pins bitwise agreement with the pure-Python kernel twin
# (no FMA contraction of a*b+c).
ext = Extension(
    "jacobi4._speedups",
    sources=["src/jacobi4/_speedups.pyx"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level="3"))
