import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The pure-Python backend must reproduce the compiled kernels bit for bit:
# no -ffast-math, no FMA contraction, and no sin+cos -> sincos fusion
# (glibc's sincos rounds differently from the standalone sin that the
# math module calls).
PARITY_FLAGS = [
    "-O3",
    "-ffp-contract=off",
    "-fno-builtin-sin",
    "-fno-builtin-cos",
]

extensions = [
    Extension(
        "rotbox._kernels._native",
        ["src/rotbox/_kernels/_native.pyx"],
        include_dirs=[np.get_include(), "src/rotbox/_kernels/include"],
        extra_compile_args=PARITY_FLAGS,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
