from pathlib import Path

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# Shares the scalar kernel header with the main package (monorepo build);
# same parity flags so results stay bit-identical across packages.
KERNEL_INCLUDE = Path(__file__).resolve().parent.parent / "src" / "rotbox" / "_kernels" / "include"

PARITY_FLAGS = [
    "-O3",
    "-ffp-contract=off",
    "-fno-builtin-sin",
    "-fno-builtin-cos",
]

extensions = [
    Extension(
        "rotbox_bindings._batch",
        ["src/rotbox_bindings/_batch.pyx"],
        include_dirs=[np.get_include(), str(KERNEL_INCLUDE)],
        extra_compile_args=PARITY_FLAGS,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
