import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "jumprough._kernels._ckernels",
        ["src/jumprough/_kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        # no FMA contraction: the compiled kernels must be bit-identical
        # to the pure numpy fallback
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
