"""Build the optional compiled kernels.

The package works without them: ``fracbound._kernels`` falls back to the
numpy implementations when the extension is missing.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "fracbound._kernels._ckernels",
                ["src/fracbound/_kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # reassociation lets the convolution reduction vectorize; no -ffast-math
                # because the Hoelder scan relies on infinities
                extra_compile_args=["-O3", "-fassociative-math", "-fno-signed-zeros",
                                    "-fno-trapping-math"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
