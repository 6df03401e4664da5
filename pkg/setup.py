"""Build script for the compiled chain-CRF kernels.

The extension is optional at runtime: toxspan.crf.kernels falls back to the
pure-numpy implementation when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "toxspan.crf._chain",
                ["src/toxspan/crf/_chain.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
