"""Build the optional compiled kernels; the package falls back to pure Python without them."""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GRAINFLOW_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "grainflow._ckernels",
                    ["src/grainflow/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no FMA contraction: keeps results identical to the Python fallback
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
