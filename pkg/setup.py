import numpy as np
from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "bergmanlab._kernels._jacobi_cy",
                ["src/bergmanlab/_kernels/_jacobi_cy.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython available: the package still works through the numpy fallback.
    extensions = []

setup(ext_modules=extensions)
