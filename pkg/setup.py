"""Build script for the optional compiled scoring kernels.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the BM25 and cosine inner loops faster.
"""

from setuptools import find_packages, setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cwemap._kernels._native",
                ["src/cwemap/_kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
except ImportError:
    ext_modules = []

# layout declared here as well so pre-PEP-621 setuptools fallbacks still
# resolve the src tree and ship the data files
setup(
    ext_modules=ext_modules,
    package_dir={"": "src"},
    packages=find_packages("src"),
    package_data={"cwemap": ["data/*.json", "data/*.txt"]},
)
