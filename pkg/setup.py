from setuptools import Extension, setup

import numpy

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "levykit._kernels._core",
                ["src/levykit/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
                language="c",
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # missing compiler degrades to the pure-python backend
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
