import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # numpy fallback kernels are used at import time
    cythonize = None

extensions = [
    Extension(
        "maxdirac._ckernels",
        ["src/maxdirac/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"}) if cythonize else []
setup(ext_modules=ext_modules)
