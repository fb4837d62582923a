import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "spinwire._kernels._rk4",
                ["src/spinwire/_kernels/_rk4.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The package works without the extension (numpy fallback), so a failed
# compile should not block installation.
for ext in ext_modules:
    ext.optional = True

setup(ext_modules=ext_modules)
