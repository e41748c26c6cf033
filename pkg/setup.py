import warnings

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "irregflow._core._speedups",
                ["src/irregflow/_core/_speedups.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environments without Cython
    warnings.warn(f"building without compiled kernels ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
