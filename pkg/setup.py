"""Build script: compiles the optional Cython kernel extension.

The extension accelerates the hot inner loops (1D convolution, max pooling,
pairwise distances). If the toolchain or Cython is unavailable the install
still succeeds and the package falls back to the pure-NumPy kernels at
import time. Set SPECTRAL_BENCH_NO_NATIVE=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python package on compile failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing or broken
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: native kernel build failed ({exc}); "
              "falling back to pure-NumPy kernels.")


def native_extensions():
    if os.environ.get("SPECTRAL_BENCH_NO_NATIVE") == "1":
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"WARNING: {exc}; building without native kernels.")
        return []
    return cythonize(
        [
            Extension(
                "spectral_bench.kernels._native",
                ["src/spectral_bench/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=native_extensions(), cmdclass={"build_ext": optional_build_ext})
