"""Build script for the optional compiled kernels.

The extension links against MPFR and GMP. If it cannot be built the package
installs without it and falls back to the pure-Python kernels at import.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def _warn(self, exc):
        if os.environ.get("FIG8RT_REQUIRE_EXT"):
            raise exc
        print(f"warning: compiled kernels not built ({exc}); using the Python fallback", file=sys.stderr)


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "fig8rt._kernels",
        ["src/fig8rt/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        libraries=["mpfr", "gmp"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
