"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import); a failed compile therefore degrades to a warning
instead of failing the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as err:  # missing compiler, broken toolchain, ...
            warnings.warn(f"skipping compiled kernels ({err}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as err:
            warnings.warn(f"skipping {ext.name} ({err}); using the numpy fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "acsplit._kernels._core",
        ["src/acsplit/_kernels/_core.pyx"],
        # -ffp-contract=off keeps the compiled kernels bit-compatible with
        # the numpy reference (no fused multiply-add reassociation)
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
