"""Build script: compiles the optional C++ speedup kernels.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); the build therefore tolerates a
missing compiler. Set KTMAP_NO_EXT=1 to skip the extension entirely, or
build in place for development with:

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Let the install proceed if the extension cannot be compiled."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            print(f"WARNING: speedup extension not built ({exc}); "
                  "falling back to pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: failed to compile {ext.name} ({exc}); "
                  "falling back to pure-Python kernels")


ext_modules = []
if not os.environ.get("KTMAP_NO_EXT"):
    try:
        from Cython.Build import cythonize

        # -ffp-contract=off: the pure and compiled kernels must produce
        # bit-identical floats, so FMA contraction is disabled.
        ext_modules = cythonize(
            [
                Extension(
                    "ktmap._kernels._speedups",
                    ["src/ktmap/_kernels/_speedups.pyx"],
                    language="c++",
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        print("WARNING: Cython not available; building without speedups")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
