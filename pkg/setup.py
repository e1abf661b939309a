"""Build script: compiles the optional layout-solver extension.

The extension is a speedup, not a requirement; if Cython or a C compiler
is unavailable the install proceeds and the package falls back to the
pure-Python solver at import time.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow extension build failures so the wheel stays installable."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, header mismatch, ...
            warnings.warn(f"building hgda._kkcore failed ({exc}); "
                          "falling back to the pure-Python solver")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-Python solver")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "hgda._kkcore",
        ["src/hgda/_kkcore.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    # No -ffast-math / -march flags: the compiled solver must produce the
    # same IEEE-754 results as the pure-Python fallback.
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
