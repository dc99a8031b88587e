"""Build script for the optional compiled kernels.

The package is fully functional without the extension: ``stationfill.kernels``
falls back to numpy implementations when the compiled module is missing, so a
failed build degrades performance instead of breaking the install.
"""

import logging

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

log = logging.getLogger("stationfill.setup")


def _extensions():
    import numpy as np
    from Cython.Build import cythonize

    ext = Extension(
        "stationfill._ckernels",
        ["src/stationfill/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Treat extension build failures as a warning, not an install failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            log.warning("skipping compiled kernels: %s", exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            log.warning("compilation of %s failed, using numpy fallback: %s", ext.name, exc)


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
