"""Build the optional compiled simulator kernels.

The extension is an accelerator, not a requirement: if Cython is missing we
compile the pregenerated C file when present, and if no C toolchain works at
all the install proceeds with the pure-Python kernels selected at import.
"""

import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError

PYX = Path("src/qtcnn/qsim/_kernels_cy.pyx")
C = PYX.with_suffix(".c")


def make_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        if not C.exists():
            print(
                "WARNING: Cython not installed and no pregenerated "
                f"{C} found; skipping the compiled kernels",
                file=sys.stderr,
            )
            return []
        sources = [str(C)]
        cythonize = None
    else:
        sources = [str(PYX)]
    exts = [
        Extension(
            "qtcnn.qsim._kernels_cy",
            sources,
            extra_compile_args=["-O3"],
        )
    ]
    if cythonize is not None:
        exts = cythonize(exts, compiler_directives={"language_level": "3"})
    return exts


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a downgrade, not an error."""

    def run(self):
        try:
            super().run()
        except PlatformError as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as exc:
            self._skip(exc)

    def _skip(self, exc):
        print(
            f"WARNING: compiled kernels unavailable ({exc}); "
            "the package will use the pure-Python kernels",
            file=sys.stderr,
        )


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
