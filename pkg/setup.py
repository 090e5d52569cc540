"""Build script: compiles the optional stepping kernel when a toolchain exists.

The package is fully functional without the extension; haltlab.vm falls back to
the pure-Python kernel at import time.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow compiler failures so the pure-Python install still succeeds."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            print(f"haltlab: skipping compiled kernel ({exc!r})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"haltlab: skipping {ext.name} ({exc!r})")


ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/haltlab/_stepper.pyx"],
        language_level="3",
    )
except Exception as exc:  # noqa: BLE001 - Cython missing is fine
    print(f"haltlab: Cython unavailable, pure-Python kernel only ({exc!r})")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
