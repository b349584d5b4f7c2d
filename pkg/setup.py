"""Build script: compiles the optional search kernel extension.

The package works without the extension (a pure-Python kernel is selected at
import time), so any failure here degrades to a source-only install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/bikeguide/planning/_kernel.pyx"],
        language_level=3,
        annotate=False,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"warning: search kernel extension skipped ({exc}); "
          "pure-Python fallback will be used", flush=True)

setup(ext_modules=ext_modules)
