"""Build script for the compiled agglomeration kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package installs without it and falls back to the pure-numpy kernels at
import time (see wardgeo.kernels).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "wardgeo.kernels._agglo_cy",
                ["src/wardgeo/kernels/_agglo_cy.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
