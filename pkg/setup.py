"""Build hook for the optional compiled Monte Carlo kernel.

The package is pure Python plus one Cython extension for the per-pulse
simulation loop.  If the extension cannot be built (no compiler, no
Cython) the install still succeeds and the simulator falls back to the
numpy implementation, so the build errors are deliberately swallowed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    directives = {
        "language_level": 3,
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
        "initializedcheck": False,
    }
    ext_modules = cythonize(
        [
            Extension(
                "tempokey._mc_kernel",
                ["src/tempokey/_mc_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives=directives,
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    import sys

    print(f"tempokey: compiled kernel skipped ({exc}); numpy fallback will be used",
          file=sys.stderr)

setup(ext_modules=ext_modules)
