"""Build script: compiles the optional counting core when Cython and a C
toolchain are present; the package works (more slowly) without it."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "padiczeta._speed._corehot",
                sources=["src/padiczeta/_speed/_corehot.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"padiczeta: building without the compiled core ({exc})\n")

setup(ext_modules=ext_modules)
