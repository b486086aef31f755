"""Build script: compiles the optional signature-scanning extension.

The package works without the extension (a pure-Python twin of the kernel
is selected at import time), so the build is marked optional and any
compiler failure degrades to the fallback instead of aborting the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "aalkit._scan_c",
                ["src/aalkit/_scan_c.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
