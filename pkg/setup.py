"""Build the optional compiled kernel.

Without Cython (or a C compiler) the package installs pure-Python and the
numpy fallback kernel is used.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("hillgraph._kernel", ["src/hillgraph/_kernel.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
