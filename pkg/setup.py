from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("omegamoves._speedups", ["src/omegamoves/_speedups.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-python fallback is selected at import time; the extension is optional.
    extensions = []

setup(ext_modules=extensions)
