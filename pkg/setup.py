import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QDEQ_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("qdeq._nested", ["src/qdeq/_nested.pyx"], extra_compile_args=["-O3"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
