from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback kernels are used when the extension is absent.
    ext_modules = None
else:
    ext_modules = cythonize(
        [Extension("ctrlsel._tucore", ["src/ctrlsel/_tucore.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
