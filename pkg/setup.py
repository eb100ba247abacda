import sys

from setuptools import setup

try:
    from pybind11.setup_helpers import Pybind11Extension, build_ext
except ImportError:  # the pure-Python engine still works without the kernel
    ext_modules, cmdclass = [], {}
else:
    ext_modules = [
        Pybind11Extension(
            "brickcount._tmcore",
            ["src/brickcount/_tmcore.cpp"],
            cxx_std=17,
            extra_compile_args=["-O3"] if sys.platform != "win32" else [],
        )
    ]
    cmdclass = {"build_ext": build_ext}

setup(ext_modules=ext_modules, cmdclass=cmdclass)
