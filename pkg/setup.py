import platform
import sys
from ctypes.util import find_library

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Without Cython the package still installs; the Monte Carlo engine
    # falls back to the pure-numpy backend at import time.
    ext_modules = []
else:
    extra_compile_args = ["-O3"]
    libraries = []
    # glibc's vector math library lets the compiler batch the per-step
    # power calls, the kernel's dominant cost (x86-64 Linux only).
    if (
        sys.platform == "linux"
        and platform.machine() == "x86_64"
        and find_library("mvec")
    ):
        extra_compile_args += ["-ffast-math", "-march=native"]
        libraries = ["mvec", "m"]
    ext_modules = cythonize(
        [
            Extension(
                "gaoval._mc_core",
                ["src/gaoval/_mc_core.pyx"],
                extra_compile_args=extra_compile_args,
                libraries=libraries,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
