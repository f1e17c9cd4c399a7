from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled kernel's arithmetic identical to the
# pure-Python fallback (no fused multiply-add contraction).
extensions = [
    Extension(
        "crosswind._kernel",
        ["src/crosswind/_kernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
