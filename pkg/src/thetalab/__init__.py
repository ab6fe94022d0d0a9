"""thetalab: a numerical laboratory for even positive kernels, their Fourier
cosine transforms, generalized Laguerre expressions, associated
positive-definite kernels and moment/Turan inequalities."""

__version__ = "0.1.0"
