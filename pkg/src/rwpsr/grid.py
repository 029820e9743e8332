"""Real/complex 2-D rasters and the unitary 2-D DFT.

Images are plain ``float64`` ndarrays of shape ``(rows, cols)``; spectra are
``complex128`` arrays of the same shape with the DC bin at ``[0, 0]`` (no
fftshift). Both transform directions carry a ``1/sqrt(rows*cols)`` factor, so
``idft2(dft2(x)) == x`` and Parseval holds without extra constants.
"""
import numpy as np

from .exceptions import ShapeMismatch, SymmetryViolation

__all__ = ["as_image", "dft2", "idft2", "circular_convolve"]


def as_image(a, name="image"):
    """Return ``a`` as a finite 2-D float64 array, raising on anything else."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def dft2(img):
    """Unitary forward 2-D DFT of a real image."""
    return np.fft.fft2(as_image(img), norm="ortho")


def idft2(spec, tol=1e-9):
    """Unitary inverse 2-D DFT returning the real part.

    Raises :class:`SymmetryViolation` when the discarded imaginary part exceeds
    ``tol`` times the norm of the result, which means ``spec`` was not the
    spectrum of a real image.
    """
    spec = np.asarray(spec, dtype=np.complex128)
    if spec.ndim != 2:
        raise ShapeMismatch(f"spectrum must be 2-D, got shape {spec.shape}")
    out = np.fft.ifft2(spec, norm="ortho")
    scale = np.linalg.norm(out)
    if scale > 0 and np.linalg.norm(out.imag) > tol * scale:
        raise SymmetryViolation(
            f"imaginary residue {np.linalg.norm(out.imag):.3e} exceeds "
            f"{tol:g} x norm {scale:.3e}"
        )
    return np.ascontiguousarray(out.real)


def circular_convolve(a, b):
    """Periodic 2-D convolution ``(a * b)[i, j] = sum_kl a[k, l] b[i-k, j-l]``."""
    a = as_image(a, "a")
    b = as_image(b, "b")
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    scale = np.sqrt(a.size)
    return idft2(scale * dft2(a) * dft2(b))
