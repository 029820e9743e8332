"""Synthetic observations ``b = S K x + e`` with a Gaussian blur and seeded AWGN.

Noise is drawn with ``numpy.random.Generator(PCG64(seed)).standard_normal``
(ziggurat transform over the PCG64 stream), which numpy guarantees to be
reproducible across platforms for a given seed and numpy stream version.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import EvenBand
from .grid import as_image
from .linops import DecimationFactors, DegradationOperator, apply_blur, downsample

__all__ = [
    "GaussianPsfSpec",
    "NoiseSpec",
    "Preset",
    "PRESETS",
    "gaussian_kernel",
    "noise",
    "degrade",
]


@dataclass(frozen=True)
class GaussianPsfSpec:
    band: int = 9
    sigma_psf: float = 2.0

    def __post_init__(self):
        if int(self.band) != self.band or self.band < 1:
            raise ValueError(f"band must be a positive integer, got {self.band!r}")
        if self.band % 2 == 0:
            raise EvenBand(f"band must be odd, got {self.band}")
        if not self.sigma_psf > 0:
            raise ValueError(f"sigma_psf must be positive, got {self.sigma_psf!r}")


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError(f"noise sigma must be non-negative, got {self.sigma!r}")


@dataclass(frozen=True)
class Preset:
    psf: GaussianPsfSpec
    factors: DecimationFactors
    noise_sigma: float


PRESETS = {
    "test1": Preset(GaussianPsfSpec(9, 2.0), DecimationFactors(4, 4), 0.05),
    "test2": Preset(GaussianPsfSpec(13, 3.0), DecimationFactors(4, 4), 0.1),
}


def gaussian_kernel(spec):
    """Normalised ``band x band`` isotropic Gaussian, as MATLAB's ``fspecial``."""
    if not isinstance(spec, GaussianPsfSpec):
        raise TypeError("expected a GaussianPsfSpec")
    c = (spec.band - 1) / 2
    t = np.arange(spec.band) - c
    k = np.exp(-(t[:, None] ** 2 + t[None, :] ** 2) / (2.0 * spec.sigma_psf**2))
    return k / k.sum()


def noise(shape, spec):
    """``spec.sigma * N(0, 1)`` samples of the given shape, fully determined by the seed."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return spec.sigma * rng.standard_normal(shape)


def degrade(x_true, psf, factors, noise_spec):
    """Blur, decimate and add noise. Returns ``(b, e)``."""
    x_true = as_image(x_true, "x_true")
    if psf.band == 1:
        # a normalised 1x1 kernel is the identity; skip the FFT round-off
        blurred = x_true
    else:
        op = DegradationOperator.from_kernel(gaussian_kernel(psf), x_true.shape, factors)
        blurred = apply_blur(x_true, op)
    clean = downsample(blurred, factors)
    e = noise(clean.shape, noise_spec)
    return clean + e, e
