"""Decimation, blur and regularisation operators with their Fourier diagonals.

Blur and regularisation kernels act by periodic convolution, so each is fully
described by its unnormalised FFT (the OTF). Decimation keeps the top-left
sample of every ``d_r x d_c`` block; its adjoint interleaves zeros.

Under decimation the HR frequency ``(u + a*n_r, v + b*n_c)`` folds onto the LR
frequency ``(u, v)``; :class:`AliasGroups` exposes this folding through index
arithmetic, never through an explicit ``N x N`` permutation.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .exceptions import ShapeMismatch
from .grid import as_image, dft2, idft2

__all__ = [
    "DecimationFactors",
    "DegradationOperator",
    "RegularizerStack",
    "AliasGroups",
    "embed_kernel",
    "psf2otf",
    "downsample",
    "upsample_zero",
    "apply_blur",
    "build_alias_groups",
    "build_difference_regularizer",
    "build_regularizer",
]

DEFAULT_EPSILON = 1e-8


@dataclass(frozen=True)
class DecimationFactors:
    d_r: int = 1
    d_c: int = 1

    def __post_init__(self):
        for name in ("d_r", "d_c"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @classmethod
    def square(cls, d):
        return cls(d, d)

    @property
    def d(self):
        return self.d_r * self.d_c

    def lr_shape(self, hr_shape):
        rows, cols = hr_shape
        if rows % self.d_r or cols % self.d_c:
            raise ShapeMismatch(
                f"HR shape {tuple(hr_shape)} not divisible by factors ({self.d_r}, {self.d_c})"
            )
        return rows // self.d_r, cols // self.d_c

    def hr_shape(self, lr_shape):
        return lr_shape[0] * self.d_r, lr_shape[1] * self.d_c


def embed_kernel(kernel, shape, center=None):
    """Zero-pad ``kernel`` to ``shape`` and roll its centre to index (0, 0).

    ``center`` defaults to ``(rows // 2, cols // 2)`` of the small kernel,
    i.e. the middle tap for odd sizes.
    """
    kernel = as_image(kernel, "kernel")
    kr, kc = kernel.shape
    if kr > shape[0] or kc > shape[1]:
        raise ShapeMismatch(f"kernel {kernel.shape} larger than grid {tuple(shape)}")
    if center is None:
        center = (kr // 2, kc // 2)
    out = np.zeros(shape)
    out[:kr, :kc] = kernel
    return np.roll(out, (-center[0], -center[1]), axis=(0, 1))


def psf2otf(kernel, shape, center=None):
    """Unnormalised FFT of the centred embedding, so that ``K x = ifft(otf * fft(x))``."""
    return np.fft.fft2(embed_kernel(kernel, shape, center))


@dataclass(frozen=True, eq=False)
class DegradationOperator:
    """Blur ``K`` followed by decimation ``S`` on a fixed HR grid.

    Attributes
    ----------
    psf : ndarray
        HR-sized embedded kernel (centre tap at (0, 0)).
    otf : ndarray
        ``np.fft.fft2(psf)``; its DC value equals the kernel sum.
    factors : DecimationFactors
    """

    psf: np.ndarray
    otf: np.ndarray
    factors: DecimationFactors

    @classmethod
    def from_kernel(cls, kernel, hr_shape, factors=DecimationFactors(), center=None):
        factors.lr_shape(hr_shape)
        psf = embed_kernel(kernel, hr_shape, center)
        return cls(psf=psf, otf=np.fft.fft2(psf), factors=factors)

    @property
    def hr_shape(self):
        return self.psf.shape

    @property
    def lr_shape(self):
        return self.factors.lr_shape(self.psf.shape)


@dataclass(frozen=True, eq=False)
class RegularizerStack:
    """Stacked convolutional regulariser ``L = [L_1; ...; L_K]`` with targets ``v_k``.

    ``gammas[k]`` is the unnormalised FFT of the embedded kernel of block ``k``.
    """

    kernels: Tuple[np.ndarray, ...]
    gammas: Tuple[np.ndarray, ...]
    targets: Tuple[np.ndarray, ...]
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (len(self.kernels) == len(self.gammas) == len(self.targets)):
            raise ValueError("kernels, gammas and targets must have equal length")

    @property
    def hr_shape(self):
        return self.gammas[0].shape

    @property
    def gamma_sq(self):
        if not self.gammas:
            raise ValueError("empty regulariser stack has no shape")
        return sum(np.abs(g) ** 2 for g in self.gammas)

    @property
    def psi(self):
        return 1.0 / (self.gamma_sq + self.epsilon)

    @property
    def has_targets(self):
        return any(np.any(v) for v in self.targets)

    def target_term(self):
        """Fourier coefficients of ``L^H v``: ``sum_k conj(gamma_k) * dft2(v_k)``."""
        z = np.zeros(self.hr_shape, dtype=np.complex128)
        for g, v in zip(self.gammas, self.targets):
            if np.any(v):
                z += np.conj(g) * dft2(v)
        return z

    def apply(self, x):
        """Return the list ``[L_k x]`` computed spectrally."""
        xt = np.fft.fft2(as_image(x))
        return [np.real(np.fft.ifft2(g * xt)) for g in self.gammas]


def build_regularizer(hr_shape, kernels: Sequence, targets: Optional[Sequence] = None,
                      epsilon=DEFAULT_EPSILON, centers=None):
    """Build a :class:`RegularizerStack` from small kernels (embedded and centred)."""
    hr_shape = tuple(hr_shape)
    if centers is None:
        centers = [None] * len(kernels)
    embedded = tuple(embed_kernel(k, hr_shape, c) for k, c in zip(kernels, centers))
    gammas = tuple(np.fft.fft2(k) for k in embedded)
    if targets is None:
        targets = [np.zeros(hr_shape)] * len(kernels)
    targets = tuple(as_image(v, "target") for v in targets)
    for v in targets:
        if v.shape != hr_shape:
            raise ShapeMismatch(f"target shape {v.shape} != HR shape {hr_shape}")
    return RegularizerStack(embedded, gammas, targets, float(epsilon))


def build_difference_regularizer(hr_shape, epsilon=DEFAULT_EPSILON):
    """Horizontal and vertical forward differences with periodic wrap, ``v = 0``.

    ``(D_h x)[i, j] = x[i, j+1] - x[i, j]`` and likewise along rows for ``D_v``.
    """
    # convolution form of a forward difference: k[0] = -1, k[-1] = +1
    dh = np.array([[1.0, -1.0]])
    dv = np.array([[1.0], [-1.0]])
    return build_regularizer(
        hr_shape, [dh, dv], epsilon=epsilon, centers=[(0, 1), (1, 0)]
    )


@dataclass(frozen=True, eq=False)
class AliasGroups:
    """Partition of the HR frequency grid into ``n`` groups of ``d`` aliased bins.

    Group ``g = u * n_c + v`` holds HR bins ``(u + a*n_r, v + b*n_c)`` for
    ``0 <= a < d_r``, ``0 <= b < d_c`` ordered by ``(a, b)``.
    """

    hr_shape: Tuple[int, int]
    factors: DecimationFactors
    lr_shape: Tuple[int, int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lr_shape", self.factors.lr_shape(self.hr_shape))

    @property
    def n_groups(self):
        return self.lr_shape[0] * self.lr_shape[1]

    @property
    def size(self):
        return self.factors.d

    def group_ids(self):
        """HR-shaped array of group labels (flat LR index)."""
        nr, nc = self.lr_shape
        p = np.arange(self.hr_shape[0]) % nr
        q = np.arange(self.hr_shape[1]) % nc
        return p[:, None] * nc + q[None, :]

    def members(self, g):
        """Flat HR indices of group ``g`` in ``(a, b)`` order."""
        nr, nc = self.lr_shape
        u, v = divmod(int(g), nc)
        cols = self.hr_shape[1]
        return [
            (u + a * nr) * cols + (v + b * nc)
            for a in range(self.factors.d_r)
            for b in range(self.factors.d_c)
        ]

    def _blocks(self, arr):
        nr, nc = self.lr_shape
        return arr.reshape(self.factors.d_r, nr, self.factors.d_c, nc)

    def reduce(self, arr):
        """Sum an HR-shaped array over each group, giving an LR-shaped array."""
        arr = np.asarray(arr)
        if arr.shape != tuple(self.hr_shape):
            raise ShapeMismatch(f"expected HR shape {self.hr_shape}, got {arr.shape}")
        return self._blocks(arr).sum(axis=(0, 2))

    def expand(self, arr):
        """Broadcast an LR-shaped per-group array back onto the HR grid."""
        return np.tile(np.asarray(arr), (self.factors.d_r, self.factors.d_c))

    def permutation(self):
        """Explicit ordering of all HR flat indices grouped by alias group.

        Only meant for small-shape checks; it materialises ``N`` integers.
        """
        return np.concatenate([self.members(g) for g in range(self.n_groups)])


def build_alias_groups(hr_shape, factors):
    return AliasGroups(tuple(int(s) for s in hr_shape), factors)


def downsample(x_hr, factors):
    """``S x``: keep every ``d_r``-th row and ``d_c``-th column, starting at 0."""
    x_hr = as_image(x_hr)
    factors.lr_shape(x_hr.shape)
    return np.ascontiguousarray(x_hr[:: factors.d_r, :: factors.d_c])


def upsample_zero(y_lr, factors):
    """``S^H y``: place ``y`` on the decimation lattice, zeros elsewhere."""
    y_lr = as_image(y_lr)
    out = np.zeros(factors.hr_shape(y_lr.shape))
    out[:: factors.d_r, :: factors.d_c] = y_lr
    return out


def apply_blur(x, op):
    """``K x`` by spectral multiplication with the operator's OTF."""
    x = as_image(x)
    if x.shape != op.hr_shape:
        raise ShapeMismatch(f"image {x.shape} does not match operator grid {op.hr_shape}")
    return idft2(op.otf * dft2(x))
