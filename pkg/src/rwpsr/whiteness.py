"""Residual whiteness measures.

``whiteness_measure`` is the normalised squared autocorrelation norm of an
image, evaluated in the Fourier domain. ``fast_whiteness`` evaluates the same
quantity for the residual of the Tikhonov solution without solving: the
residual's aliased spectrum in group ``g`` is ``(nu_g - rho_g) / (1 + eta_g mu)``,
so after one O(N log N) precomputation each ``mu`` costs O(n).
"""
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from .exceptions import NonPositiveMu, NonPositiveSigma, ZeroResidualSpectrum, ZeroSignal
from .grid import as_image, dft2

__all__ = [
    "autocorrelation",
    "whiteness_measure",
    "WhitenessTable",
    "build_whiteness_table",
    "fast_whiteness",
    "fast_residual_norm",
    "CurvePoint",
    "WhitenessCurve",
    "whiteness_curve",
]


def autocorrelation(e):
    """Circular sample autocorrelation ``a[l, m] = (1/n) sum_ij e[i,j] e[i+l, j+m]``.

    Lags run over ``0 <= l < rows``, ``0 <= m < cols``.
    """
    e = as_image(e)
    et = np.fft.fft2(e)
    return np.real(np.fft.ifft2(np.abs(et) ** 2)) / e.size


def whiteness_measure(e):
    """``sum |e~|^4 / (sum |e~|^2)^2`` over all DFT bins of ``e``.

    Ranges from ``1/n`` (flat spectrum) to 1 (a single nonzero bin) and does
    not depend on the scale of ``e``.
    """
    p = np.abs(dft2(e)) ** 2
    total = p.sum()
    if total == 0:
        raise ZeroSignal("whiteness of an all-zero image is undefined")
    p /= total
    return float(np.sum(p * p))


@dataclass(frozen=True, eq=False)
class WhitenessTable:
    """Per-alias-group constants for the residual whiteness function.

    ``eta``, ``rho`` and ``nu`` are LR-shaped; ``d`` is the group size.
    """

    eta: np.ndarray
    rho: np.ndarray
    nu: np.ndarray
    d: int

    @property
    def n(self):
        return self.eta.size

    @property
    def N(self):
        return self.eta.size * self.d

    @property
    def numerator(self):
        return self.nu - self.rho


def build_whiteness_table(ctx):
    groups = ctx.groups
    lam = ctx.op.otf
    eta = ctx.omega / ctx.d
    rho = groups.reduce(ctx.bH_spec)
    nu = groups.reduce(lam * ctx.psi * ctx.z_reg)
    return WhitenessTable(eta=eta, rho=rho, nu=nu, d=ctx.d)


def _group_values(mu, tbl):
    if not (np.isfinite(mu) and mu > 0):
        raise NonPositiveMu(f"mu must be a positive finite number, got {mu!r}")
    return np.abs(tbl.numerator) / (1.0 + tbl.eta * mu)


def fast_whiteness(mu, tbl):
    """Residual whiteness ``W(mu)`` from the precomputed table.

    The sums run over all ``N`` HR bins, each group value counted ``d`` times.
    This equals ``whiteness_measure(residual) / d``.
    """
    a2 = _group_values(mu, tbl) ** 2
    s2 = tbl.d * a2.sum()
    if s2 == 0:
        raise ZeroResidualSpectrum("nu - rho vanishes in every alias group")
    return float(tbl.d * np.sum(a2 * a2) / (s2 * s2))


def fast_residual_norm(mu, tbl):
    """``||S K x*(mu) - b||_2`` from the table, O(n) per call."""
    a = _group_values(mu, tbl)
    return float(np.sqrt(np.sum(a * a) / tbl.d))


class CurvePoint(NamedTuple):
    mu: float
    W: float
    tau: float


class WhitenessCurve(List[CurvePoint]):
    """Sampled ``(mu, W, tau)`` triples, ordered by ``mu``.

    ``tau`` is ``nan`` when the noise level was not supplied.
    """

    @property
    def mus(self):
        return np.array([p.mu for p in self])

    @property
    def W(self):
        return np.array([p.W for p in self])

    @property
    def tau(self):
        return np.array([p.tau for p in self])


def whiteness_curve(mus, tbl, sigma: Optional[float] = None):
    mus = np.asarray(mus, dtype=np.float64)
    if mus.size > 1 and np.any(np.diff(mus) <= 0):
        raise ValueError("mu values must be strictly increasing")
    if sigma is not None and not sigma > 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")
    scale = None if sigma is None else np.sqrt(tbl.n) * sigma
    curve = WhitenessCurve()
    for mu in mus:
        tau = float("nan") if scale is None else fast_residual_norm(mu, tbl) / scale
        curve.append(CurvePoint(float(mu), fast_whiteness(mu, tbl), tau))
    return curve
