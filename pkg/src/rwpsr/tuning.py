"""Regularisation parameter selection.

``select_rwp`` minimises the residual whiteness over a log-spaced grid and
polishes the minimiser by golden-section search; it never sees the noise
level. ``select_dp`` is the discrepancy-principle baseline and needs it.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import BoundaryMinimumWarning, NonPositiveSigma, TargetUnreachable
from .solver import residual_lr, solve
from .whiteness import (
    build_whiteness_table,
    fast_residual_norm,
    fast_whiteness,
    whiteness_curve,
)

__all__ = ["MuGrid", "SelectionReport", "select_rwp", "select_dp", "tau_of_mu", "golden_section"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class MuGrid:
    """``count`` values log-spaced between ``mu_min`` and ``mu_max``."""

    mu_min: float = 1e-3
    mu_max: float = 1e6
    count: int = 200

    def __post_init__(self):
        if not (self.mu_min > 0 and np.isfinite(self.mu_max)):
            raise ValueError("grid bounds must be positive and finite")
        if self.count < 1:
            raise ValueError(f"count must be at least 1, got {self.count}")
        if self.count > 1 and not self.mu_max > self.mu_min:
            raise ValueError("mu_max must exceed mu_min")

    @classmethod
    def parse(cls, text):
        """Parse ``"lo:hi:count"`` with ``lo``/``hi`` given as log10 exponents."""
        try:
            lo, hi, count = text.split(":")
            return cls(10.0 ** float(lo), 10.0 ** float(hi), int(count))
        except ValueError as exc:
            raise ValueError(f"grid must look like 'lo:hi:count', got {text!r}") from exc

    @property
    def values(self):
        if self.count == 1:
            return np.array([float(self.mu_min)])
        return np.logspace(math.log10(self.mu_min), math.log10(self.mu_max), self.count)


@dataclass
class SelectionReport:
    mu_star: float
    strategy: str
    tau_star: Optional[float] = None
    W_star: Optional[float] = None
    boundary: bool = False
    curve: list = field(default_factory=list)


def golden_section(f, lo, hi, tol=1e-3, max_iter=200):
    """Minimise a unimodal ``f`` on ``[lo, hi]`` to an interval of width ``tol``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def select_rwp(ctx, tbl=None, grid=MuGrid(), refine=True):
    """Pick ``mu`` minimising the residual whiteness function.

    Ties (within ``TIE_RTOL`` relative) go to the smallest ``mu``. A minimiser on the first or last grid
    point sets ``boundary`` and emits :class:`BoundaryMinimumWarning`; no
    refinement is attempted then.
    """
    if tbl is None:
        tbl = build_whiteness_table(ctx)
    mus = grid.values
    curve = whiteness_curve(mus, tbl)
    W = curve.W
    # values within round-off of the minimum count as ties
    k = int(np.flatnonzero(W <= W.min() * (1 + TIE_RTOL))[0])
    mu_star, w_star = float(mus[k]), float(W[k])
    boundary = len(mus) > 1 and k in (0, len(mus) - 1)
    if boundary:
        warnings.warn(
            f"whiteness minimum at grid edge mu={mu_star:g}; widen the grid",
            BoundaryMinimumWarning,
            stacklevel=2,
        )
    elif refine and len(mus) > 2:
        logmu, w = golden_section(
            lambda t: fast_whiteness(10.0**t, tbl),
            math.log10(mus[k - 1]),
            math.log10(mus[k + 1]),
        )
        if w < w_star:
            mu_star, w_star = 10.0**logmu, w
    return SelectionReport(
        mu_star=mu_star, strategy="RWP", W_star=w_star, boundary=boundary, curve=curve
    )


def select_dp(ctx, sigma, tau=1.0, grid=MuGrid(), tbl=None, rtol=1e-6, max_iter=100):
    """Bisect ``log10 mu`` until ``||S K x*(mu) - b|| = tau sqrt(n) sigma``."""
    if not sigma > 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    if tbl is None:
        tbl = build_whiteness_table(ctx)
    target = tau * math.sqrt(tbl.n) * sigma
    lo, hi = math.log10(grid.mu_min), math.log10(grid.mu_max)
    r_lo = fast_residual_norm(10.0**lo, tbl)
    r_hi = fast_residual_norm(10.0**hi, tbl)
    if not (r_hi <= target <= r_lo):
        raise TargetUnreachable(
            f"target residual {target:.6g} outside [{r_hi:.6g}, {r_lo:.6g}] "
            f"spanned by mu in [{grid.mu_min:g}, {grid.mu_max:g}]"
        )
    samples = [(10.0**lo, r_lo), (10.0**hi, r_hi)]
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        r = fast_residual_norm(10.0**mid, tbl)
        samples.append((10.0**mid, r))
        if abs(r - target) <= rtol * target:
            break
        # residual norm decreases with mu
        if r > target:
            lo = mid
        else:
            hi = mid
    mu_star = 10.0**mid
    return SelectionReport(
        mu_star=mu_star,
        strategy="DP",
        tau_star=samples[-1][1] / (math.sqrt(tbl.n) * sigma),
        curve=sorted(samples),
    )


def tau_of_mu(mu, ctx, sigma):
    """``||S K x*(mu) - b|| / (sqrt(n) sigma)``, computed from an actual solve."""
    if not sigma > 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")
    r = residual_lr(solve(mu, ctx), ctx.b, ctx.op)
    return float(np.linalg.norm(r) / (math.sqrt(r.size) * sigma))
