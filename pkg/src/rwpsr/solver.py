"""Closed-form minimiser of the decimated l2-l2 Tikhonov problem.

For a fixed ``mu`` the minimiser of

    mu/2 ||S K x - b||^2 + 1/2 ||L x - v||^2 + eps/2 ||x||^2

is computed per Fourier bin. Decimation couples only the ``d`` bins of an
alias group, so the Woodbury identity turns the ``N x N`` inverse into a
scalar division per group and the whole solve costs two FFTs.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import NonPositiveMu, ShapeMismatch, SingularSystem
from .grid import as_image, dft2, idft2
from .linops import (
    AliasGroups,
    DegradationOperator,
    RegularizerStack,
    apply_blur,
    build_alias_groups,
    downsample,
    upsample_zero,
)

__all__ = [
    "SpectralSolveContext",
    "prepare_context",
    "solve",
    "solve_spectrum",
    "residual_lr",
    "dense_solve",
    "convolution_matrix",
    "decimation_matrix",
]


@dataclass(frozen=True, eq=False)
class SpectralSolveContext:
    """Everything about a problem instance that does not depend on ``mu``.

    Attributes
    ----------
    b : ndarray
        Observed LR image.
    bH_spec : ndarray
        ``dft2(upsample_zero(b))``; constant within each alias group.
    z_reg : ndarray
        Fourier coefficients of ``L^H v``.
    psi : ndarray
        ``1 / (sum_k |gamma_k|^2 + eps)`` per HR bin.
    omega : ndarray
        LR-shaped ``sum_{i in g} |lambda_i|^2 psi_i``.
    """

    b: np.ndarray
    op: DegradationOperator
    reg: RegularizerStack
    groups: AliasGroups
    bH_spec: np.ndarray
    z_reg: np.ndarray
    psi: np.ndarray
    omega: np.ndarray

    @property
    def d(self):
        return self.groups.size


def prepare_context(b, op, reg, groups=None):
    b = as_image(b, "b")
    if b.shape != op.lr_shape:
        raise ShapeMismatch(f"b has shape {b.shape}, operator expects {op.lr_shape}")
    if reg.hr_shape != op.hr_shape:
        raise ShapeMismatch(f"regulariser grid {reg.hr_shape} != operator grid {op.hr_shape}")
    if groups is None:
        groups = build_alias_groups(op.hr_shape, op.factors)
    elif tuple(groups.hr_shape) != op.hr_shape or groups.factors != op.factors:
        raise ShapeMismatch("alias groups do not match the operator")
    psi = reg.psi
    omega = groups.reduce(np.abs(op.otf) ** 2 * psi)
    return SpectralSolveContext(
        b=b,
        op=op,
        reg=reg,
        groups=groups,
        bH_spec=dft2(upsample_zero(b, op.factors)),
        z_reg=reg.target_term(),
        psi=psi,
        omega=omega,
    )


def _check_mu(mu):
    if not (np.isfinite(mu) and mu > 0):
        raise NonPositiveMu(f"mu must be a positive finite number, got {mu!r}")


def solve_spectrum(mu, ctx):
    """Unitary DFT of ``x*(mu)``.

    Per HR bin ``i`` in group ``g``::

        x_i = psi_i z_i - mu psi_i conj(lam_i) s_g / (d + mu omega_g)
        z_i = mu conj(lam_i) bH_i + zreg_i,   s_g = sum_{j in g} lam_j psi_j z_j

    Since ``bH`` is constant over a group, ``s_g = mu omega_g rho_g / d + nu_g``
    with ``rho_g = sum_g bH`` and ``nu_g = sum_g lam psi zreg``, and the data
    terms collapse to ``mu psi_i conj(lam_i) (rho_g - nu_g) / (d + mu omega_g)``.
    That form is used here: the literal one subtracts two terms of size
    ``mu psi |lam|^2`` and loses all precision once ``mu / eps`` is large.
    """
    _check_mu(mu)
    lam = ctx.op.otf
    groups = ctx.groups
    rho = groups.reduce(ctx.bH_spec)
    nu = groups.reduce(lam * ctx.psi * ctx.z_reg)
    data = groups.expand((rho - nu) / (ctx.d + mu * ctx.omega))
    return ctx.psi * (ctx.z_reg + mu * np.conj(lam) * data)


def solve(mu, ctx):
    """Minimiser ``x*(mu)`` on the HR grid."""
    return idft2(solve_spectrum(mu, ctx), tol=1e-6)


def residual_lr(x, b, op):
    """``S K x - b``."""
    x = as_image(x, "x")
    b = as_image(b, "b")
    if b.shape != op.lr_shape:
        raise ShapeMismatch(f"b has shape {b.shape}, operator expects {op.lr_shape}")
    return downsample(apply_blur(x, op), op.factors) - b


# ---------------------------------------------------------------------------
# dense reference path, for small problems only


def convolution_matrix(embedded_kernel):
    """Dense matrix of periodic convolution with an HR-embedded kernel.

    Built from kernel taps by index arithmetic, without any FFT.
    """
    k = np.asarray(embedded_kernel, dtype=np.float64)
    rows, cols = k.shape
    i, j = np.divmod(np.arange(rows * cols), cols)
    di = (i[:, None] - i[None, :]) % rows
    dj = (j[:, None] - j[None, :]) % cols
    return k[di, dj]


def decimation_matrix(hr_shape, factors):
    nr, nc = factors.lr_shape(hr_shape)
    cols = hr_shape[1]
    S = np.zeros((nr * nc, hr_shape[0] * cols))
    for r in range(nr):
        for c in range(nc):
            S[r * nc + c, (r * factors.d_r) * cols + c * factors.d_c] = 1.0
    return S


def dense_solve(mu, b, op, reg):
    """Solve ``(mu (SK)^T SK + L^T L + eps I) x = mu (SK)^T b + L^T v`` directly."""
    _check_mu(mu)
    b = as_image(b, "b")
    N = op.hr_shape[0] * op.hr_shape[1]
    if N > 4096:
        raise ValueError(f"dense_solve is a small-problem oracle; N={N} is too large")
    SK = decimation_matrix(op.hr_shape, op.factors) @ convolution_matrix(op.psf)
    A = mu * SK.T @ SK + reg.epsilon * np.eye(N)
    rhs = mu * SK.T @ b.ravel()
    for kern, v in zip(reg.kernels, reg.targets):
        L = convolution_matrix(kern)
        A += L.T @ L
        rhs += L.T @ v.ravel()
    try:
        x = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("non-finite solution")
    return x.reshape(op.hr_shape)
