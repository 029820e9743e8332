"""Scikit-learn style front end for the whole pipeline."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_decimation, check_image, check_positive
from .degrade import GaussianPsfSpec, gaussian_kernel
from .linops import DegradationOperator, build_difference_regularizer
from .solver import prepare_context, residual_lr, solve
from .tuning import MuGrid, select_dp, select_rwp, tau_of_mu
from .whiteness import build_whiteness_table, fast_whiteness

__all__ = ["TikhonovSuperResolver"]


class TikhonovSuperResolver(TransformerMixin, BaseEstimator):
    """Super-resolve a blurred, decimated, noisy image by gradient-Tikhonov.

    ``fit`` takes the low-resolution observation and picks the regularisation
    parameter; ``transform`` returns the high-resolution reconstruction.

    Parameters
    ----------
    decimation : int or (int, int), default=4
        Decimation factors along rows and columns.
    psf : ndarray, optional
        Blur kernel (centre tap at ``shape // 2``). When omitted a normalised
        Gaussian of side ``psf_band`` and std ``psf_sigma`` is used.
    psf_band : int, default=9
    psf_sigma : float, default=2.0
    mu : {"rwp", "dp"} or float, default="rwp"
        Selection rule, or a fixed regularisation parameter.
    noise_sigma : float, optional
        Noise level. Required by ``"dp"``; with ``"rwp"`` it only feeds the
        ``tau_`` diagnostic and has no influence on the selected ``mu_``.
    tau : float, default=1.0
        Discrepancy coefficient for ``"dp"``.
    epsilon : float, default=1e-8
    grid : (float, float, int), default=(1e-3, 1e6, 200)
        ``(mu_min, mu_max, count)`` of the log-spaced search grid.

    Attributes
    ----------
    mu_ : float
    tau_ : float or None
    whiteness_ : float
        Residual whiteness at ``mu_``.
    selection_ : SelectionReport or None
    context_ : SpectralSolveContext
    """

    def __init__(
        self,
        decimation=4,
        psf=None,
        psf_band=9,
        psf_sigma=2.0,
        mu="rwp",
        noise_sigma=None,
        tau=1.0,
        epsilon=1e-8,
        grid=(1e-3, 1e6, 200),
    ):
        self.decimation = decimation
        self.psf = psf
        self.psf_band = psf_band
        self.psf_sigma = psf_sigma
        self.mu = mu
        self.noise_sigma = noise_sigma
        self.tau = tau
        self.epsilon = epsilon
        self.grid = grid

    def _kernel(self):
        if self.psf is not None:
            return check_image(self.psf, "psf")
        return gaussian_kernel(GaussianPsfSpec(self.psf_band, self.psf_sigma))

    def _context(self, X):
        factors = check_decimation(self.decimation)
        hr_shape = factors.hr_shape(X.shape)
        op = DegradationOperator.from_kernel(self._kernel(), hr_shape, factors)
        reg = build_difference_regularizer(hr_shape, check_positive(self.epsilon, "epsilon"))
        return prepare_context(X, op, reg)

    def fit(self, X, y=None):
        X = check_image(X)
        ctx = self._context(X)
        tbl = build_whiteness_table(ctx)
        grid = MuGrid(*self.grid)
        self.selection_ = None
        if isinstance(self.mu, str):
            if self.mu == "rwp":
                self.selection_ = select_rwp(ctx, tbl, grid)
            elif self.mu == "dp":
                if self.noise_sigma is None:
                    raise ValueError("mu='dp' needs noise_sigma")
                self.selection_ = select_dp(ctx, self.noise_sigma, self.tau, grid, tbl)
            else:
                raise ValueError(f"mu must be 'rwp', 'dp' or a number, got {self.mu!r}")
            self.mu_ = self.selection_.mu_star
        else:
            self.mu_ = check_positive(self.mu, "mu")
        self.context_ = ctx
        self.whiteness_ = fast_whiteness(self.mu_, tbl)
        self.tau_ = None if self.noise_sigma is None else tau_of_mu(self.mu_, ctx, self.noise_sigma)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """High-resolution reconstruction of ``X`` at the fitted ``mu_``."""
        check_is_fitted(self, "mu_")
        X = check_image(X)
        ctx = self.context_ if np.array_equal(X, self.context_.b) else self._context(X)
        return solve(self.mu_, ctx)

    def residual(self, X):
        """LR residual ``S K x* - b`` of the reconstruction of ``X``."""
        x = self.transform(X)
        op = DegradationOperator.from_kernel(
            self._kernel(), x.shape, check_decimation(self.decimation)
        )
        return residual_lr(x, X, op)
