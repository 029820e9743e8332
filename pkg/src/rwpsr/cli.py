"""Command line entry point: ``rwpsr {degrade,solve,sweep,metrics}``.

Exit status is 0 on success, 2 for bad input or data, 3 when an internal
numerical invariant breaks. Results go to stdout, diagnostics to stderr.
"""
import argparse
import math
import sys
import warnings

from . import exceptions as exc
from .degrade import PRESETS, GaussianPsfSpec, NoiseSpec, degrade, gaussian_kernel
from .imgio import (
    ExperimentMeta,
    format_for_path,
    read_image,
    read_meta,
    write_curve,
    write_image,
    write_meta,
)
from .linops import DecimationFactors, DegradationOperator, build_difference_regularizer
from .metrics import bicubic_upsample, isnr, psnr, ssim
from .solver import prepare_context, solve
from .tuning import MuGrid, select_dp, select_rwp, tau_of_mu
from .whiteness import build_whiteness_table, fast_whiteness, whiteness_curve

SIGMA_KEYS = ("noise_sigma",)
# --isnr-convention value -> metrics.isnr convention
ISNR_CONVENTIONS = {"paper": "ratio", "ratio": "ratio", "squared": "squared"}


class UsageError(Exception):
    pass


def _grid_arg(text):
    try:
        return MuGrid.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser():
    p = argparse.ArgumentParser(prog="rwpsr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("degrade", help="blur, decimate and add noise to an HR image")
    d.add_argument("--input", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--meta", help="sidecar path (default: OUT.meta)")
    d.add_argument("--preset", choices=sorted(PRESETS))
    d.add_argument("--band", type=int)
    d.add_argument("--psf-sigma", type=float)
    d.add_argument("--decim", type=int)
    d.add_argument("--noise-sigma", type=float)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--format", choices=["pgm8", "pgm16", "pfm"])

    s = sub.add_parser("solve", help="super-resolve an LR image")
    s.add_argument("--input", required=True)
    s.add_argument("--meta", required=True)
    s.add_argument("--out", required=True)
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--mu", type=float)
    mode.add_argument("--rwp", action="store_true")
    mode.add_argument("--dp", type=float, metavar="SIGMA")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--grid", type=_grid_arg)
    s.add_argument("--format", choices=["pgm8", "pgm16", "pfm"])

    w = sub.add_parser("sweep", help="tabulate tau, W and quality over a mu grid")
    w.add_argument("--input", required=True)
    w.add_argument("--meta", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--truth")
    w.add_argument("--grid", type=_grid_arg)
    w.add_argument("--epsilon", type=float)
    w.add_argument("--isnr-convention", choices=sorted(ISNR_CONVENTIONS), default="paper")

    m = sub.add_parser("metrics", help="PSNR/ISNR/SSIM of an estimate and of the bicubic baseline")
    m.add_argument("--truth", required=True)
    m.add_argument("--est", required=True)
    m.add_argument("--lr", required=True)
    m.add_argument("--decim", type=int, required=True)
    m.add_argument("--isnr-convention", choices=sorted(ISNR_CONVENTIONS), default="paper")
    return p


def _setup(lr, meta, epsilon=None):
    if meta.band is None or meta.psf_sigma is None:
        raise UsageError("sidecar lacks band/psf_sigma")
    factors = DecimationFactors(meta.decim_r, meta.decim_c)
    hr_shape = factors.hr_shape(lr.shape)
    if meta.hr_rows is not None and (meta.hr_rows, meta.hr_cols) != hr_shape:
        raise UsageError(f"sidecar HR shape {(meta.hr_rows, meta.hr_cols)} != {hr_shape} implied by input")
    kernel = gaussian_kernel(GaussianPsfSpec(meta.band, meta.psf_sigma))
    op = DegradationOperator.from_kernel(kernel, hr_shape, factors)
    eps = meta.epsilon if epsilon is None else epsilon
    return prepare_context(lr, op, build_difference_regularizer(hr_shape, eps))


def _grid(args, meta):
    if args.grid is not None:
        return args.grid
    return MuGrid(10.0**meta.grid_lo, 10.0**meta.grid_hi, meta.grid_count)


def cmd_degrade(args):
    x = read_image(args.input)
    if args.preset:
        pre = PRESETS[args.preset]
        band, psf_sigma, decim, sigma = pre.psf.band, pre.psf.sigma_psf, pre.factors.d_r, pre.noise_sigma
    else:
        band, psf_sigma, decim, sigma = 1, 1.0, 1, 0.0
    band = band if args.band is None else args.band
    psf_sigma = psf_sigma if args.psf_sigma is None else args.psf_sigma
    decim = decim if args.decim is None else args.decim
    sigma = sigma if args.noise_sigma is None else args.noise_sigma
    factors = DecimationFactors(decim, decim)
    b, _ = degrade(x, GaussianPsfSpec(band, psf_sigma), factors, NoiseSpec(sigma, args.seed))
    write_image(b, args.out, args.format or format_for_path(args.out))
    meta = ExperimentMeta(
        hr_rows=x.shape[0], hr_cols=x.shape[1], band=band, psf_sigma=float(psf_sigma),
        decim_r=decim, decim_c=decim, noise_sigma=float(sigma), seed=args.seed,
    )
    write_meta(meta, args.meta or args.out + ".meta")
    print(f"lr_shape={b.shape[0]}x{b.shape[1]}")
    return 0


def cmd_solve(args):
    b = read_image(args.input)
    if args.rwp:
        # the noise level never reaches the selection
        meta = read_meta(args.meta, exclude=SIGMA_KEYS)
    else:
        meta = read_meta(args.meta)
    ctx = _setup(b, meta, args.epsilon)
    tbl = build_whiteness_table(ctx)
    grid = _grid(args, meta)
    if args.rwp:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", exc.BoundaryMinimumWarning)
            rep = select_rwp(ctx, tbl, grid)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        mu, strategy = rep.mu_star, "RWP"
        sigma = read_meta(args.meta).noise_sigma  # diagnostics only, after selection
    elif args.dp is not None:
        rep = select_dp(ctx, args.dp, args.tau, grid, tbl)
        mu, strategy, sigma = rep.mu_star, "DP", args.dp
    else:
        mu, strategy, sigma = args.mu, "FIXED", meta.noise_sigma
        if not mu > 0:
            raise exc.NonPositiveMu(f"--mu must be positive, got {mu}")
    x = solve(mu, ctx)
    write_image(x, args.out, args.format or format_for_path(args.out))
    tau = tau_of_mu(mu, ctx, sigma) if sigma else float("nan")
    W = fast_whiteness(mu, tbl)
    out_meta = read_meta(args.meta)
    out_meta.mu_star, out_meta.tau_star, out_meta.strategy = mu, (None if math.isnan(tau) else tau), strategy
    out_meta.epsilon = ctx.reg.epsilon
    write_meta(out_meta, args.out + ".meta")
    print(f"mu_star={mu!r} tau_star={tau!r} W={W!r}")
    return 0


def cmd_sweep(args):
    b = read_image(args.input)
    meta = read_meta(args.meta)
    ctx = _setup(b, meta, args.epsilon)
    tbl = build_whiteness_table(ctx)
    mus = _grid(args, meta).values
    curve = whiteness_curve(mus, tbl, meta.noise_sigma or None)
    if args.truth is None:
        write_curve(curve, args.out)
        return 0
    x_true = read_image(args.truth)
    b_bar = bicubic_upsample(b, ctx.op.factors)
    convention = ISNR_CONVENTIONS[args.isnr_convention]
    rows = []
    for pt in curve:
        x = solve(pt.mu, ctx)
        rows.append((*pt, psnr(x_true, x), isnr(x_true, x, b_bar, convention), ssim(x_true, x)))
    write_curve(rows, args.out, metrics=True)
    return 0


def cmd_metrics(args):
    x_true = read_image(args.truth)
    x_est = read_image(args.est)
    b = read_image(args.lr)
    factors = DecimationFactors(args.decim, args.decim)
    if factors.hr_shape(b.shape) != x_true.shape:
        raise exc.ShapeMismatch(f"LR {b.shape} x {args.decim} does not match truth {x_true.shape}")
    b_bar = bicubic_upsample(b, factors)
    print(
        f"estimate psnr={psnr(x_true, x_est):.4f} "
        f"isnr={isnr(x_true, x_est, b_bar, ISNR_CONVENTIONS[args.isnr_convention]):.4f} ssim={ssim(x_true, x_est):.4f}"
    )
    print(f"bicubic psnr={psnr(x_true, b_bar):.4f} ssim={ssim(x_true, b_bar):.4f}")
    return 0


COMMANDS = {"degrade": cmd_degrade, "solve": cmd_solve, "sweep": cmd_sweep, "metrics": cmd_metrics}


def _attach_grid_values(argv):
    """Rewrite ``--grid -3:6:200`` as ``--grid=-3:6:200``.

    argparse takes a token starting with ``-`` for an option unless it is a
    plain negative number, and grid bounds are usually negative exponents.
    """
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_grid_values(argv))
    try:
        return COMMANDS[args.command](args)
    except exc.SymmetryViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3
    except (exc.RWPError, UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
