"""Image, sidecar and curve files.

Images: binary PGM (``P5``, 8 or 16 bit big-endian) and grayscale PFM
(``Pf``, 32-bit floats, bottom-to-top rows, byte order from the sign of the
scale line). Sidecars are ``key=value`` lines. Curves are CSV.
"""
import math
import os
from dataclasses import dataclass, fields
from typing import Optional, get_args

import numpy as np

from .exceptions import IoFailure, MalformedHeader, TruncatedData, UnsupportedFormat
from .grid import as_image

__all__ = [
    "read_image",
    "write_image",
    "ExperimentMeta",
    "write_meta",
    "read_meta",
    "write_curve",
    "read_curve",
]


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _write_bytes(path, payload):
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


class _HeaderReader:
    """Tokeniser for whitespace-separated NetPBM headers with ``#`` comments."""

    def __init__(self, buf, pos):
        self.buf = buf
        self.pos = pos

    def token(self):
        buf = self.buf
        while self.pos < len(buf):
            c = buf[self.pos : self.pos + 1]
            if c == b"#":
                end = buf.find(b"\n", self.pos)
                self.pos = len(buf) if end < 0 else end + 1
            elif c.isspace():
                self.pos += 1
            else:
                break
        start = self.pos
        while self.pos < len(buf) and not buf[self.pos : self.pos + 1].isspace():
            self.pos += 1
        if start == self.pos:
            raise MalformedHeader(f"unexpected end of header at byte {start}")
        return buf[start : self.pos], start

    def integer(self, what):
        tok, at = self.token()
        try:
            return int(tok)
        except ValueError:
            raise MalformedHeader(f"bad {what} {tok!r} at byte {at}") from None

    def end_of_header(self):
        """Consume the single whitespace byte that separates header and raster."""
        if self.pos >= len(self.buf) or not self.buf[self.pos : self.pos + 1].isspace():
            raise MalformedHeader(f"missing whitespace after header at byte {self.pos}")
        self.pos += 1
        return self.pos


def _parse_pgm(buf):
    hdr = _HeaderReader(buf, 2)
    width = hdr.integer("width")
    height = hdr.integer("height")
    maxval = hdr.integer("maxval")
    if width < 1 or height < 1:
        raise MalformedHeader(f"non-positive dimensions {width}x{height} at byte 2")
    if not 0 < maxval < 65536:
        raise MalformedHeader(f"maxval {maxval} out of range at byte {hdr.pos}")
    start = hdr.end_of_header()
    dtype = np.dtype(">u1") if maxval < 256 else np.dtype(">u2")
    need = width * height * dtype.itemsize
    if len(buf) - start < need:
        raise TruncatedData(
            f"raster needs {need} bytes from byte {start}, file has {len(buf) - start}"
        )
    data = np.frombuffer(buf, dtype=dtype, count=width * height, offset=start)
    return data.reshape(height, width).astype(np.float64) / maxval


def _parse_pfm(buf):
    hdr = _HeaderReader(buf, 2)
    width = hdr.integer("width")
    height = hdr.integer("height")
    tok, at = hdr.token()
    try:
        scale = float(tok)
    except ValueError:
        raise MalformedHeader(f"bad scale {tok!r} at byte {at}") from None
    if width < 1 or height < 1:
        raise MalformedHeader(f"non-positive dimensions {width}x{height} at byte 2")
    if scale == 0 or not math.isfinite(scale):
        raise MalformedHeader(f"scale must be finite and nonzero at byte {at}")
    start = hdr.end_of_header()
    dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
    need = width * height * 4
    if len(buf) - start < need:
        raise TruncatedData(
            f"raster needs {need} bytes from byte {start}, file has {len(buf) - start}"
        )
    data = np.frombuffer(buf, dtype=dtype, count=width * height, offset=start)
    return data.reshape(height, width)[::-1].astype(np.float64)


def read_image(path):
    """Load a grayscale PGM (scaled to [0, 1]) or PFM (values verbatim)."""
    buf = _read_bytes(path)
    magic = buf[:2]
    if magic == b"P5":
        return _parse_pgm(buf)
    if magic == b"Pf":
        return _parse_pfm(buf)
    raise UnsupportedFormat(f"unsupported magic {magic!r} at byte 0 of {path}")


def encode_image(grid, fmt="pfm"):
    grid = as_image(grid)
    h, w = grid.shape
    if fmt in ("pgm8", "pgm16"):
        maxval = 255 if fmt == "pgm8" else 65535
        q = np.floor(np.clip(grid, 0.0, 1.0) * maxval + 0.5)
        dtype = ">u1" if fmt == "pgm8" else ">u2"
        return b"P5\n%d %d\n%d\n" % (w, h, maxval) + q.astype(dtype).tobytes()
    if fmt == "pfm":
        raster = np.ascontiguousarray(grid[::-1], dtype="<f4")
        return b"Pf\n%d %d\n-1.0\n" % (w, h) + raster.tobytes()
    raise UnsupportedFormat(f"unknown output format {fmt!r}")


def write_image(grid, path, fmt="pfm"):
    """Write ``pgm8``/``pgm16`` (clamped to [0, 1], rounded half up) or ``pfm``.

    PFM stores 32-bit floats, so it is exact for float32-representable grids.
    """
    _write_bytes(path, encode_image(grid, fmt))


def format_for_path(path, default="pfm"):
    ext = os.path.splitext(str(path))[1].lower()
    return {".pfm": "pfm", ".pgm": "pgm16"}.get(ext, default)


@dataclass
class ExperimentMeta:
    """Flat record of how an observation was produced and solved."""

    hr_rows: Optional[int] = None
    hr_cols: Optional[int] = None
    band: Optional[int] = None
    psf_sigma: Optional[float] = None
    decim_r: int = 1
    decim_c: int = 1
    noise_sigma: Optional[float] = None
    seed: Optional[int] = None
    epsilon: float = 1e-8
    grid_lo: float = -3.0
    grid_hi: float = 6.0
    grid_count: int = 200
    mu_star: Optional[float] = None
    tau_star: Optional[float] = None
    strategy: Optional[str] = None

    def serialise(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                text = "none"
            elif isinstance(v, float):
                text = repr(v)
            else:
                text = str(v)
            lines.append(f"{f.name}={text}\n")
        return "".join(lines)

    @classmethod
    def parse(cls, text, exclude=()):
        """Parse ``key=value`` lines; keys in ``exclude`` are skipped unread."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise MalformedHeader(f"bad sidecar line {lineno}: {line!r}")
            if key in exclude:
                continue
            kwargs[key] = _convert(value.strip(), types[key], key)
        return cls(**kwargs)


def _convert(value, typ, key):
    if value == "none":
        return None
    base = next(t for t in (get_args(typ) or (typ,)) if t is not type(None))
    try:
        return base(value)
    except ValueError:
        raise MalformedHeader(f"bad value {value!r} for {key}") from None


def write_meta(meta, path):
    _write_bytes(path, meta.serialise().encode("ascii"))


def read_meta(path, exclude=()):
    return ExperimentMeta.parse(_read_bytes(path).decode("ascii"), exclude=exclude)


def _fmt(v):
    return format(float(v), ".17g")


def write_curve(rows, path, metrics=False):
    """Write ``mu,tau,W`` rows (plus ``psnr,isnr,ssim`` when ``metrics``) as CSV.

    ``rows`` holds tuples ``(mu, W, tau)`` or ``(mu, W, tau, psnr, isnr, ssim)``
    in that order, as produced by ``whiteness_curve``.
    """
    header = "mu,tau,W" + (",psnr,isnr,ssim" if metrics else "")
    out = [header]
    for row in rows:
        mu, W, tau = row[:3]
        cells = [mu, tau, W]
        if metrics:
            cells.extend(row[3:6])
        out.append(",".join(_fmt(c) for c in cells))
    _write_bytes(path, ("\n".join(out) + "\n").encode("ascii"))


def read_curve(path):
    """Parse a curve CSV into a dict of column name -> float array."""
    lines = _read_bytes(path).decode("ascii").splitlines()
    if not lines:
        raise MalformedHeader(f"empty curve file {path}")
    names = lines[0].split(",")
    cols = [[] for _ in names]
    for line in lines[1:]:
        for col, cell in zip(cols, line.split(",")):
            col.append(float(cell))
    return {name: np.array(col) for name, col in zip(names, cols)}
