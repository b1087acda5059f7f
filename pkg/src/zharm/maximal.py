"""Hardy-Littlewood and damped-supremum maximal functions.

The suprema are taken over a finite search region; correctness of downstream
comparisons requires the region to contain the support of the relevant data
plus a decay margin (about ``8 * 2^-j`` for a scale-``j`` quantity).
"""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError
from .lpaley import Partition, lp_block
from .seq import Sequence, zero
from .spectral import GridApplier

__all__ = ["hl_maximal", "peetre_max", "peetre_max_continuous", "default_peetre_lambda"]


def default_peetre_lambda(p: float, q: float = float("inf")) -> float:
    """Damping exponent comfortably above the ``1/min(p, q)``-type thresholds."""
    return 2.0 / min(p, q, 2.0) + 1.0


def hl_maximal(
    f: Sequence, r: float, search_halfwidth: int, eval_pad: int | None = None
) -> Sequence:
    """Maximal interval ``r``-mean ``sup_{I contains n} (|I|^-1 sum_I |f|^r)^(1/r)``.

    The supremum runs over all integer intervals containing ``n`` inside a
    window of half-width ``search_halfwidth`` around ``n``; values are exact
    for that truncated family.  The output window is the support of ``f``
    padded by ``eval_pad`` (default: the search half-width).
    """
    if r <= 0:
        raise ValidationError("hl_maximal requires r > 0")
    if search_halfwidth < 0:
        raise ValidationError("search half-width must be nonnegative")
    if f.is_zero:
        return zero()
    w = int(search_halfwidth)
    pad = w if eval_pad is None else int(eval_pad)
    a, b = f.support
    lo, hi = a - pad, b + pad
    # dense |f|^r on the widest interval any admissible I can reach
    glo, ghi = lo - w, hi + w
    dens = np.abs(f.values_on(glo, ghi)) ** r
    prefix = np.concatenate([[0.0], np.cumsum(dens)])  # prefix[i] = sum dens[:i]
    out = np.empty(hi - lo + 1)
    lengths = np.arange(1, 2 * w + 2, dtype=float)
    for n in range(lo, hi + 1):
        base = n - glo
        starts = np.arange(base - w, base + 1)
        ends = np.arange(base, base + w + 1)
        sums = prefix[ends + 1][None, :] - prefix[starts][:, None]  # (a, b) grid
        ln = ends[None, :] - starts[:, None] + 1
        out[n - lo] = np.max(sums / ln)
    return Sequence(lo, out ** (1.0 / r))


def _damped_sup(values: np.ndarray, val_offset: int, out_lo: int, out_hi: int, scale: float, lam: float) -> Sequence:
    """``sup_m |g(m)| / (1 + |m - n| / scale)^lam`` over the stored window of g."""
    mags = np.abs(values)
    if mags.size == 0:
        return zero()
    m = np.arange(val_offset, val_offset + len(mags))
    out = np.empty(out_hi - out_lo + 1)
    chunk = 256
    ns = np.arange(out_lo, out_hi + 1)
    for i in range(0, len(ns), chunk):
        blk = ns[i : i + chunk]
        damp = (1.0 + np.abs(blk[:, None] - m[None, :]) / scale) ** (-lam)
        out[i : i + chunk] = np.max(mags[None, :] * damp, axis=1)
    return Sequence(out_lo, out)


def peetre_max(
    part: Partition,
    j: int,
    lam_exp: float,
    f: Sequence,
    out_halfwidth: int | None = None,
    applier: GridApplier | None = None,
) -> Sequence:
    """Damped supremum of the scale-``j`` frequency block.

    Dominates the plain block pointwise (the supremum includes ``m = n``).
    """
    if lam_exp <= 0:
        raise ValidationError("damping exponent must be positive")
    g = lp_block(part, j, f, out_halfwidth=out_halfwidth, applier=applier)
    if g.is_zero:
        return zero()
    lo, hi = g.support
    return _damped_sup(g.values, g.offset, lo, hi, 2.0 ** (-j), lam_exp)


def peetre_max_continuous(
    part: Partition,
    s: float,
    lam_exp: float,
    f: Sequence,
    out_halfwidth: int | None = None,
    applier: GridApplier | None = None,
) -> Sequence:
    """Continuous-scale variant of :func:`peetre_max` at scale ``s > 0``."""
    if s <= 0:
        raise ValidationError("scale must be positive")
    if lam_exp <= 0:
        raise ValidationError("damping exponent must be positive")
    if f.is_zero:
        return zero()
    if applier is None:
        if out_halfwidth is None:
            a, b = f.support
            out_halfwidth = (b - a) // 2 + int(min(2048, 8.0 * s)) + 64
        applier = GridApplier(f, out_halfwidth)
    g = applier.apply_samples(part.psi(s * applier.lambdas))
    if g.is_zero:
        return zero()
    lo, hi = g.support
    return _damped_sup(g.values, g.offset, lo, hi, s, lam_exp)
