"""Square functions and smoothness-space norms built on the frequency blocks.

Everything here reduces to three ingredients: dyadic or continuous frequency
blocks of the input, weighted time integrals against ``dt/t`` or
``dt/(t (t+1))``, and inner/outer summation norms.  All computations live on a
finite window (the input support plus a decay margin); the margin is the
caller-visible ``pad`` parameter and is the desk-scale surrogate for the full
lattice.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np

from .exceptions import ValidationError
from .lpaley import Partition, block_halfwidth
from .maximal import _damped_sup
from .quadrature import TimeQuadrature
from .seq import Sequence, lp_norm, zero
from .spectral import GridApplier

__all__ = [
    "TimeQuadrature",
    "area_square",
    "psi_square",
    "hardy_norm",
    "besov_norm",
    "tl_norm",
    "continuous_norm",
    "gfun",
    "lusin",
    "block_stack",
]

DEFAULT_JMIN = -25


def _cone_halfwidth(t: float, aperture: float = 1.0) -> int:
    # strict inequality |m - n| < a t on integers
    edge = aperture * t
    hw = int(math.ceil(edge)) - 1
    return max(hw, 0) if edge > 0 else -1


def _box_sums(values: np.ndarray, hw: int) -> np.ndarray:
    """Sliding sums ``sum_{|m-n| <= hw} values[m]`` with zero extension."""
    if hw < 0:
        return np.zeros_like(values)
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    n = len(values)
    idx = np.arange(n)
    lo = np.clip(idx - hw, 0, n)
    hi = np.clip(idx + hw + 1, 0, n)
    return prefix[hi] - prefix[lo]


def _inner_power_sum(stack: np.ndarray, weights: np.ndarray, q: float) -> np.ndarray:
    """``(sum_i w_i |stack[i]|^q)^(1/q)`` along axis 0; ``q = inf`` ignores weights."""
    mags = np.abs(stack)
    if math.isinf(q):
        return mags.max(axis=0)
    acc = np.tensordot(weights, mags**q, axes=(0, 0))
    return acc ** (1.0 / q)


# ---------------------------------------------------------------------------
# square functions
# ---------------------------------------------------------------------------


def _cone_square(
    f: Sequence,
    symbol_samples: Callable[[np.ndarray, float], np.ndarray],
    quad: TimeQuadrature,
    pad: int,
) -> Sequence:
    """Generic cone square function with measure ``dt / (t (t+1))``."""
    if f.is_zero:
        return zero()
    a, b = f.support
    applier = GridApplier(f, (b - a) // 2 + pad)
    lam = applier.lambdas
    acc = None
    for t, w in zip(quad.nodes, quad.poisson_weights):
        samples = symbol_samples(lam, float(t))
        peak = float(np.max(np.abs(samples)))
        if peak < 1e-280:
            continue
        g = applier.apply_samples(samples.astype(np.complex128))
        lo, hi = -applier.out_halfwidth + applier.center, applier.out_halfwidth + applier.center
        vals = np.abs(g.values_on(lo, hi)) ** 2
        contrib = w * _box_sums(vals, _cone_halfwidth(float(t)))
        acc = contrib if acc is None else acc + contrib
    if acc is None:
        return zero()
    lo = -applier.out_halfwidth + applier.center
    return Sequence(lo, np.sqrt(acc))


def area_square(
    f: Sequence,
    n_power: int = 1,
    quad: TimeQuadrature | None = None,
    pad: int = 1024,
) -> Sequence:
    """Cone square function of the heat extension,
    ``[sum over |m-n| < t of |(t^2 L)^N exp(-t^2 L) f(m)|^2, dt/(t(t+1))]^(1/2)``.
    """
    if n_power < 1:
        raise ValidationError("the heat power must be at least 1")
    quad = quad or TimeQuadrature.default()

    def samples(lam, t):
        x = (t * lam) ** 2
        return x**n_power * np.exp(-x)

    return _cone_square(f, samples, quad, pad)


def psi_square(
    part: Partition,
    f: Sequence,
    quad: TimeQuadrature | None = None,
    pad: int = 1024,
) -> Sequence:
    """Cone square function of the bump blocks ``psi(t sqrt L) f``."""
    quad = quad or TimeQuadrature.default()
    return _cone_square(f, lambda lam, t: part.psi(t * lam), quad, pad)


def hardy_norm(
    f: Sequence,
    p: float,
    variant: str = "area-2",
    part: Partition | None = None,
    quad: TimeQuadrature | None = None,
    pad: int = 1024,
) -> float:
    """``l^p`` norm of a square function, the atom-scale Hardy functional.

    ``variant`` is either ``"area-N"`` (heat square function with power N) or
    ``"psi"`` (requires ``part``).
    """
    if not (0 < p <= 1):
        raise ValidationError("hardy_norm requires 0 < p <= 1")
    if variant.startswith("area"):
        n_power = int(variant.split("-")[1]) if "-" in variant else 1
        s = area_square(f, n_power, quad, pad)
    elif variant == "psi":
        if part is None:
            raise ValidationError("variant 'psi' requires a partition")
        s = psi_square(part, f, quad, pad)
    else:
        raise ValidationError(f"unknown hardy variant {variant!r}")
    return lp_norm(s, p)


# ---------------------------------------------------------------------------
# dyadic-scale norms
# ---------------------------------------------------------------------------


def block_stack(
    part: Partition,
    f: Sequence,
    j_min: int,
    pad: int | None = None,
):
    """All blocks ``j = j_min..0`` on one common window.

    Returns ``(window_lo, array of shape (|j_min|+1, width))`` with row ``i``
    holding the block at ``j = j_min + i``.
    """
    if f.is_zero:
        return 0, np.zeros((abs(j_min) + 1, 0), dtype=np.complex128)
    a, b = f.support
    if pad is None:
        pad = block_halfwidth(j_min)
    applier = GridApplier(f, (b - a) // 2 + pad)
    lo = -applier.out_halfwidth + applier.center
    hi = applier.out_halfwidth + applier.center
    rows = []
    for j in range(j_min, 1):
        samples = part.psi(np.ldexp(applier.lambdas, -j))
        if not samples.any():
            rows.append(np.zeros(hi - lo + 1, dtype=np.complex128))
            continue
        g = applier.apply_samples(samples.astype(np.complex128))
        rows.append(g.values_on(lo, hi))
    return lo, np.asarray(rows)


def _outer_q(terms: np.ndarray, q: float) -> float:
    terms = np.asarray(terms, dtype=float)
    if math.isinf(q):
        return float(terms.max()) if terms.size else 0.0
    return float(np.sum(terms**q) ** (1.0 / q))


def besov_norm(
    part: Partition,
    f: Sequence,
    alpha: float,
    p: float,
    q: float,
    j_min: int = DEFAULT_JMIN,
    pad: int | None = None,
    tail_warn: float = 1e-3,
) -> float:
    """Scale-weighted block norm ``( sum_j (2^{j alpha} |block_j f|_p)^q )^(1/q)``.

    Truncation at ``j_min``; a warning is emitted when the deepest scale still
    carries more than ``tail_warn`` of the total (low-frequency-dominated
    input, e.g. nonzero mean).
    """
    if j_min > 0:
        raise ValidationError("j_min must be nonpositive")
    if f.is_zero:
        return 0.0
    lo, rows = block_stack(part, f, j_min, pad)
    terms = np.array(
        [
            2.0 ** ((j_min + i) * alpha) * lp_norm(Sequence(lo, row), p)
            for i, row in enumerate(rows)
        ]
    )
    total = _outer_q(terms, q)
    if total > 0 and terms[0] > tail_warn * total:
        warnings.warn(
            f"deepest scale j={j_min} carries {terms[0] / total:.2e} of the norm; "
            "input has low-frequency content below the cut-off",
            stacklevel=2,
        )
    return total


def tl_norm(
    part: Partition,
    f: Sequence,
    alpha: float,
    p: float,
    q: float,
    j_min: int = DEFAULT_JMIN,
    pad: int | None = None,
    tail_warn: float = 1e-3,
) -> float:
    """Pointwise-mixed block norm ``| ( sum_j (2^{j alpha} |block_j f|)^q )^(1/q) |_p``."""
    if j_min > 0:
        raise ValidationError("j_min must be nonpositive")
    if f.is_zero:
        return 0.0
    lo, rows = block_stack(part, f, j_min, pad)
    js = np.arange(j_min, 1, dtype=float)
    weighted = (2.0 ** (js * alpha))[:, None] * np.abs(rows)
    if math.isinf(q):
        inner = weighted.max(axis=0)
    else:
        inner = np.sum(weighted**q, axis=0) ** (1.0 / q)
    total = lp_norm(Sequence(lo, inner), p)
    if total > 0:
        deep = lp_norm(Sequence(lo, weighted[0]), p)
        if deep > tail_warn * total:
            warnings.warn(
                f"deepest scale j={j_min} carries {deep / total:.2e} of the norm; "
                "input has low-frequency content below the cut-off",
                stacklevel=2,
            )
    return total


def continuous_norm(
    part: Partition,
    f: Sequence,
    alpha: float,
    p: float,
    q: float,
    quad: TimeQuadrature | None = None,
    flavor: str = "besov",
    peetre_lambda: float | None = None,
    pad: int | None = None,
) -> float:
    """Continuous-scale counterpart of :func:`besov_norm` / :func:`tl_norm`.

    ``flavor='besov'`` integrates ``[t^-alpha |psi(t sqrt L) f|_p]^q dt/t``;
    ``flavor='tl'`` puts the scale integral inside the spatial norm.  With
    ``peetre_lambda`` the block is replaced by its damped supremum, which
    dominates the plain version pointwise.
    """
    if flavor not in ("besov", "tl"):
        raise ValidationError("flavor must be 'besov' or 'tl'")
    if f.is_zero:
        return 0.0
    quad = quad or TimeQuadrature.default()
    a, b = f.support
    if pad is None:
        pad = block_halfwidth(DEFAULT_JMIN)
    applier = GridApplier(f, (b - a) // 2 + pad)
    lo = -applier.out_halfwidth + applier.center
    hi = applier.out_halfwidth + applier.center
    lam = applier.lambdas
    per_t_norms = []
    rows = []
    for t in quad.nodes:
        samples = part.psi(float(t) * lam)
        if not samples.any():
            g_vals = np.zeros(hi - lo + 1)
        else:
            g = applier.apply_samples(samples.astype(np.complex128))
            if peetre_lambda is not None:
                g = _damped_sup(g.values, g.offset, lo, hi, float(t), peetre_lambda)
            g_vals = np.abs(g.values_on(lo, hi))
        if flavor == "besov":
            per_t_norms.append(lp_norm(Sequence(lo, g_vals), p))
        else:
            rows.append(g_vals)
    tpow = quad.nodes ** (-alpha)
    if flavor == "besov":
        vals = tpow * np.asarray(per_t_norms)
        if math.isinf(q):
            return float(vals.max())
        return float(np.dot(quad.weights, vals**q) ** (1.0 / q))
    stack = tpow[:, None] * np.asarray(rows)
    inner = _inner_power_sum(stack, quad.weights, q)
    return lp_norm(Sequence(lo, inner), p)


# ---------------------------------------------------------------------------
# grand and cone functionals of a general time-indexed field
# ---------------------------------------------------------------------------


def _field_rows(field: Callable[[float], Sequence], quad: TimeQuadrature):
    rows = []
    supports = []
    for t in quad.nodes:
        g = field(float(t))
        rows.append(g)
        if not g.is_zero:
            supports.append(g.support)
    if not supports:
        return None, None
    lo = min(s[0] for s in supports)
    hi = max(s[1] for s in supports)
    return (lo, hi), rows


def gfun(
    field: Callable[[float], Sequence],
    alpha: float,
    lam_exp: float,
    q: float,
    quad: TimeQuadrature | None = None,
    out_window: tuple[int, int] | None = None,
) -> Sequence:
    """Damped grand square functional of a time-indexed field.

    ``field`` maps a scale ``t`` to a sequence (e.g. ``t -> psi(t sqrt L) f``);
    the result is ``[int sum_m (t^-alpha |F(m,t)|)^q (1 + |m-n|/t)^(-lam q)
    dt/(t(t+1))]^(1/q)``.
    """
    if math.isinf(q):
        raise ValidationError("the grand functional requires finite q")
    quad = quad or TimeQuadrature.default()
    win, rows = _field_rows(field, quad)
    if rows is None:
        return zero()
    olo, ohi = out_window if out_window is not None else win
    acc = np.zeros(ohi - olo + 1)
    for g, t, w in zip(rows, quad.nodes, quad.poisson_weights):
        if g.is_zero:
            continue
        glo, ghi = g.support
        u = (np.abs(g.values) * float(t) ** (-alpha)) ** q
        d_lo = olo - ghi
        d_hi = ohi - glo
        d = np.arange(d_lo, d_hi + 1, dtype=float)
        kernel = (1.0 + np.abs(d) / float(t)) ** (-lam_exp * q)
        conv = np.convolve(u, kernel)
        # conv index k holds sum_m u(m) kernel(n - m) at n = glo + d_lo + k
        start = olo - glo - d_lo
        acc += w * conv[start : start + (ohi - olo + 1)]
    return Sequence(olo, acc ** (1.0 / q))


def lusin(
    field: Callable[[float], Sequence],
    alpha: float,
    aperture: float,
    q: float,
    quad: TimeQuadrature | None = None,
    out_window: tuple[int, int] | None = None,
) -> Sequence:
    """Cone functional ``[int sum_{|m-n| < a t} (t^-alpha |F(m,t)|)^q dt/(t(t+1))]^(1/q)``."""
    if math.isinf(q):
        raise ValidationError("the cone functional requires finite q")
    if aperture <= 0:
        raise ValidationError("aperture must be positive")
    quad = quad or TimeQuadrature.default()
    win, rows = _field_rows(field, quad)
    if rows is None:
        return zero()
    olo, ohi = out_window if out_window is not None else win
    acc = np.zeros(ohi - olo + 1)
    for g, t, w in zip(rows, quad.nodes, quad.poisson_weights):
        if g.is_zero:
            continue
        u = (np.abs(g.values_on(olo, ohi)) * float(t) ** (-alpha)) ** q
        # values outside [olo, ohi] that still fall in some cone
        hw = _cone_halfwidth(float(t), aperture)
        full = (np.abs(g.values_on(olo - hw, ohi + hw)) * float(t) ** (-alpha)) ** q if hw > 0 else u
        if hw > 0:
            sums = _box_sums(full, hw)[hw : hw + (ohi - olo + 1)]
        else:
            sums = _box_sums(u, hw)
        acc += w * sums
    return Sequence(olo, acc ** (1.0 / q))


def psi_field(
    part: Partition, f: Sequence, pad: int | None = None
) -> Callable[[float], Sequence]:
    """The canonical field ``t -> psi(t sqrt L) f`` on a fixed shared window."""
    if f.is_zero:
        return lambda t: zero()
    a, b = f.support
    if pad is None:
        pad = block_halfwidth(DEFAULT_JMIN)
    applier = GridApplier(f, (b - a) // 2 + pad)
    lam = applier.lambdas

    def field(t: float) -> Sequence:
        samples = part.psi(t * lam)
        if not samples.any():
            return zero()
        return applier.apply_samples(samples.astype(np.complex128))

    return field
