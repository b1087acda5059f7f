"""Spectral multipliers, the smoothness-condition estimator, and Riesz transforms.

The multiplier machinery has three layers: plain application of a bounded
symbol (a thin alias over the functional calculus), the scale-uniform
fractional-Sobolev condition ``sup_t |eta * F(t .)|_{W^s_r}`` that governs
boundedness on the smoothness spaces, and weighted kernel-decay checks for
band-supported symbols.

The Riesz transform ``D L^{-1/2}`` is computed by two deliberately independent
routes: a closed-form frequency-side multiplier of unit modulus, and the
subordination integral ``c int sqrt(t) exp(-t L) dt/t`` evaluated with
physical-space Bessel-kernel convolutions (plus an analytic series for the
small-time segment below the quadrature window).  Each route serves as the
other's oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence as SequenceType

import numpy as np

from .exceptions import ConsistencyError, ValidationError
from .heat import heat_kernel_sequence, _kernel_halfwidth
from .quadrature import log_gauss_nodes
from .seq import Sequence, diff_backward, diff_forward, laplacian, lp_norm, zero
from .spectral import (
    GridApplier,
    Symbol,
    apply_symbol,
    next_pow2,
    synthesize_kernel,
)

__all__ = [
    "apply_multiplier",
    "MultiplierCondition",
    "sobolev_condition",
    "fractional_w_norm",
    "WeightedKernelReport",
    "weighted_kernel_check",
    "riesz",
    "riesz_symbol_samples",
    "ProbeResult",
    "operator_norm_probe",
    "default_t_grid",
]


def apply_multiplier(
    sym: Symbol, f: Sequence, out_halfwidth: int = 2048, **kwargs
) -> Sequence:
    """Apply the bounded multiplier ``sym`` to ``f``.

    Identical to the functional-calculus application; the sample at the bottom
    of the spectrum is whatever ``sym`` declares there (set ``value_at_zero``
    for symbols that are singular at the origin).
    """
    return apply_symbol(sym, f, out_halfwidth=out_halfwidth, **kwargs)


# ---------------------------------------------------------------------------
# fractional Sobolev machinery
# ---------------------------------------------------------------------------


def fractional_w_norm(
    samples: np.ndarray,
    spacing: float,
    s: float,
    r: float,
    pad_factor: int = 8,
) -> float:
    """``|g|_{L^r} + | |d|^s g |_{L^r}`` of a compactly supported tabulated function.

    The fractional derivative is Fourier multiplication by ``|xi|^s`` on the
    zero-padded periodized window (pad factor 8 by default), which is accurate
    for functions vanishing at the window ends.
    """
    if s < 0:
        raise ValidationError("fractional order must be nonnegative")
    samples = np.asarray(samples, dtype=np.complex128)
    n = len(samples)
    size = next_pow2(max(pad_factor * n, 64))
    buf = np.zeros(size, dtype=np.complex128)
    buf[:n] = samples
    xi = 2.0 * math.pi * np.fft.fftfreq(size, d=spacing)
    frac = np.fft.ifft(np.fft.fft(buf) * np.abs(xi) ** s)

    def _lr(vals: np.ndarray) -> float:
        mags = np.abs(vals)
        if math.isinf(r):
            return float(mags.max())
        return float((spacing * np.sum(mags**r)) ** (1.0 / r))

    return _lr(buf) + _lr(frac)


def default_t_grid() -> np.ndarray:
    """Half-octave-spaced scales from 1/2 up to 128."""
    return 0.5 * 2.0 ** (np.arange(17) / 2.0)


@dataclass
class MultiplierCondition:
    """Per-scale fractional-Sobolev sizes of a dilated, localized symbol."""

    label: str
    s: float
    r: float
    t_grid: np.ndarray
    values: np.ndarray
    sup: float

    def summary(self) -> dict:
        return {
            "symbol": self.label,
            "s": self.s,
            "r": None if math.isinf(self.r) else self.r,
            "sup": self.sup,
            "argmax_t": float(self.t_grid[int(np.argmax(self.values))]),
        }


def sobolev_condition(
    sym: Symbol,
    s: float,
    r: float,
    t_grid: np.ndarray | None = None,
    eta: Callable[[np.ndarray], np.ndarray] | None = None,
    num_samples: int = 2048,
) -> MultiplierCondition:
    """Evaluate ``|eta * F(t .)|_{W^s_r}`` over a grid of scales and report the sup.

    ``eta`` defaults to the standard partition bump (smooth, supported in
    [2, 8], not identically zero).  ``r`` must exceed 4 (below that no claim
    is made); ``r = inf`` is allowed.
    """
    if s <= 0:
        raise ValidationError("smoothness order s must be positive")
    if not (r > 4):
        raise ValidationError("the integrability exponent must lie in (4, inf]")
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if (t_grid < 0.5 - 1e-12).any():
        raise ValidationError("scales below 1/2 are outside the condition's range")
    if eta is None:
        from .lpaley import make_partition

        eta = make_partition(1.0).psi
    spacing = 6.0 / num_samples
    lam = 2.0 + (np.arange(num_samples) + 0.5) * spacing
    window = np.asarray(eta(lam), dtype=np.complex128)
    values = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        g = window * sym.sample(t * lam)
        values[i] = fractional_w_norm(g, spacing, s, r)
    return MultiplierCondition(
        label=sym.label,
        s=s,
        r=r,
        t_grid=t_grid,
        values=values,
        sup=float(values.max()),
    )


@dataclass
class WeightedKernelReport:
    """Measured-to-bound ratios for a band-supported symbol's kernel decay."""

    band_top: float
    s: float
    q: float
    eps: float
    ratio_square: float
    ratio_pointwise: float
    w_norm: float
    kernel_error: float

    def summary(self) -> dict:
        return {
            "R": self.band_top,
            "s": self.s,
            "ratio_square": self.ratio_square,
            "ratio_pointwise": self.ratio_pointwise,
            "w_norm": self.w_norm,
            "kernel_error": self.kernel_error,
        }


def weighted_kernel_check(
    sym: Symbol,
    band_top: float,
    s: float,
    q: float = float("inf"),
    eps: float = 0.5,
    nmax: int | None = None,
) -> WeightedKernelReport:
    """Weighted kernel-size ratios for a symbol supported in ``[R/2, R]``.

    Measures ``sum_d |k(d)|^2 (1 + R |d|)^{2s}`` against
    ``R |F(R .)|^2_{W^{s+eps}_q}`` and the pointwise analogue
    ``|k(d)| <= R (1 + R |d|)^{-s} |F(R .)|_{W^{s+eps}_q}``; the proposition
    behind the check asserts both ratios stay bounded uniformly in ``R``.
    """
    if not (0 < band_top <= 2):
        raise ValidationError("the band top R must lie in (0, 2]")
    if nmax is None:
        nmax = int(math.ceil(1024.0 / band_top))
    kern, kerr = synthesize_kernel(sym, nmax, return_error=True)
    vals = np.abs(kern.values_on(-nmax, nmax))
    d = np.abs(np.arange(-nmax, nmax + 1, dtype=float))
    weight = (1.0 + band_top * d) ** (2.0 * s)
    lhs_sq = float(np.sum(vals**2 * weight))
    num = 2048
    spacing = 1.5 / num
    x = (np.arange(num) + 0.5) * spacing  # covers [0, 1.5] around supp in [1/2, 1]
    dil = sym.sample(band_top * x)
    w_norm = fractional_w_norm(dil, spacing, s + eps, q)
    ratio_sq = lhs_sq / (band_top * w_norm**2)
    point_bound = band_top * (1.0 + band_top * d) ** (-s) * w_norm
    ratio_pt = float(np.max(vals / point_bound))
    return WeightedKernelReport(
        band_top=band_top,
        s=s,
        q=q,
        eps=eps,
        ratio_square=ratio_sq,
        ratio_pointwise=ratio_pt,
        w_norm=w_norm,
        kernel_error=kerr,
    )


# ---------------------------------------------------------------------------
# Riesz transforms
# ---------------------------------------------------------------------------


def riesz_symbol_samples(thetas: np.ndarray, variant: str) -> np.ndarray:
    """Frequency-side multiplier of ``D L^{-1/2}`` (forward) or ``D* L^{-1/2}``.

    With the transform convention ``F f(theta) = sum f(n) e^{i n theta}`` the
    forward difference multiplies by ``e^{-i theta} - 1`` and the inverse
    square root divides by ``2 |sin(theta/2)|``, giving a unit-modulus symbol
    away from frequency zero; the value at zero is the principal-value
    convention 0.  The sign and conjugation are locked by the cross-route
    test against the subordination integral.
    """
    lam = 2.0 * np.abs(np.sin(thetas / 2.0))
    if variant == "forward":
        num = np.exp(-1j * thetas) - 1.0
    elif variant == "backward":
        num = 1.0 - np.exp(1j * thetas)
    else:
        raise ValidationError("riesz variant must be 'forward' or 'backward'")
    out = np.zeros_like(num)
    nz = lam > 0
    out[nz] = num[nz] / lam[nz]
    return out


def _riesz_symbol_route(f: Sequence, variant: str, out_halfwidth: int) -> Sequence:
    applier = GridApplier(f, out_halfwidth)
    return applier.apply_samples(riesz_symbol_samples(applier.thetas, variant))


def _subordination_series(g: Sequence, t_lo: float, terms: int = 12) -> Sequence:
    # integral_0^{t_lo} sqrt(t) e^{-t L} g dt/t expanded in powers of (t_lo L)
    acc = zero()
    power = g
    for k in range(terms):
        coeff = (-1.0) ** k * t_lo ** (k + 0.5) / (math.factorial(k) * (k + 0.5))
        acc = acc + coeff * power
        power = laplacian(power)
    return acc


def _riesz_subordination_route(
    f: Sequence,
    variant: str,
    t_lo: float,
    t_hi: float,
    points_per_octave: int,
    physical_cap: int = 8192,
) -> Sequence:
    g = diff_forward(f) if variant == "forward" else diff_backward(f)
    c = 1.0 / math.sqrt(math.pi)
    acc = c * _subordination_series(g, t_lo)
    nodes, weights = log_gauss_nodes(t_lo, t_hi, points_per_octave)
    tiny_streak = 0
    scale = lp_norm(g, 2.0)
    far_nodes = []
    far_weights = []
    for t, w in zip(nodes, weights):
        hw = _kernel_halfwidth(float(t))
        if hw > physical_cap:
            # Physical convolution has outgrown the budget.  The remaining
            # nodes are lumped into one smooth multiplier evaluated
            # spectrally; for inputs whose spectrum vanishes at frequency
            # zero (the route's precondition) the tail is tiny anyway.
            if tiny_streak < 4:
                far_nodes.append(float(t))
                far_weights.append(float(w))
            continue
        if tiny_streak >= 4:
            continue  # heat decay has taken over; later nodes are smaller still
        kern = heat_kernel_sequence(float(t), hw)
        smoothed = Sequence(g.offset + kern.offset, np.convolve(g.values, kern.values))
        contrib = (c * w * math.sqrt(t)) * smoothed
        acc = acc + contrib
        size = lp_norm(contrib, 2.0)
        tiny_streak = tiny_streak + 1 if size < 1e-17 * max(scale, lp_norm(acc, 2.0)) else 0
    if far_nodes:
        applier = GridApplier(g, physical_cap)
        mu = 2.0 * (1.0 - np.cos(applier.thetas))
        m_far = np.zeros(applier.grid.size, dtype=np.complex128)
        for t, w in zip(far_nodes, far_weights):
            m_far += (c * w * math.sqrt(t)) * np.exp(-t * mu)
        acc = acc + applier.apply_samples(m_far)
    return acc


def riesz(
    f: Sequence,
    variant: str = "forward",
    route: str = "symbol",
    out_halfwidth: int = 2048,
    t_lo: float = 1e-4,
    t_hi: float = 1e8,
    points_per_octave: int = 16,
    cross_tol: float = 1e-6,
    mean_tol: float = 1e-8,
):
    """The discrete Riesz transform of ``f``.

    ``route`` selects the frequency-side multiplier (``'symbol'``), the
    subordination integral (``'subordination'``), or ``'both'`` which
    cross-checks them and raises :class:`ConsistencyError` on disagreement
    beyond ``cross_tol`` (relative).  The inverse square root is defined
    modulo constants, so inputs whose mean is not numerically zero trigger a
    warning: their transform depends on the low-frequency convention.
    """
    if f.is_zero:
        return f
    mean = abs(complex(np.sum(f.values)))
    if mean > mean_tol * lp_norm(f, 2.0):
        warnings.warn(
            "riesz input has nonzero mean; the inverse square root is only defined "
            "modulo constants and low-frequency content follows the principal-value "
            "convention",
            stacklevel=2,
        )
    if route == "symbol":
        return _riesz_symbol_route(f, variant, out_halfwidth)
    if route == "subordination":
        return _riesz_subordination_route(f, variant, t_lo, t_hi, points_per_octave)
    if route == "both":
        ys = _riesz_symbol_route(f, variant, out_halfwidth)
        yq = _riesz_subordination_route(f, variant, t_lo, t_hi, points_per_octave)
        lo = min(ys.support[0], yq.support[0])
        hi = max(ys.support[1], yq.support[1])
        gap = float(np.linalg.norm(ys.values_on(lo, hi) - yq.values_on(lo, hi)))
        rel = gap / max(lp_norm(ys, 2.0), 1e-300)
        if rel > cross_tol:
            raise ConsistencyError(
                f"riesz routes disagree by {rel:.3e} (tolerance {cross_tol:g})"
            )
        return ys
    raise ValidationError(f"unknown riesz route {route!r}")


# ---------------------------------------------------------------------------
# empirical operator norms
# ---------------------------------------------------------------------------


@dataclass
class ProbeResult:
    value: float
    ratios: list

    def summary(self) -> dict:
        return {"empirical_norm": self.value, "family_size": len(self.ratios)}


def operator_norm_probe(
    op: Callable[[Sequence], Sequence],
    norm_fn: Callable[[Sequence], float],
    family: SequenceType[Sequence],
) -> ProbeResult:
    """Largest ratio ``norm(op f) / norm(f)`` over a declared signal family.

    Deterministic given a deterministic family; members with vanishing norm
    are skipped.
    """
    ratios = []
    for f in family:
        denom = norm_fn(f)
        if denom == 0.0:
            continue
        ratios.append(norm_fn(op(f)) / denom)
    if not ratios:
        raise ValidationError("probe family has no members with nonzero norm")
    return ProbeResult(float(max(ratios)), ratios)
