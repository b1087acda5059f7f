"""Fourier analysis on the lattice and the functional-calculus engine.

The transform pair used throughout is

    F f(theta)   = sum_n f(n) exp(i n theta),      theta in [-pi, pi),
    F^-1 g(n)    = (1/2 pi) integral g(theta) exp(-i n theta) d theta,

evaluated on uniform grids ``theta_k = -pi + 2 pi k / K`` by FFT.  Under this
pair the second-difference Laplacian acts as multiplication by
``mu(theta) = 2 (1 - cos theta)``, so a scalar function ``F`` on ``[0, 2]``
(the square root of the spectrum) acts as the Fourier multiplier
``F(2 |sin(theta/2)|)``.  Kernel synthesis and symbol application are both
spectrally accurate for smooth symbols; a doubled-grid comparison supplies the
reported error estimate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .exceptions import AccuracyError, GridSizeError, ValidationError
from .seq import Sequence

__all__ = [
    "SpectralGrid",
    "Symbol",
    "dtft",
    "inverse_dtft",
    "synthesize_kernel",
    "apply_symbol",
    "lattice_lambda",
    "lattice_mu",
    "make_symbol",
    "GridApplier",
]


def next_pow2(n: int) -> int:
    k = 1
    while k < n:
        k *= 2
    return k


def lattice_mu(theta: np.ndarray) -> np.ndarray:
    """Multiplier of the second-difference Laplacian, ``2 (1 - cos theta)``."""
    return 2.0 * (1.0 - np.cos(theta))


def lattice_lambda(theta: np.ndarray) -> np.ndarray:
    """Stable square root of :func:`lattice_mu`: ``2 |sin(theta/2)|``."""
    return 2.0 * np.abs(np.sin(np.asarray(theta) / 2.0))


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform frequency grid ``theta_k = -pi + 2 pi k / K`` with ``K`` a power of two."""

    size: int

    def __post_init__(self):
        k = self.size
        if k < 2 or (k & (k - 1)) != 0:
            raise ValidationError(f"grid size must be a power of two >= 2, got {k}")

    @cached_property
    def thetas(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.size) / self.size

    @cached_property
    def lambdas(self) -> np.ndarray:
        return lattice_lambda(self.thetas)

    def check_window(self, halfwidth: int) -> None:
        if 2 * halfwidth + 2 > self.size:
            raise GridSizeError(
                f"grid of size {self.size} cannot hold a half-width of {halfwidth}"
            )


def grid_for(halfwidth: int, minimum: int = 256) -> SpectralGrid:
    """Smallest power-of-two grid whose anti-aliasing invariant admits ``halfwidth``."""
    return SpectralGrid(next_pow2(max(minimum, 2 * halfwidth + 2)))


@dataclass(frozen=True)
class Symbol:
    """A scalar function of the spectral parameter ``lambda in [0, infinity)``.

    ``fn`` must accept a numpy array of nonnegative reals.  ``value_at_zero``
    optionally overrides the sample at ``lambda = 0`` (useful for symbols given
    by formulas that are singular at the origin).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"
    support: tuple[float, float] | None = None
    value_at_zero: complex | None = None

    def sample(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        out = np.asarray(self.fn(lam), dtype=np.complex128)
        if out.shape != lam.shape:
            out = np.broadcast_to(out, lam.shape).astype(np.complex128)
        if self.value_at_zero is not None:
            out = np.where(lam == 0.0, complex(self.value_at_zero), out)
        bad = ~np.isfinite(out)
        if bad.any():
            raise ValidationError(
                f"symbol {self.label!r} is not finite on the spectrum "
                f"(first bad point lambda={lam[bad][0]:.6g})"
            )
        return out

    def __call__(self, lam):
        return self.sample(np.asarray(lam, dtype=float))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def dtft(f: Sequence, grid: SpectralGrid) -> np.ndarray:
    """Samples of the lattice Fourier transform of ``f`` on ``grid``.

    Exact (up to roundoff) for any grid large enough to hold the support of
    ``f`` without wrap-around.
    """
    k = grid.size
    if f.is_zero:
        return np.zeros(k, dtype=np.complex128)
    a, b = f.support
    halfwidth = max(abs(a), abs(b))
    grid.check_window(halfwidth)
    buf = np.zeros(k, dtype=np.complex128)
    n = np.arange(a, b + 1)
    signs = np.where(n % 2 == 0, 1.0, -1.0)  # exp(i n theta_k) = (-1)^n exp(2 pi i n k / K)
    buf[n % k] = f.values * signs
    return k * np.fft.ifft(buf)


def inverse_dtft(samples: np.ndarray, window: tuple[int, int]) -> Sequence:
    """Trapezoid-rule inverse transform restricted to ``window = (nmin, nmax)``.

    Exact for trigonometric polynomials of degree below ``K/2``; for other
    integrands the error is the aliasing (periodization) of the true inverse.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    k = len(samples)
    grid = SpectralGrid(k)
    nmin, nmax = window
    if nmax < nmin:
        return Sequence(0, np.zeros(0))
    grid.check_window(max(abs(nmin), abs(nmax)))
    coeff = np.fft.fft(samples) / k
    n = np.arange(nmin, nmax + 1)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    return Sequence(nmin, signs * coeff[n % k])


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------


class GridApplier:
    """Cached-spectrum applier for many multipliers against one input.

    Recentres the input at the origin so that applying any multiplier commutes
    exactly with translation, computes the input spectrum once, and exposes
    cheap per-multiplier application.  Batch norm computations use this to
    avoid repeated forward transforms.
    """

    def __init__(self, f: Sequence, out_halfwidth: int, min_size: int = 256):
        a, b = f.support
        self.center = (a + b) // 2 if not f.is_zero else 0
        g = f.translate(-self.center)
        ga, gb = g.support
        halfspan = max(abs(ga), abs(gb), 0)
        self.out_halfwidth = int(out_halfwidth)
        self.grid = grid_for(halfspan + self.out_halfwidth, minimum=min_size)
        self.zero_input = f.is_zero
        self.spectrum = dtft(g, self.grid)
        self.lambdas = self.grid.lambdas
        self.thetas = self.grid.thetas
        n = np.arange(-self.out_halfwidth, self.out_halfwidth + 1)
        self._n = n
        self._signs = np.where(n % 2 == 0, 1.0, -1.0)
        self._idx = n % self.grid.size

    def apply_samples(self, mult: np.ndarray) -> Sequence:
        """Apply multiplier samples (aligned with ``self.thetas``) to the input."""
        if self.zero_input:
            return Sequence(0, np.zeros(0))
        coeff = np.fft.fft(self.spectrum * mult) / self.grid.size
        vals = self._signs * coeff[self._idx]
        return Sequence(self._n[0] + self.center, vals)

    def apply_symbol(self, sym: Symbol) -> Sequence:
        return self.apply_samples(sym.sample(self.lambdas))


def synthesize_kernel(
    sym: Symbol,
    nmax: int,
    grid: SpectralGrid | None = None,
    tol: float | None = None,
    return_error: bool = False,
):
    """Convolution kernel of the operator with spectral symbol ``sym``.

    Returns the sequence ``k(n) = (1/pi) integral_0^pi sym(2 sin(theta/2))
    cos(n theta) d theta`` for ``|n| <= nmax``, with the even symmetry
    ``k(n) = k(-n)`` enforced exactly.  The quadrature error is estimated by
    recomputing on a doubled grid; pass ``tol`` to turn an excessive estimate
    into :class:`AccuracyError`, or ``return_error=True`` to receive the
    estimate alongside the kernel.
    """
    if nmax < 0:
        raise ValidationError("nmax must be nonnegative")
    if grid is None:
        grid = grid_for(nmax, minimum=512)
    else:
        grid.check_window(nmax)

    def _kernel(g: SpectralGrid) -> Sequence:
        samples = sym.sample(g.lambdas)
        seq = inverse_dtft(samples, (-nmax, nmax))
        vals = seq.values_on(-nmax, nmax)
        vals = 0.5 * (vals + vals[::-1])
        return Sequence(-nmax, vals)

    kern = _kernel(grid)
    fine = _kernel(SpectralGrid(grid.size * 2))
    diff = fine - kern
    err = 0.0 if diff.is_zero else float(np.max(np.abs(diff.values)))
    if tol is not None and err > tol:
        raise AccuracyError(
            f"kernel quadrature error estimate {err:.3e} exceeds tolerance {tol:.3e}"
        )
    if return_error:
        return kern, err
    return kern


def apply_symbol(
    sym: Symbol,
    f: Sequence,
    out_halfwidth: int = 2048,
    tol: float | None = None,
    return_tail: bool = False,
):
    """Apply the operator with symbol ``sym`` to ``f``.

    The result is restricted to a window of half-width ``out_halfwidth``
    around the centre of the support of ``f``.  When ``tol`` is given the
    discarded tail mass is estimated from a doubled window and a warning is
    emitted if the relative tail exceeds ``tol``; ``return_tail=True`` returns
    the estimate alongside the result.
    """
    if f.is_zero:
        return (f, 0.0) if return_tail else f
    applier = GridApplier(f, out_halfwidth)
    out = applier.apply_samples(sym.sample(applier.lambdas))
    tail = None
    if tol is not None or return_tail:
        wide = GridApplier(f, 2 * out_halfwidth)
        big = wide.apply_samples(sym.sample(wide.lambdas))
        total = math.sqrt(sum(abs(v) ** 2 for v in big.values)) if not big.is_zero else 0.0
        inside = big.values_on(out.support[0], out.support[1])
        kept = float(np.linalg.norm(inside))
        tail = 0.0 if total == 0.0 else math.sqrt(max(total**2 - kept**2, 0.0)) / total
        if tol is not None and tail > tol:
            warnings.warn(
                f"apply_symbol: discarded tail mass {tail:.3e} exceeds tolerance {tol:.3e}",
                stacklevel=2,
            )
    if return_tail:
        return out, (tail if tail is not None else 0.0)
    return out


# ---------------------------------------------------------------------------
# symbol registry
# ---------------------------------------------------------------------------


def _smooth_rise(x: np.ndarray) -> np.ndarray:
    # C^infinity step, 0 for x <= 0 and 1 for x >= 1.
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x >= 1.0] = 1.0
    mid = (x > 0.0) & (x < 1.0)
    if mid.any():
        xm = x[mid]
        a = np.exp(-1.0 / xm)
        b = np.exp(-1.0 / (1.0 - xm))
        out[mid] = a / (a + b)
    return out


def make_symbol(spec: str) -> Symbol:
    """Build a symbol from a registry string.

    Recognised forms:

    - ``heat:t``        heat multiplier ``exp(-t lambda^2)``
    - ``power:k``       monomial ``lambda^k``
    - ``band:j[:steep]`` dyadic bump ``psi(2^-j lambda)`` from the standard partition
    - ``imagpower:s[:cut]`` imaginary power ``lambda^{i s}`` smoothly cut off
      below ``cut`` (default 1/16)
    - ``custom:path``   tabulated CSV ``lambda,re[,im]`` with linear interpolation

    The Riesz transform is not expressible as a function of ``lambda`` alone
    (its multiplier depends on the sign of the frequency); use
    :func:`zharm.multop.riesz` instead.
    """
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name == "heat":
        t = float(rest)
        if t <= 0:
            raise ValidationError("heat symbol requires t > 0")
        return Symbol(lambda lam, t=t: np.exp(-t * lam**2), label=f"heat:{t:g}")
    if name == "power":
        k = float(rest)
        if k < 0:
            raise ValidationError("power symbol requires a nonnegative exponent")
        return Symbol(lambda lam, k=k: lam**k, label=f"power:{k:g}")
    if name == "band":
        parts = rest.split(":") if rest else ["0"]
        j = int(parts[0])
        steep = float(parts[1]) if len(parts) > 1 else 1.0
        from .lpaley import make_partition

        part = make_partition(steep)
        return Symbol(
            lambda lam, j=j, part=part: part.psi(np.ldexp(lam, -j)),
            label=f"band:{j}",
            support=(2.0 * 2.0**j, 8.0 * 2.0**j),
        )
    if name == "imagpower":
        parts = rest.split(":") if rest else ["1"]
        s = float(parts[0])
        cut = float(parts[1]) if len(parts) > 1 else 1.0 / 16.0

        def _fn(lam, s=s, cut=cut):
            lam = np.asarray(lam, dtype=float)
            out = np.zeros(lam.shape, dtype=np.complex128)
            pos = lam > 0
            out[pos] = _smooth_rise(lam[pos] / cut - 1.0) * np.exp(1j * s * np.log(lam[pos]))
            return out

        return Symbol(_fn, label=f"imagpower:{s:g}", value_at_zero=0.0)
    if name == "riesz":
        raise ValidationError(
            "the riesz multiplier depends on the frequency sign; use zharm.multop.riesz"
        )
    if name == "custom":
        table = np.loadtxt(rest, delimiter=",", ndmin=2, dtype=float)
        lam_t = table[:, 0]
        re_t = table[:, 1]
        im_t = table[:, 2] if table.shape[1] > 2 else np.zeros_like(re_t)
        order = np.argsort(lam_t)
        lam_t, re_t, im_t = lam_t[order], re_t[order], im_t[order]

        def _interp(lam, lt=lam_t, rt=re_t, it=im_t):
            return np.interp(lam, lt, rt) + 1j * np.interp(lam, lt, it)

        return Symbol(_interp, label=f"custom:{rest}")
    raise ValidationError(f"unknown symbol spec {spec!r}")
