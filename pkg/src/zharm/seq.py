"""Finitely supported complex sequences on the integer lattice.

``Sequence`` is the basic data object of the package: an integer offset plus a
dense block of complex samples, implicitly zero everywhere else.  Instances
are canonical (no zero fringe samples) and immutable; equality compares values
on all of the lattice, so padding with zeros never changes identity.

The operators collected here are the plain difference calculus: forward and
backward differences, the second-difference Laplacian, moments and the
polynomial-weighted decay seminorms used to gauge rapid decrease.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "Sequence",
    "delta",
    "from_values",
    "zero",
    "lp_norm",
    "diff_forward",
    "diff_backward",
    "laplacian",
    "laplacian_power",
    "moment",
    "schwartz_seminorm",
    "inner",
]


def _canonical(offset: int, values) -> tuple[int, np.ndarray]:
    # Trims exact-zero fringes; the empty sequence is stored as (0, []).
    v = np.ascontiguousarray(values, dtype=np.complex128)
    if v.ndim != 1:
        raise ValidationError("sequence values must be one-dimensional")
    nz = np.flatnonzero(v)
    if nz.size == 0:
        out = v[:0].copy()
        out.setflags(write=False)
        return 0, out
    out = v[nz[0] : nz[-1] + 1].copy()
    out.setflags(write=False)
    return int(offset + nz[0]), out


@dataclass(frozen=True)
class Sequence:
    """A finitely supported function on the integers.

    Parameters
    ----------
    offset : int
        Index of the first stored sample.
    values : array_like
        Complex samples at ``offset, offset + 1, ...``.
    """

    offset: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        off, vals = _canonical(self.offset, self.values)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "values", vals)

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_zero(self) -> bool:
        return len(self.values) == 0

    @property
    def support(self) -> tuple[int, int]:
        """Smallest and largest index with a stored (nonzero-fringe) sample.

        Returns ``(0, -1)`` for the zero sequence.
        """
        if self.is_zero:
            return (0, -1)
        return (self.offset, self.offset + len(self.values) - 1)

    def at(self, n: int) -> complex:
        """Value at index ``n`` (zero outside the stored window)."""
        i = n - self.offset
        if 0 <= i < len(self.values):
            return complex(self.values[i])
        return 0.0 + 0.0j

    def values_on(self, lo: int, hi: int) -> np.ndarray:
        """Dense samples on the index window ``lo..hi`` inclusive."""
        if hi < lo:
            return np.zeros(0, dtype=np.complex128)
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        a, b = self.support
        if not self.is_zero:
            s, e = max(a, lo), min(b, hi)
            if s <= e:
                out[s - lo : e - lo + 1] = self.values[s - self.offset : e - self.offset + 1]
        return out

    # -- algebra -------------------------------------------------------

    def translate(self, k: int) -> "Sequence":
        """The sequence ``n -> f(n - k)`` (shift to the right by ``k``)."""
        return Sequence(self.offset + k, self.values)

    def __add__(self, other: "Sequence") -> "Sequence":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.offset, other.offset)
        hi = max(self.support[1], other.support[1])
        return Sequence(lo, self.values_on(lo, hi) + other.values_on(lo, hi))

    def __sub__(self, other: "Sequence") -> "Sequence":
        return self + (-1.0) * other

    def __neg__(self) -> "Sequence":
        return (-1.0) * self

    def __mul__(self, c) -> "Sequence":
        return Sequence(self.offset, self.values * complex(c))

    __rmul__ = __mul__

    def conj(self) -> "Sequence":
        return Sequence(self.offset, np.conj(self.values))

    def real_part(self) -> "Sequence":
        return Sequence(self.offset, self.values.real.astype(np.complex128))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.offset, self.values.tobytes()))

    def approx_eq(self, other: "Sequence", tol: float = 1e-12) -> bool:
        """Value-wise comparison up to an absolute tolerance."""
        d = self - other
        if d.is_zero:
            return True
        return float(np.max(np.abs(d.values))) <= tol

    def __repr__(self) -> str:
        a, b = self.support
        return f"Sequence(offset={self.offset}, len={len(self)}, support=[{a},{b}])"

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        """The interchange form ``{"offset": int, "re": [...], "im": [...]}``."""
        return {
            "offset": int(self.offset),
            "re": [float(x) for x in self.values.real],
            "im": [float(x) for x in self.values.imag],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Sequence":
        re = np.asarray(d.get("re", []), dtype=float)
        im_raw = d.get("im")
        im = np.zeros_like(re) if im_raw is None else np.asarray(im_raw, dtype=float)
        if im.shape != re.shape:
            raise ValidationError("'re' and 'im' arrays must have equal length")
        return Sequence(int(d.get("offset", 0)), re + 1j * im)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load(path) -> "Sequence":
        with open(path) as fh:
            return Sequence.from_json_dict(json.load(fh))


def delta(n: int = 0, amplitude: complex = 1.0) -> Sequence:
    """The unit sample at index ``n``."""
    return Sequence(n, np.array([amplitude], dtype=np.complex128))


def from_values(offset: int, values) -> Sequence:
    return Sequence(offset, np.asarray(values, dtype=np.complex128))


def zero() -> Sequence:
    return Sequence(0, np.zeros(0, dtype=np.complex128))


# ---------------------------------------------------------------------------
# norms and moments
# ---------------------------------------------------------------------------


def lp_norm(f: Sequence, p: float) -> float:
    """The summation quasi-norm ``(sum |f(n)|^p)^(1/p)``; ``p = inf`` gives the sup.

    Any ``p in (0, inf]`` is accepted; no triangle inequality is assumed for
    ``p < 1``.
    """
    if not (p > 0):
        raise ValidationError(f"lp_norm requires p > 0, got {p!r}")
    if f.is_zero:
        return 0.0
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    if p == 2.0:
        return float(np.linalg.norm(a))
    if p == 1.0:
        return float(a.sum())
    return float(np.sum(a**p) ** (1.0 / p))


def inner(f: Sequence, g: Sequence) -> complex:
    """The sesquilinear pairing ``sum f(n) * conj(g(n))``."""
    lo = min(f.offset, g.offset)
    hi = max(f.support[1], g.support[1])
    if f.is_zero or g.is_zero:
        return 0.0 + 0.0j
    a = f.values_on(lo, hi)
    b = g.values_on(lo, hi)
    prod = a * np.conj(b)
    return complex(math.fsum(prod.real), math.fsum(prod.imag))


def moment(f: Sequence, beta: int) -> complex:
    """The weighted sum ``sum n^beta f(n)`` with compensated accumulation."""
    if beta < 0:
        raise ValidationError("moment order must be nonnegative")
    if f.is_zero:
        return 0.0 + 0.0j
    n = np.arange(f.offset, f.offset + len(f), dtype=float)
    w = n**beta
    terms = w * f.values
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


# ---------------------------------------------------------------------------
# difference calculus
# ---------------------------------------------------------------------------


def diff_forward(f: Sequence) -> Sequence:
    """Forward difference ``Df(n) = f(n+1) - f(n)``."""
    if f.is_zero:
        return f
    v = f.values
    ext = np.concatenate([v, [0.0]]) - np.concatenate([[0.0], v])
    return Sequence(f.offset - 1, ext)


def diff_backward(f: Sequence) -> Sequence:
    """Backward difference ``D*f(n) = f(n) - f(n-1)``."""
    if f.is_zero:
        return f
    v = f.values
    ext = np.concatenate([v, [0.0]]) - np.concatenate([[0.0], v])
    return Sequence(f.offset, ext)


def laplacian(f: Sequence) -> Sequence:
    """Second-difference operator ``-f(n+1) + 2 f(n) - f(n-1)``.

    Satisfies ``|laplacian(f)|_p <= 4 |f|_p`` for every ``p`` and acts on the
    windowed exponential ``exp(i n theta)`` as multiplication by
    ``2 (1 - cos theta)`` away from the window boundary.
    """
    if f.is_zero:
        return f
    v = f.values
    z = np.zeros(1, dtype=np.complex128)
    ext = (
        -np.concatenate([v, z, z])
        + 2.0 * np.concatenate([z, v, z])
        - np.concatenate([z, z, v])
    )
    return Sequence(f.offset - 1, ext)


def laplacian_power(f: Sequence, m: int) -> Sequence:
    """``m``-fold application of :func:`laplacian`."""
    if m < 0:
        raise ValidationError("laplacian power must be nonnegative")
    out = f
    for _ in range(m):
        out = laplacian(out)
    return out


def schwartz_seminorm(f: Sequence, m: int) -> float:
    """Decay seminorm ``sup_n (1+|n|)^m max_{0<=l<=m} |Delta^l f(n)|``.

    Finite automatically for finite support; the zero sequence gives 0.
    """
    if m < 0:
        raise ValidationError("seminorm order must be nonnegative")
    best = 0.0
    g = f
    stack = []
    for _ in range(m + 1):
        stack.append(g)
        g = laplacian(g)
    # pointwise max over 0 <= l <= m, then the (1+|n|)^m weight
    lo = min((s.offset for s in stack if not s.is_zero), default=0)
    hi = max((s.support[1] for s in stack if not s.is_zero), default=-1)
    if hi < lo:
        return 0.0
    env = np.zeros(hi - lo + 1)
    for s in stack:
        env = np.maximum(env, np.abs(s.values_on(lo, hi)))
    n = np.arange(lo, hi + 1, dtype=float)
    best = float(np.max((1.0 + np.abs(n)) ** m * env))
    return best
