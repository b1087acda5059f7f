"""Seeded signal families for equivalence harnesses and operator probes.

Empirical norm-equivalence checks need a declared population; the default
family mixes unit samples, dipoles, band-limited noise on five dyadic bands,
and random molecules.  Construction is sequential from a single generator, so
``default_family(seed, size=40)[:20] == default_family(seed, size=20)``.
"""

from __future__ import annotations

import numpy as np

from .lpaley import Partition, make_partition
from .molec import DyadicInterval, make_classical_atom
from .seq import Sequence, delta, diff_forward, from_values, laplacian_power, lp_norm
from .spectral import SpectralGrid, inverse_dtft

__all__ = ["default_family", "mean_zero_family", "band_limited_noise", "atom_family"]

_PART = make_partition(1.0)


def band_limited_noise(
    j: int, rng: np.random.Generator, part: Partition | None = None
) -> Sequence:
    """A smooth-spectrum signal occupying the dyadic band at scale ``j <= 0``.

    The spectrum is the band bump modulated by a low-order random trigonometric
    polynomial, so the sequence decays super-polynomially and its truncation at
    relative 1e-15 leaves out-of-band leakage near roundoff.
    """
    part = part or _PART
    grid = SpectralGrid(2**13)
    mod = np.ones(grid.size)
    for k in range(1, 4):
        a, b = rng.uniform(-0.5, 0.5, size=2)
        mod = mod + a * np.cos(k * grid.thetas) + b * np.sin(k * grid.thetas)
    spec = part.psi(np.ldexp(grid.lambdas, -j)) * mod
    width = int(min(3000, 80.0 * 2.0 ** (-j) + 200))
    f = inverse_dtft(spec.astype(np.complex128), (-width, width))
    v = f.values_on(*f.support)
    peak = float(np.max(np.abs(v)))
    if peak == 0.0:
        return delta(0)
    keep = np.abs(v) > 1e-15 * peak
    nz = np.flatnonzero(keep)
    out = from_values(f.support[0] + nz[0], v[nz[0] : nz[-1] + 1])
    return (1.0 / lp_norm(out, 2.0)) * out


def _random_molecule_signal(rng: np.random.Generator) -> Sequence:
    m_order = int(rng.integers(1, 3))
    width = int(rng.integers(6, 20))
    center = int(rng.integers(-10, 11))
    n = np.arange(center - 2 * width, center + 2 * width + 1)
    bump = np.exp(-(((n - center) / width) ** 2)) * (1.0 + 0.3 * rng.standard_normal(len(n)))
    f = laplacian_power(from_values(n[0], bump), m_order)
    return (1.0 / lp_norm(f, 2.0)) * f


def default_family(seed: int = 20250809, size: int = 20) -> list[Sequence]:
    """The standard mixed family; deterministic and prefix-stable in ``size``."""
    rng = np.random.default_rng(seed)
    out: list[Sequence] = []
    band_cycle = 0
    for i in range(size):
        kind = i % 4
        if kind == 0:
            pos = int(rng.integers(-12, 13))
            amp = float(rng.uniform(0.5, 2.0))
            out.append(delta(pos, amp))
        elif kind == 1:
            pos = int(rng.integers(-8, 9))
            base = delta(pos)
            dip = diff_forward(base) if i % 8 < 4 else laplacian_power(base, 1)
            out.append(float(rng.uniform(0.5, 2.0)) * dip)
        elif kind == 2:
            # scale 0 sees only the top edge of the spectrum, where the bump
            # vanishes; the populated bands start at -1
            out.append(band_limited_noise(-1 - (band_cycle % 5), rng))
            band_cycle += 1
        else:
            out.append(_random_molecule_signal(rng))
    return out


def mean_zero_family(seed: int = 20250809, size: int = 20) -> list[Sequence]:
    """The default family passed through the forward difference (exact zero mean)."""
    return [diff_forward(f) for f in default_family(seed, size)]


def atom_family(
    count: int = 50,
    lengths: tuple[int, ...] = (4, 16, 64),
    p: float = 1.0,
    moments: int = 0,
    seed: int = 20250809,
) -> list[Sequence]:
    """Seeded compactly supported atoms cycling through the given interval lengths."""
    out = []
    for i in range(count):
        length = lengths[i % len(lengths)]
        nu = -int(np.log2(length))
        k = (i * 7) % 23 - 11
        out.append(make_classical_atom(DyadicInterval(nu, k), p, moments, seed + i))
    return out
