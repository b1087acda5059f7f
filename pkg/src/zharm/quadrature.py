"""Logarithmic-scale quadrature for integrals against dt/t.

All scale integrals in the package run over dyadic ranges of t, so nodes are
placed per octave: Gauss-Legendre points in ``u = log t`` on each doubling
interval.  A ``TimeQuadrature`` stores its construction parameters so it can
be refined (for convergence reporting) without the caller rebuilding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ValidationError

__all__ = ["TimeQuadrature", "log_gauss_nodes"]


@lru_cache(maxsize=32)
def _gl_unit(n: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(n)
    return tuple(x), tuple(w)


def log_gauss_nodes(t_min: float, t_max: float, points_per_octave: int = 16):
    """Nodes and weights approximating ``integral_{t_min}^{t_max} g(t) dt/t``.

    Gauss-Legendre in ``log t`` on each octave ``[2^k t_min, 2^(k+1) t_min]``
    (the last octave may be partial).
    """
    if not (0 < t_min < t_max):
        raise ValidationError("log quadrature requires 0 < t_min < t_max")
    if points_per_octave < 2:
        raise ValidationError("need at least two points per octave")
    x, w = _gl_unit(points_per_octave)
    x = np.asarray(x)
    w = np.asarray(w)
    u_lo = math.log(t_min)
    u_hi = math.log(t_max)
    du = math.log(2.0)
    nodes = []
    weights = []
    u = u_lo
    while u < u_hi - 1e-15:
        v = min(u + du, u_hi)
        half = 0.5 * (v - u)
        mid = 0.5 * (v + u)
        nodes.append(np.exp(mid + half * x))
        weights.append(half * w)
        u = v
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class TimeQuadrature:
    """A fixed discretization of ``integral g(t) dt/t`` over ``[t_min, t_max]``.

    ``poisson_weights`` additionally carries the ``1/(t+1)`` factor of the
    measure ``dt / (t (t+1))`` used by the cone and grand square functionals.
    """

    t_min: float
    t_max: float
    points_per_octave: int
    nodes: np.ndarray
    weights: np.ndarray

    @staticmethod
    def make(t_min: float, t_max: float, points_per_octave: int = 16) -> "TimeQuadrature":
        nodes, weights = log_gauss_nodes(t_min, t_max, points_per_octave)
        return TimeQuadrature(t_min, t_max, points_per_octave, nodes, weights)

    @staticmethod
    def default() -> "TimeQuadrature":
        return TimeQuadrature.make(1.0, 2.0**28, 16)

    @property
    def poisson_weights(self) -> np.ndarray:
        return self.weights / (1.0 + self.nodes)

    def refined(self, factor: int = 2) -> "TimeQuadrature":
        return TimeQuadrature.make(self.t_min, self.t_max, factor * self.points_per_octave)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of samples aligned with ``nodes``."""
        return float(np.dot(self.weights, values))
