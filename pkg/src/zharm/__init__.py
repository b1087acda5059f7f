"""Numerical harmonic analysis on the integer lattice.

Heat semigroup and its kernel estimates, FFT-based functional calculus of the
second-difference Laplacian, dyadic Littlewood-Paley analysis, Hardy / Besov /
Triebel-Lizorkin norms, molecular decompositions, spectral multipliers and
Riesz transforms, together with sweep-style numerical verifiers for the kernel
decay bounds and norm equivalences.
"""

from .exceptions import (
    AccuracyError,
    ConsistencyError,
    GridSizeError,
    ValidationError,
    ZharmError,
)
from .seq import (
    Sequence,
    delta,
    diff_backward,
    diff_forward,
    from_values,
    inner,
    laplacian,
    laplacian_power,
    lp_norm,
    moment,
    schwartz_seminorm,
    zero,
)
from .spectral import (
    SpectralGrid,
    Symbol,
    apply_symbol,
    dtft,
    inverse_dtft,
    make_symbol,
    synthesize_kernel,
)
from .heat import (
    SweepReport,
    complex_heat_kernel,
    decay_sweep,
    dt_heat_kernel,
    heat_apply,
    heat_kernel,
    heat_kernel_row,
    scaled_bessel_row,
)
from .lpaley import (
    Partition,
    calderon_reconstruct,
    continuous_calderon,
    lp_block,
    make_partition,
)
from .maximal import hl_maximal, peetre_max, peetre_max_continuous
from .quadrature import TimeQuadrature
from .spaces import (
    area_square,
    besov_norm,
    continuous_norm,
    gfun,
    hardy_norm,
    lusin,
    psi_square,
    tl_norm,
)
from .molec import (
    Decomposition,
    DyadicInterval,
    Molecule,
    coefficient_norm,
    decompose,
    make_classical_atom,
    verify_molecule,
)
from .multop import (
    MultiplierCondition,
    apply_multiplier,
    operator_norm_probe,
    riesz,
    sobolev_condition,
    weighted_kernel_check,
)

__version__ = "0.1.0"
