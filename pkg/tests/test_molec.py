import math
import statistics

import numpy as np
import pytest

from zharm.exceptions import ValidationError
from zharm.family import band_limited_noise
from zharm.lpaley import make_partition
from zharm.molec import (
    Decomposition,
    DyadicInterval,
    Molecule,
    coefficient_norm,
    decompose,
    make_classical_atom,
    verify_molecule,
)
from zharm.seq import from_values, laplacian_power, lp_norm, moment, zero
from zharm.spaces import besov_norm


@pytest.fixture(scope="module")
def part():
    return make_partition(1.0)


@pytest.fixture(scope="module")
def band_decomposition(part):
    rng = np.random.default_rng(9)
    f = band_limited_noise(-2, rng)
    return f, decompose(part, f, m_order=2, p=1.0, j_min=-12)


class TestDyadicGrid:
    def test_tiling(self):
        for nu in (0, -1, -3, -5):
            for n in range(-70, 71):
                iv = DyadicInterval.containing(nu, n)
                assert iv.start <= n < iv.stop
                # neighbours do not contain n
                assert not (DyadicInterval(nu, iv.k - 1).start <= n < DyadicInterval(nu, iv.k - 1).stop)
                assert not (DyadicInterval(nu, iv.k + 1).start <= n < DyadicInterval(nu, iv.k + 1).stop)

    def test_size_and_length(self):
        iv = DyadicInterval(-3, 2)
        assert iv.size == 8 and iv.length == 8
        assert iv.start == 16 and iv.stop == 24

    def test_distance(self):
        iv = DyadicInterval(-2, 0)  # [0, 4)
        assert iv.distance(0) == 0 and iv.distance(3) == 0
        assert iv.distance(-2) == 2 and iv.distance(6) == 3

    def test_positive_scale_rejected(self):
        with pytest.raises(ValidationError):
            DyadicInterval(1, 0)


class TestClassicalAtoms:
    def test_moment_cancellation(self):
        # the moment operator is the oracle
        iv = DyadicInterval(-4, 1)
        atom = make_classical_atom(iv, 1.0, 1, seed=5)
        scale = lp_norm(atom, math.inf)
        assert abs(moment(atom, 0)) <= 1e-12 * scale
        assert abs(moment(atom, 1)) <= 1e-11 * scale * 16

    def test_size_normalization_exact(self):
        iv = DyadicInterval(-4, 0)
        atom = make_classical_atom(iv, 1.0, 0, seed=6)
        assert lp_norm(atom, 2.0) == pytest.approx(iv.size ** (0.5 - 1.0), abs=1e-12)

    def test_support_inside_interval(self):
        iv = DyadicInterval(-3, -2)
        atom = make_classical_atom(iv, 0.7, 1, seed=7)
        lo, hi = atom.support
        assert lo >= iv.start and hi < iv.stop

    def test_infeasible_moments(self):
        with pytest.raises(ValidationError):
            make_classical_atom(DyadicInterval(-1, 0), 1.0, 1, seed=0)


class TestVerifyMolecule:
    def test_handmade_molecule_constant_near_one(self):
        # construction oracle: scale a bump exactly to the pointwise shape
        iv = DyadicInterval(-3, 0)  # [0, 8)
        n_decay = 2.0
        m_order = 1
        n = np.arange(-40, 48)
        ell = float(iv.length)
        shape = ell ** (2 * m_order) * iv.size ** (-1.0) * (
            1.0 + iv.distance(n) / ell
        ) ** (-1.0 - n_decay)
        b = from_values(-40, shape)
        mol = Molecule(iv, m_order, 1.0, n_decay, b)
        rep = verify_molecule(mol, "besov")
        assert rep.per_order[0] == pytest.approx(1.0, abs=1e-12)
        assert rep.constant <= max(1.01, rep.constant)  # k = 0 saturates exactly

    def test_far_bump_flagged(self):
        iv = DyadicInterval(-2, 0)
        n = np.arange(200, 208)
        b = from_values(200, np.ones(8))
        mol = Molecule(iv, 1, 1.0, 3.0, b)
        rep = verify_molecule(mol, "besov")
        assert rep.constant > 1e3

    def test_translation_invariance_exact(self):
        rng = np.random.default_rng(1)
        b = from_values(-5, rng.standard_normal(16))
        mol_a = Molecule(DyadicInterval(-2, 0), 1, 1.0, 2.0, b)
        mol_b = Molecule(DyadicInterval(-2, 5), 1, 1.0, 2.0, b.translate(20))
        assert verify_molecule(mol_a, "besov").constant == verify_molecule(mol_b, "besov").constant

    def test_hardy_flavor_runs(self):
        rng = np.random.default_rng(2)
        b = from_values(0, rng.standard_normal(8))
        mol = Molecule(DyadicInterval(-3, 0), 1, 1.0, 0.5, b)
        rep = verify_molecule(mol, "hardy")
        assert rep.flavor == "hardy" and rep.constant > 0

    def test_diff_flavor_orders(self):
        rng = np.random.default_rng(3)
        b = from_values(0, rng.standard_normal(8))
        mol = Molecule(DyadicInterval(-3, 0), 1, 1.0, 2.0, b)
        rep = verify_molecule(mol, "diff")
        assert set(rep.per_order) == set(range(4 * 1 + 1))

    def test_molecule_caches_a(self):
        rng = np.random.default_rng(4)
        b = from_values(0, rng.standard_normal(6))
        mol = Molecule(DyadicInterval(-3, 0), 2, 1.0, 2.0, b)
        assert mol.a == laplacian_power(b, 2)


class TestDecompose:
    def test_zero_input(self, part):
        dec = decompose(part, zero(), j_min=-6)
        assert dec.terms == [] and dec.reconstruct().is_zero

    def test_band_concentration(self, part, band_decomposition):
        f, dec = band_decomposition
        by_scale = dec.coefficients_by_scale()
        mass = {nu: sum(abs(s) for _, s in v) for nu, v in by_scale.items()}
        total = sum(mass.values())
        # the band at scale -2 occupies lambda in [1/2, 2], which the scale
        # integral sees for t in [1, 16]: octaves nu = 0 .. -4
        core = sum(mass.get(nu, 0.0) for nu in (0, -1, -2, -3, -4))
        assert core >= (1 - 1e-6) * total

    def test_reconstruction(self, part, band_decomposition):
        f, dec = band_decomposition
        err = lp_norm(dec.reconstruct() - f, 2.0) / lp_norm(f, 2.0)
        assert err <= 1e-6

    def test_molecule_identity_exact(self, band_decomposition):
        _, dec = band_decomposition
        _, _, mol = dec.terms[len(dec.terms) // 2]
        assert mol.a == laplacian_power(mol.b, mol.m_order)

    def test_emitted_constants_cluster(self, part, band_decomposition):
        _, dec = band_decomposition
        consts = [verify_molecule(m, "besov").constant for _, _, m in dec.terms]
        med = statistics.median(consts)
        assert max(consts) <= 15 * med  # uniform boundedness at work


class TestCoefficientNorms:
    def test_empty(self):
        assert coefficient_norm([], 0.0, 2.0, 2.0, "besov") == 0.0

    def test_besov_style_hand_value(self):
        terms = [
            (DyadicInterval(0, 0), 3.0, None),
            (DyadicInterval(0, 5), 4.0, None),
            (DyadicInterval(-1, 0), 2.0, None),
        ]
        # [ (2^0 (3^2+4^2)^{1/2})^2 + (2^{-alpha...}) ] with alpha=1, p=2, q=2
        got = coefficient_norm(terms, 1.0, 2.0, 2.0, "besov")
        expect = math.sqrt((1.0 * 5.0) ** 2 + (0.5 * 2.0) ** 2)
        assert got == pytest.approx(expect, abs=1e-12)

    def test_tl_style_hand_value(self):
        terms = [(DyadicInterval(-1, 0), 2.0, None)]  # interval [0,2), |I| = 2
        got = coefficient_norm(terms, 0.0, 1.0, 2.0, "tl")
        # field = |I|^{-1} * 2 on two points = 1 each; l1 norm = 2
        assert got == pytest.approx(2.0, abs=1e-12)

    def test_forward_inequality_stable(self, part, band_decomposition):
        f, dec = band_decomposition
        cn = coefficient_norm(dec, 0.0, 2.0, 2.0, "besov")
        bn = besov_norm(part, f, 0.0, 2.0, 2.0, j_min=-12)
        assert cn / bn < 50.0

    def test_converse_inequality_stable(self, part, band_decomposition):
        f, dec = band_decomposition
        rec = dec.reconstruct()
        bn = besov_norm(part, rec, 0.0, 2.0, 2.0, j_min=-12)
        cn = coefficient_norm(dec, 0.0, 2.0, 2.0, "besov")
        assert bn / cn < 50.0
