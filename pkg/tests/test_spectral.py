import math

import numpy as np
import pytest

from zharm.exceptions import GridSizeError, ValidationError
from zharm.seq import delta, from_values, inner, laplacian, lp_norm
from zharm.spectral import (
    GridApplier,
    SpectralGrid,
    Symbol,
    apply_symbol,
    dtft,
    inverse_dtft,
    make_symbol,
    synthesize_kernel,
)


def random_seq(rng, length, offset=0):
    return from_values(offset, rng.standard_normal(length) + 1j * rng.standard_normal(length))


class TestTransforms:
    def test_delta_transforms_to_one(self):
        s = dtft(delta(0), SpectralGrid(64))
        assert np.allclose(s, 1.0)

    def test_shift_is_phase(self):
        grid = SpectralGrid(64)
        s = dtft(delta(1), grid)
        assert np.allclose(s, np.exp(1j * grid.thetas))

    def test_parseval_against_double_sum(self):
        # oracle: direct double sum over the support
        rng = np.random.default_rng(0)
        f = random_seq(rng, 32, offset=-10)
        grid = SpectralGrid(128)
        s = dtft(f, grid)
        lhs = np.sum(np.abs(s) ** 2) / grid.size
        n = np.arange(-10, 22)
        direct = sum(abs(f.at(int(m))) ** 2 for m in n)
        assert lhs == pytest.approx(direct, abs=1e-12 * direct)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        f = random_seq(rng, 16, offset=-5)
        grid = SpectralGrid(128)
        back = inverse_dtft(dtft(f, grid), (-30, 30))
        assert back.approx_eq(f, 1e-12)

    def test_constant_samples_give_delta(self):
        f = inverse_dtft(np.ones(64), (-10, 10))
        assert f.approx_eq(delta(0), 1e-13)

    def test_phase_gives_shift(self):
        grid = SpectralGrid(64)
        f = inverse_dtft(np.exp(1j * grid.thetas), (-10, 10))
        assert f.approx_eq(delta(1), 1e-13)

    def test_grid_too_small_raises(self):
        f = from_values(0, np.ones(40))
        with pytest.raises(GridSizeError):
            dtft(f, SpectralGrid(64))


class TestSynthesizeKernel:
    def test_identity_symbol(self):
        k = synthesize_kernel(Symbol(lambda lam: np.ones_like(lam), label="one"), 8)
        assert k.approx_eq(delta(0), 1e-13)

    def test_square_symbol_matches_stencil(self):
        # oracle: 2(1-cos t) = 2 - e^{it} - e^{-it} exactly
        k = synthesize_kernel(make_symbol("power:2"), 8)
        expect = laplacian(delta(0))
        assert k.approx_eq(expect, 1e-12)

    def test_heat_value_against_series(self):
        # oracle: e^{-1} I_0(1) via the absolutely convergent series
        k = synthesize_kernel(make_symbol("heat:0.5"), 16)
        series = math.exp(-1) * sum(0.25**m / math.factorial(m) ** 2 for m in range(30))
        assert k.at(0).real == pytest.approx(series, abs=1e-13)

    def test_symmetry_exact(self):
        k = synthesize_kernel(make_symbol("heat:1.3"), 20)
        for n in range(21):
            assert k.at(n) == k.at(-n)

    def test_error_estimate_bounds_refinement(self):
        sym = make_symbol("heat:0.7")
        k1, err = synthesize_kernel(sym, 16, grid=SpectralGrid(256), return_error=True)
        k2 = synthesize_kernel(sym, 16, grid=SpectralGrid(512))
        gap = max(abs(k1.at(n) - k2.at(n)) for n in range(-16, 17))
        assert gap <= err + 1e-15


class TestApplySymbol:
    def test_identity(self):
        rng = np.random.default_rng(2)
        f = random_seq(rng, 9, offset=-4)
        sym = Symbol(lambda lam: np.ones_like(lam), label="one")
        assert apply_symbol(sym, f, 64).approx_eq(f, 1e-12)

    def test_square_matches_laplacian(self):
        rng = np.random.default_rng(3)
        f = random_seq(rng, 9, offset=2)
        out = apply_symbol(make_symbol("power:2"), f, 64)
        assert out.approx_eq(laplacian(f), 1e-11)

    def test_homomorphism_against_kernel_convolution(self):
        # F(G(f)) must equal (F*G)(f); oracle is kernel convolution
        rng = np.random.default_rng(4)
        f = random_seq(rng, 7)
        heat = make_symbol("heat:1.0")
        sq = make_symbol("power:2")
        via_two = apply_symbol(heat, apply_symbol(sq, f, 128), 128)
        prod = Symbol(lambda lam: lam**2 * np.exp(-(lam**2)), label="prod")
        via_one = apply_symbol(prod, f, 128)
        assert via_two.approx_eq(via_one, 1e-10)
        kern = synthesize_kernel(prod, 64)
        conv = np.convolve(f.values, kern.values)
        oracle = from_values(f.offset + kern.offset, conv)
        lo, hi = via_one.support
        assert max(abs(via_one.at(n) - oracle.at(n)) for n in range(lo, hi + 1)) < 1e-10

    def test_translation_covariance_exact(self):
        rng = np.random.default_rng(5)
        f = random_seq(rng, 11, offset=-3)
        sym = make_symbol("heat:0.5")
        a = apply_symbol(sym, f.translate(17), 128)
        b = apply_symbol(sym, f, 128).translate(17)
        assert a == b

    def test_self_adjointness(self):
        rng = np.random.default_rng(6)
        f = random_seq(rng, 8)
        g = random_seq(rng, 8, offset=3)
        sym = make_symbol("heat:0.8")
        lhs = inner(apply_symbol(sym, f, 256), g)
        rhs = inner(f, apply_symbol(sym, g, 256))
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)

    def test_l2_contraction(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            f = random_seq(rng, int(rng.integers(2, 20)))
            sym = make_symbol("heat:2.0")
            assert lp_norm(apply_symbol(sym, f, 256), 2.0) <= lp_norm(f, 2.0) + 1e-10

    def test_tail_report(self):
        rng = np.random.default_rng(8)
        f = random_seq(rng, 5)
        out, tail = apply_symbol(make_symbol("heat:4.0"), f, 64, return_tail=True)
        assert 0.0 <= tail < 1e-6


class TestSymbolRegistry:
    def test_heat_and_power(self):
        assert make_symbol("heat:0.5").label == "heat:0.5"
        assert make_symbol("power:2")(np.array([1.5]))[0] == pytest.approx(2.25)

    def test_band_support(self):
        sym = make_symbol("band:-1")
        lam = np.array([0.9, 1.5, 4.1])
        vals = np.abs(sym(lam))
        assert vals[0] == 0.0 and vals[1] > 0 and vals[2] == 0.0

    def test_imagpower_unit_modulus_above_cut(self):
        sym = make_symbol("imagpower:4")
        lam = np.geomspace(0.25, 2.0, 50)
        assert np.allclose(np.abs(sym(lam)), 1.0, atol=1e-12)
        assert sym(np.array([0.0]))[0] == 0.0

    def test_custom_table(self, tmp_path):
        path = tmp_path / "tab.csv"
        path.write_text("0.0,1.0,0.0\n2.0,3.0,1.0\n")
        sym = make_symbol(f"custom:{path}")
        v = sym(np.array([1.0]))[0]
        assert v == pytest.approx(2.0 + 0.5j)

    def test_riesz_redirects(self):
        with pytest.raises(ValidationError):
            make_symbol("riesz")

    def test_unknown_spec(self):
        with pytest.raises(ValidationError):
            make_symbol("nope:1")

    def test_nonfinite_symbol_rejected(self):
        def inv(lam):
            with np.errstate(divide="ignore"):
                return 1.0 / lam

        rng = np.random.default_rng(9)
        with pytest.raises(ValidationError):
            apply_symbol(Symbol(inv, label="inv"), random_seq(rng, 4), 64)


class TestGridApplier:
    def test_matches_apply_symbol(self):
        rng = np.random.default_rng(10)
        f = random_seq(rng, 10, offset=-20)
        sym = make_symbol("heat:0.9")
        a = apply_symbol(sym, f, 100)
        b = GridApplier(f, 100).apply_symbol(sym)
        assert a == b
