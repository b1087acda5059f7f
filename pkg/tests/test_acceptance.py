"""Acceptance suite: one test per numbered criterion, each printing a
PASS/FAIL line with its measured quantities.  Tolerances are fixed here, not
configurable.  Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import json
import math
import statistics
import time
import warnings

import numpy as np
import pytest

import zharm
from zharm.cli import main as cli_main
from zharm.family import atom_family, band_limited_noise, default_family, mean_zero_family
from zharm.heat import decay_sweep, heat_kernel_row, heat_kernel_sequence
from zharm.lpaley import calderon_reconstruct, continuous_calderon, make_partition
from zharm.molec import coefficient_norm, decompose, verify_molecule
from zharm.multop import operator_norm_probe, riesz, sobolev_condition
from zharm.quadrature import TimeQuadrature
from zharm.seq import (
    delta,
    diff_forward,
    from_values,
    laplacian,
    lp_norm,
)
from zharm.spaces import (
    besov_norm,
    continuous_norm,
    gfun,
    hardy_norm,
    lusin,
    psi_field,
    tl_norm,
)
from zharm.spectral import apply_symbol, make_symbol

FAMILY_SEED = 20250809


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module")
def part():
    return make_partition(1.0)


@pytest.fixture(scope="module")
def family():
    return default_family(FAMILY_SEED, 20)


def test_c01_two_route_heat_kernel():
    t0 = time.perf_counter()
    worst = 0.0
    for t in (0.1, 1.0, 10.0):
        a = heat_kernel_row(t, 50, "bessel")
        b = heat_kernel_row(t, 50, "quadrature")
        worst = max(worst, float(np.max(np.abs(a - b))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5.0
    report(1, "two-route heat kernel", ok, f"max gap {worst:.3e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 5.0


def test_c02_mass_conservation():
    worst = 0.0
    for t in (0.1, 1.0, 10.0, 100.0):
        half = int(20 + 10 * math.sqrt(t))
        row = heat_kernel_row(t, half, "bessel")
        mass = row[0] + 2.0 * row[1:].sum()
        worst = max(worst, abs(mass - 1.0))
    ok = worst <= 1e-10
    report(2, "heat kernel mass", ok, f"max |mass-1| {worst:.3e}")
    assert ok


def test_c03_semigroup_law():
    worst = 0.0
    for s, t in ((0.5, 0.5), (0.1, 2.0)):
        hs = heat_kernel_sequence(s)
        ht = heat_kernel_sequence(t)
        conv = np.convolve(hs.values, ht.values)
        prod = zharm.Sequence(hs.offset + ht.offset, conv)
        hst = heat_kernel_sequence(s + t)
        lo, hi = hst.support
        gap = float(
            np.max(np.abs(prod.values_on(lo, hi) - hst.values_on(lo, hi)))
        )
        worst = max(worst, gap)
    ok = worst <= 1e-10
    report(3, "semigroup law", ok, f"max sup gap {worst:.3e}")
    assert ok


def test_c04_eigenrelation():
    worst = 0.0
    n = np.arange(-40, 41)
    for theta in (math.pi / 3, math.pi / 2, math.pi):
        e = from_values(-40, np.exp(1j * theta * n))
        le = laplacian(e)
        mu = 2.0 * (1.0 - math.cos(theta))
        for m in range(-30, 31):
            worst = max(worst, abs(le.at(m) - mu * e.at(m)))
    ok = worst <= 1e-12
    report(4, "eigenrelation", ok, f"max interior gap {worst:.3e}")
    assert ok


def test_c05_decay_sweeps():
    cases = (
        [("lem1-ht", {"N": n}) for n in (0, 1, 2)]
        + [("lem2-htk", {"ell": l}) for l in (1, 2)]
        + [("lem-htk-diff", {"ell": l}) for l in (1, 2)]
        + [("lem-htk-hdiff", {"k": 2, "ell": 1})]
        + [("lem1-htk", {"ell": 1, "N": 2, "alpha": a}) for a in (0.0, math.pi / 6, math.pi / 3)]
    )
    all_ok = True
    details = []
    for kind, params in cases:
        t0 = time.perf_counter()
        rep = decay_sweep(kind, params)  # default grids
        elapsed = time.perf_counter() - t0
        ok = rep.stable and elapsed < 60.0
        all_ok = all_ok and ok
        tag = ",".join(f"{k}={v:.3g}" for k, v in params.items())
        details.append(f"{kind}[{tag}] C={rep.constant:.3g} d={rep.refinement_delta:.2%} {elapsed:.1f}s")
    report(5, "decay sweeps stable", all_ok, "; ".join(details))
    assert all_ok


def test_c06_partition_of_unity(part):
    lam = np.geomspace(1e-6, 2.0, 200001)
    dev = float(np.max(np.abs(part.partial_sum(lam, -60) - 1.0)))
    ok = dev <= 1e-12
    report(6, "partition of unity", ok, f"max deviation {dev:.3e}")
    assert ok


def test_c07_calderon(part):
    rng = np.random.default_rng(31)
    band = band_limited_noise(-2, rng)
    _, res_band = calderon_reconstruct(part, band, -25)
    _, res_delta = calderon_reconstruct(part, delta(0), -25)
    disc, _ = calderon_reconstruct(part, band, -25)
    cont = continuous_calderon(part, band, -25)
    lo = min(disc.support[0], cont.support[0])
    hi = max(disc.support[1], cont.support[1])
    gap = float(np.linalg.norm(disc.values_on(lo, hi) - cont.values_on(lo, hi)))
    gap /= lp_norm(band, 2.0)
    ok = res_band <= 1e-10 and res_delta <= 1e-6 and gap <= 1e-8
    report(
        7,
        "calderon reconstruction",
        ok,
        f"band {res_band:.2e}, unit-sample {res_delta:.2e}, cont-vs-disc {gap:.2e}",
    )
    assert res_band <= 1e-10
    assert res_delta <= 1e-6
    assert gap <= 1e-8


def test_c08_riesz():
    rng = np.random.default_rng(32)
    iso_worst = 0.0
    for _ in range(3):
        f = diff_forward(from_values(int(rng.integers(-5, 5)), rng.standard_normal(9)))
        y = riesz(f, "forward", "symbol", out_halfwidth=2048)
        iso_worst = max(iso_worst, abs(lp_norm(y, 2.0) - lp_norm(f, 2.0)))
    band = diff_forward(band_limited_noise(-2, rng))
    ys = riesz(band, "forward", "symbol")
    yq = riesz(band, "forward", "subordination")
    lo = min(ys.support[0], yq.support[0])
    hi = max(ys.support[1], yq.support[1])
    cross = float(np.linalg.norm(ys.values_on(lo, hi) - yq.values_on(lo, hi))) / lp_norm(ys, 2.0)
    f = from_values(0, rng.standard_normal(9))
    energy = abs(
        lp_norm(diff_forward(f), 2.0)
        - lp_norm(apply_symbol(make_symbol("power:1"), f, 4096), 2.0)
    )
    ok = iso_worst <= 1e-9 and cross <= 1e-6 and energy <= 1e-10
    report(
        8,
        "riesz transform",
        ok,
        f"isometry {iso_worst:.2e}, cross-route {cross:.2e}, energy identity {energy:.2e}",
    )
    assert iso_worst <= 1e-9
    assert cross <= 1e-6
    assert energy <= 1e-10


def _norm_quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kwargs)


def test_c09_norm_equivalence_harnesses(part, family):
    # (a) partition independence
    t0 = time.perf_counter()
    other = make_partition(2.5)
    ratios_a = []
    for f in family:
        for fn, cfg in ((besov_norm, (0.0, 2.0, 2.0)), (tl_norm, (0.0, 1.0, 2.0))):
            x = _norm_quiet(fn, part, f, *cfg)
            y = _norm_quiet(fn, other, f, *cfg)
            if x > 0 and y > 0:
                ratios_a.append(x / y)
    ta = time.perf_counter() - t0
    ok_a = all(0.1 <= r <= 10.0 for r in ratios_a) and ta < 120.0

    # (b) continuous vs discrete at alpha=0, p=q=2
    t0 = time.perf_counter()
    quad = TimeQuadrature.make(1.0, 2.0**26, 12)
    ratios_b = []
    for f in family:
        d = _norm_quiet(besov_norm, part, f, 0.0, 2.0, 2.0)
        c = _norm_quiet(continuous_norm, part, f, 0.0, 2.0, 2.0, quad=quad, flavor="besov")
        if d > 0 and c > 0:
            ratios_b.append(c / d)
        d = _norm_quiet(tl_norm, part, f, 0.0, 2.0, 2.0)
        c = _norm_quiet(continuous_norm, part, f, 0.0, 2.0, 2.0, quad=quad, flavor="tl")
        if d > 0 and c > 0:
            ratios_b.append(c / d)
    tb = time.perf_counter() - t0
    ok_b = all(1.0 / 8.0 <= r <= 8.0 for r in ratios_b) and tb < 120.0

    # (c) grand functional vs cone functional in l^p
    t0 = time.perf_counter()
    quad_c = TimeQuadrature.make(1.0, 2.0**16, 8)
    ratios_c = []
    for alpha, p, q in ((0.0, 2.0, 2.0), (0.0, 1.0, 2.0), (1.0, 2.0, 2.0)):
        lam_exp = 2.0 / min(p, q) + 1.0
        for f in family:
            field = psi_field(part, f, pad=512)
            a, b = f.support
            window = (a - 256, b + 256)
            g = gfun(field, alpha, lam_exp, q, quad_c, out_window=window)
            l = lusin(field, alpha, 1.0, q, quad_c, out_window=window)
            gn, ln = lp_norm(g, p), lp_norm(l, p)
            if gn > 0 and ln > 0:
                ratios_c.append(gn / ln)
    tc = time.perf_counter() - t0
    ok_c = all(0.1 <= r <= 10.0 for r in ratios_c) and tc < 120.0

    ok = ok_a and ok_b and ok_c
    report(
        9,
        "norm equivalence harnesses",
        ok,
        f"partition [{min(ratios_a):.2f},{max(ratios_a):.2f}] {ta:.0f}s; "
        f"cont/disc [{min(ratios_b):.2f},{max(ratios_b):.2f}] {tb:.0f}s; "
        f"grand/cone [{min(ratios_c):.2f},{max(ratios_c):.2f}] {tc:.0f}s",
    )
    assert ok_a
    assert ok_b
    assert ok_c


def test_c10_frame_identity(part, family):
    lam = np.geomspace(1e-6, 2.0, 60000)
    s2 = np.zeros_like(lam)
    for j in range(-25, 1):
        s2 += part.psi(np.ldexp(lam, -j)) ** 2
    a_frame, b_frame = float(s2.min()), float(s2.max())
    violations = 0
    for f in family:
        v = _norm_quiet(besov_norm, part, f, 0.0, 2.0, 2.0) ** 2
        n2 = lp_norm(f, 2.0) ** 2
        if not (a_frame * n2 * (1 - 1e-9) <= v <= b_frame * n2 * (1 + 1e-9)):
            violations += 1
    ok = violations == 0
    report(
        10,
        "frame identity",
        ok,
        f"A={a_frame:.4f}, B={b_frame:.4f}, violations {violations}/{len(family)}",
    )
    assert ok


def test_c11_molecular_decomposition(part, family):
    # reconstruction at defaults on band-limited inputs
    rng = np.random.default_rng(5)
    recon_worst = 0.0
    for j in (-1, -2, -3, -4, -5):
        f = band_limited_noise(j, rng)
        dec = decompose(part, f)
        err = lp_norm(dec.reconstruct() - f, 2.0) / lp_norm(f, 2.0)
        recon_worst = max(recon_worst, err)
    ok_recon = recon_worst <= 1e-6

    # per-signal molecule-constant caps across the interior-band population
    caps = []
    for seed in (5, 7):
        rng = np.random.default_rng(seed)
        for j in (-2, -3, -4, -5):
            f = band_limited_noise(j, rng)
            dec = decompose(part, f)
            caps.append(max(verify_molecule(m, "besov").constant for _, _, m in dec.terms))
    med = statistics.median(caps)
    ok_caps = all(0.9 * med <= c <= 1.1 * med for c in caps)

    # coefficient-norm vs block-norm constants, stable under family doubling
    def two_sided(signals):
        c_fwd = 0.0
        c_bwd = 0.0
        for f in signals:
            dec = decompose(part, f, j_min=-12)
            if not dec.terms:
                continue
            bn = _norm_quiet(besov_norm, part, f, 0.0, 2.0, 2.0, j_min=-12)
            cn = coefficient_norm(dec, 0.0, 2.0, 2.0, "besov")
            rec_bn = _norm_quiet(besov_norm, part, dec.reconstruct(), 0.0, 2.0, 2.0, j_min=-12)
            if bn > 0 and cn > 0:
                c_fwd = max(c_fwd, cn / bn)
                c_bwd = max(c_bwd, rec_bn / cn)
        return c_fwd, c_bwd

    fwd20, bwd20 = two_sided(family)
    fam40 = default_family(FAMILY_SEED, 40)
    fwd40, bwd40 = two_sided(fam40)
    ok_stable = fwd40 <= 1.2 * fwd20 and bwd40 <= 1.2 * bwd20
    ok = ok_recon and ok_caps and ok_stable
    report(
        11,
        "molecular decomposition",
        ok,
        f"recon {recon_worst:.2e}; caps spread [{min(caps)/med:.3f},{max(caps)/med:.3f}]; "
        f"two-sided ({fwd20:.2f}->{fwd40:.2f}, {bwd20:.2f}->{bwd40:.2f})",
    )
    assert ok_recon
    assert ok_caps
    assert ok_stable


def test_c12_hardy_atoms():
    quad = TimeQuadrature.make(2.0**-6, 2.0**16, 12)
    atoms = atom_family(count=50, lengths=(4, 16, 64), p=1.0, moments=0, seed=FAMILY_SEED)
    norms = [hardy_norm(a, 1.0, variant="area-2", quad=quad, pad=1024) for a in atoms]
    ratio = max(norms) / statistics.median(norms)
    ok = ratio <= 3.0
    report(12, "hardy atoms uniformly bounded", ok, f"max/median {ratio:.3f} over {len(norms)} atoms")
    assert ok


def test_c13_multiplier_desk_check(part):
    sizes = (1.0, 2.0, 4.0, 8.0)
    fam = mean_zero_family(FAMILY_SEED, 12)
    norm_fn = lambda f: _norm_quiet(tl_norm, part, f, 0.0, 1.0, 2.0)
    values = []
    sups = []
    for s in sizes:
        sym = make_symbol(f"imagpower:{s:g}")
        probe = operator_norm_probe(
            lambda f, sym=sym: apply_symbol(sym, f, out_halfwidth=2048), norm_fn, fam
        )
        values.append(probe.value)
        sups.append(sobolev_condition(sym, 1.0, math.inf).sup)
    slope = float(np.polyfit(np.log(sizes), np.log(values), 1)[0])
    finite = all(math.isfinite(v) for v in sups)
    ok = slope <= 1.5 and finite
    report(
        13,
        "imaginary-power multipliers",
        ok,
        f"H1-norm slope {slope:.3f}, condition sups {['%.3g' % v for v in sups]}",
    )
    assert slope <= 1.5
    assert finite


def test_c14_weighted_kernel_uniformity():
    from zharm.multop import weighted_kernel_check
    from zharm.spectral import Symbol

    def bump(lo, hi):
        def fn(lam):
            lam = np.asarray(lam, dtype=float)
            x = (lam - lo) / (hi - lo)
            out = np.zeros_like(x)
            mid = (x > 0) & (x < 1)
            out[mid] = np.exp(-1.0 / (x[mid] * (1 - x[mid])))
            return out

        return Symbol(fn, label="bump", support=(lo, hi))

    base = None
    worst = 0.0
    for r_top in (2.0, 1.0, 0.5, 0.25):
        rep = weighted_kernel_check(bump(r_top / 2, r_top), r_top, s=1.0, q=math.inf)
        if base is None:
            base = rep
        worst = max(
            worst,
            rep.ratio_square / base.ratio_square,
            base.ratio_square / rep.ratio_square,
            rep.ratio_pointwise / base.ratio_pointwise,
            base.ratio_pointwise / rep.ratio_pointwise,
        )
    ok = worst <= 3.0
    report(14, "weighted kernel bounds uniform in R", ok, f"max deviation factor {worst:.3f}")
    assert ok


def test_c15_cli_determinism(tmp_path, capsys):
    rng = np.random.default_rng(17)
    f = diff_forward(from_values(0, rng.standard_normal(9)))
    src = tmp_path / "f.json"
    f.dump(src)

    def run_once(tag):
        sweep_csv = tmp_path / f"s{tag}.csv"
        riesz_out = tmp_path / f"r{tag}.json"
        outputs = []
        for argv in (
            ["--seed", "7", "sweep", "--kind", "lem1-ht", "--N", "1", "--tsteps", "12",
             "--nmax", "50", "--csv", str(sweep_csv)],
            ["--seed", "7", "riesz", "--route", "symbol", "--in", str(src), "--out", str(riesz_out)],
            ["--seed", "7", "probe", "--op", "identity", "--space", "l2", "--family",
             "meanzero", "--size", "6"],
        ):
            code = cli_main(argv)
            assert code == 0
            outputs.append(capsys.readouterr().out)
        return sweep_csv.read_bytes(), riesz_out.read_bytes(), "".join(outputs)

    first = run_once("a")
    second = run_once("b")
    ok = first == second
    report(15, "CLI determinism", ok, "byte-identical reruns" if ok else "outputs differ")
    assert ok
