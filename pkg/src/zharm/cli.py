"""Command-line front end.

Every subcommand prints a one-line JSON summary on stdout and optionally
writes JSON/CSV files.  All randomness flows from ``--seed``; with a fixed
seed and configuration, outputs are byte-identical across runs.  Exit status:
0 on success, 2 on a validation problem, 3 on an internal-consistency failure
(two independent routes disagreeing).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import family as family_mod
from . import heat, lpaley, molec, multop, spaces
from .exceptions import ConsistencyError, ValidationError
from .quadrature import TimeQuadrature
from .seq import Sequence, lp_norm
from .spectral import Symbol, make_symbol

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Shared run parameters; validated once at startup."""

    window_halfwidth: int = 4096
    fft_size: int = 16384
    j_min: int = -25
    points_per_octave: int = 16
    seed: int = 0
    threads: int | None = None

    def validate(self) -> None:
        k = self.fft_size
        if k < 2 or (k & (k - 1)) != 0:
            raise ValidationError("fft size must be a power of two")
        if self.window_halfwidth > k // 2 - 1:
            raise ValidationError("window half-width must be at most fft_size/2 - 1")
        if self.j_min > 0:
            raise ValidationError("j_min must be nonpositive")


def _emit(summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    return f"{float(x):.17g}"


def _float_or_inf(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _load_sequence(path: str) -> Sequence:
    try:
        return Sequence.load(path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ValidationError(f"cannot read sequence file {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_kernel(args, cfg: RunConfig) -> dict:
    if args.t <= 0:
        raise ValidationError("t must be positive")
    n = np.arange(0, args.nmax + 1)
    rows = {}
    if args.route in ("bessel", "both"):
        rows["bessel"] = heat.heat_kernel_row(args.t, args.nmax, "bessel")
    if args.route in ("quadrature", "both"):
        rows["quadrature"] = heat.heat_kernel_row(args.t, args.nmax, "quadrature")
    gap = None
    if args.route == "both":
        gap = float(np.max(np.abs(rows["bessel"] - rows["quadrature"])))
        if gap > 1e-10:
            raise ConsistencyError(f"kernel routes disagree by {gap:.3e}")
    if args.out:
        payload = {"t": args.t, "n": [int(v) for v in n]}
        payload.update({k: [float(x) for x in v] for k, v in rows.items()})
        if gap is not None:
            payload["max_route_gap"] = gap
        _write_json(args.out, payload)
    summary = {"command": "kernel", "t": args.t, "nmax": args.nmax, "route": args.route}
    if gap is not None:
        summary["max_route_gap"] = gap
    first = rows.get("bessel", rows.get("quadrature"))
    summary["value_at_0"] = float(first[0])
    return summary


def _cmd_apply(args, cfg: RunConfig) -> dict:
    f = _load_sequence(args.infile)
    sym = make_symbol(args.symbol)
    out, tail = multop.apply_multiplier(
        sym, f, out_halfwidth=args.halfwidth or cfg.window_halfwidth, return_tail=True
    )
    if args.out:
        out.dump(args.out)
    return {
        "command": "apply",
        "symbol": sym.label,
        "l2_in": lp_norm(f, 2.0),
        "l2_out": lp_norm(out, 2.0),
        "tail_estimate": tail,
    }


def _norm_value(args, cfg: RunConfig, f: Sequence, part, pad: int):
    if args.space == "besov":
        return spaces.besov_norm(part, f, args.alpha, args.p, args.q, cfg.j_min, pad=pad)
    if args.space == "tl":
        return spaces.tl_norm(part, f, args.alpha, args.p, args.q, cfg.j_min, pad=pad)
    if args.space == "besov-cont":
        return spaces.continuous_norm(part, f, args.alpha, args.p, args.q, flavor="besov", pad=pad)
    if args.space == "tl-cont":
        return spaces.continuous_norm(part, f, args.alpha, args.p, args.q, flavor="tl", pad=pad)
    if args.space == "hardy":
        return spaces.hardy_norm(f, args.p, variant=args.variant, part=part, pad=pad)
    raise ValidationError(f"unknown space {args.space!r}")


def _cmd_norm(args, cfg: RunConfig) -> dict:
    f = _load_sequence(args.infile)
    part = lpaley.make_partition(args.steepness)
    tail_warning = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = _norm_value(args, cfg, f, part, pad=args.pad)
        for w in caught:
            tail_warning = str(w.message)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        refined = _norm_value(args, cfg, f, part, pad=2 * args.pad)
    delta = abs(refined - value) / value if value > 0 else 0.0
    return {
        "command": "norm",
        "space": args.space,
        "alpha": args.alpha,
        "p": args.p,
        "q": None if math.isinf(args.q) else args.q,
        "value": value,
        "tail_warning": tail_warning,
        "refinement_delta": delta,
    }


def _cmd_sweep(args, cfg: RunConfig) -> dict:
    params = {}
    if args.N is not None:
        params["N"] = args.N
    if args.ell is not None:
        params["ell"] = args.ell
    if args.k is not None:
        params["k"] = args.k
    if args.arg is not None:
        params["alpha"] = args.arg
    report = heat.decay_sweep(
        args.kind,
        params,
        t_min=args.tmin,
        t_max=args.tmax,
        t_steps=args.tsteps,
        nmax=args.nmax,
    )
    if args.csv:
        rows = []
        half = args.nmax
        for i, t in enumerate(report.t_values):
            for n_abs in range(half + 1):
                ratio = report.ratios[i, n_abs]
                if not np.isfinite(ratio):
                    continue
                bound = 1.0  # ratio already normalized; emit quantity via ratio * shape
                rows.append((t, n_abs, ratio))
        _write_csv(args.csv, ["t", "n", "ratio"], rows)
    summary = {"command": "sweep"}
    summary.update(report.summary())
    return summary


def _cmd_calderon(args, cfg: RunConfig) -> dict:
    f = _load_sequence(args.infile)
    part = lpaley.make_partition(args.steepness)
    curve = []
    for j in range(-1, args.jmin - 1, -1):
        _, res = lpaley.calderon_reconstruct(part, f, j)
        curve.append((j, res))
    if args.csv:
        _write_csv(args.csv, ["jmin", "residual"], curve)
    _, residual = lpaley.calderon_reconstruct(part, f, args.jmin)
    return {
        "command": "calderon",
        "jmin": args.jmin,
        "residual": residual,
        "c_norm": part.c_norm,
    }


def _cmd_decompose(args, cfg: RunConfig) -> dict:
    f = _load_sequence(args.infile)
    part = lpaley.make_partition(args.steepness)
    dec = molec.decompose(part, f, m_order=args.M, p=args.p, j_min=args.jmin)
    rec = dec.reconstruct()
    err = lp_norm(rec - f, 2.0) / lp_norm(f, 2.0) if not f.is_zero else 0.0
    if args.out:
        payload = {
            "c": dec.c_norm,
            "M": dec.m_order,
            "p": dec.p,
            "j_min": dec.j_min,
            "decay": dec.terms[0][2].decay if dec.terms else None,
            "terms": [
                {
                    "nu": interval.nu,
                    "k": interval.k,
                    "s": float(s),
                    "b": mol.b.to_json_dict(),
                }
                for interval, s, mol in dec.terms
            ],
        }
        _write_json(args.out, payload)
    return {
        "command": "decompose",
        "terms": len(dec.terms),
        "dropped_mass": dec.dropped_mass,
        "reconstruction_error": err,
    }


def _load_decomposition(path: str) -> list[tuple[molec.DyadicInterval, float, molec.Molecule]]:
    with open(path) as fh:
        payload = json.load(fh)
    terms = []
    decay = payload.get("decay") or 2.0
    for item in payload["terms"]:
        interval = molec.DyadicInterval(int(item["nu"]), int(item["k"]))
        mol = molec.Molecule(
            interval,
            int(payload["M"]),
            float(payload["p"]),
            float(decay),
            Sequence.from_json_dict(item["b"]),
        )
        terms.append((interval, float(item["s"]), mol))
    return terms


def _cmd_verify(args, cfg: RunConfig) -> dict:
    terms = _load_decomposition(args.infile)
    rows = []
    constants = []
    for interval, s, mol in terms:
        rep = molec.verify_molecule(mol, args.flavor)
        rows.append((interval.nu, interval.k, s, rep.constant))
        constants.append(rep.constant)
    if args.csv:
        _write_csv(args.csv, ["nu", "k", "s", "constant"], rows)
    arr = np.asarray(constants) if constants else np.zeros(1)
    return {
        "command": "verify",
        "flavor": args.flavor,
        "count": len(constants),
        "max_constant": float(arr.max()),
        "median_constant": float(np.median(arr)),
    }


def _cmd_riesz(args, cfg: RunConfig) -> dict:
    f = _load_sequence(args.infile)
    summary = {"command": "riesz", "variant": args.variant, "route": args.route}
    if args.route == "both":
        ys = multop.riesz(f, args.variant, "symbol", out_halfwidth=cfg.window_halfwidth)
        yq = multop.riesz(f, args.variant, "subordination")
        lo = min(ys.support[0], yq.support[0])
        hi = max(ys.support[1], yq.support[1])
        gap = float(np.linalg.norm(ys.values_on(lo, hi) - yq.values_on(lo, hi)))
        rel = gap / max(lp_norm(ys, 2.0), 1e-300)
        summary["discrepancy"] = rel
        if args.out:
            _write_json(
                args.out,
                {
                    "symbol": ys.to_json_dict(),
                    "subordination": yq.to_json_dict(),
                    "discrepancy": rel,
                },
            )
        if rel > 1e-6:
            raise ConsistencyError(f"riesz routes disagree by {rel:.3e}")
    else:
        y = multop.riesz(f, args.variant, args.route, out_halfwidth=cfg.window_halfwidth)
        summary["l2_out"] = lp_norm(y, 2.0)
        if args.out:
            y.dump(args.out)
    return summary


def _cmd_multiplier(args, cfg: RunConfig) -> dict:
    sym = make_symbol(args.symbol)
    summary: dict = {"command": "multiplier", "symbol": sym.label}
    if args.infile:
        f = _load_sequence(args.infile)
        out = multop.apply_multiplier(sym, f, out_halfwidth=cfg.window_halfwidth)
        if args.out:
            out.dump(args.out)
        summary["l2_out"] = lp_norm(out, 2.0)
    if args.check_condition:
        cond = multop.sobolev_condition(sym, args.s, args.r)
        summary["condition"] = cond.summary()
    return summary


def _probe_norm(space_spec: str, part):
    parts = space_spec.split(":")
    name = parts[0]
    if name in ("tl", "besov"):
        alpha, p, q = (float(x) for x in parts[1:4])
        if name == "tl":
            return lambda f: spaces.tl_norm(part, f, alpha, p, q)
        return lambda f: spaces.besov_norm(part, f, alpha, p, q)
    if name == "hardy":
        p = float(parts[1])
        return lambda f: spaces.hardy_norm(f, p)
    if name == "l2":
        return lambda f: lp_norm(f, 2.0)
    raise ValidationError(f"unknown space spec {space_spec!r}")


def _probe_op(op_spec: str, cfg: RunConfig):
    if op_spec == "identity":
        return lambda f: f
    if op_spec == "riesz":
        return lambda f: multop.riesz(f, "forward", "symbol", out_halfwidth=cfg.window_halfwidth)
    if op_spec.startswith("multiplier:"):
        sym = make_symbol(op_spec.split(":", 1)[1])
        return lambda f: multop.apply_multiplier(sym, f, out_halfwidth=cfg.window_halfwidth)
    raise ValidationError(f"unknown probe operator {op_spec!r}")


def _cmd_probe(args, cfg: RunConfig) -> dict:
    part = lpaley.make_partition(args.steepness)
    if args.family == "default":
        fam = family_mod.default_family(cfg.seed or 20250809, args.size)
    elif args.family == "meanzero":
        fam = family_mod.mean_zero_family(cfg.seed or 20250809, args.size)
    else:
        raise ValidationError(f"unknown family {args.family!r}")
    op = _probe_op(args.op, cfg)
    norm_fn = _probe_norm(args.space, part)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = multop.operator_norm_probe(op, norm_fn, fam)
    return {
        "command": "probe",
        "op": args.op,
        "space": args.space,
        "family": args.family,
        "empirical_norm": result.value,
        "family_size": len(result.ratios),
    }


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zharm",
        description="Numerical harmonic analysis on the integer lattice.",
    )
    parser.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    parser.add_argument("--fft-size", type=int, default=16384)
    parser.add_argument("--window", type=int, default=4096, help="output window half-width")
    parser.add_argument("--jmin-default", type=int, default=-25)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="heat kernel values by one or both routes")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--route", choices=["bessel", "quadrature", "both"], default="both")
    p.add_argument("--out", help="write values as JSON")

    p = sub.add_parser("apply", help="apply a registered spectral symbol to a sequence")
    p.add_argument("--symbol", required=True, help="heat:t | power:k | band:j | imagpower:s | custom:file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.add_argument("--halfwidth", type=int)

    p = sub.add_parser("norm", help="smoothness-space norms")
    p.add_argument("--space", required=True, choices=["besov", "tl", "besov-cont", "tl-cont", "hardy"])
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=_float_or_inf, default=2.0)
    p.add_argument("--variant", default="area-2", help="hardy variant: area-N or psi")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--pad", type=int, default=1024)
    p.add_argument("--steepness", type=float, default=1.0)

    p = sub.add_parser("sweep", help="kernel decay-ratio sweeps")
    p.add_argument("--kind", required=True, choices=sorted(heat.SWEEP_KINDS))
    p.add_argument("--N", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--arg", type=float, help="argument of the complex time (radians)")
    p.add_argument("--tmin", type=float, default=1e-2)
    p.add_argument("--tmax", type=float, default=1e2)
    p.add_argument("--tsteps", type=int, default=64)
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--csv")

    p = sub.add_parser("calderon", help="dyadic reconstruction residual curve")
    p.add_argument("--jmin", type=int, default=-25)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--csv")
    p.add_argument("--steepness", type=float, default=1.0)

    p = sub.add_parser("decompose", help="molecular decomposition to a coefficient file")
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--jmin", type=int, default=-25)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.add_argument("--steepness", type=float, default=1.0)

    p = sub.add_parser("verify", help="molecule size-bound constants from a coefficient file")
    p.add_argument("--flavor", choices=["hardy", "besov", "diff"], default="besov")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--csv")

    p = sub.add_parser("riesz", help="Riesz transform by one or both routes")
    p.add_argument("--variant", choices=["forward", "backward"], default="forward")
    p.add_argument("--route", choices=["symbol", "subordination", "both"], default="both")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")

    p = sub.add_parser("multiplier", help="apply a multiplier and/or check its condition")
    p.add_argument("--symbol", required=True)
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.add_argument("--check-condition", action="store_true")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--r", type=_float_or_inf, default=math.inf)

    p = sub.add_parser("probe", help="empirical operator norm over a seeded family")
    p.add_argument("--op", required=True, help="identity | riesz | multiplier:SPEC")
    p.add_argument("--space", required=True, help="tl:a:p:q | besov:a:p:q | hardy:p | l2")
    p.add_argument("--family", default="default", choices=["default", "meanzero"])
    p.add_argument("--size", type=int, default=20)
    p.add_argument("--steepness", type=float, default=1.0)

    return parser


_COMMANDS = {
    "kernel": _cmd_kernel,
    "apply": _cmd_apply,
    "norm": _cmd_norm,
    "sweep": _cmd_sweep,
    "calderon": _cmd_calderon,
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "riesz": _cmd_riesz,
    "multiplier": _cmd_multiplier,
    "probe": _cmd_probe,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    threads = os.environ.get("ZHARM_THREADS")
    cfg = RunConfig(
        window_halfwidth=args.window,
        fft_size=args.fft_size,
        j_min=args.jmin_default,
        seed=args.seed,
        threads=int(threads) if threads else None,
    )
    try:
        cfg.validate()
        summary = _COMMANDS[args.command](args, cfg)
    except ValidationError as exc:
        print(json.dumps({"error": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(json.dumps({"error": str(exc), "kind": "consistency"}, sort_keys=True), file=sys.stderr)
        return 3
    _emit(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
