"""Batch command-line front end: every analysis and simulation as a
subcommand emitting plot-ready CSV or JSON plus a run manifest.

Exit codes: 0 success, 2 usage errors (argparse), 3 unreadable or invalid
distribution, 4 parameter-domain violations.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotic as asy
from . import finite_length as fl
from .codec import sample_code, save_instance
from .degrees import DegreeDistribution, builtin_names, load as load_dist, render
from .montecarlo import SimConfig, simulate_ensemble
from .spectrum import EnsembleParams, weight_spectrum

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIST = 3
EXIT_DOMAIN = 4

_OUTDIR_ENV = "RAPTORSPEC_OUTDIR"


def _out_path(raw: str) -> Path:
    p = Path(raw)
    outdir = os.environ.get(_OUTDIR_ENV)
    if outdir and not p.is_absolute():
        p = Path(outdir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class _Run:
    """Collects resolved parameters and writes output files with a
    manifest sitting beside each of them."""

    def __init__(self, subcommand: str, dist: DegreeDistribution | None):
        self.subcommand = subcommand
        self.dist = dist
        self.params: dict = {}
        self.seed: int | None = None
        self.started = _now()

    def fingerprint(self) -> str | None:
        if self.dist is None:
            return None
        return hashlib.sha256(render(self.dist).encode("utf-8")).hexdigest()

    def emit(self, text: str, out: str | None) -> None:
        if out is None:
            sys.stdout.write(text)
            return
        path = _out_path(out)
        path.write_text(text, encoding="utf-8")
        manifest = {
            "subcommand": self.subcommand,
            "params": self.params,
            "dist_name": None if self.dist is None else self.dist.name,
            "dist_fingerprint": self.fingerprint(),
            "seed": self.seed,
            "version": __version__,
            "started": self.started,
            "finished": _now(),
            "output": path.name,
        }
        Path(str(path) + ".manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )


def _add_dist(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--dist",
        required=True,
        help=f"built-in distribution ({', '.join(builtin_names())}) or a file path",
    )


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True, help="source symbols")
    p.add_argument("--h", type=int, help="intermediate symbols")
    p.add_argument("--n", type=int, help="output symbols")
    p.add_argument("--rate", type=float, help="overall rate r (with --ro instead of --h/--n)")
    p.add_argument("--ro", type=float, help="outer code rate r_o")


def _resolve_params(args) -> EnsembleParams:
    if args.h is not None and args.n is not None:
        return EnsembleParams(args.k, args.h, args.n)
    if args.rate is not None and args.ro is not None:
        # deterministic rounding: h from the outer rate, n from the inner
        h = round(args.k / args.ro)
        r_i = args.rate / args.ro
        n = round(h / r_i)
        return EnsembleParams(args.k, h, n)
    raise ValueError("give either --h and --n, or --rate and --ro")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="raptorspec",
        description="Distance spectra, rate regions, and BEC simulation "
        "for fixed-rate Raptor code ensembles.",
    )
    ap.add_argument("--version", action="version", version=f"raptorspec {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("spectrum", help="finite-length average weight enumerator")
    _add_dist(p)
    _add_ensemble(p)
    _add_format(p)

    p = sub.add_parser("growth", help="asymptotic growth rate curve")
    _add_dist(p)
    p.add_argument("--ri", type=float, required=True)
    p.add_argument("--ro", type=float, required=True)
    p.add_argument("--delta-min", type=float, default=1e-4)
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    _add_format(p)

    p = sub.add_parser("delta-star", help="normalized typical minimum distance")
    _add_dist(p)
    p.add_argument("--ri", type=float, required=True)
    p.add_argument("--ro", type=float, required=True)
    _add_format(p)

    p = sub.add_parser("region", help="positive-growth region boundary and outer bound")
    _add_dist(p)
    p.add_argument("--kind", choices=("p", "o", "both"), default="both")
    p.add_argument("--ro-min", type=float, default=0.1)
    p.add_argument("--ro-max", type=float, default=0.99)
    p.add_argument("--points", type=int, default=45)
    _add_format(p)

    p = sub.add_parser("dmin", help="typical minimum distance sweep over n")
    _add_dist(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--n", type=int, help="single block length")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n-step", type=int, default=1)
    _add_format(p)

    p = sub.add_parser("cer-bound", help="BEC codeword error rate upper bound")
    _add_dist(p)
    _add_ensemble(p)
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    p.add_argument("--points", type=int, default=30)
    p.add_argument(
        "--expurgate-d", type=int, help="bound the expurgated ensemble at this d*"
    )
    _add_format(p)

    p = sub.add_parser("expurgate", help="expurgated-ensemble spectrum report")
    _add_dist(p)
    _add_ensemble(p)
    p.add_argument("--d-star", type=int, required=True)
    _add_format(p)

    p = sub.add_parser("simulate", help="Monte Carlo ensemble simulation")
    _add_dist(p)
    _add_ensemble(p)
    p.add_argument("--eps", help="comma-separated erasure probabilities")
    p.add_argument("--eps-min", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--eps-points", type=int, default=6)
    p.add_argument("--codes", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--target-errors", type=int, default=40)
    p.add_argument("--max-words", type=int, default=100_000)
    p.add_argument("--threads", type=int, default=None, help="default: all cores")
    p.add_argument("--pooled", action="store_true", help="pool words in the aggregate CSV")
    p.add_argument("--per-code", action="store_true", help="also write per-code CSV")
    _add_format(p)

    p = sub.add_parser("sample-code", help="draw and serialize one code instance")
    _add_dist(p)
    _add_ensemble(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="instance file (binary + JSON sidecar)")

    return ap


def _pick_seed(args, run: _Run) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0] >> 1)
    run.seed = int(seed)
    return run.seed


def _cmd_spectrum(args, run: _Run) -> None:
    params = _resolve_params(args)
    run.params = {"k": params.k, "h": params.h, "n": params.n}
    sp = weight_spectrum(run.dist, params)
    if args.format == "csv":
        run.emit(sp.to_csv(), args.out)
    else:
        doc = {
            "params": run.params,
            "a0_excess": sp.a0_excess,
            "log2_a": [None if math.isinf(v) else float(v) for v in sp.log2_a],
        }
        run.emit(json.dumps(doc, indent=2) + "\n", args.out)


def _cmd_growth(args, run: _Run) -> None:
    pair = asy.RatePair(args.ri, args.ro)
    if not 0.0 < args.delta_min < args.delta_max < 1.0:
        raise ValueError("need 0 < delta-min < delta-max < 1")
    run.params = {
        "r_i": args.ri,
        "r_o": args.ro,
        "delta_min": args.delta_min,
        "delta_max": args.delta_max,
        "points": args.points,
    }
    deltas = np.linspace(args.delta_min, args.delta_max, args.points)
    pts = [asy.growth_rate(run.dist, pair, float(d)) for d in deltas]
    if args.format == "csv":
        lines = ["delta,G,lambda0,Gprime"]
        for p in pts:
            lines.append(f"{p.delta!r},{p.g!r},{p.lambda_0!r},{p.g_prime!r}")
        run.emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "params": run.params,
            "points": [
                {
                    "delta": p.delta,
                    "G": p.g,
                    "lambda0": p.lambda_0,
                    "Gprime": p.g_prime,
                    "lambda_at_edge": p.lambda_at_edge,
                }
                for p in pts
            ],
        }
        run.emit(json.dumps(doc, indent=2) + "\n", args.out)


def _cmd_delta_star(args, run: _Run) -> None:
    pair = asy.RatePair(args.ri, args.ro)
    run.params = {"r_i": args.ri, "r_o": args.ro}
    ds = asy.delta_star(run.dist, pair)
    if args.format == "csv":
        run.emit(f"r_i,r_o,delta_star\n{args.ri!r},{args.ro!r},{ds!r}\n", args.out)
    else:
        run.emit(json.dumps({"params": run.params, "delta_star": ds}, indent=2) + "\n", args.out)


def _region_text(boundary: asy.RegionBoundary, fmt: str) -> str:
    if fmt == "csv":
        lines = ["r_o,r_i_boundary"]
        for r_o, r_i in boundary.samples:
            lines.append(f"{r_o!r},{r_i!r}")
        return "\n".join(lines) + "\n"
    return (
        json.dumps(
            {
                "kind": boundary.kind,
                "samples": [list(s) for s in boundary.samples],
                "warnings": list(boundary.warnings),
            },
            indent=2,
        )
        + "\n"
    )


def _cmd_region(args, run: _Run) -> None:
    if not 0.0 < args.ro_min < args.ro_max < 1.0:
        raise ValueError("need 0 < ro-min < ro-max < 1")
    run.params = {
        "kind": args.kind,
        "ro_min": args.ro_min,
        "ro_max": args.ro_max,
        "points": args.points,
    }
    grid = np.linspace(args.ro_min, args.ro_max, args.points)
    outputs = []
    if args.kind in ("p", "both"):
        outputs.append(asy.region_boundary_p(run.dist, grid))
    if args.kind in ("o", "both"):
        outputs.append(asy.outer_bound(run.dist.average_degree(), grid))
    if len(outputs) == 1 or args.out is None:
        for b in outputs:
            run.emit(_region_text(b, args.format), args.out)
        return
    base = Path(args.out)
    for b in outputs:
        out = str(base.with_name(f"{base.stem}_{b.kind.lower()}{base.suffix}"))
        run.emit(_region_text(b, args.format), out)


def _cmd_dmin(args, run: _Run) -> None:
    if args.n is not None:
        ns = [args.n]
    elif args.n_min is not None and args.n_max is not None:
        if args.n_step < 1 or args.n_min > args.n_max:
            raise ValueError("bad n sweep range")
        ns = list(range(args.n_min, args.n_max + 1, args.n_step))
    else:
        raise ValueError("give --n, or --n-min and --n-max")
    run.params = {"k": args.k, "h": args.h, "n_values": ns}
    rows = []
    for n in ns:
        params = EnsembleParams(args.k, args.h, n)
        d = fl.typical_min_distance(weight_spectrum(run.dist, params))
        rows.append((n, params.r, d))
    if args.format == "csv":
        lines = ["n,r,d_min_typical"]
        for n, r, d in rows:
            lines.append(f"{n},{r!r},{d}")
        run.emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {"params": run.params, "points": [{"n": n, "r": r, "d_min_typical": d} for n, r, d in rows]}
        run.emit(json.dumps(doc, indent=2) + "\n", args.out)


def _cmd_cer_bound(args, run: _Run) -> None:
    params = _resolve_params(args)
    if not 0.0 <= args.eps_min <= args.eps_max <= 1.0:
        raise ValueError("need 0 <= eps-min <= eps-max <= 1")
    run.params = {
        "k": params.k,
        "h": params.h,
        "n": params.n,
        "eps_min": args.eps_min,
        "eps_max": args.eps_max,
        "points": args.points,
        "expurgate_d": args.expurgate_d,
    }
    sp = weight_spectrum(run.dist, params)
    if args.expurgate_d is not None:
        sp = fl.expurgate(sp, args.expurgate_d).expurgated
    grid = np.linspace(args.eps_min, args.eps_max, args.points)
    rows = [
        (float(e), fl.cer_upper_bound(sp, float(e)), fl.singleton_bound(params.n, params.k, float(e)))
        for e in grid
    ]
    if args.format == "csv":
        lines = ["eps,cer_bound,singleton"]
        for e, b, s in rows:
            lines.append(f"{e!r},{b!r},{s!r}")
        run.emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {"params": run.params, "points": [{"eps": e, "cer_bound": b, "singleton": s} for e, b, s in rows]}
        run.emit(json.dumps(doc, indent=2) + "\n", args.out)


def _cmd_expurgate(args, run: _Run) -> None:
    params = _resolve_params(args)
    run.params = {"k": params.k, "h": params.h, "n": params.n, "d_star": args.d_star}
    rep = fl.expurgate(weight_spectrum(run.dist, params), args.d_star)
    if args.format == "csv":
        run.emit(rep.expurgated.to_csv(), args.out)
    else:
        doc = {
            "params": run.params,
            "d_star": rep.d_star,
            "theta": rep.theta,
            "log2_a": [None if math.isinf(v) else float(v) for v in rep.expurgated.log2_a],
        }
        run.emit(json.dumps(doc, indent=2) + "\n", args.out)


def _parse_eps_grid(args) -> tuple[float, ...]:
    if args.eps:
        return tuple(float(t) for t in args.eps.split(","))
    if args.eps_min is not None and args.eps_max is not None:
        return tuple(float(e) for e in np.linspace(args.eps_min, args.eps_max, args.eps_points))
    raise ValueError("give --eps, or --eps-min and --eps-max")


def _cmd_simulate(args, run: _Run) -> None:
    params = _resolve_params(args)
    eps_grid = _parse_eps_grid(args)
    seed = _pick_seed(args, run)
    threads = args.threads if args.threads else (os.cpu_count() or 1)
    cfg = SimConfig(
        eps_grid=eps_grid,
        num_codes=args.codes,
        seed=seed,
        target_errors=args.target_errors,
        max_words=args.max_words,
    )
    run.params = {
        "k": params.k,
        "h": params.h,
        "n": params.n,
        "eps_grid": list(eps_grid),
        "codes": args.codes,
        "target_errors": args.target_errors,
        "max_words": args.max_words,
        "threads": threads,
        "pooled": args.pooled,
    }
    report = simulate_ensemble(params, run.dist, cfg, threads=threads)
    if args.format == "csv":
        run.emit(report.aggregate_csv(pooled=args.pooled), args.out)
        if args.per_code:
            if args.out is None:
                run.emit(report.per_code_csv(), None)
            else:
                base = Path(args.out)
                run.emit(
                    report.per_code_csv(),
                    str(base.with_name(f"{base.stem}_codes{base.suffix}")),
                )
    else:
        run.emit(report.to_json(), args.out)


def _cmd_sample_code(args, run: _Run) -> None:
    params = _resolve_params(args)
    seed = _pick_seed(args, run)
    run.params = {"k": params.k, "h": params.h, "n": params.n}
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    inst = sample_code(params, run.dist, rng, seed=seed)
    path = _out_path(args.out)
    save_instance(inst, path)
    manifest = {
        "subcommand": "sample-code",
        "params": run.params,
        "dist_name": run.dist.name,
        "dist_fingerprint": run.fingerprint(),
        "seed": seed,
        "version": __version__,
        "started": run.started,
        "finished": _now(),
        "output": path.name,
        "non_injective": inst.non_injective,
    }
    Path(str(path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    sys.stdout.write(
        f"wrote {path} (rank {inst.composite_rank}/{params.k}"
        f"{', non-injective' if inst.non_injective else ''})\n"
    )


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "growth": _cmd_growth,
    "delta-star": _cmd_delta_star,
    "region": _cmd_region,
    "dmin": _cmd_dmin,
    "cer-bound": _cmd_cer_bound,
    "expurgate": _cmd_expurgate,
    "simulate": _cmd_simulate,
    "sample-code": _cmd_sample_code,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dist = load_dist(args.dist)
    except (OSError, ValueError) as e:
        print(f"raptorspec: cannot load distribution {args.dist!r}: {e}", file=sys.stderr)
        return EXIT_DIST
    run = _Run(args.subcommand, dist)
    try:
        _COMMANDS[args.subcommand](args, run)
    except (ValueError, ArithmeticError) as e:
        print(f"raptorspec: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
