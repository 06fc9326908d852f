"""Command-line front end: ``polychaos {compose,simulate,moments,fitbeta4,oed}``.

Exit codes: 0 ok, 1 usage or precondition error, 2 schema error,
3 compose error, 4 integration failure, 5 infeasible fit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .pcebasis import CoeffTensor, moment_tensor
from .compose import ComposeError, compose
from .distributions import DEFAULT_SEED, make_rng
from .export import read_moments, read_table, write_expanded, write_json, write_moments, write_table
from .integrate import IntegrationError, SimOptions
from .modelir import ModelError, load_system
from .oed import build_reference_problem, discrimination_score, envelope_gap, mc_envelopes, optimize_input, output_fits
from .postprocess import FitError, PrecisionWarning, calc_moments, fit_beta4, raw_to_central, MomentSeries
from .simulate import iter_montecarlo, sample_basis, sample_variables, sim_collocation, sim_galerkin

log = logging.getLogger("polychaos")

EXIT_OK, EXIT_USAGE, EXIT_SCHEMA, EXIT_COMPOSE, EXIT_INTEGRATION, EXIT_FIT = 0, 1, 2, 3, 4, 5


class UsageError(ValueError):
    pass


def _parse_set(items: Sequence[str] | None) -> dict[str, np.ndarray]:
    out = {}
    for item in items or ():
        name, sep, values = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--set expects name=v1,v2,...; got {item!r}")
        try:
            out[name.strip()] = np.array([float(v) for v in values.replace(" ", "").strip("[]").split(",") if v])
        except ValueError:
            raise UsageError(f"--set {name}: values must be numbers") from None
    return out


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _tag(command: str, seed: int) -> str:
    return f"polychaos {__version__} {command} seed={seed}"


def _manifest(out: Path, args, command: str, files: list[Path], **extra) -> None:
    write_json(
        out / "manifest.json",
        {
            "command": command,
            "input": getattr(args, "doc", None),
            "seed": args.seed,
            "options": {k: v for k, v in vars(args).items() if k not in ("func", "doc")},
            "output_dir": str(out),
            "files": sorted(p.name for p in files),
            **extra,
        },
    )


def _sim_options(args) -> SimOptions:
    return SimOptions(tuple(args.tspan), args.dt, args.solver, args.rtol, args.atol)


# -- commands -----------------------------------------------------------------


def cmd_compose(args) -> int:
    doc = load_system(args.doc)
    es = compose(doc, args.order)
    out = _outdir(args.out)
    files = []
    for p, tensor in es.tensors.items():
        path = out / f"tensor_p{p}.csv"
        tensor.write_csv(path)
        files.append(path)
    dump = {"system": doc.to_document(), **es.to_dump()}
    files.append(write_json(out / "system_expanded.json", dump))
    if args.verify:
        again = compose(load_system(json.loads((out / "system_expanded.json").read_text())["system"]), args.order)
        for p, tensor in again.tensors.items():
            back = CoeffTensor.read_csv(out / f"tensor_p{p}.csv", again.size)
            if not (np.array_equal(back.coords, tensor.coords) and np.array_equal(back.values, tensor.values)):
                raise ComposeError(f"round trip of tensor p={p} does not reproduce the composed tensor")
        log.info("verified %d tensors", len(again.tensors))
    _manifest(out, args, "compose", files, basis_size=es.size)
    print(f"basis size {es.size}; wrote {len(files)} files to {out}")
    return EXIT_OK


def _write_moments_for(out: Path, name: str, times, coeffs, tensors, tag) -> Path:
    series = calc_moments(tensors, coeffs, times)
    return write_moments(out / f"moments_{name}.csv", series, tag)


def cmd_simulate(args) -> int:
    system = load_system(args.doc)
    overrides = _parse_set(args.set)
    opts = _sim_options(args)
    out = _outdir(args.out)
    tag = _tag(f"simulate --method {args.method}", args.seed)
    rng = make_rng(args.seed)
    files: list[Path] = []
    if args.method == "mc":
        es = compose(system, args.order, projection=False)
        samples = sample_variables(es, args.samples, rng)
        names = es.state_names + es.output_names
        width = len(str(args.samples - 1))
        sums = None
        for start, batch in iter_montecarlo(es, opts, samples, overrides):
            for k, values in enumerate(batch, start=start):
                files.append(write_table(out / f"sample_{k:0{width}d}.csv", ["t"] + names, np.column_stack([opts.grid, values]), tag))
            if args.moments:
                powers = np.stack([np.sum(batch**m, axis=0) for m in range(1, args.moments + 1)])
                sums = powers if sums is None else sums + powers
        if args.moments:
            raw = sums / args.samples  # (m, T, n_vars)
            for v, name in enumerate(names):
                series = MomentSeries(opts.grid, raw[:, :, v], raw_to_central(raw[:, :, v]))
                files.append(write_moments(out / f"moments_{name}.csv", series, tag))
    else:
        if args.method == "galerkin":
            es = compose(system, args.order)
            res = sim_galerkin(es, opts, overrides)
        else:
            es = compose(system, args.order, projection=False)
            res = sim_collocation(es, opts, sample_basis(es, args.samples, rng), overrides)
        tensors = [moment_tensor(es.basis, m) for m in range(1, args.moments + 1)] if args.moments else None
        for name, coeffs in res.coeffs.items():
            files.append(write_expanded(out / f"{name}.csv", name, res.times, coeffs, tag))
            if tensors:
                files.append(_write_moments_for(out, name, res.times, coeffs, tensors, tag))
    _manifest(out, args, "simulate", files, basis_size=es.size)
    print(f"wrote {len(files)} files to {out}")
    return EXIT_OK


def cmd_moments(args) -> int:
    es = compose(load_system(args.doc), args.order, projection=False)
    columns, data = read_table(args.trajectory)
    if data.shape[1] - 1 != es.size:
        raise UsageError(f"trajectory has {data.shape[1] - 1} coefficients but the basis has {es.size}")
    name = columns[1].rsplit("_", 1)[0]
    tensors = [moment_tensor(es.basis, m) for m in range(1, args.moments + 1)]
    series = calc_moments(tensors, data[:, 1:], data[:, 0])
    out = Path(args.out) if args.out else Path(args.trajectory).with_name(f"moments_{name}.csv")
    write_moments(out, series, _tag("moments", args.seed))
    write_json(out.with_suffix(".json"), {"seed": args.seed, "times": series.times, "raw": series.raw, "central": series.central})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_fitbeta4(args) -> int:
    if args.nu:
        nu = args.nu
        where = {}
    else:
        if not args.moments_csv:
            raise UsageError("give a moments CSV or --nu v1 v2 v3 v4")
        times, rows = read_moments(args.moments_csv)
        k = args.index if args.index is not None else (int(np.argmin(np.abs(times - args.time))) if args.time is not None else len(times) - 1)
        missing = [f"raw_{m}" for m in range(1, 5) if f"raw_{m}" not in rows]
        if missing:
            raise UsageError(f"{args.moments_csv} lacks rows {missing}; write moments up to order 4")
        nu = [rows[f"raw_{m}"][k] for m in range(1, 5)]
        where = {"time": float(times[k]), "index": k}
    fit = fit_beta4(*nu)
    payload = {**fit.to_dict(), **where, "moments": list(map(float, nu))}
    if args.out:
        write_json(args.out, payload)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_oed(args) -> int:
    prob = build_reference_problem(args.order)
    out = _outdir(args.out)
    zero = np.zeros(len(prob.input_breakpoints))
    files: list[Path] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        zero_fits = output_fits(prob, zero)
        zero_score = discrimination_score(prob, zero)
    result = {"seed": args.seed, "zero_input": {"u_v": zero, "score": zero_score, "fits": [f.to_dict() for f in zero_fits]}}
    times, envs = mc_envelopes(prob, zero, args.samples, args.seed)
    files.append(_write_envelopes(out / "envelopes_zero.csv", times, envs, args.seed))
    if not args.zero_input:
        res = optimize_input(prob, starts=args.starts, seed=args.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)
            fits = output_fits(prob, res.u_v)
        times, envs = mc_envelopes(prob, res.u_v, args.samples, args.seed)
        gap = envelope_gap(envs)
        separated = times[gap > 0]
        result["optimized"] = {
            "u_v": res.u_v,
            "score": res.score,
            "evaluations": res.evaluations,
            "simulations": res.simulations,
            "fits": [f.to_dict() for f in fits],
            "envelopes_disjoint_from": _disjoint_from(times, gap),
            "separated_times": int(len(separated)),
        }
        files.append(_write_envelopes(out / "envelopes_optimized.csv", times, envs, args.seed))
        trace = np.array([[r["evaluation"], r["start"], r["score"], r["best"], *r["u_v"]] for r in res.trace])
        cols = ["evaluation", "start", "score", "best"] + [f"u_{k + 1}" for k in range(len(zero))]
        files.append(write_table(out / "score_trace.csv", cols, trace, _tag("oed", args.seed)))
        print(f"zero-input score {zero_score:.6g}; optimized score {res.score:.6g} at u_v={res.u_v.tolist()}")
    else:
        print(f"zero-input score {zero_score:.6g}")
    files.append(write_json(out / "oed_result.json", result))
    _manifest(out, args, "oed", files)
    return EXIT_OK


def _disjoint_from(times, gap):
    """Earliest time after which the envelopes stay disjoint, or ``None``."""
    if not gap[-1] > 0:
        return None
    overlapping = np.nonzero(gap <= 0)[0]
    return float(times[overlapping[-1] + 1] if len(overlapping) else times[0])


def _write_envelopes(path, times, envs, seed) -> Path:
    (la, ha), (lb, hb) = envs
    cols = ["t", "henri_lo", "henri_hi", "mm_lo", "mm_hi"]
    return write_table(path, cols, np.column_stack([times, la, ha, lb, hb]), _tag("oed", seed))


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polychaos", description="Polynomial chaos expansion of uncertain ODE systems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, doc=True):
        if doc:
            p.add_argument("doc", help="system definition JSON")
        p.add_argument("--order", type=int, default=3, help="PCE order P")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", default="out")

    p = sub.add_parser("compose", help="expand a system and dump its tensors")
    common(p)
    p.add_argument("--verify", action="store_true", help="re-ingest the dump and compare tensors")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("simulate", help="Galerkin, collocation or Monte Carlo simulation")
    common(p)
    p.add_argument("--method", choices=("galerkin", "collocation", "mc"), default="galerkin")
    p.add_argument("--tspan", type=float, nargs=2, default=(0.0, 1.0), metavar=("T0", "TF"))
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--solver", choices=("rk45", "rk4", "euler"), default="rk45")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--moments", type=int, default=0, metavar="M", help="also write moments 1..M")
    p.add_argument("--set", action="append", metavar="NAME=V1,V2,...", help="override an input field")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("moments", help="moments from an expanded trajectory CSV")
    p.add_argument("trajectory")
    p.add_argument("--doc", required=True, help="system definition the trajectory came from")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--moments", type=int, default=4, metavar="M")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("fitbeta4", help="four-parameter beta fit from four raw moments")
    p.add_argument("moments_csv", nargs="?")
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--nu", type=float, nargs=4, metavar=("NU1", "NU2", "NU3", "NU4"))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fitbeta4)

    p = sub.add_parser("oed", help="input design for the enzyme kinetics discrimination problem")
    common(p, doc=False)
    p.set_defaults(order=2)
    p.add_argument("--samples", type=int, default=2000, help="Monte Carlo samples for the envelopes")
    p.add_argument("--starts", type=int, default=3)
    p.add_argument("--zero-input", action="store_true", help="only evaluate the zero input")
    p.set_defaults(func=cmd_oed)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ComposeError as exc:
        print(f"compose error: {exc}", file=sys.stderr)
        return EXIT_COMPOSE
    except ModelError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
