"""Command-line front end.

Every command writes one JSON report (``graphs`` and ``sweep`` write CSV).
Reports echo the parsed arguments, the sha256 of every input file and the
tolerance table in force, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import os
import shlex
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from nsgap import __version__
from nsgap import bounds as bnd
from nsgap import cube, embed, gamma, graphs, markov, mazur
from nsgap.config import get_tolerances, set_tolerances
from nsgap.errors import NsgapError
from nsgap.metric import graph_metric, load_edge_list, load_metric, point_cloud
from nsgap.rng import cell_rng
from nsgap.spectral import eigen_decompose, load_matrix

GRAPH_COLUMNS = ["n", "d", "seed", "lambda2", "lambda", "rms", "bound", "proxy"]


class UsageError(NsgapError):
    exit_code = 2


# ---------------------------------------------------------------- helpers

def _clean(v):
    """Recursively turn numpy scalars/arrays into JSON values; inf becomes "inf"."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _digest(path: str) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg})") from exc


def _load(loader, path):
    try:
        return loader(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
        if isinstance(exc, NsgapError):
            raise
        raise UsageError(f"{path}: {exc}") from exc


def _rng(args):
    if args.seed is None:
        raise UsageError(f"'{args.command}' is randomized and needs --seed")
    return cell_rng(args.seed, getattr(args, "cell", 0))


def _load_metric_arg(args):
    if getattr(args, "metric", None):
        return _load(load_metric, args.metric)
    if getattr(args, "edges", None):
        n, edges = _load(load_edge_list, args.edges)
        return graph_metric(n, edges)
    raise UsageError("give --metric or --edges")


def _load_cube_function(path: str) -> cube.CubeFunction:
    data = _read_json(path)
    if not isinstance(data, dict) or "n" not in data:
        raise UsageError(f"{path}: cube function needs an object with 'n'")
    n = int(data["n"])
    if "values" in data:
        return cube.from_points(n, data["values"], float(data.get("p", 2.0)))
    if "dist" in data:
        return cube.CubeFunction(n, np.asarray(data["dist"], dtype=float))
    raise UsageError(f"{path}: cube function needs 'values' or 'dist'")


# ---------------------------------------------------------------- commands

def cmd_spectral(args):
    return eigen_decompose(_load(load_matrix, args.matrix), vectors=False).to_dict()


def cmd_metric(args):
    x = _load_metric_arg(args)
    return {"n": x.size, "diameter": x.diameter(), "dist": x.dist}


def cmd_gamma(args):
    a = _load(load_matrix, args.matrix)
    x = _load_metric_arg(args)
    if args.sampled:
        est = gamma.gamma_sampled(a, x, args.p, trials=args.sampled, rng=_rng(args), plus=args.plus)
    elif args.plus:
        est = gamma.gamma_plus_exact(a, x, args.p, budget=args.budget)
    else:
        est = gamma.gamma_exact(a, x, args.p, budget=args.budget)
    return est.to_dict()


def cmd_bound(args):
    name = args.name
    if args.matrix:
        a = _load(load_matrix, args.matrix)
    elif args.lambda2 is not None:
        a = args.lambda2
    else:
        a = None
    needs_matrix = name in ("cheeger", "matousek", "lp_gamma", "refined_markov", "smoothness_interp")
    if needs_matrix and a is None:
        raise UsageError(f"bound '{name}' needs --matrix or --lambda2")
    params = bnd.BoundParams(p=args.p, q=args.q, theta=args.theta, smoothness_const=args.smoothness,
                             convexity_const=args.convexity, universal_c=args.universal_c)
    if name == "cheeger":
        rep = bnd.cheeger_reference(a)
    elif name == "matousek":
        rep = bnd.matousek_bound(a, args.p, args.universal_c)
    elif name == "lp_gamma":
        rep = bnd.lp_gamma_bound(a, args.p, args.universal_c, args.lambda_abs)
    elif name == "refined_markov":
        rep = bnd.refined_markov_bound(a, args.p, args.m, args.universal_c)
    elif name == "smoothness_interp":
        rep = bnd.smoothness_interp_bound(a, params, args.lambda_abs)
    elif name == "ozawa":
        if args.gamma_y is None:
            raise UsageError("ozawa needs --gamma-y")
        mod = mazur.MazurModuli(args.mazur_p, args.q)
        rep = bnd.ozawa_bound(args.gamma_y, args.q, lambda t: float(mod.alpha_lower(t)),
                              lambda s: float(mod.beta_inverse(s)))
    else:
        if args.gamma_x is None or args.gamma_y is None:
            raise UsageError("interpolation needs --gamma-x and --gamma-y")
        rep = bnd.interpolation_bound(args.gamma_x, args.gamma_y, params,
                                      args.p_exp, args.q_exp, args.r_exp, args.convexity_q)
    return rep.to_dict()


def cmd_mazur(args):
    return mazur.random_modulus_trial(args.p, args.q, args.samples, args.dim, _rng(args))


def cmd_cube(args):
    op = args.op
    if op == "witness":
        return cube.quarter_root_witness(args.n).to_dict()
    if not args.function:
        raise UsageError(f"cube {op} needs --function")
    f = _load_cube_function(args.function)
    if op == "ek":
        return {"n": f.n, "k": args.k, "q": args.q, "value": cube.ek(f, args.k, args.q)}
    if op == "bmw":
        return {"n": f.n, "p": args.p, "q": args.q, "value": cube.bmw_ratio(f, args.p, args.q)}
    if op == "lift":
        if args.n is None:
            raise UsageError("cube lift needs --n")
        lifted = cube.lift(f, args.n)
        ks = range(1, args.n + 1)
        return {"from": f.n, "to": args.n, "q": args.q,
                "ek": [cube.ek(lifted, k, args.q) for k in ks],
                "predicted": [cube.lifting_identity_rhs(f, args.n, k, args.q) for k in ks]}
    big = cube.mp_lift_construction(f)
    return {"n": f.n, "deviation": cube.mp_level_deviation(f, big), "function": big.to_dict()}


def cmd_markov(args):
    a = _load(load_matrix, args.matrix)
    x = _load_metric_arg(args)
    rng = _rng(args)
    kern = x.dist**args.p
    best, best_cfg, skipped = -math.inf, None, 0
    for _ in range(args.trials):
        cfg = rng.integers(x.size, size=a.n)
        try:
            r = markov.markov_ratio(a, args.m, kern, cfg)
        except NsgapError:
            skipped += 1
            continue
        if r.value > best:
            best, best_cfg = r.value, cfg
    g = gamma.gamma_sampled(a, x, args.p, trials=max(10, args.trials // 10), rng=rng)
    cmp = markov.compare_to_infinity(a, args.m, x, args.p, g.value, witnesses=[g.witness],
                                     random_configs=args.trials, rng=rng)
    return {"m": args.m, "p": args.p, "trials": args.trials, "skipped": skipped,
            "maxRatio": best, "witness": best_cfg, "gammaSampled": g.to_dict(),
            "compareToInfinity": cmp.to_dict()}


def cmd_embed(args):
    method = args.method
    if method == "duality":
        if not args.target:
            raise UsageError("embed duality needs --target")
        x = _load_metric_arg(args)
        y = _load(load_metric, args.target)
        if args.k is None:
            return {"threshold": embed.duality.duality_threshold(x, y, args.p, args.eps)}
        return embed.duality_certificate(x, y, args.p, args.k, args.eps, args.budget).to_dict()
    if method == "jl":
        if not args.metric:
            raise UsageError("embed jl needs --metric with a point cloud")
        data = _read_json(args.metric)
        if not isinstance(data, dict) or "points" not in data:
            raise UsageError("embed jl needs a point cloud file ({\"points\": ..., \"p\": 2})")
        cloud = point_cloud(data["points"], data.get("p", 2.0))
        dim = args.dim or embed.jl.jl_dimension(len(cloud.points), args.eps_jl)
        return embed.jl_reduce(cloud, dim, _rng(args)).to_dict()
    x = _load_metric_arg(args)
    if method == "line":
        return embed.line_embed(x, args.p, args.trials, _rng(args)).to_dict()
    if method == "bourgain":
        return embed.bourgain_matousek_embed(x, args.p, _rng(args)).to_dict()
    res = embed.spread_sdp(x)
    out = res.to_dict()
    out["witness"] = res.witness.to_dict()
    if args.dump_gram:
        out["gram"] = res.gram.gram
    return out


def _graph_instance(args, seed):
    if args.edges:
        n, edges = _load(load_edge_list, args.edges)
        e = np.unique(np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1), axis=0)
        deg = np.bincount(e.ravel(), minlength=n)
        g = graphs.RegularGraph(n, int(deg.max()), e, {"generator": "file", "seed": None})
        g.validate()
        return g
    if args.family == "cayley":
        return graphs.abelian_cayley(args.n, args.epsilon, seed)
    return graphs.random_regular(args.n, args.d, seed)


def cmd_graphs(args):
    if args.op == "cayley":
        args.family = "cayley"
    if args.seed is None and not args.edges:
        raise UsageError("graph generation needs --seed")
    rng = None if args.edges else cell_rng(args.seed, getattr(args, "cell", 0))
    g = _graph_instance(args, rng)
    g.provenance["seed"] = args.seed
    row = graphs.graph_row(g, args.p, args.threshold)
    return {c: row[c] for c in GRAPH_COLUMNS}


COMMANDS = {
    "spectral": cmd_spectral, "metric": cmd_metric, "gamma": cmd_gamma, "bound": cmd_bound,
    "mazur": cmd_mazur, "cube": cmd_cube, "markov": cmd_markov, "embed": cmd_embed,
    "graphs": cmd_graphs,
}


# ---------------------------------------------------------------- sweep

def _parse_grid(items) -> list[tuple[str, list[str]]]:
    grid = []
    for item in items:
        if "=" not in item:
            raise UsageError(f"grid entry '{item}' must look like key=v1,v2,...")
        key, vals = item.split("=", 1)
        values = _expand(vals)
        if not values:
            raise UsageError(f"grid entry '{item}' has no values")
        grid.append((key.strip().lstrip("-"), values))
    if not grid:
        raise UsageError("sweep needs at least one --grid entry")
    return grid


def _expand(vals: str) -> list[str]:
    out = []
    for part in vals.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(str(v) for v in range(int(lo), int(hi) + 1))
        elif part:
            out.append(part)
    return out


def _run_cell(parser, template: list[str], cell: int, assignment: dict, global_args: dict):
    argv = list(template)
    for k, v in assignment.items():
        argv += [f"--{k}", v]
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return None, f"bad cell arguments: {shlex.join(argv)}"
    for k, v in global_args.items():
        if getattr(args, k, None) is None:
            setattr(args, k, v)
    args.cell = cell
    try:
        return _clean(COMMANDS[args.command](args)), ""
    except NsgapError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(args, parser):
    template = shlex.split(args.template)
    if not template or template[0] not in COMMANDS:
        raise UsageError(f"sweep template must start with one of {sorted(COMMANDS)}")
    grid = _parse_grid(args.grid)
    keys = [k for k, _ in grid]
    cells = [dict(zip(keys, combo)) for combo in itertools.product(*(v for _, v in grid))]
    glob = {"seed": args.seed, "budget": args.budget}

    def job(i):
        return _run_cell(parser, template, i, cells[i], glob)

    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            results = list(pool.map(job, range(len(cells))))
    else:
        results = [job(i) for i in range(len(cells))]
    rows, columns = [], list(keys)
    for i, (cell, (res, err)) in enumerate(zip(cells, results)):
        row = {"cell": i, **cell}
        if res is not None:
            flat: dict = {}
            for k, v in res.items():
                if isinstance(v, dict):
                    for k2, v2 in v.items():
                        if not isinstance(v2, (dict, list)):
                            flat[f"{k}.{k2}"] = v2
                elif not isinstance(v, list):
                    flat[k] = v
            for k, v in flat.items():
                if k not in cell:
                    row[k] = v
                if k not in columns:
                    columns.append(k)
        row["error"] = err
        rows.append(row)
    header = ["cell"] + columns + ["error"]
    if all(err for _, err in results):
        first = results[0][1]
        raise SweepFailed(f"all {len(cells)} cells failed; first error: {first}", _csv(header, rows))
    return _csv(header, rows)


class SweepFailed(NsgapError):
    exit_code = 4

    def __init__(self, message, table):
        super().__init__(message)
        self.table = table


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_value(r.get(k, "")) for k in header})
    return buf.getvalue()


def _csv_value(v):
    v = _clean(v)
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


# ---------------------------------------------------------------- parser

def _global_flags(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="seed for randomized commands")
    parser.add_argument("--threads", type=int, default=default, help="worker threads for sweeps")
    parser.add_argument("--budget", type=int, default=default, help="evaluation budget for exhaustive searches")
    parser.add_argument("--out", default=default, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsgap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nsgap {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("spectral", "spectrum of a symmetric stochastic matrix")
    p.add_argument("--matrix", required=True)

    p = add("metric", "validate a metric or an edge list")
    p.add_argument("--metric")
    p.add_argument("--edges")

    p = add("gamma", "nonlinear spectral gap")
    p.add_argument("--matrix", required=True)
    p.add_argument("--metric")
    p.add_argument("--edges")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--plus", action="store_true")
    p.add_argument("--sampled", type=int, default=0, metavar="N")

    p = add("bound", "closed-form bounds")
    p.add_argument("name", choices=bnd.BOUND_NAMES)
    p.add_argument("--matrix")
    p.add_argument("--lambda2", type=float)
    p.add_argument("--lambda-abs", type=float)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--smoothness", type=float, default=1.0)
    p.add_argument("--convexity", type=float, default=1.0)
    p.add_argument("--convexity-q", type=float)
    p.add_argument("--universal-c", type=float, default=1.0)
    p.add_argument("--gamma-x", type=float)
    p.add_argument("--gamma-y", type=float)
    p.add_argument("--mazur-p", type=float, default=4.0)
    p.add_argument("--p-exp", type=float, default=2.0)
    p.add_argument("--q-exp", type=float, default=2.0)
    p.add_argument("--r-exp", type=float, default=2.0)

    p = add("mazur", "random check of the Mazur map moduli")
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--dim", type=int, default=8)

    p = add("cube", "Hamming cube functionals")
    p.add_argument("op", choices=("ek", "bmw", "lift", "mp", "witness"))
    p.add_argument("--function")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=2.0)

    p = add("markov", "Markov-type ratios on random configurations")
    p.add_argument("op", choices=("check",))
    p.add_argument("--matrix", required=True)
    p.add_argument("--metric")
    p.add_argument("--edges")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--trials", type=int, default=1000)

    p = add("embed", "average-distortion embeddings")
    p.add_argument("method", choices=("line", "bourgain", "jl", "sdp", "duality"))
    p.add_argument("--metric")
    p.add_argument("--edges")
    p.add_argument("--target")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--k", type=float)
    p.add_argument("--eps", type=float, default=embed.duality.DEFAULT_EPS)
    p.add_argument("--eps-jl", type=float, default=0.5)
    p.add_argument("--dim", type=int)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--dump-gram", action="store_true")

    p = add("graphs", "regular graph families and distortion lower bounds")
    p.add_argument("op", choices=("regular", "cayley", "lowerbound", "pindex"))
    p.add_argument("--family", choices=("regular", "cayley"), default="regular")
    p.add_argument("--edges")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--threshold", type=float, default=10.0)

    p = add("sweep", "cross-product runs of another command, one CSV row per cell")
    p.add_argument("template", help="command line of the cell, quoted, e.g. 'graphs pindex --d 3'")
    p.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2|A..B")
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _report(args, result) -> str:
    spec = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "threads", "cell")}
    inputs = {}
    for key in ("matrix", "metric", "edges", "target", "function"):
        path = getattr(args, key, None)
        if path:
            inputs[key] = {"path": path, "sha256": _digest(path)}
    doc = {"version": __version__, "command": args.command, "spec": spec, "inputs": inputs,
           "calibration": asdict(get_tolerances()), "result": result}
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.budget is not None and args.budget < 1:
        print("nsgap: error: --budget must be positive", file=sys.stderr)
        return 2
    saved = get_tolerances()
    try:
        return _dispatch(args)
    finally:
        set_tolerances(**asdict(saved))


def _dispatch(args) -> int:
    if args.budget is not None:
        set_tolerances(evaluation_budget=args.budget)
    try:
        if args.command == "sweep":
            try:
                text = cmd_sweep(args, build_parser())
            except SweepFailed as exc:
                _write(exc.table, args.out)
                raise
        elif args.command == "graphs":
            row = COMMANDS["graphs"](args)
            text = _csv(GRAPH_COLUMNS, [row])
        else:
            text = _report(args, _clean(COMMANDS[args.command](args)))
        _write(text, args.out)
    except NsgapError as exc:
        print(f"nsgap: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:  # numeric input that passed parsing but not the library
        print(f"nsgap: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
