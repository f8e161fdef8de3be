"""Experiment runner CLI.

Verbs: sample, clique, span, tree, hard-instance, growth-sim, count,
dimension, compress, check-fminus, z5d-ramsey, coprime6-ramsey, rcoloring,
suite.  Runs are deterministic per master seed: identical configuration
yields byte-identical reports; wall-clock timings go to a ``.meta`` sidecar.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, cayley, clique, coloring, fewcolor, freiman, groups
from .additive import clique_doubling_check, count_small_doubling, dimension_witness
from .errors import DomainError


@dataclass
class ExperimentConfig:
    """Flat key-value configuration; file form round-trips losslessly."""

    experiment: str
    group: str = ""
    sampler: str = "uniform"
    seed: int = 0
    trials: int = 1
    budget: int | None = None
    workers: int = 1
    out: str = ""
    params: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        fields = {}
        params = {}
        known = {"experiment", "group", "sampler", "seed", "trials", "budget", "workers", "out"}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if key in known:
                    fields[key] = value
                else:
                    params[key] = value
        for k in ("seed", "trials", "workers"):
            if k in fields:
                fields[k] = int(fields[k])
        if "budget" in fields:
            fields["budget"] = None if fields["budget"] == "none" else int(fields["budget"])
        return cls(params=params, **fields)

    def to_file(self, path):
        with open(path, "w") as fh:
            fh.write(f"experiment = {self.experiment}\n")
            fh.write(f"group = {self.group}\n")
            fh.write(f"sampler = {self.sampler}\n")
            fh.write(f"seed = {self.seed}\n")
            fh.write(f"trials = {self.trials}\n")
            fh.write(f"budget = {'none' if self.budget is None else self.budget}\n")
            fh.write(f"workers = {self.workers}\n")
            fh.write(f"out = {self.out}\n")
            for k in sorted(self.params):
                fh.write(f"{k} = {self.params[k]}\n")


def write_report(rows: list[dict], out_base: str, elapsed: float):
    """CSV + JSONL with deterministic bytes; timing goes to the sidecar."""
    base = Path(out_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    cols = sorted({k for row in rows for k in row})
    with open(base.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    with open(base.with_suffix(".jsonl"), "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(base.with_suffix(".meta"), "w") as fh:
        fh.write(f"wall_seconds = {elapsed:.3f}\n")
        fh.write(f"written_at = {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")


def emit(rows: list[dict], out: str, t0: float) -> None:
    if out:
        write_report(rows, out, time.time() - t0)
        print(f"wrote {len(rows)} rows to {out}.csv / .jsonl")
    else:
        for row in rows:
            print(json.dumps(row, sort_keys=True))


def _load_set(g: groups.GroupSpec, path) -> np.ndarray:
    flats = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coords = [int(x) for x in line.split(",")]
            flats.append(int(g.encode(np.asarray(coords))))
    return np.unique(np.asarray(flats, dtype=np.int64))


def load_coloring_arg(spec: str) -> coloring.EdgeColoring:
    """"difference:GROUP[:SETFILE]", "rainbow:N" or a coloring file path."""
    if spec.startswith("difference:"):
        parts = spec.split(":")
        g = groups.parse_group(parts[1])
        members = _load_set(g, parts[2]) if len(parts) > 2 else np.arange(g.order)
        return coloring.difference_coloring(g, members)
    if spec.startswith("rainbow:"):
        return coloring.rainbow_coloring(int(spec.split(":")[1]))
    return coloring.load_coloring(spec)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    g = groups.parse_group(args.group)
    rows = []
    t0 = time.time()
    for t in range(args.trials):
        S = cayley.sample(args.sampler, g, (args.seed, t), p=args.p)
        row = {"trial": t, "seed": args.seed, "sampler": args.sampler,
               "group": str(g), "set_size": S.size}
        if args.out:
            path = f"{args.out}-trial{t}.set"
            S.save(path, header=f"sampler {args.sampler} seed {args.seed} trial {t}")
            row["file"] = path
        rows.append(row)
    emit(rows, args.out, t0)
    return 0


def cmd_clique(args) -> int:
    t0 = time.time()
    if args.graph:
        graph = clique.DenseGraph.from_adjacency_file(args.graph)
        cert = clique.max_clique(graph, budget=args.budget)
    else:
        g = groups.parse_group(args.group)
        S = cayley.SymmetricSet.load(g, args.set_file)
        cert = cayley.cayley_clique(g, S, budget=args.budget)
    rows = [{"size": cert.size, "exact": cert.exact, "nodes": cert.nodes_explored,
             "witness": " ".join(str(int(v)) for v in cert.vertices)}]
    emit(rows, args.out, t0)
    return 0


def cmd_span(args) -> int:
    t0 = time.time()
    col = load_coloring_arg(args.coloring)
    col = coloring.properize(col)
    trace = fewcolor.greedy_span(col, args.vertex)
    rows = [{"step": i, "color": int(c), "added": len(a),
             "total": 1 + sum(len(x) for x in trace.added[: i + 1])}
            for i, (c, a) in enumerate(zip(trace.colors, trace.added))]
    K, n = col.ratio(), col.nv
    rows.append({"bound": "s <= 6*K*ln(n)", "lhs": len(trace.colors),
                 "rhs": round(6 * K * math.log(max(n, 2)), 3),
                 "ok": len(trace.colors) <= 6 * K * math.log(max(n, 2))})
    emit(rows, args.out, t0)
    return 0 if rows[-1]["ok"] else 1


def cmd_tree(args) -> int:
    t0 = time.time()
    col = coloring.properize(load_coloring_arg(args.coloring))
    cert = fewcolor.spanning_tree(col, seed=args.seed)
    n, K = col.nv, col.ratio()
    bound = 1000 * K * max(math.log(n / K), 1.0)
    rows = []
    for i, (e, c) in enumerate(zip(cert.edges, cert.edge_colors)):
        rows.append({"step": i, "u": int(e[0]), "v": int(e[1]), "color": int(c)})
    rows.append({"bound": "colors <= 1000*K*ln(n/K)", "lhs": cert.distinct_colors(),
                 "rhs": round(bound, 3), "ok": cert.distinct_colors() <= bound})
    emit(rows, args.out, t0)
    return 0 if rows[-1]["ok"] else 1


def cmd_hard_instance(args) -> int:
    t0 = time.time()
    inst = fewcolor.hard_instance(args.n, args.K, seed=args.seed)
    if args.coloring_out:
        inst.save(args.coloring_out)
    rows = [dict(inst.hard_stats, bound="colors <= 5*K*n",
                 lhs=inst.n_colors, rhs=5 * args.K * args.n,
                 ok=inst.n_colors <= 5 * args.K * args.n)]
    emit(rows, args.out, t0)
    return 0 if rows[0]["ok"] else 1


def cmd_growth_sim(args) -> int:
    t0 = time.time()
    col = coloring.properize(load_coloring_arg(args.coloring))
    split = coloring.split_large_classes(col, args.split if args.split else col.ratio())
    rows = []
    if args.mode in ("auto", "ball") and split.ratio() >= 16:
        res = fewcolor.ball_growth(split, seed=args.seed)
        for i, v in enumerate(res.vertices):
            rows.append({"vertex": int(v), "T": int(res.T[i]),
                         "nplus": int(res.nplus[i]), "good": bool(res.good[i])})
        rows.append({"mode": "ball", "K": round(res.K, 3), "J": res.J,
                     "kappa": res.kappa, "frac_tail_ok": round(res.frac_tail_ok, 4)})
    else:
        res = fewcolor.klogk_growth(split, seed=args.seed)
        sizes = np.bincount(res.labels)
        for cid in range(len(sizes)):
            rows.append({"component": cid, "size": int(sizes[cid]),
                         "colors_leaving": int(res.leaving[cid]),
                         "good": bool(res.comp_good[cid])})
        rows.append({"mode": "klogk", "K": round(res.K, 3), "flag_ok": res.flag_ok,
                     "retries": res.retries})
    emit(rows, args.out, t0)
    return 0


def cmd_count(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    hist = count_small_doubling(g, args.n, args.m if args.m else g.order, histogram=True)
    rows = [{"diff_size": k, "count": v} for k, v in sorted(hist.items())]
    if args.m:
        total = sum(v for k, v in hist.items() if k <= args.m)
        rows.append({"bound": f"|A-A| <= {args.m}", "count_at_most_m": total})
    emit(rows, args.out, t0)
    return 0


def cmd_dimension(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    A = _load_set(g, args.set_file)
    w = dimension_witness(g, A)
    ok = w.verify()
    rows = [{"base": w.base, "size": len(w.elements),
             "elements": " ".join(str(int(x)) for x in w.elements),
             "bound": "18*K*ln(n)", "lhs": len(w.elements), "rhs": round(w.bound, 3),
             "verified": ok}]
    emit(rows, args.out, t0)
    return 0 if ok and len(w.elements) <= w.bound else 1


def cmd_compress(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    A = _load_set(g, args.set_file)
    out = freiman.star_compress(g, A)
    d0 = len(np.unique(g.pairwise_diff(A, A)))
    d1 = len(np.unique(g.pairwise_diff(out, out)))
    rows = [{"input_size": len(A), "output_size": len(out),
             "diff_before": d0, "diff_after": d1,
             "star_compressed": freiman.is_star_compressed(g, out),
             "output": " ".join(str(int(x)) for x in out)}]
    emit(rows, args.out, t0)
    return 0


def cmd_check_fminus(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    A = _load_set(g, args.set_file)
    verdict = freiman.fminus_bound_check(g, A)
    lhs, K = freiman.fminus_sides(g, A)
    rows = [{"K": str(K), "bound": "ratio*(K+2) <= p^K",
             "lhs": str(lhs), "rhs": f"{g.characteristic}^{K}", "ok": verdict}]
    emit(rows, args.out, t0)
    return 0 if verdict else 1


def _z5d_trial(packed):
    d, seed, trial, budget = packed
    g = groups.GroupSpec((5,) * d)
    S = cayley.sample_z5d(g, seed=(seed, trial))
    graph = cayley.build_cayley(g, S)
    sc = cayley.verify_self_complementary(graph, g, 2)
    xs = np.arange(1, g.order)
    one_of = bool((S.mask[xs] ^ S.mask[g.scalar_mul(2, xs)]).all())
    cl = cayley.cayley_clique(g, S, budget=budget)
    ind = cayley.cayley_independence(g, S, budget=budget)
    doubling_ok = all(clique_doubling_check(g, cert.vertices, Fraction(4, 3))
                      for cert in (cl, ind) if cert.size >= 2)
    return {"trial": trial, "self_complementary": sc, "one_of_x_2x": one_of,
            "clique": cl.size, "independence": ind.size,
            "clique_exact": cl.exact, "independence_exact": ind.exact,
            "bound": "max <= 4*log2(N)", "lhs": max(cl.size, ind.size),
            "rhs": round(4 * math.log2(g.order), 3),
            "doubling_witnesses_ok": doubling_ok,
            "ok": sc and one_of and max(cl.size, ind.size) <= 4 * math.log2(g.order)
            and doubling_ok}


def cmd_z5d_ramsey(args) -> int:
    t0 = time.time()
    packs = [(args.d, args.seed, t, args.budget) for t in range(args.trials)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_z5d_trial, packs))
    else:
        rows = [_z5d_trial(p) for p in packs]
    rows.sort(key=lambda r: r["trial"])
    emit(rows, args.out, t0)
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_coprime6_ramsey(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    if math.gcd(g.order, 6) != 1:
        raise DomainError(f"|G| = {g.order} is not coprime to 6")
    rows = []
    for t in range(args.trials):
        S = cayley.sample_coprime6(g, seed=(args.seed, t))
        xs = np.arange(1, g.order)
        quad = S.mask[xs]
        for m in (2, 4, 8):
            quad = quad & S.mask[g.scalar_mul(m, xs)]
        cl = cayley.cayley_clique(g, S, budget=args.budget)
        ind = cayley.cayley_independence(g, S, budget=args.budget)
        rows.append({"trial": t, "quadruple_free": not bool(quad.any()),
                     "set_size": S.size, "clique": cl.size, "independence": ind.size,
                     "ok": not bool(quad.any())})
    emit(rows, args.out, t0)
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_rcoloring(args) -> int:
    t0 = time.time()
    g = groups.parse_group(args.group)
    rows = []
    for t in range(args.trials):
        if args.mode == "rotational":
            cc = cayley.rotational_coloring(g, args.r, seed=(args.seed, t), ell=args.ell)
            rows.append({"trial": t, "r": args.r, "alpha": cc.alpha,
                         "rotation_ok": cc.rotation_ok(),
                         "class_sizes": " ".join(str(int((cc.class_of == i).sum()))
                                                 for i in range(args.r)),
                         "ok": cc.rotation_ok()})
        else:
            p = g.characteristic
            build = cayley.rcoloring_smallp if p <= 2 ** (2 * args.r) else cayley.rcoloring_largep
            cc = build(g, args.r, seed=(args.seed, t))
            cc.validate()
            nonempty = all((cc.class_of == i).any() for i in range(args.r))
            rows.append({"trial": t, "r": args.r, "mode": build.__name__,
                         "classes_nonempty": nonempty, "ok": nonempty})
        if args.coloring_out:
            cc.save(f"{args.coloring_out}-trial{t}.coloring")
    emit(rows, args.out, t0)
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_suite(args) -> int:
    only = set(args.only) if args.only else None
    results = acceptance.run_suite(only=only, out=args.out or None)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colorclique",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, group=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--out", default="")
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)
        if group:
            p.add_argument("--group", required=True)

    p = sub.add_parser("sample", help="draw generating sets")
    common(p, group=True)
    p.add_argument("--sampler", default="uniform", choices=["uniform", "z5d", "coprime6"])
    p.add_argument("--p", type=float, default=0.5)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("clique", help="exact maximum clique")
    common(p)
    p.add_argument("--group")
    p.add_argument("--graph", help="adjacency list file")
    p.add_argument("--set-file", dest="set_file", help="generating set file")
    p.set_defaults(fn=cmd_clique)

    p = sub.add_parser("span", help="greedy span sequence")
    common(p)
    p.add_argument("--coloring", required=True,
                   help="file, difference:GROUP[:SETFILE] or rainbow:N")
    p.add_argument("--vertex", type=int, default=0)
    p.set_defaults(fn=cmd_span)

    p = sub.add_parser("tree", help="few-color spanning tree")
    common(p)
    p.add_argument("--coloring", required=True)
    p.set_defaults(fn=cmd_tree)

    p = sub.add_parser("hard-instance", help="adversarial spanning-tree coloring")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--coloring-out", dest="coloring_out", default="")
    p.set_defaults(fn=cmd_hard_instance)

    p = sub.add_parser("growth-sim", help="random color-exposure processes")
    common(p)
    p.add_argument("--coloring", required=True)
    p.add_argument("--mode", default="auto", choices=["auto", "ball", "klogk"])
    p.add_argument("--split", type=float, default=None)
    p.set_defaults(fn=cmd_growth_sim)

    p = sub.add_parser("count", help="small-doubling counting oracle")
    common(p, group=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("dimension", help="additive dimension witness")
    common(p, group=True)
    p.add_argument("--set-file", dest="set_file", required=True)
    p.set_defaults(fn=cmd_dimension)

    p = sub.add_parser("compress", help="star compression")
    common(p, group=True)
    p.add_argument("--set-file", dest="set_file", required=True)
    p.set_defaults(fn=cmd_compress)

    p = sub.add_parser("check-fminus", help="span/doubling bound verdict")
    common(p, group=True)
    p.add_argument("--set-file", dest="set_file", required=True)
    p.set_defaults(fn=cmd_check_fminus)

    p = sub.add_parser("z5d-ramsey", help="Z_5^d self-complementary experiment")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(fn=cmd_z5d_ramsey)

    p = sub.add_parser("coprime6-ramsey", help="coprime-6 Cayley experiment")
    common(p, group=True)
    p.set_defaults(fn=cmd_coprime6_ramsey)

    p = sub.add_parser("rcoloring", help="Cayley r-colorings")
    common(p, group=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--mode", default="lines", choices=["lines", "rotational"])
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--coloring-out", dest="coloring_out", default="")
    p.set_defaults(fn=cmd_rcoloring)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--only", type=int, nargs="*", default=None)
    p.add_argument("--out", default="")
    p.set_defaults(fn=cmd_suite)
    return parser


def _argv_from_config(path) -> list[str]:
    """Expand a config file into a flag list; later CLI flags override."""
    cfg = ExperimentConfig.from_file(path)
    argv = [cfg.experiment]
    if cfg.group:
        argv += ["--group", cfg.group]
    argv += ["--seed", str(cfg.seed), "--trials", str(cfg.trials),
             "--workers", str(cfg.workers)]
    if cfg.budget is not None:
        argv += ["--budget", str(cfg.budget)]
    if cfg.out:
        argv += ["--out", cfg.out]
    if cfg.experiment == "sample":
        argv += ["--sampler", cfg.sampler]
    for k in sorted(cfg.params):
        argv += [f"--{k}", cfg.params[k]]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if argv[:1] == ["--config"]:
        argv = _argv_from_config(argv[1]) + argv[2:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
