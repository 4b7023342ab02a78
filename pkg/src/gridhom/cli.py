"""Command-line entry point: ``gridhom <command> [options]``.

Exit status: 0 success, 1 bad input, 2 verification failure (the report
carries a replayable counterexample), 3 resource limit (partial report).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import os
import random
import signal
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product as iproduct
from math import comb
from typing import Any, Callable

from . import checks, stair
from .grid import GridSpec
from .errors import ContractViolation, ResourceLimitError, VerificationFailure
from .homology import betti
from .io import (
    SCHEMA_VERSION,
    chain_to_json,
    complex_from_json,
    dumps,
    hom_to_json,
    hom_from_json,
    instance_from_json,
    instance_to_json,
    load_json,
    system_from_json,
    system_to_json,
)
from .helly import helly_t, run_helly, stepping_up_report
from .minor import (
    build_Md,
    cone_vertex_in_top_faces,
    disjoint_face_dims_ok,
    image_table,
    verify_chain_map,
    verify_disjoint_supports,
)
from .nerve import (
    check_stepping_inequality,
    count_multipartite,
    generate_boxes,
    nerve_hypergraph,
    nerve_profile,
    shatter_profile,
    upper_bound_check,
)
from .subgrid import (
    chi_coloring,
    find_monochromatic_subgrid,
    kernel_membership_bruteforce,
    ramsey_bounds,
    search_kernel_subgrid,
    verify_kernel,
)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_LIMIT = 0, 1, 2, 3

DEFAULT_MAX_CELLS = 10 ** 7
DEFAULT_MAX_SUBSETS = 10 ** 8


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any]
    seed: int = 0
    fmt: str = "json"
    threads: int = 1
    max_cells: int = DEFAULT_MAX_CELLS
    max_subsets: int = DEFAULT_MAX_SUBSETS
    time_limit: float | None = None
    inputs: list[str] = field(default_factory=list)

    def need_cells(self, count: int, what: str) -> None:
        if count > self.max_cells:
            raise ResourceLimitError(f"{what} needs {count} cells, limit is {self.max_cells}",
                                     partial={"cells_needed": count})

    def need_subsets(self, count: int, what: str) -> None:
        if count > self.max_subsets:
            raise ResourceLimitError(f"{what} enumerates {count} subsets, limit is {self.max_subsets}",
                                     partial={"subsets_needed": count})


class Outcome:
    def __init__(self, report: dict, status: int = EXIT_OK, text: str | None = None):
        self.report = report
        self.status = status
        self.text = text


def _grid_cells(n: int, m: int, top: int | None = None) -> int:
    spec = GridSpec(n, m)
    return sum(spec.cell_count(k) for k in range((m if top is None else top) + 1))


def _pmap(fn: Callable, jobs: list, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        futures = [pool.submit(fn, *j) for j in jobs]
        return [f.result() for f in futures]


# Commands ---------------------------------------------------------------------

def cmd_verify_identities(cfg: RunConfig) -> Outcome:
    p = cfg.params
    max_m, max_n = p["max_m"], p["max_n"]
    alt_m = p["alt_max_m"] if p["alt_max_m"] is not None else min(max_m, 4)
    alt_n = p["alt_max_n"] if p["alt_max_n"] is not None else max_n + 1
    cfg.need_cells(_grid_cells(max(max_n, alt_n), max(max_m, alt_m)), "identity suites")
    jobs = [
        (stair.boundary_suite, (max_m, max_n)),
        (stair.unwrap_suite, (max_m, max_n)),
        (stair.hyperplane_suite, (max_m, max_n)),
        (stair.alternating_suite, (alt_m, alt_n)),
        (checks.boundary_squared_suite, (p["samples"], cfg.seed)),
        (checks.product_rule_suite, (p["samples"], cfg.seed)),
        (checks.subgrid_chain_map_suite, (p["samples"], cfg.seed)),
    ]
    suites = _pmap(_call, jobs, cfg.threads)
    failed = sum(s["failures"] for s in suites)
    report = {"suites": suites, "passed": failed == 0}
    if failed:
        report["counterexample"] = {s["suite"]: s["counterexamples"] for s in suites if s["failures"]}
    return Outcome(report, EXIT_OK if failed == 0 else EXIT_VERIFY)


def _call(fn, args):
    return fn(*args)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ContractViolation(f"expected comma-separated integers, got {text!r}") from exc


def cmd_stair(cfg: RunConfig) -> Outcome:
    p = cfg.params
    anchors = _int_list(p["anchors"])
    args = stair.StairArgs(p["m"], tuple(anchors), p["n"])
    cfg.need_cells(_grid_cells(p["n"], p["m"]), "stair chain")
    c = stair.stc_recursive(args)
    ok = stair.verify_simplex_boundary(args) and c == stair.stc_unwrapped(args)
    report = {"chain": chain_to_json(c), "k": args.k, "verified": ok}
    if not ok:
        report["counterexample"] = {"m": args.m, "anchors": anchors, "n": args.n}
    return Outcome(report, EXIT_OK if ok else EXIT_VERIFY)


def cmd_betti(cfg: RunConfig) -> Outcome:
    X = complex_from_json(load_json(cfg.params["input"]))
    cfg.need_cells(len(X), "betti")
    bv = betti(X).to_list()
    return Outcome({"betti": bv}, text=" ".join(map(str, bv)))


def cmd_subgrid_search(cfg: RunConfig) -> Outcome:
    p = cfg.params
    raw = load_json(p["input"])
    h = hom_from_json(raw)
    ell = p["ell"]
    cfg.need_cells(h.n ** h.m, "subgrid search")
    if p["mode"] == "mono":
        colors = {v: chi_coloring(h, v) for v in iproduct(range(1, h.n + 1), repeat=h.m)}
        gamma = find_monochromatic_subgrid(colors, h.n, h.m, ell, max_candidates=cfg.max_subsets)
        report = {"mode": "mono", "subgrid": gamma.to_json() if gamma else None,
                  "found": gamma is not None}
        if gamma is not None:
            report["kernel"] = verify_kernel(h, gamma)
        return Outcome(report)
    found = search_kernel_subgrid(h, ell, max_candidates=cfg.max_subsets)
    report = {"mode": "kernel", "found": found.subgrid is not None, "route": found.route,
              "subgrid": found.subgrid.to_json() if found.subgrid else None}
    if found.subgrid is None:
        return Outcome(report)
    certs = {"generators": verify_kernel(h, found.subgrid),
             "bruteforce": kernel_membership_bruteforce(h, found.subgrid)}
    report["certificate"] = certs
    if not all(certs.values()):
        report["counterexample"] = {"hom": hom_to_json(h), "ell": ell, "subgrid": found.subgrid.to_json()}
        return Outcome(report, EXIT_VERIFY)
    return Outcome(report)


def cmd_ramsey_bounds(cfg: RunConfig) -> Outcome:
    p = cfg.params
    rb = ramsey_bounds(p["m"], ell=p["ell"], q=p["q"], b=p["b"], k=p["k"], d=p["d"],
                       k1_exponent=p["k1_exponent"])
    report = rb.to_json()
    if not report:
        raise ContractViolation("give --ell and --q, --ell --b and --k, or --b and --d")
    lines = [report[k] for k in ("N_mono", "N_kernel") if k in report]
    lines += [f"t_{i} = {v}" for i, v in sorted(report.get("t", {}).items(), reverse=True)]
    return Outcome(report, text="\n".join(lines))


def cmd_minor(cfg: RunConfig) -> Outcome:
    d, m = cfg.params["d"], cfg.params["m"]
    if not m > d >= 1:
        raise ContractViolation("minor needs m > d >= 1")
    cfg.need_cells(_grid_cells(d + 3, m), "minor")
    M = build_Md(d)
    verdicts = {
        "chain_map": verify_chain_map(d, m),
        "disjoint_supports": verify_disjoint_supports(d, m),
        "disjoint_face_dims": disjoint_face_dims_ok(M),
        "cone_vertex_in_top_faces": cone_vertex_in_top_faces(M),
    }
    report = {"d": d, "m": m, "vertices": list(M.vertices), "dim": M.dim,
              "facets": [list(f) for f in M.facets()], "images": image_table(d, m),
              "verdicts": verdicts}
    if not all(verdicts.values()):
        report["counterexample"] = {"d": d, "m": m}
        return Outcome(report, EXIT_VERIFY)
    return Outcome(report)


def _system(cfg: RunConfig):
    F = system_from_json(load_json(cfg.params["system"]))
    cfg.need_cells(len(F.ambient), "set system")
    return F


def _subset_count(n: int, k: int) -> int:
    return sum(comb(n, j) for j in range(1, min(k, n) + 1))


def cmd_nerve(cfg: RunConfig) -> Outcome:
    F = _system(cfg)
    k = cfg.params["k"] if cfg.params["k"] is not None else len(F)
    cfg.need_subsets(_subset_count(len(F), k), "nerve")
    report = {"profile": nerve_profile(F, k).to_json()}
    if cfg.params["ell"] is not None:
        report["stepping"] = check_stepping_inequality(F, cfg.params["k"], cfg.params["ell"]).to_json()
    if cfg.params["ubt_d"] is not None and cfg.params["ubt_r"] is not None:
        report["upper_bound"] = upper_bound_check(F, cfg.params["ubt_d"], cfg.params["ubt_r"])
    return Outcome(report)


def cmd_shatter(cfg: RunConfig) -> Outcome:
    F = _system(cfg)
    cfg.need_subsets(_subset_count(len(F), cfg.params["k"]), "shatter")
    return Outcome({"shatter": shatter_profile(F, cfg.params["h"], cfg.params["k"]).to_json()})


def cmd_supersaturation(cfg: RunConfig) -> Outcome:
    F = _system(cfg)
    m, t = cfg.params["m"], cfg.params["t"]
    cfg.need_subsets(comb(len(F), m), "nerve hypergraph")
    H = nerve_hypergraph(F, m)
    try:
        copies = count_multipartite(H, m, t, max_steps=cfg.max_subsets)
    except ResourceLimitError as exc:
        raise ResourceLimitError(str(exc), partial={"copies_so_far": exc.partial}) from exc
    return Outcome({"m": m, "t": t, "edges": len(H.edges), "copies": copies},
                   text=str(copies))


def cmd_gen_boxes(cfg: RunConfig) -> Outcome:
    p = cfg.params
    cfg.need_cells(_grid_cells(p["n"], p["d"]), "box ambient")
    F = generate_boxes(p["d"], p["count"], cfg.seed, n=p["n"])
    report = {"system": system_to_json(F), "seed": cfg.seed,
              "profile": nerve_profile(F).to_json()}
    return Outcome(report)


def cmd_helly_run(cfg: RunConfig) -> Outcome:
    raw = load_json(cfg.params["instance"])
    inst, stored = instance_from_json(raw)
    grids = _int_list(cfg.params["grids"]) if cfg.params["grids"] else stored
    if grids is None:
        raise ContractViolation("no grid sizes: pass --grids or store \"grids\" in the instance")
    cfg.need_cells(_grid_cells(grids[0], inst.m, inst.levels), "constrained chain map")
    rep = run_helly(inst, grids, max_candidates=cfg.max_subsets)
    report = rep.to_json()
    if not rep.success:
        report["counterexample"] = instance_to_json(inst, grids)
        return Outcome(report, EXIT_VERIFY)
    return Outcome(report)


def cmd_helly_t(cfg: RunConfig) -> Outcome:
    p = cfg.params
    t = helly_t(p["b"], p["d"], p["m"], shifted=p["shifted"], k1_exponent=p["k1_exponent"])
    return Outcome({"b": p["b"], "d": p["d"], "m": p["m"], "t": str(t)}, text=str(t))


def cmd_stepping_up(cfg: RunConfig) -> Outcome:
    F = _system(cfg)
    p = cfg.params
    rep = stepping_up_report(F, p["k"], p["t"], p["d"], max_steps=cfg.max_subsets)
    report = rep.to_json()
    if rep.implied_lower_bound > rep.delta_k1:
        report["counterexample"] = {"system": system_to_json(F), "k": p["k"], "t": p["t"], "d": p["d"]}
        return Outcome(report, EXIT_VERIFY)
    return Outcome(report, EXIT_LIMIT if rep.partial else EXIT_OK)


COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "verify-identities": cmd_verify_identities,
    "stair": cmd_stair,
    "betti": cmd_betti,
    "subgrid-search": cmd_subgrid_search,
    "ramsey-bounds": cmd_ramsey_bounds,
    "minor": cmd_minor,
    "nerve": cmd_nerve,
    "shatter": cmd_shatter,
    "supersaturation": cmd_supersaturation,
    "gen-boxes": cmd_gen_boxes,
    "helly-run": cmd_helly_run,
    "helly-t": cmd_helly_t,
    "stepping-up": cmd_stepping_up,
}

TEXT_DEFAULT = {"ramsey-bounds", "helly-t"}


# Parsing and output ------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for verification failures."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    common.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS)
    common.add_argument("--time-limit", type=float, default=None, help="wall-clock seconds")

    parser = _Parser(prog="gridhom", description="Grid-complex homology toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-identities", parents=[common], help="exhaustive identity suites")
    s.add_argument("--max-m", type=int, default=4)
    s.add_argument("--max-n", type=int, default=6)
    s.add_argument("--alt-max-m", type=int, default=None)
    s.add_argument("--alt-max-n", type=int, default=None)
    s.add_argument("--samples", type=int, default=200)

    s = sub.add_parser("stair", parents=[common], help="print a stair convex chain")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--anchors", required=True, help="comma-separated, strictly increasing")

    s = sub.add_parser("betti", parents=[common], help="reduced Z2 Betti numbers")
    s.add_argument("--input", required=True)

    s = sub.add_parser("subgrid-search", parents=[common], help="kernel or monochromatic subgrid")
    s.add_argument("--input", required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--mode", choices=["kernel", "mono"], default="kernel")

    s = sub.add_parser("ramsey-bounds", parents=[common], help="exact subgrid Ramsey bounds")
    s.add_argument("--m", type=int, required=True)
    for name in ("ell", "q", "b", "k", "d"):
        s.add_argument(f"--{name}", type=int, default=None)
    s.add_argument("--k1-exponent", action="store_true",
                   help="use C(m, k+1) colorings instead of C(m, k)")

    s = sub.add_parser("minor", parents=[common], help="M_d and its stair embedding")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--m", type=int, required=True)

    s = sub.add_parser("nerve", parents=[common], help="nerve densities and f-vector")
    s.add_argument("--system", required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--ell", type=int, default=None, help="also check the stepping inequality k -> ell")
    s.add_argument("--ubt-d", type=int, default=None)
    s.add_argument("--ubt-r", type=int, default=None)

    s = sub.add_parser("shatter", parents=[common], help="homological shatter function")
    s.add_argument("--system", required=True)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--k", type=int, required=True)

    s = sub.add_parser("supersaturation", parents=[common], help="count K^m(t) in the nerve")
    s.add_argument("--system", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--t", type=int, required=True)

    s = sub.add_parser("gen-boxes", parents=[common], help="random axis-aligned box family")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--n", type=int, default=10)

    s = sub.add_parser("helly-run", parents=[common], help="constrained chain map and certificate")
    s.add_argument("--instance", required=True)
    s.add_argument("--grids", default=None, help="t0,t1,... (defaults to the instance's own)")

    s = sub.add_parser("helly-t", parents=[common], help="exact t(b, d, m)")
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--shifted", action="store_true", help="use homomorphism degree i+1 at level i")
    s.add_argument("--k1-exponent", action="store_true")

    s = sub.add_parser("stepping-up", parents=[common], help="stepping-up report")
    s.add_argument("--system", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    return parser


COMMON_KEYS = {"command", "format", "seed", "threads", "max_cells", "max_subsets", "time_limit"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in COMMON_KEYS}
    threads = ns.threads
    env = os.environ.get("GRIDHOM_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError as exc:
            raise ContractViolation(f"GRIDHOM_THREADS must be an integer, got {env!r}") from exc
    fmt = ns.format or ("text" if ns.command in TEXT_DEFAULT else "json")
    inputs = [params[k] for k in ("input", "system", "instance") if params.get(k)]
    return RunConfig(ns.command, params, seed=ns.seed, fmt=fmt, threads=max(1, threads),
                     max_cells=ns.max_cells, max_subsets=ns.max_subsets,
                     time_limit=ns.time_limit, inputs=inputs)


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out or [(prefix, "[]")]
    return [(prefix, "null" if obj is None else obj)]


def render(cfg: RunConfig, report: dict, text: str | None = None) -> str:
    if cfg.fmt == "json":
        return dumps(report)
    if cfg.fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(_flatten(report))
        return buf.getvalue()
    if text is not None:
        return text + "\n"
    return "".join(f"{k}: {v}\n" for k, v in _flatten(report))


def _envelope(cfg: RunConfig, body: dict, status: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": cfg.command, "status": status, **body}


def _on_alarm(signum, frame):
    raise ResourceLimitError("wall-clock limit reached")


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    random.seed(cfg.seed)
    if cfg.time_limit:
        signal.signal(signal.SIGALRM, _on_alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.time_limit)
    try:
        result = COMMANDS[cfg.command](cfg)
        status = {EXIT_OK: "ok", EXIT_VERIFY: "verification_failed", EXIT_LIMIT: "resource_limit"}[result.status]
        out.write(render(cfg, _envelope(cfg, result.report, status),
                         result.text if result.status == EXIT_OK else None))
        return result.status
    except VerificationFailure as exc:
        body = {"error": str(exc), "counterexample": exc.counterexample}
        out.write(render(cfg, _envelope(cfg, body, "verification_failed")))
        return EXIT_VERIFY
    except ResourceLimitError as exc:
        body = {"error": str(exc), "partial": _jsonable(exc.partial)}
        out.write(render(cfg, _envelope(cfg, body, "resource_limit")))
        return EXIT_LIMIT
    except ContractViolation as exc:
        err.write(f"gridhom {cfg.command}: error: {exc}\n")
        return EXIT_INPUT
    finally:
        if cfg.time_limit:
            signal.setitimer(signal.ITIMER_REAL, 0)


def _jsonable(x: Any) -> Any:
    if x is None or isinstance(x, (bool, str, float, dict, list)):
        return x
    if isinstance(x, int):
        return x if abs(x) < 2 ** 53 else str(x)
    return str(x)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ContractViolation as exc:
        print(f"gridhom: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return run(cfg)
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
