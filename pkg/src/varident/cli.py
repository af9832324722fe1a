"""Command-line entry point.

Exit codes: 0 success, 1 usage or domain error, 2 when ``identify`` finds a
pair that satisfies none of the criteria.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TypeVar

import numpy as np

from . import checks
from .errors import InputError, SingularSystemError, VarIdentError
from .graph import MaximalClassSet, has_multi_edge, load_graph, maximal_classes
from .identify import NOT_SATISFIED, identify_family, matroid_witness_check
from .jacobian import DEFAULT_RANK_TOL, dimension, extended_jacobian, generic_rank
from .recovery import graphs_from_maxclasses, maxclasses_from_support
from .sim import (
    burn_in_steps,
    read_samples_csv,
    recover_from_samples,
    sample_stationary,
    simulate_trajectory,
    write_samples_csv,
)
from .stationary import (
    VarParameters,
    load_parameters,
    read_matrix_csv,
    sample_generic_parameters,
    solve_stationary,
    support_of,
    write_matrix_csv,
)

RETRIES = 5
RETRY_STRIDE = 1_000_003
T = TypeVar("T")


@dataclass
class RunConfig:
    seed: int | None = None
    trials: int = 5
    rank_tolerance: float = DEFAULT_RANK_TOL
    threshold: float | str = "auto"
    max_results: int = 1024
    output_path: Path | None = None
    pretty: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InputError("--trials must be positive")
        if not self.rank_tolerance > 0:
            raise InputError("--rank-tol must be positive")
        if self.max_results < 1:
            raise InputError("--max-results must be positive")
        if self.threshold != "auto" and not float(self.threshold) >= 0:
            raise InputError("--threshold must be 'auto' or nonnegative")

    def require_seed(self, what: str) -> int:
        if self.seed is None:
            raise InputError(f"{what} is stochastic: pass --seed")
        return self.seed


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> float | str:
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or a number") from None


def _emit(cfg: RunConfig, payload) -> None:
    text = json.dumps(payload, indent=2 if cfg.pretty else None)
    if cfg.output_path is not None:
        cfg.output_path.write_text(text + "\n")
    else:
        print(text)


def with_retry(seed: int, fn: Callable[[int], T]) -> T:
    """Call ``fn`` with derived seeds until it avoids a singular system."""
    last: SingularSystemError | None = None
    for k in range(RETRIES):
        try:
            return fn(seed + RETRY_STRIDE * k)
        except SingularSystemError as exc:
            last = exc
    assert last is not None
    raise last


def _params_or_sample(args, cfg: RunConfig) -> VarParameters:
    if args.params:
        return load_parameters(args.params)
    g = load_graph(args.graph)
    seed = cfg.require_seed("sampling parameters")

    def draw(s: int) -> VarParameters:
        p = sample_generic_parameters(g, s)
        solve_stationary(p)
        return p

    return with_retry(seed, draw)


def cmd_maxc(args, cfg: RunConfig) -> int:
    _emit(cfg, maximal_classes(load_graph(args.graph)).to_dict())
    return 0


def cmd_graphs_from_maxc(args, cfg: RunConfig) -> int:
    data = json.loads(Path(args.classes).read_text())
    mc = MaximalClassSet.from_dict(data)
    res = graphs_from_maxclasses(mc, cfg.max_results, args.budget)
    _emit(
        cfg,
        {
            "graphs": [g.to_dict() for g in res.graphs],
            "complete": res.complete,
            "subsets_explored": res.explored,
            "allowed_edges": [list(e) for e in res.allowed_edges],
        },
    )
    return 0


def cmd_stationary_cov(args, cfg: RunConfig) -> int:
    p = _params_or_sample(args, cfg)
    sigma = solve_stationary(p).sigma
    if args.csv:
        write_matrix_csv(args.csv, sigma)
    _emit(cfg, {"params": p.to_dict(), "sigma": sigma.tolist()})
    return 0


def cmd_jacobian(args, cfg: RunConfig) -> int:
    p = _params_or_sample(args, cfg)
    b = extended_jacobian(p)
    out = {
        "row_labels": list(b.row_labels),
        "col_labels": list(b.col_labels_reduced),
        "reduced": b.reduced.tolist(),
        "col_labels_extended": list(b.col_labels_extended),
        "extended": b.extended.tolist(),
    }
    if cfg.seed is not None:
        r = generic_rank(p.graph, cfg.trials, cfg.seed, cfg.rank_tolerance)
        out["rank_report"] = {
            "rank": r.rank,
            "trials": r.trials,
            "singular_value_gap": r.singular_value_gap if np.isfinite(r.singular_value_gap) else None,
            "seeds_used": list(r.seeds_used),
        }
    _emit(cfg, out)
    return 0


def cmd_dim(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    seed = cfg.require_seed("a graph with a multi-edge") if has_multi_edge(g) else cfg.seed
    _emit(cfg, dimension(g, cfg.trials, seed, cfg.rank_tolerance).to_dict())
    return 0


def cmd_identify(args, cfg: RunConfig) -> int:
    gs = [load_graph(p) for p in args.graphs]
    if args.witness_check:
        cfg.require_seed("--witness-check")
    rep = identify_family(gs, args.trust_numeric_dims, cfg.seed, cfg.trials, cfg.rank_tolerance)
    out = rep.to_dict()
    if args.witness_check:
        checks_out = []
        for v in rep.verdicts:
            if v.criterion in ("same_dim_different_maxclasses", "cross_maxclass_condition"):
                i, j = v.pair
                ok = matroid_witness_check(gs[i], gs[j], v, cfg.seed, cfg.trials, cfg.rank_tolerance)
                checks_out.append({"pair": [i, j], "confirmed": ok})
        out["witness_checks"] = checks_out
    _emit(cfg, out)
    return 2 if any(v.verdict == NOT_SATISFIED for v in rep.verdicts) else 0


def cmd_recover(args, cfg: RunConfig) -> int:
    if args.samples:
        rep = recover_from_samples(read_samples_csv(args.samples), cfg.threshold)
    else:
        m = read_matrix_csv(args.sigma)
        t = None if cfg.threshold == "auto" else float(cfg.threshold)
        rep = maxclasses_from_support(support_of(m, t))
    _emit(cfg, rep.to_dict())
    return 0


def cmd_simulate(args, cfg: RunConfig) -> int:
    p = load_parameters(args.params)
    seed = cfg.require_seed("simulate")
    if args.mode == "iid":
        b = sample_stationary(p, args.count, seed)
    else:
        burn = burn_in_steps(p) if args.burn_in is None else args.burn_in
        b = simulate_trajectory(p, args.count + burn, seed, burn_in=burn)
    if args.out_csv:
        write_samples_csv(args.out_csv, b)
        _emit(cfg, {"written": str(args.out_csv), "count": b.count, "source": b.source, "seed": seed})
    else:
        np.savetxt(sys.stdout, b.samples, delimiter=",", fmt="%.17g")
    return 0


def cmd_paper_examples(args, cfg: RunConfig) -> int:
    results = checks.run_all(full=args.full)
    for r in results:
        print(r.line())
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base random seed")
    common.add_argument("--trials", type=int, default=5, help="parameter draws for generic rank")
    common.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL, dest="rank_tol")
    common.add_argument("--threshold", type=_threshold, default="auto")
    common.add_argument("--max-results", type=int, default=1024, dest="max_results")
    common.add_argument("--output", type=Path, default=None, help="write JSON here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indent JSON output")

    parser = _Parser(prog="varident", description="Identifiability of VAR(1) interaction graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, fn, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("maxc", cmd_maxc, "maximal classes of a graph")
    sp.add_argument("--graph", required=True)

    sp = add("graphs-from-maxc", cmd_graphs_from_maxc, "graphs realizing a maximal-class set")
    sp.add_argument("--classes", required=True)
    sp.add_argument("--budget", type=int, default=2**20, help="edge subsets to examine")

    for name, fn, text in (
        ("stationary-cov", cmd_stationary_cov, "stationary covariance"),
        ("jacobian", cmd_jacobian, "Jacobian of the covariance parametrization"),
    ):
        sp = add(name, fn, text)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--params", help="parameters JSON")
        src.add_argument("--graph", help="graph file; parameters are drawn with --seed")
        if name == "stationary-cov":
            sp.add_argument("--csv", type=Path, default=None, help="also write the matrix as CSV")

    sp = add("dim", cmd_dim, "model dimension")
    sp.add_argument("--graph", required=True)

    sp = add("identify", cmd_identify, "pairwise identifiability of a graph family")
    sp.add_argument("--graphs", nargs="+", required=True)
    sp.add_argument("--trust-numeric-dims", action="store_true")
    sp.add_argument("--witness-check", action="store_true")

    sp = add("recover", cmd_recover, "maximal classes from a covariance or samples")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--sigma", help="covariance matrix CSV")
    src.add_argument("--samples", help="samples CSV, one draw per row")

    sp = add("simulate", cmd_simulate, "draw samples from a VAR(1) model")
    sp.add_argument("--params", required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--mode", choices=("iid", "trajectory"), default="iid")
    sp.add_argument("--burn-in", type=int, default=None, dest="burn_in")
    sp.add_argument("--out", type=Path, default=None, dest="out_csv", help="samples CSV path")

    sp = add("paper-examples", cmd_paper_examples, "run the bundled example checks")
    sp.add_argument("--full", action="store_true", help="include the slow property checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = RunConfig(
            args.seed,
            args.trials,
            args.rank_tol,
            args.threshold,
            args.max_results,
            args.output,
            args.pretty,
        )
        return args.func(args, cfg)
    except (VarIdentError, OSError, json.JSONDecodeError) as exc:
        print(f"varident: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
