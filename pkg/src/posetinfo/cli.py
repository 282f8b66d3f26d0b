"""``posetinfo`` command-line interface.

Every invocation writes one JSON report ``{command, version, config, result}``.
Exit status is 0 on success, 1 on invalid input and 2 when a solver fails;
errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .coordinates import Distribution, eta_from_p, theta_from_p
from .decomposition import (
    Subvaluation,
    chain_decompose,
    entropy,
    kl,
    pythagoras_split,
)
from .errors import PosetInfoError, SolverError, ValidationError
from .learning import (
    ClusteredDataset,
    IntVectorDataset,
    TransactionDataset,
    learn_from_clusters,
    learn_from_int_vectors,
    learn_from_transactions,
)
from .mutual_info import (
    JointTable,
    mi_chain_decompose,
    mixed_conditionals,
    mutual_information,
    refined_mi,
)
from .projection import DEFAULT_CONFIG, SolverConfig, mix
from .scan import default_parallelism, gain_scan
from .significance import chi2_survival, g_test

ALL = "ALL"
EMPTY = ("∅", "{}", "[]", "")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for solver failures
    def error(self, message):
        raise UsageError(message)


# input helpers ---------------------------------------------------------------

def _load_json(path) -> dict:
    if path is None:
        raise ValidationError("--input is required")
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read file: {exc.strerror}", source=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg}", source=f"{path}:{exc.lineno}") from None
    # a report from another command can be fed back in
    if isinstance(data, dict) and "command" in data and "result" in data:
        data = data["result"]
    if not isinstance(data, dict):
        raise ValidationError("expected a JSON object", source=str(path))
    return data


def _load_distribution(path) -> tuple[Distribution, dict]:
    data = _load_json(path)
    try:
        return Distribution.from_dict(data), data
    except PosetInfoError as exc:
        exc.source = exc.source or str(path)
        raise


def _resolve_level(poset, tokens) -> list[str]:
    if tokens == [ALL]:
        return list(poset.labels[1:])
    return [poset.label(poset.index(t)) for t in tokens]


def parse_level(poset, text) -> list[str]:
    """One subset: ``∅``, ``ALL``, a JSON list or whitespace-separated labels."""
    if isinstance(text, list):
        if len(text) == 1:
            text = text[0]
        else:
            return _resolve_level(poset, text)
    text = text.strip()
    if text in EMPTY:
        return []
    if text.startswith("["):
        try:
            tokens = json.loads(text)
        except json.JSONDecodeError:
            raise ValidationError(f"cannot parse subset {text!r}") from None
        if not isinstance(tokens, list):
            raise ValidationError(f"subset must be a JSON list, got {text!r}")
        return _resolve_level(poset, [str(t) for t in tokens])
    return _resolve_level(poset, text.split())


def parse_chain(poset, text: str) -> list[list[str]]:
    """Levels separated by ``;``, e.g. ``"∅;x1;ALL"``."""
    return [parse_level(poset, level) for level in text.split(";")]


def _solver(args) -> SolverConfig:
    cfg = DEFAULT_CONFIG
    changes = {}
    if args.theta_tol is not None:
        if not args.theta_tol > 0:
            raise ValidationError("--theta-tol must be positive")
        changes["theta_tol"] = args.theta_tol
    if args.max_outer is not None:
        if args.max_outer < 1:
            raise ValidationError("--max-outer must be at least 1")
        changes["max_outer"] = args.max_outer
    return SolverConfig.from_dict({**cfg.to_dict(), **changes})


def _sample_size(args, data: dict) -> int:
    n = args.N if args.N is not None else data.get("N")
    if n is None:
        raise ValidationError("a sample size is required: pass --N or use a learned model")
    return int(n)


def _pmap(d: Distribution) -> dict:
    return d.as_dict()


# commands --------------------------------------------------------------------

def cmd_coords(args, cfg):
    p, _ = _load_distribution(args.input)
    theta = theta_from_p(p)
    return {
        "p": _pmap(p),
        "theta": theta.as_dict(),
        "eta": eta_from_p(p).as_dict(),
        "psi": theta.psi,
    }


def _load_q(args, p: Distribution) -> Distribution:
    if args.q_input is None:
        return Distribution.uniform(p.poset)
    q, _ = _load_distribution(args.q_input)
    return q


def cmd_project(args, cfg):
    p, _ = _load_distribution(args.input)
    q = _load_q(args, p)
    subset = parse_level(p.poset, args.subset or [])
    r, stats = mix(p, q, subset, cfg)
    return {
        "I": subset,
        "q": "uniform" if args.q_input is None else "input",
        "r": _pmap(r),
        "theta_r": theta_from_p(r).as_dict(),
        "kl_p_r": kl(p, r),
        "kl_r_q": kl(r, q),
        "kl_p_q": kl(p, q),
        "solver_stats": stats.to_dict(),
    }


def cmd_decompose(args, cfg):
    p, _ = _load_distribution(args.input)
    q = _load_q(args, p)
    text = args.chain if args.chain is not None else f"∅;{ALL}"
    terms = chain_decompose(p, q, parse_chain(p.poset, text), cfg)
    return {
        "chain": text,
        "terms": [t.to_dict() for t in terms],
        "sum_of_terms": math.fsum(t.kl_value for t in terms),
        "total": kl(p, q),
    }


def cmd_entropy(args, cfg):
    p, _ = _load_distribution(args.input)
    uniform = Distribution.uniform(p.poset)
    out = {
        "entropy": entropy(p),
        "log_size": math.log(len(p.poset)),
        "kl_to_uniform": kl(p, uniform),
    }
    if args.subset:
        subset = parse_level(p.poset, args.subset)
        gain, rest = pythagoras_split(p, uniform, subset, cfg)
        out.update({"I": subset, "information_gain": gain, "kl_knockdown_to_uniform": rest})
    return out


def cmd_gain_scan(args, cfg):
    p, data = _load_distribution(args.input)
    n = _sample_size(args, data)
    workers = args.parallel if args.parallel is not None else default_parallelism()
    rows = gain_scan(p, n, cfg, args.dof, workers)
    return {"N": n, "rows": [row.to_dict() for row in rows]}


def cmd_metric(args, cfg):
    p, _ = _load_distribution(args.input)
    v = Subvaluation(p, cfg)
    poset = p.poset
    values = v.v
    graph = poset.covering_graph()
    edges = [{"lower": lo, "upper": up, "weight": v.edge_weight(lo, up)} for lo, up in graph.edges]
    distances = []
    labels = poset.labels
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            top = poset.join(x, y)
            if top is not None:
                distances.append({"x": x, "y": y, "join": top, "d": v.distance(x, y)})
    return {"v": values, "edges": edges, "distances": distances}


def cmd_gtest(args, cfg):
    p, data = _load_distribution(args.input)
    subset = parse_level(p.poset, args.subset or [])
    n = _sample_size(args, data)
    res = g_test(p, subset, n, args.dof, cfg)
    out = res.to_dict()
    out["alternative"] = {
        "dof_convention": "|I|",
        "dof": len(subset),
        "p_value": chi2_survival(res.lambda_, len(subset)),
    }
    return out


def cmd_mi(args, cfg):
    data = _load_json(args.input)
    try:
        table = JointTable.from_dict(data, smoothing=args.smoothing)
    except PosetInfoError as exc:
        exc.source = exc.source or str(args.input)
        raise
    poset = table.poset
    out = {"mutual_information": mutual_information(table), "p_y": dict(zip(table.y_labels, table.p_y.tolist()))}
    if args.subset:
        subset = parse_level(poset, args.subset)
        mixed = mixed_conditionals(table, subset, cfg)
        out["I"] = subset
        out["mixed_conditionals"] = {y: d.as_dict() for y, d in zip(table.y_labels, mixed)}
        out["refined_mi"] = refined_mi(table, [], subset, cfg).value
    if args.chain:
        terms = mi_chain_decompose(table, parse_chain(poset, args.chain), cfg)
        out["chain"] = args.chain
        out["terms"] = [t.to_dict() for t in terms]
        out["sum_of_terms"] = math.fsum(t.value for t in terms)
    if args.all_singletons:
        scores = [(lab, refined_mi(table, [], [lab], cfg).value) for lab in poset.labels[1:]]
        out["singletons"] = {lab: val for lab, val in scores}
        out["ranking"] = [lab for lab, _ in sorted(scores, key=lambda s: -s[1])]
    return out


def cmd_learn(args, cfg):
    if args.sigma is None:
        raise ValidationError("--sigma is required")
    given = [args.transactions is not None, args.vectors is not None,
             args.points is not None or args.clusters is not None]
    if sum(given) != 1:
        raise ValidationError("give exactly one of --transactions, --vectors or --points/--clusters")
    if args.transactions is not None:
        model = learn_from_transactions(TransactionDataset.from_file(args.transactions), args.sigma)
    elif args.vectors is not None:
        model = learn_from_int_vectors(IntVectorDataset.from_csv(args.vectors), args.sigma)
    else:
        if args.points is None or args.clusters is None:
            raise ValidationError("clustered data needs both --points and --clusters")
        data = ClusteredDataset.from_files(args.points, args.clusters)
        model = learn_from_clusters(data, args.sigma)
    return model.to_dict()


COMMANDS = {
    "coords": (cmd_coords, "θ, η and ψ of a distribution"),
    "project": (cmd_project, "mixed distribution of p and q (q uniform by default)"),
    "decompose": (cmd_decompose, "KL divergence split along a chain of subsets"),
    "entropy": (cmd_entropy, "entropy and its knock-down split"),
    "gain-scan": (cmd_gain_scan, "information gain and G-test of every single element"),
    "metric": (cmd_metric, "subvaluation, covering-edge weights and pairwise distances"),
    "gtest": (cmd_gtest, "likelihood-ratio test of a knocked-down subset"),
    "mi": (cmd_mi, "mutual information and its refinements"),
    "learn": (cmd_learn, "learn a poset model from data"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posetinfo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--input", help="distribution, model or joint-table JSON")
    common.add_argument("--q-input", help="second distribution JSON (default: uniform)")
    common.add_argument("--subset", nargs="+", metavar="LABEL",
                        help="element labels, a JSON list, ALL or ∅")
    common.add_argument("--chain", help='nested subsets separated by ";", e.g. "∅;x1;ALL"')
    common.add_argument("--sigma", help="frequency threshold, e.g. 0.2 or 2/25")
    common.add_argument("--dof", type=int, help="override the χ² degrees of freedom")
    common.add_argument("--N", type=int, help="sample size (default: taken from a learned model)")
    common.add_argument("--theta-tol", type=float)
    common.add_argument("--max-outer", type=int)
    common.add_argument("--parallel", type=int, help="worker processes (default: all cores)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--all-singletons", action="store_true")
    common.add_argument("--smoothing", action="store_true",
                        help="add a tiny constant to zero joint cells")
    common.add_argument("--transactions", help="transaction file")
    common.add_argument("--vectors", help="CSV of integer vectors")
    common.add_argument("--points", help="CSV of clustered points")
    common.add_argument("--clusters", help="JSON with assignments, representatives, bottom")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def _echo(args) -> dict:
    keys = ["input", "q_input", "subset", "chain", "sigma", "dof", "N", "parallel",
            "output", "all_singletons", "smoothing", "transactions", "vectors", "points",
            "clusters"]
    return {k: getattr(args, k) for k in keys}


def _error(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    for attr in ("source", "label"):
        if getattr(exc, attr, None) is not None:
            payload[attr] = getattr(exc, attr)
    if isinstance(exc, PosetInfoError):
        payload["message"] = exc.args[0] if exc.args else ""
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _error(exc, 1)
    try:
        cfg = _solver(args)
        if args.parallel is not None and args.parallel < 1:
            raise ValidationError("--parallel must be at least 1")
        result = COMMANDS[args.command][0](args, cfg)
    except ValidationError as exc:
        return _error(exc, 1)
    except SolverError as exc:
        return _error(exc, 2)
    config = _echo(args)
    config["solver"] = cfg.to_dict()
    if args.command == "gain-scan" and args.parallel is None:
        config["parallel"] = default_parallelism()
    report = {"command": args.command, "version": __version__, "config": config,
              "result": result}
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            return _error(ValidationError(f"cannot write report: {exc.strerror}",
                                          source=args.output), 1)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
