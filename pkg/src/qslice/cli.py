"""Command-line front end.

Every command builds a JSON report that embeds its configuration.  Exit
status: 0 when all internal cross-checks pass, 2 on usage errors, 3 when a
cross-check fails.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import hypertoric as ht
from . import modelgeom as mg
from . import strata as st
from .exact import dumps, fmt, to_rational
from .polyhedra import CrossCheckError
from .rootlat import DimVector, FramedSetting, Quiver, extend, positive_roots_below

log = logging.getLogger("qslice")

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 2, 3
COMMANDS = ("roots", "flat-check", "leaves", "slice", "classify", "chambers", "sweep", "modelcheck")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    ell: int | None = None
    w: int | None = None
    lam: str | None = None
    format: str = "json"
    seed: int = 0
    jobs: int = 1
    quiver: str | None = None
    window: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "extra" and v is not None}
        if "lam" in out:
            out["lambda"] = out.pop("lam")
        out.update({k: v for k, v in self.extra.items() if v is not None})
        return out


@dataclass
class Outcome:
    report: dict
    text: list[str]
    ok: bool = True


# ---------------------------------------------------------------------------
# helpers


def _need(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        flags = {"n": "--n", "ell": "--loops", "w": "--framing", "lam": "--lambda", "window": "--window"}
        raise UsageError(f"{cfg.command} needs {', '.join(flags.get(m, m) for m in missing)}")


def _lam(cfg: RunConfig) -> Fraction:
    try:
        return to_rational(cfg.lam)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"cannot parse lambda {cfg.lam!r} as an exact rational") from exc


def _load_quiver(path: str) -> Quiver:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return Quiver.from_json(data)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read quiver from {path}: {exc}") from exc


def _json_arg(text: str | None, what: str) -> dict | None:
    if text is None:
        return None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} must be a JSON object: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{what} must be a JSON object")
    return data


def _setting(cfg: RunConfig) -> FramedSetting:
    """A framed setting from ``--quiver`` (+ ``--dim``/``--frame``) or the flower flags."""
    if cfg.quiver:
        q = _load_quiver(cfg.quiver)
        dim = _json_arg(cfg.extra.get("dim"), "--dim") or {}
        frame = _json_arg(cfg.extra.get("frame"), "--frame") or {}
        return FramedSetting(q, DimVector.on(q, dim), DimVector.on(q, frame))
    _need(cfg, "n", "ell", "w")
    return FramedSetting.flower(cfg.ell, cfg.n, cfg.w)


def _window(cfg: RunConfig) -> tuple[int, int]:
    try:
        a, b = cfg.window.split(":")
        lo, hi = int(a), int(b)
    except (AttributeError, ValueError) as exc:
        raise UsageError("--window takes a:b with integers a <= b") from exc
    if lo > hi:
        raise UsageError("--window takes a:b with integers a <= b")
    return lo, hi


def _int_list(text: str | None, what: str) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"{what} takes comma-separated integers") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_roots(cfg: RunConfig) -> Outcome:
    if cfg.quiver:
        q = _load_quiver(cfg.quiver)
        bound = DimVector.on(q, _json_arg(cfg.extra.get("bound"), "--bound") or {})
    else:
        qx, bound = extend(_setting(cfg))
        q = qx
    roots = positive_roots_below(q, bound)
    report = {"quiver": q.to_json(), "bound": bound.as_dict(), "count": len(roots), "roots": [r.as_dict() for r in roots]}
    text = [f"{len(roots)} positive roots below {bound}"] + [f"  {r}" for r in roots]
    return Outcome(report, text)


def cmd_flat(cfg: RunConfig) -> Outcome:
    s = _setting(cfg)
    flat = st.moment_map_flat(s)
    return Outcome({"flat": flat}, [f"moment map flat: {flat}"])


def _leaf_entry(tau: st.RepresentationType, all_types) -> tuple[dict, bool]:
    dim = st.stratum_dim(tau)
    relevant = st.is_relevant(tau)
    codim = st.min_boundary_codim(tau, all_types) if relevant else None
    ok = True
    if relevant:
        closed = st.relevant_leaf_dim(st.leaf_spec(tau))
        ok = closed == dim
        if not ok:
            log.error("leaf %s: stratum_dim %d vs closed form %d", tau, dim, closed)
    entry = {"tau": tau.to_json(), "dim": dim, "relevant": relevant, "boundary_codim": codim}
    return entry, ok


def cmd_leaves(cfg: RunConfig) -> Outcome:
    _need(cfg, "n", "ell", "w")
    s = FramedSetting.flower(cfg.ell, cfg.n, cfg.w)
    types = st.enumerate_rep_types(s)
    entries, ok = [], True
    text = [f"{len(types)} representation types"]
    for tau in types:
        e, good = _leaf_entry(tau, types)
        ok &= good
        entries.append(e)
        codim = "-" if e["boundary_codim"] is None else e["boundary_codim"]
        text.append(f"  dim {e['dim']:>3}  relevant {str(e['relevant']):<5}  codim {codim:>2}  {tau}")
    return Outcome({"count": len(types), "leaves": entries}, text, ok)


def cmd_slice(cfg: RunConfig) -> Outcome:
    _need(cfg, "n", "ell", "w")
    parts = _int_list(cfg.extra.get("parts"), "--parts")
    n0 = cfg.extra.get("n0")
    if not parts and n0 is None:
        spec = st.FlowerLeafSpec.minimal(cfg.n, cfg.ell, cfg.w)
    else:
        spec = st.FlowerLeafSpec(cfg.n, cfg.ell, cfg.w, n0 or 0, parts)
    sl = st.slice_quiver(st.flower_type(spec))
    report = {"slice": sl.to_json(), "n0": spec.n0, "parts": list(spec.parts)}
    text = [
        f"slice quiver: {len(sl.quiver)} vertices, {len(sl.quiver.arrows)} arrows"
        + (" (loops removed)" if sl.loops_removed else ""),
        f"  v = {sl.v}",
        f"  w = {sl.w}",
        f"  loops per vertex = {list(sl.loop_counts)}",
    ]
    if cfg.lam is not None:
        r = st.restrict_parameter(_lam(cfg), spec)
        report["restricted_lambda"] = r.as_dict()
        text.append(f"  r(lambda) = {[fmt(x) for x in r.values]}")
    return Outcome(report, text)


def _orderings_ok(chambers, n: int, count: int, expected: int) -> bool:
    if count != expected:
        return False
    if not chambers:
        return True
    orders = {ht.chamber_to_ordering(c.sign, n) for c in chambers}
    return len(orders) == len(chambers)


def cmd_classify(cfg: RunConfig) -> Outcome:
    _need(cfg, "n", "ell", "w", "lam")
    lam = _lam(cfg)
    lattice = cfg.extra.get("lattice") or "all"
    arr = ht.build_reduced(cfg.n, cfg.ell, cfg.w, lam)
    chambers = ht.enumerate_bounded(arr, jobs=cfg.jobs, lattice=lattice)
    report = ht.report(arr, chambers)
    ok = _orderings_ok(chambers, cfg.n, report["count"], report["expected"])
    text = [f"n={cfg.n} ell={cfg.ell} w={cfg.w} lambda={fmt(lam)}: {report['count']} bounded chambers (expected {report['expected']})"]
    for c in report["chambers"]:
        signs = " ".join(f"{k}{v}" for k, v in c["signs"].items())
        extra = f", {len(c['lattice_points'])} lattice points" if "lattice_points" in c else ""
        text.append(f"  ordering {tuple(c['ordering'])}: {signs}{extra}")
    if cfg.extra.get("full"):
        full = ht.enumerate_bounded(ht.build_full(ht.minimal_slice(cfg.n, cfg.ell, cfg.w), lam), jobs=cfg.jobs, lattice="none")
        images = sorted(tuple(sorted(ht.reduce_chamber(c).as_dict().items())) for c in full)
        agree = images == sorted(tuple(sorted(c.sign.as_dict().items())) for c in chambers)
        agree = agree and len(set(images)) == len(images)
        report["full_count"] = len(full)
        report["full_agrees"] = agree
        ok &= agree
        text.append(f"  full arrangement: {len(full)} bounded chambers, bijection {'ok' if agree else 'FAILED'}")
    return Outcome(report, text, ok)


def cmd_chambers(cfg: RunConfig) -> Outcome:
    _need(cfg, "n", "ell", "w", "lam")
    lam = _lam(cfg)
    lattice = cfg.extra.get("lattice") or "none"
    if cfg.extra.get("full"):
        arr = ht.build_full(ht.minimal_slice(cfg.n, cfg.ell, cfg.w), lam)
    else:
        arr = ht.build_reduced(cfg.n, cfg.ell, cfg.w, lam)
    rows, counts = [], {ht.EMPTY: 0, ht.BOUNDED: 0, ht.UNBOUNDED: 0}
    text = []
    for sv in ht.all_sign_vectors(arr):
        ch = ht.chamber_status(arr, sv, lattice=lattice)
        counts[ch.status] += 1
        rows.append(ht.chamber_json(ch))
        text.append(f"  {ch.status:<9} {sv}")
    report = {
        "kind": ht.kind_of(arr),
        "lambda": fmt(lam),
        "variables": list(arr.variables),
        "signed_variables": list(arr.signed_variables),
        "totals": counts,
        "chambers": rows,
    }
    head = f"{len(rows)} sign vectors: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
    return Outcome(report, [head] + text)


def cmd_sweep(cfg: RunConfig) -> Outcome:
    _need(cfg, "n", "ell", "w", "window")
    lo, hi = _window(cfg)
    rows, ok = [], True
    text = [f"{'lambda':>7} {'count':>6} {'expected':>8}"]
    for lam in range(lo, hi + 1):
        arr = ht.build_reduced(cfg.n, cfg.ell, cfg.w, lam)
        count = len(ht.enumerate_bounded(arr, jobs=cfg.jobs))
        expected = ht.reference_count(cfg.n, cfg.ell, cfg.w, lam)
        good = count == expected
        ok &= good
        rows.append({"lambda": fmt(Fraction(lam)), "count": count, "expected": expected, "ok": good})
        text.append(f"{lam:>7} {count:>6} {expected:>8}" + ("" if good else "  MISMATCH"))
    return Outcome({"rows": rows, "all_ok": ok}, text, ok)


def cmd_modelcheck(cfg: RunConfig) -> Outcome:
    _need(cfg, "ell")
    point = cfg.extra.get("point")
    if point:
        try:
            p = mg.LeafPoint.from_flat([to_rational(x) for x in point.split(",")])
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--point takes 2*ell comma-separated rationals: {exc}") from exc
        if p.ell != cfg.ell:
            raise UsageError("--point must have 2*ell entries")
        m = mg.transition_matrix(p)
        ok = m == mg.closed_form(p) and mg.is_unipotent(m)
        rows = [[fmt(x) for x in row] for row in m]
        return Outcome({"point": [fmt(x) for x in p.flat()], "matrix": rows, "ok": ok}, [" ".join(f"{x:>8}" for x in r) for r in rows], ok)
    samples = cfg.extra.get("samples") or 20
    res = mg.modelcheck(cfg.ell, samples, cfg.seed)
    log.info("modelcheck seed=%d", cfg.seed)
    return Outcome(res.to_json(), [res.summary()], res.ok)


HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "roots": cmd_roots,
    "flat-check": cmd_flat,
    "leaves": cmd_leaves,
    "slice": cmd_slice,
    "classify": cmd_classify,
    "chambers": cmd_chambers,
    "sweep": cmd_sweep,
    "modelcheck": cmd_modelcheck,
}


def run(cfg: RunConfig) -> tuple[dict, int, list[str]]:
    """Dispatch a validated config; returns (report, exit status, text lines)."""
    if cfg.command not in HANDLERS:
        raise UsageError(f"unknown command {cfg.command!r}")
    for name in ("n", "ell", "w"):
        v = getattr(cfg, name)
        if v is not None and v < 0:
            raise UsageError(f"--{name} must be nonnegative")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        out = HANDLERS[cfg.command](cfg)
    except CrossCheckError as exc:
        report = {"command": cfg.command, "config": cfg.to_json(), "ok": False, "error": str(exc)}
        return report, EXIT_MISMATCH, [f"cross-check failed: {exc}"]
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    report = {"command": cfg.command, "config": cfg.to_json(), "ok": out.ok, "result": out.report}
    return report, (EXIT_OK if out.ok else EXIT_MISMATCH), out.text


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="dimension n at the flower vertex")
    common.add_argument("--loops", dest="ell", type=int, help="number of loops ell")
    common.add_argument("--framing", dest="w", type=int, help="framing w")
    common.add_argument("--lambda", dest="lam", help="quantization parameter, exact rational like 3 or -1/2")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for chamber enumeration")
    common.add_argument("--quiver", help="path to a JSON quiver")

    parser = argparse.ArgumentParser(prog="qslice", description="Quiver-variety leaves and slice chamber counts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", parents=[common], help="positive roots below a bound")
    p.add_argument("--bound", help='JSON bound for --quiver, e.g. {"0": 2, "inf": 1}')
    p = sub.add_parser("flat-check", parents=[common], help="flatness of the moment map")
    p.add_argument("--dim", help="JSON dimension vector for --quiver")
    p.add_argument("--frame", help="JSON framing vector for --quiver")
    sub.add_parser("leaves", parents=[common], help="representation types, dimensions, boundary codimensions")
    p = sub.add_parser("slice", parents=[common], help="slice quiver of a flower leaf")
    p.add_argument("--n0", type=int, help="alpha-multiplicity of the framed part")
    p.add_argument("--parts", help="comma-separated sizes n_1,...,n_k (default: minimal leaf)")
    for name, helptext in (("classify", "bounded chambers and orderings"), ("chambers", "status of every sign vector")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--full", action="store_true", help="use the full arrangement (classify: also cross-check it)")
        p.add_argument("--lattice", choices=ht.LATTICE_MODES, help="lattice points to report")
    p = sub.add_parser("sweep", parents=[common], help="tabulate counts over a lambda window")
    p.add_argument("--window", required=True, help="integer window a:b")
    p = sub.add_parser("modelcheck", parents=[common], help="frames and transition matrix checks")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--point", help="comma-separated 2*ell rationals s_1..s_l,t_1..t_l")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = {"command", "n", "ell", "w", "lam", "format", "seed", "jobs", "quiver", "window"}
    extra = {k: v for k, v in vars(ns).items() if k not in base}
    return RunConfig(
        command=ns.command,
        n=ns.n,
        ell=ns.ell,
        w=ns.w,
        lam=ns.lam,
        format=ns.format,
        seed=ns.seed,
        jobs=ns.jobs,
        quiver=ns.quiver,
        window=getattr(ns, "window", None),
        extra=extra,
    )


def _setup_logging() -> None:
    level = os.environ.get("QS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


VALUE_FLAGS = ("--lambda", "--window", "--point")


def _join_values(argv: Sequence[str]) -> list[str]:
    """Glue ``--lambda -2/3`` into ``--lambda=-2/3``: argparse would read a
    leading minus on a non-decimal token as another option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    ns = parser.parse_args(_join_values(sys.argv[1:] if argv is None else argv))
    cfg = config_from_args(ns)
    try:
        report, status, text = run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qslice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.format == "json":
        sys.stdout.write(dumps(report) + "\n")
    else:
        sys.stdout.write("\n".join(text) + "\n")
        if status == EXIT_MISMATCH:
            sys.stdout.write("cross-check: FAILED\n")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
