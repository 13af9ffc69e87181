"""Command-line front end: build, grow, certify, experiment, verify-golden, replay.

Exit codes: 0 success, 1 theorem-level failure, 2 usage or input error,
3 budget-inconclusive.  Every command that writes results also writes a
manifest next to them; `replay` re-runs a manifest and compares hashes.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraSpec, build_classical, heisenberg, random_anticommutative, turrifiability_witness, is_lie
from .descent import ExperimentConfig
from .extremal import ExtremalError, build_extremal_basis
from .growth import (
    BudgetExceeded,
    GrowthSet,
    NotGenerating,
    canonical,
    diameter_lower_bound,
    fill_time,
    grow_layers,
    layer_records,
    olson_dichotomy,
    single_pair_family,
    symmetric_closure,
    two_pair_family,
)
from .kernel import FieldError, PreconditionError, encode_many, gf
from . import experiments, sumprod

OK, THEOREM, USAGE, BUDGET = 0, 1, 2, 3
GOLDEN_DIR = Path(__file__).resolve().parents[2] / "golden"


class UsageError(Exception):
    pass


# io helpers ------------------------------------------------------------------------


def atomic_write(path: Path, data: str | bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_jsonable)


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serialisable: {type(o)}")


def jsonl(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})")


def load_algebra(path) -> AlgebraSpec:
    obj = load_json(path)
    try:
        return AlgebraSpec.from_json(obj)
    except (KeyError, ValueError) as e:
        raise UsageError(f"{path}: not an algebra file ({e})")


def load_set(g: AlgebraSpec, path, symmetrize: bool) -> GrowthSet:
    obj = load_json(path)
    elems = obj["elements"] if isinstance(obj, dict) else obj
    arr = np.asarray(elems, dtype=np.int64).reshape(-1, g.dim)
    if arr.size and (arr.min() < 0 or arr.max() >= g.ctx.q):
        raise UsageError("set coordinates must be field indices")
    try:
        return GrowthSet.from_elements(g, arr, symmetrize=symmetrize)
    except ValueError as e:
        raise UsageError(str(e))


def write_manifest(out: Path, command: str, argv: list[str], config: dict, inputs: list, outputs: list[Path], seed=None):
    man = {
        "command": command,
        "argv": argv,
        "config": config,
        "seed": seed,
        "tool_version": __version__,
        "inputs": [{"path": str(p), "sha256": sha256_file(p)} for p in inputs],
        "outputs": [{"path": p.name, "sha256": sha256_file(p)} for p in outputs],
    }
    atomic_write(out, json.dumps(man, sort_keys=True, indent=1) + "\n")
    return man


def _manifest_path(out: Path) -> Path:
    return out / "manifest.json" if out.is_dir() else out.with_name(out.name + ".manifest.json")


def _argv_without_out(argv: list[str]) -> list[str]:
    res, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        res.append(a)
    return res


# build ------------------------------------------------------------------------------


def _classical_args(kind: str, rank):
    """`so N` takes the matrix size N; every other type passes its rank through."""
    if kind == "so":
        if rank is None or rank < 3:
            raise UsageError("so needs the matrix size N >= 3")
        return ("so_odd", (rank - 1) // 2) if rank % 2 else ("so_even", rank // 2)
    return kind, rank


def cmd_build(args) -> int:
    try:
        ctx = gf(args.p, args.k)
    except FieldError as e:
        raise UsageError(str(e))
    kind = args.type.lower()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if kind == "heisenberg":
                g = heisenberg(ctx)
            elif kind == "random":
                if args.seed is None or args.dim is None:
                    raise UsageError("random algebras need --dim and --seed")
                g = random_anticommutative(ctx, args.dim, args.seed, args.density)
            else:
                kind, n = _classical_args(kind, args.rank)
                g = build_classical(kind, n, ctx, realization=args.realization, allow_small=args.allow_small)
        except (ValueError, FieldError) as e:
            raise UsageError(str(e))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for flag in g.flags:
        print(f"warning: {flag}", file=sys.stderr)
    obj = g.to_json()
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    out = Path(args.out or f"{g.label}_GF{ctx.q}.json")
    atomic_write(out, text)
    write_manifest(_manifest_path(out), "build", _argv_without_out(args.argv), {"type": kind, "rank": args.rank, "p": args.p, "k": args.k}, [], [out], args.seed)
    print(dumps({"label": g.label, "dim": g.dim, "q": ctx.q, "flags": list(g.flags), "out": str(out)}))
    return OK


# grow -------------------------------------------------------------------------------


def cmd_grow(args) -> int:
    g = load_algebra(args.algebra)
    A = load_set(g, args.set, args.symmetrize)
    budget = {"max_elements": args.max_elements, "max_pairs": args.max_pairs}
    recs: list[dict] = []
    status = OK
    if args.mode == "layers":
        grow_layers(A, args.k, **budget)
        recs = [json.loads(r) for r in layer_records(A, with_elements=args.elements)]
        if len(A.layers) < args.k:
            recs.append({"truncated": True, "note": A.truncation_note})
            status = BUDGET
    elif args.mode == "fill":
        r = fill_time(A, max_k=args.k, **budget)
        recs = [{"fill": r.k, "status": r.status, "sizes": r.sizes}]
        if r.status == "budget":
            status = BUDGET
        elif r.status == "not_generating":
            status = USAGE
    else:
        try:
            r = olson_dichotomy(A, args.k, **budget)
        except BudgetExceeded as e:
            recs = [{"k": args.k, "horn": "inconclusive", "note": str(e)}]
            status = BUDGET
        else:
            recs = [{"k": args.k, "horn": r.horn, "size_k": r.size_k, "size_4k": r.size_4k, "size_6k": r.size_6k, "closure": r.closure}]
            status = OK if r.holds else THEOREM
    text = jsonl(recs)
    if args.out:
        out = Path(args.out)
        atomic_write(out, text)
        write_manifest(_manifest_path(out), "grow", _argv_without_out(args.argv), {"mode": args.mode, "k": args.k, **budget}, [args.algebra, args.set], [out])
    sys.stdout.write(text)
    return status


# certify ----------------------------------------------------------------------------


def cmd_certify(args) -> int:
    g = load_algebra(args.algebra)
    try:
        eb = build_extremal_basis(g)
    except ExtremalError as e:
        print(f"error: sandwich encountered / not classical ({e})", file=sys.stderr)
        return USAGE
    ok = eb.verify()
    obj = {
        "algebra": g.label,
        "dim": g.dim,
        "entries": [json.loads(line) for line in eb.jsonl()],
        "properties": {"a": "verified" if ok else "FAILED", "b": "verified" if ok else "FAILED"},
        "b1_attempts": eb.b1_attempts,
    }
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_jsonable) + "\n"
    out = Path(args.out or f"{g.label}_GF{g.ctx.q}.extremal.json")
    atomic_write(out, text)
    write_manifest(_manifest_path(out), "certify", _argv_without_out(args.argv), {}, [args.algebra], [out])
    print(dumps({"algebra": g.label, "entries": len(obj["entries"]), "properties": obj["properties"], "out": str(out)}))
    return OK if ok else THEOREM


# experiment -------------------------------------------------------------------------

ALGEBRA_CASES = ("dimest", "onedim", "olson", "escape", "i_ii", "iii", "iv")
FIELD_CASES = ("covering", "cauchy-davenport", "growth-ratio")
OTHER_CASES = ("diameter", "turrifiability")


def _failure(case: str, rec: dict) -> int:
    """Exit-status contribution of one record."""
    if rec.get("outcome") == "inconclusive":
        return BUDGET
    if case == "dimest":
        return OK if rec["verdict"] == "holds" else THEOREM
    if case == "onedim":
        return OK if rec["reverified"] and rec["trace_valid"] else THEOREM
    if case in ("olson", "escape"):
        return OK if rec["holds"] else THEOREM
    if case in ("i_ii", "iii", "iv"):
        return OK if rec.get("all_checks_ok", True) else THEOREM
    return OK


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_experiment(args) -> int:
    cfg_obj = load_json(args.config) if args.config else {}
    seed = args.seed if args.seed is not None else cfg_obj.get("seed")
    if seed is None:
        raise UsageError("experiment commands require an explicit seed (--seed or \"seed\" in the config)")
    cfg_obj["seed"] = seed
    try:
        cfg = ExperimentConfig.from_json(cfg_obj)
    except (ValueError, TypeError) as e:
        raise UsageError(f"bad config: {e}")
    case = args.case
    out_dir = Path(args.out)
    inputs = [p for p in (args.algebra, args.config) if p]
    status = OK
    params: dict = {"case": case, "trials": args.trials, "set_size": args.set_size, "t": args.t}
    if case in ALGEBRA_CASES + OTHER_CASES:
        if not args.algebra:
            raise UsageError(f"case {case} needs --algebra")
        g = load_algebra(args.algebra)
    if case in ALGEBRA_CASES:
        try:
            recs = experiments.run_trials(case, g, cfg, args.trials, args.workers, args.set_size, args.t)
        except (NotGenerating, PreconditionError, ValueError) as e:
            raise UsageError(str(e))
        for r in recs:
            status = max(status, _failure(case, r))
        out = out_dir / f"{case}.jsonl"
        atomic_write(out, jsonl(recs))
        summary = _summarise(case, recs)
    elif case == "covering":
        rows = []
        for q in args.q or [7, 9, 11, 13]:
            for d in args.d or [2, 3]:
                rows += sumprod.covering_sweep(q, d, args.trials, seed=seed, workers=args.workers)
        if any(r["verdict"] == "FAULT" for r in rows):
            status = THEOREM
        out = out_dir / "covering.csv"
        atomic_write(out, _csv(rows))
        summary = {"instances": len(rows), "covers": sum(r["verdict"] == "covers" for r in rows), "faults": sum(r["verdict"] == "FAULT" for r in rows)}
        params.update(q=args.q, d=args.d)
    elif case == "cauchy-davenport":
        rows = [sumprod.cauchy_davenport_exhaustive(p) for p in (args.q or [3, 5, 7])]
        if any(r["violations"] for r in rows):
            status = THEOREM
        out = out_dir / "cauchy_davenport.jsonl"
        atomic_write(out, jsonl(rows))
        summary = {"fields": [r["p"] for r in rows], "violations": sum(r["violations"] for r in rows)}
        params.update(q=args.q)
    elif case == "growth-ratio":
        p = (args.q or [101])[0]
        rep = sumprod.growth_ratio_stats(p, args.size, args.trials, seed)
        out = out_dir / "growth_ratio.json"
        atomic_write(out, json.dumps(rep, sort_keys=True, indent=1) + "\n")
        summary = {k: rep[k] for k in ("p", "size", "min", "max")}
        params.update(q=args.q, size=args.size)
    elif case == "diameter":
        fam = two_pair_family(g) if args.family == "two-pair" else single_pair_family(g)
        try:
            rep = diameter_lower_bound(g, fam, max_k=cfg.max_k, workers=args.workers)
        except BudgetExceeded as e:
            print(f"inconclusive: {e}", file=sys.stderr)
            return BUDGET
        obj = _diameter_json(g, rep)
        out = out_dir / "diameter.json"
        atomic_write(out, json.dumps(obj, sort_keys=True, indent=1) + "\n")
        summary = {"max_fill": obj["max_fill"], "members": obj["members"], "generating": obj["generating"]}
        params.update(family=args.family)
    else:  # turrifiability
        recs = []
        for i, rng in enumerate(experiments.trial_rngs(seed, args.trials)):
            x = rng.integers(0, g.ctx.q, size=g.dim)
            Y = symmetric_closure(g, rng.integers(0, g.ctx.q, size=(2, g.dim)))
            r = turrifiability_witness(g, x, Y, args.k)
            recs.append({"trial": i, "status": r.status, "level": r.level, "violation": r.violation, "sizes": r.sizes})
        out = out_dir / "turrifiability.jsonl"
        atomic_write(out, jsonl(recs))
        summary = {s: sum(r["status"] == s for r in recs) for s in ("pass", "violation", "inconclusive")}
        if summary["inconclusive"]:
            status = BUDGET
    write_manifest(out_dir / "manifest.json", "experiment", _argv_without_out(args.argv), {**cfg.to_json(), **params}, inputs, [out], seed)
    print(dumps({"case": case, "seed": seed, "summary": summary, "out": str(out), "exit": status}))
    return status


def _summarise(case: str, recs: list[dict]) -> dict:
    s: dict = {"trials": len(recs), "inconclusive": sum(r.get("outcome") == "inconclusive" for r in recs)}
    if case == "dimest":
        s["holds"] = sum(r.get("verdict") == "holds" for r in recs)
    elif case == "onedim":
        s["growth"] = sum(r.get("outcome") == "growth" for r in recs)
        s["line"] = sum(r.get("outcome") == "line" for r in recs)
        s["reverified"] = sum(bool(r.get("reverified")) for r in recs)
        s["max_steps"] = max((r.get("steps", 0) for r in recs), default=0)
    elif case in ("olson", "escape"):
        s["holds"] = sum(bool(r.get("holds")) for r in recs)
        if case == "olson":
            s["sets_with_short_layers"] = sum(bool(r.get("short_layers")) for r in recs)
    else:
        s["covered"] = sum(bool(r.get("covered")) for r in recs)
        s["checks_ok"] = sum(bool(r.get("all_checks_ok", True)) for r in recs)
    return s


def _diameter_json(g: AlgebraSpec, rep) -> dict:
    arg = None if rep.argmax is None else sorted(int(c) for c in encode_many(g.ctx, rep.argmax))
    return {
        "algebra": g.label,
        "q": g.ctx.q,
        "max_fill": rep.max_fill,
        "argmax_codes": arg,
        "argmax_elements": None if rep.argmax is None else canonical(rep.argmax).tolist(),
        "members": rep.members,
        "generating": rep.generating,
        "histogram": {str(k): v for k, v in rep.histogram.items()},
    }


# golden files -----------------------------------------------------------------------


def _sl2(p):
    return build_classical("sl", 2, gf(p))


def golden_diameter():
    g = _sl2(5)
    return _diameter_json(g, diameter_lower_bound(g, two_pair_family(g), max_k=64))


def golden_fill():
    g = _sl2(5)
    E = np.eye(3, dtype=np.int64)
    A = GrowthSet.from_elements(g, E[:2], symmetrize=True)
    r = fill_time(A)
    return {"set": "symmetric closure of {e12, e21}", "fill": r.k, "sizes": r.sizes}


def golden_growth_ratio():
    # XX+XX+XX saturates at this size, so the smaller expressions are kept too
    return {e: sumprod.growth_ratio_stats(101, 10, 1000, seed=0, expr=e) for e in ("XX+XX+XX", "XX", "X+X")}


def golden_turrifiability():
    g = random_anticommutative(gf(5), 5, 42, density=0.2)
    E = np.eye(5, dtype=np.int64)
    r = turrifiability_witness(g, E[0], symmetric_closure(g, E[1:3]), 4)
    return {
        "algebra": "random anticommutative, dim 5, GF(5), seed 42, density 0.2",
        "is_lie": is_lie(g),
        "status": r.status,
        "level": r.level,
        "violation": None if r.violation is None else r.violation.tolist(),
        "sizes": r.sizes,
    }


def golden_dimest_digest():
    g = _sl2(11)
    recs = experiments.run_trials("dimest", g, ExperimentConfig(seed=0), 40)
    return {"trials": 40, "seed": 0, "holds": sum(r["verdict"] == "holds" for r in recs), "sha256": hashlib.sha256(jsonl(recs).encode()).hexdigest()}


def golden_covering():
    out = {}
    for q in (7, 9, 11, 13):
        for d in (2, 3):
            rows = sumprod.covering_sweep(q, d, 1000, seed=0)
            out[f"q{q}_d{d}"] = {
                "size": rows[0]["size"],
                "instances": len(rows),
                "mode": "exhaustive" if rows[0]["seed"] == "exhaustive" else "seeded",
                "covers": sum(r["verdict"] == "covers" for r in rows),
                "faults": sum(r["verdict"] == "FAULT" for r in rows),
            }
    return out


def golden_cauchy_davenport():
    return [sumprod.cauchy_davenport_exhaustive(p) for p in (3, 5, 7)]


GOLDEN = {
    "cauchy_davenport_small_primes": golden_cauchy_davenport,
    "covering_sweep_counts": golden_covering,
    "diameter_sl2_f5_two_pair": golden_diameter,
    "fill_sl2_f5_e12_e21": golden_fill,
    "growth_ratio_gf101_size10": golden_growth_ratio,
    "turrifiability_random_dim5": golden_turrifiability,
    "dimest_sl2_f11_digest": golden_dimest_digest,
}


def _golden_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_jsonable) + "\n"


def cmd_verify_golden(args) -> int:
    d = Path(args.golden_dir) if args.golden_dir else GOLDEN_DIR
    names = args.only or sorted(GOLDEN)
    unknown = [n for n in names if n not in GOLDEN]
    if unknown:
        raise UsageError(f"unknown golden entries {unknown}")
    if args.bless and not (args.note and args.note.strip()):
        raise UsageError("--bless requires --note describing why the golden values change")
    status = OK
    changed = []
    for n in names:
        text = _golden_text(GOLDEN[n]())
        path = d / f"{n}.json"
        if args.bless:
            old = path.read_text() if path.exists() else None
            if old != text:
                atomic_write(path, text)
                changed.append(n)
            print(dumps({"golden": n, "status": "blessed" if old != text else "unchanged"}))
            continue
        if not path.exists():
            print(dumps({"golden": n, "status": "missing"}))
            status = THEOREM
        elif path.read_text() != text:
            print(dumps({"golden": n, "status": "MISMATCH"}))
            status = THEOREM
        else:
            print(dumps({"golden": n, "status": "ok"}))
    if args.bless:
        log = d / "CHANGELOG.md"
        prev = log.read_text() if log.exists() else "# Golden file changelog\n\n"
        stamp = _dt.date.today().isoformat()
        entry = f"- {stamp} [{', '.join(changed) or 'no changes'}]: {args.note.strip()}\n"
        atomic_write(log, prev + entry)
    return status


# replay -----------------------------------------------------------------------------


def cmd_replay(args) -> int:
    man = load_json(args.manifest)
    for inp in man.get("inputs", []):
        if not Path(inp["path"]).exists() or sha256_file(inp["path"]) != inp["sha256"]:
            raise UsageError(f"input {inp['path']} missing or changed since the manifest was written")
    with tempfile.TemporaryDirectory() as tmp:
        argv = list(man["argv"])
        outs = man["outputs"]
        target = Path(tmp) / ("run" if man["command"] == "experiment" else outs[0]["path"])
        code = main(argv + ["--out", str(target)], _quiet=True)
        base = target if man["command"] == "experiment" else target.parent
        bad = [o["path"] for o in outs if not (base / o["path"]).exists() or sha256_file(base / o["path"]) != o["sha256"]]
    print(dumps({"replayed": man["command"], "exit": code, "mismatched": bad}))
    return THEOREM if bad else code


# parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bracketgrowth", description="Growth of sets under sum and bracket in algebras over finite fields.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an algebra and write its JSON file")
    b.add_argument("type", help="sl, so, sp, so_odd, so_even, g2, f4, e6, e7, e8, heisenberg or random")
    b.add_argument("rank", type=int, nargs="?", default=None, help="n for sl_n and sp_2n, the matrix size N for so_N")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--k", type=int, default=1, help="extension degree")
    b.add_argument("--realization", default="split", choices=["split", "antisymmetric"])
    b.add_argument("--allow-small", action="store_true")
    b.add_argument("--dim", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--density", type=float, default=0.5)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    gr = sub.add_parser("grow", help="layers, fill time or the Olson dichotomy of a set")
    gr.add_argument("algebra")
    gr.add_argument("set")
    gr.add_argument("--k", type=int, required=True)
    mode = gr.add_mutually_exclusive_group(required=True)
    mode.add_argument("--layers", dest="mode", action="store_const", const="layers")
    mode.add_argument("--fill", dest="mode", action="store_const", const="fill")
    mode.add_argument("--olson", dest="mode", action="store_const", const="olson")
    gr.add_argument("--symmetrize", action="store_true")
    gr.add_argument("--elements", action="store_true", help="include layer elements in the output")
    gr.add_argument("--max-elements", type=int)
    gr.add_argument("--max-pairs", type=int)
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_grow)

    c = sub.add_parser("certify", help="certified extremal basis")
    c.add_argument("algebra")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    e = sub.add_parser("experiment", help="seeded experiment sweeps")
    e.add_argument("--case", required=True, choices=ALGEBRA_CASES + FIELD_CASES + OTHER_CASES)
    e.add_argument("--algebra")
    e.add_argument("--config")
    e.add_argument("--seed", type=int)
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--q", type=int, action="append", help="field order(s) for scalar sweeps")
    e.add_argument("--d", type=int, action="append")
    e.add_argument("--size", type=int, default=10, help="scalar set size for growth-ratio")
    e.add_argument("--set-size", type=int, help="draw symmetric sets of at least this size (onedim and sum-bracket cases)")
    e.add_argument("--k", type=int, default=4, help="tower length for turrifiability")
    e.add_argument("--t", type=int, help="starting layer for dimest (default 1)")
    e.add_argument("--family", default="two-pair", choices=["two-pair", "single-pair"])
    e.add_argument("--out", required=True, help="output directory")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify-golden", help="recompute golden values and compare")
    v.add_argument("--golden-dir")
    v.add_argument("--only", action="append")
    v.add_argument("--bless", action="store_true")
    v.add_argument("--note")
    v.set_defaults(func=cmd_verify_golden)

    r = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_replay)
    return ap


def main(argv: list[str] | None = None, _quiet: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.argv = argv
    try:
        if _quiet:
            with open(os.devnull, "w") as devnull:
                old = sys.stdout
                sys.stdout = devnull
                try:
                    return args.func(args)
                finally:
                    sys.stdout = old
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except (NotGenerating, PreconditionError, FieldError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except BudgetExceeded as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return BUDGET
    except AssertionError as e:
        print(f"theorem-level failure: {e}", file=sys.stderr)
        return THEOREM


if __name__ == "__main__":
    sys.exit(main())
