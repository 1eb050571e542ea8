"""Command-line front end: JSON in, RunReport JSON on stdout, optional files out.

Exit codes: 0 all checks pass, 1 a check failed, 2 input or output error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .embed import (BAMap, EmbeddingMap, characterize_image, embedding_eval, embedding_values, extend_embedding,
                    inverse_bounds_for, pl_interpolant)
from .explattice import ConditionViolation, ExpLatticeMap, exp_eval, extend_exp_automorphism, log_conjugate
from .mapcore import count_leaves, expr_dilatation_bound, expr_eval, expr_from_json, expr_to_json
from .render import GridSpec, grid_csv, grid_svg
from .seqcore import (IdentityTail, bijection_from_json, bijection_to_json, find_split_decomposition,
                      is_bijective, is_cut, limit_classification, monotone_from_json, monotone_to_json,
                      three_point_lambda)
from .splitflow import ClaimViolation, PreconditionError, extend_automorphism, make_splittable, verify_extension


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    outcomes: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    def add(self, name, passed, value=None, witness=None, **extra):
        item = {"name": name, "passed": bool(passed), "value": _plain(value)}
        if witness is not None or not passed:
            item["witness"] = _plain(witness)
        item.update({k: _plain(v) for k, v in extra.items()})
        self.outcomes.append(item)

    @property
    def passed(self) -> bool:
        return all(o["passed"] for o in self.outcomes)

    def to_json(self) -> str:
        body = {"command": self.command, "inputs_digest": self.inputs_digest,
                "passed": self.passed, "outcomes": self.outcomes, "artifacts": self.artifacts}
        return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _plain(v):
    """JSON-safe copy: numpy scalars to Python, complex to [re, im], inf to a string."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_plain(v.real), _plain(v.imag)]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
        return 0.0 if v == 0 else v
    return v


# ---------------------------------------------------------------------------
# input handling


def _load(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        obj = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 text at byte {exc.start}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}:1:1: expected a JSON object")
    return obj, hashlib.sha256(raw).hexdigest()


def _bijection(obj):
    seq = bijection_from_json(obj)
    if not is_bijective(seq):
        raise InputError("sequence is not a bijection of Z")
    return seq


def _handle(obj):
    """A map handle: MapExpr tree, embedding or exp-lattice record."""
    if "node" in obj:
        return expr_from_json(obj)
    kind = obj.get("kind")
    if kind == "embedding":
        e = monotone_from_json(obj["image"])
        sigma = _bijection(obj["assignment"])
        if "auto" in obj:
            return EmbeddingMap(BAMap(pl_interpolant(e)), expr_from_json(obj["auto"]))
        return extend_embedding(e, sigma, float(obj.get("delta", 1.0)))
    if kind == "explattice":
        a = _bijection(obj["a"])
        if "g" in obj:
            return ExpLatticeMap(expr_from_json(obj["g"]), a)
        return extend_exp_automorphism(a)
    if kind in ("identity_tail", "periodic", "negated"):
        raise InputError(f"expected a map handle, got a sequence ({kind}); run extend-auto first")
    raise InputError(f"unknown handle kind {kind!r}")


def _evaluator(h):
    if isinstance(h, EmbeddingMap):
        return lambda z: embedding_eval(h, z)
    if isinstance(h, ExpLatticeMap):
        return lambda z: exp_eval(h, z)
    return lambda z: expr_eval(h, z)


def _write(path: str, text: str, report: RunReport):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{path}: cannot write: {exc.strerror}") from exc
    report.artifacts.append(path)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_check3pc(args, obj, rep):
    seq = _bijection(obj)
    r = three_point_lambda(seq, args.horizon)
    rep.add("bijective", True, True)
    rep.add("direction", True, limit_classification(seq).value)
    rep.add("lambda_empirical", True, r.lambda_empirical, r.witness)
    rep.add("lambda_certified", math.isfinite(r.lambda_certified), r.lambda_certified)


def cmd_split(args, obj, rep):
    seq = _bijection(obj)
    lam = three_point_lambda(seq, args.horizon).lambda_certified
    c_max = args.cmax if args.cmax is not None else args.horizon
    dec = find_split_decomposition(seq, c_max, args.horizon)
    if dec is None and not isinstance(seq, IdentityTail):
        cuts = [k for k in range(-args.horizon, args.horizon + 1) if is_cut(seq, k)]
        rep.add("splittable", False, c_max, {"cuts_in_horizon": cuts}, reason="no splitting interval")
        return
    if dec is not None:
        rep.add("input_splittable", True, dec.bound_c, [list(b) for b in dec.blocks])
    if isinstance(seq, IdentityTail):
        res = make_splittable(seq, lam, args.delta)
        ok = res.decomposition.bound_c <= 2 * lam + 3
        rep.add("transformed_bound", ok, res.decomposition.bound_c, 2 * lam + 3)
        rep.add("claims", all(t.claim_bound_ok for t in res.traces), len(res.traces))
        if args.out:
            _write(args.out, _dump({"f1": expr_to_json(res.f1), "b": bijection_to_json(res.b),
                                    "blocks": [list(b) for b in res.decomposition.blocks]}), rep)


def _verify_auto(rep, expr, seq, args):
    r = verify_extension(expr, seq, tol=args.tol, delta=args.delta)
    rep.add("values", r.checks["values"], r.max_residual, r.witness)
    rep.add("strip_identity", r.checks["strip"], r.strip_residual)
    rep.add("injective_grid", r.checks["folds"], r.folds)
    rep.add("jacobian_positive", r.checks["jacobian"], None)
    rep.add("roundtrip", r.checks["roundtrip"], r.roundtrip, None, float64=r.roundtrip_f64,
            precise_rechecks=r.precise_rechecks)
    rep.add("dilatation_accounting", r.checks["dilatation"], r.dilatation_bound, r.sampled_k)


def cmd_extend_auto(args, obj, rep):
    seq = _bijection(obj)
    expr = extend_automorphism(seq, args.delta)
    rep.add("leaves", True, count_leaves(expr))
    rep.add("dilatation_bound", True, expr_dilatation_bound(expr))
    if args.verify:
        _verify_auto(rep, expr, seq, args)
    if args.out:
        _write(args.out, _dump(expr_to_json(expr)), rep)


def cmd_extend_embed(args, obj, rep):
    if obj.get("kind") != "embedding":
        raise InputError('expected {"kind": "embedding", "image": ..., "assignment": ...}')
    e = monotone_from_json(obj["image"])
    sigma = _bijection(obj["assignment"])
    img = characterize_image(e, args.horizon, args.cmax if args.cmax is not None else 10.0)
    rep.add("image_ratio_M", img.passed, img.m_constant, img.witness)
    m = extend_embedding(e, sigma, args.delta)
    lo, hi = e.lo - 3, e.hi + 3
    ns = np.arange(lo, hi + 1)
    tol = max(args.tol, 1e-8)
    res = np.abs(embedding_eval(m, ns.astype(complex)) - embedding_values(e, sigma, lo, hi))
    j = int(np.argmax(res))
    rep.add("values", res[j] < tol, res[j], int(ns[j]) if res[j] >= tol else None)
    ib = inverse_bounds_for(e, sigma)
    rep.add("inverse_bounds", ib.passed, ib.l_constant, ib.violations[:1] or None, mu=ib.mu)
    if args.out:
        _write(args.out, _dump({"kind": "embedding", "image": monotone_to_json(e),
                                "assignment": bijection_to_json(sigma), "delta": args.delta,
                                "auto": expr_to_json(m.auto)}), rep)


def cmd_explattice(args, obj, rep):
    seq = _bijection(obj)
    try:
        r = log_conjugate(seq)
    except ConditionViolation as exc:
        rep.add("tends_to_zero", False, False, None, reason=str(exc))
        return
    rep.add("tends_to_zero", True, True)
    rep.add("lambda_b", True, r.lambda_b)
    rep.add("lambda_a", True, r.lambda_a)
    m = extend_exp_automorphism(seq)
    lo, hi = (seq.lo, seq.hi) if isinstance(seq, IdentityTail) else (0, 5)
    ns = np.arange(lo - 2, hi + 3)
    got = exp_eval(m, np.exp(ns.astype(float)).astype(complex))
    want = np.exp(seq.array(lo - 2, hi + 2).astype(float))
    rel = np.abs(got - want) / want
    j = int(np.argmax(rel))
    rep.add("lattice_values", rel[j] < 1e-9, rel[j], int(ns[j]) if rel[j] >= 1e-9 else None)
    neg = np.array([-0.5, -1.0, -5.0, -40.0], dtype=complex)
    rep.add("negative_axis_fixed", bool(np.all(exp_eval(m, neg) == neg)), None)
    if args.out:
        _write(args.out, _dump({"kind": "explattice", "a": bijection_to_json(seq),
                                "g": expr_to_json(m.g)}), rep)


def _parse_points(text: str):
    try:
        return np.array([complex(s.strip().replace(" ", "")) for s in text.split(",") if s.strip()])
    except ValueError as exc:
        raise InputError(f"bad --at value {text!r}: {exc}") from exc


def cmd_eval(args, obj, rep):
    if not args.at:
        raise InputError("eval needs --at, e.g. --at '0,1,0.5+0.5j'")
    f = _evaluator(_handle(obj))
    pts = _parse_points(args.at)
    try:
        vals = np.atleast_1d(f(pts))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    for z, w in zip(pts, vals):
        rep.add("eval", True, complex(w), None, at=complex(z))


def cmd_grid(args, obj, rep):
    if not args.out:
        raise InputError("grid needs --out PREFIX (writes PREFIX.csv and PREFIX.svg)")
    try:
        spec = GridSpec.parse(args.grid)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    f = _evaluator(_handle(obj))
    _write(args.out + ".csv", grid_csv(f, spec), rep)
    _write(args.out + ".svg", grid_svg(f, spec), rep)
    rep.add("rows", True, spec.nx * spec.ny)


def cmd_report(args, obj, rep):
    """Full pipeline on one bijection, or a seeded random batch when no input is given."""
    if obj is not None:
        seq = _bijection(obj)
        cmd_check3pc(args, obj, rep)
        expr = extend_automorphism(seq, args.delta)
        rep.add("dilatation_bound", True, expr_dilatation_bound(expr))
        _verify_auto(rep, expr, seq, args)
        return
    rng = np.random.default_rng(int(os.environ.get("QCX_SEED", "0")))
    fails = 0
    worst = 0.0
    for _ in range(args.count):
        w = int(rng.integers(1, 15))
        lo = int(rng.integers(-7, 7))
        seq = IdentityTail(lo, lo + w - 1, tuple(int(v) for v in rng.permutation(np.arange(lo, lo + w))))
        r = verify_extension(extend_automorphism(seq, args.delta), seq, tol=args.tol, delta=args.delta)
        fails += not r.passed
        worst = max(worst, r.max_residual)
    rep.add("random_batch", fails == 0, fails, None, instances=args.count, worst_residual=worst)


COMMANDS = {
    "check3pc": cmd_check3pc,
    "split": cmd_split,
    "extend-auto": cmd_extend_auto,
    "extend-embed": cmd_extend_embed,
    "explattice": cmd_explattice,
    "eval": cmd_eval,
    "grid": cmd_grid,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcx", description="Quasiconformal extensions of maps on Z.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--in", dest="inp", metavar="PATH", required=name != "report")
        s.add_argument("--out", metavar="PATH")
        s.add_argument("--delta", type=float, default=1.0)
        s.add_argument("--horizon", type=int, default=40)
        s.add_argument("--grid", default="-3:3:13,-1.5:1.5:7")
        s.add_argument("--verify", action="store_true")
        s.add_argument("--tol", type=float, default=1e-9)
        s.add_argument("--cmax", type=float, default=None, help="split / image-ratio ceiling")
        s.add_argument("--at", help="comma-separated points for eval, e.g. '0,1+0.5j'")
        s.add_argument("--count", type=int, default=20, help="instances for a random report batch")
    return p


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if not args.delta > 0:
        print("qcx: input error: --delta must be positive", file=sys.stderr)
        return 2
    try:
        obj, digest = _load(args.inp) if args.inp else (None, hashlib.sha256(b"").hexdigest())
        rep = RunReport(args.command, digest)
        COMMANDS[args.command](args, obj, rep)
    except (InputError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, InputError) else f"missing field {exc}"
        print(f"qcx: input error: {msg}", file=sys.stderr)
        return 2
    except (ValueError, PreconditionError) as exc:
        print(f"qcx: input error: {exc}", file=sys.stderr)
        return 2
    except ClaimViolation as exc:
        print(f"qcx: internal claim violation: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(rep.to_json())
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
