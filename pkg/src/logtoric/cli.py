"""Command-line front end: fan files in, canonical JSON reports out.

Exit codes: 0 when every requested check passes, 1 on a check failure,
2 on an input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .graded_modules import UnstableWeight
from .hochschild import (HHError, chart_spec_for_cone, hh_log, hh_log_fan, hh_parabolic_level,
                         hkr_compare, hkr_compare_fan, hp_fold_hh, tower_stabilization)
from .linalg import fstr
from .log_derham import cech_hypercohomology, degeneration_check, hp_fold
from .monoid_algebra import ChartError, LevelAlgebra, boundary_ideal, idempotency_defect, wstr
from .toric_core import (Fan, FanError, FanMorphism, check_modification, fan_properties,
                         is_smooth_cone)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class FanFile:
    def __init__(self, path: str):
        self.path = path
        try:
            self.raw = Path(path).read_bytes()
        except OSError as e:
            raise InputError("%s: cannot read file (%s)" % (path, e.strerror))
        try:
            data = json.loads(self.raw.decode("utf-8"))
        except UnicodeDecodeError:
            raise InputError("%s: file is not UTF-8 text" % path)
        except json.JSONDecodeError as e:
            raise InputError("%s:%d:%d: malformed JSON: %s" % (path, e.lineno, e.colno, e.msg))
        if not isinstance(data, dict):
            raise InputError("%s: top level must be a JSON object" % path)
        for key in ("rank", "rays", "cones"):
            if key not in data:
                raise InputError("%s: missing key %r" % (path, key))
        try:
            rank = _int(data["rank"])
            rays = [[_int(x) for x in r] for r in data["rays"]]
            cones = [[_int(i) for i in c] for c in data["cones"]]
        except (TypeError, ValueError) as e:
            raise InputError("%s: %s" % (path, e))
        if rank < 0 or any(len(r) != rank for r in rays):
            raise InputError("%s: every ray must have length rank=%d" % (path, rank))
        try:
            self.fan = Fan.from_data(rank, rays, cones)
        except FanError as e:
            raise InputError("%s: invalid fan: %s" % (path, e))
        self.level = _int(data.get("level", 1))
        if self.level < 1:
            raise InputError("%s: level must be >= 1" % path)
        win = data.get("window")
        self.window = None
        if win is not None:
            try:
                self.window = Fraction(_int(win["max_weight_num"]), _int(win["max_weight_den"]))
            except (KeyError, TypeError, ValueError, ZeroDivisionError):
                raise InputError("%s: window needs integer max_weight_num and nonzero max_weight_den"
                                 % path)
            if self.window < 0:
                raise InputError("%s: window must be non-negative" % path)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.raw).hexdigest()


def _int(x) -> int:
    if isinstance(x, bool):
        raise ValueError("expected an integer, got %r" % x)
    if isinstance(x, int):
        return x
    if isinstance(x, str) and x.strip().lstrip("+-").isdigit():
        return int(x.strip())
    raise ValueError("expected an integer, got %r" % (x,))


def _window(arg, ff: FanFile, default) -> Fraction:
    if arg is not None:
        try:
            w = Fraction(arg)
        except (ValueError, ZeroDivisionError):
            raise InputError("window must be a rational number p/q, got %r" % arg)
        if w < 0:
            raise InputError("window must be non-negative")
        return w
    return ff.window if ff.window is not None else Fraction(default)


def _level(arg, ff: FanFile) -> int:
    level = ff.level if arg is None else arg
    if level < 1:
        raise InputError("level must be >= 1")
    return level


def report(command: list[str], inputs: list[FanFile], result: dict, passed: bool) -> dict:
    return {"command": command, "inputs": [{"path": f.path, "sha256": f.sha256} for f in inputs],
            "version": __version__, "passed": passed, "result": result}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


# commands --------------------------------------------------------------------

def cmd_fan_check(args) -> tuple[dict, int]:
    ff = FanFile(args.path)
    props = fan_properties(ff.fan)
    return report(["fan-check", args.path], [ff], props.to_json(), True), EXIT_OK


def cmd_hodge(args) -> tuple[dict, int]:
    ff = FanFile(args.path)
    N, W = _level(args.level, ff), _window(args.window, ff, 1)
    t = cech_hypercohomology(ff.fan, N, W)
    deg = degeneration_check(t)
    ok = deg.passed if t.complete else deg.weight_zero_passed
    zero = (0,) * ff.fan.rank
    result = {"table": t.to_json(), "degeneration": deg.to_json(), "hp": list(hp_fold(t)),
              "totals_weight0": {"e1": t.e1_total(zero), "derham": t.derham_total(zero)},
              "degeneration_scope": "all weights" if t.complete else "weight 0 (non-complete fan)"}
    if args.format == "tsv":
        lines = ["p\tq\tweight\tdim"] + ["%d\t%d\t%s\t%d" % (p, q, wstr(w), d)
                                         for (p, q, w), d in sorted(t.hodge.items()) if d]
        result["tsv"] = "\n".join(lines)
    cmd = ["hodge", args.path, "--level", str(N), "--window", fstr(W), "--format", args.format]
    return report(cmd, [ff], result, ok), EXIT_OK if ok else EXIT_FAIL


def cmd_hh(args) -> tuple[dict, int]:
    ff = FanFile(args.path)
    N, W = _level(args.level, ff), _window(args.window, ff, 2)
    f = ff.fan
    mode = "parabolic" if args.parabolic else "log"
    result: dict = {"mode": mode}
    ok = True
    if mode == "parabolic":
        if len(f.maximal_cones) != 1:
            raise InputError("parabolic tables are chart-level: give a fan with one maximal cone")
        c = f.maximal_cones[0]
        if is_smooth_cone(c):
            spec, basis = chart_spec_for_cone(c)
            t = hh_parabolic_level(spec, N, window=W)
            result["chart"] = {"factors": list(spec.factors), "coordinates": [list(v) for v in basis]}
        else:
            if not c.is_full:
                raise InputError("non-smooth charts must be full-dimensional")
            t = hh_parabolic_level(LevelAlgebra(c, N), N, window=W)
            result["chart"] = {"model": "bar complex over the chart monoid"}
        result["table"] = t.to_json()
        result["twisted_hh0"] = t.twisted_count(0)
    else:
        if not all(is_smooth_cone(c) for c in f.maximal_cones):
            raise InputError("log HH is implemented for smooth fans; this fan is model-dependent")
        t = hh_log_fan(f, N, W)
        hodge = cech_hypercohomology(f, N, W)
        fan_hkr = hkr_compare_fan(t, hodge)
        result["table"] = t.to_json()
        inv = t.invariant()
        result["invariant"] = [{"i": i, "weight": wstr(w), "dim": d} for (i, w), d in sorted(inv.items())]
        result["invariant_totals"] = t.invariant_totals()
        result["hp"] = list(hp_fold_hh(t))
        result["hkr_fan"] = fan_hkr.to_json()
        ok = fan_hkr.passed
        if len(f.maximal_cones) == 1 and f.maximal_cones[0].dim == f.rank:
            spec, basis = chart_spec_for_cone(f.maximal_cones[0])
            chart = hkr_compare(spec, N, min(W, 3), hh_log(spec, N, min(W, 3)))
            result["hkr_chart"] = chart.to_json()
            result["chart"] = {"factors": list(spec.factors), "coordinates": [list(v) for v in basis]}
            ok = ok and chart.passed
    cmd = ["hh", args.path, "--level", str(N), "--window", fstr(W), "--" + mode]
    return report(cmd, [ff], result, ok), EXIT_OK if ok else EXIT_FAIL


def cmd_invariance(args) -> tuple[dict, int]:
    fa, fb = FanFile(args.path_a), FanFile(args.path_b)
    if fa.fan.rank != fb.fan.rank:
        raise InputError("no morphism: lattice ranks %d and %d differ" % (fa.fan.rank, fb.fan.rank))
    N, W = _level(args.level, fa), _window(args.window, fa, 1)
    fine, coarse = fa.fan, fb.fan
    verdict = check_modification(FanMorphism.identity(fine, coarse))
    direction = "a->b"
    if not verdict.is_refinement:
        rev = check_modification(FanMorphism.identity(coarse, fine))
        if rev.is_refinement:
            fine, coarse, verdict, direction = coarse, fine, rev, "b->a"
    result: dict = {"modification": verdict.to_json(), "direction": direction}
    cmd = ["invariance", args.path_a, args.path_b, "--level", str(N), "--window", fstr(W)]
    if not verdict.is_proper_refinement:
        result["status"] = "refused: not a proper refinement, invariance not asserted"
        return report(cmd, [fa, fb], result, False), EXIT_FAIL
    ha, hb = cech_hypercohomology(fine, N, W), cech_hypercohomology(coarse, N, W)
    hodge_diff = _table_diff(ha.to_json()["hodge"], hb.to_json()["hodge"]) + \
        _table_diff(ha.to_json()["derham"], hb.to_json()["derham"])
    result["hodge_diff"] = hodge_diff
    smooth = all(is_smooth_cone(c) for f in (fine, coarse) for c in f.maximal_cones)
    hh_diff = []
    if smooth:
        ta, tb = hh_log_fan(fine, N, W), hh_log_fan(coarse, N, W)
        hh_diff = _table_diff(ta.to_json()["entries"], tb.to_json()["entries"])
        result["hh_totals"] = ta.invariant_totals()
    else:
        result["hh_note"] = "HH comparison skipped: non-smooth fan is model-dependent"
    result["hh_diff"] = hh_diff
    result["hodge_totals_weight0"] = ha.e1_total((0,) * fine.rank)
    result["status"] = "compared"
    ok = not hodge_diff and not hh_diff
    return report(cmd, [fa, fb], result, ok), EXIT_OK if ok else EXIT_FAIL


def _table_diff(a: list[dict], b: list[dict]) -> list[dict]:
    key = lambda r: json.dumps(r, sort_keys=True)  # noqa: E731
    sa, sb = {key(r) for r in a}, {key(r) for r in b}
    return ([{"only_in": "a", **json.loads(k)} for k in sorted(sa - sb)]
            + [{"only_in": "b", **json.loads(k)} for k in sorted(sb - sa)])


def cmd_tower(args) -> tuple[dict, int]:
    ff = FanFile(args.path)
    try:
        levels = [int(x) for x in args.levels.split(",") if x.strip()]
    except ValueError:
        raise InputError("levels must be a comma-separated list of integers")
    if not levels or any(L < 1 for L in levels):
        raise InputError("levels must be positive integers")
    for a, b in zip(levels, levels[1:]):
        if b % a:
            raise InputError("levels do not form a divisibility chain: %d does not divide %d" % (a, b))
    f = ff.fan
    if len(f.maximal_cones) != 1 or not f.maximal_cones[0].is_full:
        raise InputError("tower reports need a fan with one full-dimensional cone")
    c = f.maximal_cones[0]
    W = _window(args.window, ff, 2)
    defects = []
    for L in levels:
        a = LevelAlgebra(c, L)
        d = idempotency_defect(boundary_ideal(a), W)
        defects.append(d.to_json())
    result: dict = {"levels": levels, "defects": defects,
                    "defect_min_weights": [d["min_weight"] for d in defects]}
    ok = True
    if is_smooth_cone(c):
        spec, _ = chart_spec_for_cone(c)
        counts = [hh_parabolic_level(spec, L, spec.weights(L, 1)).twisted_count(0) for L in levels]
        result["twisted_hh0"] = counts
        stab = [tower_stabilization(spec, a, b, window=1).to_json() for a, b in zip(levels, levels[1:])]
        result["stabilization"] = stab
        ok = all(s["passed"] for s in stab)
    else:
        result["note"] = "stabilization report needs a smooth chart"
    cmd = ["tower", args.path, "--levels", ",".join(map(str, levels)), "--window", fstr(W)]
    return report(cmd, [ff], result, ok), EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logtoric", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fan-check", help="completeness, smoothness and multiplicities of a fan")
    s.add_argument("path", help="fan file (JSON)")
    s.set_defaults(func=cmd_fan_check)

    s = sub.add_parser("hodge", help="log Hodge and de Rham tables, degeneration, HP")
    s.add_argument("path", help="fan file (JSON)")
    s.add_argument("--level", type=int, help="root level N (default: from the file, else 1)")
    s.add_argument("--window", help="max weight, e.g. 2 or 3/2")
    s.add_argument("--format", choices=("json", "tsv"), default="json", help="output format")
    s.set_defaults(func=cmd_hodge)

    s = sub.add_parser("hh", help="log or parabolic Hochschild homology")
    s.add_argument("path", help="fan file (JSON)")
    s.add_argument("--level", type=int, help="root level N (default: from the file, else 1)")
    s.add_argument("--window", help="max weight, e.g. 2 or 3/2")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--log", action="store_true", default=True, help="log HH of the fan (default)")
    g.add_argument("--parabolic", action="store_true", help="parabolic HH at a single level; one cone only")
    s.set_defaults(func=cmd_hh)

    s = sub.add_parser("invariance", help="compare tables across a proper refinement")
    s.add_argument("path_a", help="first fan file")
    s.add_argument("path_b", help="second fan file; either may refine the other")
    s.add_argument("--level", type=int, help="root level N (default: from the file, else 1)")
    s.add_argument("--window", help="max weight, e.g. 2 or 3/2")
    s.set_defaults(func=cmd_invariance)

    s = sub.add_parser("tower", help="idempotency defects and stabilization along levels")
    s.add_argument("path", help="fan file (JSON)")
    s.add_argument("--levels", required=True, help="comma-separated divisibility chain, e.g. 1,2,6")
    s.add_argument("--window", help="max weight, e.g. 2 or 3/2")
    s.set_defaults(func=cmd_tower)
    return p


def run(argv: list[str] | None = None) -> tuple[str, int]:
    """Parse and run; returns (output text, exit code) without touching sys.exit."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep, code = args.func(args)
    except InputError as e:
        return dumps({"error": str(e), "version": __version__}), EXIT_INPUT
    except (FanError, ChartError, HHError, UnstableWeight) as e:
        return dumps({"error": str(e), "version": __version__}), EXIT_FAIL
    if getattr(args, "format", "json") == "tsv":
        return rep["result"]["tsv"], code
    return dumps(rep), code


def main(argv: list[str] | None = None) -> int:
    try:
        out, code = run(argv)
    except SystemExit as e:  # argparse usage errors
        return EXIT_INPUT if e.code else 0
    stream = sys.stdout if code != EXIT_INPUT else sys.stderr
    stream.write(out + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
