"""Command-line front end.

Every subcommand prints one JSON report on stdout::

    {"command": ..., "status": "ok" | "warning" | "error",
     "input": {"n": ..., "k": ...}, "result": {...}, "messages": [...]}

Exit codes: 0 ok or warning, 1 mathematical failure, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import warnings
from dataclasses import fields, is_dataclass

import numpy as np

from . import __version__
from .augment import append_check, erase_check
from .diag import diagonalize
from .errors import FormatError, FrameError, TauTooLarge
from .frame import Frame, analyze, canonical_dual, tight_bound_identity
from .io import FORMATS, frame_to_dict, parse_frame_file, write_frame
from .perturbation import blend, improve_step, pw_check, stability_radius, tighten


def _clean(obj):
    """Make a value JSON-safe: numpy to builtins, non-finite floats to null."""
    if isinstance(obj, Frame):
        return frame_to_dict(obj)
    if is_dataclass(obj):
        return {f.name: _clean(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


_FLAT_LIST = re.compile(r"\[\s+([^\[\]{}]*?)\s+\]")


def _flatten_leaf_lists(text: str) -> str:
    # lists of scalars go on one line
    return _FLAT_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)


def dump_report(report: dict) -> str:
    return _flatten_leaf_lists(json.dumps(_clean(report), indent=2, allow_nan=False)) + "\n"


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise FormatError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise FormatError(f"expected comma-separated integers, got {text!r}") from None


class Context:
    def __init__(self, args):
        self.args = args
        self.status = "ok"
        self.messages: list[str] = []
        self.shape: tuple[int, int] | None = None

    def load(self, path) -> Frame:
        F = parse_frame_file(path, self.args.format)
        if self.shape is None:
            self.shape = (F.dim, len(F))
        return F

    def warn(self, message: str) -> None:
        self.status = "warning"
        self.messages.append(message)

    def save(self, F: Frame, path) -> None:
        write_frame(F, path)
        self.messages.append(f"wrote {path}")


def _analysis_payload(F: Frame) -> dict:
    rep = analyze(F)
    return {
        "lower_bound": rep.lower_bound,
        "upper_bound": rep.upper_bound,
        "condition_number": rep.condition_number,
        "is_tight": rep.is_tight,
        "eigenvalues": rep.eigenvalues,
        "mean_squared_norm": tight_bound_identity(F),
    }


def cmd_analyze(ctx: Context) -> dict:
    return _analysis_payload(ctx.load(ctx.args.frame))


def cmd_dual(ctx: Context) -> dict:
    dual = canonical_dual(ctx.load(ctx.args.frame))
    if ctx.args.output:
        ctx.save(dual, ctx.args.output)
    return {"dual": dual}


def cmd_improve(ctx: Context) -> dict:
    a = ctx.args
    res = improve_step(ctx.load(a.frame), a.epsilon, a.safety)
    if a.output:
        ctx.save(res.perturbed, a.output)
    return {
        "r": res.r_used,
        "epsilon": a.epsilon,
        "safety": a.safety,
        "before": res.report_before,
        "after": res.report_after,
        "deltas": res.deltas,
        "perturbed": res.perturbed,
    }


def _step_payload(step) -> dict:
    return {
        "step_index": step.step_index,
        "r": step.r,
        "bounds_before": step.bounds_before,
        "bounds_after": step.bounds_after,
        "eigenvalues_after": step.eigenvalues_after,
        "frame_after": step.frame_after,
    }


def cmd_tighten(ctx: Context) -> dict:
    a = ctx.args
    trace = tighten(ctx.load(a.frame))
    if a.output:
        ctx.save(trace.final, a.output)
    if a.trace:
        doc = {
            "steps": [_step_payload(s) for s in trace.steps],
            "final": trace.final,
            "total_deltas": trace.total_deltas,
        }
        with open(a.trace, "w", encoding="utf-8") as f:
            f.write(dump_report(doc))
        ctx.messages.append(f"wrote {a.trace}")
    final = analyze(trace.final)
    return {
        "steps": len(trace.steps),
        "r": [s.r for s in trace.steps],
        "final_bound": final.lower_bound,
        "final_condition_number": final.condition_number,
        "final": trace.final,
    }


def cmd_stability(ctx: Context) -> dict:
    F = ctx.load(ctx.args.frame)
    rep = analyze(F)
    return {"radius": stability_radius(F), "lower_bound": rep.lower_bound, "k": len(F)}


def _certificate_payload(cert) -> dict:
    actual = cert.perturbed_report
    return {
        "lambda": cert.lambda_const,
        "mu_crude": cert.mu_crude,
        "mu_sharp": cert.mu_sharp,
        "admissible": cert.admissible,
        "guaranteed_lower": cert.guaranteed_lower,
        "guaranteed_upper": cert.guaranteed_upper,
        "base": cert.base_report,
        "perturbed_is_frame": actual is not None,
        "perturbed": actual,
    }


def cmd_pw_check(ctx: Context) -> dict:
    F = ctx.load(ctx.args.base)
    G = ctx.load(ctx.args.perturbed)
    cert = pw_check(F, G)
    if not cert.admissible:
        ctx.warn("perturbation is too large to certify (mu >= sqrt(A))")
    return _certificate_payload(cert)


def cmd_append(ctx: Context) -> dict:
    base = ctx.load(ctx.args.base)
    added = ctx.load(ctx.args.added)
    v = append_check(base, added.vectors)
    if v.degenerate:
        ctx.warn("appended vectors are all zero; tightness is trivial")
    return v


def cmd_erase(ctx: Context) -> dict:
    base = ctx.load(ctx.args.base)
    idx = _int_list(ctx.args.indices)
    if any(i < 1 for i in idx):
        raise FormatError("indices are 1-based")
    v = erase_check(base, [i - 1 for i in idx])
    return {"indices": sorted(set(idx)), **_clean(v)}


def cmd_diag2(ctx: Context) -> dict:
    a = ctx.args
    res = diagonalize(ctx.load(a.frame))
    if not res.still_frame:
        ctx.warn("perturbed family no longer spans R^2")
    if a.output:
        ctx.save(res.perturbed, a.output)
    return {
        "chosen_vector": res.chosen_vector + 1,
        "chosen_entry_row": res.chosen_entry_row + 1,
        "perturb_axis": res.perturb_axis + 1,
        "epsilon": res.epsilon,
        "still_frame": res.still_frame,
        "perturbed": res.perturbed,
    }


def cmd_blend(ctx: Context) -> dict:
    a = ctx.args
    F = ctx.load(a.base)
    G = ctx.load(a.other)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TauTooLarge)
        res = blend(F, G, _float_list(a.t))
    for w in caught:
        ctx.warn(str(w.message))
    if a.output:
        ctx.save(res.frame, a.output)
    return res


def cmd_random(ctx: Context) -> dict:
    a = ctx.args
    if a.dim < 1 or a.count < 1:
        raise FormatError("--dim and --count must be positive")
    rng = np.random.default_rng(a.seed)
    F = Frame(rng.standard_normal((a.count, a.dim)))
    ctx.shape = (F.dim, len(F))
    if a.output:
        ctx.save(F, a.output)
    return {"seed": a.seed, "frame": F}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tightframe", description="Analyze and repair finite frames in R^n.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=FORMATS, help="input format (default: by file extension)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", help="optimal frame bounds and condition number")
    s.add_argument("frame")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("dual", help="canonical dual frame")
    s.add_argument("frame")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("improve", help="one condition-number-reducing perturbation")
    s.add_argument("frame")
    s.add_argument("--epsilon", type=float, required=True, help="bound on each perturbation norm")
    s.add_argument("--safety", type=float, default=0.9, help="fraction of the admissible r (default 0.9)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_improve)

    s = sub.add_parser("tighten", help="perturb into a tight frame in at most n-1 steps")
    s.add_argument("frame")
    s.add_argument("-o", "--output")
    s.add_argument("--trace", help="write the per-step trace as JSON")
    s.set_defaults(func=cmd_tighten)

    s = sub.add_parser("stability", help="perturbation radius that preserves the frame property")
    s.add_argument("frame")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("pw-check", help="certify a perturbed frame")
    s.add_argument("base")
    s.add_argument("perturbed")
    s.set_defaults(func=cmd_pw_check)

    s = sub.add_parser("append", help="tightness after appending vectors to a tight frame")
    s.add_argument("base")
    s.add_argument("added")
    s.set_defaults(func=cmd_append)

    s = sub.add_parser("erase", help="tightness after erasing vectors from a tight frame")
    s.add_argument("base")
    s.add_argument("--indices", required=True, help="1-based, comma-separated")
    s.set_defaults(func=cmd_erase)

    s = sub.add_parser("diag2", help="make an R^2 frame operator diagonal")
    s.add_argument("frame")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_diag2)

    s = sub.add_parser("blend", help="blend two frames vectorwise")
    s.add_argument("base")
    s.add_argument("other")
    s.add_argument("--t", required=True, help="k comma-separated coefficients")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_blend)

    s = sub.add_parser("random", help="standard normal random frame")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ctx = Context(args)
    try:
        result = args.func(ctx)
        code = 0
    except FrameError as e:
        result = None
        ctx.status = "error"
        ctx.messages.append(f"{type(e).__name__}: {e}")
        print(f"tightframe: {type(e).__name__}: {e}", file=sys.stderr)
        code = e.exit_code
    report = {
        "command": args.command,
        "status": ctx.status,
        "input": None if ctx.shape is None else {"n": ctx.shape[0], "k": ctx.shape[1]},
        "result": result,
        "messages": ctx.messages,
    }
    sys.stdout.write(dump_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
