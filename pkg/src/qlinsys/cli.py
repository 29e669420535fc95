"""Command-line front end.

Every command ends in a verdict that maps to the exit status: ``pass`` 0,
``fail`` 1, ``inconclusive`` 2 and ``error`` (usage or schema problems) 3.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import document as docmod
from .errors import QLinSysError, SchemaError, SynthesisError, UnstableSystem
from .model import (
    AnnihilationQsde,
    GeneralQsde,
    PhysicalParameters,
    QuadratureQsde,
    build_annihilation,
    build_general,
    from_quadrature,
    promote_to_general,
    theta_from_theta_tilde,
    to_quadrature,
    transfer,
    transfer_eval,
)
from .numkernel import hinf_norm
from .realizability import (
    DEFAULT_TOL,
    check_annihilation,
    check_general,
    check_quadrature,
)
from .synthesis import (
    ATTENUATION_GAIN,
    HinfController,
    HinfPlant,
    check_plant_assumptions,
    close_loop,
    riccati_residuals,
    synthesize,
    synthesize_realizable,
)

EXIT_CODES = {"pass": 0, "fail": 1, "inconclusive": 2, "error": 3}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[[float(z.real), float(z.imag)] for z in row]
                    for row in np.atleast_2d(value)] if value.ndim == 2 else \
                [[float(z.real), float(z.imag)] for z in value]
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _fmt_scalar(x):
    if isinstance(x, (complex, np.complexfloating)):
        return f"{float(x.real)!r}{float(x.imag):+}j"
    if isinstance(x, (np.floating, np.integer)):
        return repr(x.item())
    return str(x)


def _text_lines(report, prefix=""):
    lines = []
    for key, value in report.items():
        name = prefix + key
        if isinstance(value, dict):
            if not value:
                lines.append(f"{name}: (none)")
            lines.extend(_text_lines(value, name + "."))
        elif isinstance(value, np.ndarray) and value.ndim == 2:
            lines.append(f"{name}: {value.shape[0]}x{value.shape[1]}")
            for row in value:
                lines.append("    " + "  ".join(_fmt_scalar(z) for z in row))
        elif isinstance(value, np.ndarray):
            lines.append(f"{name}: [" + ", ".join(_fmt_scalar(z) for z in value) + "]")
        elif isinstance(value, (list, tuple)):
            lines.append(f"{name}: " + (", ".join(_fmt_scalar(v) for v in value) or "(none)"))
        else:
            lines.append(f"{name}: {_fmt_scalar(value)}")
    return lines


def render_text(report: dict) -> str:
    return "\n".join(_text_lines(report)) + "\n"


def _load(path):
    if path is None:
        raise _UsageError("an input document is required (--in)")
    try:
        return docmod.read_document(path)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(doc, path, out):
    if path is None:
        out.write(docmod.emit_document(doc))
    else:
        docmod.write_document(doc, path)


def _realizability_report(rep):
    out = {"test": rep.test, "residuals": rep.residuals,
           "failed_conditions": rep.failed_conditions}
    if rep.certificate is not None:
        out["certificate"] = rep.certificate
    if rep.diagnostics:
        out["diagnostics"] = rep.diagnostics
    if rep.message:
        out["message"] = rep.message
    return rep.verdict.value, out


# -- commands -----------------------------------------------------------------------

def cmd_build(args, out):
    doc = _load(args.input)
    if doc.representation != "parameters":
        raise _UsageError("build expects a 'parameters' document")
    params = docmod.to_object(doc)
    meta = dict(doc.metadata)
    if isinstance(params, PhysicalParameters):
        sys_, theta = build_general(params)
        report = {"representation": "general", "theta": theta}
    else:
        sys_ = build_annihilation(params["S"], params["M1"], params["N1"], params["Theta1"])
        report = {"representation": "annihilation", "theta1": params["Theta1"]}
    rep = (check_general(sys_, args.tol) if isinstance(sys_, GeneralQsde)
           else check_annihilation(sys_, args.tol))
    report["realizability"] = _realizability_report(rep)[1]
    _write(docmod.from_object(sys_, meta), args.output, out)
    return ("pass" if rep.passed else "fail"), report


def _check_any(obj, tol):
    if isinstance(obj, GeneralQsde):
        return check_general(obj, tol)
    if isinstance(obj, AnnihilationQsde):
        return check_annihilation(obj, tol)
    if isinstance(obj, QuadratureQsde):
        return check_quadrature(obj, tol)
    if isinstance(obj, HinfController):
        if obj.completion is None:
            raise _UsageError("controller document has no realizability completion")
        return check_annihilation(obj.as_qsde(), tol)
    raise _UsageError("check expects a general, annihilation, quadrature or "
                      "completed controller document")


def cmd_check(args, out):
    doc = _load(args.input)
    verdict, report = _realizability_report(_check_any(docmod.to_object(doc), args.tol))
    report = {"representation": doc.representation, **report}
    return verdict, report


def cmd_transform(args, out):
    doc = _load(args.input)
    obj = docmod.to_object(doc)
    meta = dict(doc.metadata)
    if args.to == "quadrature":
        if isinstance(obj, AnnihilationQsde):
            obj = promote_to_general(obj)
        if not isinstance(obj, GeneralQsde):
            raise _UsageError("transform --to quadrature expects a general or "
                              "annihilation document")
        # The commutation matrix comes from the realizability certificate.
        rep = check_general(obj, args.tol)
        theta = rep.certificate if rep.passed else None
        q, theta_tilde = to_quadrature(obj, theta)
        new = docmod.from_object(q, meta, theta_tilde=theta_tilde)
        report = {"from": doc.representation, "to": "quadrature",
                  "theta_tilde_included": theta_tilde is not None}
    else:
        if isinstance(obj, QuadratureQsde):
            g = from_quadrature(obj)
            report = {"from": "quadrature", "to": "general"}
            if "ThetaTilde" in doc.matrices:
                report["theta"] = theta_from_theta_tilde(doc.matrices["ThetaTilde"])
        elif isinstance(obj, AnnihilationQsde):
            g = promote_to_general(obj)
            report = {"from": "annihilation", "to": "general"}
        else:
            raise _UsageError("transform --to general expects a quadrature or "
                              "annihilation document")
        new = docmod.from_object(g, meta)
    _write(new, args.output, out)
    return "pass", report


def _system_matrices(obj):
    if isinstance(obj, (GeneralQsde, AnnihilationQsde, QuadratureQsde)):
        return obj.matrices()
    if isinstance(obj, HinfController):
        if obj.completion is not None:
            return obj.as_qsde().matrices()
        return obj.Fc, obj.Gc, obj.Hc, np.zeros((obj.Hc.shape[0], obj.Gc.shape[1]))
    raise _UsageError("expected a system or controller document")


def cmd_norm(args, out):
    obj = docmod.to_object(_load(args.input))
    F, G, H, K = _system_matrices(obj)
    try:
        value = hinf_norm(F, G, H, K)
    except UnstableSystem as exc:
        return "fail", {"hinf_norm": None, "message": str(exc)}
    return "pass", {"hinf_norm": value}


def cmd_tf_eval(args, out):
    obj = docmod.to_object(_load(args.input))
    try:
        s = complex(args.s.replace(" ", ""))
    except ValueError as exc:
        raise _UsageError(f"cannot parse --s {args.s!r} as a complex number") from exc
    if isinstance(obj, HinfController) and obj.completion is None:
        F, G, H, K = _system_matrices(obj)
        value = transfer_eval(F, G, H, K, s)
    else:
        sys_ = obj.as_qsde() if isinstance(obj, HinfController) else obj
        if not isinstance(sys_, (GeneralQsde, AnnihilationQsde, QuadratureQsde)):
            raise _UsageError("tf-eval expects a system or controller document")
        value = transfer(sys_, s)
    return "pass", {"s": s, "transfer": value}


def cmd_assumptions(args, out):
    doc = _load(args.plant or args.input)
    plant = docmod.to_object(doc)
    if not isinstance(plant, HinfPlant):
        raise _UsageError("assumptions expects a plant document")
    rep = check_plant_assumptions(plant)
    return ("pass" if rep.passed else "fail"), {"violations": rep.violations,
                                                 "values": rep.values}


def cmd_synthesize(args, out):
    doc = _load(args.plant or args.input)
    plant = docmod.to_object(doc)
    if not isinstance(plant, HinfPlant):
        raise _UsageError("synthesize expects a plant document")
    meta = {"attenuationGain": repr(ATTENUATION_GAIN)}
    report = {"attenuation_gain": ATTENUATION_GAIN}
    try:
        if args.realizable:
            rs = synthesize_realizable(plant)
            res, ctrl, loop = rs.synthesis, rs.controller, rs.closed_loop
            report["controller_norm"] = rs.controller_norm
        else:
            res = synthesize(plant)
            ctrl = res.controller
            loop = close_loop(plant, ctrl)
    except SynthesisError as exc:
        report.update(hypothesis=exc.hypothesis, message=str(exc))
        return "fail", report
    report.update(
        X=res.X, Y=res.Y,
        riccati_residuals=riccati_residuals(plant, res.X, res.Y),
        spectral_radius_XY=res.coupling_radius,
        closed_loop={"hurwitz": loop.hurwitz, "spectral_abscissa": loop.spectral_abscissa,
                     "hinf_norm": loop.hinf_norm_value},
    )
    _write(docmod.from_object(ctrl, meta), args.output, out)
    return ("pass" if loop.meets_target else "fail"), report


COMMANDS = {
    "build": (cmd_build, "construct a system from physical parameters"),
    "check": (cmd_check, "test physical realizability"),
    "transform": (cmd_transform, "convert between representations"),
    "norm": (cmd_norm, "H-infinity norm of a stable system"),
    "tf-eval": (cmd_tf_eval, "evaluate the transfer function at a point"),
    "synthesize": (cmd_synthesize, "central H-infinity controller for a plant"),
    "assumptions": (cmd_assumptions, "check the standing plant assumptions"),
}


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlinsys", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--in", dest="input", metavar="PATH", help="input document")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="relative residual tolerance (default %(default)g)")
        p.add_argument("--json-report", action="store_true",
                       help="print the report as JSON")
        if name in ("build", "transform", "synthesize"):
            p.add_argument("--out", dest="output", metavar="PATH",
                           help="output document (default: stdout)")
        if name == "transform":
            p.add_argument("--to", required=True, choices=("quadrature", "general"))
        if name == "tf-eval":
            p.add_argument("--s", required=True, help="complex point, e.g. 0.5+2j")
        if name in ("synthesize", "assumptions"):
            p.add_argument("--plant", metavar="PATH", help="plant document (alias of --in)")
        if name == "synthesize":
            p.add_argument("--realizable", action="store_true",
                           help="complete the controller with noise channels")
    return parser


def run(argv=None, out=None, err=None):
    """Run the CLI and return ``(exit_code, report)``."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    json_report = argv is not None and "--json-report" in argv
    args = None
    try:
        args = make_parser().parse_args(argv)
        json_report = args.json_report if args.command else json_report
        if args.command is None:
            raise _UsageError("a command is required: " + ", ".join(COMMANDS))
        func = COMMANDS[args.command][0]
        verdict, report = func(args, out)
        report = {"command": args.command, "verdict": verdict, **report}
    except SchemaError as exc:
        verdict = "error"
        report = {"verdict": verdict, "error": "schema", "message": str(exc),
                  "field": exc.field, "line": exc.line}
    except _UsageError as exc:
        verdict = "error"
        report = {"verdict": verdict, "error": "usage", "message": str(exc)}
    except QLinSysError as exc:
        # A well-formed document on which the operation cannot succeed.
        verdict = "fail"
        report = {"command": args.command, "verdict": verdict,
                  "error": type(exc).__name__, "message": str(exc)}
    doc_on_stdout = args is not None and args.command in ("build", "transform", "synthesize") \
        and getattr(args, "output", None) is None
    stream = err if verdict == "error" or doc_on_stdout else out
    if json_report:
        stream.write(json.dumps(_jsonable(report), indent=2) + "\n")
    else:
        stream.write(render_text(report))
    return EXIT_CODES[verdict], report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
