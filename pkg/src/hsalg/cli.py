"""Command-line front end: `hsalg <command> ...`, JSON on stdout, --human for plain tables."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .cdga import (FiniteCdga, GradedElement, ModelError, class_of, cohomology, model_from_json, model_to_json,
                   parse_element, render_vector, same_class, weight_subcomplex)
from .jets import (JetPoly, JetVectorField, compose, exp_flow, extension_cocycle, invert, lie_bracket, log_jet,
                   project)
from .laurent import parse_laurent
from .mapping_torus import TorusMonodromy, cat_map_report, parse_matrix, twisted_dims
from .mc import (MaurerCartanFailure, SplittingData, SymplecticData, build_sk_complex, check_maurer_cartan,
                 check_symplectic_data, deform_family, extension_class, extension_form_alt, filtration_E1,
                 restricted_complex, symplectic_variation, verify_homogeneity)
from .models import REGISTRY, Builtin, load_builtin
from .poisson import (FrameData, LaurentBivector, SingularForm, check_translation_invariance, intro_bracket,
                      invert_form, rank_drop_order, schouten_jacobi, universal_frame_data)
from .scalars import parse_scalar
from .universal import build_c_theta, build_ce, build_sk, ce_splitting, universal_symplectic

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

BUILDERS = ("ce-g", "ce-k", "sk", "c-theta", "universal-symplectic")


class UsageError(Exception):
    pass


class CommandResult:
    def __init__(self, body: dict, passed: bool = True):
        self.body = body
        self.passed = passed

    @property
    def status(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL


def max_dim() -> int:
    raw = os.environ.get("HSALG_MAX_DIM", "4096")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HSALG_MAX_DIM must be an integer, got {raw!r}") from None


def _guard(model: FiniteCdga) -> FiniteCdga:
    cap = max_dim()
    if len(model.basis) > cap:
        raise UsageError(f"model {model.name or '?'} has {len(model.basis)} basis elements, over HSALG_MAX_DIM={cap}")
    return model


# model resolution

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _form(model: FiniteCdga, value, what: str) -> GradedElement:
    """A form given as an expression string, a {basis name: coefficient} map, or a dense coefficient list."""
    if value is None:
        return model.zero()
    if isinstance(value, str):
        return parse_element(model, value)
    if isinstance(value, dict):
        return model.element({str(k): Fraction(str(v)) for k, v in value.items()})
    if isinstance(value, list):
        if len(value) != len(model.basis):
            raise UsageError(f"{what}: coefficient vector has {len(value)} entries, model has {len(model.basis)}")
        return model.element({b.name: Fraction(str(c)) for b, c in zip(model.basis, value) if Fraction(str(c))})
    raise UsageError(f"{what}: unsupported form {value!r}")


def _data_from_json(model: FiniteCdga, doc: dict):
    if "order" not in doc:
        raise UsageError("data file needs an 'order' entry")
    k = int(doc["order"]) - 1
    a = _form(model, doc.get("a"), "a")
    etas = tuple(_form(model, e, f"etas[{i}]") for i, e in enumerate(doc.get("etas", [])))
    s = SplittingData(model, a, k, etas)
    sd = None
    if "alphas" in doc:
        alphas = tuple(_form(model, x, f"alphas[{i}]") for i, x in enumerate(doc["alphas"]))
        sd = SymplecticData(s, _form(model, doc.get("beta"), "beta"), alphas)
    return s, sd


def _builtin_params(args) -> dict:
    params = {}
    if args.model == "genus-g":
        params["g"] = args.g
        if args.params:
            # bare fractions like 1/2 are not JSON numbers; quote them first
            text = re.sub(r'(?<!")(-?\d+/\d+)(?!")', r'"\1"', args.params)
            try:
                params["params"] = [[Fraction(str(v)) for v in row] for row in json.loads(text)]
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise UsageError(f"--params: expected [[x,y,w,z],...]: {exc}") from None
    elif args.model == "cat-torus" and args.lam is not None:
        params["lam"] = Fraction(args.lam)
    return params


def _from_builder(name: str, args) -> Builtin:
    k = args.k
    if name == "universal-symplectic":
        u = universal_symplectic(args.n)
        return Builtin(name, u.data.splitting.base, u.data.splitting, u.data)
    if k is None:
        raise UsageError(f"builder {name} needs --k")
    if name in ("ce-g", "ce-k"):
        base = build_ce(k, name[-1])
        return Builtin(name, base, ce_splitting(base, k, name == "ce-g"))
    sk = build_sk(k) if name == "sk" else build_c_theta(k)
    return Builtin(name, sk.algebra)


def resolve(args, need_splitting: bool = False) -> Builtin:
    if getattr(args, "model_file", None):
        model = model_from_json(_read_json(args.model_file))
        b = Builtin(model.name or args.model_file, model)
    elif args.model in BUILDERS:
        b = _from_builder(args.model, args)
    elif args.model:
        b = load_builtin(args.model, **_builtin_params(args))
        if args.k is not None and need_splitting and b.order is not None and args.k != b.order:
            raise UsageError(f"--k {args.k} does not match the order {b.order} of {args.model}")
    else:
        raise UsageError("give --model or --model-file")
    _guard(b.model)
    if getattr(args, "data", None):
        b.splitting, b.symplectic = _data_from_json(b.model, _read_json(args.data))
    if need_splitting and b.splitting is None:
        raise UsageError(f"model {b.name} carries no splitting data; pass --data")
    return b


# commands

def cmd_models(args) -> CommandResult:
    rows = []
    for name in sorted(REGISTRY):
        b = REGISTRY[name].build()
        rows.append({"name": name, "description": REGISTRY[name].description, "basis_size": len(b.model.basis),
                     "order": b.order, "symplectic": b.symplectic is not None})
    return CommandResult({"models": rows, "builders": list(BUILDERS)})


def cmd_ce(args) -> CommandResult:
    m = _guard(build_ce(args.k, args.variant))
    return CommandResult({"model": model_to_json(m), "cohomology_dims": list(cohomology(m).dims)})


def cmd_sk_build(args) -> CommandResult:
    sk = build_sk(args.k) if args.variant == "g" else build_c_theta(args.k)
    _guard(sk.algebra)
    return CommandResult({"model": model_to_json(sk.algebra), "base_size": sk.n,
                          "s_part_size": len(sk.algebra.basis) - sk.n})


def _cohomology_body(cx, reps: bool) -> dict:
    h = cohomology(cx)
    body = {"dims": list(h.dims), "euler_characteristic": sum((-1) ** i * d for i, d in enumerate(h.dims))}
    if reps:
        body["representatives"] = {str(n): r for n, r in sorted(h.rendered().items())}
    return body


def cmd_cohomology(args) -> CommandResult:
    b = resolve(args)
    if args.twist is not None:
        if b.splitting is None:
            raise UsageError("--twist needs a model with a connection")
        cx = b.splitting.twisted(args.twist)
    elif args.weight is not None:
        cx = weight_subcomplex(b.model, args.weight)
    else:
        cx = b.model
    body = {"model": b.name, **_cohomology_body(cx, args.representatives)}
    return CommandResult(body)


def cmd_class(args) -> CommandResult:
    b = resolve(args)
    x = parse_element(b.model, args.element)
    cx = b.model if args.twist is None else b.splitting.twisted(args.twist)
    c = class_of(x, cx)
    body = {"element": str(x), "degree": c.degree, "exact": c.exact,
            "coordinates": [str(v) for v in c.coordinates]}
    if c.witness is not None:
        body["primitive"] = render_vector(cx, c.witness)
    if args.other:
        body["same_class_as_other"] = same_class(x, parse_element(b.model, args.other), cx)
        return CommandResult(body, body["same_class_as_other"])
    return CommandResult(body)


def cmd_mc_check(args) -> CommandResult:
    b = resolve(args, need_splitting=True)
    rep = check_maurer_cartan(b.splitting)
    return CommandResult({"model": b.name, "order": b.splitting.k + 1, **rep.to_json()}, rep.passed)


def cmd_ext_class(args) -> CommandResult:
    b = resolve(args, need_splitting=True)
    res = extension_class(b.splitting)
    alt = extension_form_alt(b.splitting)
    body = {"model": b.name, "order": b.splitting.k + 1, **res.to_json(),
            "alternate_form_agrees": alt == res.form}
    return CommandResult(body, body["alternate_form_agrees"])


def cmd_sk_cohomology(args) -> CommandResult:
    b = resolve(args, need_splitting=True)
    skc = build_sk_complex(b.splitting)
    _guard(skc.algebra)
    e1 = filtration_E1(skc)
    body = {"model": b.name, "order": b.splitting.k + 1, **_cohomology_body(skc.complex(), args.representatives),
            "E1": e1.to_json()}
    return CommandResult(body, e1.matches)


def cmd_gysin_check(args) -> CommandResult:
    b = resolve(args, need_splitting=True)
    rep = restricted_complex(b.splitting)
    return CommandResult({"model": b.name, **rep.to_json()}, rep.holds)


def _symplectic(args) -> Builtin:
    b = resolve(args, need_splitting=True)
    if b.symplectic is None:
        raise UsageError(f"model {b.name} carries no symplectic data; pass --data with beta/alphas")
    return b


def cmd_symplectic_check(args) -> CommandResult:
    b = _symplectic(args)
    rep = check_symplectic_data(b.symplectic)
    return CommandResult({"model": b.name, **rep.to_json()}, rep.passed)


def cmd_variation(args) -> CommandResult:
    b = _symplectic(args)
    res = symplectic_variation(b.symplectic)
    return CommandResult({"model": b.name, **res.to_json()})


def cmd_deform(args) -> CommandResult:
    b = resolve(args, need_splitting=True)
    scale = Fraction(args.scale)
    d = deform_family(b.splitting, scale)
    hom = verify_homogeneity(b.splitting)
    body = {"model": b.name, **d.to_json(), "homogeneity_holds": hom.holds,
            "homogeneity_samples": [str(x) for x in hom.samples]}
    return CommandResult(body, hom.holds)


def _bivector(args) -> LaurentBivector:
    if args.bivector:
        return LaurentBivector.from_json(_read_json(args.bivector))
    if args.builtin == "intro":
        return intro_bracket()
    raise UsageError("give --bivector FILE or --builtin intro")


def cmd_jacobi_check(args) -> CommandResult:
    q = _bivector(args)
    res = schouten_jacobi(q)
    body = {"vars": list(q.vars), "residual_zero": not res,
            "residuals": [[q.vars[i], q.vars[j], q.vars[k], str(p)] for (i, j, k), p in sorted(res.items())]}
    if args.invariant:
        body["translation_invariant"] = check_translation_invariance(q, args.invariant)
    return CommandResult(body, not res and body.get("translation_invariant", True))


def _frame(args) -> FrameData:
    if args.frame_file:
        doc = _read_json(args.frame_file)
        v = tuple(doc["vars"])
        mat = lambda rows: [[parse_laurent(str(x), v) for x in row] for row in rows]
        return FrameData(v, mat(doc["rho"]), mat(doc["omega"]))
    if args.frame and args.frame.startswith("universal-E") and args.frame[11:].isdigit():
        m = int(args.frame[11:])
        if m % 2 == 0 or m < 3:
            raise UsageError("frame universal-E<m> needs odd m >= 3")
        return universal_frame_data((m - 1) // 2)
    raise UsageError("give --frame universal-E<2n+1> or --frame-file FILE")


def cmd_invert_form(args) -> CommandResult:
    fd = _frame(args)
    q = invert_form(fd, args.method)
    res = schouten_jacobi(q)
    body = {"bivector": q.to_json(), "jacobi_residual_zero": not res}
    if args.var:
        body["rank_drop"] = rank_drop_order(q, args.var).to_json()
    return CommandResult(body, not res)


def cmd_rank_order(args) -> CommandResult:
    q = _bivector(args)
    return CommandResult({"var": args.var, **rank_drop_order(q, args.var).to_json()})


def cmd_mapping_torus(args) -> CommandResult:
    if args.cat_report:
        rep = cat_map_report(args.g1, args.g2)
        return CommandResult(rep.to_json(), rep.base_case_holds)
    if not (args.matrix and args.mu is not None and args.degree is not None):
        raise UsageError("mapping-torus needs --matrix, --mu and --degree (or --cat-report)")
    tm = TorusMonodromy(parse_matrix(args.matrix))
    mu = parse_scalar(args.mu)
    degrees = range(tm.n + 2) if args.degree == "all" else [int(args.degree)]
    rows = [twisted_dims(tm, mu, r).to_json() for r in degrees]
    return CommandResult({"mu": str(mu), "dims": rows})


def _field(text: str) -> JetVectorField:
    coeffs = [Fraction(c) for c in text.replace(" ", "").split(",")]
    return JetVectorField(len(coeffs), tuple(coeffs))


def cmd_jet(args) -> CommandResult:
    op, k, xs = args.op, args.k, args.operands
    need = {"compose": 2, "invert": 1, "project": 1, "log": 1, "exp": 1, "bracket": 2, "cocycle": 2}[op]
    if len(xs) != need:
        raise UsageError(f"jet {op} takes {need} operand(s)")
    if op in ("exp", "bracket"):
        fields = [_field(x) for x in xs]
        out = exp_flow(fields[0]) if op == "exp" else lie_bracket(*fields)
        return CommandResult({"result": str(out) if op == "exp" else out.to_json()})
    if k is None:
        raise UsageError(f"jet {op} needs --k")
    fs = [JetPoly.parse(x, k) for x in xs]
    if op == "compose":
        out = str(compose(*fs))
    elif op == "invert":
        out = str(invert(fs[0]))
    elif op == "project":
        if args.m is None:
            raise UsageError("jet project needs --m")
        out = str(project(fs[0], args.m))
    elif op == "log":
        out = log_jet(fs[0]).to_json()
    else:
        out = str(extension_cocycle(*fs))
    return CommandResult({"result": out})


def cmd_export(args) -> CommandResult:
    b = load_builtin(args.name)
    return CommandResult(model_to_json(_guard(b.model)))


def cmd_import(args) -> CommandResult:
    m = model_from_json(_read_json(args.path))
    _guard(m)
    return CommandResult({"valid": True, "name": m.name, "basis_size": len(m.basis),
                          "cohomology_dims": list(cohomology(m).dims)})


# parser

def _model_opts(p: argparse.ArgumentParser, data: bool = True):
    p.add_argument("--model", help="builtin name or builder (ce-g, ce-k, sk, c-theta, universal-symplectic)")
    p.add_argument("--model-file", help="model in the JSON exchange format")
    p.add_argument("--k", type=int, help="algebroid order for builtins; index k for builders")
    p.add_argument("--n", type=int, default=1, help="n for universal-symplectic")
    p.add_argument("--g", type=int, default=1, help="genus for genus-g")
    p.add_argument("--params", help="genus-g parameters as JSON [[x,y,w,z],...]")
    p.add_argument("--lambda", dest="lam", help="rational stand-in for the cat-torus twist")
    if data:
        p.add_argument("--data", help="splitting/symplectic data JSON {order, a, etas, beta, alphas}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsalg", description="Exact computations for hypersurface Lie algebroids.")
    ap.add_argument("--human", action="store_true", help="plain text instead of JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--human", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        p.set_defaults(fn=fn)
        return p

    add("models", cmd_models, "list builtin models")
    p = add("ce", cmd_ce, "Chevalley-Eilenberg algebra of the jet Lie algebra")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=("g", "k"), default="g")
    p = add("sk-build", cmd_sk_build, "CE(g_k) + S_k or CE(k_k) + C(theta)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=("g", "k"), default="g")
    p = add("cohomology", cmd_cohomology, "cohomology of a model")
    _model_opts(p)
    p.add_argument("--weight", type=int, help="restrict to one weight")
    p.add_argument("--twist", type=int, help="twisted complex of weight w (needs a connection)")
    p.add_argument("--representatives", action="store_true")
    p = add("class", cmd_class, "cohomology class of an element")
    _model_opts(p)
    p.add_argument("--element", required=True)
    p.add_argument("--other", help="compare classes with this element")
    p.add_argument("--twist", type=int)
    for name, fn, h in (("mc-check", cmd_mc_check, "Maurer-Cartan residuals"),
                        ("ext-class", cmd_ext_class, "extension class"),
                        ("gysin-check", cmd_gysin_check, "restriction exact sequence"),
                        ("symplectic-check", cmd_symplectic_check, "symplectic data equations"),
                        ("variation", cmd_variation, "symplectic variation")):
        _model_opts(add(name, fn, h))
    p = add("sk-cohomology", cmd_sk_cohomology, "cohomology and E1 page of the S_k complex")
    _model_opts(p)
    p.add_argument("--representatives", action="store_true")
    p = add("deform", cmd_deform, "scaled family eta_i -> s^i eta_i")
    _model_opts(p)
    p.add_argument("--scale", default="2")
    for name, fn in (("jacobi-check", cmd_jacobi_check), ("rank-order", cmd_rank_order)):
        p = add(name, fn, "Poisson bivector " + ("Jacobi identity" if name == "jacobi-check" else "rank drop"))
        p.add_argument("--bivector", help="bivector JSON {vars, entries}")
        p.add_argument("--builtin", choices=("intro",))
        if name == "jacobi-check":
            p.add_argument("--invariant", nargs="*", help="variables the bivector must not depend on")
        else:
            p.add_argument("--var", default="t")
    p = add("invert-form", cmd_invert_form, "Q = rho omega^{-1} rho^T")
    p.add_argument("--frame", help="universal-E<2n+1>")
    p.add_argument("--frame-file", help="JSON {vars, rho, omega}")
    p.add_argument("--method", choices=("bareiss", "cofactor"), default="bareiss")
    p.add_argument("--var", help="also report the rank-drop order along var = 0")
    p = add("mapping-torus", cmd_mapping_torus, "twisted cohomology of a torus mapping torus")
    p.add_argument("--matrix")
    p.add_argument("--mu")
    p.add_argument("--degree", help="degree r or 'all'")
    p.add_argument("--cat-report", action="store_true")
    p.add_argument("--g1", type=int, default=1)
    p.add_argument("--g2", type=int, default=1)
    p = add("jet", cmd_jet, "jet group operations")
    p.add_argument("op", choices=("compose", "invert", "project", "log", "exp", "bracket", "cocycle"))
    p.add_argument("operands", nargs="*", help="jets like z+2z^2, or vector fields as c0,c1,...")
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p = add("export", cmd_export, "dump a builtin model as JSON")
    p.add_argument("name")
    p = add("import", cmd_import, "validate a model JSON file")
    p.add_argument("path")
    return ap


# output

def render_human(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and any(isinstance(v, (dict, list)) for v in
                                                             (val.values() if isinstance(val, dict) else val)):
                lines.append(f"{pad}{key}:")
                lines.extend(render_human(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_flat(val)}")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, dict):
                lines.append(f"{pad}-")
                lines.extend(render_human(val, indent + 1))
            else:
                lines.append(f"{pad}{_flat(val)}")
    else:
        lines.append(pad + _flat(obj))
    return lines


def _flat(val) -> str:
    if isinstance(val, list):
        return "  ".join(_flat(v) for v in val)
    if isinstance(val, dict):
        return ", ".join(f"{k}={_flat(v)}" for k, v in val.items())
    if val is None:
        return "-"
    if isinstance(val, bool):
        return "yes" if val else "no"
    return str(val)


def emit(body: dict, human: bool, stream) -> None:
    if human:
        stream.write("\n".join(render_human(body)) + "\n")
    else:
        stream.write(json.dumps(body, indent=2, sort_keys=True) + "\n")


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and getattr(args, "command", None) == "jet":
            # operands given after options, e.g. `jet compose --k 3 z+z^2 z+z^2`
            args.operands = list(args.operands) + extra
        elif extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    human = getattr(args, "human", False)
    try:
        result = args.fn(args)
    except (UsageError, ModelError, SingularForm, ValueError, KeyError, ZeroDivisionError) as exc:
        kind = type(exc).__name__
        body = {"error": kind, "message": str(exc).strip("'\"")}
        if isinstance(exc, MaurerCartanFailure) and exc.residuals:
            body["residuals"] = {str(k): str(v) for k, v in exc.residuals.items()}
        emit(body, human, stdout)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a bug
        emit({"error": "internal", "message": f"{type(exc).__name__}: {exc}"}, human, stdout)
        return EXIT_INTERNAL
    body = {"status": "pass" if result.passed else "fail", **result.body}
    emit(body, human, stdout)
    return result.status


def main() -> None:
    sys.exit(run())
