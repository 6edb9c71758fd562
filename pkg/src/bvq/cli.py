"""Command-line front end: module files in, reports out.

Exit codes: 0 success, 1 a verdict or invariant failed (including a module
that parses but does not validate), 2 a parse or usage error.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import click

from .core.complexes import build_complex, cohomology
from .core.scalars import format_scalar, parse_scalar, to_rational
from .errors import BVQError, ParseError, ValidationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# module files


@dataclass
class ModuleFile:
    generators: list
    differential: list = field(default_factory=list)
    pairing: list = field(default_factory=list)
    parameters: list = field(default_factory=list)
    has_pairing: bool = False

    def complex(self):
        return build_complex(self.generators, self.differential, self.parameters)

    def module(self):
        from .lie1 import QuadraticModule
        C = self.complex()
        omega = {}
        for a, b, c in self.pairing:
            omega[(a, b)] = omega.get((a, b), 0) + c
        return QuadraticModule(C, omega)

    def to_dict(self):
        out = {
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "differential": [{"source": s, "target": t, "coefficient": format_scalar(c)}
                             for s, t, c in self.differential],
        }
        if self.has_pairing:
            out["pairing"] = [{"left": a, "right": b, "coefficient": format_scalar(c)}
                              for a, b, c in self.pairing]
        out["parameters"] = list(self.parameters)
        return out


def _entry(item, keys, where):
    if isinstance(item, dict):
        missing = [k for k in keys if k not in item]
        if missing:
            raise ParseError(f"missing field {missing[0]!r}", where)
        extra = sorted(set(item) - set(keys))
        if extra:
            raise ParseError(f"unknown field {extra[0]!r}", where)
        return [item[k] for k in keys]
    if isinstance(item, list) and len(item) == len(keys):
        return list(item)
    raise ParseError(f"expected an object with fields {list(keys)}", where)


def _name(value, where):
    if not isinstance(value, str) or not value:
        raise ParseError("generator names must be non-empty strings", where)
    return value


def parse_module_data(data, validate=True, source="<data>"):
    """Build a :class:`ModuleFile` from decoded JSON."""
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", source)
    unknown = sorted(set(data) - {"generators", "differential", "pairing", "parameters"})
    if unknown:
        raise ParseError(f"unknown field {unknown[0]!r}", source)
    if "generators" not in data:
        raise ParseError("missing field 'generators'", source)
    params = data.get("parameters", [])
    if not isinstance(params, list) or not all(isinstance(p, str) and p.isidentifier() for p in params):
        raise ParseError("parameters must be a list of identifiers", f"{source}:parameters")
    gens, seen = [], set()
    for i, item in enumerate(data["generators"]):
        where = f"{source}:generators[{i}]"
        name, deg = _entry(item, ("name", "degree"), where)
        name = _name(name, where)
        if isinstance(deg, bool) or not isinstance(deg, int):
            raise ParseError("degree must be an integer", f"{where}.degree")
        if name in seen:
            raise ValidationError(f"{where}: duplicate generator {name!r}", witness=name)
        if name in params:
            raise ValidationError(f"{where}: {name!r} is both a generator and a parameter", witness=name)
        seen.add(name)
        gens.append((name, deg))

    def triples(section, keys):
        out = []
        for i, item in enumerate(data.get(section, [])):
            where = f"{source}:{section}[{i}]"
            a, b, c = _entry(item, keys, where)
            for k, v in zip(keys, (a, b)):
                if _name(v, f"{where}.{k}") not in seen:
                    raise ValidationError(f"{where}.{k}: unknown generator {v!r}", witness=v)
            try:
                c = parse_scalar(c, params, f"{where}.{keys[2]}")
            except ValidationError as exc:
                raise ValidationError(f"{where}.{keys[2]}: {exc}", witness=c) from None
            out.append((a, b, c))
        return out

    for section in ("differential", "pairing"):
        if section in data and not isinstance(data[section], list):
            raise ParseError(f"{section} must be a list", f"{source}:{section}")
    mf = ModuleFile(gens, triples("differential", ("source", "target", "coefficient")),
                    triples("pairing", ("left", "right", "coefficient")), list(params),
                    "pairing" in data)
    if validate:
        validate_module_file(mf)
    return mf


def validate_module_file(mf):
    from .lie1 import validate_quadratic
    try:
        C = mf.complex()
    except BVQError as exc:
        raise ValidationError(str(exc), witness=getattr(exc, "witness", None)) from None
    if mf.has_pairing:
        rep = validate_quadratic(mf.module())
        if not rep.ok:
            v = rep.first()
            raise ValidationError(str(rep), witness=v.witness)
    return C


def parse_module_file(path, validate=True):
    """Read a JSON module file; errors carry the offending line or field."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None
    return parse_module_data(data, validate, str(path))


def serialize(mf):
    """JSON text for a :class:`ModuleFile`; parsing it back gives the same module."""
    return json.dumps(mf.to_dict(), indent=2, sort_keys=False) + "\n"


# reports


def _digest(path):
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def report(command, args, body, path=None):
    out = {"command": command, "arguments": args}
    if path is not None:
        out["input"] = {"path": str(path), "digest": _digest(path)}
    out.update(body)
    return out


def _human(rep, indent=0):
    lines = []
    pad = "  " * indent
    for k, v in rep.items():
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            lines.extend(_human(v, indent + 1))
        elif isinstance(v, list):
            lines.append(f"{pad}{k}: " + ", ".join(json.dumps(x) if isinstance(x, dict) else str(x) for x in v))
        else:
            lines.append(f"{pad}{k}: {'-' if v is None else v}")
    return lines


def emit(rep, fmt, started=None):
    if fmt == "json":
        if started is not None:
            rep = {**rep, "timing": {"seconds": round(time.perf_counter() - started, 3)}}
        click.echo(json.dumps(rep, indent=2, sort_keys=True))
    else:
        click.echo("\n".join(_human(rep)))
        if started is not None:
            click.echo(f"timing: {time.perf_counter() - started:.3f}s")


def _parse_params(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise click.BadParameter(f"expected name=value, got {item!r}", param_hint="--param")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_scalar(v.strip(), location="--param")
    return out


def _load_module(path, params):
    mf = parse_module_file(path, validate=not params)
    Q = mf.module()
    if params:
        unknown = sorted(set(params) - set(mf.parameters))
        if unknown:
            raise ValidationError(f"--param {unknown[0]} is not a declared parameter", witness=unknown[0])
        Q = Q.specialize(params)
    return mf, Q


def _cohomology_dict(rep):
    return {str(d): h for d, h in rep.dims().items()}


class _Runner:
    """Shared error handling: map library exceptions onto the exit-code contract."""

    def __init__(self, ctx, fmt, timing):
        self.ctx, self.fmt = ctx, fmt
        self.started = time.perf_counter() if timing else None

    def __enter__(self):
        return self

    def __exit__(self, et, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, (ParseError, click.BadParameter)):
            click.echo(f"error: {exc}", err=True)
            self.ctx.exit(EXIT_USAGE)
        if isinstance(exc, BVQError):
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            self.ctx.exit(EXIT_FAIL)
        return False

    def done(self, rep, ok=True):
        emit(rep, self.fmt, self.started)
        self.ctx.exit(EXIT_OK if ok else EXIT_FAIL)


# commands

_format = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                       show_default=True)
_cutoff = click.option("--cutoff", type=click.IntRange(0), default=8, show_default=True,
                       help="weight cutoff N")
_param = click.option("--param", "params", multiple=True, metavar="NAME=RAT",
                      help="bind a declared parameter (repeatable)")
_timing = click.option("--timing", is_flag=True, help="include wall-clock time")
_file = click.argument("path", type=click.Path(dir_okay=False))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="bvq")
def main():
    """Exact linear BV quantization of quadratic modules."""


@main.command()
@_file
@_param
@_format
@_timing
@click.pass_context
def check(ctx, path, params, fmt, timing):
    """Validate a module file (complex, pairing, Heisenberg bracket)."""
    from .lie1 import heisenberg, is_nondegenerate, validate_lie1, validate_quadratic
    with _Runner(ctx, fmt, timing) as run:
        p = _parse_params(params)
        mf = parse_module_file(path, validate=False)
        try:
            mf.complex()
            complex_ok, complex_err = True, None
        except BVQError as exc:
            complex_ok, complex_err = False, str(exc)
        body = {"complex": {"ok": complex_ok, "error": complex_err}}
        ok = complex_ok
        if complex_ok:
            Q = mf.module()
            if p:
                Q = Q.specialize(p)
            rq = validate_quadratic(Q)
            body["quadratic"] = rq.to_dict()
            ok = ok and rq.ok
            if rq.ok and mf.has_pairing:
                rl = validate_lie1(heisenberg(Q))
                body["heisenberg"] = rl.to_dict()
                ok = ok and rl.ok
                if not Q.parameters():
                    body["nondegenerate"] = is_nondegenerate(Q)
        run.done(report("check", {"params": list(params)}, body, path), ok)


def _bindings(hbar, c):
    b = {"hbar": 1, "c": 1}
    if hbar is not None:
        b["hbar"] = parse_scalar(hbar, location="--hbar")
    if c is not None:
        b["c"] = parse_scalar(c, location="--c")
    return b


@main.command()
@_file
@_cutoff
@click.option("--hbar", default=None, metavar="RAT", help="value bound to hbar (default 1)")
@click.option("--c", "c", default=None, metavar="RAT", help="value bound to the central c (default 1)")
@_param
@_format
@_timing
@click.pass_context
def quantize(ctx, path, cutoff, hbar, c, params, fmt, timing):
    """Quantize and report cohomology with a stabilization certificate."""
    from .quantize import det_line, quantize as run_quantize
    with _Runner(ctx, fmt, timing) as run:
        b = _bindings(hbar, c)
        _, Q = _load_module(path, _parse_params(params))
        if b == {"hbar": 1, "c": 1}:
            verdict = det_line(Q, cutoff)
            res = verdict.result
            body = res.to_dict()
            body["verdict"] = verdict.to_dict()
            ok = res.stable and verdict.prediction_ok
        else:
            res = run_quantize(Q, cutoff, b)
            body = res.to_dict()
            ok = res.stable
        run.done(report("quantize", {"cutoff": cutoff, "params": list(params),
                                     "hbar": format_scalar(b["hbar"]), "c": format_scalar(b["c"])},
                        body, path), ok)


@main.command()
@_file
@_cutoff
@_param
@_format
@_timing
@click.pass_context
def dequantize(ctx, path, cutoff, params, fmt, timing):
    """Classical limit hbar = 0: axiom check and cohomology of the truncation."""
    from .envelope import check_axioms, u_p0
    from .lie1 import heisenberg
    from .quantize import _truncated_complex, dequantize as run_dequantize
    with _Runner(ctx, fmt, timing) as run:
        _, Q = _load_module(path, _parse_params(params))
        U = run_dequantize(Q, cutoff)
        axioms = check_axioms(U)
        matches = U.same_differential(u_p0(heisenberg(Q), cutoff))
        # the classical differential preserves weight, so the truncation is exact
        H = cohomology(_truncated_complex(U, cutoff))
        body = {"kind": U.kind, "basis": len(U.basis()), "axioms": axioms.to_dict(),
                "matchesP0": matches, "cohomology": _cohomology_dict(H)}
        run.done(report("dequantize", {"cutoff": cutoff, "params": list(params)}, body, path),
                 axioms.ok and matches)


@main.command(name="cohomology")
@_file
@_param
@_format
@_timing
@click.pass_context
def cohomology_cmd(ctx, path, params, fmt, timing):
    """Cohomology of the underlying complex."""
    with _Runner(ctx, fmt, timing) as run:
        _, Q = _load_module(path, _parse_params(params))
        if Q.parameters():
            raise ValidationError(f"bind parameters {sorted(Q.parameters())} with --param")
        H = cohomology(Q.complex)
        body = {"cohomology": _cohomology_dict(H), "euler": H.euler_characteristic()}
        run.done(report("cohomology", {"params": list(params)}, body, path))


@main.command()
@_file
@_cutoff
@_param
@_format
@_timing
@click.pass_context
def cotangent(ctx, path, cutoff, params, fmt, timing):
    """Quantize the shifted cotangent of the file's complex."""
    from .quantize import cotangent_quantize
    with _Runner(ctx, fmt, timing) as run:
        _, Q = _load_module(path, _parse_params(params))
        cq = cotangent_quantize(Q.complex, cutoff)
        body = cq.result.to_dict()
        body["verdict"] = cq.verdict.to_dict()
        body["formulas"] = cq.formulas
        body["matching"] = cq.matching_formulas()
        run.done(report("cotangent", {"cutoff": cutoff, "params": list(params)}, body, path),
                 cq.verdict.invertible)


@main.command(name="family-scan")
@_file
@click.option("--values", required=True, metavar="LIST", help="comma-separated rationals")
@_cutoff
@_format
@_timing
@click.pass_context
def family_scan_cmd(ctx, path, values, cutoff, fmt, timing):
    """Quantize a one-parameter family at each value and report jumps."""
    from .quantize import family_scan
    with _Runner(ctx, fmt, timing) as run:
        vals = [to_rational(parse_scalar(v.strip(), location="--values"))
                for v in values.split(",") if v.strip()]
        if not vals:
            raise click.BadParameter("no values given", param_hint="--values")
        mf = parse_module_file(path)
        scan = family_scan(mf.module(), vals, cutoff)
        run.done(report("family-scan", {"cutoff": cutoff, "values": [format_scalar(v) for v in vals]},
                        scan.to_dict(), path))


def parse_action(text, dim):
    """``"1"``, ``"2,1;1,3"`` (rows split by ';') or a JSON file holding a matrix."""
    p = Path(text)
    if p.suffix == ".json" and p.exists():
        rows = json.loads(p.read_text())
        rows = [[parse_scalar(str(v) if not isinstance(v, int) else v, location=str(p)) for v in r]
                for r in rows]
    else:
        rows = [[parse_scalar(v.strip(), location="--action") for v in r.split(",")]
                for r in text.split(";")]
    flat = [v for r in rows for v in r]
    if len(rows) == 1 and len(flat) == dim * dim and dim > 1:
        rows = [flat[i * dim:(i + 1) * dim] for i in range(dim)]
    elif len(flat) == dim and dim > 1 and len(rows) == 1:
        rows = [[flat[i] if i == j else 0 for j in range(dim)] for i in range(dim)]
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ParseError(f"action is not a {dim}x{dim} matrix", "--action")
    return rows


@main.command()
@click.option("--dim", type=click.IntRange(1), required=True)
@click.option("--action", required=True, help="matrix A of Q = x^T A x / 2")
@click.option("--observable", required=True, help='polynomial in x1..xn, e.g. "x1^4"')
@_format
@_timing
@click.pass_context
def moments(ctx, dim, action, observable, fmt, timing):
    """Gaussian expectation of an observable, cross-checked against Wick's formula."""
    from .divergence import PolyvectorAlgebra, QuadraticAction, expectation, wick_oracle
    with _Runner(ctx, fmt, timing) as run:
        A = QuadraticAction(parse_action(action, dim))
        try:
            probe = PolyvectorAlgebra(dim, None).parse(observable)
        except BVQError as exc:
            raise ParseError(str(exc), "--observable") from None
        PV = PolyvectorAlgebra(dim, max([sum(m) for m in probe] + [0]) + 1)
        p = PV.parse(observable)
        e = expectation(A, PV, p)
        w = wick_oracle(A, PV, p)
        body = {"expectation": format_scalar(e), "wick": format_scalar(w), "agree": e == w}
        run.done(report("moments", {"dim": dim, "action": action, "observable": observable}, body),
                 e == w)


@main.command()
@_file
@_cutoff
@click.option("--heisenberg", "use_heis", is_flag=True,
              help="use the Heisenberg algebra of the pairing instead of the abelian one")
@_param
@_format
@_timing
@click.pass_context
def barcheck(ctx, path, cutoff, use_heis, params, fmt, timing):
    """Cobar-bar checks: d^2, counit chain and Lie morphism, weight cohomology."""
    from .barcobar import CounitMap, bar, cobar, weight_cohomology
    from .lie1 import abelian, heisenberg
    with _Runner(ctx, fmt, timing) as run:
        _, Q = _load_module(path, _parse_params(params))
        g = heisenberg(Q) if use_heis else abelian(Q.complex)
        Om = cobar(bar(g, cutoff), cutoff)
        sq = Om.check_square_zero()
        counit = CounitMap(Om)
        chain, lie = counit.is_chain_map(), counit.is_lie_morphism()
        body = {"squareZero": sq.ok, "counitChainMap": chain, "counitLieMorphism": lie}
        if Om.is_weight_graded():
            body["weightCohomology"] = {str(w): {str(d): h for d, h in weight_cohomology(Om, w).items()}
                                        for w in range(1, cutoff + 1)}
        run.done(report("barcheck", {"cutoff": cutoff, "heisenberg": use_heis,
                                     "params": list(params)}, body, path), sq.ok and chain and lie)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
