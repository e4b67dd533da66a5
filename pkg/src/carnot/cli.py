"""Command line entry point.

Every command writes a JSON report (stdout, or ``--out``) and a one-line
human summary on stderr.  Exit codes: 0 ok, 1 error, 2 verdict
"violated", 3 verdict "inconclusive".
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io as cio
from .exact import GaussQ, I, fmt_q, to_q
from .lie import GradedLieAlgebra, format_vector, validate

log = logging.getLogger("carnot")

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {"satisfied": EXIT_OK, "violated": EXIT_VIOLATED, "inconclusive": EXIT_INCONCLUSIVE}


class UsageError(ValueError):
    pass


# -- argument helpers ------------------------------------------------------------

def _algebra_arg(value: str) -> GradedLieAlgebra:
    if Path(value).exists():
        return cio.load_algebra(value)
    return cio.named_algebra(value, "<argument>")


def _ints(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {value!r}") from None


def _rationals(value: str) -> list[Fraction]:
    try:
        return [to_q(v.strip()) for v in value.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected comma-separated rationals, got {value!r}") from None


def _vector(alg: GradedLieAlgebra, value: str):
    """"1,0,1/2" by position or "X=1,Z=1/2" by label."""
    if "=" in value:
        named = {}
        for part in value.split(","):
            k, _, v = part.partition("=")
            named[k.strip()] = to_q(v.strip())
        return alg.vector(**named)
    return alg.vector(_rationals(value))


def _points(value: str) -> list[list[Fraction]]:
    return [_rationals(p) for p in value.split(";") if p.strip()]


def _radii(value: str | None):
    if value is None:
        return None
    if ":" in value:
        a, b, n = value.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(v) for v in value.split(",")])


@dataclasses.dataclass
class Outcome:
    report: dict
    summary: str
    code: int = EXIT_OK
    params: dict = dataclasses.field(default_factory=dict)


# -- core commands ---------------------------------------------------------------

def cmd_validate(args) -> Outcome:
    alg = _algebra_arg(args.algebra)
    rep = validate(alg)
    body = {"algebra": {"dims": list(alg.dims), "basis": list(alg.basis), "step": alg.step}, **rep.to_dict()}
    summary = "all invariants hold" if rep.ok else f"{len(rep.violations)} violation(s): {sorted(rep.kinds())}"
    return Outcome(body, summary, EXIT_OK if rep.ok else EXIT_ERROR)


def cmd_bch(args) -> Outcome:
    alg = _algebra_arg(args.algebra)
    x, y = _vector(alg, args.x), _vector(alg, args.y)
    z = alg.bch(x, y)
    body = {"x": format_vector(alg, x), "y": format_vector(alg, y), "product": format_vector(alg, z)}
    return Outcome(body, f"log(exp x exp y) = {body['product']}")


def cmd_dilate(args) -> Outcome:
    alg = _algebra_arg(args.algebra)
    lam = to_q(args.lam)
    x = _vector(alg, args.x)
    z = alg.dilate(lam, x)
    body = {"lambda": fmt_q(lam), "x": format_vector(alg, x), "dilated": format_vector(alg, z)}
    return Outcome(body, f"dilation by {fmt_q(lam)}: {body['dilated']}", params={"lambda": fmt_q(lam)})


def cmd_dnc(args) -> Outcome:
    alg = _algebra_arg(args.algebra)
    t = to_q(args.t)
    out = alg.dnc_rescale(t)
    body = {"t": fmt_q(t), "algebra": cio.algebra_to_dict(out), "validation": validate(out).to_dict()}
    return Outcome(body, f"rescaled brackets at t = {fmt_q(t)}", params={"t": fmt_q(t)})


def cmd_gbar_build(args) -> Outcome:
    from .gbar import build_gbar, check_nondegeneracy

    alg = _algebra_arg(args.algebra)
    gb = build_gbar(alg)
    rep = validate(gb.algebra)
    nd = check_nondegeneracy(gb.algebra)
    body = {
        "algebra": cio.algebra_to_dict(gb.algebra),
        "g_index": list(gb.g_index),
        "dual_index": list(gb.dual_index),
        "z_index": gb.z_index,
        "validation": rep.to_dict(),
        "nondegenerate": nd.to_dict(),
    }
    return Outcome(body, f"gbar has dims {list(gb.algebra.dims)}; {rep.to_dict()['summary']}",
                   EXIT_OK if rep.ok else EXIT_ERROR)


def cmd_gbar_flatten(args) -> Outcome:
    from .gbar import build_gbar, flatten_orbit

    alg = _algebra_arg(args.algebra)
    if args.gbar:
        alg = build_gbar(alg).algebra
    ell = _rationals(args.ell)
    t = None if args.t is None else to_q(args.t)
    g = flatten_orbit(alg, ell, t)
    full = tuple(ell) if len(ell) == alg.dim else tuple(ell) + (t,)
    image = alg.coAd(g.coords)(full)
    body = {
        "ell": [fmt_q(c) for c in full],
        "group_element": format_vector(alg, g.coords),
        "image": [fmt_q(c) for c in image],
        "verified": all(c == 0 for c in image[:-1]) and image[-1] == full[-1],
    }
    return Outcome(body, f"coAd(g) ell = (0, ..., 0, {fmt_q(full[-1])})")


# -- operators -----------------------------------------------------------------------

def _op_out(op, args) -> dict:
    return {"operator": cio.operator_to_dict(op), "degrees": sorted(op.degrees()),
            "homogeneous_degree": op.homogeneous_degree}


def cmd_op_normalize(args) -> Outcome:
    from .enveloping import pbw_normalize

    alg = _algebra_arg(args.algebra)
    word = [w.strip() for w in args.word.split(",") if w.strip()]
    op = pbw_normalize(alg, word, to_q(args.coeff))
    return Outcome(_op_out(op, args), repr(op))


def cmd_op_multiply(args) -> Outcome:
    from .enveloping import multiply

    A = cio.load_operator(args.a)
    B = cio.load_operator(args.b, A.algebra)
    op = multiply(A, B)
    return Outcome(_op_out(op, args), repr(op))


def cmd_op_adjoint(args) -> Outcome:
    from .enveloping import adjoint

    A = cio.load_operator(args.a)
    op = adjoint(A)
    return Outcome({**_op_out(op, args), "symmetric": op == A}, repr(op))


def cmd_op_sharp(args) -> Outcome:
    from .enveloping import sharp_product
    from .gbar import build_gbar

    D2 = cio.load_operator(args.d2)
    D1 = cio.load_operator(args.d1)
    amb = build_gbar(D2.algebra).semidirect()
    op = sharp_product(D1, D2, to_q(args.c), amb, symmetric=args.symmetric)
    return Outcome(_op_out(op, args), f"D1 # cD2 on {op.V0}-dim coefficients", params={"c": args.c})


def cmd_op_example1(args) -> Outcome:
    from .enveloping import build_example1

    alg = _algebra_arg(args.algebra)
    op = build_example1(alg, args.s)
    return Outcome(_op_out(op, args), repr(op), params={"s": args.s})


def cmd_op_gamma(args) -> Outcome:
    from .enveloping import build_gamma_model

    alg = _algebra_arg(args.algebra)
    op = build_gamma_model(alg, cio.parse_gamma(args.gamma))
    return Outcome(_op_out(op, args), repr(op), params={"gamma": args.gamma})


def _clifford(alg, spec: str, degree: int):
    from .enveloping import CliffordAction, pauli

    if spec == "pauli":
        n = alg.dims[degree - 1]
        if n > 3:
            raise UsageError("the Pauli action covers at most three generators")
        return CliffordAction([pauli(k) for k in range(1, n + 1)])
    data = cio._load_json(spec)
    mats = data.get("matrices") if isinstance(data, dict) else data
    return CliffordAction([cio._coeff_from_json(m, len(m), len(m[0]), spec, f"matrices[{j}]")
                           for j, m in enumerate(mats)])


def cmd_op_dirac(args) -> Outcome:
    from .enveloping import build_dirac

    alg = _algebra_arg(args.algebra)
    c = _clifford(alg, args.clifford, args.degree)
    op = build_dirac(alg, c, args.degree, imaginary=not args.real)
    return Outcome(_op_out(op, args), repr(op), params={"degree": args.degree, "imaginary": not args.real})


# -- representations -----------------------------------------------------------------

def _scan_operator(args):
    from .enveloping import build_gamma_model

    if args.operator is None:
        if args.algebra is None or args.gamma is None:
            raise UsageError("give --operator, or --algebra with --gamma")
        return build_gamma_model(_algebra_arg(args.algebra), cio.parse_gamma(args.gamma))
    op = cio.load_operator(args.operator)
    if args.gamma is not None:
        op = build_gamma_model(op.algebra, cio.parse_gamma(args.gamma))
    return op


def cmd_rep_scan(args) -> Outcome:
    from .rep import default_sweep, rockland_scan

    D = _scan_operator(args)
    sweep = default_sweep(D.algebra, _radii(args.radii), args.per_dim)
    v = rockland_scan(D, sweep, _ints(args.ladder), args.tol, refine=not args.no_refine)
    body = v.to_dict()
    body["operator"] = cio.operator_to_dict(D)
    body["min_singular_value"] = min(min(r["values"]) for r in v.rows)
    params = {"ladder": _ints(args.ladder), "tol": args.tol, "radii": args.radii, "per_dim": args.per_dim,
              "refine": not args.no_refine, "gamma": args.gamma}
    return Outcome(body, f"Rockland verdict: {v.verdict} (min sigma {body['min_singular_value']:.6g})",
                   VERDICT_EXIT[v.verdict], params)


def cmd_rep_criterion(args) -> Outcome:
    from .rep import exact_gamma_criterion

    alg = _algebra_arg(args.algebra)
    crit = exact_gamma_criterion(alg, cio.parse_gamma(args.gamma), args.bound)
    verdict = "satisfied" if crit.satisfied else "violated"
    body = {"verdict": verdict, **crit.to_dict()}
    return Outcome(body, f"exact criterion: {verdict}; singular set {crit.description}",
                   VERDICT_EXIT[verdict], {"gamma": args.gamma, "bound": args.bound})


# -- index --------------------------------------------------------------------------

def _builtin_operator(name: str):
    from .algebras import heisenberg
    from .enveloping import EnvelopingOperator, multiply

    h = heisenberg(1)
    a = EnvelopingOperator.from_words(h, [(("Y",), 1), (("X",), I)])
    ops = {
        "annihilation": a,
        "a2": multiply(a, a),
        "creation": EnvelopingOperator.from_words(h, [(("Y",), 1), (("X",), -I)]),
    }
    if name not in ops:
        raise UsageError(f"unknown builtin operator {name!r}; choose from {sorted(ops)}")
    return ops[name]


def cmd_index_fredholm(args) -> Outcome:
    from .index import TruncationLadder, fredholm_index
    from .rep import KirillovDatum, representation

    if args.builtin:
        D = _builtin_operator(args.builtin)
    elif args.operator:
        D = cio.load_operator(args.operator)
    else:
        raise UsageError("give --operator or --builtin")
    alg = D.algebra
    if args.ell is not None:
        ell = np.array([float(c) for c in _rationals(args.ell)])
    else:
        ell = np.zeros(alg.dim)
        ell[-1] = args.t
    factory = lambda N: representation(KirillovDatum(alg, ell), N)  # noqa: E731
    rep = fredholm_index(TruncationLadder.from_operator(D, factory, _ints(args.ladder)), args.rank_tol)
    body = {"index": rep.to_dict(), "ell": ell.tolist(), "operator": cio.operator_to_dict(D)}
    state = "stabilized" if rep.stabilized else "not stabilized"
    return Outcome(body, f"Fredholm index {rep.values} ({state})",
                   EXIT_OK if rep.stabilized else EXIT_INCONCLUSIVE,
                   {"ladder": _ints(args.ladder), "rank_tol": args.rank_tol})


def _random_invertible_hermitian(rng, n):
    while True:
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = (A + A.conj().T) / 2
        if np.min(np.abs(np.linalg.eigvalsh(H))) > 1e-3:
            return H


def cmd_index_sf(args) -> Outcome:
    from .index import signature, spectral_flow

    if args.f0 and args.f1:
        F0, F1 = cio.load_matrix(args.f0), cio.load_matrix(args.f1)
    elif args.seed is not None:
        rng = np.random.default_rng(args.seed)
        F0 = _random_invertible_hermitian(rng, args.dim)
        F1 = _random_invertible_hermitian(rng, args.dim)
    else:
        raise UsageError("give --f0 and --f1, or --seed")
    rep = spectral_flow(F0, F1, args.steps, args.tol)
    body = {"spectral_flow": rep.to_dict(), "signatures": [signature(F0), signature(F1)]}
    return Outcome(body, f"spectral flow {rep.values[0]}", params={"steps": args.steps, "tol": args.tol})


def cmd_index_winding(args) -> Outcome:
    from .index import winding_number

    if args.loop:
        data = cio._load_json(args.loop)
        mats = data.get("samples") if isinstance(data, dict) else data
        loop = [cio.matrix_from_json(m if isinstance(m, list) and m and isinstance(m[0], list) else [[m]],
                                     args.loop, f"samples[{j}]") for j, m in enumerate(mats)]
    else:
        k = args.power
        loop = lambda th: np.array([[np.exp(1j * k * th)]])  # noqa: E731
    rep = winding_number(loop, args.samples)
    return Outcome({"winding": rep.to_dict()}, f"winding number {rep.values[0]}",
                   params={"samples": args.samples, "power": args.power})


def _vanerp_defaults():
    from .algebras import abelian
    from .enveloping import EnvelopingOperator, pauli

    N2 = GradedLieAlgebra([2], {}, ["X1*", "Z"])
    D1 = EnvelopingOperator.from_words(N2, [(("X1*",), pauli(1) * I), (("Z",), pauli(2) * I)], 2)
    D2 = EnvelopingOperator.generator(abelian(1), "X1", GaussQ(0, -1))
    return D1, D2


def vanerp_report(D1, D2, c, sign, ladder, decay_modes, decay_N) -> dict:
    from .index import van_erp_pair

    out = van_erp_pair(D1, D2, c, sign, ladder, decay_modes, decay_N)
    fred = out["fredholm"]
    body = {
        "fredholm": fred.to_dict(),
        "decay": out["decay"],
        "spectral_flow": out["spectral_flow"].to_dict() if "spectral_flow" in out else None,
        "symbol_winding": out["symbol_winding"].to_dict() if out["symbol_winding"] is not None else None,
        "D1": cio.operator_to_dict(D1),
        "D2": cio.operator_to_dict(D2),
    }
    return body


def cmd_index_vanerp(args) -> Outcome:
    D1, D2 = _vanerp_defaults()
    if args.d2:
        D2 = cio.load_operator(args.d2)
    if args.d1:
        D1 = cio.load_operator(args.d1)
    ladder, modes = _ints(args.ladder), _ints(args.decay_modes)
    body = vanerp_report(D1, D2, to_q(args.c), args.sign, ladder, modes, args.decay_N)
    f, d = body["fredholm"], body["decay"]
    summary = f"Fredholm index {f['values']}, decay {['%.4g' % x for x in d['deviation']]}"
    params = {"c": args.c, "sign": args.sign, "ladder": ladder, "decay_modes": modes, "decay_N": args.decay_N}
    return Outcome(body, summary, params=params)


# -- osculating --------------------------------------------------------------------------

def cmd_osc_check(args) -> Outcome:
    from .osculating import check_filtration

    spec = cio.load_filtration(args.fields)
    rep = check_filtration(spec, _points(args.points))
    return Outcome(rep.to_dict(), "filtration condition holds" if rep.ok else
                   f"{len(rep.violations)} violation(s)", EXIT_OK if rep.ok else EXIT_ERROR)


def cmd_osc_algebra(args) -> Outcome:
    from .osculating import osculating_algebra

    spec = cio.load_filtration(args.fields)
    labels = args.labels.split(",") if args.labels else None
    osc = osculating_algebra(spec, _rationals(args.point), labels)
    body = {**osc.to_dict(), "algebra": cio.algebra_to_dict(osc.algebra)}
    return Outcome(body, f"osculating algebra with dims {list(osc.algebra.dims)}")


# -- pipelines ------------------------------------------------------------------------------

@dataclasses.dataclass
class RunConfig:
    """A versioned, reproducible run.  Unknown fields are rejected."""

    command: str = "pipeline"
    schema_version: int = cio.SCHEMA_VERSION
    vector_fields: str | None = None
    point: list = dataclasses.field(default_factory=list)
    labels: list | None = None
    gamma: Any = None
    gamma_start: Any = 0
    ladder: list = dataclasses.field(default_factory=lambda: [8, 16, 32])
    tol: float = 1e-6
    rank_tol: float = 1e-8
    radii: list = dataclasses.field(default_factory=lambda: [0.0, 4.0, 33])
    per_dim: int = 32
    refine: bool = True
    c: Any = 1
    sign: int = 1
    decay_modes: list = dataclasses.field(default_factory=lambda: [8, 16, 24])
    decay_N: int = 64
    output: str | None = None
    base_dir: str = "."

    COMMANDS = ("pipeline", "vanerp")

    @classmethod
    def from_dict(cls, data: dict, path="<config>", base_dir="."):
        names = {f.name for f in dataclasses.fields(cls)} - {"base_dir"}
        for key in data:
            if key not in names:
                raise cio.ParseError(path, key, "unknown field")
        cfg = cls(**data, base_dir=str(base_dir))
        if cfg.schema_version != cio.SCHEMA_VERSION:
            raise cio.ParseError(path, "schema_version", f"unsupported version {cfg.schema_version}")
        if cfg.command not in cls.COMMANDS:
            raise cio.ParseError(path, "command", f"expected one of {list(cls.COMMANDS)}")
        if cfg.command == "pipeline":
            for key in ("vector_fields", "gamma"):
                if getattr(cfg, key) is None:
                    raise cio.ParseError(path, key, "required for the pipeline command")
            if not cfg.point:
                raise cio.ParseError(path, "point", "required for the pipeline command")
        if not isinstance(cfg.ladder, list) or not all(isinstance(n, int) and n > 2 for n in cfg.ladder):
            raise cio.ParseError(path, "ladder", "expected a list of integers > 2")
        if not isinstance(cfg.radii, list) or len(cfg.radii) != 3:
            raise cio.ParseError(path, "radii", "expected [start, stop, count]")
        return cfg

    @classmethod
    def load(cls, path):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise cio.ParseError(path, "<file>", "no such file") from None
        except tomllib.TOMLDecodeError as exc:
            raise cio.ParseError(path, "<file>", f"invalid TOML ({exc})") from None
        return cls.from_dict(data, path, Path(path).parent)

    def resolve(self, p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else Path(self.base_dir) / q

    def params(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        out.pop("output")
        return out


def _gamma_flow(D0, D1, alg, ladder, sign) -> dict:
    """Spectral flow between bounded transforms of pi_t(D0) and pi_t(D1), t = sign."""
    from .index import spectral_flow
    from .rep import KirillovDatum, assemble, bounded_transform, representation

    ell = np.zeros(alg.dim)
    ell[alg.degree_slice(2)[0]] = sign
    vals = []
    for N in ladder:
        rep = representation(KirillovDatum(alg, ell), N)
        F0 = bounded_transform(assemble(D0, rep).safe_block())
        F1 = bounded_transform(assemble(D1, rep).safe_block())
        vals.append(spectral_flow(F0, F1).values[0])
    return {"t": sign, "ladder": list(ladder), "values": vals, "stabilized": len(set(vals[-3:])) == 1}


def run_pipeline(cfg: RunConfig) -> Outcome:
    from .enveloping import build_gamma_model
    from .index import TruncationLadder, fredholm_index
    from .osculating import osculating_algebra
    from .rep import KirillovDatum, default_sweep, exact_gamma_criterion, representation, rockland_scan

    spec = cio.load_filtration(cfg.resolve(cfg.vector_fields))
    osc = osculating_algebra(spec, [to_q(c) for c in cfg.point], cfg.labels)
    alg = osc.algebra
    gamma = cio.parse_gamma(cfg.gamma if not isinstance(cfg.gamma, (int, float)) else str(cfg.gamma))
    D = build_gamma_model(alg, gamma)
    a, b, n = cfg.radii
    sweep = default_sweep(alg, np.linspace(float(a), float(b), int(n)), cfg.per_dim)
    verdict = rockland_scan(D, sweep, cfg.ladder, cfg.tol, cfg.refine)
    crit = exact_gamma_criterion(alg, gamma)
    index = {}
    for sign in (1, -1):
        ell = np.zeros(alg.dim)
        ell[alg.degree_slice(2)[0]] = sign
        factory = lambda N, e=ell: representation(KirillovDatum(alg, e), N)  # noqa: E731
        index[f"fredholm_t{'+' if sign > 0 else '-'}"] = fredholm_index(
            TruncationLadder.from_operator(D, factory, cfg.ladder), cfg.rank_tol).to_dict()
    if verdict.verdict == "satisfied":
        g0 = cio.parse_gamma(str(cfg.gamma_start))
        D0 = build_gamma_model(alg, g0)
        index["gamma_path"] = {"from": str(cfg.gamma_start), "to": str(cfg.gamma)}
        index["spectral_flow"] = [_gamma_flow(D0, D, alg, cfg.ladder, s) for s in (1, -1)]
    body = {
        "osculating": {**osc.to_dict(), "algebra": cio.algebra_to_dict(alg)},
        "gamma_model": cio.operator_to_dict(D),
        "rockland": {
            "verdict": verdict.verdict,
            "Ns": verdict.Ns,
            "tol": verdict.tol,
            "witness": verdict.witness,
            "representations": len(verdict.rows),
            "min_singular_value": min(min(r["values"]) for r in verdict.rows),
        },
        "exact_criterion": crit.to_dict(),
        "index": index,
    }
    summary = (f"osculating dims {list(alg.dims)}; Rockland {verdict.verdict} "
               f"(exact criterion: {'satisfied' if crit.satisfied else 'violated'})")
    if "spectral_flow" in index:
        summary += f"; spectral flow along gamma {[s['values'][-1] for s in index['spectral_flow']]}"
    return Outcome(body, summary, VERDICT_EXIT[verdict.verdict], cfg.params())


def run(cfg: RunConfig) -> Outcome:
    if cfg.command == "pipeline":
        return run_pipeline(cfg)
    D1, D2 = _vanerp_defaults()
    body = vanerp_report(D1, D2, to_q(cfg.c), cfg.sign, cfg.ladder, cfg.decay_modes, cfg.decay_N)
    return Outcome(body, f"Fredholm index {body['fredholm']['values']}", EXIT_OK, cfg.params())


def cmd_pipeline(args) -> Outcome:
    cfg = RunConfig.load(args.config)
    out = run(cfg)
    if cfg.output and not args.out:
        args.out = str(cfg.resolve(cfg.output))
    return out


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carnot", description="Exact Carnot algebra, Rockland checks and index computations.")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def alg_cmd(parent, name, fn, help_):
        s = parent.add_parser(name, help=help_, parents=[common])
        s.add_argument("algebra", help="algebra JSON file or a name (h3, h5, engel, free23, abelianN)")
        s.set_defaults(fn=fn)
        return s

    alg_cmd(sub, "validate", cmd_validate, "check the Lie algebra invariants")
    s = alg_cmd(sub, "bch", cmd_bch, "group product in exponential coordinates")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s = alg_cmd(sub, "dilate", cmd_dilate, "apply the dilation alpha_lambda")
    s.add_argument("--lam", required=True)
    s.add_argument("--x", required=True)
    s = alg_cmd(sub, "dnc", cmd_dnc, "rescaled bracket at parameter t")
    s.add_argument("--t", required=True)

    gb = sub.add_parser("gbar", help="central-extension algebra").add_subparsers(dest="sub", required=True)
    alg_cmd(gb, "build", cmd_gbar_build, "build gbar")
    s = alg_cmd(gb, "flatten", cmd_gbar_flatten, "move (l, t) to (0, ..., 0, t)")
    s.add_argument("--ell", required=True, help="functional coordinates")
    s.add_argument("--t")
    s.add_argument("--gbar", action="store_true", help="flatten on gbar of the algebra")

    op = sub.add_parser("op", help="enveloping-algebra operators").add_subparsers(dest="sub", required=True)
    s = alg_cmd(op, "normalize", cmd_op_normalize, "PBW normal form of a word")
    s.add_argument("--word", required=True, help="comma-separated generator labels")
    s.add_argument("--coeff", default="1")
    s = op.add_parser("multiply", help="product of two operators", parents=[common])
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_op_multiply)
    s = op.add_parser("adjoint", help="formal adjoint", parents=[common])
    s.add_argument("a")
    s.set_defaults(fn=cmd_op_adjoint)
    s = op.add_parser("sharp", help="D1 # cD2 on gbar of D2's algebra", parents=[common])
    s.add_argument("d1")
    s.add_argument("d2")
    s.add_argument("--c", default="1")
    s.add_argument("--symmetric", action="store_true")
    s.set_defaults(fn=cmd_op_sharp)
    s = alg_cmd(op, "example1", cmd_op_example1, "sum of even powers of the generators")
    s.add_argument("--s", type=int, required=True)
    s = alg_cmd(op, "gamma-model", cmd_op_gamma, "sub-Laplacian plus i gamma T")
    s.add_argument("--gamma", required=True)
    s = alg_cmd(op, "dirac", cmd_op_dirac, "Dirac-type operator from a Clifford action")
    s.add_argument("--clifford", default="pauli", help="'pauli' or a JSON list of matrices")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--real", action="store_true", help="omit the factor i")

    rp = sub.add_parser("rep", help="representations").add_subparsers(dest="sub", required=True)
    s = rp.add_parser("scan", help="numerical Rockland scan", parents=[common])
    s.add_argument("--operator")
    s.add_argument("--algebra")
    s.add_argument("--gamma", help="rebuild the gamma model with this gamma")
    s.add_argument("--ladder", default="8,16,32")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--radii", default=None, help="start:stop:count or a list")
    s.add_argument("--per-dim", type=int, default=32)
    s.add_argument("--no-refine", action="store_true")
    s.set_defaults(fn=cmd_rep_scan)
    s = alg_cmd(rp, "criterion", cmd_rep_criterion, "exact gamma criterion")
    s.add_argument("--gamma", required=True)
    s.add_argument("--bound", type=float, default=None)

    ix = sub.add_parser("index", help="index computations").add_subparsers(dest="sub", required=True)
    s = ix.add_parser("fredholm", help="Fredholm index over a truncation ladder", parents=[common])
    s.add_argument("--operator")
    s.add_argument("--builtin", help="annihilation, a2 or creation on h3")
    s.add_argument("--ell")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--ladder", default="8,16,32")
    s.add_argument("--rank-tol", type=float, default=1e-8)
    s.set_defaults(fn=cmd_index_fredholm)
    s = ix.add_parser("sf", help="spectral flow along the affine path", parents=[common])
    s.add_argument("--f0")
    s.add_argument("--f1")
    s.add_argument("--seed", type=int)
    s.add_argument("--dim", type=int, default=8)
    s.add_argument("--steps", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(fn=cmd_index_sf)
    s = ix.add_parser("winding", help="winding number of det", parents=[common])
    s.add_argument("--loop", help="JSON list of matrices sampled around the circle")
    s.add_argument("--power", type=int, default=1, help="z -> z^k when no loop file is given")
    s.add_argument("--samples", type=int, default=256)
    s.set_defaults(fn=cmd_index_winding)
    s = ix.add_parser("vanerp", help="D1 # cD2 at a point", parents=[common])
    s.add_argument("--d1")
    s.add_argument("--d2")
    s.add_argument("--c", default="1")
    s.add_argument("--sign", type=int, default=1)
    s.add_argument("--ladder", default="8,16,32")
    s.add_argument("--decay-modes", default="8,16,24")
    s.add_argument("--decay-N", type=int, default=64)
    s.set_defaults(fn=cmd_index_vanerp)

    oc = sub.add_parser("osc", help="osculating algebras").add_subparsers(dest="sub", required=True)
    s = oc.add_parser("check", help="check the filtration condition", parents=[common])
    s.add_argument("fields")
    s.add_argument("--points", required=True, help="'x1,x2,...;y1,y2,...'")
    s.set_defaults(fn=cmd_osc_check)
    s = oc.add_parser("algebra", help="osculating algebra at a point", parents=[common])
    s.add_argument("fields")
    s.add_argument("--point", required=True)
    s.add_argument("--labels")
    s.set_defaults(fn=cmd_osc_algebra)

    s = sub.add_parser("pipeline", help="run a TOML-configured pipeline", parents=[common])
    s.add_argument("config")
    s.set_defaults(fn=cmd_pipeline)
    return p


def _command_name(args) -> str:
    return " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        out = args.fn(args)
    except cio.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (UsageError, ValueError, ArithmeticError, KeyError, RuntimeError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = cio.encode_report(_command_name(args), out.report, out.params)
    if args.out:
        cio.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(out.summary, file=sys.stderr)
    return out.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
