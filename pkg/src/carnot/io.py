"""File formats (algebras, operators, vector fields) and report encoding."""
from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .exact import GaussQ, fmt_q, to_q
from .lie import GradedLieAlgebra, MalformedAlgebraError

SCHEMA_VERSION = 1


class ParseError(ValueError):
    """Malformed input; names the file and the offending field."""

    def __init__(self, path, field, message):
        self.path = str(path)
        self.field = field
        super().__init__(f"{path}: field '{field}': {message}")


def _load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(path, "<file>", "no such file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, "<file>", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _q(value, path, field) -> Fraction:
    try:
        return to_q(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(path, field, f"not a rational: {value!r}") from None


# -- algebras -------------------------------------------------------------------

def algebra_from_dict(data: dict, path="<inline>") -> GradedLieAlgebra:
    if not isinstance(data, dict):
        raise ParseError(path, "<root>", "expected an object")
    if isinstance(data.get("named"), str):
        return named_algebra(data["named"], path)
    allowed = {"dims", "basis", "brackets", "inner_product"}
    extra = set(data) - allowed
    if extra:
        raise ParseError(path, sorted(extra)[0], "unknown field")
    if "dims" not in data:
        raise ParseError(path, "dims", "missing")
    dims = data["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 0 for d in dims):
        raise ParseError(path, "dims", "expected a list of non-negative integers")
    basis = data.get("basis")
    brackets = {}
    for n, entry in enumerate(data.get("brackets", [])):
        f = f"brackets[{n}]"
        if not isinstance(entry, dict) or not {"i", "j", "value"} <= set(entry):
            raise ParseError(path, f, "expected an object with i, j, value")
        vec = {}
        for m, term in enumerate(entry["value"]):
            if not isinstance(term, dict) or "k" not in term or "coeff" not in term:
                raise ParseError(path, f"{f}.value[{m}]", "expected {k, coeff}")
            vec[term["k"]] = vec.get(term["k"], 0) + _q(term["coeff"], path, f"{f}.value[{m}].coeff")
        key = (entry["i"], entry["j"])
        if key in brackets:
            raise ParseError(path, f, "bracket given twice")
        brackets[key] = vec
    ip = data.get("inner_product")
    if ip is not None:
        ip = [[_q(x, path, "inner_product") for x in row] for row in ip]
    try:
        return GradedLieAlgebra(dims, brackets, basis, ip)
    except MalformedAlgebraError as exc:
        raise ParseError(path, "brackets" if "label" in str(exc) else "dims", str(exc)) from None


def named_algebra(name: str, path="<inline>") -> GradedLieAlgebra:
    from . import algebras

    table = {
        "h3": lambda: algebras.heisenberg(1),
        "h5": lambda: algebras.heisenberg(2),
        "engel": algebras.engel,
        "free23": lambda: algebras.free_nilpotent(2, 3),
    }
    if name in table:
        return table[name]()
    if name.startswith("abelian"):
        return algebras.abelian(int(name[len("abelian"):] or 1))
    if name.startswith("heisenberg_type:"):
        return algebras.heisenberg_type([to_q(x) for x in name.split(":", 1)[1].split(",")])
    raise ParseError(path, "named", f"unknown algebra name {name!r}")


def load_algebra(path) -> GradedLieAlgebra:
    return algebra_from_dict(_load_json(path), path)


def algebra_to_dict(alg: GradedLieAlgebra) -> dict:
    brackets = []
    for (i, j), vec in sorted(alg.structure_constants().items()):
        brackets.append(
            {
                "i": alg.basis[i],
                "j": alg.basis[j],
                "value": [{"k": alg.basis[k], "coeff": fmt_q(c)} for k, c in sorted(vec.items())],
            }
        )
    out = {"dims": list(alg.dims), "basis": list(alg.basis), "brackets": brackets}
    n = alg.dim
    if any(alg.inner_product[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
        out["inner_product"] = [[fmt_q(x) for x in row] for row in alg.inner_product]
    return out


# -- operators --------------------------------------------------------------------

def _scalar_from_json(v, path, field):
    if isinstance(v, list) and len(v) == 2 and not any(isinstance(x, list) for x in v):
        return GaussQ(_q(v[0], path, field), _q(v[1], path, field))
    return GaussQ(_q(v, path, field))


def _coeff_from_json(c, V1, V0, path, field):
    from .enveloping import coeff_array

    if not isinstance(c, list) or (c and isinstance(c[0], (str, int, float))):
        # scalar or a single [re, im] pair: multiple of the identity
        if V0 != V1:
            raise ParseError(path, field, "scalar coefficient needs V0 = V1")
        return coeff_array(_scalar_from_json(c, path, field), V0)
    rows = [[_scalar_from_json(v, path, f"{field}[{r}]") for v in row] for r, row in enumerate(c)]
    if len(rows) != V1 or any(len(r) != V0 for r in rows):
        raise ParseError(path, field, f"expected a {V1}x{V0} matrix")
    return coeff_array(rows)


def operator_from_dict(data: dict, path="<inline>", algebra: GradedLieAlgebra | None = None):
    from .enveloping import EnvelopingOperator

    allowed = {"algebra", "V0", "V1", "terms", "gamma", "kind"}
    extra = set(data) - allowed
    if extra:
        raise ParseError(path, sorted(extra)[0], "unknown field")
    if algebra is None:
        ref = data.get("algebra")
        if ref is None:
            raise ParseError(path, "algebra", "missing")
        if isinstance(ref, str):
            target = Path(path).parent / ref if path != "<inline>" else Path(ref)
            algebra = load_algebra(target) if target.suffix == ".json" or target.exists() else named_algebra(ref, path)
        else:
            algebra = algebra_from_dict(ref, path)
    if data.get("kind") == "gamma-model":
        from .enveloping import build_gamma_model

        return build_gamma_model(algebra, parse_gamma(data.get("gamma", 0), path))
    V0 = int(data.get("V0", 1))
    V1 = int(data.get("V1", V0))
    terms = {}
    for n, t in enumerate(data.get("terms", [])):
        f = f"terms[{n}]"
        if "monomial" not in t or "coeff" not in t:
            raise ParseError(path, f, "expected {monomial, coeff}")
        mono = [0] * algebra.dim
        for k, e in t["monomial"].items():
            try:
                mono[algebra.index(k)] += int(e)
            except MalformedAlgebraError as exc:
                raise ParseError(path, f"{f}.monomial", str(exc)) from None
        word = []
        for i, e in enumerate(mono):
            word.extend([i] * e)
        terms.setdefault(tuple(word), []).append(_coeff_from_json(t["coeff"], V1, V0, path, f"{f}.coeff"))
    items = [(w, sum(cs[1:], cs[0])) for w, cs in terms.items()]
    return EnvelopingOperator.from_words(algebra, items, V0, V1)


def load_operator(path, algebra=None):
    return operator_from_dict(_load_json(path), path, algebra)


def operator_to_dict(op, algebra_ref=None) -> dict:
    out = op.to_json()
    out["algebra"] = algebra_ref if algebra_ref is not None else algebra_to_dict(op.algebra)
    return out


def parse_gamma(value, path="<arg>"):
    """A scalar, "p/q", [re, im], or a matrix (list of rows) for gamma."""
    from .enveloping import coeff_array

    if isinstance(value, str):
        s = value.strip()
        if s.startswith("["):
            value = json.loads(s)
        else:
            try:
                return coeff_array(GaussQ(_q(s, path, "gamma")))
            except ParseError:
                return coeff_array(complex(s.replace("i", "j")))
    if isinstance(value, (int, float, Fraction)):
        return coeff_array(GaussQ(_q(value, path, "gamma")))
    if isinstance(value, list) and value and not isinstance(value[0], list):
        return coeff_array(_scalar_from_json(value, path, "gamma"))
    rows = [[_scalar_from_json(v, path, "gamma") for v in row] for row in value]
    return coeff_array(rows)


# -- vector fields -------------------------------------------------------------------

def filtration_from_dict(data: dict, path="<inline>"):
    from .osculating import FiltrationSpec, PolyVectorField

    allowed = {"dim", "frames", "ranks"}
    extra = set(data) - allowed
    if extra:
        raise ParseError(path, sorted(extra)[0], "unknown field")
    if "dim" not in data or not isinstance(data["dim"], int):
        raise ParseError(path, "dim", "expected an integer")
    d = data["dim"]
    frames, weights = [], []
    for n, fr in enumerate(data.get("frames", [])):
        f = f"frames[{n}]"
        if "weight" not in fr or "components" not in fr:
            raise ParseError(path, f, "expected {weight, components}")
        comps = fr["components"]
        if len(comps) != d:
            raise ParseError(path, f"{f}.components", f"expected {d} coordinate polynomials")
        polys = []
        for k, comp in enumerate(comps):
            p = {}
            for m, term in enumerate(comp):
                g = f"{f}.components[{k}][{m}]"
                mono = term.get("monomial")
                if not isinstance(mono, list) or len(mono) != d:
                    raise ParseError(path, g + ".monomial", f"expected {d} exponents")
                key = tuple(int(e) for e in mono)
                p[key] = p.get(key, 0) + _q(term.get("coeff"), path, g + ".coeff")
            polys.append(p)
        frames.append(PolyVectorField(d, polys))
        weights.append(int(fr["weight"]))
    try:
        return FiltrationSpec(d, frames, weights, data.get("ranks"))
    except ValueError as exc:
        raise ParseError(path, "frames", str(exc)) from None


def load_filtration(path):
    return filtration_from_dict(_load_json(path), path)


def filtration_to_dict(spec) -> dict:
    frames = []
    for fr, w in zip(spec.frames, spec.weights):
        comps = [[{"monomial": list(m), "coeff": fmt_q(c)} for m, c in sorted(p.items())] for p in fr.components]
        frames.append({"weight": w, "components": comps})
    out = {"dim": spec.dim, "frames": frames}
    if spec.ranks is not None:
        out["ranks"] = list(spec.ranks)
    return out


# -- matrices ------------------------------------------------------------------------

def matrix_from_json(value, path="<inline>", field="matrix") -> np.ndarray:
    """Rows of numbers or [re, im] pairs."""
    try:
        rows = []
        for row in value:
            r = []
            for v in row:
                if isinstance(v, list):
                    r.append(complex(float(to_q(v[0])), float(to_q(v[1]))))
                else:
                    r.append(complex(float(to_q(v))))
            rows.append(r)
        return np.array(rows, dtype=complex)
    except (TypeError, ValueError):
        raise ParseError(path, field, "expected a matrix of numbers or [re, im] pairs") from None


def load_matrix(path) -> np.ndarray:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("matrix")
    return matrix_from_json(data, path)


# -- reports -------------------------------------------------------------------------

def _round(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return 0.0
    return float(f"{x:.12g}")


def normalize(obj):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    if isinstance(obj, Fraction):
        return fmt_q(obj)
    if isinstance(obj, GaussQ):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    return obj


def encode_report(command: str, body: dict, params: dict | None = None) -> str:
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params or {},
        "result": body,
    }
    return json.dumps(normalize(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_text(path, text: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
