"""Text and JSON formats for maps, matrices, witnesses, words and weights.

Polynomials travel as strings in the polycore syntax and rationals as
strings like ``"-3/4"``; every document records the number of x-variables
``n`` so that parsing never has to guess the context.

Map files::

    n=3
    # comments and blank lines are ignored
    -2*x2*(x1 + x2^2) + x3
    x1 + x2^2
    (x1 + x2^2)^2

A ``generalized`` line after the header switches to H1, H2, h3, ..., hn
with the h_i written in x1, x2, x3.

Word documents list factors in written order ``F1 o F2 o ... o Fm``: the
last factor is applied first.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import List, Union

from .classifier import Theorem23Witness, Theorem24Witness
from .errors import ParseError
from .genform import Theorem4CaseWitness, Theorem4Witness, WeightAlgoResult, WeightVector
from .nilcheck import GeneralizedShape, PolyMap
from .polycore import Poly, parse_poly, to_str
from .polylinalg import HermiteWitness, PolyMatrix, RowOp
from .tamedec import ElementaryMap, LinearMap

WORD_ORDER = "F1 o F2 o ... o Fm; the last factor is applied first"

_HEADER = re.compile(r"\s*n\s*=\s*(\d+)\s*$")


# -- map files --------------------------------------------------------------------


def dump_map(F: Union[PolyMap, GeneralizedShape]) -> str:
    if isinstance(F, GeneralizedShape):
        lines = [f"n={F.n}", "generalized", to_str(F.H1), to_str(F.H2)] + [to_str(h) for h in F.h]
    else:
        lines = [f"n={F.dim}"] + [to_str(c) for c in F]
    return "\n".join(lines) + "\n"


def load_map(text: str) -> Union[PolyMap, GeneralizedShape]:
    """Parse a map file; errors carry the line and column of the problem."""
    n = None
    generalized = False
    polys: List[Poly] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if n is None:
            m = _HEADER.match(body)
            if not m:
                raise ParseError("expected header 'n=<N>'", lineno, 1)
            n = int(m.group(1))
            if n < 2:
                raise ParseError("dimension must be at least 2", lineno, body.index(m.group(1)) + 1)
            continue
        if body.strip() == "generalized" and not polys and not generalized:
            generalized = True
            continue
        if len(polys) == n:
            raise ParseError(f"more than {n} polynomial lines", lineno, 1)
        polys.append(parse_poly(body, n, line=lineno))
    if n is None:
        raise ParseError("empty map file", max(last_line, 1), 1)
    if len(polys) != n:
        raise ParseError(f"expected {n} polynomial lines, found {len(polys)}", max(last_line, 1), 1)
    if generalized:
        try:
            return GeneralizedShape(polys[0], polys[1], tuple(polys[2:]))
        except ValueError as exc:
            raise ParseError(str(exc), max(last_line, 1), 1) from exc
    return PolyMap(tuple(polys))


def read_map_file(path) -> Union[PolyMap, GeneralizedShape]:
    with open(path, encoding="utf-8") as fh:
        return load_map(fh.read())


def write_map_file(path, F) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_map(F))


# -- scalars and matrices -----------------------------------------------------------


def q_str(v) -> str:
    return str(Fraction(v))


def q_parse(s) -> Fraction:
    if not isinstance(s, str):
        raise ParseError(f"rational must be a string, got {s!r}")
    try:
        return Fraction(s)
    except ValueError as exc:
        raise ParseError(f"bad rational {s!r}") from exc


def _poly(s, n: int) -> Poly:
    if not isinstance(s, str):
        raise ParseError(f"polynomial must be a string, got {s!r}")
    return parse_poly(s, n)


def matrix_to_json(M: PolyMatrix) -> List[List[str]]:
    return [[to_str(e) for e in row] for row in M.to_rows()]


def matrix_from_json(rows, n: int) -> PolyMatrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a list of rows")
    return PolyMatrix.from_rows([[_poly(e, n) for e in r] for r in rows], n)


# -- witnesses ----------------------------------------------------------------------


def _thm23_fields(w: Theorem23Witness) -> dict:
    return {
        "b1": q_str(w.b1),
        "b2": q_str(w.b2),
        "sigma": [q_str(s) for s in w.sigma],
        "g": [q_str(c) for c in w.g_coeffs],
        "f": to_str(w.f),
    }


def _thm23_from(d: dict, n: int) -> Theorem23Witness:
    return Theorem23Witness(
        q_parse(d["b1"]),
        q_parse(d["b2"]),
        tuple(q_parse(s) for s in d["sigma"]),
        _poly(d["f"], n),
        tuple(q_parse(c) for c in d["g"]),
    )


def _op_to_json(op: RowOp) -> dict:
    out = {"kind": op.kind, "i": op.i, "j": op.j}
    if op.q is not None:
        out["q"] = to_str(op.q)
    return out


def _op_from_json(d: dict, n: int) -> RowOp:
    q = _poly(d["q"], n) if "q" in d else None
    return RowOp(d["kind"], int(d["i"]), int(d["j"]), q)


def witness_to_json(w, n: int) -> dict:
    if isinstance(w, Theorem24Witness):
        out = {"kind": "theorem24", "n": n, "case": w.case_tag, "T": matrix_to_json(w.T), "k": w.k}
        t23 = w.extra.get("theorem23")
        if t23 is not None:
            out.update({k: v for k, v in _thm23_fields(t23).items() if k in ("b1", "b2", "sigma")})
        if w.hermite is not None:
            hw = w.hermite
            out["A"] = matrix_to_json(hw.A)
            out["detA"] = q_str(hw.detA)
            out["M"] = matrix_to_json(hw.M)
            out["reduced"] = matrix_to_json(hw.reduced)
            out["rank"] = hw.rank
            out["ops"] = [_op_to_json(op) for op in hw.ops]
        return out
    if isinstance(w, Theorem23Witness):
        return {"kind": "theorem23", "n": n, **_thm23_fields(w)}
    if isinstance(w, Theorem4Witness):
        return {
            "kind": "theorem4",
            "n": n,
            **_thm23_fields(w.witness),
            "const1": q_str(w.const1),
            "const2": q_str(w.const2),
        }
    if isinstance(w, Theorem4CaseWitness):
        return {
            "kind": "theorem4_case",
            "n": n,
            "case": w.case,
            "S": matrix_to_json(w.S),
            "k": w.k,
            "h2_const": q_str(w.h2_const),
        }
    raise TypeError(f"no JSON form for {type(w).__name__}")


def witness_from_json(d: dict):
    try:
        kind = d["kind"]
        n = int(d["n"])
        if kind == "theorem24":
            hermite = None
            if "A" in d:
                hermite = HermiteWitness(
                    matrix_from_json(d["A"], n),
                    q_parse(d["detA"]),
                    matrix_from_json(d["reduced"], n),
                    int(d["rank"]),
                    matrix_from_json(d["M"], n),
                    tuple(_op_from_json(o, n) for o in d["ops"]),
                )
            extra = {}
            if "b2" in d:
                # only the scalars travel; f and g are not part of this format
                extra["theorem23"] = Theorem23Witness(
                    q_parse(d["b1"]), q_parse(d["b2"]), tuple(q_parse(s) for s in d["sigma"]), Poly.zero(n), ()
                )
            return Theorem24Witness(d["case"], matrix_from_json(d["T"], n), int(d["k"]), hermite, extra)
        if kind == "theorem23":
            return _thm23_from(d, n)
        if kind == "theorem4":
            return Theorem4Witness(_thm23_from(d, n), q_parse(d["const1"]), q_parse(d["const2"]))
        if kind == "theorem4_case":
            return Theorem4CaseWitness(d["case"], matrix_from_json(d["S"], n), int(d["k"]), q_parse(d["h2_const"]))
    except KeyError as exc:
        raise ParseError(f"witness is missing key {exc.args[0]!r}") from exc
    raise ParseError(f"unknown witness kind {d.get('kind')!r}")


# -- words --------------------------------------------------------------------------


def word_to_json(word, n: int) -> dict:
    factors = []
    for f in word:
        if isinstance(f, ElementaryMap):
            factors.append({"elem": {"i": f.i, "P": to_str(f.P)}})
        else:
            factors.append({"linear": [[q_str(e.constant_term()) for e in row] for row in f.M.to_rows()]})
    return {"n": n, "order": WORD_ORDER, "word": factors}


def word_from_json(d: dict):
    try:
        n = int(d["n"])
        out = []
        for item in d["word"]:
            if "elem" in item:
                e = item["elem"]
                out.append(ElementaryMap(int(e["i"]), _poly(e["P"], n)))
            elif "linear" in item:
                rows = [[q_parse(v) for v in r] for r in item["linear"]]
                out.append(LinearMap(PolyMatrix.from_rows(rows, n)))
            else:
                raise ParseError(f"unknown word factor {item!r}")
        return n, out
    except KeyError as exc:
        raise ParseError(f"word is missing key {exc.args[0]!r}") from exc


# -- weights ------------------------------------------------------------------------


def weights_to_json(w: WeightVector) -> List[str]:
    return w.to_json()


def weights_from_json(data) -> WeightVector:
    return WeightVector(tuple(q_parse(v) for v in data))


def weight_result_to_json(r: WeightAlgoResult, n: int) -> dict:
    return {"n": n, "w": r.w.to_json(), "T": matrix_to_json(r.T), "k": r.k,
            "iterations": r.iterations, "history": list(r.history)}


def weight_result_from_json(d: dict) -> WeightAlgoResult:
    n = int(d["n"])
    return WeightAlgoResult(
        weights_from_json(d["w"]),
        matrix_from_json(d["T"], n),
        int(d["k"]),
        int(d.get("iterations", 0)),
        tuple(int(v) for v in d.get("history", ())),
    )


# -- documents ----------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
