"""JSON encoding of exact values, O_k elements, hermitian matrices and lattices."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any

from .errors import SchemaError
from .hermitian import HermitianMatrix
from .quadfield import FieldContext, KElement


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise SchemaError(f"expected an integer or a 'num/den' string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational {x!r}") from exc
    raise SchemaError(f"expected an integer or a 'num/den' string, got {x!r}")


def _component(x: Fraction):
    return x.numerator if x.denominator == 1 else format_rational(x)


def element_to_json(x: KElement) -> list:
    return [_component(x.a), _component(x.b)]


def parse_element(ctx: FieldContext, obj) -> KElement:
    if not isinstance(obj, list) or len(obj) != 2:
        raise SchemaError(f"an O_k element is a pair [a, b], got {obj!r}")
    return ctx.elt(parse_rational(obj[0]), parse_rational(obj[1]))


def _load(text_or_obj):
    if isinstance(text_or_obj, (str, bytes)):
        try:
            return json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    return text_or_obj


def parse_hermitian(text_or_obj, ctx: FieldContext) -> HermitianMatrix:
    rows = _load(text_or_obj)
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) for r in rows):
        raise SchemaError("a hermitian matrix is a non-empty list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise SchemaError("matrix must be square")
    return HermitianMatrix([[parse_element(ctx, x) for x in r] for r in rows], ctx.delta)


def hermitian_to_json(m: HermitianMatrix) -> list:
    return [[element_to_json(x) for x in row] for row in m.rows]


def lattice_to_json(lat) -> dict:
    return {
        "gram": hermitian_to_json(lat.gram),
        "zgens": [[element_to_json(x) for x in v] for v in lat.zgens],
    }


def parse_lattice(text_or_obj, ctx: FieldContext):
    from .lattice import HermitianLattice, qvec_of

    obj = _load(text_or_obj)
    if not isinstance(obj, dict) or set(obj) != {"gram", "zgens"}:
        raise SchemaError('a lattice is {"gram": ..., "zgens": [...]}')
    gram = parse_hermitian(obj["gram"], ctx)
    vecs = obj["zgens"]
    if not isinstance(vecs, list) or any(not isinstance(v, list) or len(v) != gram.n for v in vecs):
        raise SchemaError("each generator must have one entry per coordinate")
    gens = [qvec_of(tuple(parse_element(ctx, x) for x in v)) for v in vecs]
    return HermitianLattice(ctx, gram, gens)


def to_jsonable(obj: Any):
    """Recursively convert results into plain JSON values with exact rationals as strings."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, KElement):
        return element_to_json(obj)
    if isinstance(obj, HermitianMatrix):
        return hermitian_to_json(obj)
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, ensure_ascii=False)
