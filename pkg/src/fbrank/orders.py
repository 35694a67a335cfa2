"""Term orders on the commutative symbol image of Weyl monomials.

An order is a list of layers compared in sequence (total degree, a weight
vector, a chain of variable blocks), closed by lexicographic comparison over
the variable index so that it is a strict total order.  Orders are plain data;
:meth:`TermOrder.key` compiles them to sort keys where bigger means greater.

Monomials are exponent tuples over ``U.all_names`` (coefficient variables then
differential variables).  R-mode monomials carry only the differential part
and are compared with :meth:`TermOrder.dkey`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import VarUniverse


@dataclass(frozen=True)
class WeightVector:
    """Integer weight per differential variable; the paired commutative
    variable gets the negated weight and slack/h get 0."""

    U: VarUniverse
    weights: tuple[int, ...]  # aligned with U.diff_names

    @classmethod
    def from_dict(cls, U: VarUniverse, w: dict[str, int]) -> "WeightVector":
        return cls(U, tuple(int(w.get(v, 0)) for v in U.diff_names))

    def as_dict(self) -> dict[str, int]:
        return {v: w for v, w in zip(self.U.diff_names, self.weights) if w}

    def degree(self, full: Sequence[int], nc: int | None = None) -> int:
        nc = self.U.ncoeff if nc is None else nc
        return sum(w * (full[nc + k] - full[k]) for k, w in enumerate(self.weights) if w)

    def ddegree(self, dexp: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, dexp))

    def full_weights(self) -> dict[str, int]:
        """Weights on every variable name: -w on coordinates, +w on derivations."""
        out = {}
        for k, w in enumerate(self.weights):
            if w:
                out[self.U.comm_names[k]] = -w
                out[self.U.diff_names[k]] = w
        return out

    def is_zero(self) -> bool:
        return not any(self.weights)


def weight_degree(full: Sequence[int], w: WeightVector) -> int:
    return w.degree(full)


@dataclass
class TermOrder:
    U: VarUniverse
    layers: list[dict]
    name: str = "custom"
    _rows: list = field(default=None, init=False, repr=False)
    _drows: list = field(default=None, init=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _dcache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        U = self.U
        idx = U.index
        rows: list[list[tuple[int, int]]] = []
        for layer in self.layers:
            kind = layer["kind"]
            if kind == "total-degree":
                rows.append([(i, 1) for i in range(len(U.all_names))])
            elif kind == "weight":
                rows.append([(idx[v], w) for v, w in layer["weights"].items() if w])
            elif kind == "block":
                for blk in layer["blocks"]:
                    names = [v for v in blk["vars"] if v in idx]
                    if not names:
                        continue
                    if blk.get("inner", "grlex") == "grlex":
                        rows.append([(idx[v], 1) for v in names])
                    for v in names:
                        rows.append([(idx[v], 1)])
            else:
                raise ValueError(f"unknown layer {kind!r}")
        for i in range(len(U.all_names)):
            rows.append([(i, 1)])
        self._rows = [r for r in rows if r]
        nc = U.ncoeff
        drows = []
        for r in self._rows:
            d = [(i - nc, w) for i, w in r if i >= nc]
            if d:
                drows.append(d)
        self._drows = drows

    def key(self, full: tuple) -> tuple:
        k = self._cache.get(full)
        if k is None:
            k = tuple(sum(w * full[i] for i, w in r) for r in self._rows)
            self._cache[full] = k
        return k

    def dkey(self, dexp: tuple) -> tuple:
        k = self._dcache.get(dexp)
        if k is None:
            k = tuple(sum(w * dexp[i] for i, w in r) for r in self._drows)
            self._dcache[dexp] = k
        return k

    def compare(self, a: tuple, b: tuple) -> int:
        ka, kb = (self.dkey(a), self.dkey(b)) if len(a) == self.U.ndiff else (self.key(a), self.key(b))
        return (ka > kb) - (ka < kb)

    def describe(self) -> dict:
        return {"name": self.name, "layers": self.layers, "tiebreak": "lex-by-variable-index"}

    def to_json(self) -> str:
        return json.dumps(self.describe(), sort_keys=True)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


def full_exponent(U: VarUniverse, powers: dict[str, int]) -> tuple:
    e = [0] * len(U.all_names)
    for v, k in powers.items():
        e[U.index[v]] += k
    return tuple(e)


def d_exponent(U: VarUniverse, powers: dict[str, int]) -> tuple:
    e = [0] * U.ndiff
    for v, k in powers.items():
        if not v.startswith("d"):
            v = "d" + v
        e[U.diff_names.index(v)] += k
    return tuple(e)


# ---------------------------------------------------------------- presets

def _dx_diag(U):
    return [f"dx{i}{i}" for i in range(1, U.m + 1)]


def _dx_off(U):
    return [f"dx{i}{j}" for i, j in U.x_pairs if i != j]


def _dy(U):
    return [f"dy{k}" for k in range(1, U.m + 1)]


def make_prop2_order(U: VarUniverse) -> TermOrder:
    """Block order dr >> {dx_ii} >> {dy_k}, graded lex inside each block
    (dx11 > dx22 > ..., dy1 > dy2 > ...).  Off-diagonal dx_ij, when present,
    form a block between dr and the diagonal one."""
    blocks = [{"vars": ["dr"], "inner": "grlex"}]
    if _dx_off(U):
        blocks.append({"vars": _dx_off(U), "inner": "grlex"})
    blocks += [{"vars": _dx_diag(U), "inner": "grlex"}, {"vars": _dy(U), "inner": "grlex"}]
    return TermOrder(U, [{"kind": "block", "blocks": blocks}], name="block-dr>dxx>dy")


make_rank_order = make_prop2_order


def make_weight(U: VarUniverse) -> WeightVector:
    """w = 1 on off-diagonal dx_ij, 0 elsewhere."""
    return WeightVector.from_dict(U, {v: 1 for v in _dx_off(U)})


def _h_chain(U: VarUniverse, c_reverse=False, y_reverse=False) -> list[dict]:
    m = U.m
    cs = [f"c{k}" for k in range(1, m + 1)]
    ys = [f"y{k}" for k in range(1, m + 1)]
    if c_reverse:
        cs.reverse()
    if y_reverse:
        ys.reverse()
    return [
        {"vars": ["d"], "inner": "lex"},
        {"vars": ["r"], "inner": "lex"},
        {"vars": [f"a{p}{q}" for p, q in U.x_pairs], "inner": "lex"},
        {"vars": [f"b{k}" for k in range(1, m + 1)], "inner": "lex"},
        {"vars": cs, "inner": "lex"},
        {"vars": ys, "inner": "lex"},
        {"vars": ["dr"], "inner": "lex"},
        {"vars": _dx_off(U), "inner": "lex"},
        {"vars": _dx_diag(U), "inner": "lex"},
        {"vars": _dy(U), "inner": "lex"},
        {"vars": [f"x{i}{j}" for i, j in U.x_pairs if i != j], "inner": "lex"},
        {"vars": [f"x{i}{i}" for i in range(1, m + 1)], "inner": "lex"},
        {"vars": ["h"], "inner": "lex"},
    ]


def make_h_order(U: VarUniverse, *, c_reverse=False, y_reverse=False) -> TermOrder:
    """Total degree, then (-w,w,0)-degree, then the block chain
    d >> r >> {a} >> {b} >> {c} >> {y} >> dr >> {dx_ij} >> {dx_ii} >> {dy}
    >> {x_ij} >> {x_ii} >> h, lexicographic inside blocks (b1 > b2 > ...)."""
    if not (U.slack and U.homogenized):
        raise ValueError("the homogenized order needs slack variables and h")
    w = make_weight(U)
    layers = [
        {"kind": "total-degree"},
        {"kind": "weight", "weights": w.full_weights()},
        {"kind": "block", "blocks": _h_chain(U, c_reverse, y_reverse)},
    ]
    return TermOrder(U, layers, name="h-(-w,w,0)")


def make_weight_order(U: VarUniverse) -> TermOrder:
    """(-w,w,0)-degree refined by the block chain of :func:`make_h_order`
    (the dehomogenized order; not a well-order)."""
    w = make_weight(U)
    layers = [
        {"kind": "weight", "weights": w.full_weights()},
        {"kind": "block", "blocks": _h_chain(U)},
    ]
    return TermOrder(U, layers, name="(-w,w,0)")


def make_h_order_n1_preset(U: VarUniverse) -> TermOrder:
    """The n=1 order written out literally."""
    if U.n != 1:
        raise ValueError("n=1 preset")
    blocks = [
        {"vars": ["d"], "inner": "lex"},
        {"vars": ["r"], "inner": "lex"},
        {"vars": ["a11", "a12", "a22"], "inner": "lex"},
        {"vars": ["b1", "b2"], "inner": "lex"},
        {"vars": ["c1", "c2"], "inner": "lex"},
        {"vars": ["y1", "y2"], "inner": "lex"},
        {"vars": ["dr"], "inner": "lex"},
        {"vars": ["dx12"], "inner": "lex"},
        {"vars": ["dx11", "dx22"], "inner": "lex"},
        {"vars": ["dy1", "dy2"], "inner": "lex"},
        {"vars": ["x12"], "inner": "lex"},
        {"vars": ["x11", "x22"], "inner": "lex"},
        {"vars": ["h"], "inner": "lex"},
    ]
    layers = [
        {"kind": "total-degree"},
        {"kind": "weight", "weights": {"x12": -1, "dx12": 1}},
        {"kind": "block", "blocks": blocks},
    ]
    return TermOrder(U, layers, name="h-(-w,w,0)-n1")


def make_grlex_order(U: VarUniverse) -> TermOrder:
    """Plain graded lex over the differential variables (used as a 'wrong
    order' control)."""
    return TermOrder(U, [{"kind": "block", "blocks": [{"vars": list(U.diff_names), "inner": "grlex"}]}],
                     name="grlex")
