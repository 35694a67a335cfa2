"""Floating-point validation of the symbolic results.

Quadrature of the Fisher-Bingham integral on the circle and the 2-sphere,
residuals of the annihilating operators, the Pfaffian system read off from
normal forms against the diagonal Groebner basis, and Runge-Kutta transport
along straight paths.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .algebra import RationalFunction, python_expr
from .groebner import Reducer, standard_monomials
from .orders import d_exponent, make_prop2_order
from .systems import prop2_basis
from .weyl import WeylOperator


class QuadratureError(RuntimeError):
    pass


class SingularPathError(ValueError):
    pass


# ---------------------------------------------------------------- points

@dataclass
class EvalPoint:
    n: int
    x: np.ndarray  # symmetric (n+1)x(n+1)
    y: np.ndarray
    r: float
    diagonal: bool = False

    def __post_init__(self):
        m = self.n + 1
        self.x = np.asarray(self.x, dtype=float).reshape(m, m)
        self.y = np.asarray(self.y, dtype=float).reshape(m)
        self.r = float(self.r)
        if self.r <= 0:
            raise ValueError("r must be positive")
        if not np.array_equal(self.x, self.x.T):
            raise ValueError("x must be symmetric")
        if self.diagonal and np.any(self.x - np.diag(np.diag(self.x))):
            raise ValueError("diagonal point with off-diagonal entries")

    @classmethod
    def zero(cls, n, r=1.0):
        m = n + 1
        return cls(n, np.zeros((m, m)), np.zeros(m), r)

    def values(self) -> dict:
        """Coordinate values keyed by variable name (x11, x12, ..., y1, ..., r)."""
        m = self.n + 1
        out = {f"x{i + 1}{j + 1}": self.x[i, j] for i in range(m) for j in range(i, m)}
        out.update({f"y{k + 1}": self.y[k] for k in range(m)})
        out["r"] = self.r
        return out

    def replace(self, **changes) -> "EvalPoint":
        """Copy with some coordinates changed, e.g. ``replace(r=2.0, x11=0.5)``."""
        x, y, r = self.x.copy(), self.y.copy(), changes.pop("r", self.r)
        for name, val in changes.items():
            if name[0] == "x":
                i, j = int(name[1]) - 1, int(name[2]) - 1
                x[i, j] = x[j, i] = val
            elif name[0] == "y":
                y[int(name[1:]) - 1] = val
            else:
                raise KeyError(name)
        return EvalPoint(self.n, x, y, r, self.diagonal)

    def to_json(self) -> str:
        m = self.n + 1
        return json.dumps({"n": self.n, "diagonal": self.diagonal,
                           "x": [[repr(float(self.x[i, j])) for j in range(m)] for i in range(m)],
                           "y": [repr(float(v)) for v in self.y], "r": repr(float(self.r))})

    @classmethod
    def from_json(cls, text: str) -> "EvalPoint":
        d = json.loads(text)
        conv = lambda v: float(Decimal(str(v)))  # noqa: E731
        return cls(int(d["n"]), [[conv(v) for v in row] for row in d["x"]],
                   [conv(v) for v in d["y"]], conv(d["r"]), bool(d.get("diagonal", False)))


def random_point(n: int, rng: random.Random, diagonal: bool = False, gap: float = 0.1) -> EvalPoint:
    """|x_ij| <= 1, |y_i| <= 1, r in [0.5, 1.5], diagonal entries at least
    ``gap`` apart."""
    m = n + 1
    while True:
        diag = [rng.uniform(-1, 1) for _ in range(m)]
        if all(abs(a - b) >= gap for i, a in enumerate(diag) for b in diag[i + 1:]):
            break
    x = np.diag(diag)
    if not diagonal:
        for i in range(m):
            for j in range(i + 1, m):
                x[i, j] = x[j, i] = rng.uniform(-1, 1)
    y = np.array([rng.uniform(-1, 1) for _ in range(m)])
    return EvalPoint(n, x, y, rng.uniform(0.5, 1.5), diagonal)


# ---------------------------------------------------------------- quadrature

def _nodes(n: int, level: int):
    """Unit-sphere nodes u (N x (n+1)) and weights for refinement ``level``."""
    if n == 1:
        N = 16 * 2 ** level
        th = 2 * np.pi * np.arange(N) / N
        return np.stack([np.cos(th), np.sin(th)], axis=1), np.full(N, 2 * np.pi / N)
    if n == 2:
        Np, Nt = 12 * 2 ** level, 16 * 2 ** level
        g, gw = np.polynomial.legendre.leggauss(Np)
        phi = (g + 1) * np.pi / 2
        wphi = gw * np.pi / 2 * np.sin(phi)
        th = 2 * np.pi * np.arange(Nt) / Nt
        P, T = np.meshgrid(phi, th, indexing="ij")
        u = np.stack([np.sin(P) * np.cos(T), np.sin(P) * np.sin(T), np.cos(P)], axis=-1).reshape(-1, 3)
        w = (wphi[:, None] * np.full(Nt, 2 * np.pi / Nt)[None, :]).reshape(-1)
        return u, w
    raise ValueError("quadrature is implemented for n = 1 and n = 2")


def _exponent(p: EvalPoint, t: np.ndarray) -> np.ndarray:
    # sum_{i<=j} x_ij t_i t_j: diagonal once, off-diagonal once
    x = p.x
    quad = np.einsum("ni,ij,nj->n", t, np.triu(x, 1), t) + np.einsum("ni,i->n", t * t, np.diag(x))
    return quad + t @ p.y


def _moment_factor(t, spec, m) -> np.ndarray:
    f = np.ones(t.shape[0])
    for name, k in spec.items():
        if not k:
            continue
        if name[0] == "x":
            i, j = int(name[1]) - 1, int(name[2]) - 1
            f = f * (t[:, i] * t[:, j]) ** k
        elif name[0] == "y":
            f = f * t[:, int(name[1:]) - 1] ** k
        else:
            raise KeyError(name)
    return f


def moments(p: EvalPoint, specs: list[dict], tol: float = 1e-10, max_level: int = 8) -> np.ndarray:
    """Integrals of t-monomials times the Fisher-Bingham integrand, refined
    until two successive levels agree to ``tol`` relative to the integral of
    the absolute integrand."""
    m = p.n + 1
    prev = None
    for level in range(max_level + 1):
        u, w = _nodes(p.n, level)
        t = p.r * u
        base = np.exp(_exponent(p, t)) * w * p.r ** p.n
        facs = np.stack([_moment_factor(t, s, m) for s in specs])
        vals = facs @ base
        scale = np.abs(facs) @ base
        if prev is not None and np.all(np.abs(vals - prev) <= tol * np.maximum(scale, 1e-300)):
            return vals
        prev = vals
    raise QuadratureError(f"no convergence to {tol} within {max_level} refinements")


def quadrature_Z(p: EvalPoint, deriv: dict | None = None, tol: float = 1e-10) -> float:
    """Z or one of its derivatives.  ``deriv`` maps x_ij / y_i names to
    orders (moment integrands) and may carry ``r`` of order 1 or 2, done by
    central differences with step 1e-5 r."""
    deriv = dict(deriv or {})
    kr = deriv.pop("r", 0)
    if kr == 0:
        return float(moments(p, [deriv], tol)[0])
    if kr > 2:
        raise ValueError("r-derivatives above order 2 are not supported")
    hstep = 1e-5 * p.r
    plus = float(moments(p.replace(r=p.r + hstep), [deriv], tol)[0])
    minus = float(moments(p.replace(r=p.r - hstep), [deriv], tol)[0])
    if kr == 1:
        return (plus - minus) / (2 * hstep)
    mid = float(moments(p, [deriv], tol)[0])
    return (plus - 2 * mid + minus) / hstep ** 2


def bessel_i0(x: float, terms: int = 60) -> float:
    """Modified Bessel function I_0 by its power series."""
    s, term = 0.0, 1.0
    q = (x / 2) ** 2
    for k in range(terms):
        if k:
            term *= q / (k * k)
        s += term
    return s


# ---------------------------------------------------------------- residuals

def _coeff_value(c, values: dict) -> float:
    if isinstance(c, RationalFunction):
        return _poly_value(c.num, c.U, values) / _poly_value(c.den, c.U, values)
    return _poly_value(c.p, c.U, values)


def _poly_value(p, U, values) -> float:
    total = 0.0
    for e, c in zip(p.monoms(), p.coeffs()):
        term = float(int(c.p)) / float(int(c.q))
        for v, k in zip(U.coeff_names, e):
            if k:
                term *= values[v] ** int(k)
        total += term
    return total


def _deriv_spec(U, dexp) -> dict:
    spec = {}
    for name, k in zip(U.diff_names, dexp):
        if k:
            spec[name[1:]] = k
    return spec


def annihilation_residual(P: WeylOperator, p: EvalPoint, tol: float = 1e-10) -> float:
    """|P Z| / sum_k |c_k d^k Z| at p (0 for the zero operator)."""
    if P.is_zero():
        return 0.0
    U = P.U
    values = {v: 0.0 for v in U.coeff_names}
    values.update({k: v for k, v in p.values().items() if k in values})
    if U.homogenized:
        values["h"] = 1.0
    plain, with_r = [], []
    for dexp, c in P.terms.items():
        spec = _deriv_spec(U, dexp)
        (with_r if "r" in spec else plain).append((dexp, c, spec))
    total, scale = 0.0, 0.0
    if plain:
        vals = moments(p, [s for _, _, s in plain], tol)
        for (dexp, c, _), z in zip(plain, vals):
            t = _coeff_value(c, values) * z
            total += t
            scale += abs(t)
    for dexp, c, spec in with_r:
        t = _coeff_value(c, values) * quadrature_Z(p, spec, tol)
        total += t
        scale += abs(t)
    return abs(total) / scale if scale else abs(total)


# ---------------------------------------------------------------- Pfaffian system

@dataclass
class PfaffianSystem:
    n: int
    U: object
    monomials: list  # differential exponents of the standard monomials
    variables: list  # coordinate names
    matrices: dict  # name -> list of rows of RationalFunction
    _compiled: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.monomials)

    def monomial_names(self) -> list[str]:
        out = []
        for e in self.monomials:
            parts = [v if k == 1 else f"{v}^{k}" for v, k in zip(self.U.diff_names, e) if k]
            out.append("*".join(parts) or "1")
        return out

    def evaluate(self, name: str, values: dict) -> np.ndarray:
        f = self._compiled.get(name)
        if f is None:
            f = self._compile(name)
            self._compiled[name] = f
        return f(*[values[v] for v in self.U.coeff_names])

    def _compile(self, name):
        U = self.U
        rows = []
        for row in self.matrices[name]:
            rows.append("[" + ", ".join(
                f"{python_expr(U, c.num)} / {python_expr(U, c.den)}" if not c.is_zero() else "0.0"
                for c in row) + "]")
        src = f"lambda {', '.join(U.coeff_names)}: _np.array([{', '.join(rows)}])"
        return eval(src, {"_np": np})  # noqa: S307  (source generated from our own polynomials)

    def denominators(self) -> list:
        seen = {}
        for mat in self.matrices.values():
            for row in mat:
                for c in row:
                    if not c.is_zero() and not c.denominator.is_constant():
                        seen[str(c.denominator)] = c.denominator
        return [seen[k] for k in sorted(seen)]

    def export(self) -> dict:
        return {"n": self.n, "standard_monomials": self.monomial_names(), "variables": self.variables,
                "matrices": {v: [[str(c) for c in row] for row in mat] for v, mat in self.matrices.items()}}


def ordered_standard_monomials(U, basis) -> list:
    """Standard monomials in the order 1, d1, d2, d2^2, ..., d_m, d_m^2."""
    order = make_prop2_order(U)
    std = standard_monomials(basis, order)
    want = [d_exponent(U, {})] + [d_exponent(U, {"dy1": 1})]
    for k in range(2, U.m + 1):
        want += [d_exponent(U, {f"dy{k}": 1}), d_exponent(U, {f"dy{k}": 2})]
    if sorted(want, key=order.dkey) != std:
        raise ValueError("unexpected standard monomials")
    return want


def build_pfaffian(n: int) -> PfaffianSystem:
    """Rows of P_v are the normal forms of d_v * m against the diagonal basis,
    written in the standard-monomial coordinates."""
    sd = prop2_basis(n)
    U = sd.U
    order = make_prop2_order(U)
    std = ordered_standard_monomials(U, sd.ops)
    pos = {e: i for i, e in enumerate(std)}
    red = Reducer(sd.ops, order)
    variables = [f"x{i}{i}" for i in range(1, U.m + 1)] + [f"y{k}" for k in range(1, U.m + 1)] + ["r"]
    zero = RationalFunction.const(U, 0)
    mats = {}
    for v in variables:
        dv = WeylOperator.var(U, "R", "d" + v)
        mat = []
        for e in std:
            nf = red.normal_form(dv * WeylOperator.dmono(U, "R", e)).remainder
            row = [zero] * len(std)
            for de, c in nf.terms.items():
                if de not in pos:
                    raise ValueError(f"normal form left the staircase at {de}")
                row[pos[de]] = c
            mat.append(row)
        mats[v] = mat
    return PfaffianSystem(n, U, std, variables, mats)


def _mat_mul(A, B, zero):
    N = len(A)
    out = []
    for i in range(N):
        row = []
        for j in range(N):
            s = zero
            for k in range(N):
                if not A[i][k].is_zero() and not B[k][j].is_zero():
                    s = s + A[i][k] * B[k][j]
            row.append(s)
        out.append(row)
    return out


def flatness_defect(P: PfaffianSystem, u: str, v: str) -> list:
    """Entries of d_u P_v - d_v P_u - (P_u P_v - P_v P_u) (all zero when the
    system is integrable, with the convention d_v F = P_v F)."""
    zero = RationalFunction.const(P.U, 0)
    Pu, Pv = P.matrices[u], P.matrices[v]
    UV, VU = _mat_mul(Pu, Pv, zero), _mat_mul(Pv, Pu, zero)
    N = P.size
    return [[Pv[i][j].derivative(u) - Pu[i][j].derivative(v) - (UV[i][j] - VU[i][j]) for j in range(N)]
            for i in range(N)]


def check_flatness(P: PfaffianSystem) -> dict:
    """Exact integrability for all variable pairs; maps 'u,v' to True or the
    first nonzero entry."""
    out = {}
    for a, b in ((a, b) for i, a in enumerate(P.variables) for b in P.variables[i + 1:]):
        bad = [str(c) for row in flatness_defect(P, a, b) for c in row if not c.is_zero()]
        out[f"{a},{b}"] = True if not bad else bad[0]
    return out


# ---------------------------------------------------------------- transport

def initial_vector(P: PfaffianSystem, p: EvalPoint, tol: float = 1e-10) -> np.ndarray:
    specs = [_deriv_spec(P.U, e) for e in P.monomials]
    return moments(p, specs, tol)


def _values(P: PfaffianSystem, coords: np.ndarray) -> dict:
    vals = dict(zip(P.variables, coords))
    return {v: vals.get(v, 0.0) for v in P.U.coeff_names}


def _coords(P: PfaffianSystem, p: EvalPoint) -> np.ndarray:
    vals = p.values()
    return np.array([vals[v] for v in P.variables])


def check_path(P: PfaffianSystem, a: np.ndarray, b: np.ndarray, samples: int = 200,
               threshold: float = 1e-3) -> float:
    """Smallest |denominator| along the segment; raises near the singular locus."""
    dens = P.denominators()
    if not dens:
        return math.inf
    U = P.U
    fns = [eval(f"lambda {', '.join(U.coeff_names)}: {python_expr(U, d.p)}") for d in dens]  # noqa: S307
    smallest = math.inf
    for s in np.linspace(0.0, 1.0, samples + 1):
        vals = _values(P, a + s * (b - a))
        args = [vals[v] for v in U.coeff_names]
        smallest = min(smallest, min(abs(f(*args)) for f in fns))
    if smallest < threshold:
        raise SingularPathError(f"path comes within {smallest:.3g} of a singular denominator")
    return smallest


def random_segment(P: PfaffianSystem, rng: random.Random, tries: int = 100) -> tuple[EvalPoint, EvalPoint]:
    """Two diagonal random points joined by a segment that stays off the
    singular locus."""
    for _ in range(tries):
        a, b = random_point(P.n, rng, diagonal=True), random_point(P.n, rng, diagonal=True)
        try:
            check_path(P, _coords(P, a), _coords(P, b))
        except SingularPathError:
            continue
        return a, b
    raise SingularPathError("no nonsingular segment found")


def _rhs(P, coords, velocity, F):
    vals = _values(P, coords)
    out = np.zeros_like(F)
    for v, dv in zip(P.variables, velocity):
        if dv:
            out += dv * (P.evaluate(v, vals) @ F)
    return out


def transport(P: PfaffianSystem, F0: np.ndarray, a: np.ndarray, b: np.ndarray, steps: int) -> np.ndarray:
    """Classical RK4 for dF/ds = sum_v (b - a)_v P_v(a + s (b - a)) F on [0, 1]."""
    F = np.array(F0, dtype=float)
    vel = b - a
    if not np.any(vel):
        return F
    hs = 1.0 / steps
    for k in range(steps):
        s = k * hs
        k1 = _rhs(P, a + s * vel, vel, F)
        k2 = _rhs(P, a + (s + hs / 2) * vel, vel, F + hs / 2 * k1)
        k3 = _rhs(P, a + (s + hs / 2) * vel, vel, F + hs / 2 * k2)
        k4 = _rhs(P, a + (s + hs) * vel, vel, F + hs * k3)
        F = F + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return F


def integrate_pfaffian(P: PfaffianSystem, start: EvalPoint, end: EvalPoint, steps: int = 1000,
                       F0: np.ndarray | None = None, tol: float = 1e-10) -> np.ndarray:
    """Transport the vector (m Z)_m from ``start`` to ``end`` along the
    straight segment.  Off-diagonal entries of the points must vanish."""
    for q in (start, end):
        if np.any(q.x - np.diag(np.diag(q.x))):
            raise ValueError("the diagonal Pfaffian system needs diagonal points")
    a, b = _coords(P, start), _coords(P, end)
    check_path(P, a, b)
    if F0 is None:
        F0 = initial_vector(P, start, tol)
    return transport(P, F0, a, b, steps)


def loop_transport(P: PfaffianSystem, p: EvalPoint, u: str, v: str, du: float, dv: float,
                   steps: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Transport around the rectangle p -> p+du -> p+du+dv -> p+dv -> p."""
    a = _coords(P, p)
    iu, iv = P.variables.index(u), P.variables.index(v)
    corners = [a.copy() for _ in range(4)]
    corners[1][iu] += du
    corners[2][iu] += du
    corners[2][iv] += dv
    corners[3][iv] += dv
    F0 = initial_vector(P, p)
    F = F0
    for s, t in zip(corners, corners[1:] + corners[:1]):
        check_path(P, s, t)
        F = transport(P, F, s, t, steps)
    return F0, F


def convergence_order(P: PfaffianSystem, start: EvalPoint, end: EvalPoint,
                      steps=(8, 16, 32)) -> dict:
    """Errors against endpoint quadrature for successive step halvings."""
    F0 = initial_vector(P, start)
    ref = initial_vector(P, end)
    a, b = _coords(P, start), _coords(P, end)
    errs = [float(np.max(np.abs(transport(P, F0, a, b, k) - ref) / np.abs(ref).max())) for k in steps]
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    return {"steps": list(steps), "errors": errs, "ratios": ratios,
            "observed_order": [math.log2(r) for r in ratios]}


def system_residuals(sd, points, tol: float = 1e-10) -> list[dict]:
    """Residual table for every generator of ``sd`` at every point."""
    out = []
    for k, p in enumerate(points):
        for s, g in sd.generators:
            out.append({"point": k, "operator": s, "residual": annihilation_residual(g, p, tol)})
    return out
