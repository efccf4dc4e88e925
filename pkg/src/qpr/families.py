"""Closed-form qubit families whose bases are simultaneously non-negative.

Three-basis models live on the eight ontic points ``(eps, a)`` with
``eps = +1/-1`` and ``a in 0..3``; the cuboid model lives on six points
``(eps, k)`` with ``k in 1..3``.  Every point carries a sign pattern: entry
``j`` is the sign ``gamma`` of the element ``rho(j, gamma)`` it is compatible
with.  A frame is assembled from the patterns by solving for vectors
``d(lam)`` with ``d(lam) . r(j) = pattern_j`` and setting

    F(lam) = q(lam)/2 (1 + d(lam).sigma),    G(lam) = (1 + d(lam).sigma)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import sympy

from .operator_core import (
    PAULI,
    TOL,
    HermitianOp,
    QubitBasis,
    basis_from_bloch,
    is_exact_scalar,
    to_sympy,
)
from .quasirep import (
    OnticDistribution,
    OnticSpace,
    QuasiRep,
    check_dual_frame,
    is_nonnegative_basis,
    support,
)

KINDS = ("single", "pair", "d3", "c2", "cuboid", "stabilizer", "icosahedron")
GOLDEN = (1 + math.sqrt(5)) / 2

# Sign pattern of the point (+, a) over three bases; (-, a) carries the negation.
TABLE_I = {
    0: (1, 1, 1),
    1: (1, -1, -1),
    2: (-1, 1, -1),
    3: (-1, -1, 1),
}
THREE_BASIS_POINTS = tuple((eps, a) for eps in (1, -1) for a in range(4))
CUBOID_POINTS = tuple((eps, k) for eps in (1, -1) for k in (1, 2, 3))


class FamilyParameterError(ValueError):
    """Parameters outside the family's range or its feasibility bound."""


class NoSolutionError(ValueError):
    """The d-vector system has no solution for the given pattern."""


class FrameConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    theta: float | None = None
    phi: float | None = None
    q0: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyParameterError(f"unknown family {self.kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class DVectorSet:
    vectors: dict = field(default_factory=dict)

    def __getitem__(self, key) -> np.ndarray:
        return self.vectors[key]


def label_str(lam) -> str:
    eps, a = lam
    return f"{'+' if eps > 0 else '-'}{a}"


def three_basis_patterns() -> dict:
    return {(eps, a): tuple(eps * s for s in TABLE_I[a]) for eps, a in THREE_BASIS_POINTS}


def cuboid_patterns() -> dict:
    """Point (eps, k) is compatible with the vertex whose k-th sign is eps.

    The four cuboid bases have '+' vertices with signs TABLE_I[0..3].
    """
    return {(eps, k): tuple(eps * TABLE_I[j][k - 1] for j in range(4)) for eps, k in CUBOID_POINTS}


def _in_open(x, lo, hi, name):
    if x is None or not (lo < x < hi):
        raise FamilyParameterError(f"{name} = {x} outside ({lo:.6g}, {hi:.6g})")


def family_bases(spec: FamilySpec, exact: bool = False) -> list[QubitBasis]:
    """Canonical-orientation bases of a family.

    ``exact`` yields exact operators where the Bloch vectors are rational
    (stabilizer, single).
    """
    k, th, ph = spec.kind, spec.theta, spec.phi
    if k == "single":
        th = 0.0 if th is None else th
        ph = 0.0 if ph is None else ph
        if exact and th == 0:
            vecs = [(0, 0, 1)]
        else:
            vecs = [(math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th))]
    elif k == "pair":
        _in_open(th, 0, math.pi / 2, "theta")
        s, c = math.sin(th), math.cos(th)
        vecs = [(s, 0, c), (-s, 0, c)]
    elif k == "d3":
        _in_open(th, 0, math.pi, "theta")
        s, c = math.sin(th), math.cos(th)
        h = math.sqrt(3) / 2
        vecs = [(s, 0, c), (-s / 2, h * s, c), (-s / 2, -h * s, c)]
    elif k == "c2":
        _in_open(th, 0, math.pi / 2, "theta")
        _in_open(ph, 0, math.pi, "phi")
        s, c = math.sin(th), math.cos(th)
        vecs = [(s, 0, c), (-s, 0, c), (math.cos(ph), math.sin(ph), 0)]
    elif k == "cuboid":
        _in_open(th, 0, math.pi / 2, "theta")
        _in_open(ph, 0, math.pi / 2, "phi")
        x = cuboid_half_edges(th, ph)
        vecs = [tuple(sg * xi for sg, xi in zip(TABLE_I[j], x)) for j in range(4)]
    elif k == "stabilizer":
        vecs = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        if not exact:
            vecs = [tuple(float(v) for v in r) for r in vecs]
    else:  # icosahedron
        n = 1 / math.sqrt(1 + GOLDEN**2)
        vecs = []
        for alpha in (1, -1):
            vecs.append((n, alpha * GOLDEN * n, 0))
        for alpha in (1, -1):
            vecs.append((0, n, alpha * GOLDEN * n))
        for alpha in (1, -1):
            vecs.append((alpha * GOLDEN * n, 0, n))
    return [basis_from_bloch(v) for v in vecs]


def cuboid_half_edges(theta: float, phi: float) -> tuple:
    return (math.cos(phi) * math.sin(theta), math.sin(phi) * math.sin(theta), math.cos(theta))


# --------------------------------------------------------------------------
# q-distributions


def d3_q0_range(theta: float) -> tuple[float, float]:
    """Interval of q(+,0) keeping every entry of the general D3 solution non-negative."""
    s2 = math.sin(theta) ** 2
    return max(0.0, 1 - 1.5 * s2), min(2 - 2.25 * s2, 1 - 0.75 * s2)


def d3_distribution(theta: float, symmetric: bool = True, q0: float | None = None) -> OnticDistribution:
    """q over the eight points for the D3 family.

    The symmetric choice q(+,0) = q(-,0) gives q0 = 1 - 9/8 sin^2 and
    q1 = 3/8 sin^2.  With ``symmetric=False`` the free parameter ``q0`` is
    q(+,0) of the one-parameter general solution.
    """
    s2 = math.sin(theta) ** 2
    if s2 > 8 / 9 + TOL:
        raise FamilyParameterError(
            f"sin^2(theta) = {s2:.6g} > 8/9: the D3 bases are non-negative only when sin^2(theta) <= 8/9")
    space = OnticSpace(THREE_BASIS_POINTS)
    if symmetric:
        if q0 is not None:
            raise FamilyParameterError("q0 is fixed by the symmetric choice; pass symmetric=False")
        a0, a1 = max(0.0, 1 - 9 / 8 * s2), 3 / 8 * s2
        vals = {(e, a): (a0 if a == 0 else a1) for e, a in THREE_BASIS_POINTS}
        return OnticDistribution.from_mapping(space, vals)
    if q0 is None:
        raise FamilyParameterError("the general D3 solution needs q0")
    lo, hi = d3_q0_range(theta)
    if not (lo - TOL <= q0 <= hi + TOL):
        raise FamilyParameterError(f"q0 = {q0:.6g} outside [{lo:.6g}, {hi:.6g}] for sin^2(theta) = {s2:.6g}")
    vals = {}
    for a in range(4):
        vals[(1, a)] = q0 if a == 0 else 1.5 * s2 - 1 + q0
        vals[(-1, a)] = 2 - q0 - 2.25 * s2 if a == 0 else 1 - q0 - 0.75 * s2
    return OnticDistribution.from_mapping(space, {k: max(v, 0.0) for k, v in vals.items()})


def c2_distribution(theta: float, phi: float, q0: float | None = None) -> OnticDistribution:
    """q over the eight points for the Z2 family (default: the symmetric choice)."""
    s, c, cp = math.sin(theta), math.cos(theta), math.cos(phi)
    if abs(cp) > s + TOL:
        raise FamilyParameterError(
            f"|cos(phi)| = {abs(cp):.6g} > sin(theta) = {s:.6g}: need |cos(phi)| <= sin(theta)")
    space = OnticSpace(THREE_BASIS_POINTS)
    if q0 is None:
        v0, v1, v2 = c * c / 2, s * (s - cp) / 2, s * (s + cp) / 2
        vals = {(e, a): (v0, v1, v2, v0)[a] for e, a in THREE_BASIS_POINTS}
        return OnticDistribution.from_mapping(space, {k: max(v, 0.0) for k, v in vals.items()})
    c2t = math.cos(2 * theta)
    lo = max(0.0, c2t / 2 + abs(cp) * s / 2)
    hi = min(c * c, 0.5 - abs(cp) * s / 2)
    if not (lo - TOL <= q0 <= hi + TOL):
        raise FamilyParameterError(f"q0 = {q0:.6g} outside [{lo:.6g}, {hi:.6g}]")
    plus = (q0, q0 - c2t / 2 - cp * s / 2, q0 - c2t / 2 + cp * s / 2, q0)
    minus_0 = 0.5 - q0 + c2t / 2
    minus = (minus_0, 0.5 - q0 - cp * s / 2, 0.5 - q0 + cp * s / 2, minus_0)
    vals = {(1, a): plus[a] for a in range(4)} | {(-1, a): minus[a] for a in range(4)}
    return OnticDistribution.from_mapping(space, {k: max(v, 0.0) for k, v in vals.items()})


def cuboid_distribution(theta: float, phi: float) -> OnticDistribution:
    """q(eps, k) = x_k^2 with x the cuboid half-edges; sums to 1 on each support."""
    _in_open(theta, 0, math.pi / 2, "theta")
    _in_open(phi, 0, math.pi / 2, "phi")
    x = cuboid_half_edges(theta, phi)
    return OnticDistribution.from_mapping(OnticSpace(CUBOID_POINTS), {(e, k): x[k - 1] ** 2 for e, k in CUBOID_POINTS})


def cuboid_printed_q(theta: float, phi: float) -> tuple:
    """The closed forms as printed in the source; twice the normalized values."""
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    cos2p = math.cos(2 * phi)
    return (1 + s2 * cos2p - c2, 1 - s2 * cos2p - c2, 1 + math.cos(2 * theta))


def uniform_distribution(points: Sequence, value) -> OnticDistribution:
    return OnticDistribution(OnticSpace(tuple(points)), tuple(value for _ in points))


# --------------------------------------------------------------------------
# frames


def _bloch_matrix(bases: Sequence[QubitBasis]):
    if all(b.direction.exact for b in bases):
        return sympy.Matrix([[to_sympy(c) for c in b.direction.components] for b in bases])
    return np.array([b.direction.as_array() for b in bases])


def solve_dvectors(bases: Sequence[QubitBasis], patterns: Mapping) -> DVectorSet:
    """Solve d . r(j) = pattern_j for every label in ``patterns``.

    Overdetermined systems (more than three bases) must be consistent.
    """
    R = _bloch_matrix(bases)
    out = {}
    if isinstance(R, sympy.MatrixBase):
        if R.rank() < 3:
            raise NoSolutionError("Bloch vectors do not span R^3; d-vectors are not determined")
        for lam, pat in patterns.items():
            s = sympy.Matrix(list(pat))
            sol = (R.T * R).inv() * R.T * s
            if R * sol != s:
                raise NoSolutionError(f"pattern {pat} is not realizable")
            out[lam] = sol
        return DVectorSet(out)
    if np.linalg.matrix_rank(R, tol=1e-9) < 3:
        raise NoSolutionError("Bloch vectors do not span R^3 (coplanar bases); the d-vector system is singular")
    for lam, pat in patterns.items():
        s = np.array(pat, dtype=float)
        sol, *_ = np.linalg.lstsq(R, s, rcond=None)
        if np.abs(R @ sol - s).max() > 1e-9:
            raise NoSolutionError(f"pattern {pat} is not realizable by any d-vector")
        out[lam] = sol
    return DVectorSet(out)


def _frame_op(scale, d) -> HermitianOp:
    if isinstance(d, sympy.MatrixBase):
        half = sympy.Rational(1, 2)
        m = sympy.eye(2) + d[0] * sympy.Matrix([[0, 1], [1, 0]]) \
            + d[1] * sympy.Matrix([[0, -sympy.I], [sympy.I, 0]]) + d[2] * sympy.Matrix([[1, 0], [0, -1]])
        return HermitianOp(sympy.ImmutableMatrix(m * half * to_sympy(scale)))
    m = np.eye(2, dtype=complex) + sum(di * p for di, p in zip(d, PAULI))
    return HermitianOp(0.5 * float(scale) * m)


def build_frame(bases: Sequence[QubitBasis], distribution: OnticDistribution, patterns: Mapping,
                name: str = "", check: bool = True, **meta) -> QuasiRep:
    """Frame operators F, G from q and the support patterns.

    The result is checked to be a dual frame with every input basis
    non-negative unless ``check`` is False.
    """
    dvecs = solve_dvectors(bases, {lam: patterns[lam] for lam in distribution.space})
    exact_q = all(is_exact_scalar(v) for v in distribution.values)
    F, G = [], []
    for lam, q in zip(distribution.space, distribution.values):
        d = dvecs[lam]
        if isinstance(d, sympy.MatrixBase) and not exact_q:
            d = np.array([float(v) for v in d])
        F.append(_frame_op(q, d))
        G.append(_frame_op(Fraction(1) if isinstance(d, sympy.MatrixBase) else 1.0, d))
    rep = QuasiRep(distribution.space, tuple(F), tuple(G), dim=2, name=name,
                   meta={"bases": list(bases), "patterns": dict(patterns), "dvectors": dvecs, **meta})
    if check:
        dual = check_dual_frame(rep, tol=1e-8)
        if not dual.ok:
            raise FrameConstructionError(f"not a dual frame, max deviation {dual.max_deviation:.3g}")
        for j, b in enumerate(bases):
            if not is_nonnegative_basis(rep, b, tol=1e-8):
                raise FrameConstructionError(f"basis {j} is not non-negative in the built frame")
    return rep


def family_rep(spec: FamilySpec, exact: bool = False) -> QuasiRep:
    """Frame for any constructible family.

    ``single`` and ``pair`` are embedded in three-basis models (stabilizer and
    c2 at phi = pi/2) since their own frames are subsets of those.
    """
    k = spec.kind
    if k == "icosahedron":
        raise FamilyParameterError("the icosahedral bases admit no non-negative representation")
    if k == "stabilizer":
        return stabilizer_rep(exact=exact)
    if k == "single":
        r = family_bases(spec, exact=exact)[0].direction
        if r.exact and tuple(r.components) == (0, 0, 1):
            return stabilizer_rep(exact=exact)
        return _orthonormal_completion_rep(r.as_array())
    if k == "pair":
        return family_rep(FamilySpec("c2", spec.theta, math.pi / 2))
    bases = family_bases(spec)
    if k == "d3":
        sym = spec.q0 is None
        dist = d3_distribution(spec.theta, symmetric=sym, q0=spec.q0)
        return build_frame(bases, dist, three_basis_patterns(), name="d3", kind="d3",
                           theta=spec.theta, q0=spec.q0)
    if k == "c2":
        dist = c2_distribution(spec.theta, spec.phi, q0=spec.q0)
        return build_frame(bases, dist, three_basis_patterns(), name="c2", kind="c2",
                           theta=spec.theta, phi=spec.phi, q0=spec.q0)
    dist = cuboid_distribution(spec.theta, spec.phi)
    return build_frame(bases, dist, cuboid_patterns(), name="cuboid", kind="cuboid",
                       theta=spec.theta, phi=spec.phi,
                       printed_q=cuboid_printed_q(spec.theta, spec.phi))


def _orthonormal_completion_rep(r: np.ndarray) -> QuasiRep:
    """Stabilizer-type frame whose third basis is along ``r``."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(r[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, r)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(r, e1)
    bases = [basis_from_bloch(v) for v in (e1, e2, r)]
    dist = uniform_distribution(THREE_BASIS_POINTS, 0.25)
    return build_frame(bases, dist, three_basis_patterns(), name="single", kind="single")


def stabilizer_rep(exact: bool = False) -> QuasiRep:
    """Eight-point model of the X, Y, Z bases with q = 1/4 everywhere."""
    bases = family_bases(FamilySpec("stabilizer"), exact=exact)
    quarter = Fraction(1, 4) if exact else 0.25
    dist = uniform_distribution(THREE_BASIS_POINTS, quarter)
    return build_frame(bases, dist, three_basis_patterns(), name="stabilizer", kind="stabilizer")


def reduced_wigner(rep: QuasiRep) -> QuasiRep:
    """Four-point discrete Wigner function from an eight-point stabilizer model.

    Keeps the points (+, a) and uses F(+,a) = (1/2) sum_j rho(j, gamma_ja) - 1/2,
    G(+,a) = 2 F(+,a), where rho(j, gamma_ja) is the element of basis j
    compatible with (+, a).
    """
    bases = rep.meta.get("bases")
    if rep.meta.get("kind") != "stabilizer" or bases is None or len(rep.space) != 8:
        raise FamilyParameterError("reduced_wigner needs the eight-point stabilizer model")
    points = [(1, a) for a in range(4)]
    F, G = [], []
    for lam in points:
        total = np.zeros((2, 2), dtype=complex)
        for b in bases:
            hits = [rho for rho in b.elements if lam in support(rep, rho)]
            if len(hits) != 1:
                raise FrameConstructionError(f"point {lam} is not compatible with exactly one element")
            total += hits[0].to_numpy()
        f = 0.5 * total - 0.5 * np.eye(2)
        F.append(HermitianOp(f))
        G.append(HermitianOp(2 * f))
    return QuasiRep(OnticSpace(tuple(points)), tuple(F), tuple(G), dim=2, name="wigner",
                    meta={"kind": "wigner", "bases": bases})

