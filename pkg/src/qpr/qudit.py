"""Relations between non-negative bases in dimension d.

Operators are compared as real vectors in the d^2-dimensional space of
Hermitian matrices.  A family of N bases is *disparate* when deleting one
element from every basis and adding the identity always leaves a linearly
independent set; at most d + 1 bases can be disparate.

Checkers in this module do not decide feasibility for d > 2; they test the
necessary relations that non-negative families must satisfy and, at d = 2,
cross-check them against the qubit certifier.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import sympy

from . import lp
from .operator_core import HermitianOp, QubitBasis, QuditBasis, identity
from .quasirep import QuasiRep, distribution, frame_rank, q_function

RANK_TOL = 1e-9
SPAN_TOL = 1e-9
ORTHO_TOL = 1e-9
RELATION_TOL = 1e-8


class SpanError(ValueError):
    """The target state is not in the real span of the family."""


class RankDeficientFrameError(ValueError):
    pass


@dataclass(frozen=True)
class BasisFamily:
    bases: tuple

    def __post_init__(self):
        bases = tuple(QuditBasis.from_qubit(b) if isinstance(b, QubitBasis) else b for b in self.bases)
        if not bases:
            raise ValueError("a family needs at least one basis")
        dims = {b.dim for b in bases}
        if len(dims) != 1:
            raise ValueError(f"bases of different dimensions: {sorted(dims)}")
        object.__setattr__(self, "bases", bases)

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    @property
    def n(self) -> int:
        return len(self.bases)

    def element(self, alpha: int, j: int) -> HermitianOp:
        return self.bases[alpha].elements[j]

    def subfamily(self, indices: Sequence[int]) -> BasisFamily:
        return BasisFamily(tuple(self.bases[i] for i in indices))

    @property
    def exact(self) -> bool:
        return all(e.exact for b in self.bases for e in b.elements)


def hermitian_coords(op: HermitianOp) -> np.ndarray:
    """Real coordinates (diagonal, then Re and Im of the upper triangle)."""
    m = op.to_numpy()
    d = m.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate([m.diagonal().real, m[iu].real, m[iu].imag])


def _exact_coords(op: HermitianOp) -> list:
    m = op.entries
    d = m.shape[0]
    coords = [sympy.re(m[i, i]) for i in range(d)]
    upper = [(i, j) for i in range(d) for j in range(i + 1, d)]
    coords += [sympy.re(m[i, j]) for i, j in upper]
    coords += [sympy.im(m[i, j]) for i, j in upper]
    return coords


def operator_rank(ops: Sequence[HermitianOp]) -> int:
    """Real rank of a set of Hermitian operators (exact when all are exact)."""
    if all(op.exact for op in ops):
        return sympy.Matrix([_exact_coords(op) for op in ops]).rank()
    sv = np.linalg.svd(np.array([hermitian_coords(op) for op in ops]), compute_uv=False)
    return int((sv > RANK_TOL).sum())


def _deletion_set(fam: BasisFamily, f: Sequence[int]) -> list[HermitianOp]:
    ops = [fam.element(a, j) for a in range(fam.n) for j in range(fam.dim) if j != f[a]]
    return ops + [identity(fam.dim, exact=fam.exact)]


def dependent_deletion(fam: BasisFamily):
    """First f in Z_d^N whose deletion set is linearly dependent, else None."""
    for f in itertools.product(range(fam.dim), repeat=fam.n):
        ops = _deletion_set(fam, f)
        if operator_rank(ops) < len(ops):
            return f
    return None


def is_disparate(fam: BasisFamily) -> bool:
    if fam.n > fam.dim + 1:
        return False
    return dependent_deletion(fam) is None


def mub_bases(d: int) -> list[QuditBasis]:
    """The d + 1 mutually unbiased bases of a prime dimension d.

    The computational basis plus, for k in 0..d-1, the vectors
    sum_x w^(k x^2 + j x) |x> / sqrt(d), w = exp(2 pi i / d); for d = 2 the
    last two are the X and Y eigenbases.
    """
    if d < 2 or any(d % p == 0 for p in range(2, int(math.isqrt(d)) + 1)):
        raise ValueError(f"MUB construction needs a prime dimension, got {d}")
    omega = cmath.exp(2j * math.pi / d)
    out = [QuditBasis.from_vectors(np.eye(d))]
    for k in range(d):
        vecs = []
        for j in range(d):
            if d == 2:
                v = [1, (1j ** k) * (-1) ** j]
            else:
                v = [omega ** ((k * x * x + j * x) % d) for x in range(d)]
            vecs.append(np.array(v, dtype=complex) / math.sqrt(d))
        out.append(QuditBasis.from_vectors(vecs))
    return out


# --------------------------------------------------------------------------
# hull decompositions


@dataclass(frozen=True)
class HullDecomposition:
    """eps phi + (1 - eps)/d 1 = sum p[a][j] rho(a, j); ``f[a]`` indexes a zero of p[a]."""

    eps: float
    f: tuple
    p: tuple
    residual: float

    @property
    def total(self) -> float:
        return float(sum(sum(row) for row in self.p))

    def zero_in_every_basis(self, tol: float = 1e-9) -> bool:
        return all(min(row) <= tol for row in self.p)


def in_span(fam: BasisFamily, phi: HermitianOp, tol: float = SPAN_TOL) -> bool:
    A = np.array([hermitian_coords(fam.element(a, j)) for a in range(fam.n) for j in range(fam.dim)]).T
    target = hermitian_coords(phi)
    coef, *_ = np.linalg.lstsq(A, target, rcond=None)
    return bool(np.abs(A @ coef - target).max() < tol)


def hull_decompose(fam: BasisFamily, phi: HermitianOp, *, require_disparate: bool = True) -> HullDecomposition:
    """Largest eps with eps phi + (1-eps)/d 1 in the convex hull of the family.

    Solved as an LP over (eps, p, slack) with eps <= 1.  For a disparate
    family the maximizer lies on the hull boundary, so every basis receives
    at least one zero coefficient.

    Raises
    ------
    SpanError
        If ``phi`` is outside the real span of the family's elements.
    """
    if require_disparate and not is_disparate(fam):
        raise ValueError("hull_decompose expects a disparate family (pass require_disparate=False)")
    if not in_span(fam, phi):
        raise SpanError("target state is outside the span of the family")
    d, n = fam.dim, fam.n
    cols = [hermitian_coords(fam.element(a, j)) for a in range(n) for j in range(d)]
    centre = hermitian_coords(identity(d)) / d
    direction = hermitian_coords(phi) - centre
    # sum p v(a,j) - eps (phi - 1/d) = 1/d ;  eps + s = 1
    A = [list(row) + [-direction[i], 0.0] for i, row in enumerate(np.array(cols).T)]
    b = list(centre)
    A.append([0.0] * (n * d) + [1.0, 1.0])
    b.append(1.0)
    c = [0.0] * (n * d) + [-1.0, 0.0]
    res = lp.solve_lp(A, b, c, exact=False)
    if not res.feasible:
        raise SpanError("no decomposition found (the maximally mixed state is not in the hull)")
    x = res.x
    eps = float(x[n * d])
    p = tuple(tuple(float(x[a * d + j]) for j in range(d)) for a in range(n))
    f = tuple(int(np.argmin(row)) for row in p)
    lhs = eps * hermitian_coords(phi) + (1 - eps) * centre
    rhs = sum(p[a][j] * cols[a * d + j] for a in range(n) for j in range(d))
    return HullDecomposition(eps, f, p, float(np.abs(lhs - rhs).max()))


# --------------------------------------------------------------------------
# relation checks


def mutually_nonorthogonal(fam: BasisFamily, tol: float = ORTHO_TOL) -> bool:
    for a, b in itertools.combinations(range(fam.n), 2):
        for x in fam.bases[a].elements:
            for y in fam.bases[b].elements:
                if abs(float(np.trace(x.to_numpy() @ y.to_numpy()).real)) <= tol:
                    return False
    return True


def _qubit_verdict(fam: BasisFamily):
    """Certifier verdict for qubit families, None otherwise."""
    if fam.dim != 2:
        return None
    from .certifier import certify
    from .operator_core import density_to_bloch

    dirs = [density_to_bloch(HermitianOp(b.elements[0].to_numpy())).as_array() for b in fam.bases]
    return certify(dirs, "float", check_frame=False).feasible


@dataclass
class TheoremReport:
    """Outcome of one relation check.

    ``applicable`` is False when the precondition fails (reason in
    ``note``); ``holds`` is the relation itself; ``certifier_feasible`` is the
    qubit certifier's verdict (None for d > 2) and ``consistent`` is False
    only when a certified non-negative family violates the relation.
    """

    theorem: str
    dim: int
    n: int
    applicable: bool = True
    holds: bool = True
    certifier_feasible: bool | None = None
    details: dict = field(default_factory=dict)
    note: str = ""

    @property
    def consistent(self) -> bool:
        return not (self.certifier_feasible and self.applicable and not self.holds)

    def as_dict(self) -> dict:
        return {"theorem": self.theorem, "dim": self.dim, "n": self.n, "applicable": self.applicable,
                "holds": self.holds, "certifier_feasible": self.certifier_feasible,
                "consistent": self.consistent, "details": self.details, "note": self.note}


def check_theorem3(fam: BasisFamily, cross_check: bool = True) -> TheoremReport:
    """Three mutually non-orthogonal non-negative bases must be disparate."""
    rep = TheoremReport("3", fam.dim, fam.n)
    if fam.n != 3:
        raise ValueError("Theorem 3 concerns exactly three bases")
    if not mutually_nonorthogonal(fam):
        rep.applicable = False
        rep.note = "precondition: an element of one basis is orthogonal to an element of another"
        return rep
    rep.holds = is_disparate(fam)
    rep.details["dependent_deletion"] = None if rep.holds else list(dependent_deletion(fam))
    if cross_check:
        rep.certifier_feasible = _qubit_verdict(fam)
    return rep


def _span_members(fam: BasisFamily) -> list[tuple]:
    """(alpha, k) such that rho(alpha, k) lies in the span of the other bases."""
    out = []
    for alpha in range(fam.n):
        others = fam.subfamily([a for a in range(fam.n) if a != alpha])
        for k in range(fam.dim):
            if in_span(others, fam.element(alpha, k)):
                out.append((alpha, k))
    return out


def check_theorem4_relation(fam: BasisFamily, decomposition: HullDecomposition | None = None,
                            cross_check: bool = True) -> TheoremReport:
    """Non-disparate quadruples: eps = 1/(d+1) for the hull decomposition.

    Every relabeling (alpha, k) with rho(alpha, k) in the span of the other
    three bases is decomposed with maximal eps; the relation holds when all of
    them give eps = 1/(d+1).  A supplied ``decomposition`` is checked as well.
    ``details['saturated']`` lists, per relabeling, whether each remaining
    basis has a coefficient equal to (1 - eps)/d.
    """
    if fam.n != 4:
        raise ValueError("Theorem 4 concerns exactly four bases")
    d = fam.dim
    target = 1 / (d + 1)
    rep = TheoremReport("4", d, 4)
    if is_disparate(fam):
        rep.applicable = False
        rep.note = "family is disparate"
        return rep
    if not mutually_nonorthogonal(fam):
        rep.applicable = False
        rep.note = "precondition: bases are not mutually non-orthogonal"
        return rep
    relabelings = []
    for alpha, k in _span_members(fam):
        rest = fam.subfamily([a for a in range(4) if a != alpha])
        if not is_disparate(rest):
            relabelings.append({"out": [alpha, k], "eps": None, "note": "remaining bases not disparate"})
            continue
        dec = hull_decompose(rest, fam.element(alpha, k))
        level = (1 - dec.eps) / d
        saturated = [any(abs(v - level) <= RELATION_TOL for v in row) for row in dec.p]
        relabelings.append({"out": [alpha, k], "eps": dec.eps, "p": [list(r) for r in dec.p],
                            "saturated": saturated})
    eps_values = [r["eps"] for r in relabelings]
    rep.holds = bool(relabelings) and all(e is not None and abs(e - target) <= RELATION_TOL for e in eps_values)
    if decomposition is not None:
        rep.details["handed_eps"] = decomposition.eps
        rep.details["handed_holds"] = abs(decomposition.eps - target) <= RELATION_TOL
        rep.holds = rep.holds and rep.details["handed_holds"]
    rep.details["target_eps"] = target
    rep.details["relabelings"] = relabelings
    if cross_check:
        rep.certifier_feasible = _qubit_verdict(fam)
    return rep


def theorem5_bound(n: int, d: int) -> float:
    return (n - 3) / (n - 3 + d)


def check_theorem5_bound(fam: BasisFamily, decomposition: HullDecomposition | None = None,
                         cross_check: bool = True) -> TheoremReport:
    """Non-disparate N-sets: eps <= (N - 3)/(N - 3 + d).

    Reports the handed decomposition (if any) and the LP-maximal eps of the
    last basis' span members over the first N - 1 bases, labelled separately.
    """
    n, d = fam.n, fam.dim
    if n < 4:
        raise ValueError("Theorem 5 concerns four or more bases")
    bound = theorem5_bound(n, d)
    rep = TheoremReport("5", d, n, details={"bound": bound})
    if is_disparate(fam):
        rep.applicable = False
        rep.note = "family is disparate"
        return rep
    holds = True
    if decomposition is not None:
        rep.details["handed_eps"] = decomposition.eps
        rep.details["handed_holds"] = decomposition.eps <= bound + RELATION_TOL
        holds = holds and rep.details["handed_holds"]
    maximal = []
    for alpha, k in _span_members(fam):
        rest = fam.subfamily([a for a in range(n) if a != alpha])
        dec = hull_decompose(rest, fam.element(alpha, k), require_disparate=False)
        maximal.append({"out": [alpha, k], "eps": dec.eps})
    rep.details["maximal"] = maximal
    rep.details["maximal_holds"] = all(m["eps"] <= bound + RELATION_TOL for m in maximal)
    rep.holds = holds and rep.details["maximal_holds"]
    if cross_check:
        rep.certifier_feasible = _qubit_verdict(fam)
    return rep


# --------------------------------------------------------------------------
# counting bound


@dataclass(frozen=True)
class PatternCount:
    """2^(d^2) bound, the refined count, and (optionally) realized states."""

    dim: int
    bound: int
    refined: int
    observed: int | None = None
    points: tuple = ()


def refined_pattern_count(d: int) -> int:
    """Patterns with between 1 and d^2 - d + 1 nonzero entries out of d^2."""
    m = d * d
    return sum(math.comb(m, k) for k in range(1, m - d + 2))


def _independent_points(rep: QuasiRep) -> list:
    chosen, rows = [], []
    q = q_function(rep)
    order = sorted(rep.space, key=lambda lam: float(q[lam]) <= RANK_TOL)  # positive-q points first
    for lam in order:
        trial = rows + [hermitian_coords(HermitianOp(rep.F_at(lam).to_numpy()))]
        if np.linalg.matrix_rank(np.array(trial), tol=RANK_TOL) == len(trial):
            rows, chosen = trial, chosen + [lam]
        if len(chosen) == rep.dim ** 2:
            break
    return chosen


def pattern_bound(d: int, rep: QuasiRep | None = None, tol: float = 1e-8) -> PatternCount:
    """Counting bound on states that belong to non-negative bases.

    With ``rep``: choose d^2 points with independent F(lam); for every
    {0, q}-valued assignment on them solve Tr(rho F) = value for a Hermitian
    rho and count the solutions that are pure states whose distribution is
    {0, q}-valued on the whole space.

    Raises
    ------
    RankDeficientFrameError
        If the frame has fewer than d^2 independent operators.
    """
    bound, refined = 2 ** (d * d), refined_pattern_count(d)
    if rep is None:
        return PatternCount(d, bound, refined)
    if rep.dim != d:
        raise ValueError(f"representation has dim {rep.dim}, expected {d}")
    if frame_rank(rep) < d * d:
        raise RankDeficientFrameError("fewer than d^2 linearly independent frame operators")
    points = _independent_points(rep)
    q = q_function(rep)
    # Tr(rho F) = sum_k c_k(rho) c_k(F) w_k with weights 1 (diagonal) and 2 (off-diagonal)
    weights = np.array([1.0] * d + [2.0] * (d * d - d))
    M = np.array([hermitian_coords(HermitianOp(rep.F_at(lam).to_numpy())) * weights for lam in points])
    iu = np.triu_indices(d, 1)
    seen, observed = set(), 0
    for pattern in itertools.product((0, 1), repeat=d * d):
        values = np.array([float(q[lam]) * s for lam, s in zip(points, pattern)])
        key = tuple(np.round(values, 12))
        if key in seen:
            continue
        seen.add(key)
        coords = np.linalg.solve(M, values)
        rho = np.diag(coords[:d]).astype(complex)
        off = coords[d:d + len(iu[0])] + 1j * coords[d + len(iu[0]):]
        rho[iu] = off
        rho[(iu[1], iu[0])] = off.conj()
        if abs(np.trace(rho).real - 1) > tol or abs(np.trace(rho @ rho).real - 1) > tol:
            continue
        if np.linalg.eigvalsh(rho).min() < -tol:
            continue
        dist = distribution(rep, HermitianOp(rho))
        if all(abs(v) <= tol or abs(v - float(q[lam])) <= tol for lam, v in zip(rep.space, dist.values)):
            observed += 1
    return PatternCount(d, bound, refined, observed, tuple(points))
