"""Quasiprobability representations over finite ontic spaces.

A representation is a pair of operator families {F(lam)}, {G(lam)} indexed by
the points of an :class:`OnticSpace`.  States map to quasiprobabilities
``mu_rho(lam) = Tr(rho F(lam))`` and effects to indicator functions
``xi_E(lam) = Tr(E G(lam))``.  Integrals over the ontic space are finite sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .operator_core import (
    TOL,
    HermitianOp,
    QubitBasis,
    QuditBasis,
    identity,
    overlap,
    to_fraction,
    trace_product,
)

SupportSet = frozenset


class UnknownPointError(KeyError):
    pass


@dataclass(frozen=True)
class OnticSpace:
    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("ontic labels must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    def index(self, lam: Hashable) -> int:
        try:
            return self._index[lam]
        except KeyError:
            raise UnknownPointError(lam) from None

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, lam) -> bool:
        return lam in self._index


@dataclass(frozen=True)
class OnticDistribution:
    """Real-valued function on a finite ontic space (may be negative)."""

    space: OnticSpace
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != len(self.space):
            raise ValueError(f"{len(vals)} values for {len(self.space)} points")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, space: OnticSpace, mapping: Mapping) -> OnticDistribution:
        return cls(space, tuple(mapping[p] for p in space.points))

    def __getitem__(self, lam):
        return self.values[self.space.index(lam)]

    def as_dict(self) -> dict:
        return dict(zip(self.space.points, self.values))

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def total(self):
        return sum(self.values)

    def allclose(self, other: OnticDistribution, tol: float = TOL) -> bool:
        if self.space.points != other.space.points:
            return False
        return bool(np.allclose(self.as_array(), other.as_array(), atol=tol))


@dataclass(frozen=True, eq=False)
class QuasiRep:
    space: OnticSpace
    F: tuple
    G: tuple
    dim: int = 2
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        F, G = tuple(self.F), tuple(self.G)
        if len(F) != len(self.space) or len(G) != len(self.space):
            raise ValueError("need one F and one G operator per ontic point")
        for op in F + G:
            if op.dim != self.dim:
                raise ValueError(f"operator of dim {op.dim} in a dim-{self.dim} representation")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)

    @property
    def exact(self) -> bool:
        return all(op.exact for op in self.F + self.G)

    def F_at(self, lam) -> HermitianOp:
        return self.F[self.space.index(lam)]

    def G_at(self, lam) -> HermitianOp:
        return self.G[self.space.index(lam)]


def _scalar(val, exact: bool):
    return to_fraction(val) if exact else float(val)


def mu(rep: QuasiRep, rho: HermitianOp, lam):
    """Quasiprobability Tr(rho F(lam))."""
    F = rep.F_at(lam)
    return _scalar(trace_product(rho, F), rho.exact and F.exact)


def xi(rep: QuasiRep, effect: HermitianOp, lam):
    """Indicator value Tr(E G(lam))."""
    G = rep.G_at(lam)
    return _scalar(trace_product(effect, G), effect.exact and G.exact)


def distribution(rep: QuasiRep, rho: HermitianOp) -> OnticDistribution:
    return OnticDistribution(rep.space, tuple(mu(rep, rho, lam) for lam in rep.space))


def indicator(rep: QuasiRep, effect: HermitianOp) -> OnticDistribution:
    return OnticDistribution(rep.space, tuple(xi(rep, effect, lam) for lam in rep.space))


def born_probability(rep: QuasiRep, rho: HermitianOp, effect: HermitianOp):
    """Sum over lam of mu_rho(lam) xi_E(lam)."""
    return sum(m * x for m, x in zip(distribution(rep, rho).values, indicator(rep, effect).values))


def born_residual(rep: QuasiRep, rho: HermitianOp, effect: HermitianOp):
    val = overlap(rho, effect) - born_probability(rep, rho, effect)
    return abs(val)


def hermitian_operator_basis(d: int) -> list[np.ndarray]:
    """d^2 Hermitian matrices spanning all d x d complex matrices."""
    basis = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1
        basis.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1
            basis.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j], m[j, i] = -1j, 1j
            basis.append(m)
    return basis


@dataclass(frozen=True)
class DualFrameCheck:
    ok: bool
    max_deviation: float

    def __bool__(self) -> bool:
        return self.ok


def check_dual_frame(rep: QuasiRep, tol: float = TOL) -> DualFrameCheck:
    """Does sum_lam Tr(A F(lam)) G(lam) reproduce A on an operator basis?"""
    F = np.array([f.to_numpy() for f in rep.F])
    G = np.array([g.to_numpy() for g in rep.G])
    worst = 0.0
    for a in hermitian_operator_basis(rep.dim):
        coeffs = np.einsum("ij,lji->l", a, F)
        recon = np.einsum("l,lij->ij", coeffs, G)
        worst = max(worst, float(np.abs(recon - a).max()))
    return DualFrameCheck(worst <= tol, worst)


def frame_sum_deviation(rep: QuasiRep) -> float:
    """max |sum_lam F(lam) - 1|, zero iff every state distribution normalizes."""
    total = sum(f.to_numpy() for f in rep.F)
    return float(np.abs(total - np.eye(rep.dim)).max())


def frame_rank(rep: QuasiRep, cutoff: float = TOL) -> int:
    """Rank of {F(lam)} as real vectors; d^2 iff rho -> mu_rho is injective."""
    rows = [np.concatenate([f.to_numpy().real.ravel(), f.to_numpy().imag.ravel()]) for f in rep.F]
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    return int((sv > cutoff).sum())


def _default_tol(rep: QuasiRep, rho: HermitianOp | None = None):
    exact = rep.exact and (rho is None or rho.exact)
    return 0 if exact else TOL


def support(rep: QuasiRep, rho: HermitianOp, tol: float | None = None) -> SupportSet:
    """Points where |mu_rho| exceeds ``tol`` (exact zero test in exact mode)."""
    if tol is None:
        tol = _default_tol(rep, rho)
    dist = distribution(rep, rho)
    return SupportSet(lam for lam, v in zip(rep.space, dist.values) if abs(v) > tol)


def q_function(rep: QuasiRep) -> OnticDistribution:
    """q(lam) = d * mu_{1/d}(lam), which equals Tr(F(lam))."""
    one = identity(rep.dim, exact=rep.exact)
    return OnticDistribution(rep.space, tuple(mu(rep, one, lam) for lam in rep.space))


def _elements(basis) -> tuple:
    if isinstance(basis, (QubitBasis, QuditBasis)):
        return tuple(basis.elements)
    return tuple(basis)


def is_nonnegative_basis(rep: QuasiRep, basis, tol: float | None = None) -> bool:
    """All mu_{rho(j)} >= -tol and all xi_{rho(j)} in [-tol, 1 + tol]."""
    elems = _elements(basis)
    if elems[0].dim != rep.dim:
        raise ValueError(f"basis of dim {elems[0].dim} against a dim-{rep.dim} representation")
    if tol is None:
        tol = _default_tol(rep, elems[0])
    for rho in elems:
        if any(v < -tol for v in distribution(rep, rho).values):
            return False
        if any(v < -tol or v > 1 + tol for v in indicator(rep, rho).values):
            return False
    return True


@dataclass
class LemmaReport:
    """Outcome of the structural checks on non-negative bases.

    Each flag is True when the corresponding property holds for every basis
    (or pair of states) examined; ``failures`` lists human-readable reasons.
    """

    preconditions_ok: bool = True
    disjoint_supports: bool = True
    deterministic_indicators: bool = True
    two_valued: bool = True
    overlap_iff_nonorthogonal: bool = True
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.preconditions_ok and self.disjoint_supports and self.deterministic_indicators
                and self.two_valued and self.overlap_iff_nonorthogonal)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "preconditions_ok": self.preconditions_ok,
            "disjoint_supports": self.disjoint_supports,
            "deterministic_indicators": self.deterministic_indicators,
            "two_valued": self.two_valued,
            "overlap_iff_nonorthogonal": self.overlap_iff_nonorthogonal,
            "failures": list(self.failures),
        }


def lemma_structure_report(rep: QuasiRep, bases: Sequence, tol: float | None = None) -> LemmaReport:
    """Check supports, indicators and the two-valued q structure for ``bases``.

    Violations are collected in the report rather than raised.
    """
    report = LemmaReport()
    if tol is None:
        tol = TOL if not rep.exact else 0
    check_tol = max(tol, 1e-9)
    for b, basis in enumerate(bases):
        if not is_nonnegative_basis(rep, basis, tol=check_tol):
            report.preconditions_ok = False
            report.failures.append(f"basis {b} is not non-negative")
    if not report.preconditions_ok:
        return report

    q = q_function(rep)
    states = []
    for b, basis in enumerate(bases):
        elems = _elements(basis)
        supps = [support(rep, rho, tol) for rho in elems]
        for j in range(len(elems)):
            for k in range(j + 1, len(elems)):
                if supps[j] & supps[k]:
                    report.disjoint_supports = False
                    report.failures.append(f"basis {b}: supports of elements {j},{k} intersect")
        for j, rho in enumerate(elems):
            ind = indicator(rep, rho)
            for k, supp in enumerate(supps):
                target = 1 if j == k else 0
                for lam in supp:
                    if abs(ind[lam] - target) > check_tol:
                        report.deterministic_indicators = False
                        report.failures.append(
                            f"basis {b}: xi_{j}({lam}) = {float(ind[lam]):.3g}, expected {target}")
            dist = distribution(rep, rho)
            for lam, v in zip(rep.space, dist.values):
                if abs(v) > check_tol and abs(v - q[lam]) > check_tol:
                    report.two_valued = False
                    report.failures.append(
                        f"basis {b}: mu_{j}({lam}) = {float(v):.3g} not in {{0, q = {float(q[lam]):.3g}}}")
            states.append(((b, j), rho, supps[j]))

    for i, (la, ra, sa) in enumerate(states):
        for lb, rb, sb in states[i + 1:]:
            orthogonal = abs(float(overlap(ra, rb))) <= check_tol
            intersect = bool(sa & sb)
            if orthogonal == intersect:
                report.overlap_iff_nonorthogonal = False
                report.failures.append(
                    f"states {la},{lb}: orthogonal={orthogonal} but supports intersect={intersect}")
    return report


def make_rep(points: Iterable, F: Sequence, G: Sequence, dim: int = 2, name: str = "", **meta) -> QuasiRep:
    return QuasiRep(OnticSpace(tuple(points)), tuple(F), tuple(G), dim=dim, name=name, meta=meta)

