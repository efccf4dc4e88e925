"""Feasibility certificates for simultaneously non-negative qubit bases.

For N qubit bases with Bloch vectors r(1..N) the candidate ontic points are the
2^N sign patterns ``s``; point ``s`` is compatible with the element
``rho(j, s_j)`` of every basis.  A non-negative representation exists iff
there is ``q(s) >= 0`` with

* normalization: ``sum_{s_j = g} q(s) = 1`` for every element,
* overlaps: ``sum_{s_j1 = g1, s_j2 = g2} q(s) = (1 + g1 g2 r(j1).r(j2)) / 2``,
* realizability: ``q(s) = 0`` unless some vector ``d`` has ``d.r(j) = s_j``
  for all ``j`` (``mu`` is affine in the Bloch vector, so a point of positive
  weight must carry such a ``d``).

With spanning Bloch vectors these conditions are also sufficient: the overlap
rows give ``sum_s q(s) d(s) d(s)^T = 2 * 1``, which is exactly the dual-frame
condition of ``F = q/2 (1 + d.sigma)``, ``G = (1 + d.sigma)/2``.

Feasible problems return a vertex ``q``; infeasible ones return a Farkas
vector ``y`` with ``y^T A <= 0 < y^T b``, exact when solved over rationals.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from . import lp
from .families import (
    FamilySpec,
    FrameConstructionError,
    NoSolutionError,
    build_frame,
    family_bases,
    family_rep,
)
from .operator_core import BlochVector, QubitBasis, basis_from_bloch, to_sympy
from .quasirep import OnticDistribution, OnticSpace, check_dual_frame, lemma_structure_report

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
MODES = ("exact", "float")

DUPLICATE_TOL = 1e-12
REALIZABLE_TOL = 1e-9
GRAM_SYMMETRY_TOL = 1e-12
CUBOID_TOL = 1e-7


class DuplicateBasisError(ValueError):
    """Two input bases coincide as projector sets."""


class NoThresholdError(ValueError):
    """A scan interval has the same verdict at both ends."""


class NumericalFailure(RuntimeError):
    """The float solver did not converge; retry with ``mode='exact'``."""


# --------------------------------------------------------------------------
# problem


def pattern_str(s: Sequence[int]) -> str:
    return "".join("+" if v > 0 else "-" for v in s)


@dataclass(frozen=True)
class SupportPatternSpace:
    """All sign vectors in {+1, -1}^n, starting from (+, ..., +)."""

    n: int
    points: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one basis")
        object.__setattr__(self, "points", tuple(itertools.product((1, -1), repeat=self.n)))

    def __len__(self) -> int:
        return len(self.points)

    def compatible(self, j: int, gamma: int) -> tuple:
        """Indices of the points compatible with element ``(j, gamma)``."""
        return tuple(i for i, s in enumerate(self.points) if s[j] == gamma)


@dataclass(frozen=True)
class ConstraintRow:
    """One equality row: the sum of q over ``columns`` equals ``rhs``."""

    label: str
    kind: str  # "normalization" | "overlap" | "unrealizable"
    columns: tuple
    rhs: float
    rhs_exact: Fraction


def _directions(bases) -> list[BlochVector]:
    out = []
    for b in bases:
        if isinstance(b, QubitBasis):
            out.append(b.direction)
        elif isinstance(b, BlochVector):
            out.append(b)
        else:
            out.append(BlochVector(b))
    return out


def _exact_dot(a: BlochVector, b: BlochVector) -> Fraction:
    if a.exact and b.exact:
        return Fraction(sympy.Rational(sympy.nsimplify(to_sympy(a.dot(b)))))
    return lp.rationalize(float(np.dot(a.as_array(), b.as_array())))


def _realizable(directions: Sequence[BlochVector], points) -> tuple:
    """For each pattern s: does some d satisfy d . r(j) = s_j for all j?"""
    if all(r.exact for r in directions):
        R = sympy.Matrix([[to_sympy(c) for c in r.components] for r in directions])
        rank = R.rank()
        return tuple(R.row_join(sympy.Matrix(list(s))).rank() == rank for s in points)
    R = np.array([r.as_array() for r in directions])
    out = []
    for s in points:
        target = np.array(s, dtype=float)
        d, *_ = np.linalg.lstsq(R, target, rcond=None)
        out.append(bool(np.abs(R @ d - target).max() <= REALIZABLE_TOL))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FeasibilityProblem:
    """Equality system over q(s) >= 0, one variable per sign pattern."""

    directions: tuple
    space: SupportPatternSpace
    rows: tuple
    gram: np.ndarray = field(repr=False)
    gram_exact: tuple = field(repr=False)
    realizable: tuple = field(repr=False)

    @property
    def n_bases(self) -> int:
        return self.space.n

    @property
    def row_labels(self) -> list[str]:
        return [r.label for r in self.rows]

    def matrix(self) -> list[list[int]]:
        """Dense 0/1 constraint matrix, rows in ``self.rows`` order."""
        width = len(self.space)
        out = []
        for row in self.rows:
            line = [0] * width
            for c in row.columns:
                line[c] = 1
            out.append(line)
        return out

    def rhs(self, exact: bool) -> list:
        return [r.rhs_exact if exact else r.rhs for r in self.rows]

    @property
    def spans_space(self) -> bool:
        R = np.array([r.as_array() for r in self.directions])
        return int(np.linalg.matrix_rank(R, tol=1e-9)) == 3


def build_problem(bases: Sequence) -> FeasibilityProblem:
    """Normalization, overlap and realizability rows for ``bases``.

    Raises
    ------
    DuplicateBasisError
        If two Bloch vectors are parallel or antiparallel (|r.r'| >= 1 - 1e-12).
    """
    dirs = _directions(bases)
    n = len(dirs)
    space = SupportPatternSpace(n)
    R = np.array([r.as_array() for r in dirs])
    gram = R @ R.T
    for j1, j2 in itertools.combinations(range(n), 2):
        if abs(gram[j1, j2]) >= 1 - DUPLICATE_TOL:
            raise DuplicateBasisError(f"bases {j1} and {j2} coincide (|r.r'| = {abs(gram[j1, j2]):.15g})")
    gram_exact = tuple(tuple(Fraction(1) if a == b else _exact_dot(dirs[a], dirs[b]) for b in range(n))
                       for a in range(n))

    rows = []
    for j in range(n):
        for g in (1, -1):
            rows.append(ConstraintRow(f"norm[{j}{'+' if g > 0 else '-'}]", "normalization",
                                      space.compatible(j, g), 1.0, Fraction(1)))
    for j1, j2 in itertools.combinations(range(n), 2):
        for g1, g2 in itertools.product((1, -1), repeat=2):
            cols = tuple(i for i, s in enumerate(space.points) if s[j1] == g1 and s[j2] == g2)
            rhs = (1 + g1 * g2 * gram[j1, j2]) / 2
            rhs_exact = (1 + g1 * g2 * gram_exact[j1][j2]) / 2
            rows.append(ConstraintRow(f"overlap[{j1}{pattern_str([g1])},{j2}{pattern_str([g2])}]",
                                      "overlap", cols, float(rhs), Fraction(rhs_exact)))
    realizable = _realizable(dirs, space.points)
    for i, s in enumerate(space.points):
        if not realizable[i]:
            rows.append(ConstraintRow(f"zero[{pattern_str(s)}]", "unrealizable", (i,), 0.0, Fraction(0)))
    return FeasibilityProblem(tuple(dirs), space, tuple(rows), gram, gram_exact, realizable)


# --------------------------------------------------------------------------
# certificate


@dataclass
class FeasibilityCertificate:
    """Verdict plus witness.

    ``q`` maps sign patterns to weights when feasible; ``farkas`` maps row
    labels to multipliers when infeasible.  ``frame_check`` records the
    independent frame reconstruction (``"passed"``, ``"failed: ..."`` or
    ``"skipped: ..."``).  ``rhs_shift`` is the largest change made to a
    dependent right-hand side to restore exact consistency after rounding
    irrational inputs to rationals (always 0 for rational inputs).
    """

    verdict: str
    mode: str
    problem: FeasibilityProblem = field(repr=False)
    q: dict | None = None
    farkas: dict | None = None
    frame_check: str = "skipped"
    symmetrized: bool = False
    pivots: int = 0
    rhs_shift: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def q_vector(self) -> list:
        return [self.q[s] for s in self.problem.space.points]

    def farkas_vector(self) -> list:
        return [self.farkas[label] for label in self.problem.row_labels]

    def residuals(self) -> dict:
        """Per-row residuals (feasible) or the Farkas margins (infeasible)."""
        A = self.problem.matrix()
        b = self.problem.rhs(self.exact)
        if self.feasible:
            x = self.q_vector()
            res = {row.label: sum(x[c] for c in row.columns) - rhs for row, rhs in zip(self.problem.rows, b)}
            return {"rows": res, "min_q": min(x)}
        y = self.farkas_vector()
        yA = [sum(y[i] * A[i][k] for i in range(len(A))) for k in range(len(A[0]))]
        return {"max_yA": max(yA), "yb": sum(yi * bi for yi, bi in zip(y, b))}

    def verify(self, tol: float = 1e-9) -> bool:
        """Re-check the witness against the full constraint system."""
        A = self.problem.matrix()
        b = self.problem.rhs(self.exact)
        if self.feasible:
            return lp.check_solution(A, b, self.q_vector(), exact=self.exact, tol=tol) <= (0 if self.exact else tol)
        return lp.check_farkas(A, b, self.farkas_vector(), exact=self.exact, tol=tol)


SNAP_TOL = 1e-9


@functools.lru_cache(maxsize=256)
def _row_dependencies(n: int, realizable: tuple) -> tuple:
    """Split the non-zero rows into an independent subset and the rest.

    Works on the exact 0/1 matrix restricted to realizable columns.  Returns
    ``(keep, deps)`` where ``deps[r]`` maps kept rows ``k`` to coefficients
    with ``A_r = sum_k c_k A_k`` on the realizable columns.
    """
    problem_rows = _structural_rows(n)
    cols = [i for i, ok in enumerate(realizable) if ok]
    basis = []
    keep, deps = [], {}
    for r, columns in enumerate(problem_rows):
        vec = [Fraction(1 if c in columns else 0) for c in cols]
        combo = {r: Fraction(1)}
        for piv, bvec, bcombo in basis:
            f = vec[piv]
            if f:
                vec = [a - f * b for a, b in zip(vec, bvec)]
                for k, c in bcombo.items():
                    combo[k] = combo.get(k, Fraction(0)) - f * c
        piv = next((i for i, v in enumerate(vec) if v), None)
        if piv is None:
            deps[r] = tuple((k, -c) for k, c in combo.items() if k != r and c)
        else:
            f = vec[piv]
            basis.append((piv, [v / f for v in vec], {k: c / f for k, c in combo.items()}))
            keep.append(r)
    return tuple(keep), deps


@functools.lru_cache(maxsize=16)
def _structural_rows(n: int) -> tuple:
    """Column sets of the normalization and overlap rows, in problem order."""
    space = SupportPatternSpace(n)
    rows = [space.compatible(j, g) for j in range(n) for g in (1, -1)]
    for j1, j2 in itertools.combinations(range(n), 2):
        for g1, g2 in itertools.product((1, -1), repeat=2):
            rows.append(tuple(i for i, s in enumerate(space.points) if s[j1] == g1 and s[j2] == g2))
    return tuple(frozenset(r) for r in rows)


def _lift_farkas(problem: FeasibilityProblem, y_rows: dict, exact: bool) -> dict:
    """Extend multipliers on normalization/overlap rows to the full system.

    The q(s) = 0 rows of unrealizable patterns absorb any positive column sum.
    """
    zero = Fraction(0) if exact else 0.0
    y = [y_rows.get(k, zero) for k in range(len(problem.rows))]
    col_sum = [zero] * len(problem.space)
    for k, v in y_rows.items():
        for c in problem.rows[k].columns:
            col_sum[c] += v
    for k, row in enumerate(problem.rows):
        if row.kind == "unrealizable":
            (c,) = row.columns
            y[k] = -max(zero, col_sum[c])
    if not exact:
        y = [float(v) for v in y]
    return dict(zip(problem.row_labels, y))


def _snap_rhs(problem: FeasibilityProblem, exact: bool):
    """Check (and in exact mode enforce) consistency of the dependent rows.

    Returns ``(problem, keep, shift, witness)``: the possibly adjusted problem,
    the independent rows, the largest right-hand-side adjustment, and a Farkas
    multiplier dict when some dependent row is inconsistent beyond
    ``SNAP_TOL`` (or at all, for exactly rational inputs).
    """
    keep, deps = _row_dependencies(problem.n_bases, problem.realizable)
    b = problem.rhs(exact)
    exact_input = all(r.exact for r in problem.directions)
    tol = 0 if exact and exact_input else SNAP_TOL
    rows = list(problem.rows)
    shift = 0.0
    for r, combo in deps.items():
        implied = sum((c * b[k] for k, c in combo), Fraction(0) if exact else 0.0)
        gap = b[r] - implied
        if abs(gap) > tol:
            sign = 1 if gap > 0 else -1
            y = {r: Fraction(sign) if exact else float(sign)}
            for k, c in combo:
                y[k] = -sign * (c if exact else float(c))
            return problem, keep, shift, y
        if exact and gap:
            shift = max(shift, abs(float(gap)))
            rows[r] = replace(rows[r], rhs_exact=Fraction(implied))
    if shift:
        problem = replace(problem, rows=tuple(rows))
    return problem, keep, shift, None


def symmetry_group(problem: FeasibilityProblem) -> list[tuple]:
    """Signed permutations (perm, signs) of the bases preserving the Gram matrix.

    ``(perm, signs)`` sends basis ``j`` to ``perm[j]`` with its elements
    relabeled by ``signs[j]``; every such map permutes the constraint rows, so
    it is a symmetry of the feasibility problem.
    """
    n = problem.n_bases
    exact_input = all(r.exact for r in problem.directions)
    G = problem.gram_exact if exact_input else problem.gram
    tol = 0 if exact_input else GRAM_SYMMETRY_TOL
    out = []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            if all(abs(signs[a] * signs[b] * G[perm[a]][perm[b]] - G[a][b]) <= tol
                   for a in range(n) for b in range(a + 1, n)):
                out.append((perm, signs))
    return out


def _act(g, s: tuple) -> tuple:
    perm, signs = g
    out = [0] * len(s)
    for j, v in enumerate(s):
        out[perm[j]] = signs[j] * v
    return tuple(out)


def symmetrize(q: dict, problem: FeasibilityProblem) -> dict:
    """Average ``q`` over the problem's symmetry group; stays feasible."""
    group = symmetry_group(problem)
    exact = all(isinstance(v, Fraction) for v in q.values())
    out = {}
    for s in problem.space.points:
        total = sum((q[_act(g, s)] for g in group), Fraction(0) if exact else 0.0)
        out[s] = total / len(group)
    return out


def _frame_check(problem: FeasibilityProblem, bases, q: dict) -> str:
    n = problem.n_bases
    try:
        if n <= 2:
            return _small_set_check(problem)
        if not problem.spans_space:
            return "skipped: Bloch vectors do not span R^3"
        qbases = [b if isinstance(b, QubitBasis) else basis_from_bloch(b) for b in bases]
        exact_dirs = all(b.direction.exact for b in qbases)
        pts = [s for s in problem.space.points if q[s] > 0]
        values = tuple(q[s] if exact_dirs else float(q[s]) for s in pts)
        dist = OnticDistribution(OnticSpace(tuple(pts)), values)
        rep = build_frame(qbases, dist, {s: s for s in pts}, name="certified")
        report = lemma_structure_report(rep, qbases, tol=1e-8)
        return "passed" if report.ok else "failed: " + "; ".join(report.failures[:3])
    except (NoSolutionError, FrameConstructionError) as exc:
        return f"failed: {exc}"


def _small_set_check(problem: FeasibilityProblem) -> str:
    """One or two bases: compare with the explicit single/pair constructions."""
    if problem.n_bases == 1:
        rep = family_rep(FamilySpec("single"))
    else:
        angle = math.acos(max(-1.0, min(1.0, float(problem.gram[0, 1]))))
        rep = family_rep(FamilySpec("pair", theta=angle / 2))
    return "passed (explicit construction)" if check_dual_frame(rep, tol=1e-8).ok else "failed: construction"


def certify(bases: Sequence, mode: str = "exact", *, symmetric: bool = False,
            check_frame: bool = True, tol: float = 1e-9) -> FeasibilityCertificate:
    """Decide whether ``bases`` can all be non-negative in one representation.

    Parameters
    ----------
    bases
        QubitBasis objects, BlochVectors or 3-sequences (unit Bloch vectors).
    mode
        ``"exact"`` solves over rationals (inputs rationalized at 1e-12);
        ``"float"`` uses 64-bit floats with tolerance ``tol``.
    symmetric
        Replace the simplex vertex by its average over the symmetry group.
    check_frame
        Rebuild and check the frame from a feasible ``q``.

    Raises
    ------
    NumericalFailure
        Float-mode pivot budget exhausted.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    exact = mode == "exact"
    problem, keep, shift, witness = _snap_rhs(build_problem(bases), exact)
    if witness is not None:
        return FeasibilityCertificate(INFEASIBLE, mode, problem, farkas=_lift_farkas(problem, witness, exact))
    cols = [i for i, ok in enumerate(problem.realizable) if ok]
    b = problem.rhs(exact)
    A = [[1 if c in problem.rows[k].columns else 0 for c in cols] for k in keep]
    try:
        res = lp.solve_lp(A, [b[k] for k in keep], exact=exact, tol=tol)
    except lp.PivotLimitError as exc:
        raise NumericalFailure(f"{exc}; retry with mode='exact'") from exc
    zero = Fraction(0) if exact else 0.0
    if not res.feasible:
        farkas = _lift_farkas(problem, dict(zip(keep, res.farkas)), exact)
        return FeasibilityCertificate(INFEASIBLE, mode, problem, farkas=farkas, pivots=res.pivots,
                                      rhs_shift=shift)
    q = {s: zero for s in problem.space.points}
    for c, v in zip(cols, res.x):
        q[problem.space.points[c]] = v
    if symmetric:
        q = symmetrize(q, problem)
    cert = FeasibilityCertificate(FEASIBLE, mode, problem, q=q, symmetrized=symmetric, pivots=res.pivots,
                                  rhs_shift=shift)
    if check_frame:
        cert.frame_check = _frame_check(problem, bases, q)
    return cert


# --------------------------------------------------------------------------
# scans and empirical checks


def threshold_scan(template: FamilySpec, parameter: str, lo: float, hi: float,
                   tol: float = 1e-9, mode: str = "float") -> float:
    """Bisect the feasibility boundary of a family along ``parameter``.

    Raises
    ------
    NoThresholdError
        If ``lo`` and ``hi`` give the same verdict.
    """
    if parameter not in ("theta", "phi"):
        raise ValueError(f"parameter must be 'theta' or 'phi', got {parameter!r}")

    def feasible(x: float) -> bool:
        spec = replace(template, **{parameter: x})
        return certify(family_bases(spec), mode, check_frame=False).feasible

    f_lo, f_hi = feasible(lo), feasible(hi)
    if f_lo == f_hi:
        raise NoThresholdError(
            f"{'feasible' if f_lo else 'infeasible'} at both {parameter} = {lo:.9g} and {hi:.9g}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if feasible(mid) == f_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def is_right_cuboid(vectors: Sequence, tol: float = CUBOID_TOL) -> bool:
    """Do the eight points +-r(1..4) form the vertices of a right cuboid?

    Antipodal pairs are matched by sign choices v_j = t_j r_j with
    sum v_j = 0; then a, b, c = (v1+v2)/2, (v1+v3)/2, (v1+v4)/2 must be
    nonzero and mutually orthogonal (and v = +-a +-b +-c).
    """
    rs = [r.as_array() for r in _directions(vectors)]
    if len(rs) != 4:
        return False
    for signs in itertools.product((1, -1), repeat=3):
        v = [rs[0]] + [t * r for t, r in zip(signs, rs[1:])]
        if np.abs(sum(v)).max() > tol:
            continue
        edges = np.array([(v[0] + v[k]) / 2 for k in (1, 2, 3)])
        gram = edges @ edges.T
        off = gram - np.diag(np.diag(gram))
        if np.abs(off).max() <= tol and np.diag(gram).min() > tol:
            return True
    return False


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(3)."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def cuboid_vectors(theta: float, phi: float) -> np.ndarray:
    return np.array([b.direction.as_array() for b in family_bases(FamilySpec("cuboid", theta, phi))])


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@dataclass
class CuboidReport:
    trials: int = 0
    feasible: int = 0
    feasible_non_cuboid: list = field(default_factory=list)
    grid_points: int = 0
    grid_feasible: int = 0
    random_cuboids: int = 0
    random_cuboids_feasible: int = 0
    perturbed: int = 0
    perturbed_infeasible: int = 0

    @property
    def ok(self) -> bool:
        return (not self.feasible_non_cuboid and self.grid_feasible == self.grid_points
                and self.random_cuboids_feasible == self.random_cuboids
                and self.perturbed_infeasible == self.perturbed)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "trials": self.trials, "feasible": self.feasible,
                "feasible_non_cuboid": len(self.feasible_non_cuboid),
                "grid_points": self.grid_points, "grid_feasible": self.grid_feasible,
                "random_cuboids": self.random_cuboids, "random_cuboids_feasible": self.random_cuboids_feasible,
                "perturbed": self.perturbed, "perturbed_infeasible": self.perturbed_infeasible}


def cuboid_grid(size: int = 20) -> list[tuple]:
    """Interior grid of (theta, phi) in the open square (0, pi/2)^2."""
    step = (math.pi / 2) / (size + 1)
    return [((i + 1) * step, (k + 1) * step) for i in range(size) for k in range(size)]


def verify_cuboid_classification(trials: int = 1000, seed: int = 0, grid: int = 20,
                                 extra: int = 50, mode: str = "float") -> CuboidReport:
    """Every feasible quadruple is a right cuboid; cuboids are feasible."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rep = CuboidReport()
    for i in range(trials):
        vecs = random_unit_vectors(_trial_rng(seed, i), 4)
        rep.trials += 1
        if certify(vecs, mode, check_frame=False).feasible:
            rep.feasible += 1
            if not is_right_cuboid(vecs):
                rep.feasible_non_cuboid.append(vecs.tolist())
    for theta, phi in cuboid_grid(grid):
        rep.grid_points += 1
        rep.grid_feasible += certify(cuboid_vectors(theta, phi), mode, check_frame=False).feasible
    for i in range(extra):
        rng = _trial_rng(seed + 1, i)
        theta, phi = rng.uniform(0.05, math.pi / 2 - 0.05, size=2)
        rot = random_rotation(rng)
        vecs = cuboid_vectors(theta, phi) @ rot.T
        rep.random_cuboids += 1
        rep.random_cuboids_feasible += certify(vecs, mode, check_frame=False).feasible
        # tilt one vector off the cuboid by a small rotation
        axis = random_unit_vectors(rng, 1)[0]
        angle = 10 ** rng.uniform(-5, -2)
        k = int(rng.integers(4))
        bent = vecs.copy()
        bent[k] = _rodrigues(bent[k], axis, angle)
        rep.perturbed += 1
        rep.perturbed_infeasible += not certify(bent, mode, check_frame=False).feasible
    return rep


def _rodrigues(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    axis = axis / np.linalg.norm(axis)
    return (v * math.cos(angle) + np.cross(axis, v) * math.sin(angle)
            + axis * np.dot(axis, v) * (1 - math.cos(angle)))


@dataclass
class MaxBasesReport:
    random_sets: int = 0
    random_infeasible: int = 0
    constructions: int = 0
    constructions_infeasible: int = 0
    d3_fourth_basis_feasible: bool = False
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.random_infeasible == self.random_sets
                and self.constructions_infeasible == self.constructions and self.d3_fourth_basis_feasible)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "random_sets": self.random_sets, "random_infeasible": self.random_infeasible,
                "constructions": self.constructions, "constructions_infeasible": self.constructions_infeasible,
                "d3_fourth_basis_feasible": self.d3_fourth_basis_feasible, "failures": len(self.failures)}


def d3_limit_with_z() -> np.ndarray:
    """The three d3 bases at sin^2(theta) = 8/9 together with the z basis."""
    theta = math.asin(math.sqrt(8 / 9))
    vecs = [b.direction.as_array() for b in family_bases(FamilySpec("d3", theta))]
    return np.array(vecs + [np.array([0.0, 0.0, 1.0])])


def verify_max_bases(trials: int = 500, seed: int = 0, mode: str = "float") -> MaxBasesReport:
    """No five bases are simultaneously non-negative."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rep = MaxBasesReport()
    for i in range(trials):
        vecs = random_unit_vectors(_trial_rng(seed, i), 5)
        rep.random_sets += 1
        if certify(vecs, mode, check_frame=False).feasible:
            rep.failures.append(vecs.tolist())
        else:
            rep.random_infeasible += 1

    cube = cuboid_vectors(math.acos(1 / math.sqrt(3)), math.pi / 4)
    extras = [np.eye(3)[k] for k in range(3)]
    constructions = [np.vstack([cube, e]) for e in extras]
    for theta, phi in cuboid_grid(4):
        base = cuboid_vectors(theta, phi)
        constructions += [np.vstack([base, e]) for e in extras]
        # the sum of two half-edge directions is another natural candidate
        constructions.append(np.vstack([base, (base[0] + base[1]) / np.linalg.norm(base[0] + base[1])]))
    for i in range(20):
        rng = _trial_rng(seed + 1, i)
        theta, phi = rng.uniform(0.05, math.pi / 2 - 0.05, size=2)
        constructions.append(np.vstack([cuboid_vectors(theta, phi), random_unit_vectors(rng, 1)]))
    for vecs in constructions:
        rep.constructions += 1
        if certify(vecs, mode, check_frame=False).feasible:
            rep.failures.append(vecs.tolist())
        else:
            rep.constructions_infeasible += 1
    rep.d3_fourth_basis_feasible = certify(d3_limit_with_z(), mode, check_frame=False).feasible
    return rep
