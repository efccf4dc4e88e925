"""Acceptance criteria, one test each, at the stated scales and tolerances.

Every test prints a single ``PASS``/``FAIL`` line; the lines are repeated in
the terminal summary so they are visible without ``-s``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from qpr import certifier as cert
from qpr.families import FamilySpec, d3_distribution, d3_q0_range, family_bases, family_rep
from qpr.lp import check_farkas
from qpr.ontic_sim import (
    GAMMA_GATE,
    PI_GATE,
    clifford_group,
    d3_model,
    epsilon_flip,
    find_permutation,
    not_gate_is_unitary,
    run_circuit,
    stabilizer_model,
    supervenes,
    universal_not_check,
)
from qpr.quasirep import born_residual, check_dual_frame
from qpr.qudit import BasisFamily, check_theorem4_relation, is_disparate, mub_bases, pattern_bound
from qpr.verify import (
    FRAME_KINDS,
    family_parameter_points,
    random_circuit,
    random_coplanar_triple,
    random_effect,
    random_pure_state,
)

SEED = 20240611
RESULTS: list = []


@pytest.fixture
def report():
    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
        RESULTS.append(line)
        print(line)
        assert ok, line
    return record


def highs_feasible(problem) -> bool:
    A = np.array(problem.matrix(), dtype=float)
    b = np.array(problem.rhs(False), dtype=float)
    return linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=b, bounds=(0, None), method="highs").status == 0


def test_01_d3_threshold(report):
    start = time.perf_counter()
    theta = cert.threshold_scan(FamilySpec("d3", 0.5), "theta", 0.5, 1.5, tol=1e-10)
    elapsed = time.perf_counter() - start
    err = abs(math.sin(theta) ** 2 - 8 / 9)
    report(1, "D3 threshold sin^2 = 8/9", err <= 1e-6 and elapsed < 10, f"err {err:.2e}, {elapsed:.2f} s")


def test_02_c2_thresholds(report):
    errs = []
    for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
        phi = cert.threshold_scan(FamilySpec("c2", theta, 1.0), "phi", 0.01, math.pi / 2, tol=1e-10)
        errs.append(abs(math.cos(phi) - math.sin(theta)))
    report(2, "C2 thresholds cos(phi) = sin(theta)", max(errs) <= 1e-6, f"max err {max(errs):.2e}")


def test_03_stabilizer_uniform(report):
    c = cert.certify(family_bases(FamilySpec("stabilizer"), exact=True), "exact", symmetric=True)
    ok = c.feasible and c.exact and c.verify() and set(c.q.values()) == {Fraction(1, 4)}
    report(3, "X, Y, Z feasible with q = 1/4 exactly", ok, f"frame {c.frame_check}")


def test_04_coplanar_triples(report):
    rng = np.random.default_rng([SEED, 4])
    bad = 0
    for _ in range(500):
        c = cert.certify(random_coplanar_triple(rng), "exact", check_frame=False)
        ok = (not c.feasible and c.exact
              and check_farkas(c.problem.matrix(), c.problem.rhs(True), c.farkas_vector(), exact=True))
        bad += not ok
    report(4, "500 coplanar triples infeasible with exact Farkas witnesses", bad == 0, f"{bad} exceptions")


def test_05_cuboid_classification(report):
    rep = cert.verify_cuboid_classification(trials=1000, seed=SEED, grid=20)
    # the independent LP oracle agrees on the random quadruples' verdicts
    disagreements = 0
    for i in range(200):
        vecs = cert.random_unit_vectors(np.random.default_rng([SEED, i]), 4)
        disagreements += cert.certify(vecs, "float", check_frame=False).feasible != highs_feasible(
            cert.build_problem(vecs))
    ok = rep.ok and rep.grid_points == 400 and rep.grid_feasible == 400 and disagreements == 0
    report(5, "feasible quadruples are right cuboids; 20x20 cuboid grid feasible", ok,
           f"{rep.feasible}/1000 feasible, {len(rep.feasible_non_cuboid)} non-cuboid, "
           f"grid {rep.grid_feasible}/{rep.grid_points}")


def test_06_five_bases(report):
    rep = cert.verify_max_bases(trials=500, seed=SEED)
    ok = rep.random_infeasible == rep.random_sets == 500 and rep.constructions_infeasible == rep.constructions
    report(6, "500 random 5-sets and cuboid+1 constructions infeasible", ok,
           f"{rep.random_infeasible}/500 random, {rep.constructions_infeasible}/{rep.constructions} constructions")


def test_07_icosahedron(report):
    c = cert.certify(family_bases(FamilySpec("icosahedron")), "exact")
    ok = (not c.feasible and c.exact
          and check_farkas(c.problem.matrix(), c.problem.rhs(True), c.farkas_vector(), exact=True)
          and not highs_feasible(c.problem))
    report(7, "icosahedron infeasible with exact witness", ok)


def test_08_frames(report):
    rng = np.random.default_rng([SEED, 8])
    worst_dual = worst_born = 0.0
    failures = 0
    for kind in FRAME_KINDS:
        for spec in family_parameter_points(kind, rng, 10):
            rep = family_rep(spec)
            dual = check_dual_frame(rep, tol=1e-9)
            born = max(float(born_residual(rep, random_pure_state(rng), random_effect(rng))) for _ in range(100))
            worst_dual, worst_born = max(worst_dual, dual.max_deviation), max(worst_born, born)
            failures += (not dual.ok) or born > 1e-10
    report(8, "family frames are dual frames reproducing the Born rule", failures == 0,
           f"max dual dev {worst_dual:.1e}, max Born residual {worst_born:.1e}")


def test_09_supervenience(report):
    model = stabilizer_model()
    cliffords = sum(find_permutation(u, model) is not None for u in clifford_group())
    rng = np.random.default_rng([SEED, 9])
    gamma_ok = pi_ok = True
    for theta in rng.uniform(0.1, math.asin(math.sqrt(8 / 9)) - 1e-3, size=8):
        sym = d3_model(theta)
        perm = find_permutation(GAMMA_GATE, sym)
        gamma_ok &= perm is not None
        pi_ok &= find_permutation(PI_GATE, sym) is not None
        lo, hi = d3_q0_range(theta)
        sym_q0 = float(d3_distribution(theta)[(1, 0)])
        for t in (0.1, 0.9):
            q0 = lo + t * (hi - lo)
            if abs(q0 - sym_q0) < 1e-6:
                continue
            general = d3_model(theta, q0=q0)
            gamma_ok &= perm is not None and supervenes(perm, GAMMA_GATE, general)
            pi_ok &= find_permutation(PI_GATE, general) is None
    flip = epsilon_flip(model.rep.space)
    not_ok = universal_not_check(model) and flip.compose(flip).is_identity() and not not_gate_is_unitary(model)
    ok = cliffords == 24 and gamma_ok and pi_ok and not_ok
    report(9, "supervenience: Cliffords, Gamma generic, Pi symmetric only, eps-flip NOT", ok,
           f"{cliffords}/24 Cliffords")


def test_10_circuits(report):
    rng = np.random.default_rng([SEED, 10])
    model = stabilizer_model()
    states, bases = sorted(model.states), sorted(model.bases)
    worst = 0.0
    for _ in range(100):
        r = run_circuit(model, states[int(rng.integers(len(states)))], random_circuit(rng, model.gates, 6),
                        bases[int(rng.integers(len(bases)))])
        worst = max(worst, r.max_deviation)
    report(10, "100 random circuits: ontic = quantum statistics", worst <= 1e-10, f"max dev {worst:.1e}")


def test_11_qudit(report):
    xyz = BasisFamily(tuple(family_bases(FamilySpec("stabilizer"), exact=True)))
    mub3 = BasisFamily(tuple(mub_bases(3)[:3]))
    disparate = is_disparate(xyz) and is_disparate(mub3)
    t4 = check_theorem4_relation(BasisFamily(tuple(family_bases(FamilySpec("cuboid", 0.7, 0.4)))))
    rel = t4.details["relabelings"]
    eps_ok = t4.holds and all(abs(r["eps"] - 1 / 3) < 1e-9 for r in rel)
    s_ok = all(abs(v - 1 / 3) < 1e-9 for r in rel for row in r["p"] for v in row if v > 1e-9)
    bound = pattern_bound(2)
    realized = max(pattern_bound(2, r).observed for r in (
        family_rep(FamilySpec("stabilizer")), family_rep(FamilySpec("d3", 1.0)),
        family_rep(FamilySpec("c2", 1.0, 1.3)), family_rep(FamilySpec("cuboid", 0.7, 0.4))))
    ok = disparate and eps_ok and s_ok and bound.bound == 16 and bound.refined == 14 and realized == 8
    report(11, "qudit: disparateness, eps = 1/3 with s_j = 1/3, pattern bound 16/14/8", ok,
           f"bound {bound.bound}, refined {bound.refined}, realized {realized}")


def test_12_d3_limit(report):
    theta = math.asin(math.sqrt(8 / 9))
    q0 = float(d3_distribution(theta)[(1, 0)])
    c = cert.certify(cert.d3_limit_with_z(), "exact")
    ok = abs(q0) < 1e-12 and c.feasible and c.verify()
    report(12, "D3 at sin^2 = 8/9 has q0 = 0 and admits the z basis", ok, f"q0 = {q0:.1e}")
