import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from qpr import certifier as cert
from qpr.families import FamilySpec, family_bases
from qpr.lp import check_farkas
from qpr.verify import random_coplanar_triple
from strategies import distinct_unit_vectors, rotations, seeds


def highs_feasible(problem) -> bool:
    A = np.array(problem.matrix(), dtype=float)
    b = np.array(problem.rhs(False), dtype=float)
    res = linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0




# -- fixed cases ---------------------------------------------------------------

def test_stabilizer_symmetric_quarter():
    c = cert.certify(family_bases(FamilySpec("stabilizer"), exact=True), "exact", symmetric=True)
    assert c.feasible and c.verify()
    assert set(c.q.values()) == {Fraction(1, 4)}
    assert c.frame_check == "passed"


def test_symmetry_group_of_xyz_has_48_elements():
    problem = cert.build_problem(family_bases(FamilySpec("stabilizer"), exact=True))
    assert len(cert.symmetry_group(problem)) == 48


def test_icosahedron_exact_farkas():
    c = cert.certify(family_bases(FamilySpec("icosahedron")), "exact")
    assert not c.feasible
    assert check_farkas(c.problem.matrix(), c.problem.rhs(True), c.farkas_vector(), exact=True)


def test_duplicate_bases_rejected():
    with pytest.raises(cert.DuplicateBasisError):
        cert.certify([[0, 0, 1], [0, 0, -1]])


def test_cube_exact_feasible_with_frame():
    theta = math.acos(1 / math.sqrt(3))
    c = cert.certify(family_bases(FamilySpec("cuboid", theta, math.pi / 4)), "exact")
    assert c.feasible and c.verify()
    assert c.frame_check.startswith("passed")


def test_d3_limit_plus_z_feasible():
    vecs = cert.d3_limit_with_z()
    assert cert.is_right_cuboid(vecs)
    assert cert.certify(vecs, "exact").feasible


def test_single_and_pair_always_feasible():
    assert cert.certify([[0.6, 0.0, 0.8]], "exact").feasible
    assert cert.certify([[0.6, 0.0, 0.8], [0.0, 0.6, 0.8]], "exact").feasible


def test_threshold_scan_no_threshold():
    with pytest.raises(cert.NoThresholdError):
        cert.threshold_scan(FamilySpec("d3", 0.2), "theta", 0.2, 0.5)


def test_threshold_scan_d3():
    theta = cert.threshold_scan(FamilySpec("d3", 0.5), "theta", 0.5, 1.5, tol=1e-10)
    assert abs(math.sin(theta) ** 2 - 8 / 9) < 1e-6


def test_bad_mode():
    with pytest.raises(ValueError):
        cert.certify([[0, 0, 1]], "interval")


def test_cuboid_grid_shape():
    grid = cert.cuboid_grid(20)
    assert len(grid) == 400
    assert all(0 < t < math.pi / 2 and 0 < p < math.pi / 2 for t, p in grid)


def test_right_cuboid_detection():
    assert cert.is_right_cuboid(cert.cuboid_vectors(0.7, 0.4))
    rng = np.random.default_rng(1)
    assert not cert.is_right_cuboid(cert.random_unit_vectors(rng, 4))


# -- oracle agreement ---------------------------------------------------------

@given(st.integers(1, 5), seeds)
def test_verdict_agrees_with_highs(n, seed):
    rng = np.random.default_rng(seed)
    vecs = cert.random_unit_vectors(rng, n)
    problem = cert.build_problem(vecs)
    c = cert.certify(vecs, "float", check_frame=False)
    assert c.feasible == highs_feasible(problem)
    assert c.verify()


@given(seeds)
def test_cuboids_agree_with_highs(seed):
    rng = np.random.default_rng(seed)
    theta, phi = rng.uniform(0.05, math.pi / 2 - 0.05, size=2)
    vecs = cert.cuboid_vectors(theta, phi) @ cert.random_rotation(rng).T
    assert highs_feasible(cert.build_problem(vecs))
    c = cert.certify(vecs, "exact")
    assert c.feasible and c.verify()


# -- invariants ----------------------------------------------------------------

@given(distinct_unit_vectors(3), rotations())
def test_rotation_invariance(vecs, rot):
    a = cert.certify(vecs, "float", check_frame=False).feasible
    b = cert.certify(vecs @ rot.T, "float", check_frame=False).feasible
    assert a == b


@given(distinct_unit_vectors(4), st.lists(st.booleans(), min_size=4, max_size=4))
def test_sign_flip_invariance(vecs, flips):
    signs = np.where(flips, -1.0, 1.0)[:, None]
    a = cert.certify(vecs, "float", check_frame=False).feasible
    b = cert.certify(vecs * signs, "float", check_frame=False).feasible
    assert a == b


@given(seeds)
def test_monotone_under_removal(seed):
    rng = np.random.default_rng(seed)
    theta, phi = rng.uniform(0.1, 1.4, size=2)
    vecs = cert.cuboid_vectors(theta, phi)
    for drop in range(4):
        assert cert.certify(np.delete(vecs, drop, axis=0), "float", check_frame=False).feasible


@given(seeds)
def test_coplanar_triples_infeasible_exact(seed):
    c = cert.certify(random_coplanar_triple(np.random.default_rng(seed)), "exact", check_frame=False)
    assert not c.feasible and c.verify()


@given(st.floats(0.2, 1.4))
def test_reflection_triples_infeasible(alpha):
    """r3 = 2 cos(alpha) r1 - r2 keeps every sign pattern realizable yet is infeasible."""
    r1 = np.array([1.0, 0.0, 0.0])
    r2 = np.array([math.cos(2 * alpha), math.sin(2 * alpha), 0.0])
    r3 = 2 * math.cos(alpha) * np.array([math.cos(alpha), math.sin(alpha), 0.0]) - r1
    r3 /= np.linalg.norm(r3)
    vecs = np.array([r1, r2, r3])
    if min(abs(abs(vecs[i] @ vecs[j]) - 1) for i in range(3) for j in range(i)) < 1e-3:
        return
    c = cert.certify(vecs, "exact", check_frame=False)
    assert not c.feasible and c.verify()
    assert not highs_feasible(c.problem)


@given(seeds)
def test_feasible_witness_satisfies_rows(seed):
    rng = np.random.default_rng(seed)
    vecs = cert.cuboid_vectors(*rng.uniform(0.1, 1.4, size=2))
    c = cert.certify(vecs, "float", check_frame=False)
    res = c.residuals()
    assert max(abs(v) for v in res["rows"].values()) < 1e-9
    assert res["min_q"] >= 0
