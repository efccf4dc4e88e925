"""Deterministic verification suite over the qubit and qudit results.

Each check returns a plain dict with a ``pass`` flag; :func:`run_suite`
collects them into a report whose numbers are all mode-tagged.  Random
inputs come from per-check generators seeded by ``(seed, check index)``, so
equal seeds give byte-identical reports.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from . import certifier as cert
from .documents import tag_numbers
from .families import (
    FamilySpec,
    d3_distribution,
    d3_q0_range,
    family_bases,
    family_rep,
    stabilizer_rep,
)
from .ontic_sim import (
    GAMMA_GATE,
    PI_GATE,
    clifford_group,
    d3_model,
    epsilon_flip,
    find_permutation,
    run_circuit,
    stabilizer_model,
    supervenes,
    universal_not_check,
)
from .operator_core import HermitianOp, basis_from_bloch
from .quasirep import born_residual, check_dual_frame
from .qudit import (
    BasisFamily,
    check_theorem3,
    check_theorem4_relation,
    is_disparate,
    mub_bases,
    pattern_bound,
    theorem5_bound,
)

SUITES = ("all", "qubit", "qudit")
FRAME_KINDS = ("single", "pair", "d3", "c2", "cuboid", "stabilizer")
D3_LIMIT = math.asin(math.sqrt(8 / 9))


# --------------------------------------------------------------------------
# random inputs


def random_pure_state(rng: np.random.Generator, d: int = 2) -> HermitianOp:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    return HermitianOp(np.outer(v, v.conj()))


def random_effect(rng: np.random.Generator, d: int = 2) -> HermitianOp:
    """Random 0 <= E <= 1."""
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    u, _ = np.linalg.qr(m)
    return HermitianOp(u @ np.diag(rng.uniform(0, 1, size=d)) @ u.conj().T)


def random_coplanar_triple(rng: np.random.Generator) -> np.ndarray:
    """Three distinct unit vectors in a random plane through the origin."""
    normal = cert.random_unit_vectors(rng, 1)[0]
    u = np.cross(normal, [1.0, 0.0, 0.0])
    if np.linalg.norm(u) < 0.1:
        u = np.cross(normal, [0.0, 1.0, 0.0])
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    while True:
        angles = rng.uniform(0, math.pi, size=3)
        diffs = [abs(math.cos(a - b)) for a, b in ((angles[0], angles[1]), (angles[0], angles[2]),
                                                   (angles[1], angles[2]))]
        if max(diffs) < 1 - 1e-6:
            break
    return np.array([math.cos(a) * u + math.sin(a) * v for a in angles])


def family_parameter_points(kind: str, rng: np.random.Generator, count: int) -> list[FamilySpec]:
    """``count`` in-range parameter points of a family (d3/c2 include general q0)."""
    out = []
    for i in range(count):
        if kind in ("single", "stabilizer"):
            out.append(FamilySpec(kind))
        elif kind == "pair":
            out.append(FamilySpec(kind, theta=rng.uniform(0.05, math.pi / 2 - 0.05)))
        elif kind == "d3":
            theta = rng.uniform(0.05, D3_LIMIT)
            if i % 2:
                theta = math.pi - theta
            q0 = None
            if i % 3 == 2:
                lo, hi = d3_q0_range(theta)
                q0 = rng.uniform(lo, hi)
            out.append(FamilySpec(kind, theta=theta, q0=q0))
        elif kind == "c2":
            theta = rng.uniform(0.05, math.pi / 2 - 0.05)
            lim = math.acos(math.sin(theta))
            phi = rng.uniform(lim, math.pi - lim)
            q0 = None
            if i % 3 == 2:
                s, cp, c2t = math.sin(theta), abs(math.cos(phi)), math.cos(2 * theta)
                lo = max(0.0, c2t / 2 + cp * s / 2)
                hi = min(math.cos(theta) ** 2, 0.5 - cp * s / 2)
                q0 = rng.uniform(lo, hi)
            out.append(FamilySpec(kind, theta=theta, phi=phi, q0=q0))
        elif kind == "cuboid":
            theta, phi = rng.uniform(0.05, math.pi / 2 - 0.05, size=2)
            out.append(FamilySpec(kind, theta=float(theta), phi=float(phi)))
        else:
            raise ValueError(f"no frame for family {kind!r}")
    return out


def random_circuit(rng: np.random.Generator, gates, max_len: int = 6) -> list[str]:
    names = sorted(gates)
    return [names[int(k)] for k in rng.integers(len(names), size=int(rng.integers(1, max_len + 1)))]


# --------------------------------------------------------------------------
# qubit checks


def check_d3_threshold(rng, trials) -> dict:
    theta = cert.threshold_scan(FamilySpec("d3", 0.5), "theta", 0.5, 1.5, tol=1e-10)
    s2 = math.sin(theta) ** 2
    return {"name": "d3_threshold", "sin2_theta": s2, "target": Fraction(8, 9),
            "pass": abs(s2 - 8 / 9) <= 1e-6}


def check_c2_thresholds(rng, trials) -> dict:
    rows = []
    for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
        phi = cert.threshold_scan(FamilySpec("c2", theta, 1.0), "phi", 0.01, math.pi / 2, tol=1e-10)
        rows.append({"theta": theta, "cos_phi": math.cos(phi), "sin_theta": math.sin(theta),
                     "pass": abs(math.cos(phi) - math.sin(theta)) <= 1e-6})
    return {"name": "c2_thresholds", "points": rows, "pass": all(r["pass"] for r in rows)}


def check_stabilizer_uniform(rng, trials) -> dict:
    c = cert.certify(family_bases(FamilySpec("stabilizer"), exact=True), "exact", symmetric=True)
    values = sorted(set(c.q.values())) if c.feasible else []
    return {"name": "stabilizer_uniform", "verdict": c.verdict, "q_values": values,
            "pass": c.feasible and values == [Fraction(1, 4)] and c.verify()}


def check_theorem1(rng, trials) -> dict:
    bad = 0
    for _ in range(trials):
        c = cert.certify(random_coplanar_triple(rng), "exact", check_frame=False)
        bad += c.feasible or not c.verify()
    return {"name": "theorem1_coplanar", "trials": trials, "exceptions": bad, "pass": bad == 0}


def check_theorem2(rng, trials, seed) -> dict:
    rep = cert.verify_cuboid_classification(trials, seed)
    return {"name": "theorem2_cuboid", **rep.as_dict(), "pass": rep.ok}


def check_five_bases(rng, trials, seed) -> dict:
    rep = cert.verify_max_bases(trials, seed)
    return {"name": "five_bases", **rep.as_dict(), "pass": rep.ok}


def check_icosahedron(rng, trials) -> dict:
    c = cert.certify(family_bases(FamilySpec("icosahedron")), "exact")
    return {"name": "icosahedron", "verdict": c.verdict, "witness_verified": c.verify(),
            "pass": (not c.feasible) and c.verify()}


def check_frames(rng, trials, points: int = 10, pairs: int = 100) -> dict:
    worst_dual, worst_born, failures = 0.0, 0.0, 0
    for kind in FRAME_KINDS:
        for spec in family_parameter_points(kind, rng, points):
            rep = family_rep(spec)
            dual = check_dual_frame(rep, tol=1e-9)
            worst_dual = max(worst_dual, dual.max_deviation)
            born = max(float(born_residual(rep, random_pure_state(rng), random_effect(rng))) for _ in range(pairs))
            worst_born = max(worst_born, born)
            failures += (not dual.ok) or born > 1e-10
    return {"name": "frames", "families": list(FRAME_KINDS), "max_dual_deviation": worst_dual,
            "max_born_residual": worst_born, "failures": failures, "pass": failures == 0}


def check_supervenience(rng, trials) -> dict:
    model = stabilizer_model()
    cliffords = sum(find_permutation(u, model) is not None for u in clifford_group())
    gamma_ok, pi_ok = True, True
    for spec in family_parameter_points("d3", rng, 6):
        theta = spec.theta
        sym = d3_model(theta)
        gamma_ok &= find_permutation(GAMMA_GATE, sym) is not None
        pi_ok &= find_permutation(PI_GATE, sym) is not None
        lo, hi = d3_q0_range(theta)
        sym_q0 = float(d3_distribution(theta)[(1, 0)])
        q0 = lo + 0.25 * (hi - lo) if abs(lo + 0.25 * (hi - lo) - sym_q0) > 1e-3 else lo + 0.75 * (hi - lo)
        general = d3_model(theta, q0=q0)
        gamma_ok &= supervenes(sym.gate("GAMMA").permutation, GAMMA_GATE, general)
        pi_ok &= find_permutation(PI_GATE, general) is None
    not_ok = universal_not_check(model) and epsilon_flip(model.rep.space).compose(
        epsilon_flip(model.rep.space)).is_identity()
    return {"name": "supervenience", "cliffords_found": cliffords, "gamma_generic": gamma_ok,
            "pi_only_symmetric": pi_ok, "universal_not": not_ok,
            "pass": cliffords == 24 and gamma_ok and pi_ok and not_ok}


def check_circuits(rng, trials) -> dict:
    model = stabilizer_model()
    states, bases = sorted(model.states), sorted(model.bases)
    worst = 0.0
    for _ in range(trials):
        circuit = random_circuit(rng, model.gates)
        res = run_circuit(model, states[int(rng.integers(len(states)))], circuit,
                          bases[int(rng.integers(len(bases)))])
        worst = max(worst, res.max_deviation)
    return {"name": "circuits", "trials": trials, "max_deviation": worst, "pass": worst <= 1e-10}


def check_d3_limit(rng, trials) -> dict:
    q = d3_distribution(D3_LIMIT)
    q0 = float(q[(1, 0)])
    c = cert.certify(cert.d3_limit_with_z(), "exact")
    return {"name": "d3_limit", "q0": q0, "fourth_basis_verdict": c.verdict,
            "pass": abs(q0) <= 1e-12 and c.feasible and c.verify()}


# --------------------------------------------------------------------------
# qudit checks


def check_disparate(rng, trials) -> dict:
    xyz = BasisFamily(tuple(family_bases(FamilySpec("stabilizer"), exact=True)))
    mub3 = BasisFamily(tuple(mub_bases(3)[:3]))
    s = 1 / math.sqrt(2)
    coplanar = BasisFamily(tuple(basis_from_bloch(v) for v in [(1, 0, 0), (0, 0, 1), (s, 0, s)]))
    ok_xyz, ok_mub, ok_cop = is_disparate(xyz), is_disparate(mub3), not is_disparate(coplanar)
    reports = [check_theorem3(f) for f in (xyz, mub3, coplanar)]
    ok_t3 = all(r.applicable and r.consistent for r in reports) and reports[1].holds
    return {"name": "disparate", "xyz_d2": ok_xyz, "mub_triple_d3": ok_mub, "coplanar_not_disparate": ok_cop,
            "theorem3_consistent": ok_t3, "pass": ok_xyz and ok_mub and ok_cop and ok_t3}


def check_theorem4(rng, trials) -> dict:
    fam = BasisFamily(tuple(family_bases(FamilySpec("cuboid", 0.7, 0.4))))
    rep = check_theorem4_relation(fam)
    rel = rep.details["relabelings"]
    s_values = sorted({round(v, 12) for r in rel for row in r["p"] for v in row if v > 1e-9})
    ok = rep.holds and all(all(r["saturated"]) for r in rel) and s_values == [round(1 / 3, 12)]
    return {"name": "theorem4", "eps": [r["eps"] for r in rel], "target": Fraction(1, 3),
            "nonzero_coefficients": s_values, "pass": ok}


def check_theorem5(rng, trials) -> dict:
    values = {"n4_d2": theorem5_bound(4, 2), "n5_d2": theorem5_bound(5, 2), "n6_d3": theorem5_bound(6, 3)}
    ok = (abs(values["n4_d2"] - 1 / 3) < 1e-15 and values["n5_d2"] == 0.5 and values["n6_d3"] == 0.5)
    return {"name": "theorem5_bound", **values, "pass": ok}


def check_pattern_bound(rng, trials) -> dict:
    reps = {"stabilizer": stabilizer_rep(), "d3": family_rep(FamilySpec("d3", 1.0)),
            "c2": family_rep(FamilySpec("c2", 1.0, 1.3)), "cuboid": family_rep(FamilySpec("cuboid", 0.7, 0.4))}
    observed = {k: pattern_bound(2, r).observed for k, r in reps.items()}
    b2, b3 = pattern_bound(2), pattern_bound(3)
    ok = b2.bound == 16 and b2.refined == 14 and max(observed.values()) == 8 and b3.bound == 512
    return {"name": "pattern_bound", "bound_d2": b2.bound, "refined_d2": b2.refined, "observed": observed,
            "realized_max": max(observed.values()), "bound_d3": b3.bound, "refined_d3": b3.refined, "pass": ok}


def check_qubit_consistency(rng, trials) -> dict:
    """Theorem 3/4 verdicts never contradict the certifier at d = 2."""
    n = min(trials, 200)
    bad = 0
    for _ in range(n):
        fam3 = BasisFamily(tuple(basis_from_bloch(v) for v in cert.random_unit_vectors(rng, 3)))
        fam4 = BasisFamily(tuple(basis_from_bloch(v) for v in cert.random_unit_vectors(rng, 4)))
        bad += not check_theorem3(fam3).consistent
        bad += not check_theorem4_relation(fam4).consistent
    return {"name": "qudit_qubit_consistency", "trials": n, "contradictions": bad, "pass": bad == 0}


QUBIT_CHECKS: list[tuple[str, Callable]] = [
    ("d3_threshold", check_d3_threshold),
    ("c2_thresholds", check_c2_thresholds),
    ("stabilizer_uniform", check_stabilizer_uniform),
    ("theorem1", check_theorem1),
    ("theorem2", check_theorem2),
    ("five_bases", check_five_bases),
    ("icosahedron", check_icosahedron),
    ("frames", check_frames),
    ("supervenience", check_supervenience),
    ("circuits", check_circuits),
    ("d3_limit", check_d3_limit),
]
QUDIT_CHECKS: list[tuple[str, Callable]] = [
    ("disparate", check_disparate),
    ("theorem4", check_theorem4),
    ("theorem5", check_theorem5),
    ("pattern_bound", check_pattern_bound),
    ("consistency", check_qubit_consistency),
]
_SEEDED = {"theorem2", "five_bases"}


def run_suite(suite: str = "all", trials: int = 100, seed: int = 0) -> dict:
    """Run the selected checks; the returned report is fully mode-tagged."""
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}")
    checks = []
    if suite in ("all", "qubit"):
        checks += QUBIT_CHECKS
    if suite in ("all", "qudit"):
        checks += QUDIT_CHECKS
    results = []
    for index, (name, fn) in enumerate(checks):
        rng = np.random.default_rng([seed, index])
        out = fn(rng, trials, seed) if name in _SEEDED else fn(rng, trials)
        results.append(out)
    report = {"suite": suite, "trials": trials, "seed": seed, "checks": results,
              "all_pass": all(r["pass"] for r in results)}
    return tag_numbers(report)
