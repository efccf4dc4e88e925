"""Permutation dynamics on the ontic spaces of non-negative subtheories.

A unitary ``U`` *supervenes* on an ontic permutation ``pi`` when pushing the
distribution of every non-negative state forward by ``pi`` gives the
distribution of the rotated state:

    mu_rho(pi^-1(lam)) = mu_{U rho U^dagger}(lam)   for all lam, rho.

The condition is pointwise in ``lam``, so a supervening permutation is a
perfect matching in the bipartite "compatible image" graph; the search below
enumerates matchings lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Mapping, Sequence

import numpy as np

from .families import FamilySpec, family_rep, stabilizer_rep
from .operator_core import (
    TOL,
    HermitianOp,
    I2,
    X,
    Y,
    Z,
    overlap,
    rotation_unitary,
    same_up_to_phase,
    trace_distance,
)
from .quasirep import OnticDistribution, OnticSpace, QuasiRep, distribution, indicator, q_function

AGREEMENT_TOL = 1e-10

H_GATE = (X + Z) / math.sqrt(2)
P_GATE = np.array([[1, 0], [0, 1j]], dtype=complex)
GAMMA_GATE = rotation_unitary((0, 0, 1), 2 * math.pi / 3)
PI_GATE = rotation_unitary((0, 1, 0), math.pi)
STANDARD_GATES = {"I": I2, "X": X, "Y": Y, "Z": Z, "H": H_GATE, "P": P_GATE,
                  "GAMMA": GAMMA_GATE, "PI": PI_GATE}


class SpaceMismatchError(ValueError):
    pass


class ContractError(ValueError):
    """The unitary does not map the model's state set onto itself."""


class GateRegistrationError(ValueError):
    pass


class UnknownLabelError(KeyError):
    pass


@dataclass(frozen=True)
class OnticPermutation:
    """Bijection of an ontic space; ``mapping[lam]`` is the image of ``lam``."""

    space: OnticSpace
    mapping: Mapping

    def __post_init__(self):
        m = dict(self.mapping)
        if set(m) != set(self.space.points) or set(m.values()) != set(self.space.points):
            raise ValueError("an ontic permutation must be a bijection of the space")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, space: OnticSpace) -> OnticPermutation:
        return cls(space, {lam: lam for lam in space})

    def __call__(self, lam: Hashable):
        return self.mapping[lam]

    def inverse(self) -> OnticPermutation:
        return OnticPermutation(self.space, {v: k for k, v in self.mapping.items()})

    def compose(self, other: OnticPermutation) -> OnticPermutation:
        """``self o other``: apply ``other`` first."""
        if other.space.points != self.space.points:
            raise SpaceMismatchError("permutations act on different spaces")
        return OnticPermutation(self.space, {lam: self(other(lam)) for lam in self.space})

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, OnticPermutation) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(tuple(self.mapping[lam] for lam in self.space))


def pushforward(dist: OnticDistribution, perm: OnticPermutation) -> OnticDistribution:
    """(pi . mu)(lam) = mu(pi^-1(lam)); total weight is preserved."""
    if dist.space.points != perm.space.points:
        raise SpaceMismatchError("distribution and permutation live on different spaces")
    inv = perm.inverse()
    return OnticDistribution(dist.space, tuple(dist[inv(lam)] for lam in dist.space))


def normalize_label(label: str) -> str:
    return label.strip().replace("−", "-")


@dataclass(frozen=True)
class Gate:
    name: str
    unitary: np.ndarray = field(repr=False)
    permutation: OnticPermutation = field(repr=False)


@dataclass(frozen=True, eq=False)
class SubtheoryModel:
    """A representation, its non-negative states, and registered gates.

    ``states`` maps labels such as ``"b1+"`` to density operators, ``bases``
    maps basis labels such as ``"b1"`` to the ``(plus, minus)`` state labels
    and ``aliases`` maps extra names (``"x+"``, ``"x"``) onto canonical ones.
    """

    rep: QuasiRep
    states: Mapping[str, HermitianOp]
    bases: Mapping[str, tuple]
    aliases: Mapping[str, str] = field(default_factory=dict)
    gates: Mapping[str, Gate] = field(default_factory=dict)
    name: str = ""

    @cached_property
    def distributions(self) -> dict:
        return {label: distribution(self.rep, rho) for label, rho in self.states.items()}

    @cached_property
    def indicators(self) -> dict:
        return {label: indicator(self.rep, rho) for label, rho in self.states.items()}

    def resolve(self, label: str) -> str:
        label = normalize_label(label)
        label = self.aliases.get(label, label)
        if label not in self.states and label not in self.bases:
            raise UnknownLabelError(f"unknown state or basis label {label!r}")
        return label

    def state(self, label: str) -> HermitianOp:
        return self.states[self.resolve(label)]

    def gate(self, name: str) -> Gate:
        key = name.strip().upper()
        if key not in self.gates:
            raise UnknownLabelError(f"gate {name!r} is not registered for model {self.name!r}; "
                                    f"available: {sorted(self.gates)}")
        return self.gates[key]

    def with_gate(self, name: str, unitary: np.ndarray,
                  permutation: OnticPermutation | None = None) -> SubtheoryModel:
        """New model with one more gate; the permutation must supervene.

        Without an explicit ``permutation`` the first one found by
        :func:`find_permutation` is used.
        """
        key = name.strip().upper()
        unitary = np.asarray(unitary, dtype=complex)
        if permutation is None:
            permutation = find_permutation(unitary, self)
            if permutation is None:
                raise GateRegistrationError(f"{key} does not supervene on any ontic permutation")
        elif not supervenes(permutation, unitary, self):
            raise GateRegistrationError(f"{key} does not supervene on the given permutation")
        gates = dict(self.gates)
        gates[key] = Gate(key, unitary, permutation)
        return replace(self, gates=gates)


def state_action(unitary: np.ndarray, model: SubtheoryModel, tol: float = TOL) -> dict:
    """Label map rho -> U rho U^dagger on the model's states.

    Raises
    ------
    ContractError
        If some rotated state is not (within trace distance ``tol``) a model state.
    """
    unitary = np.asarray(unitary, dtype=complex)
    out = {}
    for label, rho in model.states.items():
        image = HermitianOp(rho.to_numpy()).conjugate_by(unitary)
        hit = next((other for other, sigma in model.states.items()
                    if trace_distance(image, HermitianOp(sigma.to_numpy())) < tol), None)
        if hit is None:
            raise ContractError(f"U maps state {label} outside the model's state set")
        out[label] = hit
    return out


def _close(a, b, tol: float) -> bool:
    return abs(float(a) - float(b)) <= tol


def supervenes(perm: OnticPermutation, unitary: np.ndarray, model: SubtheoryModel, tol: float = TOL) -> bool:
    """Does pushing every state distribution by ``perm`` realize ``U``?"""
    action = state_action(unitary, model, tol)
    dists = model.distributions
    for label, target in action.items():
        pushed = pushforward(dists[label], perm)
        if not all(_close(a, b, tol) for a, b in zip(pushed.values, dists[target].values)):
            return False
    return True


def _candidate_images(unitary, model: SubtheoryModel, tol: float) -> dict:
    action = state_action(unitary, model, tol)
    dists = model.distributions
    q = q_function(model.rep)
    space = model.rep.space
    out = {}
    for lam in space:
        out[lam] = [img for img in space
                    if _close(q[lam], q[img], tol)
                    and all(_close(dists[src][lam], dists[dst][img], tol) for src, dst in action.items())]
    return out


def find_permutation(unitary: np.ndarray, model: SubtheoryModel, *, all_hits: bool = False,
                     tol: float = TOL):
    """Ontic permutation(s) on which ``U`` supervenes.

    Points are assigned in space order, each trying its compatible images in
    space order; the first complete assignment is returned (or every one with
    ``all_hits=True``).  Returns None (or ``[]``) when none exists or when
    ``U`` does not permute the model's states.
    """
    try:
        candidates = _candidate_images(unitary, model, tol)
    except ContractError:
        return [] if all_hits else None
    points = list(model.rep.space)
    hits: list = []
    assignment: dict = {}
    used: set = set()

    def extend(i: int) -> bool:
        if i == len(points):
            hits.append(OnticPermutation(model.rep.space, dict(assignment)))
            return not all_hits
        lam = points[i]
        for img in candidates[lam]:
            if img in used:
                continue
            assignment[lam] = img
            used.add(img)
            if extend(i + 1):
                return True
            used.discard(img)
            del assignment[lam]
        return False

    extend(0)
    if all_hits:
        return hits
    return hits[0] if hits else None


def epsilon_flip(space: OnticSpace) -> OnticPermutation:
    """(eps, a) -> (-eps, a)."""
    return OnticPermutation(space, {(e, a): (-e, a) for e, a in space})


def universal_not_check(model: SubtheoryModel, tol: float = TOL) -> bool:
    """Does the eps-flip send every stabilizer state to its antipode?"""
    if model.rep.meta.get("kind") != "stabilizer" or len(model.rep.space) != 8:
        raise ValueError("the universal-NOT check needs the eight-point stabilizer model")
    flip = epsilon_flip(model.rep.space)
    dists = model.distributions
    for label, rho in model.states.items():
        target = next(other for other, sigma in model.states.items()
                      if trace_distance(HermitianOp(np.eye(2) - rho.to_numpy()), HermitianOp(sigma.to_numpy())) < tol)
        pushed = pushforward(dists[label], flip)
        if not all(_close(a, b, tol) for a, b in zip(pushed.values, dists[target].values)):
            return False
    return flip.compose(flip).is_identity()


def not_gate_is_unitary(model: SubtheoryModel, tol: float = TOL) -> bool:
    """Does any registered gate act as rho -> 1 - rho on every model state?"""
    for gate in model.gates.values():
        if all(trace_distance(HermitianOp(rho.to_numpy()).conjugate_by(gate.unitary),
                              HermitianOp(np.eye(2) - rho.to_numpy())) < tol
               for rho in model.states.values()):
            return True
    return False


# --------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class CircuitResult:
    """Outcome probabilities (plus, minus) computed ontically and quantumly."""

    ontic: tuple
    quantum: tuple

    @property
    def max_deviation(self) -> float:
        return max(abs(a - b) for a, b in zip(self.ontic, self.quantum))

    @property
    def agree(self) -> bool:
        return self.max_deviation <= AGREEMENT_TOL


def parse_circuit(circuit) -> list[str]:
    if isinstance(circuit, str):
        return [g.upper() for g in circuit.split()]
    return [g.strip().upper() for g in circuit]


def run_circuit(model: SubtheoryModel, initial: str, circuit, measure: str) -> CircuitResult:
    """Apply ``circuit`` (gate names in time order) and measure a model basis."""
    names = parse_circuit(circuit)
    gates = [model.gate(n) for n in names]
    start = model.resolve(initial)
    basis = model.resolve(measure)
    if start not in model.states:
        raise UnknownLabelError(f"{initial!r} is not a state label")
    if basis not in model.bases:
        raise UnknownLabelError(f"{measure!r} is not a basis label")

    dist = model.distributions[start]
    for g in gates:
        dist = pushforward(dist, g.permutation)
    ontic = tuple(float(sum(m * x for m, x in zip(dist.values, model.indicators[label].values)))
                  for label in model.bases[basis])

    rho = HermitianOp(model.states[start].to_numpy())
    for g in gates:
        rho = rho.conjugate_by(g.unitary)
    quantum = tuple(float(overlap(rho, HermitianOp(model.states[label].to_numpy())))
                    for label in model.bases[basis])
    return CircuitResult(ontic, quantum)


# --------------------------------------------------------------------------
# model builders


def _base_model(rep: QuasiRep, name: str, extra_names: Sequence[str] = ()) -> SubtheoryModel:
    states, bases, aliases = {}, {}, {}
    for j, b in enumerate(rep.meta["bases"], start=1):
        plus, minus = f"b{j}+", f"b{j}-"
        states[plus], states[minus] = b.plus, b.minus
        bases[f"b{j}"] = (plus, minus)
        if j <= len(extra_names):
            alias = extra_names[j - 1]
            aliases.update({alias: f"b{j}", alias + "+": plus, alias + "-": minus})
    return SubtheoryModel(rep, states, bases, aliases, name=name)


def _register(model: SubtheoryModel, required: Sequence[str], optional: Sequence[str] = ()) -> SubtheoryModel:
    for name in required:
        model = model.with_gate(name, STANDARD_GATES[name])
    for name in optional:
        try:
            model = model.with_gate(name, STANDARD_GATES[name])
        except GateRegistrationError:
            pass
        except ContractError:
            pass
    return model


def stabilizer_model(exact: bool = False) -> SubtheoryModel:
    """X, Y, Z bases with q = 1/4; gates I, X, Y, Z, H, P."""
    model = _base_model(stabilizer_rep(exact=exact), "stabilizer", ("x", "y", "z"))
    return _register(model, ("I", "X", "Y", "Z", "H", "P"))


def d3_model(theta: float, q0: float | None = None) -> SubtheoryModel:
    """D3 bases; GAMMA always, PI only when it supervenes (symmetric q)."""
    model = _base_model(family_rep(FamilySpec("d3", theta, q0=q0)), "d3")
    return _register(model, ("I", "GAMMA"), ("PI",))


def c2_model(theta: float, phi: float) -> SubtheoryModel:
    """Z2 bases; Z always, X only with the extra symmetry at phi = pi/2."""
    model = _base_model(family_rep(FamilySpec("c2", theta, phi)), "c2")
    return _register(model, ("I", "Z"), ("X", "Y"))


def cuboid_model(theta: float, phi: float) -> SubtheoryModel:
    """Four cuboid bases; the pi-flips X, Y, Z and, when symmetric, H and P."""
    model = _base_model(family_rep(FamilySpec("cuboid", theta, phi)), "cuboid")
    return _register(model, ("I", "X", "Y", "Z"), ("H", "P"))


def build_model(kind: str, theta: float | None = None, phi: float | None = None,
                q0: float | None = None, exact: bool = False) -> SubtheoryModel:
    if kind == "stabilizer":
        return stabilizer_model(exact=exact)
    if kind == "d3":
        return d3_model(theta, q0)
    if kind == "c2":
        return c2_model(theta, phi)
    if kind == "cuboid":
        return cuboid_model(theta, phi)
    raise ValueError(f"no simulation model for family {kind!r}")


def clifford_group() -> list[np.ndarray]:
    """The 24 single-qubit Clifford unitaries modulo phase, generated by H and P."""
    group = [I2.copy()]
    frontier = [I2.copy()]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (H_GATE, P_GATE):
                v = g @ u
                if not any(same_up_to_phase(v, w) for w in group):
                    group.append(v)
                    nxt.append(v)
        frontier = nxt
    return group
