"""Hermitian operators, qubit Bloch vectors and orthonormal bases.

Two arithmetic backends are supported.  Float operators wrap a numpy
``complex128`` array and comparisons use :data:`TOL`.  Exact operators wrap a
``sympy.ImmutableMatrix`` with rational (Gaussian-rational) entries and are
compared exactly.  An operator is exact iff it was built from exact inputs
(``int``, :class:`fractions.Fraction` or sympy rationals).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
import sympy

TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (X, Y, Z)

_SX = sympy.ImmutableMatrix([[0, 1], [1, 0]])
_SY = sympy.ImmutableMatrix([[0, -sympy.I], [sympy.I, 0]])
_SZ = sympy.ImmutableMatrix([[1, 0], [0, -1]])
_SPAULI = (_SX, _SY, _SZ)


class InvalidStateError(ValueError):
    """Raised when a Bloch vector or operator cannot represent a state."""


class DimensionError(ValueError):
    """Raised on operators of the wrong or mismatched dimension."""


def is_exact_scalar(x) -> bool:
    if isinstance(x, bool):
        return False
    return isinstance(x, (Rational, sympy.Rational))


def to_sympy(x) -> sympy.Expr:
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def to_fraction(x) -> Fraction:
    """Convert an exact real scalar (int, Fraction, sympy.Rational) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = sympy.nsimplify(x) if not isinstance(x, sympy.Rational) else x
    if not isinstance(x, sympy.Rational):
        raise TypeError(f"not an exact rational: {x!r}")
    return Fraction(int(x.p), int(x.q))


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """A d x d Hermitian matrix, float (numpy) or exact (sympy)."""

    entries: object

    def __post_init__(self):
        m = self.entries
        if isinstance(m, sympy.MatrixBase):
            m = sympy.ImmutableMatrix(m)
            if m.rows != m.cols:
                raise DimensionError("operator must be square")
            if sympy.expand(m - m.H) != sympy.zeros(m.rows, m.cols):
                raise ValueError("operator is not Hermitian")
        else:
            m = np.array(m, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DimensionError("operator must be square")
            if not np.allclose(m, m.conj().T, atol=TOL):
                raise ValueError("operator is not Hermitian")
            m = 0.5 * (m + m.conj().T)
            m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def exact(self) -> bool:
        return isinstance(self.entries, sympy.MatrixBase)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_numpy(self) -> np.ndarray:
        if self.exact:
            return np.array(self.entries.evalf(), dtype=complex)
        return self.entries

    def trace(self):
        if self.exact:
            return sympy.re(self.entries.trace())
        return float(np.trace(self.entries).real)

    def __add__(self, other: HermitianOp) -> HermitianOp:
        a, b = _common(self, other)
        return HermitianOp(a + b)

    def __sub__(self, other: HermitianOp) -> HermitianOp:
        a, b = _common(self, other)
        return HermitianOp(a - b)

    def __mul__(self, scalar) -> HermitianOp:
        if self.exact and is_exact_scalar(scalar):
            return HermitianOp(self.entries * to_sympy(scalar))
        return HermitianOp(self.to_numpy() * float(scalar))

    __rmul__ = __mul__

    def conjugate_by(self, unitary: np.ndarray) -> HermitianOp:
        """Return U A U^dagger (float)."""
        u = np.asarray(unitary, dtype=complex)
        return HermitianOp(u @ self.to_numpy() @ u.conj().T)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.to_numpy())

    def allclose(self, other: HermitianOp, tol: float = TOL) -> bool:
        if self.exact and other.exact:
            return sympy.expand(self.entries - other.entries) == sympy.zeros(self.dim, self.dim)
        return bool(np.allclose(self.to_numpy(), other.to_numpy(), atol=tol))


def _common(a: HermitianOp, b: HermitianOp):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.exact and b.exact:
        return a.entries, b.entries
    return a.to_numpy(), b.to_numpy()


def identity(d: int = 2, exact: bool = False) -> HermitianOp:
    if exact:
        return HermitianOp(sympy.eye(d))
    return HermitianOp(np.eye(d, dtype=complex))


def trace_product(a, b):
    """Tr(AB) for two Hermitian operators, real part only.

    Accepts HermitianOp or raw arrays.  Exact when both are exact.
    """
    ma = a.entries if isinstance(a, HermitianOp) else a
    mb = b.entries if isinstance(b, HermitianOp) else b
    if isinstance(ma, sympy.MatrixBase) and isinstance(mb, sympy.MatrixBase):
        return sympy.nsimplify(sympy.re((ma * mb).trace()))
    ma = np.array(ma.evalf() if isinstance(ma, sympy.MatrixBase) else ma, dtype=complex)
    mb = np.array(mb.evalf() if isinstance(mb, sympy.MatrixBase) else mb, dtype=complex)
    # Tr(AB) = sum_ij A_ij B_ji
    return float(np.einsum("ij,ji->", ma, mb).real)


@dataclass(frozen=True)
class BlochVector:
    components: tuple

    def __init__(self, components: Sequence):
        comps = tuple(components)
        if len(comps) != 3:
            raise DimensionError("a Bloch vector has three components")
        if not all(is_exact_scalar(c) for c in comps):
            comps = tuple(float(c) for c in comps)
        object.__setattr__(self, "components", comps)

    @property
    def exact(self) -> bool:
        return all(is_exact_scalar(c) for c in self.components)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.components])

    def norm_squared(self):
        return sum(c * c for c in self.components)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def __neg__(self) -> BlochVector:
        return BlochVector(tuple(-c for c in self.components))

    def dot(self, other: BlochVector):
        return sum(a * b for a, b in zip(self.components, other.components))


def _as_bloch(r) -> BlochVector:
    return r if isinstance(r, BlochVector) else BlochVector(r)


def bloch_to_density(r) -> HermitianOp:
    """Qubit density operator (1 + r.sigma)/2 for a Bloch vector with |r| <= 1."""
    r = _as_bloch(r)
    if r.exact:
        if r.norm_squared() > 1:
            raise InvalidStateError(f"|r|^2 = {r.norm_squared()} exceeds 1")
        x, y, z = (to_sympy(c) for c in r.components)
        half = sympy.Rational(1, 2)
        return HermitianOp(sympy.ImmutableMatrix([[half * (1 + z), half * (x - sympy.I * y)],
                                                  [half * (x + sympy.I * y), half * (1 - z)]]))
    v = r.as_array()
    if np.linalg.norm(v) > 1 + TOL:
        raise InvalidStateError(f"|r| = {np.linalg.norm(v):.6g} exceeds 1")
    return HermitianOp(0.5 * (I2 + v[0] * X + v[1] * Y + v[2] * Z))


def density_to_bloch(rho: HermitianOp) -> BlochVector:
    """Bloch vector r_k = Tr(rho sigma_k) of a qubit operator."""
    if rho.dim != 2:
        raise DimensionError(f"Bloch vectors exist for qubits only, got dim {rho.dim}")
    if rho.exact:
        return BlochVector(tuple(to_fraction(sympy.re((rho.entries * s).trace())) for s in _SPAULI))
    m = rho.entries
    return BlochVector(tuple(float(np.einsum("ij,ji->", m, s).real) for s in PAULI))


def overlap(rho: HermitianOp, omega: HermitianOp):
    """Tr(rho omega)."""
    if rho.dim != omega.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {omega.dim}")
    val = trace_product(rho, omega)
    return to_fraction(val) if rho.exact and omega.exact else val


@dataclass(frozen=True)
class QubitBasis:
    """Orthonormal qubit basis {rho(+), rho(-)} fixed by one unit Bloch vector."""

    direction: BlochVector
    elements: tuple = field(repr=False)

    @property
    def plus(self) -> HermitianOp:
        return self.elements[0]

    @property
    def minus(self) -> HermitianOp:
        return self.elements[1]

    def element(self, gamma: int) -> HermitianOp:
        return self.elements[0] if gamma > 0 else self.elements[1]

    @property
    def dim(self) -> int:
        return 2


def basis_from_bloch(r) -> QubitBasis:
    r = _as_bloch(r)
    if r.exact:
        if r.norm_squared() != 1:
            raise InvalidStateError(f"basis direction must be a unit vector, |r|^2 = {r.norm_squared()}")
    elif abs(r.norm() - 1) > TOL:
        raise InvalidStateError(f"basis direction must be a unit vector, |r| = {r.norm():.6g}")
    return QubitBasis(r, (bloch_to_density(r), bloch_to_density(-r)))


@dataclass(frozen=True)
class QuditBasis:
    """Orthonormal basis of C^d stored as its d rank-1 projectors."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(self.elements)
        d = elems[0].dim
        if len(elems) != d:
            raise DimensionError(f"a basis of C^{d} needs {d} elements, got {len(elems)}")
        for j, a in enumerate(elems):
            for k, b in enumerate(elems):
                target = 1.0 if j == k else 0.0
                if abs(float(overlap(a, b)) - target) > 1e-8:
                    raise InvalidStateError(f"elements {j},{k} have overlap {float(overlap(a, b)):.3g}")
        total = sum((e.to_numpy() for e in elems), np.zeros((d, d), dtype=complex))
        if not np.allclose(total, np.eye(d), atol=1e-8):
            raise InvalidStateError("basis elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[complex]]) -> QuditBasis:
        """Build from d (not necessarily normalized) column vectors."""
        projs = []
        for v in vectors:
            v = np.asarray(v, dtype=complex)
            n = np.linalg.norm(v)
            if n < TOL:
                raise InvalidStateError("zero basis vector")
            v = v / n
            projs.append(HermitianOp(np.outer(v, v.conj())))
        return cls(tuple(projs))

    @classmethod
    def from_qubit(cls, basis: QubitBasis) -> QuditBasis:
        return cls(tuple(basis.elements))


def rotation_unitary(axis, angle: float) -> np.ndarray:
    """Spin-1/2 unitary exp(-i angle n.sigma / 2).

    Conjugation rho -> U rho U^dagger rotates Bloch vectors by ``angle``
    (right-hand rule) about ``axis``.
    """
    n = _as_bloch(axis).as_array()
    norm = np.linalg.norm(n)
    if norm < TOL:
        raise ValueError("rotation axis must be nonzero")
    if abs(norm - 1) > TOL:
        raise ValueError(f"rotation axis must be a unit vector, |n| = {norm:.6g}")
    ns = n[0] * X + n[1] * Y + n[2] * Z
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * ns


def same_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = TOL) -> bool:
    """True iff U = e^{i phi} V, decided by |Tr(U^dagger V)| = d."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d = u.shape[0]
    return abs(abs(np.trace(u.conj().T @ v)) - d) < tol


def rotate_bloch(r, unitary: np.ndarray) -> BlochVector:
    """Bloch vector of U rho(r) U^dagger."""
    return density_to_bloch(bloch_to_density(r).conjugate_by(unitary))


def trace_distance(a: HermitianOp, b: HermitianOp) -> float:
    ev = np.linalg.eigvalsh(a.to_numpy() - b.to_numpy())
    return 0.5 * float(np.abs(ev).sum())
