"""Dense state-vector engine for small qubit/qutrit registers.

Site ordering: a register with ``dims = (d0, d1, ..., dk)`` stores its
amplitudes in C order, i.e. ``amps.reshape(dims)[i0, i1, ..., ik]`` is the
amplitude of ``|i0>|i1>...|ik>``. Site 0 is the most significant digit of the
flat index, so ``tensor_product(a, b).amps == np.kron(a.amps, b.amps)``.

Photon polarization sites use index 0 for ``h`` and 1 for ``v``.

States and gates are immutable values; every operation returns a new object.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .errors import DimensionError

DEFAULT_MAX_DIM = 2**22
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    dims: tuple
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise DimensionError(f"site dimensions must be positive, got {dims}")
        amps = _frozen(self.amps).reshape(-1)
        if amps.size != prod(dims):
            raise DimensionError(
                f"amplitude length {amps.size} does not match dims {dims} (product {prod(dims)})"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.dims, self.amps / n)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per site (read-only view)."""
        return self.amps.reshape(self.dims)

    def __mul__(self, c):
        return StateVector(self.dims, self.amps * complex(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"StateVector(dims={self.dims}, norm={self.norm():.12g})"


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> StateVector:
    dims = tuple(dims)
    if len(digits) != len(dims):
        raise DimensionError("one digit per site required")
    amps = np.zeros(dims, dtype=complex)
    amps[tuple(digits)] = 1.0
    return StateVector(dims, amps)


def qubits(bits: str) -> StateVector:
    """Computational basis state from a bit string, e.g. ``qubits('011')``."""
    return basis_state((2,) * len(bits), [int(b) for b in bits])


def from_vectors(*vectors) -> StateVector:
    """Product state of single-site vectors (each is normalized)."""
    state = None
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        s = StateVector((v.size,), v / np.linalg.norm(v))
        state = s if state is None else tensor_product(state, s)
    return state


def _check_normalized(s: StateVector, what="state"):
    if abs(s.norm() - 1.0) > NORM_TOL:
        raise ValueError(f"{what} is not normalized (norm={s.norm():.3g})")


def tensor_product(a: StateVector, b: StateVector, max_dim: int = DEFAULT_MAX_DIM) -> StateVector:
    _check_normalized(a, "left operand")
    _check_normalized(b, "right operand")
    total = a.amps.size * b.amps.size
    if total > max_dim:
        raise DimensionError(f"tensor product dimension {total} exceeds cap {max_dim}")
    return StateVector(a.dims + b.dims, np.kron(a.amps, b.amps))


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary acting on ``len(dims)`` sites with the given local dimensions."""

    matrix: np.ndarray
    dims: tuple = (2,)
    name: str = ""

    def __post_init__(self):
        m = _frozen(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        n = prod(dims)
        if m.shape != (n, n):
            raise DimensionError(f"gate matrix shape {m.shape} does not match site dims {dims}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(n)))
        if err > UNITARY_TOL:
            raise ValueError(f"gate {self.name or ''} is not unitary (max |G^dag G - I| = {err:.3g})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def arity(self) -> int:
        return len(self.dims)

    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, self.dims, self.name + "^dag")

    def __matmul__(self, other: "Gate") -> "Gate":
        if self.dims != other.dims:
            raise DimensionError("cannot compose gates on different site dimensions")
        return Gate(self.matrix @ other.matrix, self.dims, f"{self.name}*{other.name}")


def diagonal_gate(phases, dims=(2, 2), name="") -> Gate:
    return Gate(np.diag(np.asarray(phases, dtype=complex).reshape(-1)), dims, name)


_S2 = 1 / sqrt(2)
I2 = Gate(np.eye(2), (2,), "I")
X = Gate([[0, 1], [1, 0]], (2,), "X")
Y = Gate([[0, -1j], [1j, 0]], (2,), "Y")
Z = Gate([[1, 0], [0, -1]], (2,), "Z")
H = Gate(np.array([[1, 1], [1, -1]]) * _S2, (2,), "H")
CNOT = Gate([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], (2, 2), "CNOT")
CZ = diagonal_gate([1, 1, 1, -1], name="CZ")
# e^{i pi |11><11|}, between two ensembles
CPF_11 = diagonal_gate([1, 1, 1, -1], name="CPF11")
# e^{i pi |0h><0h|}, ensemble site first then photon (h=0, v=1)
CPF_0H = diagonal_gate([-1, 1, 1, 1], name="CPF0h")
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def apply_gate(s: StateVector, g: Gate, targets: Sequence[int]) -> StateVector:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate targets {targets}")
    if len(targets) != g.arity:
        raise DimensionError(f"gate of arity {g.arity} given {len(targets)} targets")
    for t in targets:
        if not 0 <= t < s.n_sites:
            raise DimensionError(f"target site {t} out of range for {s.n_sites} sites")
    tdims = tuple(s.dims[t] for t in targets)
    if tdims != g.dims:
        raise DimensionError(f"gate dims {g.dims} do not match target site dims {tdims}")
    k = len(targets)
    psi = s.tensor()
    m = g.matrix.reshape(g.dims + g.dims)
    out = np.tensordot(m, psi, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return StateVector(s.dims, out)


def apply_paulis(s: StateVector, labels: dict) -> StateVector:
    """Apply single-qubit Paulis, e.g. ``{0: 'Z', 3: 'X'}``."""
    for site, lab in labels.items():
        if lab != "I":
            s = apply_gate(s, PAULIS[lab], [site])
    return s


# measurement -----------------------------------------------------------------

_NAMED_BASES = {
    "z": ("z", [[1, 0], [0, 1]], ("0", "1")),
    "computational": ("z", [[1, 0], [0, 1]], ("0", "1")),
    "x": ("x", [[_S2, _S2], [_S2, -_S2]], ("+", "-")),
    "pm": ("x", [[_S2, _S2], [_S2, -_S2]], ("+", "-")),
    "diagonal": ("x", [[_S2, _S2], [_S2, -_S2]], ("+", "-")),
    "y": ("y", [[_S2, 1j * _S2], [_S2, -1j * _S2]], ("+i", "-i")),
}


def resolve_basis(basis, dim: int):
    """Return ``(label, vectors, outcome_labels)`` for a basis spec."""
    if isinstance(basis, str):
        key = basis.lower()
        if key in ("z", "computational"):
            vecs = np.eye(dim, dtype=complex)
            return "z", vecs, tuple(str(i) for i in range(dim))
        if key not in _NAMED_BASES:
            raise ValueError(f"unknown basis {basis!r}")
        label, vecs, names = _NAMED_BASES[key]
        vecs = np.asarray(vecs, dtype=complex)
        if dim != 2:
            raise DimensionError(f"basis {basis!r} is defined for qubit sites only")
        return label, vecs, names
    vecs = np.asarray(basis, dtype=complex)
    if vecs.shape != (dim, dim):
        raise DimensionError(f"custom basis must be {dim} vectors of length {dim}")
    gram = vecs.conj() @ vecs.T
    if np.max(np.abs(gram - np.eye(dim))) > 1e-10:
        raise ValueError("measurement basis is not orthonormal")
    return "custom", vecs, tuple(str(i) for i in range(dim))


@dataclass(frozen=True)
class MeasurementRecord:
    site: int
    basis: str
    outcome: int
    label: str
    probability: float
    state: StateVector
    vector: np.ndarray

    def reduced(self) -> StateVector:
        """Post-measurement state with the measured site removed."""
        psi = np.moveaxis(self.state.tensor(), self.site, 0)
        rest = np.tensordot(self.vector.conj(), psi, axes=(0, 0))
        dims = self.state.dims[: self.site] + self.state.dims[self.site + 1 :]
        return StateVector(dims, rest).normalized()


def measure_branches(s: StateVector, site: int, basis="z") -> list:
    """All outcomes of a projective measurement, including zero-probability ones.

    Branches with zero probability carry ``state=None``.
    """
    if not 0 <= site < s.n_sites:
        raise DimensionError(f"site {site} out of range")
    label, vecs, names = resolve_basis(basis, s.dims[site])
    psi = np.moveaxis(s.tensor(), site, 0)
    records = []
    for k, v in enumerate(vecs):
        comp = np.tensordot(v.conj(), psi, axes=(0, 0))
        p = float(np.vdot(comp, comp).real)
        post = None
        if p > 1e-300:
            full = np.multiply.outer(v, comp / sqrt(p))
            post = StateVector(s.dims, np.moveaxis(full, 0, site))
        records.append(MeasurementRecord(site, label, k, names[k], p, post, _frozen(v)))
    return records


def measure(s: StateVector, site: int, basis="z", rng=None, outcome=None) -> MeasurementRecord:
    """Projective measurement of one site.

    The outcome is drawn by the Born rule from ``rng`` (a ``numpy.random.Generator``)
    unless forced with ``outcome``.
    """
    branches = measure_branches(s, site, basis)
    if outcome is None:
        if rng is None:
            raise ValueError("measure() needs an rng or a forced outcome")
        probs = np.array([b.probability for b in branches])
        probs = probs / probs.sum()
        outcome = int(rng.choice(len(branches), p=probs))
    rec = branches[outcome]
    if rec.state is None:
        raise ValueError(f"forced outcome {outcome} has zero probability")
    return rec


def inner(a: StateVector, b: StateVector) -> complex:
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Global-phase-insensitive overlap ``|<a|b>|``."""
    return min(1.0, abs(inner(a, b)))


def expectation(s: StateVector, paulis: dict) -> float:
    """Expectation of a Pauli string given as ``{site: 'X'|'Y'|'Z'}``."""
    return float(inner(s, apply_paulis(s, paulis)).real)


def drop_global_phase(s: StateVector) -> StateVector:
    """Rotate so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(s.amps)))
    a = s.amps[k]
    return s if a == 0 else StateVector(s.dims, s.amps * (abs(a) / a))
