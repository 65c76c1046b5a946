"""Pauli-string operators and their matrix-free action on state vectors.

Conventions used throughout the package:

* Qubits are labelled 1..n.  Qubit 1 corresponds to the most significant
  bit of a computational-basis index, i.e. basis state ``|z_1 z_2 ... z_n>``
  has index ``z = z_1*2^(n-1) + ... + z_n``.
* State vectors are plain complex or real numpy arrays of length ``2**n``.
* Operators are real-weighted sums of Pauli strings (:class:`OperatorSum`),
  applied matrix-free or materialized as dense matrices for small ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

import numpy as np

PAULI_SYMBOLS = "IXYZ"

#: Largest qubit count for which dense materialization is permitted.
DENSE_QUBIT_CAP = 14

#: Coefficients below this magnitude are dropped during canonicalization.
COEFF_CUTOFF = 1e-15

_INDEX_CACHE: dict[int, np.ndarray] = {}

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _indices(n: int) -> np.ndarray:
    """Cached ``arange(2**n)`` used for index permutations."""
    arr = _INDEX_CACHE.get(n)
    if arr is None:
        arr = np.arange(1 << n, dtype=np.uint64)
        if n <= 22:
            _INDEX_CACHE[n] = arr
    return arr


def _bit(n: int, qubit: int) -> int:
    """Bit position of 1-based `qubit` inside a basis index (qubit 1 = MSB)."""
    return n - qubit


@dataclass(frozen=True)
class PauliString:
    """A signed tensor product of single-qubit Pauli factors.

    Attributes
    ----------
    n : int
        Number of qubits.
    factors : tuple[str, ...]
        One symbol from ``"IXYZ"`` per qubit; ``factors[q-1]`` acts on qubit q.
    coefficient : float
        Real weight.  Real coefficients keep every operator Hermitian.
    """

    n: int
    factors: tuple[str, ...]
    coefficient: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if len(self.factors) != self.n:
            raise ValueError(
                f"expected {self.n} factors, got {len(self.factors)}")
        bad = [f for f in self.factors if f not in PAULI_SYMBOLS]
        if bad:
            raise ValueError(f"invalid Pauli symbols {bad!r}")
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @classmethod
    def from_ops(cls, n: int, ops: Mapping[int, str] | None = None,
                 coefficient: float = 1.0) -> "PauliString":
        """Build from a sparse map ``{qubit (1-based): symbol}``."""
        factors = ["I"] * n
        for qubit, sym in (ops or {}).items():
            if not 1 <= qubit <= n:
                raise ValueError(f"qubit {qubit} outside [1, {n}]")
            factors[qubit - 1] = sym
        return cls(n, tuple(factors), coefficient)

    @classmethod
    def identity(cls, n: int, coefficient: float = 1.0) -> "PauliString":
        return cls(n, ("I",) * n, coefficient)

    @property
    def y_count(self) -> int:
        return sum(1 for f in self.factors if f == "Y")

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return sum(1 for f in self.factors if f != "I")

    def factor(self, qubit: int) -> str:
        """Pauli symbol acting on 1-based `qubit`."""
        return self.factors[qubit - 1]

    def masks(self) -> tuple[int, int]:
        """(flip mask, phase mask): bits set where X/Y respectively Z/Y act."""
        flip = 0
        zmask = 0
        for q, f in enumerate(self.factors, start=1):
            b = 1 << _bit(self.n, q)
            if f in ("X", "Y"):
                flip |= b
            if f in ("Z", "Y"):
                zmask |= b
        return flip, zmask

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return ``coefficient * (tensor Pauli action) @ psi``."""
        return _apply_terms([self], self.n, psi)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; real when the Y count is even."""
        mat = np.array([[self.coefficient]], dtype=complex)
        for f in self.factors:
            mat = np.kron(mat, _PAULI_MATRICES[f])
        if self.y_count % 2 == 0:
            return mat.real.copy()
        return mat

    def __mul__(self, scalar: float) -> "PauliString":
        return PauliString(self.n, self.factors, self.coefficient * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "PauliString":
        return self * -1.0

    def __str__(self) -> str:
        return f"{self.coefficient:+g}*{''.join(self.factors)}"


def _apply_terms(terms: Iterable[PauliString], n: int,
                 psi: np.ndarray) -> np.ndarray:
    if psi.shape != (1 << n,):
        raise ValueError(
            f"state has shape {psi.shape}, expected ({1 << n},)")
    idx = _indices(n)
    complex_out = np.iscomplexobj(psi) or any(t.y_count % 2 for t in terms)
    out = np.zeros(1 << n, dtype=complex if complex_out else float)
    for term in terms:
        flip, zmask = term.masks()
        phase = 1j ** term.y_count
        if term.y_count % 2 == 0:
            phase = phase.real
        # signs evaluated at y^flip equal signs at y up to a constant parity
        phase *= -1.0 if bin(flip & zmask).count("1") % 2 else 1.0
        contrib = psi[(idx ^ np.uint64(flip)).astype(np.intp)]
        if zmask:
            signs = 1 - 2 * (np.bitwise_count(idx & np.uint64(zmask))
                             .astype(np.int8) & 1)
            contrib = contrib * signs
        out += (term.coefficient * phase) * contrib
    return out


class OperatorSum:
    """A Hermitian operator given as a real-weighted sum of Pauli strings.

    Terms are canonicalized on construction: duplicate factor patterns are
    merged, coefficients below :data:`COEFF_CUTOFF` dropped, and the term
    order fixed, so equal operators compare equal.  Instances are immutable
    and safe to share across threads.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Iterable[PauliString] = ()):
        merged: dict[tuple[str, ...], float] = {}
        for term in terms:
            if term.n != n:
                raise ValueError(
                    f"term on {term.n} qubits in an {n}-qubit sum")
            merged[term.factors] = merged.get(term.factors, 0.0) \
                + term.coefficient
        canon = tuple(
            PauliString(n, factors, coeff)
            for factors, coeff in sorted(merged.items())
            if abs(coeff) > COEFF_CUTOFF)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, *_):
        raise AttributeError("OperatorSum is immutable")

    def __eq__(self, other) -> bool:
        return (isinstance(other, OperatorSum) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other) -> "OperatorSum":
        if isinstance(other, PauliString):
            other = OperatorSum(other.n, [other])
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return OperatorSum(self.n, self.terms + other.terms)

    def __sub__(self, other) -> "OperatorSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "OperatorSum":
        return OperatorSum(self.n, [t * scalar for t in self.terms])

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorSum":
        return self * -1.0

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.terms) or "0"

    @property
    def is_real(self) -> bool:
        """True when the dense matrix is real (every term has even Y count)."""
        return all(t.y_count % 2 == 0 for t in self.terms)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free ``H @ psi``; no normalization is applied."""
        return _apply_terms(self.terms, self.n, psi)

    def to_dense(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix.  Refuses n above `cap`."""
        if self.n > cap:
            raise ValueError(
                f"dense materialization capped at {cap} qubits, got {self.n}")
        dim = 1 << self.n
        dtype = float if self.is_real else complex
        mat = np.zeros((dim, dim), dtype=dtype)
        for term in self.terms:
            block = term.to_matrix()
            mat += block if dtype is complex else block.real
        return mat

    def conjugated(self, gate: "GateSpec") -> "OperatorSum":
        return conjugate(self, gate)


@dataclass(frozen=True)
class GateSpec:
    """A Hermitian two-qubit controlled gate used as a similarity transform."""

    kind: Literal["CNOT", "CZ"]
    control: int
    target: int

    def __post_init__(self):
        if self.kind not in ("CNOT", "CZ"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.control == self.target:
            raise ValueError("control and target must differ")
        if self.control < 1 or self.target < 1:
            raise ValueError("qubit indices are 1-based")

    def to_matrix(self, n: int) -> np.ndarray:
        """Dense matrix of the gate embedded in an n-qubit register."""
        half = 0.5
        iden = PauliString.identity(n, half)
        zc = PauliString.from_ops(n, {self.control: "Z"}, half)
        sym = "X" if self.kind == "CNOT" else "Z"
        xt = PauliString.from_ops(n, {self.target: sym}, half)
        zx = PauliString.from_ops(n, {self.control: "Z", self.target: sym},
                                  -half)
        gate = OperatorSum(n, [iden, zc, xt, zx])
        return gate.to_dense()


# Conjugation rules S (P_c ⊗ Q_t) S for the Hermitian gates above, as
# (sign, new_control_factor, new_target_factor).  Verified against dense
# matrices in the test suite.
_CNOT_RULES = {
    ("I", "I"): (1, "I", "I"), ("I", "X"): (1, "I", "X"),
    ("I", "Y"): (1, "Z", "Y"), ("I", "Z"): (1, "Z", "Z"),
    ("X", "I"): (1, "X", "X"), ("X", "X"): (1, "X", "I"),
    ("X", "Y"): (1, "Y", "Z"), ("X", "Z"): (-1, "Y", "Y"),
    ("Y", "I"): (1, "Y", "X"), ("Y", "X"): (1, "Y", "I"),
    ("Y", "Y"): (-1, "X", "Z"), ("Y", "Z"): (1, "X", "Y"),
    ("Z", "I"): (1, "Z", "I"), ("Z", "X"): (1, "Z", "X"),
    ("Z", "Y"): (1, "I", "Y"), ("Z", "Z"): (1, "I", "Z"),
}

_CZ_RULES = {
    ("I", "I"): (1, "I", "I"), ("I", "X"): (1, "Z", "X"),
    ("I", "Y"): (1, "Z", "Y"), ("I", "Z"): (1, "I", "Z"),
    ("X", "I"): (1, "X", "Z"), ("X", "X"): (1, "Y", "Y"),
    ("X", "Y"): (-1, "Y", "X"), ("X", "Z"): (1, "X", "I"),
    ("Y", "I"): (1, "Y", "Z"), ("Y", "X"): (-1, "X", "Y"),
    ("Y", "Y"): (1, "X", "X"), ("Y", "Z"): (1, "Y", "I"),
    ("Z", "I"): (1, "Z", "I"), ("Z", "X"): (1, "I", "X"),
    ("Z", "Y"): (1, "I", "Y"), ("Z", "Z"): (1, "Z", "Z"),
}


def conjugate(op: OperatorSum, gate: GateSpec) -> OperatorSum:
    """Similarity transform ``S @ op @ S`` by a CNOT or CZ gate.

    Pauli strings map to Pauli strings under both gates, so the result is
    again an :class:`OperatorSum` with real coefficients.
    """
    if gate.control > op.n or gate.target > op.n:
        raise ValueError(
            f"gate on qubits ({gate.control},{gate.target}) outside 1..{op.n}")
    rules = _CNOT_RULES if gate.kind == "CNOT" else _CZ_RULES
    out = []
    for term in op.terms:
        pc = term.factor(gate.control)
        qt = term.factor(gate.target)
        sign, new_c, new_t = rules[(pc, qt)]
        factors = list(term.factors)
        factors[gate.control - 1] = new_c
        factors[gate.target - 1] = new_t
        out.append(PauliString(op.n, tuple(factors),
                               sign * term.coefficient))
    return OperatorSum(op.n, out)


@dataclass(frozen=True)
class DenseOperator:
    """A Hermitian operator held as an explicit dense matrix.

    Used for the non-local projector Hamiltonians, which have no sparse
    Pauli decomposition worth keeping.  Mirrors the small slice of the
    :class:`OperatorSum` interface that paths, eigensolvers and the
    propagator rely on.
    """

    n: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim = 1 << self.n
        if self.matrix.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} != ({dim}, {dim})")
        self.matrix.setflags(write=False)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if psi.shape != (1 << self.n,):
            raise ValueError(
                f"state has shape {psi.shape}, expected ({1 << self.n},)")
        return self.matrix @ psi

    def to_dense(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        return np.asarray(self.matrix)

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return DenseOperator(self.n, self.matrix + other.matrix)

    def __mul__(self, scalar: float) -> "DenseOperator":
        return DenseOperator(self.n, self.matrix * scalar)

    __rmul__ = __mul__


def blend(op_a, op_b, s: float):
    """Straight-line combination ``(1-s)*op_a + s*op_b``."""
    return (1.0 - s) * op_a + s * op_b


def apply_operator(op, psi: np.ndarray) -> np.ndarray:
    """Apply an operator to a state vector, matrix-free where possible."""
    return op.apply(psi)


def to_dense(op, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
    return op.to_dense(cap)


def n_qubits(psi: np.ndarray) -> int:
    n = int(round(np.log2(len(psi))))
    if 1 << n != len(psi):
        raise ValueError(f"state length {len(psi)} is not a power of two")
    return n


def basis_state(n: int, bits) -> np.ndarray:
    """``|z_1...z_n>`` from an iterable of bits or an integer index."""
    if isinstance(bits, (int, np.integer)):
        index = int(bits)
    else:
        bits = list(bits)
        if len(bits) != n:
            raise ValueError(f"expected {n} bits, got {len(bits)}")
        index = 0
        for b in bits:
            index = (index << 1) | (int(b) & 1)
    psi = np.zeros(1 << n)
    psi[index] = 1.0
    return psi


def uniform_superposition(n: int) -> np.ndarray:
    """Equal-amplitude superposition of all basis states (all spins along +x)."""
    return np.full(1 << n, 1.0 / np.sqrt(1 << n))


def ghz_state(n: int) -> np.ndarray:
    """The even-parity cat state ``(|0...0> + |1...1>)/sqrt(2)``."""
    psi = np.zeros(1 << n)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return psi


def parity_apply(psi: np.ndarray) -> np.ndarray:
    """Apply the full bit-flip string (sigma^x on every qubit)."""
    n = n_qubits(psi)
    idx = (_indices(n) ^ np.uint64((1 << n) - 1)).astype(np.intp)
    return psi[idx]


def parity_expectation(psi: np.ndarray) -> float:
    """Expectation of the bit-flip string, real for any normalized state."""
    return float(np.real(np.vdot(psi, parity_apply(psi))))


def parity_operator(n: int) -> OperatorSum:
    return OperatorSum(n, [PauliString(n, ("X",) * n, 1.0)])
