"""Pauli-string observables, entanglement witnesses and the correlation-norm indicator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .qstate import add_white_noise, density, n_qubits

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

COEFF_TOL = 1e-12


def pauli_matrix(word: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for letter in word:
        out = np.kron(out, PAULI[letter])
    return out


def _apply_word(word: str, rho: np.ndarray) -> np.ndarray:
    """``sigma_word @ rho`` without building the dense Pauli matrix."""
    n = len(word)
    t = rho.reshape((2,) * n + (rho.shape[1],))
    for q, letter in enumerate(word):
        if letter != "I":
            t = np.moveaxis(np.tensordot(PAULI[letter], t, axes=([1], [q])), 0, q)
    return t.reshape(rho.shape)


def pauli_expectation(word: str, state: np.ndarray) -> float:
    """``Tr(rho sigma_word)`` for a density matrix or ket."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return float(np.vdot(state, _apply_word(word, state[:, None])[:, 0]).real)
    return float(np.trace(_apply_word(word, state)).real)


@dataclass(frozen=True)
class PauliObservable:
    """Real-weighted sum of n-qubit Pauli words."""

    n: int
    terms: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for word, c in self.terms.items():
            if len(word) != self.n or set(word) - set("IXYZ"):
                raise ValueError(f"bad Pauli word {word!r} for {self.n} qubits")
            if abs(c) > COEFF_TOL:
                clean[word] = float(c)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @property
    def identity_coefficient(self) -> float:
        return self.terms.get("I" * self.n, 0.0)

    def __len__(self):
        return len(self.terms)

    def to_matrix(self) -> np.ndarray:
        out = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for word, c in self.terms.items():
            out += c * pauli_matrix(word)
        return out

    def to_text(self) -> str:
        return "".join(f"{c:+.17g}  {w}\n" for w, c in self.terms.items())

    @classmethod
    def from_text(cls, text: str) -> "PauliObservable":
        terms = {}
        n = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                coeff, word = line.split()
                value = float(Fraction(coeff.replace("−", "-")))
            except ValueError:
                raise ValueError(f"line {lineno}: expected 'coeff  WORD', got {line!r}") from None
            if n is None:
                n = len(word)
            terms[word] = terms.get(word, 0.0) + value
        if n is None:
            raise ValueError("empty observable")
        return cls(n, terms)

    def single_type(self) -> bool:
        """True if every word uses at most one distinct non-identity letter."""
        return all(len(set(w) - {"I"}) <= 1 for w in self.terms)

    def settings_needed(self) -> set[str]:
        return {next(iter(set(w) - {"I"})) for w in self.terms if set(w) - {"I"}} if self.single_type() else set()


def pauli_decompose(operator: np.ndarray) -> PauliObservable:
    """Coefficients ``Tr(O sigma_s) / 2**n`` over all ``4**n`` words."""
    op = np.asarray(operator, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("operator must be square")
    n = n_qubits(op)
    if not np.allclose(op, op.conj().T, atol=1e-10):
        raise ValueError("operator is not Hermitian")
    # fast Walsh-type transform: contract each qubit with the 4 single-qubit Paulis
    basis = np.stack([PAULI[c] for c in "IXYZ"])  # (4, 2, 2)
    t = op.reshape((2,) * (2 * n))
    # move to (r0, c0, r1, c1, ...)
    order = [x for q in range(n) for x in (q, q + n)]
    t = t.transpose(order)
    for _ in range(n):
        # consume the leading (row, col) pair, append a Pauli index at the end
        t = np.tensordot(t, basis, axes=([0, 1], [2, 1]))
    coeffs = t.reshape(-1).real / 2**n
    words = ("".join(w) for w in itertools.product("IXYZ", repeat=n))
    return PauliObservable(n, dict(zip(words, coeffs)))


def max_overlap_witness(target: np.ndarray, overlap_bound: float = 2 / 3) -> PauliObservable:
    """Decomposition of ``overlap_bound * 1 - |target><target|``."""
    if not 0 < overlap_bound < 1:
        raise ValueError("overlap bound must lie in (0, 1)")
    rho = density(target)
    return pauli_decompose(overlap_bound * np.eye(rho.shape[0]) - rho)


def reduce_witness(full: PauliObservable, identity_constant: float) -> PauliObservable:
    """Keep words built from a single Pauli letter (plus identities) and reset the identity weight."""
    if identity_constant <= 0:
        raise ValueError("identity constant must be positive")
    kept = {w: c for w, c in full.terms.items() if len(set(w) - {"I"}) == 1}
    kept["I" * full.n] = identity_constant
    return PauliObservable(full.n, kept)


def expectation(obs: PauliObservable, state: np.ndarray) -> float:
    """``sum_s c_s Tr(rho sigma_s)`` for a density matrix or ket."""
    state = np.asarray(state, dtype=complex)
    if n_qubits(state) != obs.n:
        raise ValueError("dimension mismatch")
    return sum(c * pauli_expectation(w, state) for w, c in obs.terms.items())


def white_noise_tolerance(obs: PauliObservable, target: np.ndarray) -> float:
    """Largest white-noise fraction ``1 - p`` at which the witness is still negative.

    The expectation on ``p |t><t| + (1-p) 1/2^n`` is linear in ``p``, so the
    zero crossing is ``p* = e_mixed / (e_mixed - e_pure)``.
    """
    e_pure = expectation(obs, target)
    if e_pure >= 0:
        raise ValueError("witness does not detect the target state")
    e_mixed = obs.identity_coefficient
    p_star = e_mixed / (e_mixed - e_pure)
    return 1.0 - max(p_star, 0.0)


class Verdict(str, Enum):
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"
    NOT_FULLY_SEPARABLE = "not fully separable"


@dataclass(frozen=True)
class WitnessReport:
    expectation: float
    standard_error: float = 0.0
    k: float = 0.0
    noise_tolerance: float | None = None
    threshold: float = 0.0

    @property
    def verdict(self) -> Verdict:
        if self.expectation + self.k * self.standard_error < self.threshold:
            return Verdict.ENTANGLED
        return Verdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "expectation": self.expectation,
            "standard_error": self.standard_error,
            "k": self.k,
            "noise_tolerance": self.noise_tolerance,
            "verdict": self.verdict.value,
        }


def witness_report(obs: PauliObservable, state: np.ndarray, target: np.ndarray | None = None) -> WitnessReport:
    tol = white_noise_tolerance(obs, target) if target is not None else None
    return WitnessReport(expectation(obs, state), noise_tolerance=tol)


# --- reference witnesses for Psi6+ ------------------------------------------

#: overlap of Psi6+ with the closest biseparable state
PSI6_OVERLAP_BOUND = Fraction(2, 3)
#: identity weight of the three-setting witness
REDUCED_IDENTITY = Fraction(181, 576)


def psi6_witnesses(target: np.ndarray) -> tuple[PauliObservable, PauliObservable]:
    """(max-overlap witness, three-setting reduced witness) for the six-qubit target."""
    w_max = max_overlap_witness(target, float(PSI6_OVERLAP_BOUND))
    return w_max, reduce_witness(w_max, float(REDUCED_IDENTITY))


# --- correlation tensor ----------------------------------------------------

class CorrelationTensor(dict):
    """Correlation values keyed by setting words over ``{x, y, z}``."""

    @classmethod
    def from_state(cls, state: np.ndarray, words: Iterable[str] | None = None) -> "CorrelationTensor":
        state = np.asarray(state, dtype=complex)
        n = n_qubits(state)
        if words is None:
            words = ("".join(w) for w in itertools.product("xyz", repeat=n))
        return cls({w: pauli_expectation(w.upper(), state) for w in words})

    @classmethod
    def from_bloch_vectors(cls, vectors: np.ndarray) -> "CorrelationTensor":
        """Full tensor ``t_1 (x) ... (x) t_n`` of a pure product state."""
        vectors = np.asarray(vectors, dtype=float)
        full = reduce_outer(vectors)
        n = vectors.shape[0]
        return cls(zip(("".join(w) for w in itertools.product("xyz", repeat=n)), full.reshape(-1)))

    def norm_squared(self) -> float:
        return float(sum(v * v for v in self.values()))


def reduce_outer(vectors: np.ndarray) -> np.ndarray:
    out = np.array(1.0)
    for v in vectors:
        out = np.multiply.outer(out, v)
    return out


def indicator_norm(tensor: Mapping[str, float], subset: Sequence[str]) -> tuple[float, Verdict]:
    """Partial sum of squared correlations; above one rules out full separability."""
    missing = [w for w in subset if w not in tensor]
    if missing:
        raise KeyError(f"correlation tensor lacks entries {missing}")
    value = float(sum(tensor[w] ** 2 for w in subset))
    return value, (Verdict.NOT_FULLY_SEPARABLE if value > 1 else Verdict.INCONCLUSIVE)


def product_state_expectations(obs: PauliObservable, bloch: np.ndarray) -> np.ndarray:
    """Witness expectation on many pure product states at once.

    ``bloch`` has shape (samples, n, 3); the expectation of a Pauli word on a
    product state is the product of the relevant Bloch components.
    """
    bloch = np.asarray(bloch, dtype=float)
    col = {"X": 0, "Y": 1, "Z": 2}
    out = np.zeros(bloch.shape[0])
    for word, c in obs.terms.items():
        prod = np.ones(bloch.shape[0])
        for q, letter in enumerate(word):
            if letter != "I":
                prod = prod * bloch[:, q, col[letter]]
        out += c * prod
    return out


def noisy_expectation(obs: PauliObservable, target: np.ndarray, p: float) -> float:
    return expectation(obs, add_white_noise(target, p))
