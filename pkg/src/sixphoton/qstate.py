"""Dense n-qubit state algebra.

Kets are complex vectors of length ``2**n`` and density operators ``2**n x 2**n``
arrays.  Qubit 0 is the most significant bit and H (resp. the first vector of
an analyzer basis) is bit value 0, so index ``0b000111`` is ``|HHHVVV>`` with
qubits ordered (a, b, c, d, e, f).
"""

from __future__ import annotations

import csv
import io
import json
import math
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .optics import AnalyzerSetting, analyzer_basis

MODE_LABELS = "abcdef"
STATE_NAMES = ("Psi6Plus", "GHZ6Plus", "W3", "W3bar", "Psi2Plus")

KET_TOL = 1e-12
NULL_TOL = 1e-14


def n_qubits(state: np.ndarray) -> int:
    dim = np.asarray(state).shape[0]
    n = int(round(math.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def basis_ket(bits: str) -> np.ndarray:
    """``basis_ket("HHV")`` -> computational basis vector; accepts H/V or 0/1."""
    table = str.maketrans("HV", "01")
    idx = int(bits.translate(table), 2)
    ket = np.zeros(2 ** len(bits), dtype=complex)
    ket[idx] = 1
    return ket


def kron(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors)


def flip(ket: np.ndarray) -> np.ndarray:
    """Exchange H and V on every qubit."""
    return np.asarray(ket)[::-1].copy()


def _w3() -> np.ndarray:
    return (basis_ket("HHV") + basis_ket("HVH") + basis_ket("VHH")) / math.sqrt(3)


def reference_state(name: str) -> np.ndarray:
    """Exact amplitudes of a named state.

    ``Psi6Plus = GHZ6Plus / sqrt(2) + (W3bar W3 + W3 W3bar) / 2``.
    """
    if name == "W3":
        return _w3()
    if name == "W3bar":
        return flip(_w3())
    if name == "Psi2Plus":
        return (basis_ket("HV") + basis_ket("VH")) / math.sqrt(2)
    if name == "GHZ6Plus":
        return (basis_ket("HHHVVV") + basis_ket("VVVHHH")) / math.sqrt(2)
    if name == "Psi6Plus":
        w, wb = _w3(), flip(_w3())
        return reference_state("GHZ6Plus") / math.sqrt(2) + (np.kron(wb, w) + np.kron(w, wb)) / 2
    raise ValueError(f"unknown state {name!r}; expected one of {STATE_NAMES}")


def density(state: np.ndarray) -> np.ndarray:
    """Density matrix of a ket (or the matrix itself if already 2-D)."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 2:
        return state
    return np.outer(state, state.conj())


def check_density(rho: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density operator must be square")
    n_qubits(rho)
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError(f"trace {np.trace(rho).real:.3g} != 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density operator is not positive semidefinite")
    return rho


def add_white_noise(ket: np.ndarray, p: float) -> np.ndarray:
    """``p |ket><ket| + (1 - p) * identity / 2**n``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    dim = np.asarray(ket).shape[0]
    return p * density(ket) + (1 - p) * np.eye(dim) / dim


def _measurement_matrix(settings: Sequence[AnalyzerSetting]) -> np.ndarray:
    # rows are <plus|, <minus| for each qubit
    rows = []
    for s in settings:
        plus, minus = analyzer_basis(s)
        rows.append(np.vstack([plus.conj(), minus.conj()]))
    return kron(*rows)


def outcome_distribution(state: np.ndarray, settings: Sequence[AnalyzerSetting]) -> np.ndarray:
    """Probabilities of the ``2**n`` outcome strings of a product measurement.

    Outcome bit 0 is the first vector returned by :func:`analyzer_basis`.
    """
    state = np.asarray(state, dtype=complex)
    n = n_qubits(state)
    if len(settings) != n:
        raise ValueError(f"{len(settings)} settings for {n} qubits")
    b = _measurement_matrix(settings)
    if state.ndim == 1:
        probs = np.abs(b @ state) ** 2
    else:
        probs = np.einsum("ij,jk,ik->i", b, state, b.conj()).real
    return np.clip(probs, 0.0, None)


def parity_signs(n: int) -> np.ndarray:
    """``(-1)**popcount(i)`` for each outcome index."""
    idx = np.arange(2**n)
    pop = np.zeros_like(idx)
    for k in range(n):
        pop += (idx >> k) & 1
    return 1 - 2 * (pop & 1)


def correlation(state: np.ndarray, settings: Sequence[AnalyzerSetting]) -> float:
    """Expectation of the product of the local +/-1 observables."""
    probs = outcome_distribution(state, settings)
    return float(np.clip(parity_signs(len(settings)) @ probs, -1.0, 1.0))


def outcome_labels(settings: Sequence[AnalyzerSetting]) -> list[str]:
    """Labels like ``"HHVHVV"`` in index order (lexicographic with plus < minus)."""
    letters = [s.labels for s in settings]
    n = len(settings)
    return ["".join(letters[k][(i >> (n - 1 - k)) & 1] for k in range(n)) for i in range(2**n)]


class Conditional(NamedTuple):
    """Renormalized post-measurement ket; ``ket`` is None for a null result."""

    ket: np.ndarray | None
    probability: float

    @property
    def is_null(self) -> bool:
        return self.ket is None


def project_qubit(ket: np.ndarray, position: int | str, outcome: np.ndarray) -> Conditional:
    """Project qubit ``position`` onto ``outcome`` and drop it.

    ``position`` is a 0-based index or a mode letter from ``"abcdef"``.
    """
    ket = np.asarray(ket, dtype=complex)
    n = n_qubits(ket)
    if isinstance(position, str):
        position = MODE_LABELS.index(position)
    if not 0 <= position < n:
        raise IndexError(f"qubit {position} out of range for {n} qubits")
    outcome = np.asarray(outcome, dtype=complex)
    if not math.isclose(np.linalg.norm(outcome), 1.0, abs_tol=1e-12):
        raise ValueError("outcome ket must be normalized")
    tensor = ket.reshape((2,) * n)
    reduced = np.tensordot(outcome.conj(), tensor, axes=([0], [position])).reshape(-1)
    prob = float(np.vdot(reduced, reduced).real)
    if prob < NULL_TOL:
        return Conditional(None, 0.0)
    return Conditional(reduced / math.sqrt(prob), prob)


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """``<target| rho |target>`` (rho may also be a ket)."""
    target = np.asarray(target, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] != target.shape[0]:
        raise ValueError("dimension mismatch")
    if rho.ndim == 1:
        value = abs(np.vdot(target, rho)) ** 2
    else:
        value = np.vdot(target, rho @ target).real
    return float(min(max(value, 0.0), 1.0))


def estimate_p_from_correlations(corr_z: float, corr_x: float, corr_y: float) -> float:
    """White-noise weight as the mean absolute value of three perfect-correlation settings."""
    vals = (corr_z, corr_x, corr_y)
    if any(not -1 <= v <= 1 for v in vals):
        raise ValueError("correlations must lie in [-1, 1]")
    return sum(abs(v) for v in vals) / 3


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the qubits in ``keep`` (kept in ascending order)."""
    rho = density(rho)
    n = n_qubits(rho)
    keep = sorted(keep)
    drop = [k for k in range(n) if k not in keep]
    t = rho.reshape((2,) * (2 * n))
    for offset, q in enumerate(sorted(drop, reverse=True)):
        m = n - offset
        t = np.trace(t, axis1=q, axis2=q + m)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def ket_to_json(ket: np.ndarray, labels: Sequence[str] | None = None) -> str:
    ket = np.asarray(ket, dtype=complex)
    n = n_qubits(ket)
    labels = labels or outcome_labels([AnalyzerSetting.named("HV")] * n)
    return json.dumps(
        {
            "n": n,
            "amplitudes": [
                {"label": lab, "re": float(a.real), "im": float(a.imag)} for lab, a in zip(labels, ket)
            ],
        },
        indent=1,
    )


def ket_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    return np.array([complex(a["re"], a["im"]) for a in data["amplitudes"]])


def distribution_to_csv(probs: np.ndarray, settings: Sequence[AnalyzerSetting], errors: np.ndarray | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["outcome", "probability"] + (["stderr"] if errors is not None else [])
    writer.writerow(header)
    for i, lab in enumerate(outcome_labels(settings)):
        row = [lab, repr(float(probs[i]))]
        if errors is not None:
            row.append(repr(float(errors[i])))
        writer.writerow(row)
    return buf.getvalue()
