"""Qubit-level 1 -> 3 telecloning over the six-qubit resource state.

The unknown input is qubit 0 of the composite register; resource qubits are
1..6 in the order (a, b, c, d, e, f).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .qstate import Conditional, density, fidelity, n_qubits, partial_trace, reference_state
from .witness import PAULI

#: two-bit outcome -> Bell state name
BELL_NAMES = {(0, 0): "Phi+", (0, 1): "Psi+", (1, 0): "Phi-", (1, 1): "Psi-"}
OUTCOMES = tuple(BELL_NAMES)


class ProtocolError(RuntimeError):
    """No Pauli correction table makes the receivers' fidelity outcome-independent."""


def bell_state(outcome: tuple[int, int]) -> np.ndarray:
    sign_bit, flip_bit = outcome
    ket = np.zeros(4, dtype=complex)
    ket[flip_bit] = 1  # |0, flip>
    ket[2 + (1 - flip_bit)] = (-1) ** sign_bit  # |1, not flip>
    return ket / math.sqrt(2)


@dataclass(frozen=True)
class ProtocolLayout:
    port: int = 1
    ancillas: tuple[int, int] = (2, 3)
    receivers: tuple[int, int, int] = (4, 5, 6)
    input_qubit: int = 0

    def __post_init__(self):
        used = [self.port, *self.ancillas, *self.receivers]
        if sorted(used) != list(range(1, 7)):
            raise ValueError(f"layout {used} does not partition qubits 1..6")
        if self.input_qubit != 0:
            raise ValueError("input qubit must be 0")


def bell_measure(state: np.ndarray, q1: int, q2: int, outcome: tuple[int, int]) -> Conditional:
    """Project qubits ``(q1, q2)`` onto a Bell state and remove them."""
    if q1 == q2:
        raise ValueError("Bell measurement needs two distinct qubits")
    state = np.asarray(state, dtype=complex)
    n = n_qubits(state)
    bell = bell_state(tuple(outcome)).reshape(2, 2)
    tensor = state.reshape((2,) * n)
    reduced = np.tensordot(bell.conj(), tensor, axes=([0, 1], [q1, q2])).reshape(-1)
    prob = float(np.vdot(reduced, reduced).real)
    if prob < 1e-14:
        return Conditional(None, 0.0)
    return Conditional(reduced / math.sqrt(prob), prob)


def _remaining_index(layout: ProtocolLayout, qubit: int) -> int:
    """Position of ``qubit`` after the input and port have been measured out."""
    rest = [q for q in range(7) if q not in (layout.input_qubit, layout.port)]
    return rest.index(qubit)


def _receiver_states(
    post: np.ndarray, layout: ProtocolLayout, corrections: Sequence[str]
) -> list[np.ndarray]:
    out = []
    for r, letter in zip(layout.receivers, corrections):
        rho = partial_trace(post, [_remaining_index(layout, r)])
        u = PAULI[letter]
        out.append(u @ rho @ u.conj().T)
    return out


def _probe_inputs() -> list[np.ndarray]:
    s = 1 / math.sqrt(2)
    return [np.array(v, dtype=complex) for v in ([1, 0], [0, 1], [s, s], [s, -s], [s, 1j * s], [s, -1j * s])]


def _fidelity_profile(resource: np.ndarray, layout: ProtocolLayout, outcome, corrections) -> np.ndarray:
    rows = []
    for x in _probe_inputs():
        cond = bell_measure(np.kron(x, resource), layout.input_qubit, layout.port, outcome)
        if cond.is_null:
            return np.full(len(layout.receivers), np.nan)
        rows.append([fidelity(rho, x) for rho in _receiver_states(cond.ket, layout, corrections)])
    return np.array(rows)


@dataclass(frozen=True)
class CorrectionTable:
    """Per Bell outcome, the Pauli letter applied at each receiver."""

    corrections: Mapping[tuple[int, int], tuple[str, ...]]
    uniform: bool

    def __post_init__(self):
        if set(self.corrections) != set(OUTCOMES):
            raise ValueError("correction table needs all four Bell outcomes")
        if any(set(c) - set("IXYZ") for c in self.corrections.values()):
            raise ValueError("corrections must be Pauli letters")

    def to_dict(self) -> dict:
        return {BELL_NAMES[k]: "".join(v) for k, v in self.corrections.items()}


def derive_correction_table(layout: ProtocolLayout = ProtocolLayout(), resource: np.ndarray | None = None,
                            atol: float = 1e-9) -> CorrectionTable:
    """Search Pauli corrections making receiver fidelities outcome- and input-independent.

    The same Pauli at every receiver is tried first; only if that fails for
    some outcome are individual per-receiver corrections searched.
    """
    resource = reference_state("Psi6Plus") if resource is None else resource

    def best(candidates):
        scored = []
        for corr in candidates:
            prof = _fidelity_profile(resource, layout, outcome, corr)
            if np.isnan(prof).any():
                continue
            scored.append((prof.min(), prof, corr))
        if not scored:
            return None
        top = max(scored, key=lambda s: s[0])
        return top[1], top[2]

    for uniform, candidates in (
        (True, [(p,) * 3 for p in "IXYZ"]),
        (False, list(itertools.product("IXYZ", repeat=3))),
    ):
        table, profiles = {}, []
        for outcome in OUTCOMES:
            found = best(candidates)
            if found is None:
                break
            profiles.append(found[0])
            table[outcome] = tuple(found[1])
        else:
            ref = profiles[0]
            universal = np.allclose(ref, ref[0, 0], atol=atol)
            if universal and all(np.allclose(p, ref, atol=atol) for p in profiles):
                return CorrectionTable(table, uniform)
    raise ProtocolError(f"no Pauli correction table gives outcome-independent fidelity for {layout}")


@dataclass(frozen=True)
class TelecloneResult:
    outcome: tuple[int, int]
    probability: float
    receiver_states: tuple[np.ndarray, ...]
    fidelities: tuple[float, ...]


def teleclone(
    input_ket: np.ndarray,
    layout: ProtocolLayout = ProtocolLayout(),
    table: CorrectionTable | None = None,
    outcome: tuple[int, int] | None = None,
    seed: int | None = None,
    resource: np.ndarray | None = None,
) -> TelecloneResult:
    """Run the protocol for one input; the Bell outcome is given or sampled from ``seed``."""
    resource = reference_state("Psi6Plus") if resource is None else np.asarray(resource, dtype=complex)
    table = table or derive_correction_table(layout, resource)
    x = np.asarray(input_ket, dtype=complex)
    x = x / np.linalg.norm(x)
    joint = np.kron(x, resource)
    if outcome is None:
        rng = np.random.default_rng(seed)
        probs = [bell_measure(joint, layout.input_qubit, layout.port, o).probability for o in OUTCOMES]
        outcome = OUTCOMES[rng.choice(4, p=np.array(probs) / sum(probs))]
    outcome = tuple(outcome)
    cond = bell_measure(joint, layout.input_qubit, layout.port, outcome)
    if cond.is_null:
        raise ValueError(f"Bell outcome {BELL_NAMES[outcome]} has zero probability")
    states = _receiver_states(cond.ket, layout, table.corrections[outcome])
    fids = tuple(fidelity(rho, x) for rho in states)
    return TelecloneResult(outcome, cond.probability, tuple(states), fids)


def optimal_fidelity(m: int) -> float:
    """Optimal 1 -> M universal cloning fidelity ``(2M + 1) / (3M)``."""
    if m < 1:
        raise ValueError("M must be >= 1")
    return (2 * m + 1) / (3 * m)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    rho = density(rho)
    return np.array([np.trace(rho @ PAULI[c]).real for c in "XYZ"])
