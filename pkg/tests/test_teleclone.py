import math

import numpy as np
import pytest

from sixphoton.qstate import basis_ket, kron, reference_state
from sixphoton.teleclone import (
    OUTCOMES,
    CorrectionTable,
    ProtocolError,
    ProtocolLayout,
    bell_measure,
    bell_state,
    bloch_vector,
    derive_correction_table,
    optimal_fidelity,
    teleclone,
)

from conftest import haar_ket


@pytest.fixture(scope="module")
def table():
    return derive_correction_table(ProtocolLayout())


def test_bell_states_orthonormal():
    m = np.array([bell_state(o) for o in OUTCOMES])
    assert np.allclose(m @ m.conj().T, np.eye(4))
    assert np.allclose(bell_state((0, 0)), (basis_ket("HH") + basis_ket("VV")) / math.sqrt(2))


def test_bell_measure_on_bell_pair():
    cond = bell_measure(bell_state((0, 0)), 0, 1, (0, 0))
    assert cond.probability == pytest.approx(1)
    assert bell_measure(bell_state((0, 0)), 0, 1, (1, 1)).is_null


def test_bell_measure_product_state():
    probs = [bell_measure(basis_ket("HH"), 0, 1, o).probability for o in OUTCOMES]
    expected = {(0, 0): 0.5, (1, 0): 0.5, (0, 1): 0.0, (1, 1): 0.0}
    assert probs == pytest.approx([expected[o] for o in OUTCOMES])


def test_bell_measure_rejects_same_qubit():
    with pytest.raises(ValueError):
        bell_measure(basis_ket("HH"), 0, 0, (0, 0))


def test_outcomes_equiprobable(psi6, rng):
    for x in [np.array([1, 0])] + [haar_ket(rng) for _ in range(10)]:
        joint = kron(x, psi6)
        probs = [bell_measure(joint, 0, 1, o).probability for o in OUTCOMES]
        assert probs == pytest.approx([0.25] * 4, abs=1e-12)


def test_canonical_table(table):
    assert table.uniform
    assert any(set(c) == {"I"} for c in table.corrections.values())
    assert set(table.corrections) == set(OUTCOMES)


@pytest.mark.parametrize("x", [np.array([1, 0]), np.array([1, 1]) / math.sqrt(2)])
def test_fidelity_seven_ninths(table, x):
    for o in OUTCOMES:
        res = teleclone(x, table=table, outcome=o)
        assert res.fidelities == pytest.approx((7 / 9,) * 3, abs=1e-12)


def test_haar_sweep(table, rng):
    for _ in range(100):
        x = haar_ket(rng)
        for o in OUTCOMES:
            res = teleclone(x, table=table, outcome=o)
            assert max(abs(f - 7 / 9) for f in res.fidelities) < 1e-9


def test_bloch_vector_shrinks_by_five_ninths(table, rng):
    for _ in range(10):
        x = haar_ket(rng)
        r_in = bloch_vector(x)
        res = teleclone(x, table=table, seed=int(rng.integers(1 << 31)))
        for rho in res.receiver_states:
            assert np.allclose(bloch_vector(rho), 5 / 9 * r_in, atol=1e-10)


def test_sampled_outcome_is_reproducible(table):
    x = np.array([0.6, 0.8j])
    assert teleclone(x, table=table, seed=11).outcome == teleclone(x, table=table, seed=11).outcome


def test_other_port_in_first_block_works():
    lay = ProtocolLayout(port=2, ancillas=(1, 3), receivers=(4, 5, 6))
    tab = derive_correction_table(lay)
    res = teleclone(np.array([1, 0]), lay, tab, outcome=(1, 0))
    assert res.fidelities == pytest.approx((7 / 9,) * 3)


def test_mirrored_layout_works():
    lay = ProtocolLayout(port=4, ancillas=(5, 6), receivers=(1, 2, 3))
    assert derive_correction_table(lay).uniform


def test_scrambled_layout_characterization():
    # receivers drawn from both blocks: no Pauli table equalizes the receivers
    lay = ProtocolLayout(port=1, ancillas=(5, 6), receivers=(2, 3, 4))
    with pytest.raises(ProtocolError):
        derive_correction_table(lay)


def test_layout_validation():
    with pytest.raises(ValueError):
        ProtocolLayout(port=1, ancillas=(1, 3), receivers=(4, 5, 6))
    with pytest.raises(ValueError):
        CorrectionTable({(0, 0): ("I",) * 3}, True)


def test_optimal_fidelity():
    assert optimal_fidelity(3) == pytest.approx(7 / 9)
    assert optimal_fidelity(1) == 1
    assert optimal_fidelity(10**6) == pytest.approx(2 / 3, abs=1e-6)
    assert optimal_fidelity(10**6) > 2 / 3
    with pytest.raises(ValueError):
        optimal_fidelity(0)
