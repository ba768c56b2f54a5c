import itertools
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sixphoton.qstate import add_white_noise, kron
from sixphoton.witness import (
    CorrelationTensor,
    PauliObservable,
    Verdict,
    WitnessReport,
    expectation,
    indicator_norm,
    max_overlap_witness,
    pauli_decompose,
    pauli_matrix,
    product_state_expectations,
    psi6_witnesses,
    reduce_witness,
    white_noise_tolerance,
)

from eq_transcription import printed_terms, printed_text
from conftest import haar_ket


def slow_decompose(op):
    """Reference: one trace per Pauli word with dense matrices."""
    n = int(np.log2(op.shape[0]))
    return {
        "".join(w): np.trace(op @ pauli_matrix("".join(w))).real / 2**n
        for w in itertools.product("IXYZ", repeat=n)
    }


@pytest.fixture(scope="module")
def witnesses(psi6):
    return psi6_witnesses(psi6)


def random_hermitian(rng, n):
    a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    return a + a.conj().T


def test_identity_decomposition():
    obs = pauli_decompose(np.eye(64) / 64)
    assert obs.terms == pytest.approx({"IIIIII": 1 / 64})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decomposition_matches_trace_formula(rng, n):
    op = random_hermitian(rng, n)
    fast = pauli_decompose(op).terms
    for w, c in slow_decompose(op).items():
        assert fast.get(w, 0.0) == pytest.approx(c, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_decompose_reconstruct_round_trip(seed, n):
    op = random_hermitian(np.random.default_rng(seed), n)
    assert np.allclose(pauli_decompose(op).to_matrix(), op, atol=1e-10)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError, match="Hermitian"):
        pauli_decompose(np.array([[0, 1], [0, 0]]))


def test_psi6_projector_coefficients(psi6):
    obs = pauli_decompose(np.outer(psi6, psi6.conj()))
    assert obs.terms["ZZZZZZ"] == pytest.approx(-1 / 64)
    assert obs.terms["XXXXXX"] == pytest.approx(1 / 64)
    assert obs.terms["YYYYYY"] == pytest.approx(1 / 64)
    assert np.allclose(obs.to_matrix(), np.outer(psi6, psi6.conj()), atol=1e-10)


def test_max_overlap_witness(psi6, witnesses):
    w_max, _ = witnesses
    assert expectation(w_max, psi6) == pytest.approx(-1 / 3, abs=1e-12)
    assert expectation(w_max, np.eye(64) / 64) == pytest.approx(2 / 3 - 1 / 64, abs=1e-12)
    # 2/3 - p - (1 - p)/64 = 0  ->  1 - p = 64/189
    p_star = (Fraction(2, 3) - Fraction(1, 64)) / (1 - Fraction(1, 64))
    assert 1 - p_star == Fraction(64, 189)
    assert white_noise_tolerance(w_max, psi6) == pytest.approx(64 / 189, abs=1e-12)


def test_reduced_witness_values(psi6, witnesses):
    _, w = witnesses
    assert expectation(w, psi6) == pytest.approx(-1 / 18, abs=1e-12)
    assert expectation(w, np.eye(64) / 64) == pytest.approx(181 / 576, abs=1e-12)
    filtered = sum(c * expectation(PauliObservable(6, {word: 1.0}), psi6) for word, c in w.terms.items() if word != "IIIIII")
    assert filtered == pytest.approx(-213 / 576, abs=1e-12)
    assert white_noise_tolerance(w, psi6) == pytest.approx(32 / 213, abs=1e-12)
    assert expectation(w, add_white_noise(psi6, 0.859)) == pytest.approx(181 / 576 - 0.859 * 213 / 576, abs=1e-12)


def test_reduced_witness_structure(witnesses):
    _, w = witnesses
    assert w.single_type()
    assert w.settings_needed() == {"X", "Y", "Z"}
    for word in w.terms:
        assert len(set(word) - {"I"}) <= 1
    assert len(w) == 94


def test_reduced_witness_matches_printed_equation(witnesses):
    _, w = witnesses
    printed = printed_terms()
    assert set(w.terms) == set(printed)
    for word, c in printed.items():
        assert w.terms[word] == pytest.approx(float(c), abs=1e-15)


def test_golden_file(witnesses):
    golden_text = resources.files("sixphoton.data").joinpath("reduced_witness.txt").read_text()
    assert golden_text.split("\n", 1)[1] == printed_text()
    golden = PauliObservable.from_text(golden_text)
    _, w = witnesses
    assert golden.terms.keys() == w.terms.keys()
    for word in w.terms:
        assert golden.terms[word] == pytest.approx(w.terms[word], abs=1e-15)


def test_text_round_trip(witnesses):
    _, w = witnesses
    back = PauliObservable.from_text(w.to_text())
    assert back.terms == pytest.approx(w.terms)
    with pytest.raises(ValueError, match="line 2"):
        PauliObservable.from_text("0.5  XX\nnot-a-line\n")


def test_tolerance_of_degenerate_witness():
    # zero on the mixed state, -1 on the target
    target = np.array([1, 0], complex)
    obs = PauliObservable(1, {"Z": -1.0})
    assert white_noise_tolerance(obs, target) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        white_noise_tolerance(PauliObservable(1, {"I": 1.0}), target)


def test_containment_on_noise_family(psi6, witnesses):
    w_max, w = witnesses
    for p in np.linspace(0, 1, 201):
        rho = add_white_noise(psi6, p)
        if expectation(w, rho) < 0:
            assert expectation(w_max, rho) < 0


def random_product(rng, n=6):
    kets = [haar_ket(rng) for _ in range(n)]
    return kets, kron(*kets)


def bloch(k):
    return np.array([2 * (k[0].conj() * k[1]).real, 2 * (k[0].conj() * k[1]).imag, abs(k[0]) ** 2 - abs(k[1]) ** 2])


def test_product_states_vectorized_matches_dense(rng, witnesses):
    w_max, w = witnesses
    for _ in range(5):
        kets, full = random_product(rng)
        vecs = np.array([[bloch(k) for k in kets]])
        assert product_state_expectations(w, vecs)[0] == pytest.approx(expectation(w, full), abs=1e-12)
        assert product_state_expectations(w_max, vecs)[0] == pytest.approx(expectation(w_max, full), abs=1e-12)


def test_indicator(psi6):
    tensor = CorrelationTensor.from_state(psi6, ["zzzzzz", "xxxxxx", "yyyyyy"])
    value, verdict = indicator_norm(tensor, ["zzzzzz", "xxxxxx", "yyyyyy"])
    assert value == pytest.approx(3) and verdict is Verdict.NOT_FULLY_SEPARABLE
    noisy = CorrelationTensor.from_state(add_white_noise(psi6, 0.859), ["zzzzzz", "xxxxxx", "yyyyyy"])
    assert indicator_norm(noisy, ["zzzzzz", "xxxxxx", "yyyyyy"])[0] == pytest.approx(3 * 0.859**2, abs=1e-12)
    for pair in itertools.combinations(["zzzzzz", "xxxxxx", "yyyyyy"], 2):
        assert indicator_norm(noisy, pair)[0] == pytest.approx(2 * 0.859**2, abs=1e-12)
    with pytest.raises(KeyError):
        indicator_norm(noisy, ["zzzzzx"])


def test_full_tensor_of_product_state_has_unit_norm(rng):
    kets, full = random_product(rng)
    dense = CorrelationTensor.from_state(full)
    assert len(dense) == 3**6
    assert dense.norm_squared() == pytest.approx(1, abs=1e-10)
    assert CorrelationTensor.from_bloch_vectors([bloch(k) for k in kets]).norm_squared() == pytest.approx(1, abs=1e-10)


def test_full_tensor_of_psi6_exceeds_one(psi6):
    assert CorrelationTensor.from_state(psi6).norm_squared() > 1


def test_report_verdict():
    assert WitnessReport(-0.02, 0.014).verdict is Verdict.ENTANGLED
    assert WitnessReport(-0.02, 0.014, k=1.5).verdict is Verdict.INCONCLUSIVE
    assert WitnessReport(0.1).verdict is Verdict.INCONCLUSIVE


def test_reduce_rejects_nonpositive_constant(witnesses):
    with pytest.raises(ValueError):
        reduce_witness(witnesses[0], 0)
    with pytest.raises(ValueError):
        max_overlap_witness(np.array([1, 0]), 1.5)
