import numpy as np
import pytest

from qprim.channel import (KrausChannel, StochasticMatrix, apply, canonical_kraus, choi,
                           classical_embed, is_classical_support, power_reduced, transfer_matrix,
                           validate)
from qprim.errors import InvalidInput
from qprim.generators import random_channel, wielandt_digraph
from qprim.numerics import numerical_rank


def random_operator(rng, D):
    return rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))


def test_pauli_is_trace_preserving(pauli):
    report = validate(pauli)
    assert report.is_cp and report.is_tp
    assert report.d_independent == 3
    assert report.tp_deviation < 1e-12


def test_shift_chord_is_not_trace_preserving(chord3):
    report = validate(chord3)
    assert not report.is_tp
    # sum A^dagger A = 1 + |2><2|
    assert report.tp_deviation == pytest.approx(1.0)


def test_declared_tp_is_checked(chord3):
    with pytest.raises(InvalidInput):
        KrausChannel.from_kraus(chord3.kraus, tp=True)


@pytest.mark.parametrize("kraus", [[], [np.eye(2), np.eye(3)], [np.zeros((2, 2))], [[[1.0, np.inf], [0, 1]]]])
def test_invalid_kraus_lists(kraus):
    with pytest.raises(InvalidInput):
        KrausChannel.from_kraus(kraus)


def test_dependent_kraus_are_reduced_without_changing_the_map(rng):
    A, B = random_operator(rng, 3), random_operator(rng, 3)
    ops = [A, B, 2 * A - B]
    ch = KrausChannel.from_kraus(ops)
    assert ch.d == 2
    X = random_operator(rng, 3)
    expected = sum(K @ X @ K.conj().T for K in ops)
    np.testing.assert_allclose(apply(ch, X), expected, atol=1e-10)


def test_independent_kraus_are_kept_verbatim(pauli):
    np.testing.assert_array_equal(pauli.kraus[0], np.array([[0, 1], [1, 0]]) / np.sqrt(3))


def test_canonical_kraus_is_hs_orthogonal(rng):
    ops = canonical_kraus([random_operator(rng, 2) for _ in range(6)])
    assert len(ops) == 4
    gram = np.array([[np.vdot(a, b) for b in ops] for a in ops])
    np.testing.assert_allclose(gram - np.diag(np.diag(gram)), 0, atol=1e-10)


def test_trace_preservation_property():
    for seed in range(10):
        ch = random_channel(3, 1 + seed % 9, seed)
        X = random_operator(np.random.default_rng(seed), 3)
        assert abs(np.trace(apply(ch, X)) - np.trace(X)) <= 1e-9 * np.linalg.norm(X, 'nuc')
        assert validate(ch).is_tp


def test_transfer_matrix_matches_apply(rng):
    ch = random_channel(3, 4, 11)
    X = random_operator(rng, 3)
    np.testing.assert_allclose(transfer_matrix(ch) @ X.reshape(-1), apply(ch, X).reshape(-1), atol=1e-12)


def test_choi_rank_is_kraus_rank(pauli, chord3):
    for ch in (pauli, chord3, random_channel(2, 3, 5)):
        omega = choi(ch).matrix
        np.testing.assert_allclose(omega, omega.conj().T, atol=1e-12)
        assert numerical_rank(omega) == ch.d


def test_choi_of_identity_is_maximally_entangled():
    omega = choi(KrausChannel.from_kraus([np.eye(2)])).matrix
    vec = np.eye(2).reshape(-1)
    np.testing.assert_allclose(omega, np.outer(vec, vec))


def test_power_reduced_matches_repeated_application(rng):
    ch = random_channel(2, 3, 3)
    X = random_operator(rng, 2)
    cube = power_reduced(ch, 3)
    assert cube.d <= 4
    np.testing.assert_allclose(apply(cube, X), apply(ch, apply(ch, apply(ch, X))), atol=1e-10)
    assert cube.is_tp


def test_power_of_nilpotent_map_is_zero():
    ch = KrausChannel.from_kraus([np.array([[0, 1], [0, 0]])])
    square = power_reduced(ch, 2)
    assert not np.any(square.kraus[0])
    with pytest.raises(InvalidInput):
        power_reduced(ch, 0)


def test_stochastic_validation():
    with pytest.raises(InvalidInput):
        StochasticMatrix.from_entries([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(InvalidInput):
        StochasticMatrix.from_entries([[1.5, 0.0], [-0.5, 1.0]])
    with pytest.raises(InvalidInput):
        StochasticMatrix.from_entries([[1.0, 0.0, 0.0]])
    S = StochasticMatrix.from_entries([[0.25, 1.0], [0.75, 0.0]])
    assert S.support().tolist() == [[True, True], [True, False]]


def test_classical_embedding_reproduces_the_walk(rng):
    S = wielandt_digraph(4)
    ch = classical_embed(S)
    assert ch.d == 5
    p = rng.random(4)
    out = apply(ch, np.diag(p))
    np.testing.assert_allclose(out, np.diag(S.entries @ p), atol=1e-15)
    support = is_classical_support(ch)
    np.testing.assert_array_equal(support, S.support())


def test_classical_support_rejects_quantum_spans(pauli):
    assert is_classical_support(pauli) is None


@pytest.mark.parametrize("seed", range(50))
def test_power_reduced_matches_iterated_map(seed):
    D = 2 + seed % 3
    ch = random_channel(D, 1 + seed % (D * D), seed)
    rng = np.random.default_rng(seed)
    G = random_operator(rng, D)
    rho = G @ G.conj().T
    rho /= np.trace(rho)
    expected = rho
    for n in range(1, 13):
        expected = apply(ch, expected)
        got = apply(power_reduced(ch, n), rho)
        assert np.linalg.norm(got - expected) <= 1e-8 * np.linalg.norm(expected)
