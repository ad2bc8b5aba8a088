import numpy as np
import pytest

from qprim.channel import KrausChannel, StochasticMatrix, classical_embed, power_reduced
from qprim.errors import NotPrimitiveError
from qprim.generators import named_channel, random_channel
from qprim.indices import kraus_rank_index
from qprim.spectral import (NotPrimitiveReason, ZeroErrorCase, classify_primitivity,
                            convergence_error, spectral_report, zero_error_classify)


def sorted_moduli(values):
    return sorted((abs(v) for v in values), reverse=True)


def test_depolarizing_spectrum(depolarizing):
    rep = spectral_report(depolarizing)
    np.testing.assert_allclose(sorted_moduli(rep.spectrum), [1, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(rep.fixed_point, np.eye(2) / 2, atol=1e-12)
    assert rep.lambda2_modulus < 1e-12
    assert classify_primitivity(depolarizing, report=rep).primitive
    verdict = zero_error_classify(depolarizing, report=rep)
    assert verdict.case is ZeroErrorCase.VANISHES_FROM_Q
    assert verdict.n_threshold == 1


def test_pauli_spectrum(pauli):
    rep = spectral_report(pauli)
    np.testing.assert_allclose(sorted(np.real(rep.spectrum)), [-1 / 3] * 3 + [1], atol=1e-12)
    assert rep.lambda2_modulus == pytest.approx(1 / 3)
    assert rep.period == 1 and rep.period_matched
    assert str(classify_primitivity(pauli, report=rep)) == 'Primitive'


def test_cyclic_shift_peripheral_spectrum(shift3):
    rep = spectral_report(shift3)
    assert len(rep.peripheral) == 9
    assert rep.fixed_point_multiplicity == 3
    assert rep.period == 3
    assert rep.nontrivial_peripheral == 6
    np.testing.assert_allclose(rep.fixed_point, np.eye(3) / 3, atol=1e-10)
    verdict = classify_primitivity(shift3, report=rep)
    assert not verdict.primitive
    assert verdict.reason is NotPrimitiveReason.PERIPHERAL_EIGENVALUE
    assert str(verdict) == 'NotPrimitive{PeripheralEigenvalue}'
    zero = zero_error_classify(shift3, report=rep)
    assert zero.case is ZeroErrorCase.ALWAYS_POSITIVE
    assert zero.reason == 'peripheral eigenvalue'


def test_identity_channel_has_many_fixed_points():
    ch = KrausChannel.from_kraus([np.eye(2)])
    rep = spectral_report(ch)
    assert rep.fixed_point_multiplicity == 4
    assert rep.nontrivial_peripheral == 0
    verdict = classify_primitivity(ch, report=rep)
    assert verdict.reason is NotPrimitiveReason.MULTIPLE_FIXED_POINTS
    assert zero_error_classify(ch, report=rep).reason == 'multiple fixed points'


def test_amplitude_damping_fixed_point(damping):
    rep = spectral_report(damping)
    np.testing.assert_allclose(rep.fixed_point, np.diag([1.0, 0.0]), atol=1e-10)
    verdict = classify_primitivity(damping, report=rep)
    assert verdict.reason is NotPrimitiveReason.RANK_DEFICIENT_FIXED_POINT
    assert zero_error_classify(damping, report=rep).case is ZeroErrorCase.PRECONDITION_FAILED


def test_nilpotent_map():
    ch = KrausChannel.from_kraus([np.array([[0, 1], [0, 0]])])
    rep = spectral_report(ch)
    assert rep.spectral_radius < 1e-10
    assert rep.fixed_point is None
    assert classify_primitivity(ch, report=rep).reason is NotPrimitiveReason.RANK_DEFICIENT_FIXED_POINT


def test_non_trace_preserving_map_is_normalized(chord3):
    rep = spectral_report(chord3)
    assert rep.spectral_radius > 1
    assert rep.fixed_point_min_eig > 0
    assert np.trace(rep.fixed_point).real == pytest.approx(1.0)
    assert classify_primitivity(chord3, report=rep).primitive


@pytest.mark.parametrize("spec", [
    'pauli', 'shift_chord:D=3', 'shift_chord:D=4', 'wielandt_digraph:D=3', 'depolarizing:D=2,p=1.0',
    'depolarizing:D=3,p=0.3', 'amplitude_damping:gamma=0.5', 'cyclic_shift_unitary:D=3',
    'random_channel:D=3,d=2,seed=1', 'random_channel:D=2,d=1,seed=4',
])
def test_spectral_verdict_matches_full_kraus_rank(spec):
    ch = named_channel(spec)
    if isinstance(ch, StochasticMatrix):
        ch = classical_embed(ch)
    assert classify_primitivity(ch).primitive == (kraus_rank_index(ch) is not None)


def test_convergence_to_fixed_point(pauli):
    X = np.array([[1.0, 0.5], [0.5, 0.0]])
    early = convergence_error(pauli, X, 2)
    late = convergence_error(pauli, X, 12)
    assert late < early
    assert late < 1e-5


def test_convergence_needs_a_fixed_point():
    ch = KrausChannel.from_kraus([np.array([[0, 1], [0, 0]])])
    with pytest.raises(NotPrimitiveError):
        convergence_error(ch, np.eye(2), 3)


def test_periodic_random_unitary_spectrum_is_peripheral():
    rep = spectral_report(random_channel(2, 1, 8))
    assert len(rep.peripheral) == 4
    assert not classify_primitivity(random_channel(2, 1, 8), report=rep).primitive


def test_period_power_splits_a_unique_fixed_point():
    # diagonal swap with dephasing: unique fixed point 1/2, eigenvalue -1
    flip = KrausChannel.from_kraus([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])])
    rep = spectral_report(flip)
    assert rep.fixed_point_multiplicity == 1
    assert rep.period == 2
    verdict = classify_primitivity(flip, report=rep)
    assert verdict.reason is NotPrimitiveReason.PERIPHERAL_EIGENVALUE
    assert spectral_report(power_reduced(flip, rep.period)).fixed_point_multiplicity >= 2


def test_embedded_three_cycle_has_period_three():
    S = np.roll(np.eye(3), 1, axis=0)
    ch = classical_embed(StochasticMatrix.from_entries(S))
    rep = spectral_report(ch)
    assert classify_primitivity(ch, report=rep).reason is NotPrimitiveReason.PERIPHERAL_EIGENVALUE
    assert rep.period == 3
    assert rep.fixed_point_multiplicity == 1
    assert spectral_report(power_reduced(ch, rep.period)).fixed_point_multiplicity == 3
