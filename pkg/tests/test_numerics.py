import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homsim.numerics import (
    BasisSign,
    Convention,
    ConventionMismatchError,
    ElementMatrix,
    FieldVector,
    apply,
    bs_matrix,
    compose,
    equal_up_to_global_phase,
    global_phase_distance,
    identity,
    intensities,
    phase_matrix,
    phasor,
)

U, P = Convention.UNITARY, Convention.PAPER_LITERAL
PLUS, MINUS = BasisSign.PLUS, BasisSign.MINUS
R2 = math.sqrt(2)


def matmul2(a, b):
    """Plain-python 2x2 product, independent of numpy."""
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def as_lists(m):
    return [[complex(x) for x in row] for row in m.entries]


angles = st.floats(-20, 20, allow_nan=False)
amps = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def test_bs_matrix_unitary_plus():
    m = bs_matrix(PLUS, U)
    np.testing.assert_allclose(m.entries, np.array([[1, 1j], [1j, 1]]) / R2, atol=0)
    assert m.is_unitary()


def test_bs_matrix_paper_literal_minus():
    m = bs_matrix(MINUS, P)
    assert np.array_equal(m.entries, np.array([[1, -1j], [-1j, 1]]))
    assert m.convention is P


def test_basis_sign_negation_is_involution():
    assert -PLUS is MINUS and -MINUS is PLUS
    assert -(-PLUS) is PLUS
    assert PLUS.phi_bs == math.pi / 2 and MINUS.phi_bs == -math.pi / 2
    assert len(BasisSign) == 2


@pytest.mark.parametrize("phi,diag", [(0.0, (1, 1)), (math.pi, (1, -1)), (math.pi / 2, (1, 1j))])
def test_phase_matrix_examples(phi, diag):
    m = phase_matrix("d", phi)
    assert np.array_equal(m.entries, np.diag(diag).astype(complex))
    assert m.is_unitary()


def test_phase_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        phase_matrix("d", float("nan"))
    with pytest.raises(ValueError):
        phase_matrix("d", float("inf"))


def test_phasor_exact_at_quadrature():
    assert phasor(math.pi / 2) == 1j
    assert phasor(-math.pi / 2) == -1j
    assert phasor(math.pi) == -1
    assert phasor(2 * math.pi) == 1
    assert abs(phasor(0.3) - cmath.exp(0.3j)) < 1e-15


def test_compose_identity():
    assert np.array_equal(compose([identity(), identity()]).entries, np.eye(2))


def test_compose_mzi_zero_phase_is_swap():
    bs = bs_matrix(PLUS, U)
    got = compose([bs, phase_matrix("d", 0.0), bs])
    oracle = matmul2(matmul2(as_lists(bs), [[1, 0], [0, 1]]), as_lists(bs))
    np.testing.assert_allclose(got.entries, oracle, atol=1e-15)
    assert equal_up_to_global_phase(got, np.array([[0, 1], [1, 0]]))


def test_compose_mzi_pi_phase_keeps_port():
    bs = bs_matrix(PLUS, U)
    got = compose([bs, phase_matrix("d", math.pi), bs])
    out = apply(got, FieldVector([1, 0]))
    assert abs(abs(out[0]) - 1) < 1e-15 and abs(out[1]) < 1e-15


def test_compose_order_rightmost_acts_first():
    a = ElementMatrix([[1, 2], [3, 4]])
    b = ElementMatrix([[0, 1], [1, 0]])
    np.testing.assert_array_equal(compose([a, b]).entries, matmul2([[1, 2], [3, 4]], [[0, 1], [1, 0]]))


def test_compose_rejects_mixed_conventions():
    with pytest.raises(ConventionMismatchError):
        compose([bs_matrix(PLUS, U), bs_matrix(PLUS, P)])


def test_compose_non_unitary_flag_propagates():
    mix = ElementMatrix(np.eye(2) / R2, U, non_unitary=True)
    assert compose([bs_matrix(PLUS), mix]).non_unitary
    assert not compose([bs_matrix(PLUS), bs_matrix(MINUS)]).non_unitary


def test_apply_identity():
    v = FieldVector([0.7 - 0.2j, 0])
    assert apply(identity(), v) == v


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 2, 2.5, -1.0])
def test_apply_two_input_bs(theta):
    e = cmath.exp(1j * theta)
    out = apply(bs_matrix(PLUS), FieldVector([1, e]))
    expected = [(1 + 1j * e) / R2, (1j + e) / R2]
    np.testing.assert_allclose(out.amps, expected, atol=1e-15)


def test_apply_single_input_equal_split():
    out = apply(bs_matrix(PLUS), FieldVector([1, 0]))
    np.testing.assert_allclose(out.amps, [1 / R2, 1j / R2], atol=0)


def test_intensities_examples():
    assert intensities(FieldVector([1, 0])) == (1.0, 0.0)
    i_c, i_d = intensities(apply(bs_matrix(PLUS), FieldVector([1, phasor(math.pi / 2)])))
    assert i_c == 0.0 and abs(i_d - 2) < 1e-15
    i_c, i_d = intensities(apply(bs_matrix(PLUS), FieldVector([1, 1])))
    assert abs(i_c - 1) < 1e-15 and abs(i_d - 1) < 1e-15


def test_field_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        FieldVector([complex("nan"), 0])


def test_immutability():
    m = bs_matrix(PLUS)
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5


def test_global_phase_metric():
    a = np.array([[1, 2j], [0.5, -1]])
    assert global_phase_distance(a, cmath.exp(0.77j) * a) < 1e-14
    assert global_phase_distance(a, -a) < 1e-14
    assert not equal_up_to_global_phase(a, 2 * a)
    # an orthogonal pair is at distance sqrt(|a|^2 + |b|^2)
    assert abs(global_phase_distance([1, 0], [0, 1]) - R2) < 1e-15


@st.composite
def unitary_elements(draw):
    kind = draw(st.sampled_from(["bs+", "bs-", "phase_c", "phase_d"]))
    if kind.startswith("bs"):
        return bs_matrix(PLUS if kind == "bs+" else MINUS)
    return phase_matrix(kind[-1], draw(angles))


@given(st.lists(unitary_elements(), min_size=1, max_size=6), amps, amps)
def test_energy_conservation(mats, a, b):
    m = compose(mats)
    v = FieldVector([a, b])
    assert m.is_unitary()
    assert abs(apply(m, v).total_intensity - v.total_intensity) < 1e-12 * max(1, v.total_intensity)


def test_conjugate_pair_is_identity():
    prod = compose([bs_matrix(PLUS), bs_matrix(MINUS)])
    assert global_phase_distance(prod, np.eye(2)) < 1e-12


@settings(max_examples=200)
@given(st.lists(unitary_elements(), min_size=1, max_size=4), amps, amps, amps, amps, amps)
def test_apply_linear(mats, alpha, a, b, c, d):
    m = compose(mats)
    v, w = FieldVector([a, b]), FieldVector([c, d])
    lhs = apply(m, alpha * v + w).amps
    rhs = (alpha * apply(m, v) + apply(m, w)).amps
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha)) * 20)


@given(amps, amps, st.sampled_from([PLUS, MINUS]))
def test_paper_literal_doubles_intensity(a, b, sign):
    v = FieldVector([a, b])
    iu = intensities(apply(bs_matrix(sign, U), v))
    ip = intensities(apply(bs_matrix(sign, P), v))
    for x, y in zip(iu, ip):
        assert abs(y - 2 * x) <= 1e-12 * max(1.0, y)
