"""Exact checks of the symbolic algebra, the indefinite state, and its modular maps."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from ccrlab.exactcomplex import I, ONE, ZERO, ComplexRational
from ccrlab.heisenberg import (
    AlgebraElement,
    CovarianceTable,
    Generator,
    GnsVector,
    P,
    P_PRIME,
    Q,
    Q_PRIME,
    UNIT,
    UnsupportedDomainError,
    WordLengthError,
    adjoint,
    commutator,
    commutant_pair_minus,
    commutant_pair_plus,
    evolve,
    fock_a,
    fock_b,
    gns_inner,
    hamiltonian,
    metric_conjugate,
    modular_apply,
    modular_conjugation,
    modular_inv_sqrt,
    modular_sqrt,
    moment_matrix,
    normal_order,
    omega,
    scale_transform,
    unprimed_monomials,
    weyl_moment_partial_sum,
    wick_value,
)

TABLE = CovarianceTable()
GENS = list(Generator)


def random_monomial(rng, max_degree=4, primed=True):
    width = 4 if primed else 2
    key = [0, 0, 0, 0]
    for _ in range(int(rng.integers(0, max_degree + 1))):
        key[int(rng.integers(0, width))] += 1
    return AlgebraElement.monomial(tuple(key))


def random_element(rng, terms=3, max_degree=4, primed=True):
    out = AlgebraElement.zero()
    for _ in range(terms):
        coeff = ComplexRational(
            Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))),
            Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))),
        )
        out = out + random_monomial(rng, max_degree, primed) * coeff
    return out


# -- normal ordering ------------------------------------------------------------


def test_normal_order_ordered_word():
    assert normal_order([Generator.Q, Generator.P]) == AlgebraElement.monomial((1, 1, 0, 0))


def test_normal_order_swap():
    # pq = qp - i, forced by [q, p] = i
    assert normal_order([Generator.P, Generator.Q]) == Q * P - I * UNIT


def test_normal_order_mixed_primed():
    # p p' q = q p p' - i p' (primed factors commute with unprimed)
    expected = AlgebraElement.monomial((1, 1, 0, 1)) - I * P_PRIME
    assert normal_order([Generator.P, Generator.P_PRIME, Generator.Q]) == expected


def test_normal_order_length_bound():
    with pytest.raises(WordLengthError):
        normal_order([Generator.Q] * 33)
    assert normal_order([Generator.Q] * 33, max_len=64) == AlgebraElement.monomial((33, 0, 0, 0))


def test_commutation_relations():
    assert commutator(Q, P) == I * UNIT
    assert commutator(Q_PRIME, P_PRIME) == -I * UNIT
    for x in (Q, P):
        for y in (Q_PRIME, P_PRIME):
            assert commutator(x, y).is_zero


def test_product_associativity_random():
    rng = np.random.default_rng(101)
    for _ in range(100):
        a, b, c = (random_monomial(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


# -- adjoint ---------------------------------------------------------------------


def test_adjoint_examples():
    assert adjoint(Q) == Q
    assert adjoint(Q + I * P) == Q - I * P
    # (i qp)* = -i pq = -i qp - 1
    assert adjoint(I * (Q * P)) == -I * (Q * P) - UNIT


def test_adjoint_involution_and_antihomomorphism():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = random_element(rng)
        b = random_element(rng)
        assert adjoint(adjoint(a)) == a
        assert adjoint(a * b) == adjoint(b) * adjoint(a)


# -- evolution ---------------------------------------------------------------------


def test_evolve_generators():
    t = Fraction(5, 3)
    assert evolve(Q, t) == Q + P * ComplexRational(t)
    assert evolve(P, t) == P
    assert evolve(Q_PRIME, t) == Q_PRIME - P_PRIME * ComplexRational(t)
    assert evolve(P_PRIME, t) == P_PRIME


def test_evolve_group_law():
    rng = np.random.default_rng(13)
    for _ in range(20):
        e = random_element(rng, terms=2, max_degree=3)
        s = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        t = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        assert evolve(e, 0) == e
        assert evolve(evolve(e, s), t) == evolve(e, s + t)


def test_evolve_is_star_automorphism():
    rng = np.random.default_rng(17)
    t = Fraction(1, 2)
    for _ in range(20):
        a = random_element(rng, terms=2, max_degree=3)
        b = random_element(rng, terms=2, max_degree=3)
        assert evolve(a * b, t) == evolve(a, t) * evolve(b, t)
        assert evolve(adjoint(a), t) == adjoint(evolve(a, t))


def test_evolve_generated_by_hamiltonian():
    # the flow is affine in t on generators, so the derivative at 0 is
    # evolve(x, 1) - x; it must equal i [H, x]
    h = hamiltonian()
    for x in (Q, P, Q_PRIME, P_PRIME):
        assert evolve(x, 1) - x == I * commutator(h, x)


def test_omega_time_invariance_polynomial():
    # omega(evolve(A, t)) is a polynomial in t of degree <= 6 here; equality at
    # eight distinct rational points makes it the constant polynomial omega(A)
    rng = np.random.default_rng(19)
    for _ in range(10):
        e = random_element(rng, terms=3, max_degree=3)
        base = omega(e, TABLE)
        for t in range(8):
            assert omega(evolve(e, Fraction(t, 3)), TABLE) == base


# -- covariance table and Wick evaluation ----------------------------------------------


def test_table_values():
    half = ComplexRational(Fraction(1, 2))
    ihalf = ComplexRational(0, Fraction(1, 2))
    t = CovarianceTable(Fraction(2, 7))
    c = ComplexRational(Fraction(2, 7))
    expected = {
        (Generator.Q, Generator.Q): c,
        (Generator.Q, Generator.P): ihalf,
        (Generator.P, Generator.Q): -ihalf,
        (Generator.P, Generator.P): ZERO,
        (Generator.Q_PRIME, Generator.Q_PRIME): c,
        (Generator.Q_PRIME, Generator.P_PRIME): -ihalf,
        (Generator.P_PRIME, Generator.Q_PRIME): ihalf,
        (Generator.P_PRIME, Generator.P_PRIME): ZERO,
        (Generator.Q, Generator.P_PRIME): half,
        (Generator.P, Generator.Q_PRIME): half,
        (Generator.Q, Generator.Q_PRIME): ZERO,
        (Generator.P, Generator.P_PRIME): ZERO,
    }
    for (x, y), value in expected.items():
        assert t.value(x, y) == value


@pytest.mark.parametrize("c", [Fraction(0), Fraction(1), Fraction(-2, 3)])
def test_table_hermitian_and_commutator_consistent(c):
    t = CovarianceTable(c)
    comm = {
        (Generator.Q, Generator.P): I,
        (Generator.Q_PRIME, Generator.P_PRIME): -I,
    }
    for x in GENS:
        for y in GENS:
            assert t.value(y, x) == t.value(x, y).conjugate()
            expected = comm.get((x, y), -comm.get((y, x), ZERO) if (y, x) in comm else ZERO)
            assert t.value(x, y) - t.value(y, x) == expected


def test_annihilation_relations_fix_cross_terms():
    # the defining relations of the derived table at c = 0, in both orders
    killer_right = [Q + I * Q_PRIME, P - I * P_PRIME]
    for x in (Q, P, Q_PRIME, P_PRIME):
        for k in killer_right:
            assert omega(x * k, TABLE) == ZERO
            assert omega(adjoint(k) * x, TABLE) == ZERO


def test_omega_examples():
    assert omega(Q * P, TABLE) == ComplexRational(0, Fraction(1, 2))
    assert omega(Q * Q * P * P, TABLE) == ComplexRational(Fraction(-1, 2))
    assert omega(Q * Q * Q, CovarianceTable(Fraction(3))) == ZERO


def test_omega_qpqp_normal_order_oracle():
    # independent route: q p q p = q^2 p^2 - i q p, so the value is
    # -1/2 - i (i/2) = 0
    word = [Generator.Q, Generator.P, Generator.Q, Generator.P]
    assert normal_order(word) == Q * Q * P * P - I * (Q * P)
    assert omega(normal_order(word), TABLE) == ZERO
    assert wick_value(word, TABLE) == ZERO


@pytest.mark.parametrize("c", [Fraction(0), Fraction(1, 2)])
def test_wick_vs_normal_order_random_words(c):
    table = CovarianceTable(c)
    rng = np.random.default_rng(23)
    for _ in range(150):
        length = int(rng.integers(1, 9))
        word = [Generator(int(g)) for g in rng.integers(0, 4, length)]
        assert wick_value(word, table) == omega(normal_order(word), table)


def test_moments_diagonal_closed_form():
    # <q^n p^m> = delta_{nm} (i/2)^n n!
    for n in range(7):
        for m in range(7):
            value = omega(AlgebraElement.monomial((n, m, 0, 0)), TABLE)
            if n == m:
                assert value == ComplexRational(0, Fraction(1, 2)) ** n * math.factorial(n)
            else:
                assert value == ZERO


# -- GNS inner product -----------------------------------------------------------------


def test_gns_examples():
    assert gns_inner(Q, Q, TABLE) == ZERO
    v = Q + I * Q_PRIME
    assert gns_inner(v, v, TABLE) == ZERO
    assert gns_inner(UNIT, UNIT, TABLE) == ONE


def test_gns_hermitian():
    rng = np.random.default_rng(29)
    for _ in range(30):
        a = random_element(rng, terms=2, max_degree=3)
        b = random_element(rng, terms=2, max_degree=3)
        assert gns_inner(a, b, TABLE) == gns_inner(b, a, TABLE).conjugate()


def test_gns_accepts_gns_vectors():
    assert gns_inner(GnsVector(Q), GnsVector(Q), TABLE) == ZERO


# -- modular structure ---------------------------------------------------------------


def test_modular_sqrt_phases():
    assert modular_sqrt(GnsVector(P)).label == I * P
    assert modular_sqrt(GnsVector(P * Q)).label == P * Q
    assert modular_sqrt(GnsVector(UNIT)).label == UNIT
    assert modular_sqrt(GnsVector(Q)).label == -I * Q


def test_modular_inverse_pair():
    rng = np.random.default_rng(31)
    for _ in range(30):
        e = random_element(rng, terms=3, max_degree=4, primed=False)
        v = GnsVector(e)
        assert modular_sqrt(modular_inv_sqrt(v)).label == e
        assert modular_inv_sqrt(modular_sqrt(v)).label == e


def test_modular_rejects_primed():
    with pytest.raises(UnsupportedDomainError):
        modular_sqrt(GnsVector(Q_PRIME))


def test_modular_apply_dispatch():
    assert modular_apply("delta_half", GnsVector(P)).label == I * P
    assert modular_apply("delta_inv_half", GnsVector(P)).label == -I * P
    assert modular_apply("J", GnsVector(UNIT)).label == UNIT
    with pytest.raises(ValueError):
        modular_apply("delta", GnsVector(P))


def test_conjugation_antiunitary():
    # <J u, J v> = <v, u> on monomial labels of degree <= 4
    monomials = unprimed_monomials(4)
    for u in monomials:
        for v in monomials:
            ju = modular_conjugation(GnsVector(u)).label
            jv = modular_conjugation(GnsVector(v)).label
            assert gns_inner(ju, jv, TABLE) == gns_inner(v, u, TABLE)


def test_conjugation_involution():
    rng = np.random.default_rng(37)
    for _ in range(20):
        e = random_element(rng, terms=2, max_degree=4, primed=False)
        assert modular_conjugation(modular_conjugation(GnsVector(e))).label == e


def test_commutant_generators_from_conjugation():
    # consistency of the primed generators with the conjugation route:
    # q' A|0> = i A q|0> and p' A|0> = -i A p|0> in every inner product
    probes = [
        AlgebraElement.monomial((j, k, l, m))
        for j in range(3)
        for k in range(3)
        for l in range(2)
        for m in range(2)
        if j + k + l + m <= 3
    ]
    for a in unprimed_monomials(2):
        for b in probes:
            bstar = adjoint(b)
            assert omega(bstar * (Q_PRIME * a), TABLE) == omega(bstar * (I * a * Q), TABLE)
            assert omega(bstar * (P_PRIME * a), TABLE) == omega(bstar * (-I * a * P), TABLE)


# -- metric conjugation ----------------------------------------------------------------


def test_metric_conjugate_generators():
    assert metric_conjugate(Q) == P_PRIME
    assert metric_conjugate(P) == Q_PRIME
    assert metric_conjugate(Q_PRIME) == P
    assert metric_conjugate(P_PRIME) == Q


def test_metric_conjugate_multiplicative():
    # eta(qp) = p' q' = q' p' + i
    assert metric_conjugate(Q * P) == Q_PRIME * P_PRIME + I * UNIT
    rng = np.random.default_rng(41)
    for _ in range(30):
        a = random_element(rng, terms=2, max_degree=3)
        b = random_element(rng, terms=2, max_degree=3)
        assert metric_conjugate(a * b) == metric_conjugate(a) * metric_conjugate(b)
        assert metric_conjugate(metric_conjugate(a)) == a


def test_metric_positivity_sample():
    b = fock_b()
    assert omega(adjoint(b) * metric_conjugate(b), TABLE) == ONE


# -- scale transformation ----------------------------------------------------------------


def test_scale_examples():
    assert scale_transform(Q, 2) == Q * 2
    assert scale_transform(Q * P, Fraction(22, 7)) == Q * P
    with pytest.raises(ValueError):
        scale_transform(Q, 0)


def test_scale_preserves_commutator():
    lam = Fraction(3, 5)
    assert commutator(scale_transform(Q, lam), scale_transform(P, lam)) == I * UNIT


def test_scale_invariance_of_state():
    rng = np.random.default_rng(43)
    for _ in range(100):
        e = random_element(rng, terms=3, max_degree=4, primed=False)
        lam = Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 7)))
        assert omega(scale_transform(e, lam), TABLE) == omega(e, TABLE)


# -- structure identities ------------------------------------------------------------------


def test_canonical_pairs():
    q_plus, p_plus = commutant_pair_plus()
    q_minus, p_minus = commutant_pair_minus()
    half = Fraction(1, 2)
    assert commutator(q_plus, p_plus) * half == I * UNIT
    assert commutator(q_minus, p_minus) * half == -I * UNIT
    assert commutator(q_plus, p_minus).is_zero
    assert commutator(q_minus, p_plus).is_zero


def test_ladder_relations():
    a, b = fock_a(), fock_b()
    assert commutator(a, adjoint(a)) == UNIT
    assert commutator(b, adjoint(b)) == UNIT
    assert commutator(a, b).is_zero
    assert commutator(a, adjoint(b)).is_zero


def test_vacuum_conditions_against_monomials():
    a, b = fock_a(), fock_b()
    b_star = adjoint(b)
    h = hamiltonian()
    for mono in unprimed_monomials(4):
        assert gns_inner(mono, a, TABLE) == ZERO
        assert gns_inner(mono, b_star, TABLE) == ZERO
        assert gns_inner(mono, h, TABLE) == ZERO


def test_moment_matrix_small():
    gram0 = moment_matrix(0, TABLE)
    assert gram0.det_exact == ONE
    gram1 = moment_matrix(1, TABLE)
    assert gram1.det_exact == ComplexRational(Fraction(-1, 4))
    assert gram1.signature == (2, 1, 0)


def test_moment_matrix_faithfulness_witness():
    gram = moment_matrix(4, TABLE)
    assert gram.det_exact != ZERO
    assert gram.det_exact.is_real
    assert gram.signature[1] > 0  # indefinite
    with pytest.raises(ValueError):
        moment_matrix(7, TABLE)


# -- partial sums ------------------------------------------------------------------------------


def test_partial_sum_converges():
    value = weyl_moment_partial_sum(1, 1, 20)
    assert abs(value - cmath.exp(-0.5j)) < 1e-10


def test_partial_sum_alpha_zero():
    for order in (0, 3, 11):
        assert weyl_moment_partial_sum(0, Fraction(7, 2), order) == 1.0


def test_partial_sum_telescopes():
    # at c = 0 the double sum collapses to sum_n (-i a b / 2)^n / n!
    alpha, beta = Fraction(3, 2), Fraction(1, 3)
    for order in (1, 4, 9):
        direct = weyl_moment_partial_sum(alpha, beta, order)
        folded = sum(
            (-0.5j * float(alpha) * float(beta)) ** n / math.factorial(n) for n in range(order + 1)
        )
        assert abs(direct - folded) < 1e-12


def test_partial_sum_general_c_matches_state():
    # dual route: the internal moment recursion against the Wick evaluator
    c = Fraction(2, 3)
    table = CovarianceTable(c)
    alpha, beta, order = Fraction(1, 2), Fraction(1, 3), 4
    direct = 0j
    for n in range(order + 1):
        for m in range(order + 1):
            moment = omega(AlgebraElement.monomial((n, m, 0, 0)), table)
            if moment == ZERO:
                continue
            term = (
                (I * ComplexRational(alpha)) ** n
                * (I * ComplexRational(beta)) ** m
                * moment
                / ComplexRational(math.factorial(n) * math.factorial(m))
            )
            direct += term.to_complex()
    assert weyl_moment_partial_sum(alpha, beta, order, c) == pytest.approx(direct, abs=1e-12)


def test_partial_sum_order_cap():
    with pytest.raises(ValueError):
        weyl_moment_partial_sum(1, 1, 65)
