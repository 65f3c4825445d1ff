"""Galois ring GR(4, m): modulus table, Teichmuller structure, trace."""

import itertools

import numpy as np
import pytest

from zerodetect.errors import BadValue, MixedDegree
from zerodetect.galois import (
    PRIMITIVE_BINARY_POLYS,
    GaloisRingElement,
    gr_add,
    gr_frobenius,
    gr_mul,
    gr_one,
    gr_pow,
    gr_trace,
    gr_xi,
    gr_zero,
    hensel_lift,
    modulus_poly,
    teichmuller_set,
)


def _gf2_order_of_x(coeffs: tuple[int, ...]) -> int:
    # order of x in GF(2)[x]/(h): repeated multiplication by x with reduction
    deg = len(coeffs) - 1
    mod_mask = sum(c << i for i, c in enumerate(coeffs))
    cur = 1
    for order in range(1, 2**deg + 1):
        cur <<= 1
        if cur >> deg:
            cur ^= mod_mask
        if cur == 1:
            return order
    return -1


@pytest.mark.parametrize("m", sorted(PRIMITIVE_BINARY_POLYS))
def test_binary_polys_are_primitive(m):
    # x must generate the full multiplicative group of GF(2^m)
    assert _gf2_order_of_x(PRIMITIVE_BINARY_POLYS[m]) == 2**m - 1


def test_hensel_lift_known_values():
    # lift of x^3 + x + 1 is x^3 + 2x^2 + x + 3
    assert modulus_poly(3) == (3, 1, 2, 1)
    # lift of x^4 + x + 1 is x^4 + 2x^2 + 3x + 1
    assert modulus_poly(4) == (1, 3, 2, 0, 1)
    # x^2 + x + 1 lifts to itself
    assert modulus_poly(2) == (1, 1, 1)


def test_hensel_lift_reduces_to_input_mod_2():
    for m, h in PRIMITIVE_BINARY_POLYS.items():
        g = modulus_poly(m)
        assert tuple(c % 2 for c in g) == h


def test_hensel_lift_rejects_non_monic():
    with pytest.raises(BadValue):
        hensel_lift((1, 0))


def _all_elements(m):
    for coeffs in itertools.product(range(4), repeat=m):
        yield GaloisRingElement(m, coeffs)


def _random_element(m, rng):
    return GaloisRingElement(m, tuple(int(c) for c in rng.integers(0, 4, m)))


def test_additive_and_multiplicative_identities():
    rng = np.random.default_rng(11)
    for m in (1, 2, 3, 4):
        for _ in range(25):
            a = _random_element(m, rng)
            assert gr_add(a, gr_zero(m)) == a
            assert gr_mul(a, gr_one(m)) == a


def test_ring_axioms_sampled():
    rng = np.random.default_rng(12)
    for m in (3, 4):
        for _ in range(50):
            a, b, c = (_random_element(m, rng) for _ in range(3))
            assert gr_mul(a, b) == gr_mul(b, a)
            assert gr_mul(a, gr_add(b, c)) == gr_add(gr_mul(a, b), gr_mul(a, c))
            assert gr_mul(gr_mul(a, b), c) == gr_mul(a, gr_mul(b, c))


def test_teichmuller_unit_order():
    # xi has multiplicative order exactly 2^m - 1
    for m in (2, 3, 4):
        xi = gr_xi(m)
        order = 2**m - 1
        assert gr_pow(xi, order) == gr_one(m)
        for j in range(1, order):
            assert gr_pow(xi, j) != gr_one(m)


def test_gr_pow_xi_7_in_gr43():
    assert gr_pow(gr_xi(3), 7) == gr_one(3)


def test_teichmuller_set_structure():
    for m in (1, 2, 3, 4):
        ts = teichmuller_set(m)
        assert len(ts) == 2**m
        assert len(set(ts)) == 2**m
        assert ts[0] == gr_zero(m) and ts[1] == gr_one(m)
        # multiplicatively closed away from zero
        units = set(ts[1:])
        for a in list(units)[:8]:
            for b in list(units)[:8]:
                assert gr_mul(a, b) in units


def test_trace_of_zero():
    for m in (1, 2, 3, 4):
        assert gr_trace(gr_zero(m)) == 0


def test_trace_additivity_random_pairs():
    rng = np.random.default_rng(13)
    for m in (3, 4):
        for _ in range(100):
            a, b = _random_element(m, rng), _random_element(m, rng)
            assert gr_trace(gr_add(a, b)) == (gr_trace(a) + gr_trace(b)) % 4


def test_trace_histogram_balanced_over_gr43():
    # exhaustive enumeration of all 64 elements: each Z4 value hit 16 times
    counts = [0, 0, 0, 0]
    for a in _all_elements(3):
        counts[gr_trace(a)] += 1
    assert counts == [16, 16, 16, 16]


def test_trace_is_frobenius_invariant():
    rng = np.random.default_rng(14)
    for _ in range(50):
        a = _random_element(4, rng)
        assert gr_trace(gr_frobenius(a)) == gr_trace(a)


def test_frobenius_is_a_ring_automorphism():
    rng = np.random.default_rng(15)
    for m in (3, 4):
        for _ in range(50):
            a, b = _random_element(m, rng), _random_element(m, rng)
            assert gr_frobenius(gr_add(a, b)) == gr_add(gr_frobenius(a), gr_frobenius(b))
            assert gr_frobenius(gr_mul(a, b)) == gr_mul(gr_frobenius(a), gr_frobenius(b))
        # m-fold iterate is the identity
        a = _random_element(m, rng)
        cur = a
        for _ in range(m):
            cur = gr_frobenius(cur)
        assert cur == a


def test_mixed_degree_rejected():
    with pytest.raises(MixedDegree):
        gr_add(gr_one(3), gr_one(4))
    with pytest.raises(MixedDegree):
        gr_mul(gr_one(2), gr_one(3))


def test_element_validation():
    with pytest.raises(BadValue):
        GaloisRingElement(3, (0, 1))
    with pytest.raises(BadValue):
        GaloisRingElement(3, (0, 1, 4))
    with pytest.raises(BadValue):
        gr_pow(gr_one(3), -1)
