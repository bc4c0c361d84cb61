"""Tests for divisible sequences, carries, pi-sequences and invariants."""

import math
import random
from fractions import Fraction

import pytest
from sympy import binomial

from gdpakit.coeff_rings import GF, QQ, ZPOLY, ZZ, PreconditionError, Zloc, Zmod
from gdpakit.pi_core import (
    A_invariant,
    DivisibleSequence,
    PiSequence,
    a_invariant,
    admissible_check,
    b_sequence_for_ideal,
    base_rep,
    c_binomial,
    carry,
    check_gcd_morphic,
    cyclotomic_poly,
    divisor_factorization_unique,
    divisors,
    fibonacci,
    h_transform,
    mobius,
    pi_from_gcd_morphic,
    prime_power_base,
)


def random_never_zero_pi(rng, up_to=30, lo=1, hi=9):
    """A random custom pi-sequence over Z with nonzero entries."""
    values = {}
    for n in range(2, up_to + 1):
        v = rng.randint(lo, hi)
        values[n] = v if v != 0 else 1
    return PiSequence.custom(ZZ, values, default=1)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def test_divisors_mobius_prime_power():
    assert divisors(12) == (1, 2, 3, 4, 6, 12)
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert prime_power_base(8) == 2
    assert prime_power_base(7) == 7
    assert prime_power_base(12) is None
    assert prime_power_base(1) is None


# ---------------------------------------------------------------------------
# divisible sequences / base rep / carries
# ---------------------------------------------------------------------------


def test_divisible_sequence_invariants():
    DivisibleSequence([1, 2, 4, 8])
    with pytest.raises(PreconditionError):
        DivisibleSequence([2, 4])
    with pytest.raises(PreconditionError):
        DivisibleSequence([1, 2, 3])
    with pytest.raises(PreconditionError):
        DivisibleSequence([1, 2, 2])
    b = DivisibleSequence.from_powers(3)
    assert b.terms_up_to(30) == [1, 3, 9, 27]


def test_base_rep_trivial_zero():
    # n = 0 gives the empty digit list
    assert base_rep(0, DivisibleSequence.from_powers(2)) == []


def test_base_rep_13_binary():
    # [DERIVED] greedy digit-extraction oracle
    assert base_rep(13, DivisibleSequence.from_powers(2)) == [1, 0, 1, 1]


def test_base_rep_10_136():
    # [DERIVED] 1+3+6 = 10, ranges d0 < 3, d1 < 2 forced
    assert base_rep(10, DivisibleSequence([1, 3, 6])) == [1, 1, 1]


def test_base_rep_reconstruction_and_ranges():
    rng = random.Random(5)
    seqs = [
        DivisibleSequence.from_powers(2),
        DivisibleSequence.from_powers(5),
        DivisibleSequence([1, 3, 6]),
        DivisibleSequence([1, 2, 8, 24]),
    ]
    for b in seqs:
        for n in range(0, 200):
            digits = base_rep(n, b)
            assert sum(d * b.term(i) for i, d in enumerate(digits)) == n
            for i, d in enumerate(digits):
                nxt = b.term(i + 1)
                assert d >= 0
                if nxt is not None and i < len(digits) - 1:
                    assert d < nxt // b.term(i)
                if nxt is not None and i == len(digits) - 1:
                    assert d < nxt // b.term(i)


def test_carry_values():
    # eps_2(1,1) = 1 and eps_k(n,0) = 0
    assert carry(2, 1, 1) == 1
    for k in range(1, 8):
        for n in range(10):
            assert carry(k, n, 0) == 0
    # [DERIVED] eps_3(2,2) = 1
    assert carry(3, 2, 2) == 1
    with pytest.raises(PreconditionError):
        carry(0, 1, 1)


# ---------------------------------------------------------------------------
# pi-sequences and invariants
# ---------------------------------------------------------------------------


def test_pi1_always_zero():
    for pi in [
        PiSequence.all_ones(QQ),
        PiSequence.classical(ZZ),
        PiSequence.cyclotomic_symbolic(),
        PiSequence.custom(ZZ, {1: 7, 2: 5}),
    ]:
        assert pi.ring.is_zero(pi.pi(1))


def test_classical_pi_values():
    pi = PiSequence.classical(ZZ)
    assert [pi.pi(n) for n in range(2, 13)] == [2, 3, 2, 5, 1, 7, 2, 3, 1, 11, 1]


def test_classical_a_A():
    # a(n) = n, A(n) = n! for the classical family
    pi = PiSequence.classical(ZZ)
    for n in range(1, 31):
        assert a_invariant(pi, n) == n
        assert A_invariant(pi, n) == math.factorial(n)
    assert A_invariant(pi, 0) == 1


def test_all_ones_a():
    # a(n) = 1 for all n >= 1
    pi = PiSequence.all_ones(QQ)
    for n in range(1, 20):
        assert a_invariant(pi, n) == 1


def test_cyclotomic_a_is_q_integer():
    # a(n) = [n]_q
    pi = PiSequence.cyclotomic_symbolic()
    assert a_invariant(pi, 3) == (1, 1, 1)  # 1 + q + q^2
    for n in range(1, 15):
        assert a_invariant(pi, n) == tuple([1] * n)


def test_cyclotomic_poly_values():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_c_binomial_classical_small():
    pi = PiSequence.classical(ZZ)
    assert c_binomial(pi, 4, 2) == 6
    for n in range(0, 20):
        for m in range(0, n + 1):
            assert c_binomial(pi, n, m) == int(binomial(n, m))
    assert c_binomial(pi, 7, 0) == 1 and c_binomial(pi, 7, 7) == 1
    with pytest.raises(PreconditionError):
        c_binomial(pi, 3, 4)


def test_c_binomial_gaussian():
    pi = PiSequence.cyclotomic_symbolic()
    assert c_binomial(pi, 2, 1) == (1, 1)  # 1 + q
    assert c_binomial(pi, 4, 2) == (1, 1, 2, 1, 1)  # Gaussian [4 choose 2]


def test_c_symmetry_random():
    rng = random.Random(1)
    for _ in range(10):
        pi = random_never_zero_pi(rng, up_to=20)
        for n in range(0, 20):
            for m in range(0, n + 1):
                assert c_binomial(pi, n, m) == c_binomial(pi, n, n - m)


def test_cocycle_and_factorial_random():
    # cocycle C(n,m) C(m,l) = C(n-l, m-l) C(n,l), factorial C*A*A = A
    rng = random.Random(2)
    for _ in range(8):
        pi = random_never_zero_pi(rng, up_to=16)
        for n in range(0, 16):
            for m in range(0, n + 1):
                assert (
                    c_binomial(pi, n, m) * A_invariant(pi, n - m) * A_invariant(pi, m)
                    == A_invariant(pi, n)
                )
                for l in range(0, m + 1):
                    lhs = c_binomial(pi, n, m) * c_binomial(pi, m, l)
                    rhs = c_binomial(pi, n - l, m - l) * c_binomial(pi, n, l)
                    assert lhs == rhs


# ---------------------------------------------------------------------------
# h-transform
# ---------------------------------------------------------------------------


def test_h_transform_identity():
    pi = PiSequence.classical(ZZ)
    assert h_transform(pi, 1) is pi


def test_h_transform_classical_a():
    # a^[h](n) = n for the classical family
    pi = PiSequence.classical(ZZ)
    for h in (2, 3, 4, 6):
        ph = h_transform(pi, h)
        for n in range(1, 21):
            assert a_invariant(ph, n) == n


def test_h_transform_cyclotomic():
    # a^[2](n) = [n]_{q^2}
    pi = PiSequence.cyclotomic_symbolic()
    p2 = h_transform(pi, 2)
    for n in range(1, 10):
        expected = [0] * (2 * n - 1)
        expected[0::2] = [1] * n
        assert a_invariant(p2, n) == tuple(expected)


def test_h_transform_law_and_composition_random():
    rng = random.Random(3)
    for _ in range(5):
        pi = random_never_zero_pi(rng, up_to=60)
        for h in (2, 3, 4):
            ph = h_transform(pi, h)
            ah = a_invariant(pi, h)
            for n in range(1, 13):
                assert a_invariant(ph, n) * ah == a_invariant(pi, h * n)
            for hp in (2, 3):
                lhs = h_transform(ph, hp)
                rhs = h_transform(pi, h * hp)
                for n in range(1, 11):
                    assert a_invariant(lhs, n) == a_invariant(rhs, n)


def test_divisor_factorization_unique():
    for n in range(1, 31):
        for h in range(1, 31):
            assert divisor_factorization_unique(n, h)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


def test_admissible_classical():
    pi = PiSequence.classical(ZZ)
    assert admissible_check(pi, 100) == ("admissible", None)


def test_admissible_violation():
    # pi_2 = pi_3 = 2 over Z: both in (2), neither index divides
    pi = PiSequence.custom(ZZ, {2: 2, 3: 2})
    assert admissible_check(pi, 10) == ("violation", (2, 3))


def test_admissible_preserved_by_transform():
    pi = PiSequence.classical(ZZ)
    for h in range(2, 7):
        assert admissible_check(h_transform(pi, h), 60) == ("admissible", None)
    fib = pi_from_gcd_morphic(fibonacci, up_to=60)
    for h in range(2, 7):
        assert admissible_check(h_transform(fib, h), 60)[0] == "admissible"


def test_admissible_other_rings():
    assert admissible_check(PiSequence.classical(Zloc(2)), 40) == ("admissible", None)
    assert admissible_check(PiSequence.classical(GF(5)), 40) == ("admissible", None)
    assert admissible_check(PiSequence.classical(Zmod(12)), 40) == ("admissible", None)
    assert admissible_check(PiSequence.cyclotomic_symbolic(), 40) == ("admissible", None)


# ---------------------------------------------------------------------------
# GCD-morphic bridge
# ---------------------------------------------------------------------------


def test_fibonomial_pi_prefix():
    # [DERIVED] Moebius product oracle over Q (OEIS A061446 prefix)
    pi = pi_from_gcd_morphic(fibonacci, up_to=30)
    assert [pi.pi(n) for n in range(2, 8)] == [1, 2, 3, 5, 4, 13]


def test_fibonacci_gcd_morphic():
    assert check_gcd_morphic(fibonacci, 30) == ("ok", None)


def test_gcd_morphic_identity_sequence():
    # a(n) = n gives back the classical pi-sequence
    pi = pi_from_gcd_morphic(lambda n: n, up_to=40)
    classical = PiSequence.classical(ZZ)
    for n in range(2, 41):
        assert pi.pi(n) == classical.pi(n)


def test_gcd_morphic_all_ones():
    # trivial cases
    pi = pi_from_gcd_morphic(lambda n: 1, up_to=20)
    for n in range(2, 21):
        assert pi.pi(n) == 1


def test_gcd_morphic_rejects():
    with pytest.raises(PreconditionError):
        pi_from_gcd_morphic(lambda n: n + 1, up_to=10)


# ---------------------------------------------------------------------------
# b-sequences
# ---------------------------------------------------------------------------


def test_b_sequence_classical_2():
    # [DERIVED] pi_n in (2) iff n is a power of 2
    pi = PiSequence.classical(ZZ)
    b = b_sequence_for_ideal(pi, [2], 32)
    assert b.known_terms() == (1, 2, 4, 8, 16, 32)


def test_b_sequence_unit_ideal():
    # unit ideal short-circuits
    pi = PiSequence.classical(ZZ)
    b = b_sequence_for_ideal(pi, [1], 32)
    assert b.known_terms() == (1,)


def test_b_sequence_zloc3():
    # [DERIVED] same scan in Z_(3)
    pi = PiSequence.classical(Zloc(3))
    b = b_sequence_for_ideal(pi, [Fraction(3)], 27)
    assert b.known_terms() == (1, 3, 9, 27)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_pi_json_round_trip():
    seqs = [
        PiSequence.classical(ZZ),
        PiSequence.all_ones(QQ),
        PiSequence.cyclotomic_symbolic(),
        PiSequence.cyclotomic_at(GF(3), 2),
        PiSequence.custom(ZZ, {2: 5, 3: 7}, default=1),
        pi_from_gcd_morphic(fibonacci, up_to=12),
    ]
    for pi in seqs:
        back = PiSequence.from_json(pi.to_json())
        for n in range(1, 13):
            assert pi.ring.eq(back.pi(n), pi.pi(n))
