"""Divisible sequences, carries, pi-sequences and their invariants.

A pi-sequence assigns elements pi_2, pi_3, ... of a coefficient ring (always
with pi_1 = 0 by convention).  From it derive:

- a(n)   = product of pi_d over divisors d of n with d != 1,
- A(n)   = a(n) a(n-1) ... a(1),
- C(n,m) = product over k >= 2 of pi_k^{eps_k(n-m, m)}, where
  eps_k(x, y) = floor((x+y)/k) - floor(x/k) - floor(y/k) in {0, 1} is the
  ones-place carry adding x and y in base k.

C is always computed by the carry product (never by dividing A's), so it is
valid in rings with zero divisors.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from threading import RLock

from .coeff_rings import (
    IntPolyRing,
    PreconditionError,
    Ring,
    UnsupportedRingError,
    ZPOLY,
    ZZ,
    ring_from_json,
)


# ---------------------------------------------------------------------------
# elementary number theory helpers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple:
    """Sorted positive divisors of n >= 1."""
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    if n == 1:
        return 1
    m = n
    count = 0
    f = 2
    while f * f <= m:
        if m % f == 0:
            m //= f
            if m % f == 0:
                return 0
            count += 1
        f += 1
    if m > 1:
        count += 1
    return -1 if count % 2 else 1


@lru_cache(maxsize=None)
def prime_power_base(n: int):
    """Return p if n = p^s with s >= 1, else None."""
    if n < 2:
        return None
    f = 2
    m = n
    while f * f <= m:
        if m % f == 0:
            while m % f == 0:
                m //= f
            return f if m == 1 else None
        f += 1
    return n  # n is prime


# ---------------------------------------------------------------------------
# divisible sequences and base-b digits
# ---------------------------------------------------------------------------


class DivisibleSequence:
    """A sequence 1 = b_0 | b_1 | b_2 | ... with proper divisibility.

    Either finite (a tuple of terms) or extended lazily by a rule mapping the
    previous term to the next one (or None to stop).
    """

    def __init__(self, terms, rule=None):
        terms = [int(t) for t in terms]
        if not terms or terms[0] != 1:
            raise PreconditionError("divisible sequence must start with b_0 = 1")
        for a, b in zip(terms, terms[1:]):
            if b % a != 0 or b == a:
                raise PreconditionError(
                    f"b_i must properly divide b_(i+1): got {a}, {b}"
                )
        self._terms = terms
        self._rule = rule

    @classmethod
    def from_powers(cls, base: int) -> "DivisibleSequence":
        """The sequence (1, base, base^2, ...)."""
        if base < 2:
            raise PreconditionError("base must be >= 2")
        return cls([1], rule=lambda prev: prev * base)

    def term(self, i: int):
        """b_i, or None if the sequence has ended before index i."""
        while len(self._terms) <= i:
            if self._rule is None:
                return None
            nxt = self._rule(self._terms[-1])
            if nxt is None:
                self._rule = None
                return None
            nxt = int(nxt)
            if nxt % self._terms[-1] != 0 or nxt == self._terms[-1]:
                raise PreconditionError("rule violated proper divisibility")
            self._terms.append(nxt)
        return self._terms[i]

    def terms_up_to(self, bound: int):
        """All terms <= bound (list)."""
        out = []
        i = 0
        while True:
            t = self.term(i)
            if t is None or t > bound:
                break
            out.append(t)
            i += 1
        return out

    @property
    def is_unbounded(self) -> bool:
        return self._rule is not None

    def known_terms(self):
        return tuple(self._terms)

    def __repr__(self):
        tail = ", ..." if self._rule is not None else ""
        return f"DivisibleSequence({self._terms}{tail})"


def base_rep(n: int, b: DivisibleSequence):
    """Greedy base-b_bullet digits (d_0, d_1, ...) of n >= 0.

    0 <= d_i < b_(i+1)/b_i, the last defined digit being unbounded when the
    sequence is finite; sum of d_i * b_i reconstructs n.
    """
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    if n == 0:
        return []
    terms = b.terms_up_to(n)
    if not terms:
        # finite sequence whose largest term exceeds n is impossible (b_0=1)
        terms = [1]
    k = len(terms)
    # if the sequence continues beyond n, larger places get digit 0; if it is
    # finite, the top digit absorbs the rest (unbounded last digit)
    digits = [0] * k
    rem = n
    for i in range(k - 1, -1, -1):
        digits[i] = rem // terms[i]
        rem -= digits[i] * terms[i]
    assert rem == 0
    return digits


def carry(k: int, n: int, m: int) -> int:
    """eps_k(n, m) = floor((n+m)/k) - floor(n/k) - floor(m/k), in {0, 1}."""
    if k < 1:
        raise PreconditionError("carry requires k >= 1")
    if n < 0 or m < 0:
        raise PreconditionError("carry requires nonnegative n, m")
    e = (n + m) // k - n // k - m // k
    assert e in (0, 1)
    return e


# ---------------------------------------------------------------------------
# cyclotomic polynomials over Z[q]
# ---------------------------------------------------------------------------


_CYCLO_CACHE: dict[int, tuple] = {}


def cyclotomic_poly(n: int) -> tuple:
    """Phi_n as an element of Z[q]: (q^n - 1) / prod of Phi_d, d | n, d < n."""
    if n < 1:
        raise PreconditionError("cyclotomic index must be >= 1")
    if n in _CYCLO_CACHE:
        return _CYCLO_CACHE[n]
    R = ZPOLY
    num = R.canon([-1] + [0] * (n - 1) + [1])  # q^n - 1
    den = R.one()
    for d in divisors(n)[:-1]:
        den = R.mul(den, cyclotomic_poly(d))
    phi = R.exact_div(num, den)
    _CYCLO_CACHE[n] = phi
    return phi


# ---------------------------------------------------------------------------
# pi-sequences
# ---------------------------------------------------------------------------


class PiSequence:
    """A pi-sequence in a coefficient ring, with pi_1 = 0 always.

    Families: all_ones, classical, cyclotomic (symbolic, over Z[q]),
    cyclotomic_at (evaluated at q0), gcd_morphic (derived by Moebius
    inversion from a GCD-morphic integer sequence), custom.
    """

    def __init__(self, ring: Ring, family: str, fn, *, meta=None, admissible_by_fiat=False):
        self.ring = ring
        self.family = family
        self._fn = fn
        self.meta = meta or {}
        self.admissible_by_fiat = admissible_by_fiat
        self._memo: dict[int, object] = {}
        self._c_memo: dict[tuple, object] = {}
        self._a_memo: dict[int, object] = {}
        self._A_memo: dict[int, object] = {}
        self._lock = RLock()

    # -- construction -----------------------------------------------------
    @classmethod
    def all_ones(cls, ring: Ring) -> "PiSequence":
        return cls(ring, "all_ones", lambda n, R=ring: R.one())

    @classmethod
    def classical(cls, ring: Ring) -> "PiSequence":
        def fn(n, R=ring):
            p = prime_power_base(n)
            return R.from_int(p) if p is not None else R.one()

        return cls(ring, "classical", fn)

    @classmethod
    def cyclotomic_symbolic(cls) -> "PiSequence":
        return cls(
            ZPOLY,
            "cyclotomic",
            lambda n: cyclotomic_poly(n),
            admissible_by_fiat=True,
        )

    @classmethod
    def cyclotomic_at(cls, ring: Ring, q0) -> "PiSequence":
        q0 = ring.canon(q0)
        return cls(
            ring,
            "cyclotomic_at",
            lambda n, R=ring: ZPOLY.evaluate(cyclotomic_poly(n), R, q0),
            meta={"q0": q0},
        )

    @classmethod
    def custom(cls, ring: Ring, values: dict, default=None) -> "PiSequence":
        if default is None:
            default = ring.one()
        default = ring.canon(default)
        vals = {int(k): ring.canon(v) for k, v in values.items()}

        def fn(n):
            return vals.get(n, default)

        return cls(ring, "custom", fn, meta={"values": vals, "default": default})

    # -- evaluation -------------------------------------------------------
    def pi(self, n: int):
        """pi_n; pi_1 = 0 by convention, pi_n undefined for n < 1."""
        if n < 1:
            raise PreconditionError("pi_n requires n >= 1")
        if n == 1:
            return self.ring.zero()
        with self._lock:
            if n not in self._memo:
                self._memo[n] = self.ring.canon(self._fn(n))
            return self._memo[n]

    def nonunit_degrees(self, up_to: int):
        """Degrees j in [1, up_to] where pi_j is not a unit.

        These are the degrees of a generating set of the augmentation ideal
        D_+ (the degree-j piece of D_+/D_+^2 is k/(pi_j))."""
        return [j for j in range(1, up_to + 1) if not self.ring.is_unit(self.pi(j))]

    def zero_degrees(self, up_to: int):
        """Degrees j in [2, up_to] with pi_j = 0."""
        return [j for j in range(2, up_to + 1) if self.ring.is_zero(self.pi(j))]

    def is_never_zero(self, up_to: int) -> bool:
        return not self.zero_degrees(up_to)

    # -- serialization ----------------------------------------------------
    def to_json(self, value_horizon: int | None = None) -> dict:
        out = {"family": self.family, "ring": self.ring.to_json()}
        if self.family == "custom":
            out["values"] = {
                str(k): self.ring.to_str(v) for k, v in sorted(self.meta["values"].items())
            }
            out["default"] = self.ring.to_str(self.meta["default"])
        elif self.family == "cyclotomic_at":
            out["q0"] = self.ring.to_str(self.meta["q0"])
        elif self.family == "gcd_morphic":
            out["a"] = list(self.meta["a"])
        if value_horizon:
            out["values_preview"] = {
                str(n): self.ring.to_str(self.pi(n)) for n in range(2, value_horizon + 1)
            }
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PiSequence":
        ring = ring_from_json(obj["ring"]) if "ring" in obj else ZZ
        family = obj["family"]
        if family == "all_ones":
            return cls.all_ones(ring)
        if family == "classical":
            return cls.classical(ring)
        if family == "cyclotomic":
            return cls.cyclotomic_symbolic()
        if family == "cyclotomic_at":
            return cls.cyclotomic_at(ring, ring.from_str(str(obj["q0"])))
        if family == "gcd_morphic":
            seq = [int(x) for x in obj["a"]]  # a(1), a(2), ...
            return pi_from_gcd_morphic(lambda n: seq[n - 1], up_to=len(seq))
        if family == "custom":
            values = {int(k): ring.from_str(str(v)) for k, v in obj.get("values", {}).items()}
            default = ring.from_str(str(obj["default"])) if "default" in obj else None
            return cls.custom(ring, values, default)
        raise ValueError(f"unknown pi family {family!r}")

    def __repr__(self):
        return f"PiSequence({self.family} over {self.ring.describe()})"


# ---------------------------------------------------------------------------
# invariants a, A, C
# ---------------------------------------------------------------------------


def a_invariant(pi: PiSequence, n: int):
    """a(n) = prod of pi_d over divisors d of n, d != 1; a(1) = 1."""
    if n < 1:
        raise PreconditionError("a(n) requires n >= 1")
    with pi._lock:
        if n in pi._a_memo:
            return pi._a_memo[n]
    R = pi.ring
    acc = R.one()
    for d in divisors(n):
        if d != 1:
            acc = R.mul(acc, pi.pi(d))
    with pi._lock:
        pi._a_memo[n] = acc
    return acc


def A_invariant(pi: PiSequence, n: int):
    """A(n) = a(n) a(n-1) ... a(1); A(0) = 1."""
    if n < 0:
        raise PreconditionError("A(n) requires n >= 0")
    R = pi.ring
    with pi._lock:
        known = max((k for k in pi._A_memo if k <= n), default=None)
    acc = pi._A_memo[known] if known is not None else R.one()
    start = (known or 0) + 1
    for k in range(start, n + 1):
        acc = R.mul(acc, a_invariant(pi, k))
        with pi._lock:
            pi._A_memo[k] = acc
    if n == 0:
        return R.one()
    return acc


def c_binomial(pi: PiSequence, n: int, m: int):
    """C(n, m) = prod over k in [2, n] of pi_k^{eps_k(n-m, m)} (carry product)."""
    if not 0 <= m <= n:
        raise PreconditionError(f"c_binomial requires 0 <= m <= n, got ({n}, {m})")
    with pi._lock:
        if (n, m) in pi._c_memo:
            return pi._c_memo[(n, m)]
    R = pi.ring
    acc = R.one()
    a, b = n - m, m
    for k in range(2, n + 1):
        if carry(k, a, b):
            acc = R.mul(acc, pi.pi(k))
            if R.is_zero(acc):
                break
    with pi._lock:
        pi._c_memo[(n, m)] = acc
    return acc


def carry_degrees(n: int, m: int):
    """The set of k >= 2 with eps_k(n - m, m) = 1 (the support of C(n,m))."""
    return [k for k in range(2, n + 1) if carry(k, n - m, m)]


# ---------------------------------------------------------------------------
# h-transform
# ---------------------------------------------------------------------------


def h_transform(pi: PiSequence, h: int) -> PiSequence:
    """The h-transform: pi^[h]_n = prod over d | h with gcd(h/d, n) = 1 of pi_{dn}."""
    if h < 1:
        raise PreconditionError("h-transform requires h >= 1")
    if h == 1:
        return pi
    R = pi.ring

    def fn(n):
        acc = R.one()
        for d in divisors(h):
            if math.gcd(h // d, n) == 1:
                acc = R.mul(acc, pi.pi(d * n))
        return acc

    out = PiSequence(
        R,
        "transform",
        fn,
        meta={"base": pi, "h": h},
        admissible_by_fiat=pi.admissible_by_fiat,
    )
    return out


def divisor_factorization_unique(n: int, h: int) -> bool:
    """Check: every divisor m of n*h factors uniquely as m = d*d' with
    d | n, d' | h and gcd(h/d', d) = 1."""
    for m in divisors(n * h):
        count = 0
        for d in divisors(n):
            if m % d == 0:
                dp = m // d
                if h % dp == 0 and math.gcd(h // dp, d) == 1:
                    count += 1
        if count != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


def admissible_check(pi: PiSequence, up_to: int):
    """Scan pairs 2 <= n, m <= up_to with n and m incomparable under
    divisibility; return ("admissible", None) or ("violation", (n, m))."""
    if pi.admissible_by_fiat:
        return ("admissible", None)
    R = pi.ring
    vals = {n: pi.pi(n) for n in range(2, up_to + 1)}
    for n in range(2, up_to + 1):
        for m in range(n + 1, up_to + 1):
            if m % n == 0:
                continue
            try:
                unit_ideal = R.unit_ideal_pair(vals[n], vals[m])
            except UnsupportedRingError:
                raise
            if not unit_ideal:
                return ("violation", (n, m))
    return ("admissible", None)


# ---------------------------------------------------------------------------
# GCD-morphic bridge
# ---------------------------------------------------------------------------


def check_gcd_morphic(a, up_to: int):
    """Verify gcd(a(n), a(m)) = a(gcd(n, m)) for 1 <= n, m <= up_to.

    a is 1-indexed via a[n] (callable or sequence with a(0) unused).
    Returns ("ok", None) or ("violation", (n, m))."""
    def av(n):
        return a(n) if callable(a) else a[n]

    for n in range(1, up_to + 1):
        if av(n) == 0:
            return ("violation", (n, n))
    for n in range(1, up_to + 1):
        for m in range(n, up_to + 1):
            if math.gcd(abs(av(n)), abs(av(m))) != abs(av(math.gcd(n, m))):
                return ("violation", (n, m))
    return ("ok", None)


def pi_from_gcd_morphic(a, up_to: int) -> PiSequence:
    """Derive the pi-sequence of a never-zero GCD-morphic integer sequence by
    Moebius inversion: pi_n = prod over d | n of a(n/d)^{mu(d)} (an integer).

    a may be a callable n -> a(n) (1-indexed) or an indexable sequence with
    a[n] for 1 <= n <= up_to."""
    def av(n):
        return a(n) if callable(a) else a[n]

    verdict, witness = check_gcd_morphic(a, up_to)
    if verdict != "ok":
        raise PreconditionError(f"sequence is not GCD-morphic at pair {witness}")

    values = {}
    for n in range(2, up_to + 1):
        prod = Fraction(1)
        for d in divisors(n):
            mu = mobius(d)
            if mu == 1:
                prod *= av(n // d)
            elif mu == -1:
                prod /= av(n // d)
        if prod.denominator != 1:
            raise PreconditionError(
                f"Moebius product for pi_{n} is non-integral: {prod}"
            )
        values[n] = int(prod)
    out = PiSequence.custom(ZZ, values, default=1)
    out.family = "gcd_morphic"
    out.meta["a"] = [av(n) for n in range(1, up_to + 1)]
    out.meta["up_to"] = up_to
    return out


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------------------
# b-sequences of ideals
# ---------------------------------------------------------------------------


def b_sequence_for_ideal(pi: PiSequence, ideal_generators, limit: int) -> DivisibleSequence:
    """b_{a,0} = 1; b_{a,i+1} = the smallest n <= limit with pi_n in the ideal
    exceeding b_{a,i}.  Verifies the divisibility invariant."""
    R = pi.ring
    gens = [R.canon(g) for g in ideal_generators]
    terms = [1]
    if R.ideal_is_unit(gens):
        return DivisibleSequence(terms)
    for n in range(2, limit + 1):
        if R.ideal_contains(gens, pi.pi(n)):
            if n % terms[-1] != 0:
                raise PreconditionError(
                    f"b-sequence divisibility fails at {terms[-1]}, {n}: "
                    "pi-sequence not admissible for this ideal"
                )
            terms.append(n)
    return DivisibleSequence(terms)
