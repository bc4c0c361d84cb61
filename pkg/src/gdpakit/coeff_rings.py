"""Exact coefficient-ring arithmetic and linear algebra.

Supported rings: the integers Z, the rationals Q, residue rings Z/n, prime
fields GF(p), p-local rationals Z_(p) (fractions with denominator coprime to
p), and univariate integer polynomials Z[q] (ring arithmetic only, no matrix
algebra).

Elements are plain Python values interpreted through a :class:`Ring` object:

- Z, Z/n, GF(p): ``int`` (residues canonicalized into ``[0, n)``),
- Q, Z_(p): :class:`fractions.Fraction` (reduced; for Z_(p) the denominator is
  coprime to p),
- Z[q]: ``tuple`` of ``int`` coefficients, low degree first, no trailing zeros
  (the zero polynomial is the empty tuple).

All matrix routines (Smith normal form, kernels, cokernels, solving) are exact
and work over the PID-like rings (Z, Z_(p), fields); Z/n is handled by lifting
to Z and reducing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import isprime


class UnsupportedRingError(ValueError):
    """A ring does not support the requested operation."""


class PreconditionError(ValueError):
    """An operation's precondition failed."""


def _vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Rings
# ---------------------------------------------------------------------------


class Ring:
    """Base class for exact coefficient rings.

    Subclasses define canonical value representations and the arithmetic /
    divisibility protocol used by the linear algebra layer. Instances are
    immutable and hashable; all operations are pure functions.
    """

    kind: str = "?"
    is_field = False
    is_domain = False
    is_pid = False
    is_local = False
    #: whether smith_normal_form works directly over this ring
    supports_snf = False

    # -- arithmetic -------------------------------------------------------
    def canon(self, x):
        raise NotImplementedError

    def zero(self):
        return self.canon(0)

    def one(self):
        return self.canon(1)

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = self.one()
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def eq(self, a, b) -> bool:
        return a == b

    # -- units / divisibility --------------------------------------------
    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        """Inverse of a unit."""
        raise NotImplementedError

    def divides(self, a, b) -> bool:
        """Whether a | b."""
        raise NotImplementedError

    def exact_div(self, b, a):
        """b / a, assuming a | b (raises if not)."""
        raise NotImplementedError

    def unit_and_canonical(self, a):
        """Return (u, c) with a = u*c, u a unit and c the canonical associate."""
        raise NotImplementedError

    def canonical_associate(self, a):
        return self.unit_and_canonical(a)[1]

    def associate(self, a, b) -> bool:
        """Whether a and b differ by a unit."""
        if self.is_zero(a) or self.is_zero(b):
            return self.is_zero(a) and self.is_zero(b)
        return self.divides(a, b) and self.divides(b, a)

    # -- euclidean protocol (for SNF) ------------------------------------
    def quo_rem(self, a, b):
        """(q, r) with a = q*b + r and r strictly 'smaller' than b (pivot key)."""
        raise UnsupportedRingError(f"no division algorithm over {self.kind}")

    def pivot_key(self, a):
        """Well-founded size measure for SNF pivot selection (nonzero a)."""
        raise UnsupportedRingError(f"no pivot measure over {self.kind}")

    # -- ideals -----------------------------------------------------------
    def in_jacobson_radical(self, a) -> bool:
        raise UnsupportedRingError(f"no Jacobson-radical test over {self.kind}")

    def unit_ideal_pair(self, a, b) -> bool:
        """Whether the ideal (a, b) is the unit ideal."""
        raise UnsupportedRingError(f"no two-element unit-ideal test over {self.kind}")

    def ideal_contains(self, gens, x) -> bool:
        """Whether x lies in the ideal generated by gens."""
        raise UnsupportedRingError(f"no ideal membership over {self.kind}")

    def ideal_is_unit(self, gens) -> bool:
        return self.ideal_contains(gens, self.one())

    # -- conversions ------------------------------------------------------
    def from_int(self, k: int):
        return self.canon(k)

    def to_str(self, a) -> str:
        return str(a)

    def from_str(self, s: str):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<Ring {self.describe()}>"

    def describe(self) -> str:
        return self.kind

    def __eq__(self, other):
        return isinstance(other, Ring) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(tuple(sorted(self.to_json().items())))


class IntegerRing(Ring):
    kind = "Z"
    is_domain = True
    is_pid = True
    supports_snf = True

    def canon(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x)
        return int(x)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise ValueError(f"{a} is not a unit in Z")
        return a

    def divides(self, a, b):
        if a == 0:
            return b == 0
        return b % a == 0

    def exact_div(self, b, a):
        if not self.divides(a, b):
            raise ValueError(f"{a} does not divide {b} in Z")
        return 0 if b == 0 else b // a

    def unit_and_canonical(self, a):
        if a < 0:
            return -1, -a
        return 1, a

    def quo_rem(self, a, b):
        # symmetric remainder: |r| <= |b|/2, for fast SNF convergence.
        # Python's divmod gives r with the sign of b in (b,0] or [0,b);
        # r - b always moves it into the symmetric range, i.e. q += 1.
        q, r = divmod(a, b)
        if 2 * abs(r) > abs(b):
            q += 1
            r -= b
        return q, r

    def pivot_key(self, a):
        return abs(a)

    def in_jacobson_radical(self, a):
        return a == 0

    def unit_ideal_pair(self, a, b):
        return math.gcd(a, b) == 1

    def ideal_contains(self, gens, x):
        g = 0
        for a in gens:
            g = math.gcd(g, a)
        return self.divides(g, x)

    def from_str(self, s):
        return int(s)

    def to_json(self):
        return {"ring": "Z"}


class RationalField(Ring):
    kind = "Q"
    is_field = True
    is_domain = True
    is_pid = True
    supports_snf = True

    def canon(self, x):
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 is not a unit")
        return 1 / Fraction(a)

    def divides(self, a, b):
        return a != 0 or b == 0

    def exact_div(self, b, a):
        if a == 0:
            if b == 0:
                return Fraction(0)
            raise ValueError("0 does not divide a nonzero element")
        return Fraction(b) / a

    def unit_and_canonical(self, a):
        if a == 0:
            return Fraction(1), Fraction(0)
        return Fraction(a), Fraction(1)

    def quo_rem(self, a, b):
        return Fraction(a) / b, Fraction(0)

    def pivot_key(self, a):
        return 0

    def in_jacobson_radical(self, a):
        return a == 0

    def unit_ideal_pair(self, a, b):
        return a != 0 or b != 0

    def ideal_contains(self, gens, x):
        if any(g != 0 for g in gens):
            return True
        return x == 0

    def from_str(self, s):
        return Fraction(s)

    def to_json(self):
        return {"ring": "Q"}


class IntegersModRing(Ring):
    """Z/n.  A field iff n is prime (use :func:`GF` for emphasis)."""

    def __init__(self, n: int):
        n = int(n)
        if n < 2:
            raise PreconditionError("IntegersMod requires n >= 2")
        self.n = n
        self.is_field = bool(isprime(n))
        self.is_domain = self.is_field
        self.is_pid = self.is_field
        self.supports_snf = self.is_field
        # local iff n is a prime power
        f = _smallest_prime_factor(n)
        self.is_local = n == f ** _vp(n, f)
        self._p = f
        self.kind = "GF" if self.is_field else "Zmod"

    def canon(self, x):
        return int(x) % self.n

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def is_unit(self, a):
        return math.gcd(a % self.n, self.n) == 1

    def inv(self, a):
        return pow(a, -1, self.n)

    def divides(self, a, b):
        g = math.gcd(a % self.n, self.n)
        return (b % self.n) % g == 0

    def exact_div(self, b, a):
        a %= self.n
        b %= self.n
        g = math.gcd(a, self.n)
        if b % g:
            raise ValueError(f"{a} does not divide {b} in Z/{self.n}")
        m = self.n // g
        c = (b // g) * pow(a // g, -1, m) % m
        return c

    def unit_and_canonical(self, a):
        a %= self.n
        if a == 0:
            return 1, 0
        g = math.gcd(a, self.n)
        # find a unit u with u*g == a (mod n); a//g is a unit mod n//g, lift it
        base = a // g
        m = self.n // g
        u = base
        while math.gcd(u, self.n) != 1:
            u += m
        u %= self.n
        assert (u * g) % self.n == a
        return u, g

    def quo_rem(self, a, b):
        if not self.is_field:
            raise UnsupportedRingError("no division algorithm over Z/n, n composite")
        return self.mul(a, self.inv(b)), 0

    def pivot_key(self, a):
        if not self.is_field:
            raise UnsupportedRingError("no pivot measure over Z/n, n composite")
        return 0

    def in_jacobson_radical(self, a):
        # J(Z/n) = (rad n): a is in it iff every prime of n divides a
        a %= self.n
        return all(a % p == 0 for p in _prime_factors(self.n))

    def unit_ideal_pair(self, a, b):
        return math.gcd(math.gcd(a % self.n, b % self.n), self.n) == 1

    def ideal_contains(self, gens, x):
        g = self.n
        for a in gens:
            g = math.gcd(g, a % self.n)
        return (x % self.n) % g == 0

    def from_str(self, s):
        return self.canon(int(s))

    def to_json(self):
        if self.is_field:
            return {"ring": "GF", "p": self.n}
        return {"ring": "Zmod", "n": self.n}

    def describe(self):
        return f"GF({self.n})" if self.is_field else f"Z/{self.n}"


class PLocalRing(Ring):
    """Z_(p): rationals with denominator coprime to p.  A local PID (a DVR)."""

    kind = "Zloc"
    is_domain = True
    is_pid = True
    is_local = True
    supports_snf = True

    def __init__(self, p: int):
        p = int(p)
        if not isprime(p):
            raise PreconditionError(f"PLocal requires a prime, got {p}")
        self.p = p

    def canon(self, x):
        f = Fraction(x)
        if f.denominator % self.p == 0:
            raise ValueError(f"{f} is not p-local at p={self.p}")
        return f

    def valuation(self, a) -> int:
        """p-adic valuation; raises on zero."""
        if a == 0:
            raise ValueError("valuation of zero")
        return _vp(a.numerator, self.p)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a != 0 and a.numerator % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise ValueError(f"{a} is not a unit in Z_({self.p})")
        return 1 / a

    def divides(self, a, b):
        if a == 0:
            return b == 0
        if b == 0:
            return True
        return self.valuation(a) <= self.valuation(b)

    def exact_div(self, b, a):
        if not self.divides(a, b):
            raise ValueError(f"{a} does not divide {b} in Z_({self.p})")
        return Fraction(0) if b == 0 else Fraction(b) / a

    def unit_and_canonical(self, a):
        if a == 0:
            return Fraction(1), Fraction(0)
        c = Fraction(self.p) ** self.valuation(a)
        return a / c, c

    def quo_rem(self, a, b):
        if self.divides(b, a):
            return Fraction(a) / b, Fraction(0)
        return Fraction(0), Fraction(a)

    def pivot_key(self, a):
        return self.valuation(a)

    def in_jacobson_radical(self, a):
        return a == 0 or self.valuation(a) >= 1

    def unit_ideal_pair(self, a, b):
        return self.is_unit(a) or self.is_unit(b)

    def ideal_contains(self, gens, x):
        vals = [self.valuation(g) for g in gens if g != 0]
        if not vals:
            return x == 0
        return x == 0 or self.valuation(x) >= min(vals)

    def from_str(self, s):
        return self.canon(Fraction(s))

    def to_json(self):
        return {"ring": "Zloc", "p": self.p}

    def describe(self):
        return f"Z_({self.p})"


class IntPolyRing(Ring):
    """Z[q]: integer polynomials in one variable.  Ring arithmetic only."""

    kind = "ZPoly"
    is_domain = True
    is_pid = False
    supports_snf = False

    def canon(self, x):
        if isinstance(x, (int, Fraction)):
            k = IntegerRing().canon(x)
            return (k,) if k else ()
        t = tuple(int(c) for c in x)
        while t and t[-1] == 0:
            t = t[:-1]
        return t

    def add(self, a, b):
        n = max(len(a), len(b))
        out = [0] * n
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += c
        return self.canon(out)

    def neg(self, a):
        return tuple(-c for c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, c in enumerate(a):
            if c:
                for j, d in enumerate(b):
                    out[i + j] += c * d
        return self.canon(out)

    def is_unit(self, a):
        return len(a) == 1 and a[0] in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise ValueError("not a unit in Z[q]")
        return a

    def _divmod_q(self, b, a):
        """Division over Q: (quotient, remainder) with Fraction coefficients."""
        rem = [Fraction(c) for c in b]
        quo = [Fraction(0)] * max(0, len(b) - len(a) + 1)
        lead = Fraction(a[-1])
        for i in range(len(b) - len(a), -1, -1):
            c = rem[i + len(a) - 1] / lead
            if c:
                quo[i] = c
                for j, d in enumerate(a):
                    rem[i + j] -= c * d
        while rem and rem[-1] == 0:
            rem.pop()
        return quo, rem

    def divides(self, a, b):
        if not a:
            return not b
        if not b:
            return True
        if (len(b) - len(a)) < 0:
            return False
        quo, rem = self._divmod_q(b, a)
        return not rem and all(c.denominator == 1 for c in quo)

    def exact_div(self, b, a):
        if not a:
            if not b:
                return ()
            raise ValueError("0 does not divide a nonzero polynomial")
        quo, rem = self._divmod_q(b, a)
        if rem or any(c.denominator != 1 for c in quo):
            raise ValueError("not divisible in Z[q]")
        return self.canon([int(c) for c in quo])

    def unit_and_canonical(self, a):
        if not a:
            return (1,), ()
        if a[-1] < 0:
            return (-1,), self.neg(a)
        return (1,), a

    def content(self, a) -> int:
        g = 0
        for c in a:
            g = math.gcd(g, c)
        return g

    def primitive_part(self, a):
        g = self.content(a)
        if g == 0:
            return ()
        sign = -1 if a[-1] < 0 else 1
        return tuple(c // (sign * g) for c in a)

    def evaluate(self, a, ring: Ring, q0):
        """Evaluate the polynomial at q0 in another ring."""
        acc = ring.zero()
        for c in reversed(a):
            acc = ring.add(ring.mul(acc, q0), ring.from_int(c))
        return acc

    def unit_ideal_pair(self, a, b):
        # conservative decidable cases only
        if self.is_unit(a) or self.is_unit(b):
            return True
        raise UnsupportedRingError("general unit-ideal test not supported over Z[q]")

    def to_str(self, a):
        if not a:
            return "0"
        parts = []
        for i in range(len(a) - 1, -1, -1):
            c = a[i]
            if c == 0:
                continue
            if i == 0:
                term = str(abs(c))
            else:
                mon = "q" if i == 1 else f"q^{i}"
                term = mon if abs(c) == 1 else f"{abs(c)}*{mon}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, term))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            s += sign + term
        return s

    _TERM = re.compile(r"([+-]?)\s*(\d+)?\s*\*?\s*(q(?:\^(\d+))?)?\s*")

    def from_str(self, s):
        s = s.strip()
        if s.startswith("[") and s.endswith("]"):
            inner = s[1:-1].strip()
            return self.canon([int(t) for t in inner.split(",")] if inner else [])
        if s == "0":
            return ()
        coeffs: dict[int, int] = {}
        pos = 0
        while pos < len(s):
            m = self._TERM.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial {s!r}")
            sign = -1 if m.group(1) == "-" else 1
            num = int(m.group(2)) if m.group(2) else 1
            if m.group(3):
                deg = int(m.group(4)) if m.group(4) else 1
            else:
                deg = 0
            coeffs[deg] = coeffs.get(deg, 0) + sign * num
            pos = m.end()
        out = [0] * (max(coeffs) + 1)
        for d, c in coeffs.items():
            out[d] = c
        return self.canon(out)

    def to_json(self):
        return {"ring": "ZPoly"}

    def describe(self):
        return "Z[q]"


def _smallest_prime_factor(n: int) -> int:
    for f in range(2, int(math.isqrt(n)) + 1):
        if n % f == 0:
            return f
    return n


def _prime_factors(n: int):
    out = []
    while n > 1:
        f = _smallest_prime_factor(n)
        out.append(f)
        while n % f == 0:
            n //= f
    return out


ZZ = IntegerRing()
QQ = RationalField()
ZPOLY = IntPolyRing()


def Zmod(n: int) -> IntegersModRing:
    return IntegersModRing(n)


def GF(p: int) -> IntegersModRing:
    r = IntegersModRing(p)
    if not r.is_field:
        raise PreconditionError(f"GF requires a prime, got {p}")
    return r


def Zloc(p: int) -> PLocalRing:
    return PLocalRing(p)


def ring_from_json(obj: dict) -> Ring:
    """Deserialize a ring descriptor {"ring": ..., "n": ..., "p": ...}."""
    kind = obj["ring"]
    if kind == "Z":
        return ZZ
    if kind == "Q":
        return QQ
    if kind == "Zmod":
        return Zmod(obj["n"])
    if kind == "GF":
        return GF(obj["p"])
    if kind == "Zloc":
        return Zloc(obj["p"])
    if kind == "ZPoly":
        return ZPOLY
    raise ValueError(f"unknown ring kind {kind!r}")


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class ExactMatrix:
    """A rows x cols matrix of ring elements (row-major list of lists)."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, entries, rows: int | None = None, cols: int | None = None):
        self.ring = ring
        if rows is None:
            rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        self.rows = rows
        self.cols = cols
        self.entries = [[ring.canon(x) for x in row] for row in entries]
        for row in self.entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")

    @classmethod
    def zero(cls, ring: Ring, rows: int, cols: int) -> "ExactMatrix":
        return cls(ring, [[ring.zero()] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "ExactMatrix":
        m = cls.zero(ring, n, n)
        for i in range(n):
            m.entries[i][i] = ring.one()
        return m

    def copy(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, [row[:] for row in self.entries], self.rows, self.cols)

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        R = self.ring
        out = ExactMatrix.zero(R, self.rows, other.cols)
        for i in range(self.rows):
            rowi = self.entries[i]
            outi = out.entries[i]
            for k in range(self.cols):
                a = rowi[k]
                if R.is_zero(a):
                    continue
                rowk = other.entries[k]
                for j in range(other.cols):
                    b = rowk[j]
                    if not R.is_zero(b):
                        outi[j] = R.add(outi[j], R.mul(a, b))
        return out

    def apply_vector(self, v):
        """Matrix times column vector (a list)."""
        R = self.ring
        out = [R.zero()] * self.rows
        for i in range(self.rows):
            acc = R.zero()
            rowi = self.entries[i]
            for j, x in enumerate(v):
                if not R.is_zero(x):
                    acc = R.add(acc, R.mul(rowi[j], x))
            out[i] = acc
        return out

    def eq(self, other: "ExactMatrix") -> bool:
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(
                self.ring.eq(self.entries[i][j], other.entries[i][j])
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[self.ring.to_str(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, ring: Ring, obj) -> "ExactMatrix":
        if isinstance(obj, dict):
            ents = [[ring.from_str(x) for x in row] for row in obj["entries"]]
            return cls(ring, ents, obj["rows"], obj["cols"])
        return cls(ring, [[ring.from_str(str(x)) for x in row] for row in obj])

    def __repr__(self):
        return f"ExactMatrix({self.ring.describe()}, {self.entries})"


@dataclass(frozen=True)
class ModuleInvariants:
    """Invariants of a finitely generated module over a coefficient ring.

    free_rank plus an ordered divisibility chain of nonunit, nonzero torsion
    factors d1 | d2 | ... (canonical associates).  Over a field the torsion
    list is empty and free_rank is the dimension.
    """

    ring: Ring
    free_rank: int
    torsion_factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "torsion_factors", tuple(self.ring.canon(t) for t in self.torsion_factors)
        )

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion_factors

    def eq(self, other: "ModuleInvariants") -> bool:
        return (
            self.free_rank == other.free_rank
            and len(self.torsion_factors) == len(other.torsion_factors)
            and all(
                self.ring.eq(a, b)
                for a, b in zip(self.torsion_factors, other.torsion_factors)
            )
        )

    def direct_sum(self, other: "ModuleInvariants") -> "ModuleInvariants":
        return invariants_from_factors(
            self.ring,
            self.free_rank + other.free_rank,
            list(self.torsion_factors) + list(other.torsion_factors),
        )

    def torsion_lengths(self) -> dict:
        """Per-prime lengths of the torsion part (Z, Z_(p), Z/n rings)."""
        out: dict[int, int] = {}
        for t in self.torsion_factors:
            for p, e in _factor_torsion(self.ring, t):
                out[p] = out.get(p, 0) + e
        return out

    def plus_class(self) -> dict:
        """[M]_+ : per-prime torsion lengths; zero (empty) unless M is torsion."""
        if self.free_rank > 0:
            return {}
        return self.torsion_lengths()

    def to_json(self):
        return {
            "free_rank": self.free_rank,
            "torsion_factors": [self.ring.to_str(t) for t in self.torsion_factors],
        }

    def __repr__(self):
        R = self.ring
        parts = [f"{R.describe()}^{self.free_rank}"] if self.free_rank else []
        parts += [f"{R.describe()}/({R.to_str(t)})" for t in self.torsion_factors]
        return " + ".join(parts) if parts else "0"


def _factor_torsion(ring: Ring, t):
    """Factor a torsion invariant into (prime, exponent) pairs."""
    if isinstance(ring, IntegerRing) or isinstance(ring, IntegersModRing):
        n = int(t if not isinstance(ring, IntegersModRing) else t % ring.n)
        n = abs(n)
        out = []
        for p in _prime_factors(n):
            out.append((p, _vp(n, p)))
        return out
    if isinstance(ring, PLocalRing):
        return [(ring.p, ring.valuation(t))]
    raise UnsupportedRingError(f"no torsion factorization over {ring.kind}")


def invariants_from_factors(ring: Ring, free_rank: int, factors) -> ModuleInvariants:
    """Normalize an unordered multiset of torsion factors into a chain."""
    factors = [ring.canon(f) for f in factors]
    factors = [f for f in factors if not ring.is_unit(f)]
    zeros = sum(1 for f in factors if ring.is_zero(f))
    factors = [f for f in factors if not ring.is_zero(f)]
    if ring.is_field:
        return ModuleInvariants(ring, free_rank + zeros)
    if not factors:
        return ModuleInvariants(ring, free_rank + zeros, ())
    if isinstance(ring, PLocalRing):
        chain = sorted(factors, key=ring.valuation)
        chain = [ring.canonical_associate(f) for f in chain]
        return ModuleInvariants(ring, free_rank + zeros, tuple(chain))
    # integer-like factors: normalize via SNF of a diagonal integer matrix
    ints = []
    for f in factors:
        if isinstance(ring, IntegersModRing):
            ints.append(f % ring.n)
        else:
            ints.append(abs(int(f)))
    k = len(ints)
    diag = [[ints[i] if i == j else 0 for j in range(k)] for i in range(k)]
    m = ExactMatrix(ZZ, diag)
    if isinstance(ring, IntegersModRing):
        inv = cokernel_invariants(
            ExactMatrix(ring, diag)
        )
        return ModuleInvariants(ring, free_rank + zeros, inv.torsion_factors)
    _, D, _ = smith_normal_form(m)
    chain = [D.entries[i][i] for i in range(k) if D.entries[i][i] not in (0, 1, -1)]
    return ModuleInvariants(ring, free_rank + zeros, tuple(abs(c) for c in chain))


# ---------------------------------------------------------------------------
# Smith normal form and derived operations
# ---------------------------------------------------------------------------


def smith_normal_form(m: ExactMatrix):
    """Return (U, D, V) with U*m*V = D diagonal with a divisibility chain.

    U and V are invertible over the ring.  Supported rings: Z, Z_(p), and
    fields.  Over Z/n (n composite) raises UnsupportedRingError; callers
    should use the lift-based kernel/cokernel helpers instead.
    """
    R = m.ring
    if not R.supports_snf:
        raise UnsupportedRingError(f"smith_normal_form unsupported over {R.describe()}")
    nr, nc = m.rows, m.cols
    A = [row[:] for row in m.entries]
    U = [[R.one() if i == j else R.zero() for j in range(nr)] for i in range(nr)]
    V = [[R.one() if i == j else R.zero() for j in range(nc)] for i in range(nc)]

    def row_sub(i, j, q):  # row_i -= q * row_j  (on A and U)
        if R.is_zero(q):
            return
        for t in range(nc):
            A[i][t] = R.sub(A[i][t], R.mul(q, A[j][t]))
        for t in range(nr):
            U[i][t] = R.sub(U[i][t], R.mul(q, U[j][t]))

    def col_sub(i, j, q):  # col_i -= q * col_j  (on A and V)
        if R.is_zero(q):
            return
        for t in range(nr):
            A[t][i] = R.sub(A[t][i], R.mul(q, A[t][j]))
        for t in range(nc):
            V[t][i] = R.sub(V[t][i], R.mul(q, V[t][j]))

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for t in range(nr):
                A[t][i], A[t][j] = A[t][j], A[t][i]
            for t in range(nc):
                V[t][i], V[t][j] = V[t][j], V[t][i]

    def find_pivot(t):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = A[i][j]
                if not R.is_zero(x):
                    k = R.pivot_key(x)
                    if best is None or k < best[0]:
                        best = (k, i, j)
        return best

    def eliminate_at(t):
        """Clear row t and column t beyond (t,t), leaving a pivot at (t,t)."""
        while True:
            best = find_pivot(t)
            if best is None:
                return False
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            dirty = False
            for i in range(t + 1, nr):
                if not R.is_zero(A[i][t]):
                    q, r = R.quo_rem(A[i][t], A[t][t])
                    row_sub(i, t, q)
                    if not R.is_zero(A[i][t]):
                        dirty = True
            for j in range(t + 1, nc):
                if not R.is_zero(A[t][j]):
                    q, r = R.quo_rem(A[t][j], A[t][t])
                    col_sub(j, t, q)
                    if not R.is_zero(A[t][j]):
                        dirty = True
            if not dirty:
                return True

    def diagonalize() -> int:
        rank = 0
        for t in range(min(nr, nc)):
            if not eliminate_at(t):
                break
            rank += 1
        return rank

    rank = diagonalize()
    # enforce the divisibility chain d_i | d_{i+1}: on a violation, mix the
    # two columns and re-diagonalize (the min-pivot rule pulls in the gcd)
    while True:
        violation = None
        for i in range(rank - 1):
            if not R.divides(A[i][i], A[i + 1][i + 1]):
                violation = i
                break
        if violation is None:
            break
        col_sub(violation, violation + 1, R.neg(R.one()))  # col_i += col_{i+1}
        rank = diagonalize()

    # normalize diagonal entries to canonical associates (scale rows by units)
    for i in range(min(nr, nc)):
        a = A[i][i]
        if R.is_zero(a):
            continue
        u, c = R.unit_and_canonical(a)
        if not R.eq(u, R.one()):
            ui = R.inv(u)
            for t in range(nc):
                A[i][t] = R.mul(ui, A[i][t])
            for t in range(nr):
                U[i][t] = R.mul(ui, U[i][t])

    return (
        ExactMatrix(R, U, nr, nr),
        ExactMatrix(R, A, nr, nc),
        ExactMatrix(R, V, nc, nc),
    )


def _diag(D: ExactMatrix):
    return [D.entries[i][i] for i in range(min(D.rows, D.cols))]


def _lift_zmod(m: ExactMatrix) -> ExactMatrix:
    """[A | nI] over Z, for kernel/cokernel computations over Z/n."""
    R = m.ring
    assert isinstance(R, IntegersModRing)
    ents = [
        [m.entries[i][j] for j in range(m.cols)]
        + [R.n if k == i else 0 for k in range(m.rows)]
        for i in range(m.rows)
    ]
    return ExactMatrix(ZZ, ents, m.rows, m.cols + m.rows)


def _zmod_invariants(R: IntegersModRing, int_factors) -> ModuleInvariants:
    """Interpret integer invariant factors (each dividing n) over Z/n.

    A factor equal to n is a free rank-one Z/n summand; units are dropped.
    """
    free = 0
    torsion = []
    for t in int_factors:
        t = int(t) % R.n
        if t == 0:
            free += 1
        elif not R.is_unit(t):
            torsion.append(t)
    return ModuleInvariants(R, free, tuple(torsion))


def cokernel_invariants(m: ExactMatrix) -> ModuleInvariants:
    """Invariants of coker(m : R^cols -> R^rows)."""
    R = m.ring
    if isinstance(R, IntegersModRing) and not R.is_field:
        lifted = cokernel_invariants(_lift_zmod(m))
        assert lifted.free_rank == 0
        return _zmod_invariants(R, lifted.torsion_factors)
    _, D, _ = smith_normal_form(m)
    diag = _diag(D)
    nonzero = [d for d in diag if not R.is_zero(d)]
    torsion = tuple(d for d in nonzero if not R.is_unit(d))
    return ModuleInvariants(R, m.rows - len(nonzero), torsion)


def kernel_basis(m: ExactMatrix):
    """Generators of {v : m v = 0} as a list of column vectors.

    Over fields and Z (and Z_(p)) this is a basis of the full kernel
    (saturated over Z).  Over Z/n it generates the kernel subgroup.
    """
    R = m.ring
    if isinstance(R, IntegersModRing) and not R.is_field:
        lifted = _lift_zmod(m)
        out = []
        seen = set()
        for v in kernel_basis(lifted):
            w = tuple(R.canon(x) for x in v[: m.cols])
            if any(x != 0 for x in w) and w not in seen:
                seen.add(w)
                out.append(list(w))
        return out
    _, D, V = smith_normal_form(m)
    diag = _diag(D)
    out = []
    for j in range(m.cols):
        dj = diag[j] if j < len(diag) else R.zero()
        if R.is_zero(dj):
            out.append([V.entries[t][j] for t in range(m.cols)])
    return out


def solve(m: ExactMatrix, b):
    """Solve m x = b exactly (b a list); returns x or None if unsolvable."""
    R = m.ring
    if isinstance(R, IntegersModRing) and not R.is_field:
        lifted = _lift_zmod(m)
        x = solve(lifted, [int(v) for v in b])
        if x is None:
            return None
        return [R.canon(v) for v in x[: m.cols]]
    U, D, V = smith_normal_form(m)
    c = U.apply_vector([R.canon(x) for x in b])
    diag = _diag(D)
    y = [R.zero()] * m.cols
    for i in range(m.rows):
        ci = c[i]
        di = diag[i] if i < len(diag) else R.zero()
        if R.is_zero(di):
            if not R.is_zero(ci):
                return None
        else:
            if i < m.cols:
                if not R.divides(di, ci):
                    return None
                y[i] = R.exact_div(ci, di)
            elif not R.is_zero(ci):
                return None
    return V.apply_vector(y)


def solve_columns(m: ExactMatrix, b: ExactMatrix):
    """Solve m X = b columnwise; returns ExactMatrix X or None."""
    R = m.ring
    cols = []
    for j in range(b.cols):
        x = solve(m, [b.entries[i][j] for i in range(b.rows)])
        if x is None:
            return None
        cols.append(x)
    ents = [[cols[j][i] for j in range(b.cols)] for i in range(m.cols)]
    return ExactMatrix(R, ents, m.cols, b.cols)


def homology_invariants(A: ExactMatrix, B: ExactMatrix) -> ModuleInvariants:
    """Invariants of ker(A)/im(B) for a complex C2 --B--> C1 --A--> C0.

    Requires A.cols == B.rows and A*B = 0.  Supported over Z, Z_(p), fields,
    and Z/n (computed as abelian-group homology via integer lifts; the
    resulting factors all divide n).
    """
    R = A.ring
    if A.cols != B.rows:
        raise ValueError("shape mismatch in homology")
    if A.cols == 0:
        return ModuleInvariants(R, 0, ())
    if isinstance(R, IntegersModRing) and not R.is_field:
        n = R.n
        a = A.cols
        # L = {v in Z^a : A v = 0 mod n}: full-rank lattice containing nZ^a
        Aint = ExactMatrix(ZZ, [[int(x) for x in row] for row in A.entries])
        big = ExactMatrix(
            ZZ,
            [
                [Aint.entries[i][j] for j in range(a)]
                + [n if k == i else 0 for k in range(A.rows)]
                for i in range(A.rows)
            ],
        )
        L = [v[:a] for v in kernel_basis(big)]
        # L generates the projection lattice; extract an honest basis via SNF:
        # Lmat = U^{-1} D V^{-1}, so the column lattice is spanned by the
        # columns of U^{-1} scaled by the nonzero diagonal entries of D.
        Lmat = ExactMatrix(ZZ, [[L[j][i] for j in range(len(L))] for i in range(a)], a, len(L))
        U, D, _ = smith_normal_form(Lmat)
        Uinv = solve_columns(U, ExactMatrix.identity(ZZ, a))
        diag = _diag(D)
        basis_cols = []
        for j, dj in enumerate(diag):
            if dj != 0:
                basis_cols.append([Uinv.entries[i][j] * dj for i in range(a)])
        Bcols = [[int(x) for x in [B.entries[i][j] for i in range(B.rows)]] for j in range(B.cols)]
        targets = Bcols + [[n if i == k else 0 for i in range(a)] for k in range(a)]
        Bas = ExactMatrix(ZZ, [[basis_cols[j][i] for j in range(len(basis_cols))] for i in range(a)], a, len(basis_cols))
        X = solve_columns(Bas, ExactMatrix(ZZ, [[t[i] for t in targets] for i in range(a)], a, len(targets)))
        if X is None:
            raise AssertionError("image not contained in kernel lattice")
        inv = cokernel_invariants(X)
        return _zmod_invariants(R, inv.torsion_factors)
    # PID / field case
    N = kernel_basis(A)  # basis of ker(A), saturated
    if not N:
        return ModuleInvariants(R, 0, ())
    a = A.cols
    Nmat = ExactMatrix(R, [[N[j][i] for j in range(len(N))] for i in range(a)], a, len(N))
    X = solve_columns(Nmat, B)
    if X is None:
        raise AssertionError("complex not exactly composable: im(B) not in ker(A)")
    return cokernel_invariants(X)


# ---------------------------------------------------------------------------
# Field linear algebra helpers (row reduction, subspaces)
# ---------------------------------------------------------------------------


class SpanReducer:
    """Incremental row-style span of vectors over a field (exact RREF)."""

    def __init__(self, ring: Ring, dim: int):
        if not ring.is_field:
            raise UnsupportedRingError("SpanReducer requires a field")
        self.ring = ring
        self.dim = dim
        self.pivots: dict[int, list] = {}

    def reduce(self, v):
        """Reduce v against the current span; returns the residue vector."""
        R = self.ring
        v = [R.canon(x) for x in v]
        for j in sorted(self.pivots):
            if not R.is_zero(v[j]):
                c = v[j]
                pv = self.pivots[j]
                for t in range(self.dim):
                    v[t] = R.sub(v[t], R.mul(c, pv[t]))
        return v

    def add(self, v) -> bool:
        """Add v to the span; returns True if the span grew."""
        R = self.ring
        v = self.reduce(v)
        for j in range(self.dim):
            if not R.is_zero(v[j]):
                c = R.inv(v[j])
                self.pivots[j] = [R.mul(c, x) for x in v]
                return True
        return False

    def contains(self, v) -> bool:
        R = self.ring
        return all(R.is_zero(x) for x in self.reduce(v))

    @property
    def rank(self) -> int:
        return len(self.pivots)
