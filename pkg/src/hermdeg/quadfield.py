"""Imaginary quadratic fields: elements, splitting, Hilbert symbols, class numbers.

Elements are written ``a + b*omega`` with ``omega = (D + sqrt(D)) / 2`` for the
field discriminant ``D``.  The same basis is used for every discriminant, so
``omega`` has trace ``D`` and norm ``(D*D - D) / 4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime, primerange

from .errors import InvalidInput, NonFundamental, NonNegative, UnsupportedCase, ZeroArgument

INF = "inf"

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(abs(n)).values())


def is_fundamental(delta: int) -> bool:
    if delta % 4 == 1:
        return _squarefree(delta)
    if delta % 4 == 0:
        d = delta // 4
        return d % 4 in (2, 3) and _squarefree(d)
    return False


@dataclass(frozen=True)
class FieldContext:
    delta: int
    delta_primes: tuple[int, ...]
    h: int
    w: int

    @property
    def num_ramified(self) -> int:
        return len(self.delta_primes)

    @property
    def omega_trace(self) -> int:
        return self.delta

    @property
    def omega_norm(self) -> int:
        return (self.delta * self.delta - self.delta) // 4

    def elt(self, a, b=0) -> "KElement":
        return KElement(Fraction(a), Fraction(b), self.delta)

    @property
    def one(self) -> "KElement":
        return self.elt(1)

    @property
    def zero(self) -> "KElement":
        return self.elt(0)

    @property
    def omega(self) -> "KElement":
        return self.elt(0, 1)

    def units(self) -> list["KElement"]:
        """All elements of O_k^x, via the norm-one solutions of the norm form."""
        return [self.elt(a, b) for a, b in _norm_solutions(self.delta, 1)]


@lru_cache(maxsize=None)
def _norm_solutions(delta: int, t: int) -> tuple[tuple[int, int], ...]:
    # N(a + b w) = a^2 + D a b + (D^2 - D)/4 b^2 = (a + D b/2)^2 + |D| b^2 / 4
    out = []
    bmax = isqrt(4 * t // abs(delta)) + 1
    for b in range(-bmax, bmax + 1):
        rest = 4 * t - abs(delta) * b * b
        if rest < 0:
            continue
        s = isqrt(rest)
        if s * s != rest:
            continue
        # 2a + D b = +-s
        for sgn in {s, -s}:
            twice_a = sgn - delta * b
            if twice_a % 2 == 0:
                out.append((twice_a // 2, b))
    return tuple(sorted(set(out)))


class KElement:
    """An element ``a + b*omega`` of k, with rational coordinates."""

    __slots__ = ("a", "b", "delta")

    def __init__(self, a: Fraction, b: Fraction, delta: int):
        self.a = a
        self.b = b
        self.delta = delta

    def _lift(self, other) -> "KElement":
        if isinstance(other, KElement):
            return other
        return KElement(Fraction(other), Fraction(0), self.delta)

    def __add__(self, other):
        o = self._lift(other)
        return KElement(self.a + o.a, self.b + o.b, self.delta)

    __radd__ = __add__

    def __neg__(self):
        return KElement(-self.a, -self.b, self.delta)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        d = self.delta
        # omega^2 = D*omega - (D^2 - D)/4
        nw = Fraction(d * d - d, 4)
        bb = self.b * o.b
        return KElement(self.a * o.a - bb * nw, self.a * o.b + self.b * o.a + bb * d, d)

    __rmul__ = __mul__

    def conj(self) -> "KElement":
        return KElement(self.a + self.b * self.delta, -self.b, self.delta)

    def norm(self) -> Fraction:
        d = self.delta
        return self.a * self.a + d * self.a * self.b + Fraction(d * d - d, 4) * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.delta * self.b

    def inverse(self) -> "KElement":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return KElement(c.a / nm, c.b / nm, self.delta)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, KElement):
            return self.a == other.a and self.b == other.b
        try:
            return self.b == 0 and self.a == Fraction(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def denominator(self) -> int:
        da, db = self.a.denominator, self.b.denominator
        return da * db // gcd(da, db)

    def pair(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)

    def __repr__(self):
        return f"KElement({self.a}, {self.b})"


def norm(ctx: FieldContext, x: KElement) -> Fraction:
    return x.norm()


def kronecker(delta: int, p: int) -> int:
    """Kronecker symbol (delta | p) for a prime p."""
    if delta % p == 0:
        return 0
    if p == 2:
        return 1 if delta % 8 in (1, 7) else -1
    r = pow(delta % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def splitting(ctx: FieldContext, p: int) -> str:
    if not isprime(p):
        raise InvalidInput(f"{p} is not prime")
    return {1: SPLIT, -1: INERT, 0: RAMIFIED}[kronecker(ctx.delta, p)]


def _split_off(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a, b, v) -> int:
    """The quadratic Hilbert symbol (a, b)_v over Q_v for nonzero rationals."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol of zero")
    if v == INF:
        return -1 if a < 0 and b < 0 else 1
    # multiplying by the square of the denominator keeps the class mod squares
    ai = a.numerator * a.denominator
    bi = b.numerator * b.denominator
    p = v
    alpha, u = _split_off(ai, p)
    beta, w = _split_off(bi, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(w) + alpha * omg(w) + beta * omg(u)
        return -1 if e % 2 else 1
    s = (-1) ** (alpha * beta * ((p - 1) // 2) % 2)
    if beta % 2:
        s *= _legendre(u, p)
    if alpha % 2:
        s *= _legendre(w, p)
    return s


def hilbert_chi(ctx: FieldContext, a, v) -> int:
    """(a, D)_v: the local character attached to k at the place v."""
    return hilbert_symbol(a, ctx.delta, v)


def reduced_forms(delta: int) -> list[tuple[int, int, int]]:
    """Reduced primitive positive definite forms (a, b, c) with b^2 - 4ac = delta."""
    forms = []
    a = 1
    while 3 * a * a <= -delta:
        for b in range(-a + 1, a + 1):
            if (b - delta) % 2:
                continue
            num = b * b - delta
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def reduce_form(f: tuple[int, int, int]) -> tuple[int, int, int]:
    a, b, c = f
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose_forms(f1, f2):
    """Dirichlet composition of primitive forms of equal discriminant, reduced."""
    (a1, b1, c1), (a2, b2, c2) = f1, f2
    if a1 > a2:
        (a1, b1, c1), (a2, b2, c2) = (a2, b2, c2), (a1, b1, c1)
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, v = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form((a3, b3, c3))


def class_number_by_closure(delta: int) -> int:
    """Class number as the size of the group generated by small prime forms.

    Independent of the reduced-form count: it only uses composition, and
    primes up to the Minkowski bound generate the class group.
    """
    identity = reduce_form((1, delta % 2, (delta % 2 - delta) // 4))
    gens = []
    bound = isqrt(-delta) + 1
    for q in primerange(2, bound + 1):
        if kronecker(delta, q) == -1:
            continue
        for b in range(0, 2 * q):
            if (b * b - delta) % (4 * q) == 0:
                gens.append(reduce_form((q, b, (b * b - delta) // (4 * q))))
                break
    group = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                fg = compose_forms(f, g)
                if fg not in group:
                    group.add(fg)
                    nxt.append(fg)
        frontier = nxt
    return len(group)


def make_field(delta: int) -> FieldContext:
    if delta >= 0:
        raise NonNegative(f"discriminant must be negative, got {delta}")
    if not is_fundamental(delta):
        raise NonFundamental(f"{delta} is not a fundamental discriminant")
    primes = tuple(sorted(factorint(-delta)))
    h = len(reduced_forms(delta))
    w = {-4: 4, -3: 6}.get(delta, 2)
    return FieldContext(delta=delta, delta_primes=primes, h=h, w=w)


def moduli_component_count(ctx: FieldContext, n: int, exceptional_2adic: bool = False) -> int:
    """Number of geometrically irreducible components of one relevant-space piece."""
    if n < 2:
        raise UnsupportedCase("component count needs n >= 2")
    if n % 2:
        if exceptional_2adic:
            raise UnsupportedCase("the exceptional 2-adic case only arises for even n")
        return ctx.h
    if exceptional_2adic:
        v2, _ = _split_off(-ctx.delta, 2)
        if v2 != 2:
            raise UnsupportedCase("exceptional case requires ord_2(D) = 2")
        if ctx.delta == -4:
            return 1
        count = Fraction(4 * ctx.h, 2 ** ctx.num_ramified)
    else:
        count = Fraction(2 * ctx.h, 2 ** ctx.num_ramified)
    if count.denominator != 1:
        raise UnsupportedCase("non-integral component count")
    return int(count)
