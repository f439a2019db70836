"""
Exact arithmetic in PSL(2,Z) viewed as the free product Z/2 * Z/3.

Generators

    sigma = ( 0 -1 )      tau = ( 0 -1 )
            ( 1  0 )            ( 1 -1 )

sigma^2 = tau^3 = 1 projectively.  Words are tuples over the tokens
"s" (sigma), "t" (tau) and "tt" (tau^2); a normal-form word alternates
between "s" and a tau-power token.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class Mat2:
    """Element of PSL(2,Z): an integer matrix of determinant one, up to sign.

    The stored representative has its first nonzero entry (row-major)
    positive, so dataclass equality and hashing are projective.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if a * d - b * c != 1:
            raise ValueError("determinant of (%s %s; %s %s) is not 1" % (a, b, c, d))
        lead = next(x for x in (a, b, c, d) if x != 0)
        if lead < 0:
            object.__setattr__(self, "a", -a)
            object.__setattr__(self, "b", -b)
            object.__setattr__(self, "c", -c)
            object.__setattr__(self, "d", -d)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    def __mul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inv(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "Mat2":
        base = self if n >= 0 else self.inv()
        out = Mat2.identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def tuple(self):
        return (self.a, self.b, self.c, self.d)

    def is_identity(self) -> bool:
        return self == IDENTITY

    def __repr__(self):
        return "Mat2(%d, %d, %d, %d)" % self.tuple()


IDENTITY = Mat2(1, 0, 0, 1)
SIGMA = Mat2(0, -1, 1, 0)
TAU = Mat2(0, -1, 1, -1)
# sigma*tau is the translation z -> z - 1, generating the stabilizer of infinity
SIGMA_TAU = SIGMA * TAU

TOKENS = {"s": SIGMA, "t": TAU, "tt": TAU * TAU}
TOKEN_LENGTH = {"s": 1, "t": 1, "tt": 2}


# ---------------------------------------------------------------------------
# words

def check_word(w: Sequence[str]) -> None:
    prev = None
    for tok in w:
        if tok not in TOKENS:
            raise WordError("unknown token %r" % (tok,))
        if prev is not None and (prev == "s") == (tok == "s"):
            raise WordError("tokens %r, %r violate alternation in %r" % (prev, tok, w))
        prev = tok


def eval_word(w: Sequence[str]) -> Mat2:
    check_word(w)
    m = IDENTITY
    for tok in w:
        m = m * TOKENS[tok]
    return m


def word_length(w: Sequence[str]) -> int:
    return sum(TOKEN_LENGTH[tok] for tok in w)


def parse_word(text: str) -> tuple:
    """Parse a serialized word such as "s.tt.s.t" (the empty string is the identity)."""
    text = text.strip()
    if not text or text in ("1", "e"):
        return ()
    w = tuple(tok for tok in text.replace(" ", ".").split(".") if tok)
    check_word(w)
    return w


def format_word(w: Sequence[str]) -> str:
    return ".".join(w)


def reduce_tokens(tokens: Iterable[str]) -> tuple:
    """Free reduction in Z/2 * Z/3 of an arbitrary token sequence."""
    stack: list = []
    for tok in tokens:
        if tok == "s":
            if stack and stack[-1] == "s":
                stack.pop()
            else:
                stack.append("s")
            continue
        e = TOKEN_LENGTH[tok]
        if stack and stack[-1] != "s":
            e = (e + TOKEN_LENGTH[stack.pop()]) % 3
        if e:
            stack.append("t" if e == 1 else "tt")
    return tuple(stack)


def inverse_word(w: Sequence[str]) -> tuple:
    inv = {"s": "s", "t": "tt", "tt": "t"}
    return tuple(inv[tok] for tok in reversed(w))


def normal_form(m: Mat2) -> tuple:
    """Unique alternating word in s, t, tt evaluating to m.

    Euclid's algorithm writes m = T^q1 S T^q2 S ... T^qn with T = sigma*tau
    (z -> z-1) and S = sigma^-1; substituting T = s.t, T^-1 = tt.s and
    freely reducing yields the normal form.
    """
    a, b, c, d = m.tuple()
    tokens: list = []

    def translation(q):
        # tokens of (1 q; 0 1) = (sigma tau)^-q
        return ["tt", "s"] * q if q > 0 else ["s", "t"] * (-q)

    while c != 0:
        q = a // c
        a, b = a - q * c, b - q * d
        tokens += translation(q)
        # S^-1 (a b; c d) = (c d; -a -b)
        a, b, c, d = c, d, -a, -b
        tokens.append("s")
    # now +-(1 n; 0 1)
    n = b * a  # a = +-1, d = a
    tokens += translation(n)
    return reduce_tokens(tokens)


def enumerate_words(max_length: int):
    """All normal-form words of length <= max_length (brute force)."""
    out = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            for tok in ("s", "t", "tt"):
                if w and (w[-1] == "s") == (tok == "s"):
                    continue
                v = w + (tok,)
                if word_length(v) <= max_length:
                    nxt.append(v)
        out += nxt
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# points of the completed upper half plane

@dataclass(frozen=True)
class Cusp:
    """Rational cusp p/q in lowest terms with q >= 0; infinity is 1/0."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a cusp")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def fraction(self) -> Fraction:
        if self.is_infinity:
            raise ValueError("infinity has no rational value")
        return Fraction(self.p, self.q)

    def __repr__(self):
        return "oo" if self.is_infinity else "%d/%d" % (self.p, self.q)


INF = Cusp(1, 0)

Point = Union[complex, Cusp]


def as_point(x) -> Point:
    """Coerce ints, Fractions, "oo"/"inf" strings and complex numbers."""
    if isinstance(x, Cusp):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("oo", "inf", "infinity", "i*oo", "ioo"):
            return INF
        if "/" in s or s.lstrip("-").isdigit():
            f = Fraction(s)
            return Cusp(f.numerator, f.denominator)
        return complex(s.replace("i", "j"))
    if isinstance(x, (int, Fraction)):
        f = Fraction(x)
        return Cusp(f.numerator, f.denominator)
    z = complex(x)
    if z.imag <= 0:
        raise ValueError("point %r is not in the upper half plane" % (x,))
    return z


def is_cusp(p) -> bool:
    return isinstance(p, Cusp)


def mobius(m: Mat2, p: Point) -> Point:
    a, b, c, d = m.tuple()
    if isinstance(p, Cusp):
        return Cusp(a * p.p + b * p.q, c * p.p + d * p.q)
    z = complex(p)
    return (a * z + b) / (c * z + d)


# ---------------------------------------------------------------------------
# continued fractions

@dataclass(frozen=True)
class Convergents:
    """Convergent chain p_k/q_k for k = -1..n and the matrices g_0..g_n.

    g_k = ( p_k  (-1)^(k-1) p_(k-1) )
          ( q_k  (-1)^(k-1) q_(k-1) )

    maps infinity to p_k/q_k and 0 to p_(k-1)/q_(k-1).
    """

    partial_quotients: tuple
    fractions: tuple  # ((p_-1, q_-1), (p_0, q_0), ..., (p_n, q_n))
    matrices: tuple   # (g_0, ..., g_n)

    @property
    def n(self) -> int:
        return len(self.matrices) - 1

    def cusps(self):
        return [Cusp(p, q) for p, q in self.fractions]


def continued_fraction(a: Fraction) -> list:
    a = Fraction(a)
    out = []
    p, q = a.numerator, a.denominator
    while q:
        t = p // q
        out.append(t)
        p, q = q, p - t * q
    return out


def convergents(a) -> Convergents:
    a = Fraction(a)
    cf = continued_fraction(a)
    fr = [(1, 0)]
    p2, q2 = 0, 1  # p_-2, q_-2
    p1, q1 = 1, 0
    for t in cf:
        p, q = t * p1 + p2, t * q1 + q2
        fr.append((p, q))
        p2, q2, p1, q1 = p1, q1, p, q
    mats = []
    for k in range(len(cf)):
        pk, qk = fr[k + 1]
        pm, qm = fr[k]
        e = 1 if (k - 1) % 2 == 0 else -1
        mats.append(Mat2(pk, e * pm, qk, e * qm))
    return Convergents(tuple(cf), tuple(fr), tuple(mats))


def cusp_to_infinity(a: Point) -> Mat2:
    """Some g with g(infinity) = a (the last convergent matrix)."""
    a = as_point(a)
    if not isinstance(a, Cusp):
        raise ValueError("%r is not a cusp" % (a,))
    if a.is_infinity:
        return IDENTITY
    return convergents(a.fraction()).matrices[-1]


def cusp_stabilizer_generator(a) -> Mat2:
    """Generator g^-1 (sigma tau) g of the stabilizer of the cusp a, where g a = oo."""
    g = cusp_to_infinity(a).inv()
    return g.inv() * SIGMA_TAU * g
