"""
Level-one cusp forms by q-expansion, weight-k slash actions, and the
letters (f, m) standing for the 1-forms  f(z) z^(m-1) dz,  1 <= m <= k-1.

For g = (a b; c d) in SL(2,Z) the pullback of a letter is

    g^*( f(z) z^(m-1) dz ) = f(z) (az+b)^(m-1) (cz+d)^(k-1-m) dz,

a polynomial combination of letters of the same form.  With the Kronecker
pairing between letters and the formal variables A_v, the induced
substitution g_* on the A_v is the transpose of the pullback matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .psl2z import Mat2, SIGMA, TAU

TWO_PI_I = 2j * np.pi


class FormError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact q-expansions

def _sparse_times_dense(sparse, dense, N):
    out = np.zeros(N, dtype=object)
    out[:] = 0
    for e, c in sparse:
        if e >= N:
            break
        out[e:] += c * dense[:N - e]
    return out


@lru_cache(maxsize=8)
def _delta_coefficients(N: int) -> tuple:
    # q prod (1-q^n)^24 = q (sum_k (-1)^k (2k+1) q^(k(k+1)/2))^8   (Jacobi)
    M = N  # coefficients of the eta^24 / q part, degrees 0..N-1
    jac = []
    k = 0
    while k * (k + 1) // 2 < M:
        jac.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    power = np.zeros(M, dtype=object)
    power[:] = 0
    for e, c in jac:
        power[e] = c
    for _ in range(7):
        power = _sparse_times_dense(jac, power, M)
    return (0,) + tuple(int(x) for x in power)


def sigma_k(n: int, k: int) -> int:
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d ** k
            e = n // d
            if e != d:
                s += e ** k
        d += 1
    return s


def eisenstein_e4(N: int) -> tuple:
    return (1,) + tuple(240 * sigma_k(n, 3) for n in range(1, N + 1))


def _mul_series(a, b, N):
    out = [0] * (N + 1)
    for i, x in enumerate(a[:N + 1]):
        if x:
            for j, y in enumerate(b[:N + 1 - i]):
                out[i + j] += x * y
    return tuple(out)


def dim_modular_forms(k: int) -> int:
    """Valence formula for level one."""
    if k < 0 or k % 2:
        return 0
    if k == 2:
        return 0
    return k // 12 + (0 if k % 12 == 2 else 1)


def dim_cusp_forms(k: int) -> int:
    if k < 12 or k % 2:
        return 0
    return dim_modular_forms(k) - 1


# ---------------------------------------------------------------------------
# cusp forms

@dataclass(frozen=True, eq=False)
class CuspForm:
    """Level-one cusp form  f = sum_{n>=1} a_n q^n,  q = exp(2 pi i z).

    `coefficients` holds a_0 = 0, a_1, ..., a_N.  Equality and hashing go
    by (name, weight).
    """

    name: str
    weight: int
    coefficients: tuple
    y_min: float = 0.05
    _float: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.weight < 12 or self.weight % 2:
            raise FormError("level-one cusp forms have even weight >= 12")
        if not self.coefficients or self.coefficients[0] != 0:
            raise FormError("cusp form must have a_0 = 0")
        object.__setattr__(self, "_float", np.array([complex(c) for c in self.coefficients]))

    def __eq__(self, other):
        return isinstance(other, CuspForm) and (self.name, self.weight) == (other.name, other.weight)

    def __hash__(self):
        return hash((self.name, self.weight))

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n):
        return self.coefficients[n]

    def scaled(self, c, name=None):
        return CuspForm(name or "%s*%s" % (c, self.name), self.weight,
                        tuple(c * a for a in self.coefficients), self.y_min)

    def tail_bound(self, y: float) -> float:
        """Heuristic bound on sum_{n>N} |a_n| e^(-2 pi n y) using |a_n| <= 2 n^(k/2)."""
        n = np.arange(self.N + 1, self.N + 400)
        return float(np.sum(2.0 * n ** (self.weight / 2) * np.exp(-2 * np.pi * n * y)))

    def qexp(self, z):
        """Partial sum of the q-expansion; requires Im z >= y_min."""
        z = np.asarray(z, dtype=complex)
        if np.any(z.imag < self.y_min):
            raise FormError("Im z below y_min = %g" % self.y_min)
        q = np.exp(TWO_PI_I * z)
        # Horner in q
        acc = np.zeros_like(q)
        for a in self._float[:0:-1]:
            acc = (acc + a) * q
        return acc

    def __call__(self, z):
        return evaluate(self, z)


def evaluate(f: CuspForm, z):
    """f(z) for any z in H, via reduction to the fundamental domain.

    With w = g z in the standard fundamental domain, f(z) = f(w) (cz+d)^-k
    where (c, d) is the lower row of g.
    """
    z = np.asarray(z, dtype=complex)
    w = z.copy()
    a = np.ones(z.shape)
    b = np.zeros(z.shape)
    c = np.zeros(z.shape)
    d = np.ones(z.shape)
    for _ in range(200):
        n = np.round(w.real)
        w = w - n
        a, b = a - n * c, b - n * d
        flip = np.abs(w) < 1 - 1e-14
        if not np.any(flip):
            break
        w = np.where(flip, -1 / np.where(flip, w, 1), w)
        a, b, c, d = (np.where(flip, -c, a), np.where(flip, -d, b),
                      np.where(flip, a, c), np.where(flip, b, d))
    else:
        raise FormError("reduction to the fundamental domain did not terminate")
    return f.qexp(w) / (c * z + d) ** f.weight


@lru_cache(maxsize=None)
def delta(N: int = 60) -> CuspForm:
    """Ramanujan's Delta, weight 12, with exact integer coefficients up to q^N."""
    return CuspForm("Delta", 12, _delta_coefficients(N))


@lru_cache(maxsize=None)
def delta_e4(N: int = 60) -> CuspForm:
    """The weight-16 cusp form Delta * E_4."""
    return CuspForm("DeltaE4", 16, _mul_series(delta(N).coefficients, eisenstein_e4(N), N))


def delta_qexp(N: int) -> CuspForm:
    return delta(N)


BUILTIN = {"delta": delta, "Delta": delta, "delta_e4": delta_e4, "DeltaE4": delta_e4}


def get_form(name: str, N: int = 60) -> CuspForm:
    if name in BUILTIN:
        return BUILTIN[name](N)
    return load_form(name)


def load_form(path) -> CuspForm:
    """Read {"name", "weight", "coefficients": [a_1, a_2, ...]} (complex as [re, im])."""
    with open(path) as fh:
        data = json.load(fh)
    coeffs = [0]
    for c in data["coefficients"]:
        coeffs.append(complex(*c) if isinstance(c, list) else c)
    return CuspForm(data.get("name", str(path)), int(data["weight"]), tuple(coeffs))


def dump_form(f: CuspForm) -> str:
    out = []
    for c in f.coefficients[1:]:
        out.append([c.real, c.imag] if isinstance(c, complex) else c)
    return json.dumps({"name": f.name, "weight": f.weight, "coefficients": out})


# ---------------------------------------------------------------------------
# slash actions

def slash(f, g, k=None, variant="det^(k-1)"):
    """z -> f(gz) j(g,z)^-k (det g)^e with e = k-1 or k/2; g = (a, b, c, d), det > 0."""
    if isinstance(g, Mat2):
        g = g.tuple()
    a, b, c, d = g
    det = a * d - b * c
    if det <= 0:
        raise FormError("slash action needs det g > 0")
    if k is None:
        k = f.weight
    if variant in ("det^(k-1)", "k-1"):
        e = k - 1
    elif variant in ("det^(k/2)", "k/2"):
        e = k / 2
    else:
        raise FormError("unknown slash normalisation %r" % (variant,))

    def h(z):
        z = np.asarray(z, dtype=complex)
        return f((a * z + b) / (c * z + d)) * (c * z + d) ** (-k) * float(det) ** e
    return h


# ---------------------------------------------------------------------------
# letters

@dataclass(frozen=True)
class FormLetter:
    form: CuspForm
    m: int

    def __post_init__(self):
        if not 1 <= self.m <= self.form.weight - 1:
            raise FormError("exponent m=%d outside 1..%d" % (self.m, self.form.weight - 1))

    @property
    def weight(self) -> int:
        return self.form.weight

    def __str__(self):
        return "%s_%d" % (self.form.name, self.m)

    __repr__ = __str__


def letters(form: CuspForm, exponents=None) -> tuple:
    if exponents is None:
        exponents = range(1, form.weight)
    return tuple(FormLetter(form, m) for m in exponents)


def _pullback_column(g: Mat2, v: FormLetter) -> dict:
    """{exponent m': integer coefficient} of g^* omega_v."""
    return pullback_exponents(g, v.weight, v.m)


def pullback_exponents(g: Mat2, k: int, m: int) -> dict:
    """Expansion of (az+b)^(m-1) (cz+d)^(k-1-m) as {m': coefficient of z^(m'-1)}."""
    a, b, c, d = g.tuple()
    p1 = [comb(m - 1, i) * a ** i * b ** (m - 1 - i) for i in range(m)]
    p2 = [comb(k - 1 - m, j) * c ** j * d ** (k - 1 - m - j) for j in range(k - m)]
    out: dict = {}
    for i, x in enumerate(p1):
        if x:
            for j, y in enumerate(p2):
                if y:
                    out[i + j + 1] = out.get(i + j + 1, 0) + x * y
    return {e: x for e, x in out.items() if x}


def symmetric_power_action(g: Mat2, k: int) -> np.ndarray:
    """Exact (k-1)x(k-1) matrix of g_* on the exponents m = 1..k-1 of weight k."""
    P = np.zeros((k - 1, k - 1), dtype=object)
    P[:] = 0
    for m in range(1, k):
        for e, x in pullback_exponents(g, k, m).items():
            P[e - 1, m - 1] += x
    return P.T


def close_alphabet(alphabet) -> tuple:
    """Smallest sup-alphabet stable under sigma and tau pullbacks, in a canonical order."""
    todo = list(alphabet)
    seen = set(todo)
    while todo:
        v = todo.pop()
        for g in (SIGMA, TAU):
            for e in _pullback_column(g, v):
                u = FormLetter(v.form, e)
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    forms = []
    for v in alphabet:
        if v.form not in forms:
            forms.append(v.form)
    return tuple(sorted(seen, key=lambda v: (forms.index(v.form), v.m)))


def is_closed(alphabet) -> bool:
    return set(close_alphabet(alphabet)) == set(alphabet)


@lru_cache(maxsize=4096)
def pullback_matrix(g: Mat2, alphabet: tuple) -> np.ndarray:
    """Integer matrix P with g^* omega_v = sum_w P[w, v] omega_w (object dtype, exact)."""
    idx = {v: i for i, v in enumerate(alphabet)}
    L = len(alphabet)
    P = np.zeros((L, L), dtype=object)
    P[:] = 0
    for j, v in enumerate(alphabet):
        for e, x in _pullback_column(g, v).items():
            u = FormLetter(v.form, e)
            if u not in idx:
                raise FormError("alphabet not closed under %r: %s missing" % (g, u))
            P[idx[u], j] += x
    P.setflags(write=False)
    return P


def letter_action(g: Mat2, alphabet: tuple, exact=False) -> np.ndarray:
    """The substitution g_* on the formal variables: transpose of the pullback matrix."""
    P = pullback_matrix(g, tuple(alphabet)).T
    if exact:
        from fractions import Fraction
        return np.vectorize(Fraction, otypes=[object])(P) if P.size else P
    return P.astype(float).astype(complex)


class OmegaForm:
    """The connection form  Omega = sum_v A_v f_v(z) z^(m_v - 1) dz  on an alphabet of letters."""

    def __init__(self, alphabet):
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise FormError("letters must be distinct")
        self.forms = []
        for v in self.alphabet:
            if v.form not in self.forms:
                self.forms.append(v.form)

    @classmethod
    def closure(cls, alphabet):
        return cls(close_alphabet(alphabet))

    def __len__(self):
        return len(self.alphabet)

    def densities(self, z) -> np.ndarray:
        """Array (L, len(z)) of f_v(z) z^(m_v - 1)."""
        z = np.asarray(z, dtype=complex).ravel()
        values = {f: evaluate(f, z) for f in self.forms}
        out = np.empty((len(self.alphabet), z.size), dtype=complex)
        for i, v in enumerate(self.alphabet):
            out[i] = values[v.form] * z ** (v.m - 1)
        return out

    def letter_action(self, g: Mat2, exact=False):
        return letter_action(g, self.alphabet, exact)

    def is_closed(self) -> bool:
        return is_closed(self.alphabet)
