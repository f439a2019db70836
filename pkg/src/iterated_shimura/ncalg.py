"""
Truncated noncommutative formal series  F = sum_w F(w) A_w  over a finite
alphabet, with all words of length > depth discarded.

Storage is dense: level d holds the L**d coefficients of the words of
length d in row-major order, so the word (v1, ..., vd) sits at index
v1*L**(d-1) + ... + vd and concatenation of words is a Kronecker product.
Coefficients are complex doubles, or Fractions in exact mode (object
arrays) for algebraic tests.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from math import factorial

import numpy as np

MAX_DEPTH = 5


class SeriesError(ValueError):
    pass


def _outer(a, b):
    return np.multiply.outer(a, b).ravel()


def _zeros(n, exact):
    if exact:
        out = np.empty(n, dtype=object)
        out[:] = [Fraction(0)] * n
        return out
    return np.zeros(n, dtype=complex)


class TruncSeries:
    """Element of C<<A_v>> modulo words longer than `depth`."""

    __slots__ = ("alphabet", "depth", "levels", "exact", "_index")

    def __init__(self, alphabet, depth, levels, exact=False):
        alphabet = tuple(alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise SeriesError("alphabet letters must be distinct")
        if not 0 <= depth <= MAX_DEPTH:
            raise SeriesError("depth must lie in 0..%d" % MAX_DEPTH)
        L = len(alphabet)
        if len(levels) != depth + 1:
            raise SeriesError("expected %d levels" % (depth + 1))
        lv = []
        for d, arr in enumerate(levels):
            arr = np.asarray(arr, dtype=object if exact else complex).ravel()
            if arr.shape != (L ** d,):
                raise SeriesError("level %d has %d entries, expected %d" % (d, arr.size, L ** d))
            lv.append(arr)
        self.alphabet = alphabet
        self.depth = depth
        self.levels = lv
        self.exact = exact
        self._index = {v: i for i, v in enumerate(alphabet)}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, alphabet, depth, exact=False):
        L = len(tuple(alphabet))
        return cls(alphabet, depth, [_zeros(L ** d, exact) for d in range(depth + 1)], exact)

    @classmethod
    def one(cls, alphabet, depth, exact=False):
        out = cls.zero(alphabet, depth, exact)
        out.levels[0][0] = Fraction(1) if exact else 1.0
        return out

    @classmethod
    def from_dict(cls, alphabet, depth, coeffs, exact=False):
        """Build from {word: coefficient}; words are tuples of letters."""
        out = cls.zero(alphabet, depth, exact)
        for w, c in coeffs.items():
            w = tuple(w)
            if len(w) > depth:
                continue
            out.levels[len(w)][out._flat(w)] += Fraction(c) if exact else c
        return out

    @classmethod
    def letter(cls, alphabet, depth, v, exact=False):
        return cls.from_dict(alphabet, depth, {(v,): 1}, exact)

    def _like(self, levels):
        return TruncSeries(self.alphabet, self.depth, levels, self.exact)

    def copy(self):
        return self._like([x.copy() for x in self.levels])

    # -- indexing -------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def _flat(self, w) -> int:
        L = len(self.alphabet)
        i = 0
        for v in w:
            i = i * L + self._index[v]
        return i

    def __getitem__(self, w):
        w = tuple(w)
        if len(w) > self.depth:
            return Fraction(0) if self.exact else 0j
        return self.levels[len(w)][self._flat(w)]

    def words(self, d):
        return itertools.product(self.alphabet, repeat=d)

    def items(self):
        for d in range(self.depth + 1):
            for w, c in zip(self.words(d), self.levels[d]):
                if c != 0:
                    yield w, c

    def tensor(self, d):
        return self.levels[d].reshape((len(self.alphabet),) * d)

    def is_unital(self) -> bool:
        return self.levels[0][0] == 1

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise TypeError("expected TruncSeries, got %r" % type(other))
        if other.alphabet != self.alphabet or other.depth != self.depth:
            raise SeriesError("alphabet/depth mismatch")
        if other.exact != self.exact:
            raise SeriesError("cannot mix exact and floating series")

    # -- ring structure -------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        return self._like([a + b for a, b in zip(self.levels, other.levels)])

    def __sub__(self, other):
        self._check(other)
        return self._like([a - b for a, b in zip(self.levels, other.levels)])

    def __neg__(self):
        return self._like([-a for a in self.levels])

    def scale(self, c):
        return self._like([a * c for a in self.levels])

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._check(other)
        out = [_zeros(len(self.alphabet) ** d, self.exact) for d in range(self.depth + 1)]
        for i, a in enumerate(self.levels):
            if not np.any(a != 0):
                continue
            for j in range(self.depth - i + 1):
                b = other.levels[j]
                out[i + j] = out[i + j] + _outer(a, b)
        return self._like(out)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = TruncSeries.one(self.alphabet, self.depth, self.exact)
        for _ in range(n):
            out = out * self
        return out

    def augmentation(self):
        """The part of positive length (empty-word coefficient set to 0)."""
        lv = [x.copy() for x in self.levels]
        lv[0] = _zeros(1, self.exact)
        return self._like(lv)

    def _require_unital(self, what):
        if not self.is_unital():
            raise SeriesError("%s needs a unital series (empty-word coefficient 1)" % what)

    def inverse(self):
        self._require_unital("inverse")
        x = -self.augmentation()
        out = TruncSeries.one(self.alphabet, self.depth, self.exact)
        p = out
        for _ in range(self.depth):
            p = p * x
            out = out + p
        return out

    def sqrt(self):
        """Unique unital G with G*G = F, solved one depth at a time."""
        self._require_unital("sqrt")
        half = Fraction(1, 2) if self.exact else 0.5
        y = [x.copy() for x in TruncSeries.zero(self.alphabet, self.depth, self.exact).levels]
        for d in range(1, self.depth + 1):
            acc = self.levels[d].copy()
            for i in range(1, d):
                acc = acc - _outer(y[i], y[d - i])
            y[d] = acc * half
        y[0] = self.levels[0].copy()
        return self._like(y)

    def log(self):
        self._require_unital("log")
        x = self.augmentation()
        out = TruncSeries.zero(self.alphabet, self.depth, self.exact)
        p = TruncSeries.one(self.alphabet, self.depth, self.exact)
        for n in range(1, self.depth + 1):
            p = p * x
            c = Fraction((-1) ** (n + 1), n) if self.exact else (-1) ** (n + 1) / n
            out = out + p.scale(c)
        return out

    def exp(self):
        if self.levels[0][0] != 0:
            raise SeriesError("exp needs a series without constant term")
        out = TruncSeries.one(self.alphabet, self.depth, self.exact)
        p = out
        for n in range(1, self.depth + 1):
            p = p * self
            c = Fraction(1, factorial(n)) if self.exact else 1.0 / factorial(n)
            out = out + p.scale(c)
        return out

    # -- group-like elements --------------------------------------------------

    def shuffle_residual(self, relative=False):
        """max over (u, v), |u|,|v| >= 1, |u|+|v| <= depth of |F(u)F(v) - sum_{w in u sh v} F(w)|.

        With `relative`, each entry is divided by max(1, |F(u)F(v)| + sum |F(w)|),
        which makes the check independent of the size of the coefficients.
        """
        self._require_unital("shuffle_residual")
        L = len(self.alphabet)
        worst = 0.0
        for n in range(2, self.depth + 1):
            T = self.tensor(n)
            for p in range(1, n):
                q = n - p
                acc = None
                size = None
                for S in itertools.combinations(range(n), p):
                    comp = tuple(i for i in range(n) if i not in S)
                    part = np.transpose(T, S + comp)
                    acc = part if acc is None else acc + part
                    if relative:
                        size = np.abs(part) if size is None else size + np.abs(part)
                prod = np.multiply.outer(self.tensor(p), self.tensor(q))
                diff = (prod - acc).reshape(L ** n)
                if relative:
                    diff = np.abs(diff) / np.maximum(1.0, (np.abs(prod) + size).reshape(L ** n))
                worst = max(worst, _maxabs(diff))
        return worst

    def coproduct_residual(self):
        """Same condition as shuffle_residual, via Delta(A_v) = A_v x 1 + 1 x A_v.

        Builds the (truncated) tensor square Delta(F) word by word and
        compares with F x F on pairs of nonempty words.
        """
        self._require_unital("coproduct_residual")
        delta: dict = {}
        for w, c in self.items():
            n = len(w)
            if n < 2:
                continue
            for mask in range(1, 2 ** n - 1):
                u = tuple(w[i] for i in range(n) if mask >> i & 1)
                v = tuple(w[i] for i in range(n) if not mask >> i & 1)
                delta[u, v] = delta.get((u, v), 0) + c
        worst = 0.0
        for n in range(2, self.depth + 1):
            for p in range(1, n):
                for u in self.words(p):
                    fu = self[u]
                    for v in self.words(n - p):
                        r = abs(fu * self[v] - delta.get((u, v), 0))
                        worst = max(worst, float(r))
        return worst

    def is_grouplike(self, tol=1e-8) -> bool:
        return self.shuffle_residual() <= tol

    # -- letter substitutions -------------------------------------------------

    def apply_letter_map(self, M, check=True):
        """Substitute A_v -> sum_w M[w, v] A_w in every word (an algebra automorphism)."""
        M = np.asarray(M, dtype=object if self.exact else complex)
        L = len(self.alphabet)
        if M.shape != (L, L):
            raise SeriesError("letter map must be %dx%d" % (L, L))
        if check:
            check_invertible(M)
        out = [self.levels[0].copy()]
        for d in range(1, self.depth + 1):
            T = self.tensor(d)
            for ax in range(d):
                T = np.moveaxis(np.tensordot(M, T, axes=([1], [ax])), 0, ax)
            out.append(np.ascontiguousarray(T).reshape(L ** d))
        return self._like(out)

    def restrict(self, letters):
        """Series over a sub-alphabet keeping only words in those letters."""
        letters = tuple(letters)
        idx = [self._index[v] for v in letters]
        lv = [self.levels[0].copy()]
        for d in range(1, self.depth + 1):
            T = self.tensor(d)
            lv.append(T[np.ix_(*[idx] * d)].reshape(len(idx) ** d))
        return TruncSeries(letters, self.depth, lv, self.exact)

    def relabel(self, alphabet):
        return TruncSeries(alphabet, self.depth, [x.copy() for x in self.levels], self.exact)

    # -- comparison and conversion --------------------------------------------

    def distance(self, other) -> float:
        """Depth-wise scaled sup-distance.

        max_d  max_w |F(w) - G(w)| / max(1, max|F_d|, max|G_d|): absolute
        for coefficients of size <= 1, relative for larger ones.
        """
        self._check(other)
        worst = 0.0
        for a, b in zip(self.levels, other.levels):
            scale = max(1.0, _maxabs(a), _maxabs(b))
            worst = max(worst, _maxabs(a - b) / scale)
        return worst

    def max_abs(self) -> float:
        return max(_maxabs(x) for x in self.levels)

    def to_float(self):
        if not self.exact:
            return self
        return TruncSeries(self.alphabet, self.depth,
                           [np.array([complex(x) for x in a], dtype=complex) for a in self.levels])

    def to_json(self) -> dict:
        coeffs = {}
        for d in range(self.depth + 1):
            for w, c in zip(self.words(d), self.levels[d]):
                c = complex(c)
                coeffs[" ".join(str(v) for v in w)] = [c.real, c.imag]
        return {"alphabet": [str(v) for v in self.alphabet], "depth": self.depth,
                "coefficients": coeffs}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data, alphabet=None):
        """Inverse of to_json; `alphabet` optionally supplies the letter objects."""
        names = list(data["alphabet"])
        letters = tuple(alphabet) if alphabet is not None else tuple(names)
        if len(letters) != len(names):
            raise SeriesError("alphabet length mismatch")
        lookup = dict(zip(names, letters))
        depth = int(data["depth"])
        out = cls.zero(letters, depth)
        for key, (re, im) in data["coefficients"].items():
            w = tuple(lookup[s] for s in key.split()) if key else ()
            out.levels[len(w)][out._flat(w)] = complex(re, im)
        return out

    def __repr__(self):
        terms = []
        for w, c in itertools.islice(self.items(), 8):
            terms.append("%s*%s" % (c, "".join(str(v) for v in w) or "1"))
        more = " + ..." if sum(1 for _ in self.items()) > 8 else ""
        return "TruncSeries(%s%s)" % (" + ".join(terms) or "0", more)


def _maxabs(a) -> float:
    if a.size == 0:
        return 0.0
    if a.dtype == object:
        return float(max(abs(x) for x in a))
    return float(np.max(np.abs(a)))


def check_invertible(M) -> None:
    if M.dtype == object:
        from .linalg import rank
        if rank(M.tolist()) < M.shape[0]:
            raise SeriesError("singular letter map")
    else:
        # rank tests on large integer letter maps are too ill-conditioned
        sign, _ = np.linalg.slogdet(M)
        if sign == 0 or not np.all(np.isfinite(M)):
            raise SeriesError("singular letter map")


def compose_letter_maps(M1, M2):
    """Letter map of apply(M1) o apply(M2)."""
    return np.dot(M1, M2)
