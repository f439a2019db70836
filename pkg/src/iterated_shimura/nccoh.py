"""
Noncommutative 1-cocycles on PSL(2,Z) with values in a group N carrying a
left action by automorphisms.

A cocycle satisfies u(gh) = u(g) * g.u(h).  Since PSL(2,Z) = <sigma> * <tau>
is a free product of Z/2 and Z/3, a cocycle is the same thing as a pair
X = u(sigma), Y = u(tau) with

    X * sigma.X = 1,        Y * tau.Y * tau^2.Y = 1,

and u is recovered on a normal-form word by peeling tokens off the right.
Two cocycles are equivalent when u'(g) = n^-1 * u(g) * g.n for some n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import linalg
from .forms import pullback_matrix, symmetric_power_action
from .ncalg import TruncSeries, check_invertible
from .psl2z import (IDENTITY, SIGMA, SIGMA_TAU, TAU, TOKENS, Mat2, eval_word,
                    normal_form, parse_word)


class CocycleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# coefficient groups

class CoefficientGroup:
    """Interface: a group with a left PSL(2,Z)-action by automorphisms."""

    def one(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def act(self, g: Mat2, a):
        raise NotImplementedError

    def distance(self, a, b) -> float:
        raise NotImplementedError

    def sqrt(self, a):
        raise CocycleError("%s has no square roots" % type(self).__name__)

    def eq(self, a, b, tol=0.0) -> bool:
        return self.distance(a, b) <= tol

    def prod(self, *xs):
        out = self.one()
        for x in xs:
            out = self.mul(out, x)
        return out


class SeriesGroup(CoefficientGroup):
    """Unital truncated series with PSL(2,Z) acting through a letter map.

    `action(g)` returns the exact (integer or Fraction, object dtype)
    substitution matrix of g on the alphabet; it must be a representation,
    action(gh) = action(g) action(h).  Floating groups use it as complex.
    """

    def __init__(self, alphabet, depth, action: Callable[[Mat2], np.ndarray], exact=False):
        self.alphabet = tuple(alphabet)
        self.depth = depth
        self.exact = exact
        self.action = action
        self._cache: dict = {}

    def matrix(self, g: Mat2):
        if g not in self._cache:
            M = self.action(g)
            check_invertible(M)
            self._cache[g] = M if self.exact else np.asarray(M, dtype=float).astype(complex)
        return self._cache[g]

    def one(self):
        return TruncSeries.one(self.alphabet, self.depth, self.exact)

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def act(self, g, a):
        if g == IDENTITY:
            return a
        return a.apply_letter_map(self.matrix(g), check=False)

    def distance(self, a, b):
        return a.distance(b)

    def sqrt(self, a):
        return a.sqrt()

    def random_element(self, rng: random.Random, scale=1, grouplike=False):
        """Random unital series with small integer (exact) or Gaussian (float) coefficients."""
        z = TruncSeries.zero(self.alphabet, self.depth, self.exact)
        for d in range(1, self.depth + 1):
            if self.exact:
                z.levels[d][:] = [Fraction(rng.randint(-scale, scale)) for _ in range(z.levels[d].size)]
            else:
                z.levels[d][:] = [complex(rng.gauss(0, scale), rng.gauss(0, scale))
                                  for _ in range(z.levels[d].size)]
        if grouplike:
            # exponential of a Lie-like element: sum of random letters only
            for d in range(2, self.depth + 1):
                z.levels[d][:] = 0
            return z.exp()
        z.levels[0][0] = Fraction(1) if self.exact else 1.0
        return z


def form_group(omega, depth) -> SeriesGroup:
    """Coefficient group of the iterated integrals of an alphabet of form letters."""
    return SeriesGroup(omega.alphabet, depth, lambda g: pullback_matrix(g, omega.alphabet).T)


class PrecisionGroup(SeriesGroup):
    """A floating SeriesGroup recomputed with mpmath coefficients at `dps` digits.

    Letter maps of long words have norms far beyond 1/eps at depth 3, so
    double-precision evaluation of a cocycle extension on such words loses
    every digit even when its pair is accurate.  Lifting the pair to
    multiprecision keeps the algebra exact enough that the only error left
    is the one already present in X and Y.
    """

    def __init__(self, base: SeriesGroup, dps=50):
        super().__init__(base.alphabet, base.depth, base.action, exact=True)
        self.dps = dps

    def lift(self, F: TruncSeries) -> TruncSeries:
        with mpmath.workdps(self.dps):
            levels = [np.array([mpmath.mpc(x) for x in lv], dtype=object) for lv in F.levels]
        return TruncSeries(F.alphabet, F.depth, levels, exact=True)

    def lower(self, F: TruncSeries) -> TruncSeries:
        return F.to_float()

    def one(self):
        return self.lift(TruncSeries.one(self.alphabet, self.depth))

    def mul(self, a, b):
        with mpmath.workdps(self.dps):
            return a * b

    def inv(self, a):
        with mpmath.workdps(self.dps):
            return a.inverse()

    def act(self, g, a):
        with mpmath.workdps(self.dps):
            return super().act(g, a)

    def sqrt(self, a):
        with mpmath.workdps(self.dps):
            return a.sqrt()


def synthetic_group(k=4, depth=3) -> SeriesGroup:
    """Exact group: series over the letters e1..e(k-1) with the weight-k symmetric-power action."""
    def action(g):
        return np.vectorize(Fraction, otypes=[object])(symmetric_power_action(g, k))
    alphabet = tuple("e%d" % m for m in range(1, k))
    return SeriesGroup(alphabet, depth, action, exact=True)


# ---------------------------------------------------------------------------
# cocycles

def _as_element(g) -> tuple:
    """(matrix, normal-form word) for a Mat2, a word tuple or a word string."""
    if isinstance(g, Mat2):
        return g, normal_form(g)
    w = parse_word(g) if isinstance(g, str) else tuple(g)
    m = eval_word(w)
    return m, normal_form(m)


def relation_residuals(X, Y, N: CoefficientGroup) -> dict:
    one = N.one()
    rx = N.distance(N.mul(X, N.act(SIGMA, X)), one)
    tY = N.act(TAU, Y)
    rY = N.distance(N.prod(Y, tY, N.act(TAU * TAU, Y)), one)
    return {"sigma": rx, "tau": rY}


def _relation_projection(F, g: Mat2, order: int, N: SeriesGroup):
    """Correct F depth by depth so that F * g.F * ... * g^(order-1).F = 1.

    If the product Z equals 1 below depth d, its depth-d part is fixed by g
    (g.Z is conjugate to Z), so subtracting Z_d/order from F_d kills it
    without touching lower depths.
    """
    c = Fraction(1, order) if N.exact else 1.0 / order
    F = F.copy()
    powers = [IDENTITY]
    for _ in range(order - 1):
        powers.append(powers[-1] * g)
    for d in range(1, N.depth + 1):
        Z = N.prod(*[N.act(p, F) for p in powers])
        F.levels[d] = F.levels[d] - Z.levels[d] * c
    return F


def enforce_relations(X, Y, N: SeriesGroup):
    """Nearest pair (in the graded sense) satisfying both relations exactly."""
    return _relation_projection(X, SIGMA, 2, N), _relation_projection(Y, TAU, 3, N)


class Cocycle:
    """The cocycle determined by its values X at sigma and Y at tau.

    Evaluation peels the normal-form word of g one token at a time:
    u(w t) = u(w) * w.u(t).  Values are cached per word; an instance is not
    meant to be shared between threads.
    """

    def __init__(self, X, Y, group: CoefficientGroup, tol=None):
        self.X = X
        self.Y = Y
        self.group = group
        self.residuals = relation_residuals(X, Y, group)
        if tol is not None and max(self.residuals.values()) > tol:
            raise CocycleError("Shimura-Eichler relations violated: %s" % self.residuals)
        N = group
        self._token = {"s": X, "t": Y, "tt": N.mul(Y, N.act(TAU, Y))}
        self._cache = {(): N.one()}

    def lifted(self, dps=40, enforce=True) -> "Cocycle":
        """The same pair evaluated in multiprecision arithmetic.

        With `enforce`, the lifted pair is first projected onto the exact
        solutions of the relations (see enforce_relations); the size of that
        projection is stored in `projection`.
        """
        N = PrecisionGroup(self.group, dps)
        with mpmath.workdps(dps):
            X, Y = N.lift(self.X), N.lift(self.Y)
            if enforce:
                X2, Y2 = enforce_relations(X, Y, N)
                proj = max(N.distance(X, X2), N.distance(Y, Y2))
                X, Y = X2, Y2
            else:
                proj = 0.0
            u = Cocycle(X, Y, N)
        u.projection = proj
        return u

    def word_value(self, w: tuple):
        if w in self._cache:
            return self._cache[w]
        prefix = w[:-1]
        N = self.group
        val = N.mul(self.word_value(prefix), N.act(eval_word(prefix), self._token[w[-1]]))
        self._cache[w] = val
        return val

    def __call__(self, g):
        _, w = _as_element(g)
        return self.word_value(w)


def cocycle_from_pair(X, Y, group: CoefficientGroup, tol=1e-6) -> Cocycle:
    """Cocycle with u(sigma) = X, u(tau) = Y; rejects pairs violating the relations beyond tol."""
    return Cocycle(X, Y, group, tol=tol)


def trivial_cocycle(group: CoefficientGroup) -> Cocycle:
    return Cocycle(group.one(), group.one(), group, tol=0.0)


def verify_cocycle(u, pairs, group: CoefficientGroup = None) -> float:
    """max over (g, h) of the distance between u(gh) and u(g) * g.u(h)."""
    N = group or u.group
    worst = 0.0
    for g, h in pairs:
        mg, _ = _as_element(g)
        mh, _ = _as_element(h)
        lhs = u(mg * mh)
        rhs = N.mul(u(mg), N.act(mg, u(mh)))
        worst = max(worst, N.distance(lhs, rhs))
    return worst


def equivalent(u, u2, n, elements, group: CoefficientGroup = None) -> float:
    """max over g of the distance between u2(g) and n^-1 * u(g) * g.n."""
    N = group or u.group
    ninv = N.inv(n)
    worst = 0.0
    for g in elements:
        m, _ = _as_element(g)
        rhs = N.prod(ninv, u(m), N.act(m, n))
        worst = max(worst, N.distance(u2(m), rhs))
    return worst


def change_pair(X, Y, n, group: CoefficientGroup):
    """The equivalent pair (n^-1 X sigma.n, n^-1 Y tau.n)."""
    N = group
    ninv = N.inv(n)
    return N.prod(ninv, X, N.act(SIGMA, n)), N.prod(ninv, Y, N.act(TAU, n))


def coboundary_pair(n, group: CoefficientGroup):
    """(X, Y) of the cocycle g -> n^-1 * g.n."""
    return change_pair(group.one(), group.one(), n, group)


def normalize_sigma(u: Cocycle):
    """Equivalent cocycle with value 1 at sigma, and the witness n = X^(1/2)."""
    N = u.group
    n = N.sqrt(u.X)
    X2, Y2 = change_pair(u.X, u.Y, n, N)
    return Cocycle(X2, Y2, N), n


def random_words(rng: random.Random, count: int, max_length=6):
    """Random normal-form words of length <= max_length, as token tuples."""
    out = []
    while len(out) < count:
        n = rng.randint(0, max_length)
        w = []
        length = 0
        while True:
            if w and w[-1] == "s":
                tok = rng.choice(("t", "tt"))
            elif w:
                tok = "s"
            else:
                tok = rng.choice(("s", "t", "tt"))
            step = 2 if tok == "tt" else 1
            if length + step > n:
                break
            w.append(tok)
            length += step
        out.append(tuple(w))
    return out


def random_pairs(rng: random.Random, count: int, max_length=6):
    words = random_words(rng, 2 * count, max_length)
    return list(zip(words[::2], words[1::2]))


# ---------------------------------------------------------------------------
# cuspidality

@dataclass
class CuspidalReport:
    cuspidal: bool
    depth_reached: int
    residuals: list
    witness: TruncSeries = None
    obstruction_depth: int = None
    witness_residual: float = None

    def as_dict(self):
        out = {"cuspidal": self.cuspidal, "depth_reached": self.depth_reached,
               "residuals": self.residuals, "obstruction_depth": self.obstruction_depth,
               "witness_residual": self.witness_residual}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _kron_power(M, d):
    out = np.ones((1, 1), dtype=M.dtype)
    if M.dtype == object:
        out[0, 0] = Fraction(1)
    for _ in range(d):
        out = np.kron(out, M)
    return out


def is_cuspidal(u: Cocycle, depth=None, tol=1e-6) -> CuspidalReport:
    """Search for n with u(sigma tau) = n^-1 * (sigma tau).n, one depth at a time.

    With W = u(sigma tau) and T the letter map of sigma tau, the depth-d
    part of n W = T.n reads

        (T^(x d) - 1) n_d = W_d + sum_{0<i<d} n_i (x) W_(d-i),

    a linear system in n_d.  Exact groups solve it over Q; floating groups
    use least squares and call the system consistent when the residual,
    scaled by max(1, |rhs|), is below tol.  Any solution of the truncated
    problem extends, because two solutions differ by a T-invariant.
    """
    N = u.group
    if not isinstance(N, SeriesGroup):
        raise CocycleError("is_cuspidal needs a graded series coefficient group")
    depth = N.depth if depth is None else depth
    W = u(SIGMA_TAU)
    M = N.matrix(SIGMA_TAU)
    n = N.one()
    residuals = []
    for d in range(1, depth + 1):
        rhs = W.levels[d].copy()
        for i in range(1, d):
            rhs = rhs + np.multiply.outer(n.levels[i], W.levels[d - i]).ravel()
        A = _kron_power(M, d)
        size = A.shape[0]
        if N.exact:
            for j in range(size):
                A[j, j] -= 1
            x = linalg.solve(A.tolist(), list(rhs))
            if x is None:
                residuals.append(None)
                return CuspidalReport(False, d - 1, residuals, obstruction_depth=d)
            residuals.append(0.0)
            n.levels[d][:] = x
        else:
            A = A - np.eye(size)
            x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            scale = max(1.0, float(np.max(np.abs(rhs))))
            res = float(np.max(np.abs(A @ x - rhs))) / scale
            residuals.append(res)
            if res > tol:
                return CuspidalReport(False, d - 1, residuals, obstruction_depth=d)
            n.levels[d][:] = x
    check = N.distance(N.mul(n, W), N.act(SIGMA_TAU, n))
    return CuspidalReport(True, depth, residuals, witness=n, witness_residual=check)


# ---------------------------------------------------------------------------
# exact synthetic pairs

def _odd_part(z: TruncSeries, N: SeriesGroup):
    """(z - sigma.z)/2, which sigma negates."""
    return (z - N.act(SIGMA, z)).scale(Fraction(1, 2) if N.exact else 0.5)


def synthetic_pair(N: SeriesGroup, rng: random.Random, scale=2):
    """A cocycle pair that is not a coboundary in general.

    X = exp(x) with sigma.x = -x, so X * sigma.X = exp(x) exp(-x) = 1;
    Y = m^-1 * tau.m for a random m.  Both relations hold exactly.
    """
    z = N.random_element(rng, scale).augmentation()
    X = _odd_part(z, N).exp()
    m = N.random_element(rng, scale)
    Y = N.prod(N.inv(m), N.act(TAU, m))
    return X, Y


def noncuspidal_pair(N: SeriesGroup):
    """Exact pair (exp(x), 1) whose class is not cuspidal already at depth 1.

    x runs over sigma-odd letter combinations; the first one whose image
    misses the image of (sigma tau - 1) on the letters is returned.
    """
    if not N.exact:
        raise CocycleError("noncuspidal_pair needs an exact group")
    L = len(N.alphabet)
    M = N.matrix(SIGMA_TAU)
    A = [[M[i, j] - (1 if i == j else 0) for j in range(L)] for i in range(L)]
    image = linalg.Subspace(linalg.transpose(A), L)
    for v in N.alphabet:
        x = _odd_part(TruncSeries.letter(N.alphabet, N.depth, v, exact=True), N)
        if not image.contains(list(x.levels[1])):
            return x.exp(), N.one()
    raise CocycleError("every sigma-odd letter combination is cuspidal at depth 1")


# ---------------------------------------------------------------------------
# Shapiro induction

class CosetSystem:
    """Right coset representatives h_1 = 1, ..., h_r of a subgroup G in PSL(2,Z).

    `member(g)` decides g in G.  Completeness is validated by checking that
    the representatives lie in distinct cosets and that right
    multiplication by sigma and tau permutes the cosets.
    """

    def __init__(self, reps: Sequence[Mat2], member: Callable[[Mat2], bool]):
        self.reps = tuple(reps)
        self.member = member
        if not self.reps or self.reps[0] != IDENTITY:
            raise CocycleError("the first coset representative must be the identity")
        for i, hi in enumerate(self.reps):
            for hj in self.reps[:i]:
                if member(hi * hj.inv()):
                    raise CocycleError("representatives %r and %r share a coset" % (hj, hi))
        for h in self.reps:
            for s in (SIGMA, TAU):
                self.locate(h * s)

    @property
    def index(self) -> int:
        return len(self.reps)

    def locate(self, g: Mat2):
        """(kappa, j) with g = kappa * h_j and kappa in G."""
        for j, h in enumerate(self.reps):
            kappa = g * h.inv()
            if self.member(kappa):
                return kappa, j
        raise CocycleError("coset system incomplete: %r lies in no listed coset" % (g,))


def gamma2_member(g: Mat2) -> bool:
    """Membership in the image of the principal congruence subgroup of level 2."""
    a, b, c, d = g.tuple()
    return b % 2 == 0 and c % 2 == 0


def gamma2_cosets() -> CosetSystem:
    reps = [IDENTITY, SIGMA, TAU, TAU * TAU, SIGMA * TAU, TAU * SIGMA]
    return CosetSystem(reps, gamma2_member)


class InducedGroup(CoefficientGroup):
    """The induced module: G-covariant maps phi on PSL(2,Z), phi(g h) = g.phi(h).

    An element is the tuple (phi(h_1), ..., phi(h_r)).  The group law is
    pointwise and PSL(2,Z) acts by (x.phi)(h) = phi(h x).
    """

    def __init__(self, base: CoefficientGroup, cosets: CosetSystem):
        self.base = base
        self.cosets = cosets

    def one(self):
        return tuple(self.base.one() for _ in self.cosets.reps)

    def mul(self, a, b):
        return tuple(self.base.mul(x, y) for x, y in zip(a, b))

    def inv(self, a):
        return tuple(self.base.inv(x) for x in a)

    def value(self, phi, h: Mat2):
        """phi(h) for an arbitrary h, by covariance from the representatives."""
        kappa, j = self.cosets.locate(h)
        return self.base.act(kappa, phi[j])

    def act(self, x, phi):
        return tuple(self.value(phi, h * x) for h in self.cosets.reps)

    def distance(self, a, b):
        return max(self.base.distance(x, y) for x, y in zip(a, b))


class InducedCocycle:
    """u~(x)(h_j) = u(kappa), where h_j x = kappa h_r with kappa in G.

    `u` is any callable cocycle on the subgroup G with values in the base group.
    """

    def __init__(self, u, cosets: CosetSystem, base: CoefficientGroup):
        self.u = u
        self.cosets = cosets
        self.group = InducedGroup(base, cosets)

    def __call__(self, x):
        m, _ = _as_element(x)
        return tuple(self.u(self.cosets.locate(h * m)[0]) for h in self.cosets.reps)

    def pair(self):
        return self(SIGMA), self(TAU)


def shapiro_induce(u, cosets: CosetSystem, base: CoefficientGroup) -> InducedCocycle:
    return InducedCocycle(u, cosets, base)


def project(phi):
    """phi -> phi(1), the value at the first representative."""
    return phi[0]


def projection_residual(ind: InducedCocycle, elements) -> float:
    """max over g in G of the distance between project(u~(g)) and u(g)."""
    N = ind.group.base
    worst = 0.0
    for g in elements:
        m, _ = _as_element(g)
        if not ind.cosets.member(m):
            raise CocycleError("%r is not in the subgroup" % (m,))
        worst = max(worst, N.distance(project(ind(m)), ind.u(m)))
    return worst


def subgroup_elements(cosets: CosetSystem, words):
    """Elements kappa(w) of the subgroup obtained from arbitrary words."""
    return [cosets.locate(eval_word(w))[0] for w in words]
