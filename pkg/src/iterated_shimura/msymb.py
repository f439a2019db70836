"""
Level-one modular symbols of weight k with rational coefficients.

W = homogeneous polynomials of degree w = k-2 in X, Y, stored as the
coefficient vector p[i] of X^i Y^(w-i).  PSL(2,Z) acts on the left by

    (g P)(X, Y) = P(dX - bY, -cX + aY),

which is P o g^-1 on column vectors and makes the period pairing
P x {a, b} -> int_b^a f(z) P(z, 1) dz invariant.

Every symbol P x {a, b} is a sum of translates of the generators
x_P = P x {0, oo} (continued fractions), and the relations among those are
x_P + x_(sigma P) = 0 and x_P + x_(tau P) + x_(tau^2 P) = 0.  So

    MS_k = W / ((1 + sigma) W + (1 + tau + tau^2) W).

Level one has a single cusp class with stabilizer <sigma tau>, so the
boundary space is the coinvariant line W / (T - 1) W, T = sigma tau, and the
boundary of x_P is the class of sigma^-1 P - P.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import linalg, psl2z
from .forms import CuspForm, OmegaForm, letters
from .integrate import DEFAULT, Integrator, QuadConfig
from .psl2z import INF, SIGMA, SIGMA_TAU, TAU, Cusp, Mat2


class SymbolError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomials

def _poly_pow(lin, e):
    """(uX + vY)^e as a coefficient list in X^i Y^(e-i)."""
    u, v = lin
    return [comb(e, i) * u ** i * v ** (e - i) for i in range(e + 1)]


def gamma_poly_action(g: Mat2, P):
    """(gP)(X, Y) = P(dX - bY, -cX + aY), exact."""
    a, b, c, d = g.tuple()
    w = len(P) - 1
    out = [Fraction(0)] * (w + 1)
    for i, p in enumerate(P):
        if p == 0:
            continue
        xs = _poly_pow((d, -b), i)          # (dX - bY)^i
        ys = _poly_pow((-c, a), w - i)      # (-cX + aY)^(w-i)
        for j, x in enumerate(xs):
            if x:
                for l, y in enumerate(ys):
                    if y:
                        out[j + l] += p * x * y
    return out


def action_matrix(g: Mat2, w: int):
    """Column i is g applied to X^i Y^(w-i)."""
    cols = []
    for i in range(w + 1):
        e = [Fraction(0)] * (w + 1)
        e[i] = Fraction(1)
        cols.append(gamma_poly_action(g, e))
    return linalg.transpose(cols)


def _matvec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def monomial(i, w):
    e = [Fraction(0)] * (w + 1)
    e[i] = Fraction(1)
    return e


# ---------------------------------------------------------------------------
# symbols

@dataclass(frozen=True)
class Term:
    coeff: Fraction
    P: tuple
    alpha: Cusp
    beta: Cusp


class ModularSymbol:
    """Formal rational combination of terms P x {alpha, beta}."""

    def __init__(self, weight: int, terms=()):
        self.weight = weight
        self.terms = []
        for c, P, a, b in terms:
            self.add(c, P, a, b)

    def add(self, c, P, alpha, beta):
        P = tuple(Fraction(x) for x in P)
        if len(P) != self.weight - 1:
            raise SymbolError("polynomial of degree %d expected" % (self.weight - 2))
        self.terms.append(Term(Fraction(c), P, psl2z.as_point(alpha), psl2z.as_point(beta)))
        return self

    @classmethod
    def single(cls, P, alpha, beta):
        return cls(len(P) + 1, [(1, P, alpha, beta)])

    def translate(self, g: Mat2) -> "ModularSymbol":
        out = ModularSymbol(self.weight)
        for t in self.terms:
            out.add(t.coeff, gamma_poly_action(g, list(t.P)),
                    psl2z.mobius(g, t.alpha), psl2z.mobius(g, t.beta))
        return out

    def __add__(self, other):
        out = ModularSymbol(self.weight)
        out.terms = self.terms + other.terms
        return out


class SymbolSpace:
    """The presentation of MS_k on generators x_P, plus its boundary map."""

    def __init__(self, k: int):
        if k < 4 or k % 2:
            raise SymbolError("weight must be even and >= 4")
        self.k = k
        self.w = k - 2
        n = self.w + 1
        self.dim_W = n
        S = action_matrix(SIGMA, self.w)
        T = action_matrix(TAU, self.w)
        T2 = action_matrix(TAU * TAU, self.w)
        I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        one_sigma = [[I[i][j] + S[i][j] for j in range(n)] for i in range(n)]
        one_tau = [[I[i][j] + T[i][j] + T2[i][j] for j in range(n)] for i in range(n)]
        # relation vectors are the images of the monomials
        self.relations = linalg.transpose(one_sigma) + linalg.transpose(one_tau)
        self.quotient = linalg.Subspace(self.relations, n)
        Tr = action_matrix(SIGMA_TAU, self.w)
        self.translation_image = linalg.transpose([[Tr[i][j] - I[i][j] for j in range(n)] for i in range(n)])
        self.boundary_quotient = linalg.Subspace(self.translation_image, n)
        self._sigma_inv = action_matrix(SIGMA.inv(), self.w)
        # boundary of x_P as a matrix W -> B (rows indexed by the boundary coordinates)
        cols = [self._boundary_generator(monomial(i, self.w)) for i in range(n)]
        self.boundary_matrix = linalg.transpose(cols)
        qb = self.quotient_basis()
        rows = linalg.transpose([self._boundary_generator(v) for v in qb])
        self._cusp_kernel = linalg.nullspace(rows, len(qb)) if qb else []

    # -- dimensions ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.dim_W - self.quotient.rank

    @property
    def boundary_dim(self) -> int:
        return self.dim_W - self.boundary_quotient.rank

    @property
    def cusp_dim(self) -> int:
        return len(self._cusp_kernel)

    @property
    def boundary_rank(self) -> int:
        return self.dim - self.cusp_dim

    def quotient_basis(self):
        """Lifts to W of a basis of MS_k (monomials at the non-pivot positions)."""
        return [monomial(i, self.w) for i in self.quotient.complement_positions()]

    def cusp_basis(self):
        """Lifts to W of a basis of the cuspidal subspace."""
        qb = self.quotient_basis()
        out = []
        for c in self._cusp_kernel:
            v = [Fraction(0)] * self.dim_W
            for coef, b in zip(c, qb):
                v = [x + coef * y for x, y in zip(v, b)]
            out.append(v)
        return out

    # -- reduction ----------------------------------------------------------

    def coordinates(self, P):
        """Coordinates of the class of x_P in the quotient basis."""
        return self.quotient.coordinates(P)

    def is_zero(self, P) -> bool:
        return self.quotient.contains(P)

    def _infinity_to(self, P, a: Cusp):
        """Q in W with x_Q = P x {oo, a}, along the convergent chain of a."""
        if a.is_infinity:
            return [Fraction(0)] * self.dim_W
        out = [Fraction(0)] * self.dim_W
        for g in psl2z.convergents(a.fraction()).matrices:
            # P x {g 0, g oo} = g (g^-1 P x {0, oo})
            out = [x + y for x, y in zip(out, gamma_poly_action(g.inv(), P))]
        return out

    def lift(self, P, alpha, beta, pivot="oo"):
        """Q in W with x_Q equivalent to P x {alpha, beta}.

        pivot "oo" splits {alpha, beta} = {oo, beta} - {oo, alpha}; pivot
        "0" splits through 0 and moves each half to oo with sigma.
        """
        P = [Fraction(x) for x in P]
        alpha, beta = psl2z.as_point(alpha), psl2z.as_point(beta)
        if pivot == "oo":
            A = self._infinity_to(P, beta)
            B = self._infinity_to(P, alpha)
            return [x - y for x, y in zip(A, B)]
        if pivot == "0":
            # P x {0, a} = sigma (sigma^-1 P x {oo, sigma^-1 a})
            Q = gamma_poly_action(SIGMA.inv(), P)
            A = self._infinity_to(Q, psl2z.mobius(SIGMA.inv(), beta))
            B = self._infinity_to(Q, psl2z.mobius(SIGMA.inv(), alpha))
            return [x - y for x, y in zip(A, B)]
        raise SymbolError("unknown pivot %r" % (pivot,))

    def lift_symbol(self, sym: ModularSymbol, pivot="oo"):
        out = [Fraction(0)] * self.dim_W
        for t in sym.terms:
            q = self.lift(list(t.P), t.alpha, t.beta, pivot)
            out = [x + t.coeff * y for x, y in zip(out, q)]
        return out

    def reduce_symbol(self, P, alpha, beta, pivot="oo"):
        return self.coordinates(self.lift(P, alpha, beta, pivot))

    # -- boundary -----------------------------------------------------------

    def _boundary_point(self, P, a: Cusp):
        """Class of P x {a} in B: P x {g oo} = g (g^-1 P x {oo})."""
        g = psl2z.cusp_to_infinity(a)
        return self.boundary_quotient.coordinates(gamma_poly_action(g.inv(), P))

    def _boundary_generator(self, P):
        return self.boundary_quotient.coordinates(
            [x - y for x, y in zip(_matvec(self._sigma_inv, P), P)])

    def boundary(self, sym: ModularSymbol):
        """delta(P x {a, b}) = P x {a} - P x {b}, computed term by term."""
        out = [Fraction(0)] * self.boundary_dim
        for t in sym.terms:
            A = self._boundary_point(list(t.P), t.alpha)
            B = self._boundary_point(list(t.P), t.beta)
            out = [o + t.coeff * (x - y) for o, x, y in zip(out, A, B)]
        return out

    def boundary_of_lift(self, Q):
        return self._boundary_generator(Q)

    def to_json(self) -> dict:
        f = lambda rows: [[str(x) for x in r] for r in rows]
        return {"weight": self.k, "dim": self.dim, "cusp_dim": self.cusp_dim,
                "boundary_dim": self.boundary_dim,
                "quotient_basis": f(self.quotient_basis()), "cusp_basis": f(self.cusp_basis()),
                "relations": f(self.relations)}


def build_space(k: int) -> SymbolSpace:
    return SymbolSpace(k)


def dimension_table(weights):
    return [(k, build_space(k).dim, build_space(k).cusp_dim) for k in weights]


# ---------------------------------------------------------------------------
# pairing with cusp forms

class Pairing:
    """int_b^a f(z) P(z, 1) dz for symbols P x {a, b}, via depth-1 transports."""

    def __init__(self, f: CuspForm, cfg: QuadConfig = DEFAULT):
        self.f = f
        self.alphabet = letters(f)
        self.integrator = Integrator(OmegaForm(self.alphabet), 1, cfg)

    def periods(self, alpha, beta):
        """Vector of int_beta^alpha f z^(m-1) dz, m = 1..k-1."""
        J = self.integrator(psl2z.as_point(beta), psl2z.as_point(alpha))
        return np.array(J.levels[1])

    def __call__(self, P, alpha=Cusp(0, 1), beta=INF) -> complex:
        return complex(np.dot(np.array([float(x) for x in P]), self.periods(alpha, beta)))

    def symbol(self, sym: ModularSymbol) -> complex:
        return sum(float(t.coeff) * self(list(t.P), t.alpha, t.beta) for t in sym.terms)


def pairing(sym: ModularSymbol, f: CuspForm, cfg: QuadConfig = DEFAULT) -> complex:
    if sym.weight != f.weight:
        raise SymbolError("weight mismatch")
    return Pairing(f, cfg).symbol(sym)


def pairing_matrix(space: SymbolSpace, f: CuspForm, cfg: QuadConfig = DEFAULT) -> np.ndarray:
    """Real matrix with rows (Re, Im) of the pairing of f with each cuspidal basis symbol."""
    pr = Pairing(f, cfg)
    vals = [pr(Q) for Q in space.cusp_basis()]
    return np.array([[v.real, v.imag] for v in vals])


def relation_pairings(space: SymbolSpace, f: CuspForm, cfg: QuadConfig = DEFAULT) -> float:
    """max |pairing| over the relation vectors x_P + x_(sigma P), x_P + x_(tau P) + x_(tau^2 P)."""
    pr = Pairing(f, cfg)
    per = pr.periods(Cusp(0, 1), INF)
    return max(abs(np.dot(np.array([float(x) for x in r]), per)) for r in space.relations)


def dumps_space(space: SymbolSpace) -> str:
    return json.dumps(space.to_json(), indent=1)
