"""
The iterated Shimura cocycle  u_a(g) = J_{ga}^a(Omega)  on PSL(2,Z).

Its pair is X = J_{sigma a}^a, Y = J_{tau a}^a.  The base points i and rho
are fixed by sigma and tau, which makes X = 1 (resp. Y = 1) exactly.
Changing the base point from a to b is the equivalence with witness
n = J_b^a:  u_b(g) = n^-1 * u_a(g) * g.n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import nccoh, psl2z
from .forms import OmegaForm
from .integrate import DEFAULT, Chord, Integrator, QuadConfig
from .ncalg import TruncSeries
from .psl2z import INF, SIGMA, TAU, Cusp, Mat2

RHO = complex(0.5, np.sqrt(3) / 2)

BASE_POINTS = {"i": 1j, "rho": RHO, "oo": INF, "inf": INF}


def base_point(name):
    if isinstance(name, str) and name.strip().lower() in BASE_POINTS:
        return BASE_POINTS[name.strip().lower()]
    return psl2z.as_point(name)


def _image(g: Mat2, a):
    """g.a, snapping to a exactly for the fixed points used as base points."""
    b = psl2z.mobius(g, a)
    if not isinstance(a, Cusp) and abs(complex(b) - complex(a)) < 1e-14:
        return a
    return b


@dataclass
class ShimuraCocycle:
    base: object
    integrator: Integrator
    cocycle: nccoh.Cocycle

    @property
    def group(self) -> nccoh.SeriesGroup:
        return self.cocycle.group

    @property
    def X(self):
        return self.cocycle.X

    @property
    def Y(self):
        return self.cocycle.Y

    def direct(self, g) -> TruncSeries:
        """u(g) by transporting from g.a to a along the canonical path."""
        m, _ = nccoh._as_element(g)
        return self.integrator(_image(m, self.base), self.base)

    def __call__(self, g):
        return self.cocycle(g)

    def relation_residuals(self) -> dict:
        return dict(self.cocycle.residuals)

    def extension_residual(self, words) -> float:
        """Extension from (X, Y) against direct transports."""
        return max(self.cocycle(w).distance(self.direct(w)) for w in words)


def build(a, omega: OmegaForm, depth: int, cfg: QuadConfig = DEFAULT,
          integrator: Integrator = None) -> ShimuraCocycle:
    a = base_point(a)
    if not omega.is_closed():
        raise ValueError("alphabet is not closed under the letter action")
    I = integrator or Integrator(omega, depth, cfg)
    X = I(_image(SIGMA, a), a)
    Y = I(_image(TAU, a), a)
    u = nccoh.Cocycle(X, Y, nccoh.form_group(omega, depth))
    return ShimuraCocycle(a, I, u)


def base_point_independence(a, b, omega: OmegaForm, depth: int, words,
                            cfg: QuadConfig = DEFAULT, integrator: Integrator = None) -> float:
    """Equivalence residual between the cocycles at a and b with witness J_b^a."""
    I = integrator or Integrator(omega, depth, cfg)
    ua = build(a, omega, depth, integrator=I)
    ub = build(b, omega, depth, integrator=I)
    n = I(ub.base, ua.base)
    return nccoh.equivalent(ua.cocycle, ub.cocycle, n, words)


def rho_sigma_identity(omega: OmegaForm, depth: int, cfg: QuadConfig = DEFAULT,
                       integrator: Integrator = None) -> float:
    """J_{sigma rho}^rho  against  J_i^rho * sigma.(J_i^rho)^-1.

    The left side is integrated along the horizontal chord from sigma.rho
    to rho, the right side along the unit circle from i to rho.
    """
    I = integrator or Integrator(omega, depth, cfg)
    srho = complex(psl2z.mobius(SIGMA, RHO))
    lhs = I.along([Chord(srho, RHO)])
    J = I(1j, RHO)
    rhs = J * I.push(SIGMA, J).inverse()
    return lhs.distance(rhs)


@dataclass
class CFDecomposition:
    cusp: Cusp
    orientation: str
    matrices: tuple
    product: TruncSeries
    direct: TruncSeries
    residual: float
    depth1_residual: float
    calibration: dict = field(default_factory=dict)

    def as_dict(self):
        return {"cusp": repr(self.cusp), "orientation": self.orientation,
                "matrices": [g.tuple() for g in self.matrices],
                "residual": self.residual, "depth1_residual": self.depth1_residual,
                "calibration": self.calibration}


def _cf_product(I: Integrator, mats, P):
    out = I.one()
    for g in mats:  # g_0 first, so g_n ends up left-most
        out = I.push(g, P) * out
    return out


def _depth1_gap(F: TruncSeries, G: TruncSeries) -> float:
    return float(np.max(np.abs(F.levels[1] - G.levels[1])))


def cf_decomposition(a, omega: OmegaForm, depth: int, cfg: QuadConfig = DEFAULT,
                     integrator: Integrator = None) -> CFDecomposition:
    """J_{i oo}^a as the ordered product of g_k.P over the convergent matrices of a.

    P is the primitive transport between the cusps 0 and i oo.  Its
    orientation is not fixed a priori: both are tried on the depth-1
    layer and the one matching the direct transport is kept.  The direct
    transport uses the vertical-path cusp method, so it shares no
    quadrature with the product.
    """
    a = psl2z.as_point(a)
    I = integrator or Integrator(omega, depth, cfg)
    direct = Integrator(omega, depth, QuadConfig(**{**I.cfg.as_dict(), "cusp_method": "direct"}))
    D = direct(INF, a)
    mats = psl2z.convergents(a.fraction()).matrices
    options = {"0->oo": I(Cusp(0, 1), INF), "oo->0": I(INF, Cusp(0, 1))}
    calib = {k: _depth1_gap(_cf_product(I, mats, P), D) for k, P in options.items()}
    best = min(calib, key=calib.get)
    prod = _cf_product(I, mats, options[best])
    return CFDecomposition(a, best, mats, prod, D, prod.distance(D), calib[best], calib)


def cuspidality(sc: ShimuraCocycle, tol=1e-6) -> nccoh.CuspidalReport:
    return nccoh.is_cuspidal(sc.cocycle, tol=tol)


def tau_fixed_residual(n: TruncSeries, group: nccoh.SeriesGroup) -> float:
    """How far n is from being tau-invariant."""
    return group.distance(group.act(TAU, n), n)


def sample_words(seed: int, count: int, max_length=6):
    return nccoh.random_words(random.Random(seed), count, max_length)


def sample_pairs(seed: int, count: int, max_length=6):
    return nccoh.random_pairs(random.Random(seed), count, max_length)
