"""
Iterated integrals  J_a^b(Omega) = 1 + int_a^b Omega(z1) int_a^z1 Omega(z2) ...

Conventions: the coefficient of A_v1 ... A_vn is the integral with z1 (the
variable nearest the end point b) carrying letter v1, so the left-most
letter is the outermost integral.  Then dJ_a^z = Omega(z) J_a^z and

    J_a^c = J_b^c * J_a^b,        gamma_*( J_a^b ) = J_{gamma a}^{gamma b}.

Each path segment is cut into pieces of bounded hyperbolic length; on a
piece the iterated integrals are computed by spectral (Gauss-Legendre
collocation) integration, and pieces are glued with the concatenation rule.
Unbounded pieces towards i*oo are cut at a height y_top where the integrand
is below double precision; other cusps are reached through a group element
moving them to i*oo (or, optionally, by direct quadrature).
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from . import psl2z
from .forms import OmegaForm, letter_action
from .ncalg import TruncSeries
from .psl2z import Cusp, INF, Mat2


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class QuadConfig:
    nodes: int = 20            # Gauss-Legendre nodes per piece
    h_max: float = 0.25        # max hyperbolic length of a piece
    ray_step: float = 0.5      # max Euclidean length of a piece on a ray to i*oo
    y_cut: float = 1.0         # height where rays to cusps are joined
    y_top: float = 16.0        # truncation height of rays to i*oo
    cusp_method: str = "equivariant"   # or "direct" for finite cusps
    y_min: float = 1e-4        # lowest height a finite segment may reach

    def refined(self):
        return QuadConfig(self.nodes, self.h_max / 2, self.ray_step / 2, self.y_cut,
                          self.y_top, self.cusp_method, self.y_min)

    def as_dict(self):
        return asdict(self)


DEFAULT = QuadConfig()


@lru_cache(maxsize=16)
def gauss_rule(n: int):
    """Nodes, weights and the spectral integration matrix on [-1, 1].

    S[i, j] = int_{-1}^{x_i} l_j(t) dt  for the Lagrange basis l_j on the nodes.
    """
    x, w = legendre.leggauss(n)
    V = legendre.legvander(x, n - 1)
    Vint = np.empty((n, n))
    for k in range(n):
        c = np.zeros(n)
        c[k] = 1.0
        Vint[:, k] = legendre.legval(x, legendre.legint(c, lbnd=-1))
    S = Vint @ np.linalg.inv(V)
    return x, w, S


# ---------------------------------------------------------------------------
# segments

class Segment:
    """A smooth arc s -> z(s), s in [s0, s1], oriented from s0 to s1."""

    kind = "segment"

    def __init__(self, s0, s1):
        self.s0, self.s1 = float(s0), float(s1)

    def z(self, s):
        raise NotImplementedError

    def dz(self, s):
        raise NotImplementedError

    def breakpoints(self, cfg: QuadConfig):
        raise NotImplementedError

    @property
    def start(self):
        return complex(self.z(np.array([self.s0]))[0])

    @property
    def end(self):
        return complex(self.z(np.array([self.s1]))[0])

    def describe(self):
        return {"kind": self.kind, "start": [self.start.real, self.start.imag],
                "end": [self.end.real, self.end.imag]}


def _uniform(s0, s1, step):
    n = max(1, int(np.ceil(abs(s1 - s0) / step - 1e-12)))
    return np.linspace(s0, s1, n + 1)


class Geodesic(Segment):
    """Hyperbolic geodesic between two interior points, parametrised by arclength."""

    kind = "geodesic"

    def __init__(self, z1, z2):
        z1, z2 = complex(z1), complex(z2)
        if z1.imag <= 0 or z2.imag <= 0:
            raise PathError("geodesic end points must lie in H")
        self.z1, self.z2 = z1, z2
        scale = max(abs(z1), abs(z2), 1.0)
        self.vertical = abs(z1.real - z2.real) <= 1e-13 * scale
        if self.vertical:
            self.x = 0.5 * (z1.real + z2.real)
            super().__init__(np.log(z1.imag), np.log(z2.imag))
        else:
            c = (abs(z2) ** 2 - abs(z1) ** 2) / (2 * (z2.real - z1.real))
            self.c = c
            self.r = abs(z1 - c)
            t1 = np.angle(z1 - c)
            t2 = np.angle(z2 - c)
            super().__init__(np.log(np.tan(t1 / 2)), np.log(np.tan(t2 / 2)))

    def z(self, s):
        if self.vertical:
            return self.x + 1j * np.exp(s)
        th = 2 * np.arctan(np.exp(s))
        return self.c + self.r * np.exp(1j * th)

    def dz(self, s):
        if self.vertical:
            return 1j * np.exp(s)
        th = 2 * np.arctan(np.exp(s))
        return 1j * self.r * np.exp(1j * th) * np.sin(th)

    @property
    def start(self):
        return self.z1

    @property
    def end(self):
        return self.z2

    def breakpoints(self, cfg):
        return _uniform(self.s0, self.s1, cfg.h_max)


class Chord(Segment):
    """Straight Euclidean segment; pieces shrink with the height."""

    kind = "chord"

    def __init__(self, z1, z2):
        z1, z2 = complex(z1), complex(z2)
        if z1.imag <= 0 or z2.imag <= 0:
            raise PathError("chord end points must lie in H")
        self.z1, self.z2 = z1, z2
        super().__init__(0.0, 1.0)

    def z(self, s):
        return self.z1 + s * (self.z2 - self.z1)

    def dz(self, s):
        return np.full(np.shape(s), self.z2 - self.z1, dtype=complex)

    @property
    def start(self):
        return self.z1

    @property
    def end(self):
        return self.z2

    def breakpoints(self, cfg):
        length = abs(self.z2 - self.z1)
        if length == 0:
            return np.array([0.0, 1.0])
        ts = [0.0]
        t = 0.0
        while t < 1.0:
            y0 = self.z(t).imag
            dt = cfg.h_max * y0 / length
            y1 = self.z(min(1.0, t + dt)).imag
            dt = cfg.h_max * min(y0, y1) / length
            t = min(1.0, t + dt)
            ts.append(t)
        return np.array(ts)


class Ray(Segment):
    """Vertical ray from x + i*y_top (standing in for i*oo) down to x + iY."""

    kind = "ray"

    def __init__(self, x, Y, y_top):
        if not y_top > Y > 0:
            raise PathError("need y_top > Y > 0")
        self.x, self.Y, self.y_top = float(x), float(Y), float(y_top)
        super().__init__(0.0, y_top - Y)

    def z(self, s):
        return self.x + 1j * (self.y_top - s)

    def dz(self, s):
        return np.full(np.shape(s), -1j, dtype=complex)

    def breakpoints(self, cfg):
        return _uniform(self.s0, self.s1, cfg.ray_step)

    def describe(self):
        d = super().describe()
        d["q_cut"] = float(np.exp(-2 * np.pi * self.y_top))
        return d


# ---------------------------------------------------------------------------
# iterated integrals on a segment

def _piece(omega: OmegaForm, z, dz, w, S, depth):
    """Level arrays at the end of one piece (nodes z, derivative dz already scaled)."""
    L = len(omega)
    W = omega.densities(z) * dz[None, :]
    n = z.size
    levels = [np.ones(1, dtype=complex)]
    prev = np.ones((1, n), dtype=complex)
    for d in range(1, depth + 1):
        prod = (W[:, None, :] * prev[None, :, :]).reshape(L ** d, n)
        levels.append(prod @ w)
        if d < depth:
            prev = prod @ S.T
    return levels


def iterated_segment(omega: OmegaForm, seg: Segment, depth: int, cfg: QuadConfig = DEFAULT):
    """Truncated iterated integral of Omega along one segment (returns TruncSeries, n_pieces)."""
    x, w, S = gauss_rule(cfg.nodes)
    bps = seg.breakpoints(cfg)
    total = TruncSeries.one(omega.alphabet, depth)
    pieces = 0
    for s0, s1 in zip(bps[:-1], bps[1:]):
        if s1 == s0:
            continue
        half = 0.5 * (s1 - s0)
        s = 0.5 * (s0 + s1) + half * x
        z = seg.z(s)
        if np.any(z.imag < cfg.y_min):
            raise PathError("segment leaves the allowed region (Im z < %g)" % cfg.y_min)
        piece = TruncSeries(omega.alphabet, depth, _piece(omega, z, seg.dz(s) * half, w, S, depth))
        total = piece * total
        pieces += 1
    return total, pieces


# ---------------------------------------------------------------------------
# transports between points of H u P^1(Q)

@dataclass
class Transport:
    result: TruncSeries
    diagnostics: dict = field(default_factory=dict)


def _same_point(a, b):
    if isinstance(a, Cusp) or isinstance(b, Cusp):
        return a == b
    return abs(complex(a) - complex(b)) <= 1e-15 * max(1.0, abs(complex(a)))


class Integrator:
    """Computes and caches transports J_a^b(Omega) for one alphabet, depth and quadrature setting."""

    def __init__(self, omega: OmegaForm, depth: int, cfg: QuadConfig = DEFAULT):
        self.omega = omega
        self.depth = depth
        self.cfg = cfg
        self._legs = {}
        self.log = []

    @property
    def alphabet(self):
        return self.omega.alphabet

    def one(self):
        return TruncSeries.one(self.alphabet, self.depth)

    def segment(self, seg: Segment):
        J, n = iterated_segment(self.omega, seg, self.depth, self.cfg)
        entry = seg.describe()
        entry["pieces"] = n
        self.log.append(entry)
        return J

    def push(self, g: Mat2, F: TruncSeries):
        return F.apply_letter_map(letter_action(g, self.alphabet))

    def ray(self, x=0.0, Y=None):
        """J_{i oo}^{x + iY}."""
        Y = self.cfg.y_cut if Y is None else Y
        return self.segment(Ray(x, Y, max(self.cfg.y_top, Y + self.cfg.y_top)))

    def cusp_leg(self, c: Cusp):
        """(anchor, J_c^anchor) with anchor an interior point attached to the cusp c."""
        if c in self._legs:
            return self._legs[c]
        Y = self.cfg.y_cut
        if c.is_infinity:
            out = (1j * Y, self.ray(0.0, Y))
        elif self.cfg.cusp_method == "direct":
            x = float(c.fraction())
            eps = 1.0 / (c.q ** 2 * self.cfg.y_top)
            out = (x + 1j * Y, self.segment(Geodesic(x + 1j * eps, x + 1j * Y)))
        elif self.cfg.cusp_method == "equivariant":
            g = psl2z.cusp_to_infinity(c)
            anchor = complex(psl2z.mobius(g, 1j * Y))
            out = (anchor, self.push(g, self.ray(0.0, Y)))
        else:
            raise PathError("unknown cusp method %r" % (self.cfg.cusp_method,))
        self._legs[c] = out
        return out

    def between(self, z1: complex, z2: complex):
        if _same_point(z1, z2):
            return self.one()
        return self.segment(Geodesic(z1, z2))

    def __call__(self, a, b):
        return self.transport(a, b).result

    def transport(self, a, b, estimate_error=False) -> Transport:
        """J_a^b along the canonical path: cusp leg, geodesic between anchors, cusp leg."""
        a, b = psl2z.as_point(a), psl2z.as_point(b)
        start = len(self.log)
        if _same_point(a, b):
            J = self.one()
        else:
            if isinstance(a, Cusp):
                pa, La = self.cusp_leg(a)
            else:
                pa, La = a, self.one()
            if isinstance(b, Cusp):
                pb, Lb = self.cusp_leg(b)
                Lb = Lb.inverse()
            else:
                pb, Lb = b, self.one()
            J = Lb * self.between(pa, pb) * La
        diag = {"segments": self.log[start:], "depth": self.depth, "quadrature": self.cfg.as_dict()}
        if estimate_error:
            fine = Integrator(self.omega, self.depth, self.cfg.refined())
            diag["error_estimate"] = J.distance(fine(a, b))
        return Transport(J, diag)

    def along(self, segments):
        """Iterated integral along an explicit list of consecutive segments."""
        J = self.one()
        for seg in segments:
            J = self.segment(seg) * J
        return J

    def equivariance_residual(self, g: Mat2, a, b) -> float:
        a, b = psl2z.as_point(a), psl2z.as_point(b)
        lhs = self(psl2z.mobius(g, a), psl2z.mobius(g, b))
        rhs = self.push(g, self(a, b))
        return lhs.distance(rhs)


def transport(omega: OmegaForm, a, b, depth: int, cfg: QuadConfig = DEFAULT, estimate_error=False):
    return Integrator(omega, depth, cfg).transport(a, b, estimate_error)


def equivariance_check(omega: OmegaForm, g: Mat2, a, b, depth: int, cfg: QuadConfig = DEFAULT):
    return Integrator(omega, depth, cfg).equivariance_residual(g, a, b)
