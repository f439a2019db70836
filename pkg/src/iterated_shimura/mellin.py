"""
Mellin transforms of cusp forms along the imaginary axis.

    Lambda(f; s) = int_{i oo}^0 f(z) z^(s-1) dz,   z^(s-1) principal (arg z = pi/2).

With z = iy this is -i^s int_0^oo f(iy) y^(s-1) dy.  Splitting at y0 and
folding (0, y0] onto [1/y0, oo) with f(i/t) = (it)^k f(it) gives

    Lambda(f; s) = -i^s [ int_{y0}^oo f(iy) y^(s-1) dy + i^k int_{1/y0}^oo f(it) t^(k-s-1) dt ],

which converges for every s.  Termwise integration of the q-expansion gives
the Dirichlet form  -i^s Gamma(s) (2 pi)^-s sum a_n n^-s  for Re s > k/2 + 1.
The same substitution shows Lambda(s) = e^(pi i s) Lambda(k - s) at level one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from .forms import CuspForm, OmegaForm, evaluate, letter_action, letters
from .integrate import DEFAULT, Geodesic, QuadConfig, Ray, gauss_rule, iterated_segment
from .ncalg import TruncSeries
from .psl2z import SIGMA


class MellinError(ValueError):
    pass


@dataclass
class MellinValue:
    s: complex
    value: complex
    diagnostics: dict = field(default_factory=dict)


def _power(y, s):
    return np.exp((s - 1) * np.log(y))


def _half_line(f: CuspForm, s, y0, cfg: QuadConfig):
    """int_{y0}^{y0 + y_top} f(iy) y^(s-1) dy by composite Gauss-Legendre."""
    x, w, _ = gauss_rule(cfg.nodes)
    edges = np.arange(y0, y0 + cfg.y_top + 1e-12, cfg.ray_step / 2)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        y = 0.5 * (b - a) * x + 0.5 * (a + b)
        total += 0.5 * (b - a) * np.sum(w * evaluate(f, 1j * y) * _power(y, s))
    return total


def lambda_(f: CuspForm, s, y0=1.0, cfg: QuadConfig = DEFAULT) -> MellinValue:
    """Lambda(f; s) by the folded integral with pivot height y0."""
    s = complex(s)
    k = f.weight
    A = _half_line(f, s, y0, cfg)
    B = _half_line(f, k - s, 1.0 / y0, cfg)
    val = -(1j ** s) * (A + (1j ** k) * B)
    return MellinValue(s, complex(val), {"pivot": y0, "method": "quadrature"})


def entirety_residual(f: CuspForm, s, pivots=(1.0, 1.25), cfg: QuadConfig = DEFAULT) -> float:
    """Disagreement of Lambda(f; s) between two pivot heights (relative)."""
    a = lambda_(f, s, pivots[0], cfg).value
    b = lambda_(f, s, pivots[1], cfg).value
    return abs(a - b) / max(abs(a), 1e-300)


def lambda_via_dirichlet(f: CuspForm, s, N=None, guard=True) -> MellinValue:
    """-i^s Gamma(s) (2 pi)^-s sum_{n<=N} a_n n^-s, with a step-halving error estimate.

    `f` supplies the coefficients; N defaults to all of them.  The error
    estimate is |S_N - S_(N/2)| scaled like the value.
    """
    s = complex(s)
    k = f.weight
    if guard and s.real < k / 2 + 1.5:
        raise MellinError("Dirichlet series needs Re s >= %g" % (k / 2 + 1.5))
    N = f.N if N is None else min(N, f.N)
    a = np.array([complex(c) for c in f.coefficients[1:N + 1]])
    n = np.arange(1, N + 1, dtype=float)
    terms = a * np.exp(-s * np.log(n))
    full = np.sum(terms)
    half = np.sum(terms[:N // 2])
    factor = -(1j ** s) * _gamma(s) * (2 * np.pi) ** (-s)
    val = complex(factor * full)
    err = abs(factor * (full - half))
    return MellinValue(s, val, {"terms": N, "tail_estimate": float(err), "method": "dirichlet"})


def functional_equation_residual(f: CuspForm, s, epsilon=1, cfg: QuadConfig = DEFAULT) -> dict:
    """Residuals of Lambda(s) = +-epsilon e^(pi i s) Lambda(k - s), relative to max(|Lambda(s)|, |Lambda(k-s)|).

    At level one g_N = sigma fixes f, so epsilon = 1.
    """
    s = complex(s)
    k = f.weight
    L1 = lambda_(f, s, cfg=cfg).value
    L2 = lambda_(f, k - s, cfg=cfg).value
    rhs = epsilon * np.exp(1j * np.pi * s) * L2
    scale = max(abs(L1), abs(L2), 1e-300)
    plus = abs(L1 - rhs) / scale
    minus = abs(L1 + rhs) / scale
    return {"s": s, "plus": float(plus), "minus": float(minus),
            "consistent": "+" if plus <= minus else "-", "lambda": L1}


def calibrate_sign(f: CuspForm, s_values=range(2, 11), cfg: QuadConfig = DEFAULT) -> dict:
    """Run the functional equation on a grid and record which sign holds throughout."""
    rows = [functional_equation_residual(f, s, cfg=cfg) for s in s_values]
    signs = {r["consistent"] for r in rows}
    sign = signs.pop() if len(signs) == 1 else "mixed"
    key = "plus" if sign == "+" else "minus"
    worst = max(r[key] for r in rows) if sign != "mixed" else float("inf")
    return {"form": f.name, "sign": sign, "printed_sign": "-", "max_residual": worst, "rows": rows}


# ---------------------------------------------------------------------------
# iterated Mellin transforms

class MellinLetters:
    """Letters (f, s) with densities f(z) z^(s-1), s arbitrary complex (principal branch)."""

    def __init__(self, pairs):
        self.alphabet = tuple(dict.fromkeys((f, complex(s)) for f, s in pairs))

    def __len__(self):
        return len(self.alphabet)

    def densities(self, z):
        z = np.asarray(z, dtype=complex).ravel()
        cache = {}
        out = np.empty((len(self.alphabet), z.size), dtype=complex)
        logz = np.log(z)
        for i, (f, s) in enumerate(self.alphabet):
            if f not in cache:
                cache[f] = evaluate(f, z)
            out[i] = cache[f] * np.exp((s - 1) * logz)
        return out


def mellin_path(cfg: QuadConfig = DEFAULT):
    """i oo -> i along the imaginary axis, then i -> i/y_top, the direct path to the cusp 0."""
    return [Ray(0.0, 1.0, cfg.y_top + 1.0), Geodesic(1j, 1j / (cfg.y_top + 1.0))]


def _mellin_series(letters_, depth, cfg):
    out = TruncSeries.one(letters_.alphabet, depth)
    for seg in mellin_path(cfg):
        J, _ = iterated_segment(letters_, seg, depth, cfg)
        out = J * out
    return out


def iterated_mellin(forms, args, cfg: QuadConfig = DEFAULT) -> complex:
    """M(f_1, ..., f_n; s_1, ..., s_n) = I_{i oo}^0(omega_1, ..., omega_n).

    omega_1 is the outermost integration (its variable runs nearest the
    endpoint 0), matching the transport convention.
    """
    forms = list(forms)
    args = list(args)
    if len(forms) != len(args) or not forms:
        raise MellinError("need matching nonempty lists of forms and arguments")
    ml = MellinLetters(zip(forms, args))
    J = _mellin_series(ml, len(forms), cfg)
    return complex(J[tuple((f, complex(s)) for f, s in zip(forms, args))])


def iterated_mellin_table(forms, args, depth, cfg: QuadConfig = DEFAULT) -> TruncSeries:
    """All iterated Mellin values up to `depth` over the letters (f_j, s_j) at once."""
    return _mellin_series(MellinLetters(zip(forms, args)), depth, cfg)


def shuffle_residual(forms, args, cfg: QuadConfig = DEFAULT) -> float:
    """M(f1;s1) M(f2;s2) - M(f1,f2;s1,s2) - M(f2,f1;s2,s1) for two letters."""
    (f1, f2), (s1, s2) = forms, args
    a = iterated_mellin([f1], [s1], cfg)
    b = iterated_mellin([f2], [s2], cfg)
    c = iterated_mellin([f1, f2], [s1, s2], cfg)
    d = iterated_mellin([f2, f1], [s2, s1], cfg)
    return abs(a * b - c - d)


# ---------------------------------------------------------------------------
# total Mellin transform

@dataclass
class TotalMellin:
    series: TruncSeries          # TM(f_V; s_V), on the letters s_V
    dual: TruncSeries            # TM(f_V; k_V - s_V), on the letters k_V - s_V
    relation: TruncSeries        # TM(s_V) * sigma_*(TM(k_V - s_V))
    residual: float


def _signed_sigma(alphabet_from, alphabet_to):
    """sigma_* as a matrix from the letters (f, k-m) to (f, m); sigma_* sends A_(f,k-m) to (-1)^(m-1) A_(f,m)."""
    P = letter_action(SIGMA, tuple(alphabet_from) + tuple(v for v in alphabet_to if v not in alphabet_from))
    full = tuple(alphabet_from) + tuple(v for v in alphabet_to if v not in alphabet_from)
    idx = {v: i for i, v in enumerate(full)}
    M = np.zeros((len(alphabet_to), len(alphabet_from)), dtype=complex)
    for j, v in enumerate(alphabet_from):
        for i, w in enumerate(alphabet_to):
            M[i, j] = P[idx[w], idx[v]]
    return M


def _substitute(F: TruncSeries, M, alphabet_to) -> TruncSeries:
    """Apply a (possibly relabelling) letter substitution M[w, v] from F's letters to alphabet_to."""
    L2 = len(alphabet_to)
    out = [F.levels[0].copy()]
    for d in range(1, F.depth + 1):
        T = F.tensor(d)
        for ax in range(d):
            T = np.moveaxis(np.tensordot(M, T, axes=([1], [ax])), 0, ax)
        out.append(np.ascontiguousarray(T).reshape(L2 ** d))
    return TruncSeries(alphabet_to, F.depth, out)


def mellin_alphabet(form: CuspForm, exponents):
    """Letters for s_V and k - s_V (sorted, without duplicates)."""
    k = form.weight
    ms = sorted(set(exponents) | {k - m for m in exponents})
    return letters(form, ms)


def total_mellin(form: CuspForm, exponents, depth, cfg: QuadConfig = DEFAULT) -> TotalMellin:
    """TM(f_V; s_V) = J_{i oo}^0 on the letters s_V, with its functional-equation residual.

    The transport is computed once over s_V and k - s_V along the direct
    vertical path to 0, then restricted.  The relation
    TM(s_V) * sigma_*(TM(k_V - s_V)) = 1 is the restriction of
    J_{i oo}^0 * sigma_*(J_{i oo}^0) = J_{i oo}^0 * J_0^{i oo} = 1.
    """
    k = form.weight
    V = letters(form, sorted(set(exponents)))
    W = letters(form, sorted({k - m for m in exponents}))
    full = mellin_alphabet(form, exponents)
    J = _mellin_series(OmegaForm(full), depth, cfg)
    tm = J.restrict(V)
    dual = J.restrict(W)
    pushed = _substitute(dual, _signed_sigma(W, V), V)
    rel = tm * pushed
    one = TruncSeries.one(V, depth)
    return TotalMellin(tm, dual, rel, rel.distance(one))


def tm_vs_sigma_relation(form: CuspForm, exponents, X: TruncSeries, cfg: QuadConfig = DEFAULT) -> float:
    """Compare the TM relation series with the sigma relation of X = J_0^{i oo}.

    With TM = X^-1 on the letters s_V, TM * sigma.TM = sigma.(X sigma.X)^-1;
    both sides are built independently (X from the Shimura cocycle at i oo).
    """
    tmv = total_mellin(form, exponents, X.depth, cfg)
    V = tmv.series.alphabet
    full = X.alphabet
    S = letter_action(SIGMA, full)
    R = X * X.apply_letter_map(S)
    target = R.apply_letter_map(S).inverse().restrict(V)
    return tmv.relation.distance(target)
