"""
Command-line entry point.

    iterated-shimura verify SUITE [options]
    iterated-shimura compute WHAT [options]

Options come from a JSON config file (``--config``, or the path in
$ITERATED_SHIMURA_CONFIG) and are overridden by flags.  Reports are JSON
with sorted keys and embed the resolved configuration; tables are CSV.
Verification exits with status 1 when a residual exceeds its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import forms, mellin, msymb, nccoh, psl2z, shimura
from .integrate import Integrator, QuadConfig

ENV_CONFIG = "ITERATED_SHIMURA_CONFIG"

SUITES = ("cocycle", "eichler", "cuspidal", "cf-trick", "mellin", "tm", "symbols", "shapiro")
COMPUTE = ("transport", "lambda", "tm", "symbols")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a run depends on.  `alphabet` maps form names to exponent lists."""

    alphabet: dict = field(default_factory=lambda: {"delta": [1, 11]})
    depth: int = 3
    q_terms: int = 60
    quadrature: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: {
        "cocycle": 1e-6, "eichler": 1e-6, "cuspidal": 1e-6, "cf-trick": 1e-6,
        "mellin": 1e-8, "tm": 1e-6, "tm-coincidence": 1e-8, "shuffle": 1e-8})
    base_points: list = field(default_factory=lambda: ["oo", "i", "rho"])
    seed: int = 0
    samples: int = 20
    max_word_length: int = 6
    cusps: list = field(default_factory=lambda: ["1", "2/3", "3/5"])
    s_values: list = field(default_factory=lambda: [8.5, 9, 10])
    dirichlet_terms: int = 20000
    tm_exponents: list = field(default_factory=lambda: [2, 10])
    weights: list = field(default_factory=lambda: [10, 12, 14, 16, 18, 20, 22])
    precision_digits: int = 30

    def validate(self):
        if not 1 <= self.depth <= 5:
            raise ConfigError("depth must lie in 1..5")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError("tolerance %s must be positive" % k)
        for name in self.alphabet:
            forms.get_form(name, self.q_terms)
        QuadConfig(**self.quadrature)
        return self

    def quad(self) -> QuadConfig:
        return QuadConfig(**self.quadrature)

    def omega(self) -> forms.OmegaForm:
        """The alphabet, closed under the letter action before any run."""
        letters = []
        for name, exps in self.alphabet.items():
            letters += forms.letters(forms.get_form(name, self.q_terms), exps)
        return forms.OmegaForm.closure(letters)

    def tol(self, key):
        return float(self.tolerances[key])


def load_config(path=None) -> RunConfig:
    path = path or os.environ.get(ENV_CONFIG)
    cfg = RunConfig()
    if path:
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        for k, v in data.items():
            if k == "tolerances":
                cfg.tolerances.update(v)
            else:
                setattr(cfg, k, v)
    return cfg


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "depth", None) is not None:
        cfg.depth = args.depth
    if getattr(args, "base", None):
        cfg.base_points = args.base.split(",")
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "samples", None) is not None:
        cfg.samples = args.samples
    if getattr(args, "weights", None):
        cfg.weights = _ints(args.weights)
    if getattr(args, "s", None):
        cfg.s_values = _floats(args.s)
    if getattr(args, "cusps", None):
        cfg.cusps = args.cusps.split(",")
    if getattr(args, "form", None):
        cfg.alphabet = {args.form: cfg.alphabet.get(args.form, [1, 11] if args.form in ("delta", "Delta") else [1])}
    if getattr(args, "exponents", None):
        exps = _ints(args.exponents)
        cfg.alphabet = {name: exps for name in cfg.alphabet}
        cfg.tm_exponents = exps
    return cfg.validate()


# ---------------------------------------------------------------------------
# suites

def _check(rows, name, value, tol):
    ok = bool(value <= tol)
    rows.append({"check": name, "value": float(value), "tolerance": tol, "pass": ok})
    return ok


def suite_eichler(cfg: RunConfig, calib: dict):
    rows = []
    om = cfg.omega()
    I = Integrator(om, cfg.depth, cfg.quad())
    for a in cfg.base_points:
        sc = shimura.build(a, om, cfg.depth, integrator=I)
        for k, v in sc.relation_residuals().items():
            _check(rows, "%s relation at %s" % (k, a), v, cfg.tol("eichler"))
    return rows


def suite_cocycle(cfg: RunConfig, calib: dict):
    rows = []
    om = cfg.omega()
    I = Integrator(om, cfg.depth, cfg.quad())
    rng = random.Random(cfg.seed)
    words = nccoh.random_words(rng, cfg.samples, cfg.max_word_length)
    pairs = nccoh.random_pairs(rng, cfg.samples, cfg.max_word_length)
    for a in cfg.base_points:
        sc = shimura.build(a, om, cfg.depth, integrator=I)
        _check(rows, "extension vs direct transport at %s" % a, sc.extension_residual(words), cfg.tol("cocycle"))
        u = sc.cocycle.lifted(cfg.precision_digits)
        _check(rows, "relation projection at %s" % a, u.projection, cfg.tol("cocycle"))
        _check(rows, "cocycle identity at %s" % a, nccoh.verify_cocycle(u, pairs), cfg.tol("cocycle"))
        for name, F in (("X", sc.X), ("Y", sc.Y)):
            _check(rows, "shuffle residual of %s at %s" % (name, a), F.shuffle_residual(), cfg.tol("shuffle"))
    N = nccoh.synthetic_group(4, cfg.depth)
    X, Y = nccoh.synthetic_pair(N, random.Random(cfg.seed))
    u = nccoh.cocycle_from_pair(X, Y, N, tol=0)
    _check(rows, "cocycle identity, exact synthetic group", nccoh.verify_cocycle(u, pairs), 0.0)
    return rows


def suite_cuspidal(cfg: RunConfig, calib: dict):
    rows = []
    om = cfg.omega()
    I = Integrator(om, cfg.depth, cfg.quad())
    for a in cfg.base_points:
        rep = shimura.cuspidality(shimura.build(a, om, cfg.depth, integrator=I), cfg.tol("cuspidal"))
        worst = max(rep.residuals) if rep.cuspidal else float("inf")
        _check(rows, "cuspidal witness at %s (max linear residual)" % a, worst, cfg.tol("cuspidal"))
        if rep.cuspidal:
            _check(rows, "witness equation at %s" % a, rep.witness_residual, cfg.tol("cuspidal"))
    N = nccoh.synthetic_group(4, cfg.depth)
    rep = nccoh.is_cuspidal(nccoh.Cocycle(*nccoh.noncuspidal_pair(N), N, tol=0))
    rejected = (not rep.cuspidal) and rep.obstruction_depth == 1
    rows.append({"check": "synthetic non-cuspidal pair rejected at depth 1", "value": rep.obstruction_depth,
                 "tolerance": 1, "pass": rejected})
    return rows


def suite_cf(cfg: RunConfig, calib: dict):
    rows = []
    om = cfg.omega()
    depth = min(cfg.depth, 2)
    I = Integrator(om, depth, cfg.quad())
    orient = {}
    for a in cfg.cusps:
        r = shimura.cf_decomposition(a, om, depth, integrator=I)
        orient[a] = r.orientation
        _check(rows, "continued-fraction decomposition at %s" % a, r.residual, cfg.tol("cf-trick"))
    calib["primitive_orientation"] = orient
    return rows


def suite_mellin(cfg: RunConfig, calib: dict):
    rows = []
    q = cfg.quad()
    big = forms.delta(cfg.dirichlet_terms)
    f = forms.delta(cfg.q_terms)
    for s in cfg.s_values:
        a = mellin.lambda_(f, s, cfg=q).value
        b = mellin.lambda_via_dirichlet(big, s).value
        _check(rows, "quadrature vs Dirichlet at s=%g" % s, abs(a - b) / abs(a), cfg.tol("mellin"))
    signs = {}
    for g in (f, forms.delta_e4(cfg.q_terms)):
        c = mellin.calibrate_sign(g, range(2, 11), q)
        signs[g.name] = c["sign"]
        _check(rows, "functional equation (%s sign) for %s, s=2..10" % (c["sign"], g.name),
               c["max_residual"], cfg.tol("mellin"))
    calib["functional_equation_sign"] = signs
    return rows


def suite_tm(cfg: RunConfig, calib: dict):
    rows = []
    f = forms.delta(cfg.q_terms)
    depth = min(cfg.depth, 2)
    tm = mellin.total_mellin(f, cfg.tm_exponents, depth, cfg.quad())
    _check(rows, "total Mellin functional equation", tm.residual, cfg.tol("tm"))
    om = forms.OmegaForm.closure(forms.letters(f, cfg.tm_exponents))
    sc = shimura.build("oo", om, depth, cfg.quad())
    _check(rows, "coincidence with X sigma.X = 1", mellin.tm_vs_sigma_relation(f, cfg.tm_exponents, sc.X, cfg.quad()),
           cfg.tol("tm-coincidence"))
    return rows


def suite_symbols(cfg: RunConfig, calib: dict):
    rows = []
    for k in cfg.weights:
        sp = msymb.build_space(k)
        expected = 2 * forms.dim_cusp_forms(k)
        rows.append({"check": "cuspidal dimension k=%d" % k, "value": sp.cusp_dim, "expected": expected,
                     "dim": sp.dim, "pass": sp.cusp_dim == expected})
    if 12 in cfg.weights:
        sp = msymb.build_space(12)
        M = msymb.pairing_matrix(sp, forms.delta(cfg.q_terms), cfg.quad())
        sv = np.linalg.svd(M, compute_uv=False)
        ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
        rows.append({"check": "pairing matrix against Delta (smallest/largest singular value)",
                     "value": ratio, "tolerance": 1e-4, "rank": int(np.sum(sv > 1e-4 * sv[0])),
                     "pass": ratio > 1e-4 and M.shape[0] == 2})
        _check(rows, "pairing of relation vectors", msymb.relation_pairings(sp, forms.delta(cfg.q_terms), cfg.quad()),
               1e-8)
    return rows


def suite_shapiro(cfg: RunConfig, calib: dict):
    rows = []
    rng = random.Random(cfg.seed)
    N = nccoh.synthetic_group(4, min(cfg.depth, 3))
    u = nccoh.cocycle_from_pair(*nccoh.synthetic_pair(N, rng), N, tol=0)
    cosets = nccoh.gamma2_cosets()
    ind = nccoh.shapiro_induce(u, cosets, N)
    pairs = nccoh.random_pairs(rng, max(cfg.samples, 50), cfg.max_word_length)
    _check(rows, "induced cocycle identity (index %d)" % cosets.index, nccoh.verify_cocycle(ind, pairs), 0.0)
    elems = nccoh.subgroup_elements(cosets, nccoh.random_words(rng, cfg.samples, cfg.max_word_length))
    _check(rows, "projection roundtrip", nccoh.projection_residual(ind, elems), 0.0)
    return rows


SUITE_FUNCS = {"cocycle": suite_cocycle, "eichler": suite_eichler, "cuspidal": suite_cuspidal,
               "cf-trick": suite_cf, "mellin": suite_mellin, "tm": suite_tm,
               "symbols": suite_symbols, "shapiro": suite_shapiro}


def run_suite(name: str, cfg: RunConfig) -> dict:
    if name not in SUITE_FUNCS:
        raise ConfigError("unknown suite %r (choose from %s)" % (name, ", ".join(SUITES)))
    calib: dict = {}
    rows = SUITE_FUNCS[name](cfg, calib)
    return {"suite": name, "pass": all(r["pass"] for r in rows), "checks": rows,
            "calibration": calib, "config": asdict(cfg)}


# ---------------------------------------------------------------------------
# compute

def compute(what: str, cfg: RunConfig, args) -> str:
    if what == "transport":
        om = cfg.omega()
        T = Integrator(om, cfg.depth, cfg.quad()).transport(args.start, args.end, estimate_error=True)
        out = {"from": args.start, "to": args.end, "series": T.result.to_json(),
               "error_estimate": T.diagnostics["error_estimate"], "config": asdict(cfg)}
        return json.dumps(out, sort_keys=True, indent=1)
    if what == "lambda":
        f = forms.get_form(next(iter(cfg.alphabet)), cfg.q_terms)
        grid = _floats(args.grid) if args.grid else list(range(1, f.weight))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "re_lambda", "im_lambda", "fe_residual_plus", "fe_residual_minus", "entirety_residual"])
        for s in grid:
            r = mellin.functional_equation_residual(f, s, cfg=cfg.quad())
            w.writerow([repr(float(s)), repr(r["lambda"].real), repr(r["lambda"].imag),
                        repr(r["plus"]), repr(r["minus"]), repr(mellin.entirety_residual(f, s, cfg=cfg.quad()))])
        return buf.getvalue()
    if what == "tm":
        f = forms.get_form(next(iter(cfg.alphabet)), cfg.q_terms)
        tm = mellin.total_mellin(f, cfg.tm_exponents, cfg.depth, cfg.quad())
        out = {"series": tm.series.to_json(), "residual": tm.residual, "config": asdict(cfg)}
        return json.dumps(out, sort_keys=True, indent=1)
    if what == "symbols":
        out = {"spaces": [msymb.build_space(k).to_json() for k in cfg.weights], "config": asdict(cfg)}
        return json.dumps(out, sort_keys=True, indent=1)
    raise ConfigError("unknown compute target %r" % (what,))


# ---------------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="JSON config file (default: $%s)" % ENV_CONFIG)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--base", help="comma-separated base points: oo, i, rho")
    p.add_argument("--weights", help="comma-separated weights for modular symbols")
    p.add_argument("--form", help="built-in form name (delta, delta_e4) or a JSON form file")
    p.add_argument("--exponents", help="comma-separated exponents m")
    p.add_argument("--s", help="comma-separated Mellin arguments")
    p.add_argument("--cusps", help="comma-separated rational cusps")
    p.add_argument("--out", help="write the artifact here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="iterated-shimura", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    _common(v)
    c = sub.add_parser("compute", help="emit a JSON or CSV artifact")
    c.add_argument("what", choices=COMPUTE)
    c.add_argument("--from", dest="start", default="oo")
    c.add_argument("--to", dest="end", default="0")
    c.add_argument("--grid", help="comma-separated s values for the lambda table")
    _common(c)
    return parser


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = apply_overrides(load_config(args.config), args)
        if args.command == "verify":
            report = run_suite(args.suite, cfg)
            _emit(json.dumps(report, sort_keys=True, indent=1, default=str), args.out)
            return 0 if report["pass"] else 1
        _emit(compute(args.what, cfg, args), args.out)
        return 0
    except (ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
