"""Named validation checks behind ``nodal check``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable

from .algebra import G, T, X, Y, MultiPoly
from .bps import EulerSeries, bps_transform, nodal_model_series, reexpand
from .config import Config
from .hilb import Localizer, count_fixed_points, euler_integral, draw_samples
from .nodepoly import Engine
from .toric import chern_numbers, generator_library


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def bps_binomial_law(max_delta: int = 6) -> CheckResult:
    bad = []
    for d in range(max_delta + 1):
        spec = bps_transform(EulerSeries(d, G, tuple(nodal_model_series(G, d, d))))
        if [MultiPoly.coerce(v) for v in spec.values()] != [MultiPoly.constant(comb(d, s)) for s in range(d + 1)]:
            bad.append(d)
    return CheckResult("bps-binomial-law", not bad, f"delta <= {max_delta}" + (f", failed {bad}" if bad else ""))


def bps_reexpansion(cases: int = 100, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(cases):
        d = rng.randint(0, 6)
        vals = [MultiPoly({(0, 0, 0, 0, k): Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for k in range(3)})
                for _ in range(d + 1)]
        spec = bps_transform(EulerSeries(d, G, tuple(vals)))
        if [MultiPoly.coerce(v) for v in reexpand(spec, G, d)] != vals:
            bad += 1
    return CheckResult("bps-reexpansion", bad == 0, f"{cases} random symbolic-g inputs, {bad} mismatches")


def n1_identity(engine: Engine) -> CheckResult:
    n1 = engine.node_polynomial(1).polynomial
    ok = n1 == 3 * X + 2 * Y + T
    return CheckResult("N1-classical", ok, f"N_1 = {n1}")


def leading_terms(engine: Engine, max_delta: int) -> CheckResult:
    bad = []
    for d in range(1, max_delta + 1):
        p = engine.node_polynomial(d).polynomial
        if p.total_degree() != d or p.coeff({"t": d}) != Fraction(1, factorial(d)):
            bad.append(d)
    return CheckResult("N-degree-and-leading-term", not bad,
                       f"delta 1..{max_delta}" + (f", failed {bad}" if bad else ""))


def euler_leading_terms(engine: Engine, max_delta: int) -> CheckResult:
    bad = []
    for d in range(max_delta + 1):
        for i in range(d + 1):
            p = engine.euler_polynomial(i, d)
            if p.coeff({"t": i}) != Fraction(d - i + 1, factorial(i)) or p.total_degree() > i:
                bad.append((i, d))
    return CheckResult("e_i-t-coefficient", not bad,
                       f"0 <= i <= delta <= {max_delta}" + (f", failed {bad}" if bad else ""))


def pencil_identity(engine: Engine) -> CheckResult:
    lib = [inst for inst in engine.library(1) if inst.connected]
    bad = []
    for inst in lib:
        x, _, _, t = chern_numbers(inst)
        if engine.localizer.relative_hilb_euler(inst, 1, 1) != x + t:
            bad.append(str(inst))
    return CheckResult("pencil-identity", not bad, f"{len(lib)} connected surfaces" + (f", failed {bad}" if bad else ""))


def sample_independence(config: Config, max_i: int) -> CheckResult:
    lib = generator_library(max_i)
    a = Localizer(sample_count=config.sample_count, seed=config.rng_seed)
    b = Localizer(sample_count=config.sample_count, seed=config.rng_seed + 1)
    bad = []
    for inst in lib:
        va, vb = a.relative_hilb_euler_all(inst, max_i), b.relative_hilb_euler_all(inst, max_i)
        if va != vb or (inst.connected and any(v.denominator != 1 for v in va)):
            bad.append(str(inst))
    return CheckResult("sample-independence", not bad,
                       f"{len(lib)} instances, i <= {max_i}, {2 * config.sample_count} samples each"
                       + (f", failed {bad}" if bad else ""))


def euler_consistency(config: Config, max_n: int = 4) -> CheckResult:
    surfaces = []
    for inst in generator_library(1) + generator_library(1, 1):
        for c in inst.components:
            if c.key not in {s.key for s in surfaces}:
                surfaces.append(c)
    surfaces = surfaces[:6]
    bad = []
    for s in surfaces:
        sample = draw_samples(s, max_n, 1, config.rng_seed)[0]
        for n in range(max_n + 1):
            if euler_integral(s, n, sample) != count_fixed_points(len(s.vertices), n):
                bad.append((str(s), n))
    return CheckResult("euler-characteristic", not bad,
                       f"{len(surfaces)} surfaces, n <= {max_n}" + (f", failed {bad}" if bad else ""))


def fit_stability(config: Config, max_delta: int) -> CheckResult:
    a, b = Engine(config, 0), Engine(config, 1)
    bad = [d for d in range(max_delta + 1) if a.node_polynomial(d) != b.node_polynomial(d)]
    return CheckResult("fit-stability", not bad, f"two disjoint libraries, delta <= {max_delta}"
                       + (f", differ at {bad}" if bad else ""))


def p2_cubic(engine: Engine) -> CheckResult:
    from .nodepoly import count_nodal
    from .toric import projective_plane

    n, _ = count_nodal(projective_plane(3), 1, engine)
    return CheckResult("P2-cubic-count", n == 12, f"nodal cubics = {n}")


def run_checks(level: str, config: Config, engine: Engine | None = None) -> list:
    engine = engine or Engine(config)
    top = min(4, config.max_delta)
    quick: list[Callable[[], CheckResult]] = [
        lambda: bps_binomial_law(6),
        lambda: n1_identity(engine),
        lambda: p2_cubic(engine),
        lambda: sample_independence(config, 2),
    ]
    if level == "quick":
        return [c() for c in quick]
    full = quick + [
        lambda: bps_reexpansion(100),
        lambda: leading_terms(engine, top),
        lambda: euler_leading_terms(engine, top),
        lambda: pencil_identity(engine),
        lambda: sample_independence(config, top),
        lambda: euler_consistency(config, 4),
        lambda: fit_stability(config, top),
    ]
    return [c() for c in full]
