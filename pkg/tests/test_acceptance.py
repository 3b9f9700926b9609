"""
Acceptance suite: one test per criterion, each printing a single PASS/FAIL
line.  Timing limits are measured on fresh engines with no on-disk cache.
"""

import random
import time
from fractions import Fraction
from math import comb, factorial

import pytest

from nodal.algebra import G, T, X, Y, MultiPoly
from nodal.bps import EulerSeries, bps_transform, nodal_model_series, reexpand
from nodal.config import Config
from nodal.hilb import Localizer, count_fixed_points, draw_samples, euler_integral
from nodal.nodepoly import Engine, count_nodal
from nodal.toric import chern_numbers, generator_library, projective_plane

CONFIG = Config(cache_path="", thread_count=1)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_n1_classical(report):
    start = time.perf_counter()
    n1 = Engine(CONFIG).node_polynomial(1).polynomial
    elapsed = time.perf_counter() - start
    report(1, n1 == 3 * X + 2 * Y + T and elapsed < 1, f"N_1 = {n1} in {elapsed:.2f}s (limit 1s)")


def test_criterion_2_degree_and_leading_term(report):
    engine = Engine(CONFIG)
    start = time.perf_counter()
    bad = []
    for d in range(1, 5):
        p = engine.node_polynomial(d).polynomial
        if p.total_degree() != d or p.coeff({"t": d}) != Fraction(1, factorial(d)):
            bad.append(d)
    elapsed = time.perf_counter() - start
    report(2, not bad and elapsed < 600, f"delta 1..4, failures {bad}, {elapsed:.1f}s (limit 600s)")


def test_criterion_3_euler_t_coefficient(report, engine):
    bad = []
    for d in range(5):
        for i in range(d + 1):
            if engine.euler_polynomial(i, d).coeff({"t": i}) != Fraction(d - i + 1, factorial(i)):
                bad.append((i, d))
    report(3, not bad, f"[t^i] e_i = (delta-i+1)/i! for 0 <= i <= delta <= 4, failures {bad}")


def test_criterion_4_bps_binomial_law(report):
    start = time.perf_counter()
    bad = []
    for d in range(7):
        spec = bps_transform(EulerSeries(d, G, tuple(nodal_model_series(G, d, d))))
        values = [MultiPoly.coerce(v) for v in spec.values()]
        if values != [MultiPoly.constant(comb(d, s)) for s in range(d + 1)] or values[d] != 1:
            bad.append(d)
    elapsed = time.perf_counter() - start
    report(4, not bad and elapsed < 1, f"delta <= 6, failures {bad}, {elapsed:.2f}s (limit 1s)")


def test_criterion_5_pencil_identity(report, engine, engine_alt):
    connected = [inst for inst in engine.library(4) + engine_alt.library(4) if inst.connected]
    loc = Localizer(sample_count=CONFIG.sample_count, seed=CONFIG.rng_seed)
    bad = []
    for inst in connected:
        x, _, _, t = chern_numbers(inst)
        if loc.relative_hilb_euler(inst, 1, 1) != x + t:
            bad.append(str(inst))
    cubic, _ = count_nodal(projective_plane(3), 1, engine)
    report(5, not bad and cubic == 12,
           f"{len(connected)} connected surfaces, failures {bad}; nodal plane cubics = {cubic}")


def test_criterion_6_localization_soundness(report):
    lib = generator_library(4)
    a = Localizer(sample_count=3, seed=CONFIG.rng_seed)
    b = Localizer(sample_count=3, seed=CONFIG.rng_seed + 7)
    bad = []
    for inst in lib:
        va, vb = a.relative_hilb_euler_all(inst, 4), b.relative_hilb_euler_all(inst, 4)
        if va != vb or (inst.connected and any(v.denominator != 1 for v in va)):
            bad.append(str(inst))
    surfaces = {c.key: c for inst in lib for c in inst.components}
    checked = 0
    for s in list(surfaces.values())[:8]:
        for sample in draw_samples(s, 4, 3, CONFIG.rng_seed):
            for n in range(5):
                if euler_integral(s, n, sample) != count_fixed_points(len(s.vertices), n):
                    bad.append(f"euler {s} n={n}")
        checked += 1
    report(6, not bad and checked >= 5,
           f"{len(lib)} instances x 6 samples agree and integral; c_2n integral = fixed points"
           f" on {checked} surfaces, n <= 4; failures {bad}")


def test_criterion_7_universality(report, engine, engine_alt):
    keys_a = {c.key for inst in engine.library(4) for c in inst.components}
    keys_b = {c.key for inst in engine_alt.library(4) for c in inst.components}
    fast = all(engine.node_polynomial(d) == engine_alt.node_polynomial(d) for d in range(4))
    full = engine.node_polynomial(4) == engine_alt.node_polynomial(4)
    report(7, fast and full and not keys_a & keys_b,
           f"disjoint libraries agree: delta <= 3 {fast}, delta = 4 {full}")


def test_criterion_8_bps_uniqueness(report):
    rng = random.Random(20)
    start = time.perf_counter()
    bad = 0
    for _ in range(100):
        d = rng.randint(0, 6)
        vals = [MultiPoly({(0, 0, 0, 0, k): Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for k in range(3)})
                for _ in range(d + 1)]
        spec = bps_transform(EulerSeries(d, G, tuple(vals)))
        if [MultiPoly.coerce(v) for v in reexpand(spec, G, d)] != vals:
            bad += 1
    elapsed = time.perf_counter() - start
    report(8, bad == 0 and elapsed < 5, f"100 random inputs, {bad} mismatches, {elapsed:.2f}s (limit 5s)")
