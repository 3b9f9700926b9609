import json
from fractions import Fraction
from math import factorial

import pytest

from nodal.algebra import T, X, Y, Z, MultiPoly
from nodal.bps import InconsistencyError
from nodal.fit import (
    FitCache,
    InsufficientGeneratorsError,
    MonomialBasis,
    dedupe,
    fit_report,
    fit_universal,
    library_hash,
    matrix_rank,
    poly_from_terms,
    poly_to_terms,
)
from nodal.hilb import Localizer
from nodal.linalg import independent_rows
from nodal.nodepoly import Engine
from nodal.toric import generator_library


def test_basis_sizes():
    assert [len(MonomialBasis(d)) for d in range(5)] == [1, 5, 15, 35, 70]
    assert len(MonomialBasis(2).exponents) == 15


def test_fit_e0_is_delta_plus_one(engine):
    for d in range(4):
        assert engine.euler_polynomial(0, d) == MultiPoly.constant(d + 1)


def test_fit_e1_closed_form(engine):
    # from f(1; w) = t w/(1+w) - y/(1+w)^2 - x/(1+w)^3
    assert engine.euler_polynomial(1, 1) == X + T
    for d in range(2, 5):
        assert engine.euler_polynomial(1, d) == d * T


@pytest.mark.parametrize("delta", range(5))
def test_fit_t_coefficient(engine, delta):
    for i in range(delta + 1):
        p = engine.euler_polynomial(i, delta)
        assert p.coeff({"t": i}) == Fraction(delta - i + 1, factorial(i))
        assert p.total_degree() <= i


def test_fit_records_held_out_checks():
    lib = generator_library(2)
    res = fit_universal(2, 2, lib, Localizer())
    assert len(res.instances_used) == 15
    assert len(res.residual_check) >= 5
    assert any(not inst.connected for inst, _, _ in res.residual_check)
    assert all(v == f for _, v, f in res.residual_check)


def test_connected_only_library_is_deficient():
    # connected surfaces all satisfy z + t = 12, so degree >= 1 monomials are dependent
    lib = [inst for inst in generator_library(2) if inst.connected]
    report = fit_report(2, 2, lib, Localizer())
    assert not report["full_rank"]
    assert report["deficiency"] > 0
    with pytest.raises(InsufficientGeneratorsError):
        fit_universal(2, 2, lib, Localizer())


def test_too_few_held_out():
    lib = generator_library(1)
    basis = MonomialBasis(1)
    rows = [basis.row(i) for i in lib]
    keep = [lib[k] for k in independent_rows(rows)]
    with pytest.raises(InsufficientGeneratorsError):
        fit_universal(1, 1, keep, Localizer())


def test_wrong_value_detected(monkeypatch):
    import nodal.fit as fit_mod

    real = fit_mod._values

    def corrupted(*args):
        vals = real(*args)
        vals[-1] += 1
        return vals

    monkeypatch.setattr(fit_mod, "_values", corrupted)
    with pytest.raises(InconsistencyError):
        fit_universal(1, 1, generator_library(1), Localizer())


def test_report_full_rank():
    report = fit_report(1, 1, generator_library(1), Localizer())
    assert report["rank"] == report["columns"] == 5
    assert report["full_rank"]
    assert report["polynomial"] == "x + t"
    assert all(h["ok"] for h in report["held_out"])
    assert len(report["pivot_bits"]) == 5


def test_duplicates_deduped():
    lib = generator_library(1)
    doubled = lib + lib[:3]
    assert len(dedupe(doubled)) == len(lib)
    assert library_hash(doubled) == library_hash(lib)
    assert fit_report(1, 1, doubled, Localizer())["duplicates_removed"] == 3
    assert matrix_rank(doubled, 1) == 5


def test_term_round_trip():
    p = 3 * X * X * Fraction(1, 7) - Y * Z + T * 10**30 + Fraction(-5, 3)
    terms = poly_to_terms(p)
    assert all(isinstance(t["coeff_num"], str) for t in terms)
    assert poly_from_terms(json.loads(json.dumps(terms))) == p


def test_cache_round_trip(tmp_path):
    path = tmp_path / "sub" / "fits.json"
    cache = FitCache(path)
    assert cache.get(1, 1, "abc") is None
    cache.put(1, 1, "abc", X + T)
    fresh = FitCache(path)
    assert fresh.get(1, 1, "abc") == X + T
    assert fresh.get(1, 1, "other") is None
    assert fresh.clear() == 1
    assert not path.exists()


def test_cache_ignores_garbage(tmp_path):
    path = tmp_path / "fits.json"
    path.write_text("not json")
    assert FitCache(path).get(0, 0, "x") is None


def test_cache_used_by_engine(tmp_path, config):
    cfg = config.with_(cache_path=str(tmp_path / "fits.json"))
    first = Engine(cfg).node_polynomial(2)
    assert len(FitCache(cfg.cache_path).entries()) == 3
    second = Engine(cfg)
    assert second.node_polynomial(2) == first
    assert not second.localizer._cache  # answered from disk
