"""
Node polynomials N_delta(x, y, z, t) and their evaluation.

N_delta is the coefficient n_{g-delta} of the BPS expansion of the series
sum_i e(Hilb^i(C/P^delta)) q^i, where each e(Hilb^i) is a universal
polynomial of degree <= i obtained by fitting localization values.
"""

from __future__ import annotations

import logging
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .algebra import G, MultiPoly
from .bps import EulerSeries, InconsistencyError, extract_node_count
from .config import Config
from .fit import FitCache, fit_universal, library_hash, poly_from_terms, poly_to_terms
from .hilb import Localizer
from .toric import (
    Advisory,
    ChernTuple,
    PolarizedToricSurface,
    SurfaceInstance,
    ampleness_advisory,
    chern_numbers,
    generator_library,
    p1xp1,
    projective_plane,
)

log = logging.getLogger(__name__)


class DeltaTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class NodePolynomial:
    delta: int
    polynomial: MultiPoly

    def __call__(self, chern: ChernTuple) -> Fraction:
        return self.polynomial.evaluate(ChernTuple(*chern)._asdict())

    def pretty(self) -> str:
        return f"N_{self.delta} = {self.polynomial}"

    def to_json(self) -> dict:
        return {"delta": self.delta, "terms": poly_to_terms(self.polynomial)}

    @classmethod
    def from_json(cls, data: dict) -> NodePolynomial:
        return cls(int(data["delta"]), poly_from_terms(data["terms"]))


def check_node_polynomial(np_: NodePolynomial) -> None:
    """Degree exactly delta and t^delta coefficient 1/delta!."""
    d = np_.delta
    poly = np_.polynomial
    if poly.total_degree() != d:
        raise InconsistencyError(f"N_{d} has degree {poly.total_degree()}")
    lead = poly.coeff({"t": d})
    if lead != Fraction(1, factorial(d)):
        raise InconsistencyError(f"[t^{d}]N_{d} = {lead}, expected 1/{factorial(d)}")


class Engine:
    """Owns the localizer, generator libraries and fit cache for one configuration."""

    def __init__(self, config: Config | None = None, library_variant: int = 0):
        self.config = config or Config()
        self.variant = library_variant
        self.localizer = Localizer(
            sample_count=self.config.sample_count,
            seed=self.config.rng_seed,
            workers=self.config.workers,
        )
        self.cache = FitCache(self.config.cache_path or None)
        self._libraries: dict = {}
        self._euler: dict = {}

    def check_delta(self, delta: int, force: bool = False) -> None:
        if delta < 0:
            raise ValueError("delta must be non-negative")
        if delta > self.config.max_delta:
            if not force:
                raise DeltaTooLargeError(
                    f"delta={delta} exceeds max_delta={self.config.max_delta}; use --force to override"
                )
            warnings.warn(f"delta={delta} beyond the default range; expect long run times", stacklevel=2)

    def library(self, degree: int) -> list:
        # degree 0 libraries contain no union to hold out
        degree = max(degree, 1)
        if degree not in self._libraries:
            self._libraries[degree] = generator_library(degree, self.variant)
        return self._libraries[degree]

    def euler_polynomial(self, i: int, delta: int) -> MultiPoly:
        """Universal polynomial for e(Hilb^i(C/P^delta))."""
        key = (i, delta)
        if key not in self._euler:
            lib = self.library(delta)
            h = library_hash(lib)
            poly = self.cache.get(i, delta, h)
            if poly is None:
                poly = fit_universal(i, delta, lib, self.localizer).polynomial
                self.cache.put(i, delta, h, poly)
            else:
                log.debug("cache hit for e(Hilb^%d), delta=%d", i, delta)
            self._euler[key] = poly
        return self._euler[key]

    def euler_series(self, delta: int) -> EulerSeries:
        return EulerSeries(delta, G, tuple(self.euler_polynomial(i, delta) for i in range(delta + 1)))

    def node_polynomial(self, delta: int, force: bool = False) -> NodePolynomial:
        self.check_delta(delta, force)
        result = NodePolynomial(delta, extract_node_count(self.euler_series(delta)))
        check_node_polynomial(result)
        return result


def node_polynomial(delta: int, engine: Engine | None = None, force: bool = False) -> NodePolynomial:
    return (engine or Engine()).node_polynomial(delta, force)


def count_nodal(target, delta: int, engine: Engine | None = None,
                force: bool = False) -> tuple[Fraction, Advisory | None]:
    """
    N_delta evaluated at a Chern tuple, a surface or an instance.  The
    ampleness advisory is returned for surfaces and instances.
    """
    engine = engine or Engine()
    advisory = None
    if isinstance(target, PolarizedToricSurface):
        target = SurfaceInstance((target,))
    if isinstance(target, SurfaceInstance):
        advisory = ampleness_advisory(target, delta)
        chern = chern_numbers(target)
    else:
        chern = ChernTuple(*target)
    return engine.node_polynomial(delta, force)(chern), advisory


_FAMILY = re.compile(r"^\s*(p2|p1xp1)\s*:\s*([0-9]+)(?:-([0-9]+))?(?:\s*,\s*([0-9]+)(?:-([0-9]+))?)?\s*$", re.I)


def parse_family(spec: str) -> list:
    """'P2:1-5' or 'P1xP1:1-3,2-4' -> list of surfaces."""
    m = _FAMILY.match(spec)
    if not m:
        raise ValueError(f"bad family {spec!r}; use P2:a-b or P1xP1:a-b,c-d")
    kind = m.group(1).lower()
    lo, hi = int(m.group(2)), int(m.group(3) or m.group(2))
    if kind == "p2":
        if m.group(4):
            raise ValueError("P2 families take a single degree range")
        return [projective_plane(d) for d in range(max(lo, 1), hi + 1)]
    if not m.group(4):
        raise ValueError("P1xP1 families need two ranges, e.g. P1xP1:1-3,1-3")
    lo2, hi2 = int(m.group(4)), int(m.group(5) or m.group(4))
    return [p1xp1(a, b) for a in range(max(lo, 1), hi + 1) for b in range(max(lo2, 1), hi2 + 1)]


def severi_table(family, deltas, engine: Engine | None = None, force: bool = False) -> list:
    """Rows {surface, chern, delta, count, advisory} for each surface and delta."""
    engine = engine or Engine()
    surfaces = parse_family(family) if isinstance(family, str) else list(family)
    rows = []
    for delta in deltas:
        for s in surfaces:
            count, adv = count_nodal(s, delta, engine, force)
            rows.append({"surface": str(s), "chern": chern_numbers(s), "delta": delta,
                         "count": count, "advisory": adv})
    return rows
