"""
BPS calculus: rewrite the Euler characteristics of Hilbert schemes of points
on a curve (or a family of curves) as if the curve were a union of smooth
curves of genera r = g - delta .. g, and read off the node count.

Writing the series as sum_i e_i q^(i+1-g) = sum_s n_{g-s} q^(1-g+s) (1-q)^(2g-2s-2),
the numbers n_{g-s} are obtained by a triangular recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .algebra import (
    G,
    X,
    Y,
    MultiPoly,
    TruncSeries,
    binom_symbolic,
    series_compose,
    series_reversion,
)


class InconsistencyError(RuntimeError):
    """Two independent derivations of the same quantity disagreed."""


@dataclass(frozen=True)
class EulerSeries:
    """e_0 .. e_delta for a curve of arithmetic genus ``genus`` (or a delta-dimensional family).

    ``genus`` is a concrete number or the symbol G; values are Fractions/ints
    or MultiPolys.
    """

    delta: int
    genus: object
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.delta + 1:
            raise ValueError(f"need {self.delta + 1} values, got {len(self.values)}")


@dataclass(frozen=True)
class BPSSpectrum:
    """Entries (s, n_{g-s}) for s = 0 .. delta."""

    entries: tuple

    def n(self, s: int):
        """n_{g-s}."""
        return self.entries[s][1]

    def values(self) -> list:
        return [v for _, v in self.entries]

    @property
    def delta(self) -> int:
        return len(self.entries) - 1


def sym_euler(k: int, r):
    """
    e(Sym^k of a smooth genus-r curve) = [q^k] (1-q)^(2r-2)
    = (-1)^k binomial(2r-2, k); ``r`` may be symbolic.
    """
    if k < 0:
        return 0
    top = 2 * r - 2
    acc = 1
    for j in range(k):
        acc = acc * (top - j)
    return acc * Fraction((-1) ** k, factorial(k))


def bps_transform(series: EulerSeries) -> BPSSpectrum:
    """Triangular recursion n_{g-r} = e_r - sum_{s<r} n_{g-s} e(Sym^{r-s} Sigma_{g-s})."""
    g = series.genus
    ns = []
    for r, e_r in enumerate(series.values):
        acc = e_r
        for s in range(r):
            acc = acc - ns[s] * sym_euler(r - s, g - s)
        ns.append(acc)
    return BPSSpectrum(tuple(enumerate(ns)))


def bps_transform_substitution(series: EulerSeries) -> BPSSpectrum:
    """
    Same spectrum by the change of variable u = q/(1-q)^2:
    (1-q)^(2-2g) * sum e_r q^r = sum_s n_{g-s} u^s, re-expanded in u.
    Genus must be G or a number; coefficients are returned as MultiPolys.
    """
    d = series.delta
    if d == 0:
        return BPSSpectrum(((0, series.values[0]),))
    g = MultiPoly.coerce(series.genus)
    e = TruncSeries([MultiPoly.coerce(v) for v in series.values], d)
    if g.is_constant():
        prefactor = binom_symbolic(0, 2 - 2 * g.constant_value(), d)
    else:
        # prefactor (1-q)^(2-2g), any genus that is affine in G
        a = g.coeff({"g": 1})
        b = g.coeff()
        if g != G * a + b:
            raise ValueError("genus must be affine in g")
        prefactor = binom_symbolic(-2 * a, 2 - 2 * b, d)
    lhs = e * prefactor
    u = TruncSeries([0] + [k for k in range(1, d + 1)], d)  # q/(1-q)^2 = sum k q^k
    q_of_u = series_reversion(u)
    in_u = series_compose(lhs, q_of_u)
    return BPSSpectrum(tuple(enumerate(in_u.coeffs)))


def reexpand(spectrum: BPSSpectrum, genus, order: int) -> list:
    """e_r = sum_s n_{g-s} e(Sym^{r-s} Sigma_{g-s}) for r = 0..order."""
    out = []
    for r in range(order + 1):
        acc = 0
        for s, n in spectrum.entries:
            if s <= r:
                acc = acc + n * sym_euler(r - s, genus - s)
        out.append(acc)
    return out


def nodal_model_series(g, delta: int, order: int) -> list:
    """Model e(C^[k]) of a delta-nodal curve: sum_j binomial(delta, j) e(Sym^{k-j} Sigma_{g-j})."""
    return [
        sum((comb(delta, j) * sym_euler(k - j, g - j) for j in range(min(k, delta) + 1)), 0)
        for k in range(order + 1)
    ]


#: g = 1 + (L^2 + L.K_S)/2
GENUS_IN_CHERN = 1 + (X + Y) * Fraction(1, 2)


def extract_node_count(series: EulerSeries, check: bool = True) -> MultiPoly:
    """
    n_{g-delta} for an Euler series with symbolic genus G, after putting
    g = 1 + (x + y)/2.

    With ``check`` the result is also computed through the u-substitution
    and the two must coincide.
    """
    if series.genus != G:
        raise ValueError("extract_node_count expects the symbolic genus G")
    spec = bps_transform(series)
    top = MultiPoly.coerce(spec.n(series.delta))
    if check:
        other = MultiPoly.coerce(bps_transform_substitution(series).n(series.delta))
        if other != top:
            raise InconsistencyError(f"BPS recursion and u-substitution disagree: {top} vs {other}")
    return top.subs(g=GENUS_IN_CHERN)


def spectrum_from_values(values: Sequence) -> BPSSpectrum:
    return BPSSpectrum(tuple(enumerate(values)))
