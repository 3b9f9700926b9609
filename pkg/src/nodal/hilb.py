"""
Tautological integrals on Hilbert schemes of points of toric surfaces by
torus localization.

For a surface S with polarization L the building block is

    f_S(k; w) = int_{S^[k]} c(T S^[k]) * prod_b (w + x_b) / (1 + w + x_b)

where x_b are the Chern roots of L^[k]; numerator and denominator are the
two sums over c_j(L^[k]) twisted by O(1) on P^delta (w = hyperplane class).
The Euler characteristic of the relative Hilbert scheme of i points on the
universal curve over P^delta is then

    [w^delta] (1 + w)^(delta+1) [q^i] prod_components sum_k f_S(k; w) q^k.

Fixed points of S^[k] are tuples of monomial ideals, one partition per
torus-fixed point of S.  After specializing the equivariant parameters to an
integer sample (s, t), weights are numbers and the cohomological degree is
tracked by a grading variable e (every weight is scaled by e); the integral
is the e^(2k) part divided by the tangent Euler class.  Since 1/(1+w+e x)
expands as sum_n (-e x)^n (1+w)^(-n-1), the e^(2k) part is assembled from
elementary symmetric functions of the weights and binomial coefficients of
w^p (1+w)^(-N), so only integers appear before the final division.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterator, Sequence

from .bps import InconsistencyError
from .toric import PolarizedToricSurface, SurfaceInstance

log = logging.getLogger(__name__)

Partition = tuple


class DegenerateSample(ValueError):
    """A tangent weight vanishes at the chosen sample; draw another one."""


class ResampleExhaustedError(RuntimeError):
    pass


# partitions and fixed points

@lru_cache(maxsize=None)
def partitions(n: int, largest: int | None = None) -> tuple:
    """Partitions of n in reverse lexicographic order, e.g. (2,) before (1, 1)."""
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _compositions(n: int, parts: int) -> tuple:
    if parts == 0:
        return ((),) if n == 0 else ()
    out = []
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


def fixed_points(surface: PolarizedToricSurface, n: int) -> Iterator[tuple]:
    """All tuples of partitions (one per vertex) of total size n, deterministic order."""
    for sizes in _compositions(n, len(surface.vertices)):
        yield from product(*(partitions(k) for k in sizes))


def count_fixed_points(n_vertices: int, n: int) -> int:
    """[q^n] (sum_k p(k) q^k)^n_vertices, computed independently of the enumeration."""
    p = [len(partitions(k)) for k in range(n + 1)]
    series = [1] + [0] * n
    for _ in range(n_vertices):
        series = [sum(series[i] * p[m - i] for i in range(m + 1)) for m in range(n + 1)]
    return series[n]


def transpose(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > j) for j in range(lam[0]))


def boxes(lam: Partition) -> list:
    """Boxes (a, b): row b has lam[b] boxes, a counts along the row."""
    return [(a, b) for b, part in enumerate(lam) for a in range(part)]


# weights

@dataclass(frozen=True)
class WeightSystem:
    """Linear forms (c_s, c_t) meaning c_s*s + c_t*t."""

    tangent: tuple
    taut: tuple

    def evaluate(self, sample) -> tuple:
        s, t = sample
        return (
            tuple(a * s + b * t for a, b in self.tangent),
            tuple(a * s + b * t for a, b in self.taut),
        )


def _lin(a, u, b, v):
    return (a * u[0] + b * v[0], a * u[1] + b * v[1])


@lru_cache(maxsize=None)
def weight_system(tangent: tuple, chi: tuple, lam: Partition) -> WeightSystem:
    """
    Weights at the fixed point given by ``lam`` at a surface fixed point with
    tangent weights (v, w) and L-weight chi.

    The box (a, b) is the monomial x^a y^b, where x, y are the coordinate
    functions of weights -v, -w; it contributes chi - a v - b w to L^[n].
    The tangent space to the Hilbert scheme contributes, per box with arm A
    (along v) and leg B (along w), the weights (A+1) v - B w and -A v + (B+1) w.
    """
    v, w = tangent
    lam_t = transpose(lam)
    tan, taut = [], []
    for a, b in boxes(lam):
        arm = lam[b] - a - 1
        leg = lam_t[a] - b - 1
        tan.append(_lin(arm + 1, v, -leg, w))
        tan.append(_lin(-arm, v, leg + 1, w))
        taut.append((chi[0] - a * v[0] - b * w[0], chi[1] - a * v[1] - b * w[1]))
    return WeightSystem(tuple(tan), tuple(taut))


def fixed_point_weights(surface: PolarizedToricSurface, lams: Sequence[Partition]) -> WeightSystem:
    tan, taut = [], []
    for fp, lam in zip(surface.fixed_points, lams):
        ws = weight_system(fp.tangent, fp.chi, lam)
        tan.extend(ws.tangent)
        taut.extend(ws.taut)
    return WeightSystem(tuple(tan), tuple(taut))


# the localization sum

def _elementary(values: Sequence[int]) -> list:
    """Coefficients of prod (1 + v e)."""
    out = [1]
    for v in values:
        out = [a + v * b for a, b in zip(out + [0], [0] + out)]
    return out


@lru_cache(maxsize=None)
def _omega_table(k: int, order: int) -> tuple:
    """
    Entries (m, n, coeffs) with coeffs[j] = [w^j] w^(k-m) (1+w)^(-(k+n)),
    for 0 <= m <= k, 0 <= n <= 2k - m.
    """
    table = []
    for m in range(k + 1):
        p = k - m
        for n in range(2 * k - m + 1):
            big_n = k + n
            cs = []
            for j in range(order + 1):
                r = j - p
                if r < 0:
                    cs.append(0)
                elif big_n == 0:
                    cs.append(1 if r == 0 else 0)
                else:
                    cs.append((-1) ** r * comb(big_n + r - 1, r))
            if any(cs):
                table.append((m, n, tuple(cs)))
    return tuple(table)


def fixed_point_numerator(tangent: Sequence[int], taut: Sequence[int], order: int) -> tuple:
    """
    Integer w-coefficients (up to ``order``) of the degree-2k part of the
    integrand at one fixed point, and the tangent Euler class.
    """
    k = len(taut)
    a = _elementary(tangent)
    e = _elementary(taut)
    r = [1] + [0] * (2 * k)  # 1 / prod(1 + x e), integral since the constant term is 1
    for n in range(1, 2 * k + 1):
        r[n] = -sum(e[m] * r[n - m] for m in range(1, min(n, k) + 1))
    out = [0] * (order + 1)
    top = 2 * k
    for m, n, cs in _omega_table(k, order):
        c = e[m] * r[n] * a[top - m - n]
        if c:
            for j, b in enumerate(cs):
                if b:
                    out[j] += c * b
    return tuple(out), a[top]


def local_factor(surface: PolarizedToricSurface, k: int, delta: int, sample) -> list:
    """
    f_S(k; w) truncated after w^delta, at one integer sample (s, t).

    Raises DegenerateSample if some tangent weight vanishes at the sample.
    """
    acc = [Fraction(0)] * (delta + 1)
    for lams in fixed_points(surface, k):
        tan, taut = fixed_point_weights(surface, lams).evaluate(sample)
        num, euler = fixed_point_numerator(tan, taut, delta)
        if euler == 0:
            raise DegenerateSample(f"tangent weight vanishes at {sample} on {surface}")
        for j, c in enumerate(num):
            if c:
                acc[j] += Fraction(c, euler)
    return acc


def fixed_point_contributions(surface, k: int, delta: int, sample) -> Iterator[tuple]:
    """Per-fixed-point terms of local_factor, for diagnostics."""
    for lams in fixed_points(surface, k):
        tan, taut = fixed_point_weights(surface, lams).evaluate(sample)
        num, euler = fixed_point_numerator(tan, taut, delta)
        yield lams, [Fraction(c, euler) for c in num]


def euler_integral(surface: PolarizedToricSurface, n: int, sample) -> Fraction:
    """int_{S^[n]} c_{2n}(T S^[n]) by localization (the L-dependent factors set to 1)."""
    total = Fraction(0)
    for lams in fixed_points(surface, n):
        tan, _ = fixed_point_weights(surface, lams).evaluate(sample)
        a = _elementary(tan)
        if a[2 * n] == 0:
            raise DegenerateSample(f"tangent weight vanishes at {sample} on {surface}")
        total += Fraction(a[2 * n], a[2 * n])
    return total


# samples

def sample_is_degenerate(surface: PolarizedToricSurface, kmax: int, sample) -> bool:
    s, t = sample
    for fp in surface.fixed_points:
        for k in range(1, kmax + 1):
            for lam in partitions(k):
                for a, b in weight_system(fp.tangent, fp.chi, lam).tangent:
                    if a * s + b * t == 0:
                        return True
    return False


def draw_samples(surface: PolarizedToricSurface, kmax: int, count: int, seed: int,
                 bound: int = 10**6, max_tries: int = 100) -> list:
    """
    ``count`` distinct non-degenerate integer samples, from an RNG seeded by
    (seed, polygon) so that results do not depend on evaluation order.
    """
    rng = random.Random(f"{seed}|{surface.key}")
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries * count:
            raise ResampleExhaustedError(f"no non-degenerate sample found for {surface}")
        sample = (rng.randint(-bound, bound), rng.randint(-bound, bound))
        if sample in out or sample_is_degenerate(surface, kmax, sample):
            continue
        out.append(sample)
    return out


def local_factors(surface: PolarizedToricSurface, kmax: int, order: int, sample_count: int = 3,
                  seed: int = 0) -> tuple:
    """
    f_S(k; w) for k = 0..kmax, truncated after w^order, checked to agree
    across ``sample_count`` samples.
    """
    samples = draw_samples(surface, kmax, sample_count, seed)
    results = []
    for sample in samples:
        res = []
        for k in range(kmax + 1):
            res.append(tuple(local_factor(surface, k, order, sample)))
        results.append(tuple(res))
        if results[0] != results[-1]:
            raise InconsistencyError(
                f"localization on {surface} depends on the sample: {samples[0]} vs {sample}"
            )
    log.debug("local factors of %s agree at samples %s", surface, samples)
    return results[0]


def _local_factors_job(args):
    return local_factors(*args)


class Localizer:
    """
    Caches f_S(k; w) per polygon, computing at least k <= kmax and w-order
    <= order and deepening on demand.  ``workers`` > 1 evaluates new polygons
    in a process pool; results do not depend on it.
    """

    def __init__(self, kmax: int = 1, order: int = 1, sample_count: int = 3, seed: int = 0,
                 workers: int = 1):
        if sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        self.kmax = kmax
        self.order = order
        self.sample_count = sample_count
        self.seed = seed
        self.workers = workers
        self._cache: dict = {}  # polygon key -> (kmax, order, factors)

    def _missing(self, surface, kmax, order) -> bool:
        hit = self._cache.get(surface.key)
        return hit is None or hit[0] < kmax or hit[1] < order

    def prime(self, instances: Sequence[SurfaceInstance], kmax: int | None = None,
              order: int | None = None) -> None:
        kmax = max(self.kmax, kmax or 0)
        order = max(self.order, order or 0)
        todo = {}
        for inst in instances:
            for c in inst.components:
                if self._missing(c, kmax, order):
                    todo.setdefault(c.key, c)
        if not todo:
            return
        surfaces = [todo[key] for key in sorted(todo)]
        args = [(s, kmax, order, self.sample_count, self.seed) for s in surfaces]
        if self.workers > 1 and len(surfaces) > 1:
            with ProcessPoolExecutor(self.workers) as pool:
                results = list(pool.map(_local_factors_job, args))
        else:
            results = [local_factors(*a) for a in args]
        for s, res in zip(surfaces, results):
            self._cache[s.key] = (kmax, order, res)

    def factors(self, surface: PolarizedToricSurface, kmax: int, order: int) -> list:
        if self._missing(surface, kmax, order):
            self.prime([SurfaceInstance((surface,))], kmax, order)
        res = self._cache[surface.key][2]
        return [list(f[: order + 1]) for f in res[: kmax + 1]]

    def relative_hilb_euler_all(self, inst: SurfaceInstance, delta: int) -> list:
        """e(Hilb^i(C/P^delta)) for i = 0..delta."""
        # prod over components of sum_k f(k; w) q^k, as [q^i][w^j]
        total = [[Fraction(0)] * (delta + 1) for _ in range(delta + 1)]
        total[0][0] = Fraction(1)
        for comp in inst.components:
            f = self.factors(comp, delta, delta)
            new = [[Fraction(0)] * (delta + 1) for _ in range(delta + 1)]
            for i in range(delta + 1):
                for k in range(i + 1):
                    _mul_acc(new[i], total[i - k], f[k], delta)
            total = new
        ones = [comb(delta + 1, j) for j in range(delta + 1)]  # (1 + w)^(delta+1)
        return [sum(ones[delta - j] * c[j] for j in range(delta + 1)) for c in total]

    def relative_hilb_euler(self, inst: SurfaceInstance, i: int, delta: int) -> Fraction:
        if not 0 <= i <= delta:
            raise ValueError("need 0 <= i <= delta")
        return self.relative_hilb_euler_all(inst, delta)[i]


def _mul_acc(out: list, a: list, b: list, order: int) -> None:
    for p, x in enumerate(a):
        if x:
            for q in range(order + 1 - p):
                if b[q]:
                    out[p + q] += x * b[q]


def relative_hilb_euler(inst: SurfaceInstance, i: int, delta: int, sample_count: int = 3,
                        seed: int = 0) -> Fraction:
    """One-shot e(Hilb^i(C/P^delta)) for an instance."""
    loc = Localizer(kmax=delta, order=delta, sample_count=sample_count, seed=seed)
    return loc.relative_hilb_euler(inst, i, delta)
