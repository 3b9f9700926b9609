"""
Universal polynomials in (x, y, z, t) = (L^2, L.K, K^2, c_2) fitted exactly
to localization values on a library of toric instances.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Sequence

from . import __version__
from .algebra import MultiPoly
from .bps import InconsistencyError
from .hilb import Localizer
from .linalg import bareiss_solve, independent_rows, rank
from .toric import SurfaceInstance, chern_numbers, monomial_exponents, monomial_row

log = logging.getLogger(__name__)

MIN_HELD_OUT = 5


class InsufficientGeneratorsError(ValueError):
    """The library's monomial evaluation matrix is rank deficient (or too small to verify)."""


@dataclass(frozen=True)
class MonomialBasis:
    degree: int

    @property
    def exponents(self) -> list:
        return monomial_exponents(self.degree)

    def __len__(self):
        return comb(self.degree + 4, 4)

    def row(self, inst) -> list:
        return monomial_row(chern_numbers(inst), self.exponents)

    def polynomial(self, coeffs: Sequence) -> MultiPoly:
        return MultiPoly({tuple(e) + (0,): c for e, c in zip(self.exponents, coeffs)})


@dataclass
class FitResult:
    i: int
    delta: int
    polynomial: MultiPoly
    instances_used: list
    residual_check: list = field(default_factory=list)  # (instance, localized value, fitted value)


def dedupe(library: Sequence[SurfaceInstance]) -> list:
    seen, out = set(), []
    for inst in library:
        if inst.key not in seen:
            seen.add(inst.key)
            out.append(inst)
    return out


def library_hash(library: Sequence[SurfaceInstance]) -> str:
    text = json.dumps([[list(map(list, k)) for k in inst.key] for inst in dedupe(library)])
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _values(localizer: Localizer, library, delta: int, i: int) -> list:
    localizer.prime(library, delta, delta)
    return [localizer.relative_hilb_euler_all(inst, delta)[i] for inst in library]


def fit_universal(i: int, delta: int, library: Sequence[SurfaceInstance],
                  localizer: Localizer | None = None) -> FitResult:
    """
    The unique polynomial of degree <= i agreeing with e(Hilb^i(C/P^delta))
    on the library.  The first independent rows determine it; every other
    row is a held-out check that must match exactly.
    """
    if not 0 <= i <= delta:
        raise ValueError("need 0 <= i <= delta")
    localizer = localizer or Localizer(kmax=delta, order=delta)
    library = dedupe(library)
    basis = MonomialBasis(i)
    rows = [basis.row(inst) for inst in library]
    pivots = independent_rows(rows)
    if len(pivots) < len(basis):
        raise InsufficientGeneratorsError(
            f"degree-{i} evaluation matrix has rank {len(pivots)} < {len(basis)}"
        )
    held = [k for k in range(len(library)) if k not in set(pivots)]
    if len(held) < MIN_HELD_OUT or all(library[k].connected for k in held):
        raise InsufficientGeneratorsError(
            f"need >= {MIN_HELD_OUT} held-out instances including a disjoint union, have {len(held)}"
        )
    values = _values(localizer, library, delta, i)
    coeffs, _ = bareiss_solve([rows[k] for k in pivots], [values[k] for k in pivots])
    poly = basis.polynomial(coeffs)
    checks = []
    for k in held:
        fitted = poly.evaluate(chern_numbers(library[k])._asdict())
        checks.append((library[k], values[k], fitted))
        if fitted != values[k]:
            raise InconsistencyError(
                f"e(Hilb^{i}) for delta={delta}: held-out {library[k]} localizes to {values[k]}"
                f" but the fit gives {fitted}"
            )
    log.info("fitted e(Hilb^%d), delta=%d from %d instances, %d checks", i, delta, len(pivots), len(held))
    return FitResult(i, delta, poly, [library[k] for k in pivots], checks)


def fit_report(i: int, delta: int, library: Sequence[SurfaceInstance],
               localizer: Localizer | None = None) -> dict:
    """Rank and conditioning diagnostics; runs the fit when the matrix has full rank."""
    raw = len(library)
    library = dedupe(library)
    basis = MonomialBasis(i)
    rows = [basis.row(inst) for inst in library]
    pivots = independent_rows(rows)
    report = {
        "i": i,
        "delta": delta,
        "columns": len(basis),
        "instances": [str(inst) for inst in library],
        "duplicates_removed": raw - len(library),
        "rank": len(pivots),
        "full_rank": len(pivots) == len(basis),
        "library_hash": library_hash(library),
    }
    if not report["full_rank"]:
        report["deficiency"] = len(basis) - len(pivots)
        return report
    _, bareiss_pivots = bareiss_solve([rows[k] for k in pivots], [0] * len(pivots))
    report["pivot_bits"] = [abs(p).bit_length() for p in bareiss_pivots]
    report["determinant"] = str(abs(bareiss_pivots[-1]))
    try:
        result = fit_universal(i, delta, library, localizer)
    except (InsufficientGeneratorsError, InconsistencyError) as exc:
        report["error"] = str(exc)
        return report
    report["polynomial"] = str(result.polynomial)
    report["held_out"] = [
        {"instance": str(inst), "value": str(v), "fitted": str(f), "ok": v == f}
        for inst, v, f in result.residual_check
    ]
    return report


def matrix_rank(library: Sequence[SurfaceInstance], degree: int) -> int:
    basis = MonomialBasis(degree)
    return rank([basis.row(inst) for inst in dedupe(library)])


# JSON term lists

def poly_to_terms(poly: MultiPoly) -> list:
    out = []
    for exps, c in poly.sorted_terms():
        if exps[4]:
            raise ValueError("only polynomials in x, y, z, t can be serialized")
        out.append({"exponents": list(exps[:4]), "coeff_num": str(c.numerator), "coeff_den": str(c.denominator)})
    return out


def poly_from_terms(terms: list) -> MultiPoly:
    out = {}
    for term in terms:
        exps = tuple(int(e) for e in term["exponents"])
        if len(exps) != 4:
            raise ValueError(f"expected 4 exponents, got {exps}")
        out[exps + (0,)] = Fraction(int(term["coeff_num"]), int(term["coeff_den"]))
    return MultiPoly(out)


class FitCache:
    """On-disk JSON cache of fitted polynomials keyed by (i, delta, library hash, version)."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path else None
        self._entries = None

    @staticmethod
    def key(i: int, delta: int, lib_hash: str) -> str:
        return f"{i}:{delta}:{lib_hash}:{__version__}"

    def _load(self) -> dict:
        if self._entries is None:
            self._entries = {}
            if self.path and self.path.exists():
                try:
                    self._entries = json.loads(self.path.read_text()).get("entries", {})
                except (json.JSONDecodeError, AttributeError):
                    log.warning("ignoring unreadable cache %s", self.path)
        return self._entries

    def get(self, i: int, delta: int, lib_hash: str) -> MultiPoly | None:
        entry = self._load().get(self.key(i, delta, lib_hash))
        return poly_from_terms(entry["terms"]) if entry else None

    def put(self, i: int, delta: int, lib_hash: str, poly: MultiPoly) -> None:
        entries = self._load()
        entries[self.key(i, delta, lib_hash)] = {
            "i": i, "delta": delta, "library_hash": lib_hash, "version": __version__,
            "terms": poly_to_terms(poly),
        }
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"entries": entries}, indent=1, sort_keys=True))
            tmp.replace(self.path)

    def entries(self) -> dict:
        return dict(self._load())

    def clear(self) -> int:
        n = len(self._load())
        self._entries = {}
        if self.path and self.path.exists():
            self.path.unlink()
        return n
