"""Count tables over cylinders and the ratio statistics built on them.

A campaign records one absorption per walker at the finest generation
(``depth``).  Coarser generations are always obtained by summing the fine
table over descendants, so the tower property

    count(I) = sum over children J of count(IJ)

holds by construction and every generation view describes the same walkers.

Ratio statistics exclude cells below a count floor (default 100) rather than
imputing them; reports say how many cells entered the scan.  Uncertainty for
single proportions is a Wilson interval, for ratio quantities a percentile
bootstrap over multinomial resamples of the walkers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cantor_geometry import CylinderAddress, as_address
from .errors import AddressError, InsufficientCounts, ParameterError, UndefinedConditional
from .stats import multinomial_resamples, percentile_interval, wilson_interval

DEFAULT_FLOOR = 100


@dataclass(eq=False)
class CylinderMeasureTable:
    """Absorption counts over the ``4**depth`` cylinders of one campaign."""

    depth: int
    counts: np.ndarray
    seed: int
    discarded: int = 0
    fingerprint: str = ""
    oracle: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (4**self.depth,):
            raise ParameterError(
                f"counts must have length 4**depth = {4**self.depth}, "
                f"got shape {self.counts.shape}"
            )
        if (self.counts < 0).any():
            raise ParameterError("counts must be nonnegative")
        self._views = {self.depth: self.counts}

    # -- access --------------------------------------------------------------

    @property
    def n_effective(self) -> int:
        return int(self.counts.sum())

    def counts_at(self, generation: int) -> np.ndarray:
        """Counts over generation-``generation`` cylinders (summed descendants)."""
        if not 0 <= generation <= self.depth:
            raise ParameterError(
                f"generation must lie in 0..{self.depth}, got {generation}"
            )
        if generation not in self._views:
            self._views[generation] = self.counts.reshape(4**generation, -1).sum(axis=1)
        return self._views[generation]

    def count_of(self, address) -> int:
        address = as_address(address)
        if address.generation > self.depth:
            raise AddressError(
                f"address {address.word!r} is deeper than the table ({self.depth})"
            )
        return int(self.counts_at(address.generation)[address.code()])

    def probability(self, address, z: float = 1.96):
        """Estimated cylinder mass with a Wilson interval: (p, lo, hi)."""
        k = self.count_of(address)
        n = self.n_effective
        lo, hi = wilson_interval(k, n, z)
        return (k / n if n else 0.0), lo, hi

    def conditional(self, base, extension) -> float:
        """omega(base + extension) / omega(base).

        Raises :class:`UndefinedConditional` when the base cell is empty.
        """
        base = as_address(base)
        extension = as_address(extension)
        denom = self.count_of(base)
        if denom == 0:
            raise UndefinedConditional(f"cylinder {base.word!r} holds no walkers")
        return self.count_of(base.concat(extension)) / denom

    def equals(self, other: "CylinderMeasureTable") -> bool:
        return (
            self.depth == other.depth
            and self.seed == other.seed
            and self.discarded == other.discarded
            and self.fingerprint == other.fingerprint
            and self.oracle == other.oracle
            and bool(np.array_equal(self.counts, other.counts))
        )

    # -- serialization ---------------------------------------------------------

    def save(self, base_path) -> tuple:
        """Write ``<base>.csv`` (all generations) and ``<base>.json`` (header).

        The CSV carries one row per cylinder of every generation 0..depth with
        the estimated mass and its Wilson interval; the JSON header carries
        depth, totals, seed, fingerprint and the oracle flag, enough to reload
        the table exactly.
        """
        base = _strip_suffix(base_path)
        csv_path = base.with_suffix(".csv")
        json_path = base.with_suffix(".json")
        n = self.n_effective
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["address", "count", "probability", "wilson_lo", "wilson_hi"])
            for gen in range(self.depth + 1):
                view = self.counts_at(gen)
                for code in range(view.size):
                    k = int(view[code])
                    lo, hi = wilson_interval(k, n)
                    writer.writerow(
                        [
                            CylinderAddress.from_code(code, gen).word,
                            k,
                            repr(k / n if n else 0.0),
                            repr(lo),
                            repr(hi),
                        ]
                    )
        header = {
            "depth": self.depth,
            "n_effective": n,
            "discarded": self.discarded,
            "seed": self.seed,
            "fingerprint": self.fingerprint,
            "oracle": self.oracle,
            "meta": self.meta,
        }
        with open(json_path, "w") as fh:
            json.dump(header, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return csv_path, json_path

    @classmethod
    def load(cls, base_path) -> "CylinderMeasureTable":
        base = _strip_suffix(base_path)
        with open(base.with_suffix(".json")) as fh:
            header = json.load(fh)
        depth = int(header["depth"])
        counts = np.zeros(4**depth, dtype=np.int64)
        with open(base.with_suffix(".csv"), newline="") as fh:
            for row in csv.DictReader(fh):
                if len(row["address"]) == depth:
                    counts[CylinderAddress(row["address"]).code()] = int(row["count"])
        table = cls(
            depth=depth,
            counts=counts,
            seed=int(header["seed"]),
            discarded=int(header["discarded"]),
            fingerprint=header["fingerprint"],
            oracle=bool(header["oracle"]),
            meta=header.get("meta", {}),
        )
        if table.n_effective != int(header["n_effective"]):
            raise ParameterError(
                f"count rows sum to {table.n_effective} but header says "
                f"{header['n_effective']}"
            )
        return table


def _strip_suffix(p) -> Path:
    p = Path(p)
    return p.with_suffix("") if p.suffix in (".csv", ".json") else p


# -- ratio scans -------------------------------------------------------------


@dataclass(frozen=True)
class RatioScanReport:
    """Worst-case conditional-ratio deviation over a (n, k, m) scan."""

    n: int
    k: int
    m: int
    floor: int
    max_deviation: float
    pairs_used: int
    bootstrap_lo: float | None = None
    bootstrap_hi: float | None = None
    bootstrap_reps: int = 0


def _harnack_deviation(counts_rows: np.ndarray, n: int, k: int, m: int, floor: int):
    """Max |(w(IJL)/w(IJ)) / (w(I'JL)/w(I'J)) - 1| per row of depth counts.

    ``counts_rows`` has shape (reps, 4**depth); returns (max_dev[reps],
    pairs_used[reps]) with NaN where no pair passed the floor.
    """
    reps = counts_rows.shape[0]
    base = counts_rows.reshape(reps, 4 ** (n + k), -1).sum(axis=2)
    base = base.reshape(reps, 4**n, 4**k)
    fine = counts_rows.reshape(reps, 4 ** (n + k + m), -1).sum(axis=2)
    fine = fine.reshape(reps, 4**n, 4**k, 4**m)
    valid = (fine >= floor) & (base >= floor)[:, :, :, None]
    cond = fine / np.maximum(base, 1)[:, :, :, None]
    # pair axis: ratios of conditionals across distinct bases I, I'
    ratio = cond[:, :, None] / np.where(cond[:, None] > 0, cond[:, None], np.nan)
    ok = valid[:, :, None] & valid[:, None]
    dev = np.where(ok, np.abs(ratio - 1.0), np.nan)
    flat = dev.reshape(reps, -1)
    any_ok = ok.reshape(reps, -1).any(axis=1)
    out = np.full(reps, np.nan)
    out[any_ok] = np.nanmax(flat[any_ok], axis=1)
    return out, ok.reshape(reps, -1).sum(axis=1)


def harnack_ratio_scan(
    table: CylinderMeasureTable,
    n: int,
    k: int,
    m: int,
    floor: int = DEFAULT_FLOOR,
    bootstrap_reps: int = 0,
    seed: int = 0,
) -> RatioScanReport:
    """Scan all base pairs I, I' of generation n, offsets J of generation k
    and tails L of generation m for the worst conditional-ratio deviation.

    Only cells whose base and joint counts reach ``floor`` enter the scan;
    raises :class:`InsufficientCounts` if nothing passes.  The pair space
    includes I = I', where the deviation vanishes identically, so the maximum
    is always well defined over a nonempty scan.
    """
    if n < 0 or k < 0 or m < 1:
        raise ParameterError("need n >= 0, k >= 0, m >= 1")
    if floor < 1:
        raise ParameterError("count floor must be at least 1")
    if n + k + m > table.depth:
        raise ParameterError(
            f"scan needs n + k + m <= depth, got {n}+{k}+{m} > {table.depth}"
        )
    dev, pairs = _harnack_deviation(table.counts[None, :], n, k, m, floor)
    if np.isnan(dev[0]):
        raise InsufficientCounts(
            f"no (I, I', J, L) combination passes the count floor {floor}"
        )
    lo = hi = None
    if bootstrap_reps:
        rows = multinomial_resamples(table.counts, bootstrap_reps, seed)
        devs = np.concatenate(
            [
                _harnack_deviation(chunk, n, k, m, floor)[0]
                for chunk in np.array_split(rows, max(1, bootstrap_reps // 128))
            ]
        )
        devs = devs[~np.isnan(devs)]
        if devs.size:
            lo, hi = percentile_interval(devs)
    return RatioScanReport(
        n=n,
        k=k,
        m=m,
        floor=floor,
        max_deviation=float(dev[0]),
        pairs_used=int(pairs[0]),
        bootstrap_lo=lo,
        bootstrap_hi=hi,
        bootstrap_reps=bootstrap_reps,
    )


@dataclass(frozen=True)
class CodimCompareReport:
    """Worst deviation between parent-conditional masses of two tables."""

    max_deviation: float
    cells_used: int
    bootstrap_lo: float | None = None
    bootstrap_hi: float | None = None
    bootstrap_reps: int = 0
    per_generation: tuple = ()


def _codim_deviation(rows_a: np.ndarray, rows_b: np.ndarray, depth: int, floor: int):
    reps = rows_a.shape[0]
    worst = np.full(reps, np.nan)
    used = np.zeros(reps, dtype=np.int64)
    per_gen = np.full((reps, depth), np.nan)
    for gen in range(1, depth + 1):
        ca = rows_a.reshape(reps, 4**gen, -1).sum(axis=2)
        cb = rows_b.reshape(reps, 4**gen, -1).sum(axis=2)
        pa = ca.reshape(reps, 4 ** (gen - 1), 4).sum(axis=2)
        pb = cb.reshape(reps, 4 ** (gen - 1), 4).sum(axis=2)
        pa = np.repeat(pa, 4, axis=1)
        pb = np.repeat(pb, 4, axis=1)
        ok = (ca >= floor) & (cb >= floor) & (pa >= floor) & (pb >= floor)
        # float casts: count products overflow int64 on large synthetic tables
        ratio = (ca.astype(float) * pb) / np.maximum(pa.astype(float) * cb, 1.0)
        dev = np.where(ok, np.abs(ratio - 1.0), np.nan)
        has = ok.any(axis=1)
        gen_max = np.full(reps, np.nan)
        gen_max[has] = np.nanmax(dev[has], axis=1)
        per_gen[:, gen - 1] = gen_max
        used += ok.sum(axis=1)
        take = has & (np.isnan(worst) | (gen_max > worst))
        worst[take] = gen_max[take]
    return worst, used, per_gen


def codim_compare(
    table_a: CylinderMeasureTable,
    table_b: CylinderMeasureTable,
    floor: int = DEFAULT_FLOOR,
    bootstrap_reps: int = 0,
    seed: int = 0,
) -> CodimCompareReport:
    """Compare parent-conditional cylinder masses of two equal-depth tables.

    For every address I of generation 1..depth present in both tables above
    the floor, the statistic is |(w_a(I)/w_a(parent)) / (w_b(I)/w_b(parent)) - 1|;
    the report carries the maximum, per-generation maxima, and a percentile
    bootstrap interval obtained by resampling both tables independently.
    """
    if table_a.depth != table_b.depth:
        raise ParameterError("tables must share a depth to be compared")
    if floor < 1:
        raise ParameterError("count floor must be at least 1")
    worst, used, per_gen = _codim_deviation(
        table_a.counts[None, :], table_b.counts[None, :], table_a.depth, floor
    )
    if np.isnan(worst[0]):
        raise InsufficientCounts(
            f"no address passes the count floor {floor} in both tables"
        )
    lo = hi = None
    if bootstrap_reps:
        ra = multinomial_resamples(table_a.counts, bootstrap_reps, seed)
        rb = multinomial_resamples(table_b.counts, bootstrap_reps, seed + 1)
        vals = _codim_deviation(ra, rb, table_a.depth, floor)[0]
        vals = vals[~np.isnan(vals)]
        if vals.size:
            lo, hi = percentile_interval(vals)
    return CodimCompareReport(
        max_deviation=float(worst[0]),
        cells_used=int(used[0]),
        bootstrap_lo=lo,
        bootstrap_hi=hi,
        bootstrap_reps=bootstrap_reps,
        per_generation=tuple(float(v) for v in per_gen[0]),
    )


@dataclass(frozen=True)
class QuasiInvarianceReport:
    """Largest conditional-mass ratio across bases: a plug-in comparability constant."""

    n: int
    k: int
    floor: int
    max_ratio: float
    cells_used: int
    bootstrap_lo: float | None = None
    bootstrap_hi: float | None = None
    bootstrap_reps: int = 0


def _quasi_ratio(rows: np.ndarray, n: int, k: int, floor: int):
    reps = rows.shape[0]
    cn = rows.reshape(reps, 4**n, -1).sum(axis=2)
    cnk = rows.reshape(reps, 4 ** (n + k), -1).sum(axis=2).reshape(reps, 4**n, 4**k)
    valid = (cnk >= floor) & (cn >= floor)[:, :, None]
    cond = cnk / np.maximum(cn, 1)[:, :, None]
    ratio = cond[:, :, None] / np.where(cond[:, None] > 0, cond[:, None], np.nan)
    ok = valid[:, :, None] & valid[:, None]
    vals = np.where(ok, ratio, np.nan).reshape(reps, -1)
    has = ok.reshape(reps, -1).any(axis=1)
    out = np.full(reps, np.nan)
    out[has] = np.nanmax(vals[has], axis=1)
    return out, ok.reshape(reps, -1).sum(axis=1)


def quasi_invariance_check(
    table: CylinderMeasureTable,
    n: int,
    k: int,
    floor: int = DEFAULT_FLOOR,
    bootstrap_reps: int = 0,
    seed: int = 0,
) -> QuasiInvarianceReport:
    """Max over I, I' of generation n and J of generation k of
    (w(IJ)/w(I)) / (w(I'J)/w(I')), the empirical comparability constant.

    Returns 1 exactly for the trivial edges n = 0 or k = 0.
    """
    if n < 0 or k < 0:
        raise ParameterError("generations must be nonnegative")
    if floor < 1:
        raise ParameterError("count floor must be at least 1")
    if n + k > table.depth:
        raise ParameterError(f"n + k must not exceed depth {table.depth}")
    ratios, cells = _quasi_ratio(table.counts[None, :], n, k, floor)
    if np.isnan(ratios[0]):
        raise InsufficientCounts(f"no (I, I', J) combination passes the floor {floor}")
    lo = hi = None
    if bootstrap_reps:
        rows = multinomial_resamples(table.counts, bootstrap_reps, seed)
        vals = np.concatenate(
            [
                _quasi_ratio(chunk, n, k, floor)[0]
                for chunk in np.array_split(rows, max(1, bootstrap_reps // 128))
            ]
        )
        vals = vals[~np.isnan(vals)]
        if vals.size:
            lo, hi = percentile_interval(vals)
    return QuasiInvarianceReport(
        n=n,
        k=k,
        floor=floor,
        max_ratio=float(ratios[0]),
        cells_used=int(cells[0]),
        bootstrap_lo=lo,
        bootstrap_hi=hi,
        bootstrap_reps=bootstrap_reps,
    )
