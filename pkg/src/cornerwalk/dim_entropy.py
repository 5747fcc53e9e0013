"""Entropy functionals of a cylinder measure and dimension estimates.

All entropies are in nats.  The information dimension of the exit measure is
estimated through the ratio sequence

    d_n = H_n / (-log l(n)),    H_n = - sum over generation-n cells of p log p,

whose liminf is the lower pointwise dimension for measures of this product
type.  ``entropy_ratio_dimension`` reports the plug-in ratios, Miller-Madow
corrected ratios (adding (m - 1)/(2 N) to H_n for m occupied cells), the
corrected final ratio as the estimate, and an uncertainty combining a
multinomial bootstrap with the spread of the last few ratios.

Synthetic tables (uniform and per-symbol product measures) let the pipeline
be calibrated against closed forms without running any walkers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cantor_geometry import ScaleSequence, as_address
from .errors import InsufficientCounts, ParameterError, UndefinedConditional
from .measure_table import DEFAULT_FLOOR, CylinderMeasureTable
from .stats import multinomial_resamples


def _plogp(p: np.ndarray) -> np.ndarray:
    """p * log p with the 0 log 0 = 0 convention."""
    out = np.zeros_like(p, dtype=float)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def _subtree_counts(table: CylinderMeasureTable, base, extension_gen: int) -> np.ndarray:
    """Counts of the generation-(g+extension_gen) cells below ``base``."""
    base = as_address(base)
    g = base.generation
    view = table.counts_at(g + extension_gen)
    width = 4**extension_gen
    code = base.code()
    return view[code * width : (code + 1) * width]


def entropy_hk(table: CylinderMeasureTable, base, k: int, floor: int = DEFAULT_FLOOR) -> float:
    """Normalized conditional entropy h_k(base) of the next k generations.

    h_k(L) = -(1/k) sum over generation-k extensions K of
    (w(LK)/w(L)) log(w(LK)/w(L)).  The count floor applies to the base cell
    only; empty descendant cells contribute 0 by convention.
    """
    if k < 1:
        raise ParameterError("extension generation k must be >= 1")
    base = as_address(base)
    if base.generation + k > table.depth:
        raise ParameterError("base generation + k exceeds the table depth")
    c_base = table.count_of(base)
    if c_base < floor:
        raise InsufficientCounts(
            f"base cell {base.word!r} holds {c_base} < floor {floor} walkers"
        )
    p = _subtree_counts(table, base, k) / c_base
    return float(-_plogp(p).sum() / k)


@dataclass(frozen=True)
class OscillationReport:
    """Spread of h_k over the generation-j cells below a base."""

    base: str
    j: int
    k: int
    floor: int
    values: tuple  # (word, h_k) pairs for bases above the floor
    delta: float
    bases_used: int


def delta_jk(
    table: CylinderMeasureTable, base, j: int, k: int, floor: int = DEFAULT_FLOOR
) -> OscillationReport:
    """Oscillation Delta_j^k(base) = max - min of h_k over generation-j cells.

    Only cells at or above the count floor enter; needs at least two such
    cells, otherwise :class:`InsufficientCounts`.
    """
    if j < 1 or k < 1:
        raise ParameterError("need j >= 1 and k >= 1")
    base = as_address(base)
    if base.generation + j + k > table.depth:
        raise ParameterError("base generation + j + k exceeds the table depth")
    bases = _subtree_counts(table, base, j)
    fine = _subtree_counts(table, base, j + k).reshape(4**j, 4**k)
    ok = bases >= floor
    if ok.sum() < 2:
        raise InsufficientCounts(
            f"only {int(ok.sum())} generation-{j} cells below {base.word!r} pass "
            f"the floor {floor}; the oscillation needs two"
        )
    p = fine[ok] / bases[ok, None]
    h = -_plogp(p).sum(axis=1) / k
    words = [
        base.concat(_word_from(code, j)).word for code in np.nonzero(ok)[0]
    ]
    return OscillationReport(
        base=base.word,
        j=j,
        k=k,
        floor=floor,
        values=tuple(zip(words, (float(v) for v in h))),
        delta=float(h.max() - h.min()),
        bases_used=int(ok.sum()),
    )


def _word_from(code: int, gen: int) -> str:
    from .cantor_geometry import CylinderAddress

    return CylinderAddress.from_code(int(code), gen).word


def chain_rule_gap(table: CylinderMeasureTable, base, j: int, k: int) -> float:
    """Residual of the exact split of h over two generation blocks.

    For plug-in probabilities the identity

        (j + k) h_{j+k}(I) = sum_J k (w(IJ)/w(I)) h_k(IJ) + j h_j(I)

    holds exactly (empty J contribute zero); the returned absolute residual
    is floating-point noise only.
    """
    if j < 1 or k < 1:
        raise ParameterError("need j >= 1 and k >= 1")
    base = as_address(base)
    if base.generation + j + k > table.depth:
        raise ParameterError("base generation + j + k exceeds the table depth")
    c_base = table.count_of(base)
    if c_base == 0:
        raise UndefinedConditional(f"cylinder {base.word!r} holds no walkers")
    cj = _subtree_counts(table, base, j).astype(float)
    cjk = _subtree_counts(table, base, j + k).reshape(4**j, 4**k).astype(float)

    p_full = cjk.ravel() / c_base
    lhs = -_plogp(p_full).sum()  # = (j + k) h_{j+k}(I)

    occupied = cj > 0
    cond = cjk[occupied] / cj[occupied, None]
    h_k_each = -_plogp(cond).sum(axis=1)  # = k * h_k(IJ)
    rhs = ((cj[occupied] / c_base) * h_k_each).sum() + (-_plogp(cj / c_base).sum())
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class EntropyReport:
    """Per-generation entropies and the dimension estimate they imply."""

    generations: tuple
    entropy: tuple
    entropy_corrected: tuple
    correction: tuple
    neg_log_side: tuple
    ratios: tuple
    ratios_plugin: tuple
    estimate: float
    bootstrap_se: float
    tail_spread: float
    uncertainty: float
    n_effective: int
    bootstrap_reps: int

    def as_dict(self) -> dict:
        return {
            "generations": list(self.generations),
            "entropy": list(self.entropy),
            "entropy_corrected": list(self.entropy_corrected),
            "correction": list(self.correction),
            "neg_log_side": list(self.neg_log_side),
            "ratios": list(self.ratios),
            "ratios_plugin": list(self.ratios_plugin),
            "estimate": self.estimate,
            "bootstrap_se": self.bootstrap_se,
            "tail_spread": self.tail_spread,
            "uncertainty": self.uncertainty,
            "n_effective": self.n_effective,
            "bootstrap_reps": self.bootstrap_reps,
        }


def entropy_ratio_dimension(
    table: CylinderMeasureTable,
    seq: ScaleSequence,
    bootstrap_reps: int = 200,
    seed: int = 0,
) -> EntropyReport:
    """Dimension estimate from the entropy-to-log-scale ratio sequence.

    The estimate is the corrected ratio at the deepest generation; its
    uncertainty combines (in quadrature) the bootstrap standard error of that
    ratio with half the range of the last three ratios, so both sampling
    noise and unconverged depth trends register.
    """
    if table.depth < 3:
        raise ParameterError("dimension extrapolation needs depth >= 3")
    n_eff = table.n_effective
    if n_eff == 0:
        raise InsufficientCounts("table holds no walkers")

    gens = tuple(range(1, table.depth + 1))
    entropy, corrected, correction, neg_log, ratios, ratios_plug = [], [], [], [], [], []
    for n in gens:
        view = table.counts_at(n)
        p = view / n_eff
        h = float(-_plogp(p).sum())
        m = int((view > 0).sum())
        corr = (m - 1) / (2.0 * n_eff)
        nl = -seq.log_sidelength(n)
        entropy.append(h)
        correction.append(corr)
        corrected.append(h + corr)
        neg_log.append(nl)
        ratios.append((h + corr) / nl)
        ratios_plug.append(h / nl)

    nl_last = neg_log[-1]
    if bootstrap_reps:
        rows = multinomial_resamples(table.counts, bootstrap_reps, seed)
        p = rows / n_eff
        h_rows = -_plogp(p).sum(axis=1)
        m_rows = (rows > 0).sum(axis=1)
        d_rows = (h_rows + (m_rows - 1) / (2.0 * n_eff)) / nl_last
        se = float(d_rows.std(ddof=1)) if bootstrap_reps > 1 else 0.0
    else:
        se = 0.0
    tail = ratios[-min(3, len(ratios)) :]
    spread = (max(tail) - min(tail)) / 2.0
    return EntropyReport(
        generations=gens,
        entropy=tuple(entropy),
        entropy_corrected=tuple(corrected),
        correction=tuple(correction),
        neg_log_side=tuple(neg_log),
        ratios=tuple(ratios),
        ratios_plugin=tuple(ratios_plug),
        estimate=ratios[-1],
        bootstrap_se=se,
        tail_spread=float(spread),
        uncertainty=float(math.hypot(se, spread)),
        n_effective=n_eff,
        bootstrap_reps=bootstrap_reps,
    )


def local_dimension_samples(
    table: CylinderMeasureTable,
    seq: ScaleSequence,
    n_samples: int,
    seed: int = 0,
) -> np.ndarray:
    """log w(I) / log l(depth) for addresses I drawn with probability w(I).

    For the uniform measure with a == 1/4 every sample equals 1 exactly; a
    measure supported on a single address gives 0.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be positive")
    n_eff = table.n_effective
    if n_eff == 0:
        raise InsufficientCounts("table holds no walkers")
    gen = np.random.default_rng(np.random.SeedSequence([seed, 0x10CA1]))
    codes = gen.choice(table.counts.size, size=n_samples, p=table.counts / n_eff)
    p = table.counts[codes] / n_eff
    return np.log(p) / math.log(seq.sidelength(table.depth))


def capacity_sequence(seq: ScaleSequence, n_max: int) -> np.ndarray:
    """n log 4 / (-log l(n)) for n = 1..n_max: the finite-generation capacities."""
    if n_max < 1:
        raise ParameterError("n_max must be positive")
    return np.array(
        [n * math.log(4.0) / (-seq.log_sidelength(n)) for n in range(1, n_max + 1)]
    )


def dim_cantor(seq: ScaleSequence, n_max: int = 10_000, window: int | None = None) -> float:
    """Dimension of the limit set: liminf of the capacity sequence.

    Evaluated as the minimum over the last ``window`` generations up to
    ``n_max`` (default: two full cycles of the scale values, so every phase
    of a periodic sequence is seen).
    """
    if window is None:
        window = 2 * len(seq.values)
    if not 1 <= window <= n_max:
        raise ParameterError("need 1 <= window <= n_max")
    caps = capacity_sequence(seq, n_max)
    return float(caps[-window:].min())


# -- synthetic tables --------------------------------------------------------


def make_uniform_table(seq: ScaleSequence, depth: int, per_cell: int) -> CylinderMeasureTable:
    """Synthetic table giving every depth cell exactly ``per_cell`` walkers."""
    if per_cell < 1:
        raise ParameterError("per_cell must be positive")
    if per_cell * 4**depth > 2**62:
        raise ParameterError("synthetic table would overflow int64 totals")
    counts = np.full(4**depth, per_cell, dtype=np.int64)
    return CylinderMeasureTable(
        depth=depth,
        counts=counts,
        seed=0,
        fingerprint="synthetic-uniform",
        meta={"engine": "synthetic", "law": "uniform", "sequence": {"kind": seq.kind, "values": list(seq.values)}},
    )


def make_product_table(
    seq: ScaleSequence, depth: int, weights, scale: int = 1
) -> CylinderMeasureTable:
    """Synthetic product measure: symbol d gets weight[d] at every node.

    Counts are exact integers, so every conditional law is identical across
    the tree: all h_k agree, every oscillation is exactly zero, and all
    conditional-ratio deviations vanish.
    """
    w = np.asarray(weights, dtype=np.int64)
    if w.shape != (4,) or (w <= 0).any():
        raise ParameterError("weights must be four positive integers")
    if scale < 1:
        raise ParameterError("scale must be positive")
    total = scale * int(w.sum()) ** depth
    if total > 2**62:
        raise ParameterError("synthetic table would overflow int64 totals")
    counts = np.array([scale], dtype=np.int64)
    for _ in range(depth):
        counts = (counts[:, None] * w[None, :]).ravel()
    return CylinderMeasureTable(
        depth=depth,
        counts=counts,
        seed=0,
        fingerprint="synthetic-product",
        meta={
            "engine": "synthetic",
            "law": "product",
            "weights": [int(v) for v in w],
            "sequence": {"kind": seq.kind, "values": list(seq.values)},
        },
    )
