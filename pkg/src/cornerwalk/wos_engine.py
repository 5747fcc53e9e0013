"""Walk-on-spheres sampler for harmonic measure seen from infinity.

A walker starts uniformly on a circle enclosing the set, jumps to a uniform
point on the sphere of radius ``distance to the depth-n approximation``
around its position, and is absorbed once that distance drops below
``absorb_epsilon``; the absorbing cylinder is the nearest depth-n square.
Because the average of a bounded harmonic function over a circle enclosing
the set equals its value at infinity, the uniform-circle start samples the
exit distribution from infinity exactly, with no dependence on the start
radius beyond Monte Carlo noise.

Walkers that drift past ``outer_radius`` are pulled back onto the circle of
radius ``reentry_radius`` with the exact harmonic-measure kernel of the disk
complement, so truncating the plane introduces no bias.  Draws come from
counter-based per-walker streams (:mod:`cornerwalk.rng`), which makes a
campaign a pure function of ``(sequence, params, n_walkers, seed)`` no matter
how it is batched or parallelized.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from . import rng as crng
from .cantor_geometry import CylinderAddress, ScaleSequence, fold_codes, fold_distance
from .errors import DiscardBudgetExceeded, ParameterError, StepLimitExceeded
from .measure_table import CylinderMeasureTable

_CENTER = 0.5
_ENCLOSE_RADIUS = math.sqrt(2.0) / 2.0  # circumradius of the unit square

DEFAULT_BATCH = 131072


@dataclass(frozen=True)
class WosParams:
    """Engine parameters for one campaign.

    ``absorb_epsilon`` defaults to ``l(depth) * 1e-3`` via :meth:`for_depth`.
    The start circle must enclose the unit square and sit inside the re-entry
    circle; walkers beyond ``outer_radius`` re-enter on ``reentry_radius``.
    """

    depth: int
    absorb_epsilon: float
    start_radius: float = 8.0
    outer_radius: float = 16.0
    reentry_radius: float = 8.0
    max_steps: int = 1_000_000
    discard_budget: float = 1e-3

    @classmethod
    def for_depth(cls, seq: ScaleSequence, depth: int, **overrides) -> "WosParams":
        eps = overrides.pop("absorb_epsilon", seq.sidelength(depth) * 1e-3)
        return cls(depth=depth, absorb_epsilon=eps, **overrides)

    def validate(self, seq: ScaleSequence) -> None:
        if self.depth < 0:
            raise ParameterError("depth must be >= 0")
        side = seq.sidelength(self.depth)
        if not (0.0 < self.absorb_epsilon < side / 4.0):
            raise ParameterError(
                f"absorb_epsilon must lie in (0, l(depth)/4) = (0, {side / 4.0}), "
                f"got {self.absorb_epsilon}"
            )
        if not self.reentry_radius < self.outer_radius:
            raise ParameterError("reentry_radius must be smaller than outer_radius")
        if not self.start_radius <= self.reentry_radius:
            raise ParameterError("start_radius must not exceed reentry_radius")
        if not self.reentry_radius > _ENCLOSE_RADIUS:
            raise ParameterError(
                "the unit square must lie strictly inside the re-entry circle"
            )
        if self.max_steps < 1:
            raise ParameterError("max_steps must be positive")
        if not (0.0 <= self.discard_budget < 1.0):
            raise ParameterError("discard_budget must lie in [0, 1)")


# -- re-entry kernel ---------------------------------------------------------


def reentry_density(phi: np.ndarray, rho: float) -> np.ndarray:
    """Angular density (relative to the walker's bearing) of the re-entry point.

    For a walker at distance ``rho * R`` from the circle center, the harmonic
    measure of the circle of radius R seen from outside has density

        (rho^2 - 1) / (2 pi (rho^2 - 2 rho cos(phi) + 1))

    over the angle offset phi in (-pi, pi].
    """
    phi = np.asarray(phi, dtype=float)
    return (rho**2 - 1.0) / (2.0 * np.pi * (rho**2 - 2.0 * rho * np.cos(phi) + 1.0))


def reentry_cdf(phi: np.ndarray, rho: float) -> np.ndarray:
    """Closed-form CDF of :func:`reentry_density` on (-pi, pi]."""
    phi = np.asarray(phi, dtype=float)
    inner = ((rho + 1.0) / (rho - 1.0)) * np.tan(phi / 2.0)
    out = 0.5 + np.arctan(inner) / np.pi
    return np.where(phi >= np.pi, 1.0, np.where(phi <= -np.pi, 0.0, out))


def _reentry_angles(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sample of the angle offset: one draw per walker."""
    return 2.0 * np.arctan(((rho - 1.0) / (rho + 1.0)) * np.tan(np.pi * (u - 0.5)))


def exterior_reentry(p, reentry_radius: float, stream: crng.RngStream):
    """Map a point outside the re-entry circle back onto it, harmonically.

    Draws one uniform from ``stream`` and returns the re-entry point sampled
    from the exact exit distribution of Brownian motion started at ``p`` on
    the complement of the disk.
    """
    x, y = float(p[0]), float(p[1])
    dx, dy = x - _CENTER, y - _CENTER
    dist = math.hypot(dx, dy)
    if dist <= reentry_radius:
        raise ParameterError("re-entry point must lie outside the re-entry circle")
    rho = dist / reentry_radius
    u = stream.uniform()
    phi = 2.0 * math.atan(((rho - 1.0) / (rho + 1.0)) * math.tan(math.pi * (u - 0.5)))
    theta = math.atan2(dy, dx) + phi
    return (
        _CENTER + reentry_radius * math.cos(theta),
        _CENTER + reentry_radius * math.sin(theta),
    )


# -- the sampler -------------------------------------------------------------


def _simulate_batch(seq, params, seed, lo, hi):
    """Walk walkers [lo, hi); returns (counts, discarded, total_steps)."""
    ratios = [float(a) for a in seq.ratios(params.depth)]
    eps = params.absorb_epsilon
    r_out2 = params.outer_radius**2
    r_in = params.reentry_radius

    idx = np.arange(lo, hi, dtype=np.int64)
    key = crng.walker_keys(seed, idx)
    ctr = np.zeros(idx.size, dtype=np.int64)
    theta = 2.0 * np.pi * crng.uniform_batch(key, ctr, crng.CHANNEL_ANGLE)
    ctr += 1
    x = _CENTER + params.start_radius * np.cos(theta)
    y = _CENTER + params.start_radius * np.sin(theta)
    steps = np.zeros(idx.size, dtype=np.int64)

    counts = np.zeros(4**params.depth, dtype=np.int64)
    discarded = 0
    total_steps = 0

    while x.size:
        d = fold_distance(x, y, ratios)
        hit = d < eps
        if hit.any():
            codes = fold_codes(x[hit], y[hit], ratios)
            counts += np.bincount(codes, minlength=counts.size)
            keep = ~hit
            x, y, key, ctr, steps, d = (
                x[keep], y[keep], key[keep], ctr[keep], steps[keep], d[keep],
            )
            if not x.size:
                break
        tired = steps >= params.max_steps
        if tired.any():
            discarded += int(tired.sum())
            keep = ~tired
            x, y, key, ctr, steps, d = (
                x[keep], y[keep], key[keep], ctr[keep], steps[keep], d[keep],
            )
            if not x.size:
                break
        total_steps += x.size
        theta = 2.0 * np.pi * crng.uniform_batch(key, ctr, crng.CHANNEL_ANGLE)
        x += d * np.cos(theta)
        y += d * np.sin(theta)
        far = (x - _CENTER) ** 2 + (y - _CENTER) ** 2 > r_out2
        if far.any():
            fx = x[far] - _CENTER
            fy = y[far] - _CENTER
            rho = np.hypot(fx, fy) / r_in
            u = crng.uniform_batch(key[far], ctr[far], crng.CHANNEL_REENTRY)
            ang = np.arctan2(fy, fx) + _reentry_angles(rho, u)
            x[far] = _CENTER + r_in * np.cos(ang)
            y[far] = _CENTER + r_in * np.sin(ang)
        ctr += 1
        steps += 1

    return counts, discarded, total_steps


def sample_exit(seq: ScaleSequence, params: WosParams, stream: crng.RngStream) -> CylinderAddress:
    """Run a single walker to absorption and return its cylinder.

    The walker is ``stream.stream_index`` of the campaign keyed by
    ``stream.seed``; this is the batched kernel run on one walker, so it
    agrees bit for bit with the corresponding row of :func:`run_campaign`.
    Raises :class:`StepLimitExceeded` if the walker exhausts ``max_steps``.
    """
    params.validate(seq)
    counts, discarded, _ = _simulate_batch(
        seq, params, stream.seed, stream.stream_index, stream.stream_index + 1
    )
    if discarded:
        raise StepLimitExceeded(
            f"walker {stream.stream_index} exceeded {params.max_steps} steps"
        )
    code = int(np.nonzero(counts)[0][0])
    return CylinderAddress.from_code(code, params.depth)


def run_campaign(
    seq: ScaleSequence,
    params: WosParams,
    n_walkers: int,
    seed: int,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH,
) -> CylinderMeasureTable:
    """Estimate the exit distribution over depth-``params.depth`` cylinders.

    Returns a :class:`CylinderMeasureTable` whose counts are a pure function
    of ``(seq, params, n_walkers, seed)``; batching and worker count do not
    enter.  Walkers that exceed ``max_steps`` are discarded and counted; the
    campaign fails with :class:`DiscardBudgetExceeded` if their fraction
    exceeds ``params.discard_budget``.
    """
    params.validate(seq)
    if n_walkers < 1:
        raise ParameterError("n_walkers must be positive")

    spans = [
        (lo, min(lo + batch_size, n_walkers)) for lo in range(0, n_walkers, batch_size)
    ]
    counts = np.zeros(4**params.depth, dtype=np.int64)
    discarded = 0
    total_steps = 0
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_simulate_batch, seq, params, seed, lo, hi)
                for lo, hi in spans
            ]
            for fut in futures:
                c, d, s = fut.result()
                counts += c
                discarded += d
                total_steps += s
    else:
        for lo, hi in spans:
            c, d, s = _simulate_batch(seq, params, seed, lo, hi)
            counts += c
            discarded += d
            total_steps += s

    if discarded > params.discard_budget * n_walkers:
        raise DiscardBudgetExceeded(
            f"{discarded} of {n_walkers} walkers hit the step limit, "
            f"beyond the budget fraction {params.discard_budget}"
        )

    meta = {
        "engine": "wos",
        "params": asdict(params),
        "sequence": {"kind": seq.kind, "values": list(seq.values)},
        "total_steps": int(total_steps),
    }
    return CylinderMeasureTable(
        depth=params.depth,
        counts=counts,
        seed=seed,
        discarded=discarded,
        fingerprint=campaign_fingerprint(seq, params),
        oracle=False,
        meta=meta,
    )


def campaign_fingerprint(seq: ScaleSequence, params: WosParams) -> str:
    import hashlib
    import json

    payload = json.dumps(
        ["wos", seq.fingerprint(), {k: repr(v) for k, v in asdict(params).items()}],
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
