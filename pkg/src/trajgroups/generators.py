"""Deterministic synthetic datasets: a boids-style flock and adversarial layouts.

The flock follows an adapted NetLogo-style update (separate / align / cohere
within a perception radius, bounded turn rate, border repulsion instead of
wrap-around, seeded heading jitter). The two adversarial generators realise
the worst-case layouts: diagonal fly-bys that force quadratically many
proximity-component changes per sweep, and a stationary chain overflown by
staggered movers that forces cubically many maximal groups.
"""

from __future__ import annotations

import math

import numpy as np

from .model import Dataset, InvalidParameter

TWO_PI = 2.0 * math.pi


def gen_flock(
    n: int,
    tau: int,
    seed: int,
    world_size: float = 70.0,
    cohesion: float = 0.03,
    separation: float = 0.5,
    alignment: float = 0.08,
    max_turn: float = 0.35,
    jitter: float = 0.05,
    *,
    vision: float = 8.0,
    min_sep: float = 1.2,
    speed: float = 1.0,
    spawn_radius: float | None = None,
    heading_spread: float = TWO_PI,
) -> Dataset:
    """Boids-style trajectories on a bounded world; same seed, same dataset."""
    if n < 1 or tau < 1:
        raise InvalidParameter(f"need n >= 1 and tau >= 1, got n={n}, tau={tau}")
    if world_size <= 0 or not np.isfinite(world_size):
        raise InvalidParameter(f"world_size must be positive, got {world_size}")
    for name, v in (("cohesion", cohesion), ("separation", separation),
                    ("alignment", alignment), ("max_turn", max_turn), ("jitter", jitter)):
        if v < 0 or not np.isfinite(v):
            raise InvalidParameter(f"{name} must be non-negative and finite, got {v}")
    rng = np.random.default_rng(seed)
    center = world_size / 2.0
    radius = 0.35 * world_size if spawn_radius is None else spawn_radius
    pos = center + rng.uniform(-radius, radius, size=(n, 2))
    theta = rng.uniform(0.0, 1.0, size=n) * heading_spread

    margin = max(vision, 2.0)
    out = np.empty((n, tau + 1, 2))
    out[:, 0, :] = pos
    for step in range(tau):
        head = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        # pairwise squared distances without the (n, n, 2) temporary
        sq = (pos * pos).sum(axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (pos @ pos.T)
        np.fill_diagonal(d2, np.inf)
        nbr = (d2 <= vision * vision).astype(float)
        cnt = np.maximum(nbr.sum(axis=1), 1.0)[:, None]
        toward = (nbr @ pos) / cnt - pos * (nbr.sum(axis=1) > 0)[:, None]
        close = (d2 <= min_sep * min_sep).astype(float)
        away = close.sum(axis=1)[:, None] * pos - close @ pos
        mean_head = (nbr @ head) / cnt
        steer = cohesion * toward + separation * away + alignment * mean_head
        inward = np.clip(margin - pos, 0.0, None) - np.clip(pos - (world_size - margin), 0.0, None)
        steer = steer + 0.3 * inward
        desired = head + steer
        norms = np.hypot(desired[:, 0], desired[:, 1])
        target = np.where(norms > 1e-12, np.arctan2(desired[:, 1], desired[:, 0]), theta)
        dtheta = (target - theta + math.pi) % TWO_PI - math.pi
        dtheta = np.clip(dtheta, -max_turn, max_turn)
        if jitter > 0:
            dtheta = dtheta + jitter * rng.standard_normal(n)
        theta = theta + dtheta
        pos = pos + speed * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        pos = np.clip(pos, 0.0, world_size)
        out[:, step + 1, :] = pos

    ids = [f"b{i:03d}" for i in range(n)]
    return Dataset(ids, np.arange(tau + 1, dtype=float), out)


def gen_reeb_quadratic(n: int, tau: int) -> Dataset:
    """Diagonal fly-by layout: every right-mover meets every down-mover per sweep.

    Half the entities start on the line y = x below the origin and move right,
    the other half start above and move down; the pair (r_j, d_l) coincides
    during the sweep, giving (n/2)^2 meetings and so ~n^2/2 proximity-component
    changes per sweep. The construction repeats every three timesteps
    (sweep, right-mover return, down-mover return; the two-phase return keeps
    every pair at distance >= 2 outside sweeps). Intended for eps < 0.7.
    """
    if n < 2 or n % 2:
        raise InvalidParameter(f"n must be even and >= 2, got {n}")
    if tau < 2:
        raise InvalidParameter(f"tau must be >= 2, got {tau}")
    half = n // 2
    k = float(n + 2)  # sweep travel; meetings at fractions (j + l) / k in (0, 1)
    times = np.arange(tau + 1, dtype=float)
    out = np.empty((n, tau + 1, 2))
    for ti in range(tau + 1):
        phase = ti % 3
        for j in range(1, half + 1):
            x, y = -float(j), -float(j)
            if phase == 1:
                x += k
            out[j - 1, ti] = (x, y)
        for l in range(1, half + 1):
            x, y = float(l), float(l)
            if phase in (1, 2):
                y -= k
            out[half + l - 1, ti] = (x, y)
    ids = [f"r{j}" for j in range(1, half + 1)] + [f"d{l}" for l in range(1, half + 1)]
    return Dataset(ids, times, out)


# layout constants for the cubic construction; designed for eps = 1
CUBIC_EPS = 1.0
_R = 1.5                     # stationary chain spacing, < 2*eps
_NU = 1.9                    # mover height: reach w = sqrt(4 - nu^2) < r/2
_MU = 0.005                  # stagger between consecutive mover gaps
_W = math.sqrt(4.0 * CUBIC_EPS * CUBIC_EPS - _NU * _NU)


def gen_groups_cubic(n: int, tau: int) -> Dataset:
    """Stationary chain overflown by staggered movers: ~n^3 maximal groups.

    3n/4 stationary entities sit r apart on y = 0 (one chain component);
    n/4 movers fly over at heights ±nu, trailing one another by
    r + (n/4 - i)*mu, so each sweep decomposes into rounds of k merges
    followed by k splits against the chain. Alternating mover heights keep
    the movers pairwise disconnected. Repeats every three timesteps
    (sweep, lift-away return, drop). Use with eps = CUBIC_EPS.
    """
    if n < 4 or n % 4:
        raise InvalidParameter(f"n must be divisible by 4 and >= 4, got {n}")
    if tau < 2:
        raise InvalidParameter(f"tau must be >= 2, got {tau}")
    k = n // 4
    n_s = 3 * n // 4
    chain_end = (n_s - 1) * _R
    lead = 2.0 * _R
    margin = 2.0 * _R

    starts = np.empty(k)
    x = -lead
    for i in range(k):
        starts[i] = x
        x -= _R + (k - (i + 1)) * _MU
    span = -float(starts[-1]) - lead
    travel = lead + chain_end + _W + margin + span
    high = 20.0 + travel
    ys = np.where(np.arange(k) % 2 == 0, _NU, -_NU)

    times = np.arange(tau + 1, dtype=float)
    out = np.empty((n, tau + 1, 2))
    for j in range(n_s):
        out[j, :, 0] = j * _R
        out[j, :, 1] = 0.0
    for ti in range(tau + 1):
        phase = ti % 3
        for i in range(k):
            if phase == 0:
                x, y = starts[i], ys[i]
            elif phase == 1:
                x, y = starts[i] + travel, ys[i]
            else:
                x, y = starts[i], math.copysign(high, ys[i])
            out[n_s + i, ti] = (x, y)
    ids = [f"s{j}" for j in range(n_s)] + [f"m{i}" for i in range(k)]
    return Dataset(ids, times, out)
