"""Event-driven simulation of the six-tick order-book window at scale n.

The book keeps one signed order count per absolute price tick (buys
positive, sells negative).  Six Poisson order flows act relative to the
current bid and ask, which the interior pair (w, x) determines, and stale
orders two or more ticks behind the market cancel at per-order rate
theta/sqrt(n).  One event engine serves both the stopped book, run until a
bracketing queue empties, and the free-running variant whose clocks follow
the interior region regardless of the bracketing queues' values.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model_params import (
    DerivedConstants,
    ModelParams,
    Region,
    gh_transform,
    region_of,
)

REGION_ORDER: tuple[Region, ...] = tuple(Region)

_REGION_INDEX = {r: i for i, r in enumerate(REGION_ORDER)}

SERIES_COLUMNS = ("u", "v", "w", "x", "y", "z", "g", "h")

_ONE_TICK = frozenset(
    (Region.NE, Region.SE_plus, Region.SE, Region.SE_minus, Region.SW)
)
_TWO_TICK = frozenset((Region.E, Region.S))

# bid and ask window positions implied by each interior configuration
_BID_ASK = {
    Region.NE: (3, 4),
    Region.E: (2, 4),
    Region.SE_plus: (2, 3),
    Region.SE: (2, 3),
    Region.SE_minus: (2, 3),
    Region.S: (1, 3),
    Region.SW: (1, 2),
    Region.O: (1, 4),
}


class HorizonExceededError(RuntimeError):
    """Raised when no renewal occurs before the configured scaled horizon."""


@dataclass(frozen=True)
class SimConfig:
    """Configuration for a single simulated path.

    n
        Scale parameter; the chain runs in unscaled time up to n * horizon
        and queue values are reported divided by sqrt(n).
    initial_scaled_state
        Scaled six-queue start (u, v, w, x, y, z) with v > 0, y < 0,
        u >= 0, z <= 0.  Unscaled starting queues are round(sqrt(n) * value)
        with ties toward zero.
    horizon
        Scaled time to simulate.  Zero is allowed and records only the
        initial state.
    seed
        64-bit seed; independent paths derive their streams from
        (seed, path_index).
    grid_step
        Spacing of the scaled recording grid.
    """

    n: int
    initial_scaled_state: tuple[float, ...] = (0.75, 0.75, 0.0, 0.0, -0.75, -0.75)
    horizon: float = 1.0
    seed: int = 0
    grid_step: float = 0.01

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "n", operator.index(self.n))
        except TypeError:
            raise ValueError(f"n must be an integer, got {self.n!r}") from None
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        try:
            object.__setattr__(self, "seed", operator.index(self.seed))
        except TypeError:
            raise ValueError(f"seed must be an integer, got {self.seed!r}") from None
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        state = tuple(float(q) for q in self.initial_scaled_state)
        if len(state) != 6:
            raise ValueError(
                f"initial_scaled_state needs six values, got {len(state)}"
            )
        if not all(math.isfinite(q) for q in state):
            raise ValueError(f"initial_scaled_state must be finite, got {state}")
        u, v, w, x, y, z = state
        if v <= 0:
            raise ValueError(f"initial scaled v must be positive, got {v}")
        if y >= 0:
            raise ValueError(f"initial scaled y must be negative, got {y}")
        if u < 0:
            raise ValueError(f"initial scaled u must be nonnegative, got {u}")
        if z > 0:
            raise ValueError(f"initial scaled z must be nonpositive, got {z}")
        region_of(w, x)  # rejects the crossed-book quadrant
        object.__setattr__(self, "initial_scaled_state", state)
        horizon = float(self.horizon)
        if not math.isfinite(horizon) or horizon < 0:
            raise ValueError(f"horizon must be finite and >= 0, got {self.horizon}")
        object.__setattr__(self, "horizon", horizon)
        step = float(self.grid_step)
        if not math.isfinite(step) or step <= 0:
            raise ValueError(f"grid_step must be positive, got {self.grid_step}")
        object.__setattr__(self, "grid_step", step)


def _zero_occupation() -> dict[Region, float]:
    return {r: 0.0 for r in REGION_ORDER}


@dataclass
class LOBState:
    """Mutable state of one simulated book.

    queues maps absolute price ticks to signed order counts; window_origin
    is the absolute tick currently playing the leftmost (U) role; clock is
    unscaled elapsed time; occupation accumulates unscaled time per interior
    region and sums to clock exactly at event times.
    """

    queues: dict[int, int]
    window_origin: int = 0
    clock: float = 0.0
    occupation: dict[Region, float] = field(default_factory=_zero_occupation)
    event_count: int = 0

    def window(self) -> tuple[int, int, int, int, int, int]:
        """Signed counts of the six window ticks, leftmost first."""
        o = self.window_origin
        q = self.queues
        return tuple(q.get(o + i, 0) for i in range(6))


@dataclass(frozen=True)
class RenewalRecord:
    """Outcome of running a book until a bracketing queue emptied.

    direction is "down" when the v-role queue vanished first and "up" when
    the y-role queue did; s_hat is the scaled stopping time; the state is
    the six scaled queue values at that instant, in pre-shift roles.
    """

    direction: str
    s_hat: float
    state_at_renewal: tuple[float, ...]


@dataclass(frozen=True)
class ScaledPathBundle:
    """Scaled path recorded on a fixed grid.

    series columns follow SERIES_COLUMNS: the six scaled queues, then the
    drift-free coordinate g and the collapsing coordinate h.  occupations
    columns follow REGION_ORDER and hold the fluid-scaled occupation times
    (unscaled region time divided by n) at each grid instant.
    """

    times: np.ndarray
    series: np.ndarray
    occupations: np.ndarray
    n: int


def path_stream(seed: int, path_index: int = 0) -> np.random.Generator:
    """Counter-based RNG stream for one path, split from (seed, path_index)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(path_index,))
    return np.random.Generator(np.random.Philox(ss))


def _primitive_rates(params: DerivedConstants) -> tuple[float, float, float]:
    """Recover (lambda0, theta_b, theta_s), which determine the constants."""
    lambda0 = params.c + params.mu1
    theta_b = params.lambda2 * params.mu1 / (params.kappa_L * params.lambda1)
    theta_s = -params.mu2 * params.lambda1 / (params.kappa_R * params.mu1)
    return lambda0, theta_b, theta_s


def _params_from_constants(params: DerivedConstants) -> ModelParams:
    lambda0, theta_b, theta_s = _primitive_rates(params)
    return ModelParams(
        a=params.lambda1 / lambda0 + 1.0,
        b=params.mu1 / params.mu0 + 1.0,
        lambda0=lambda0,
        theta_b=theta_b,
        theta_s=theta_s,
    )


@lru_cache(maxsize=16)
def _rate_table(params: DerivedConstants, n: int):
    lambda0, theta_b, theta_s = _primitive_rates(params)
    # fixed order-flow rates, in the sampling order documented in _next_event
    fixed = (
        lambda0,
        params.mu0,
        params.lambda1,
        params.lambda2,
        params.mu1,
        params.mu2,
    )
    sqrt_n = math.sqrt(n)
    return fixed, sum(fixed), theta_b / sqrt_n, theta_s / sqrt_n


def _next_event(queues, origin, rt, rng):
    """Sample the next transition by competing exponential clocks.

    Returns (dt, tick, delta, region, category).  Categories 0..5 are the
    fixed flows (market buy, market sell, limit buys one/two ticks below the
    ask, limit sells one/two ticks above the bid); 6 and 7 are buy- and
    sell-side cancellations.  The stream is consumed in a fixed order (one
    exponential, then one uniform), so runs are reproducible.
    """
    fixed, fixed_total, tb, ts = rt
    w = queues.get(origin + 2, 0)
    x = queues.get(origin + 3, 0)
    region = region_of(w, x)
    bid_rel, ask_rel = _BID_ASK[region]
    bid = origin + bid_rel
    ask = origin + ask_rel
    cancel_bid = bid - 2
    cancel_ask = ask + 2
    buy_pool = 0
    sell_pool = 0
    for tick, count in queues.items():
        if count > 0:
            if tick <= cancel_bid:
                buy_pool += count
        elif count < 0 and tick >= cancel_ask:
            sell_pool -= count
    total = fixed_total + tb * buy_pool + ts * sell_pool
    dt = rng.standard_exponential() / total
    u = rng.random() * total

    if u < fixed_total:
        if u < fixed[0]:
            return dt, ask, 1, region, 0
        u -= fixed[0]
        if u < fixed[1]:
            return dt, bid, -1, region, 1
        u -= fixed[1]
        if u < fixed[2]:
            return dt, ask - 1, 1, region, 2
        u -= fixed[2]
        if u < fixed[3]:
            return dt, ask - 2, 1, region, 3
        u -= fixed[3]
        if u < fixed[4]:
            return dt, bid + 1, -1, region, 4
        return dt, bid + 2, -1, region, 5

    u -= fixed_total
    if u < tb * buy_pool:
        remaining = u / tb
        chosen = cancel_bid
        for tick in sorted(queues):
            count = queues[tick]
            if count > 0 and tick <= cancel_bid:
                chosen = tick
                if remaining < count:
                    break
                remaining -= count
        return dt, chosen, -1, region, 6
    remaining = (u - tb * buy_pool) / ts
    chosen = cancel_ask
    for tick in sorted(queues):
        count = queues[tick]
        if count < 0 and tick >= cancel_ask:
            chosen = tick
            if remaining < -count:
                break
            remaining += count
    return dt, chosen, 1, region, 7


_ADD_NEEDS_SELLS = {0}          # market buy executes against resting sells
_ADD_NEEDS_NO_SELLS = {2, 3}    # limit buys must not land on resting sells
_SUB_NEEDS_BUYS = {1}           # market sell executes against resting buys
_SUB_NEEDS_NO_BUYS = {4, 5}     # limit sells must not land on resting buys


def _fault(message: str):
    raise RuntimeError(f"model violation: {message}")


def _apply_event(state: LOBState, dt, tick, delta, region, category, enforce):
    queues = state.queues
    before = queues.get(tick, 0)
    if enforce:
        if category in _ADD_NEEDS_SELLS and before >= 0:
            _fault(f"market buy at tick {tick} found no sell orders")
        if category in _ADD_NEEDS_NO_SELLS and before < 0:
            _fault(f"limit buy at tick {tick} would join sell orders")
        if category in _SUB_NEEDS_BUYS and before <= 0:
            _fault(f"market sell at tick {tick} found no buy orders")
        if category in _SUB_NEEDS_NO_BUYS and before > 0:
            _fault(f"limit sell at tick {tick} would join buy orders")
    queues[tick] = before + delta
    state.occupation[region] += dt
    state.clock += dt
    state.event_count += 1


def step_event(
    state: LOBState, params: DerivedConstants, n: int, rng: np.random.Generator
) -> LOBState:
    """Advance the book by one sampled transition, in place.

    Competing exponential clocks: market buy/sell at the ask/bid, limit buys
    one and two ticks below the ask, limit sells one and two ticks above the
    bid, and per-order cancellation of buys at ticks <= bid - 2 and sells at
    ticks >= ask + 2 at rates theta/sqrt(n).  Exactly one queue changes by
    one order; the holding time lands in the occupation slot of the interior
    region that was in force.  Returns the same state object.
    """
    o = state.window_origin
    if state.queues.get(o + 1, 0) <= 0 or state.queues.get(o + 4, 0) >= 0:
        _fault("bracketing queues no longer bracket; step past a renewal")
    rt = _rate_table(params, n)
    dt, tick, delta, region, category = _next_event(state.queues, o, rt, rng)
    _apply_event(state, dt, tick, delta, region, category, True)
    return state


def _round_half_to_zero(value: float) -> int:
    if value >= 0:
        return math.ceil(value - 0.5)
    return math.floor(value + 0.5)


def initial_state(config: SimConfig) -> LOBState:
    """Build the unscaled starting book from the scaled configuration.

    Queues start at round(sqrt(n) * scaled value) with ties toward zero;
    raises if n is too small for the bracketing queues to resolve to their
    required signs.
    """
    sqrt_n = math.sqrt(config.n)
    counts = [_round_half_to_zero(sqrt_n * q) for q in config.initial_scaled_state]
    if counts[1] < 1:
        raise ValueError(
            f"n={config.n} rounds the scaled v start {config.initial_scaled_state[1]}"
            " to an empty queue; increase n or the start value"
        )
    if counts[4] > -1:
        raise ValueError(
            f"n={config.n} rounds the scaled y start {config.initial_scaled_state[4]}"
            " to an empty queue; increase n or the start value"
        )
    return LOBState(queues={i: c for i, c in enumerate(counts)})


def _run_to_renewal(state, params, n, limit, rng):
    """Step a book until v or y empties; relabel the window; return a record.

    The record keeps the pre-shift roles.  The state is mutated past the
    renewal: after a down move the window origin moves one tick left (the
    old u, v, w, x queues take the v, w, x, y roles), after an up move one
    tick right.
    """
    rt = _rate_table(params, n)
    queues = state.queues
    while True:
        o = state.window_origin
        dt, tick, delta, region, category = _next_event(queues, o, rt, rng)
        if state.clock + dt > limit:
            raise HorizonExceededError(
                f"no renewal by scaled time {limit / n}; last clock"
                f" {state.clock / n}"
            )
        _apply_event(state, dt, tick, delta, region, category, True)
        v = queues.get(o + 1, 0)
        y = queues.get(o + 4, 0)
        if v == 0 or y == 0:
            sqrt_n = math.sqrt(n)
            record = RenewalRecord(
                direction="down" if v == 0 else "up",
                s_hat=state.clock / n,
                state_at_renewal=tuple(
                    queues.get(o + i, 0) / sqrt_n for i in range(6)
                ),
            )
            state.window_origin = o - 1 if v == 0 else o + 1
            return record


def run_until_renewal(
    config: SimConfig, params: DerivedConstants, path_index: int = 0
) -> RenewalRecord:
    """Simulate one book until a bracketing queue first empties.

    Returns the direction ("down" when v vanished, "up" when y vanished),
    the scaled stopping time, and the six scaled queue values at that
    instant in pre-shift roles.  Raises HorizonExceededError if no renewal
    occurs by the scaled horizon.
    """
    state = initial_state(config)
    rng = path_stream(config.seed, path_index)
    limit = config.n * config.horizon
    return _run_to_renewal(state, params, config.n, limit, rng)


def run_scaled_path(
    config: SimConfig, params: DerivedConstants, path_index: int = 0
) -> ScaledPathBundle:
    """Record the free-running system on the scaled grid.

    The clocks follow the interior region exactly as in the stopped book,
    but the bracketing queues' values never stop or redirect the flow, so
    the path continues through renewals.  Each grid instant reports the
    state after the last event at or before it, and occupation times are
    accumulated exactly up to the grid instant.
    """
    n = config.n
    state = initial_state(config)
    rng = path_stream(config.seed, path_index)
    rt = _rate_table(params, n)
    mparams = _params_from_constants(params)
    sqrt_n = math.sqrt(n)

    steps = int(math.floor(config.horizon / config.grid_step + 1e-9))
    times = np.arange(steps + 1, dtype=float) * config.grid_step
    if config.horizon - times[-1] > 1e-9 * max(1.0, config.horizon):
        times = np.append(times, config.horizon)
    grid = times * n

    m = len(times)
    series = np.empty((m, 8))
    occupations = np.empty((m, len(REGION_ORDER)))
    queues = state.queues
    occ = state.occupation
    gi = 0
    while gi < m:
        o = state.window_origin
        dt, tick, delta, region, category = _next_event(queues, o, rt, rng)
        t_next = state.clock + dt
        while gi < m and grid[gi] < t_next:
            scaled = [queues.get(o + i, 0) / sqrt_n for i in range(6)]
            g, h = gh_transform(scaled[2], scaled[3], mparams)
            series[gi] = scaled + [g, h]
            row = [occ[r] for r in REGION_ORDER]
            row[_REGION_INDEX[region]] += grid[gi] - state.clock
            occupations[gi] = row
            gi += 1
        if gi == m:
            break
        _apply_event(state, dt, tick, delta, region, category, False)
    occupations /= n
    return ScaledPathBundle(times=times, series=series, occupations=occupations, n=n)


def occupation_fractions(bundle: ScaledPathBundle) -> dict[str, float]:
    """Fractions of elapsed time spent in each interior region.

    Also reports the fraction with a one-tick spread (regions NE, SE+, SE,
    SE-, SW) and with a two-tick spread (E and S); the remaining time is the
    three-tick configuration at the origin.
    """
    horizon = float(bundle.times[-1])
    if horizon <= 0:
        raise ValueError("bundle horizon must be positive")
    final = bundle.occupations[-1] / horizon
    fractions = {r.value: float(final[i]) for i, r in enumerate(REGION_ORDER)}
    fractions["one_tick"] = float(
        sum(final[_REGION_INDEX[r]] for r in _ONE_TICK)
    )
    fractions["two_tick"] = float(
        sum(final[_REGION_INDEX[r]] for r in _TWO_TICK)
    )
    return fractions


def martingale_drift_stat(
    paths: Sequence[ScaledPathBundle],
) -> tuple[float, float]:
    """Sample mean and standard error of the drift-free coordinate's net move.

    Takes independent recorded paths and measures g(T) - g(0) across them.
    At least two paths are required, and identical nonzero outcomes on every
    path are rejected as a sign of duplicated streams.
    """
    if len(paths) < 2:
        raise ValueError("martingale_drift_stat needs at least two paths")
    g_col = SERIES_COLUMNS.index("g")
    deltas = np.array([p.series[-1, g_col] - p.series[0, g_col] for p in paths])
    if np.all(deltas == deltas[0]):
        if deltas[0] == 0.0:
            return 0.0, 0.0
        raise ValueError(
            "all paths moved identically; supply paths from distinct streams"
        )
    mean = float(np.mean(deltas))
    se = float(np.std(deltas, ddof=1) / math.sqrt(len(deltas)))
    return mean, se
