"""State-vector evolution of the one-dimensional two-component coined walk.

The walker lives on the integer lattice with a two-level internal (coin)
degree of freedom.  Each step applies a 2x2 special-unitary coin to the
internal components and then shifts the coin-|0> component one site left
and the coin-|1> component one site right.  Amplitudes are stored densely
over ``x in [-capacity, +capacity]``; the light cone guarantees exactness
as long as ``capacity`` covers the total number of steps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

LEFT = 0   # coin |0>, moves x -> x - 1
RIGHT = 1  # coin |1>, moves x -> x + 1


@dataclass(frozen=True)
class CoinParams:
    """The three angles, in radians, of the special-unitary coin."""

    xi: float
    theta: float
    zeta: float

    def __post_init__(self):
        for name in ("xi", "theta", "zeta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"coin angle {name!r} must be finite, got {value!r}")

    @classmethod
    def from_degrees(cls, xi: float, theta: float, zeta: float) -> CoinParams:
        return cls(math.radians(xi), math.radians(theta), math.radians(zeta))

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


def build_coin(params: CoinParams) -> np.ndarray:
    """Return the 2x2 special-unitary coin matrix for ``params``.

    Rows are indexed by the output coin basis; determinant is 1 by
    construction.
    """
    c = math.cos(params.theta)
    s = math.sin(params.theta)
    return np.array(
        [
            [cmath.exp(1j * params.xi) * c, cmath.exp(1j * params.zeta) * s],
            [-cmath.exp(-1j * params.zeta) * s, cmath.exp(-1j * params.xi) * c],
        ],
        dtype=np.complex128,
    )


@dataclass
class WalkState:
    """Two-component amplitude field over lattice positions.

    ``amplitudes`` has shape ``(2, 2 * capacity + 1)``: row ``LEFT`` holds the
    left-moving (coin |0>) component, row ``RIGHT`` the right-moving (coin |1>)
    component, and column ``x + capacity`` holds position ``x``.  States are
    values: operations return new instances and never mutate their inputs.
    """

    amplitudes: np.ndarray
    steps_taken: int
    capacity: int

    def index(self, x: int) -> int:
        return x + self.capacity

    def amplitude(self, x: int) -> np.ndarray:
        """The (left, right) amplitude pair at position ``x``."""
        return self.amplitudes[:, self.index(x)].copy()

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def origin_probability(self) -> float:
        return float(np.sum(np.abs(self.amplitudes[:, self.capacity]) ** 2))

    @property
    def is_empty(self) -> bool:
        return not self.amplitudes.any()

    def copy(self) -> WalkState:
        return WalkState(self.amplitudes.copy(), self.steps_taken, self.capacity)


#: Symmetric internal state (|0> + i|1>)/sqrt(2) used as the walk's start.
SYMMETRIC_COIN_STATE = np.array([1.0, 1.0j], dtype=np.complex128) / math.sqrt(2.0)


def origin_state(coin_state: np.ndarray, capacity: int) -> WalkState:
    """A fresh state with the given internal amplitudes at x = 0 only."""
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    coin_state = np.asarray(coin_state, dtype=np.complex128)
    if coin_state.shape != (2,):
        raise ValueError(f"coin state must have exactly two components, got shape {coin_state.shape}")
    amplitudes = np.zeros((2, 2 * capacity + 1), dtype=np.complex128)
    amplitudes[:, capacity] = coin_state
    return WalkState(amplitudes, steps_taken=0, capacity=capacity)


def initial_state(capacity: int) -> WalkState:
    """The symmetric start state: (|0> + i|1>)/sqrt(2) at the origin."""
    return origin_state(SYMMETRIC_COIN_STATE, capacity)


def apply_coin(state: WalkState, coin: np.ndarray) -> WalkState:
    """Multiply the two internal components by ``coin`` at every position."""
    coin = np.asarray(coin, dtype=np.complex128)
    return WalkState(coin @ state.amplitudes, state.steps_taken, state.capacity)


def apply_shift(state: WalkState) -> WalkState:
    """Move the coin-|0> component one site left and the coin-|1> one site right."""
    if state.steps_taken >= state.capacity:
        raise CapacityError(
            f"shift would overrun the lattice (steps_taken={state.steps_taken}, "
            f"capacity={state.capacity}); allocate capacity >= total steps up front"
        )
    amps = state.amplitudes
    out = np.zeros_like(amps)
    out[LEFT, :-1] = amps[LEFT, 1:]
    out[RIGHT, 1:] = amps[RIGHT, :-1]
    return WalkState(out, state.steps_taken + 1, state.capacity)


def step(state: WalkState, coin: np.ndarray) -> WalkState:
    """One walk step: coin first, then the coin-conditioned shift."""
    return apply_shift(apply_coin(state, coin))


def evolve(state: WalkState, coin: np.ndarray, steps: int) -> WalkState:
    """Apply ``step`` exactly ``steps`` times."""
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if state.steps_taken + steps > state.capacity:
        raise CapacityError(
            f"evolution needs capacity >= {state.steps_taken + steps}, have {state.capacity}"
        )
    for _ in range(steps):
        state = step(state, coin)
    return state


@dataclass
class PositionDistribution:
    """Measurement probabilities per lattice site after ``steps_taken`` steps."""

    rows: list[tuple[int, float]]
    steps_taken: int

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for x, _ in self.rows], dtype=np.int64)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.rows], dtype=np.float64)

    @property
    def total_mass(self) -> float:
        return float(sum(p for _, p in self.rows))


def position_distribution(state: WalkState) -> PositionDistribution:
    """Per-site probability |L(x)|^2 + |R(x)|^2 over the light cone.

    Rows cover every x with |x| <= steps_taken, including the exact zeros at
    sites of the wrong parity.
    """
    per_site = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    t = state.steps_taken
    k = state.capacity
    rows = [(x, float(per_site[x + k])) for x in range(-t, t + 1)]
    return PositionDistribution(rows=rows, steps_taken=t)


def recurrence_oracle_step(state: WalkState, params: CoinParams) -> WalkState:
    """Site-by-site reference implementation of one walk step.

    Advances the amplitude field by direct evaluation of

        L(x, t) =  e^{+i xi}   cos(theta) L(x+1, t-1) + e^{+i zeta} sin(theta) R(x+1, t-1)
        R(x, t) = -e^{-i zeta} sin(theta) L(x-1, t-1) + e^{-i xi}   cos(theta) R(x-1, t-1)

    sharing no code with :func:`apply_coin` / :func:`apply_shift`; exists to
    cross-check the vectorized engine.
    """
    if state.steps_taken >= state.capacity:
        raise CapacityError(
            f"shift would overrun the lattice (steps_taken={state.steps_taken}, "
            f"capacity={state.capacity}); allocate capacity >= total steps up front"
        )
    c = math.cos(params.theta)
    s = math.sin(params.theta)
    ll = cmath.exp(1j * params.xi) * c
    lr = cmath.exp(1j * params.zeta) * s
    rl = -cmath.exp(-1j * params.zeta) * s
    rr = cmath.exp(-1j * params.xi) * c

    old = state.amplitudes
    new = np.zeros_like(old)
    k = state.capacity
    t_new = state.steps_taken + 1
    last = 2 * k
    for x in range(-t_new, t_new + 1):
        j = x + k
        if j + 1 <= last:
            new[LEFT, j] = ll * old[LEFT, j + 1] + lr * old[RIGHT, j + 1]
        if j - 1 >= 0:
            new[RIGHT, j] = rl * old[LEFT, j - 1] + rr * old[RIGHT, j - 1]
    return WalkState(new, t_new, k)
