"""Origin measurements, survival probabilities, and a dense-matrix oracle.

The measured protocol alternates ``interval`` unitary steps with a projective
measurement onto the origin site.  The probability that all ``count``
measurements find the walker at the origin is the product of the per-cycle
conditional probabilities; it is compared against the undisturbed survival
probability of a single measurement after the same total number of steps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OracleTooLargeError
from .walk import (
    CoinParams,
    WalkState,
    build_coin,
    evolve,
    initial_state,
    step,
)

#: Size cap for the dense density-matrix oracle (total steps).
ORACLE_MAX_STEPS = 12


@dataclass(frozen=True)
class MeasurementSchedule:
    """``count`` origin measurements, one every ``interval`` walk steps."""

    interval: int
    count: int

    def __post_init__(self):
        if self.interval < 2 or self.interval % 2 != 0:
            raise ValueError(
                f"interval must be a positive even integer (the origin probability is "
                f"identically zero after an odd number of steps), got {self.interval}"
            )
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def total_steps(self) -> int:
        return self.interval * self.count


@dataclass(frozen=True)
class ProjectionOutcome:
    """Result of projecting onto the origin: pre-collapse mass and, when that
    mass is nonzero, the renormalized internal state left at the origin."""

    probability: float
    collapsed_coin_state: np.ndarray | None


@dataclass
class ZenoResult:
    """Measured vs undisturbed survival for one parameter set and schedule."""

    params: CoinParams
    schedule: MeasurementSchedule
    survival_disturbed: float
    survival_undisturbed: float
    per_cycle: list[float] = field(default_factory=list)


def project_origin(state: WalkState) -> tuple[ProjectionOutcome, WalkState]:
    """Measure whether the walker sits at x = 0 and collapse onto that site.

    Returns the origin probability mass together with a fresh state supported
    only at the origin, renormalized and with its step counter reset so the
    next measurement cycle starts from a clean parity bookkeeping.  A zero
    origin mass yields an empty (all-zero) state and no coin content.
    """
    if state.norm_squared == 0.0:
        raise ValueError("cannot project an empty state (norm^2 = 0)")
    probability = state.origin_probability
    k = state.capacity
    amplitudes = np.zeros_like(state.amplitudes)
    if probability == 0.0:
        return ProjectionOutcome(0.0, None), WalkState(amplitudes, 0, k)
    coin_state = state.amplitudes[:, k] / math.sqrt(probability)
    amplitudes[:, k] = coin_state
    return (
        ProjectionOutcome(float(probability), coin_state.copy()),
        WalkState(amplitudes, 0, k),
    )


def survival_undisturbed(params: CoinParams, t: int) -> float:
    """Origin probability after ``t`` measurement-free steps from the start state.

    Exactly zero for odd ``t`` (parity).
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    state = evolve(initial_state(max(t, 1)), build_coin(params), t)
    return state.origin_probability


def survival_series(params: CoinParams, t_max: int) -> np.ndarray:
    """Origin probability after each of 0..t_max steps, from a single run."""
    if t_max < 0:
        raise ValueError(f"t_max must be non-negative, got {t_max}")
    state = initial_state(max(t_max, 1))
    coin = build_coin(params)
    out = np.empty(t_max + 1, dtype=np.float64)
    out[0] = state.origin_probability
    for t in range(1, t_max + 1):
        state = step(state, coin)
        out[t] = state.origin_probability
    return out


def zeno_survival(params: CoinParams, schedule: MeasurementSchedule) -> ZenoResult:
    """Run the measured protocol and compare against the undisturbed survival.

    Alternates ``interval`` steps of evolution with an origin projection,
    ``count`` times; the product of the conditional per-cycle probabilities is
    the probability that every measurement finds the walker at the origin.
    Once a cycle comes up empty the remaining conditionals are zero and the
    run short-circuits.
    """
    coin = build_coin(params)
    state = initial_state(schedule.interval)
    per_cycle: list[float] = []
    for _ in range(schedule.count):
        state = evolve(state, coin, schedule.interval)
        outcome, state = project_origin(state)
        per_cycle.append(outcome.probability)
        if outcome.probability == 0.0:
            break
    per_cycle.extend(0.0 for _ in range(schedule.count - len(per_cycle)))
    return ZenoResult(
        params=params,
        schedule=schedule,
        survival_disturbed=math.prod(per_cycle),
        survival_undisturbed=survival_undisturbed(params, schedule.total_steps),
        per_cycle=per_cycle,
    )


def two_step_origin_state(params: CoinParams) -> tuple[np.ndarray, float]:
    """Closed-form origin amplitudes and probability two steps after the start.

    The unnormalized internal amplitudes left at x = 0 are

        |0>:  (-sin^2(theta) + i e^{-i(xi - zeta)} cos(theta) sin(theta)) / sqrt(2)
        |1>:  (-e^{+i(xi - zeta)} cos(theta) sin(theta) - i sin^2(theta)) / sqrt(2)

    and the origin probability is sin^2(theta), independent of xi and zeta.
    """
    c = math.cos(params.theta)
    s = math.sin(params.theta)
    plus = cmath.exp(1j * (params.xi - params.zeta))
    minus = cmath.exp(-1j * (params.xi - params.zeta))
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    amplitudes = np.array(
        [
            (-s * s + 1j * minus * c * s) * inv_sqrt2,
            (-plus * c * s - 1j * s * s) * inv_sqrt2,
        ],
        dtype=np.complex128,
    )
    return amplitudes, s * s


def zeno_coin_map(params: CoinParams) -> np.ndarray:
    """The unitary acting on the internal state over one two-step measure cycle.

    One cycle (two steps from the origin, then a successful origin projection
    and renormalization) maps any unit internal state ``v`` to ``M v`` with

        M = [[-sin(theta),                e^{i(zeta - xi)} cos(theta)],
             [-e^{i(xi - zeta)} cos(theta),               -sin(theta)]]

    up to the sign of sin(theta), which the renormalization preserves.
    """
    s = math.sin(params.theta)
    if s == 0.0:
        raise ValueError(
            "conditional coin map is undefined when the per-cycle survival "
            "sin^2(theta) is zero (theta = 0)"
        )
    c = math.cos(params.theta)
    phase = cmath.exp(1j * (params.zeta - params.xi))
    mat = np.array(
        [
            [-s, phase * c],
            [-c / phase, -s],
        ],
        dtype=np.complex128,
    )
    # The raw cycle amplitude is sin(theta) * mat; renormalizing divides by
    # |sin(theta)|, so a negative sin(theta) flips the map's overall sign.
    return mat if s > 0 else -mat


def coin_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 between two unit internal states, insensitive to global phase."""
    vectors = []
    for name, v in (("a", np.asarray(a, dtype=np.complex128)), ("b", np.asarray(b, dtype=np.complex128))):
        if v.shape != (2,):
            raise ValueError(f"coin state {name!r} must have exactly two components")
        if abs(float(np.vdot(v, v).real) - 1.0) > 1e-9:
            raise ValueError(f"coin state {name!r} must have unit norm")
        vectors.append(v)
    return float(abs(np.vdot(vectors[0], vectors[1])) ** 2)


# ---------------------------------------------------------------------------
# Dense density-matrix oracle.  Built from explicit matrices for the walk
# operator and the origin projector; shares no evolution code with the
# state-vector engine above and exists purely for cross-validation.
# ---------------------------------------------------------------------------


def walk_operator_matrix(params: CoinParams, half_width: int) -> np.ndarray:
    """Dense one-step walk operator on coin (x) positions |x| <= half_width.

    Flat index is coin-major: ``c * (2 * half_width + 1) + (x + half_width)``.
    Shift targets that fall off the truncated lattice are dropped, which is
    exact whenever the evolved support stays strictly inside the edge.
    """
    npos = 2 * half_width + 1
    c = math.cos(params.theta)
    s = math.sin(params.theta)
    coin = np.array(
        [
            [cmath.exp(1j * params.xi) * c, cmath.exp(1j * params.zeta) * s],
            [-cmath.exp(-1j * params.zeta) * s, cmath.exp(-1j * params.xi) * c],
        ],
        dtype=np.complex128,
    )
    shift = np.zeros((2 * npos, 2 * npos), dtype=np.complex128)
    for x in range(-half_width, half_width + 1):
        j = x + half_width
        if x - 1 >= -half_width:
            shift[j - 1, j] = 1.0
        if x + 1 <= half_width:
            shift[npos + j + 1, npos + j] = 1.0
    return shift @ np.kron(coin, np.eye(npos, dtype=np.complex128))


def origin_projector_matrix(half_width: int) -> np.ndarray:
    """Projector onto the origin site, acting as identity on the coin."""
    npos = 2 * half_width + 1
    proj = np.zeros((2 * npos, 2 * npos), dtype=np.complex128)
    proj[half_width, half_width] = 1.0
    proj[npos + half_width, npos + half_width] = 1.0
    return proj


def origin_density_matrix(half_width: int) -> np.ndarray:
    """|psi><psi| for the symmetric start state at the origin."""
    npos = 2 * half_width + 1
    psi = np.zeros(2 * npos, dtype=np.complex128)
    psi[half_width] = 1.0 / math.sqrt(2.0)
    psi[npos + half_width] = 1.0j / math.sqrt(2.0)
    return np.outer(psi, psi.conj())


def density_oracle_zeno(params: CoinParams, schedule: MeasurementSchedule) -> ZenoResult:
    """Density-matrix reimplementation of :func:`zeno_survival`.

    Sandwiches the initial density matrix between explicit powers of the walk
    operator and origin projectors; the surviving trace after ``count``
    projections is the measured survival probability.  Limited to
    ``total_steps <= ORACLE_MAX_STEPS`` because of its dense-matrix cost.
    """
    total = schedule.total_steps
    if total > ORACLE_MAX_STEPS:
        raise OracleTooLargeError(
            f"density oracle supports at most {ORACLE_MAX_STEPS} total steps, "
            f"got {total}; it exists only for small cross-validation runs"
        )
    walk_op = walk_operator_matrix(params, total)
    cycle_op = np.linalg.matrix_power(walk_op, schedule.interval)
    projector = origin_projector_matrix(total)

    rho = origin_density_matrix(total)
    per_cycle: list[float] = []
    previous = 1.0
    for _ in range(schedule.count):
        rho = cycle_op @ rho @ cycle_op.conj().T
        rho = projector @ rho @ projector
        trace = float(np.trace(rho).real)
        per_cycle.append(trace / previous if previous > 0.0 else 0.0)
        previous = trace
    survival_disturbed = float(np.trace(rho).real)

    rho_free = origin_density_matrix(total)
    full_op = np.linalg.matrix_power(walk_op, total)
    rho_free = full_op @ rho_free @ full_op.conj().T
    survival_free = float(np.trace(projector @ rho_free @ projector).real)

    return ZenoResult(
        params=params,
        schedule=schedule,
        survival_disturbed=survival_disturbed,
        survival_undisturbed=survival_free,
        per_cycle=per_cycle,
    )
