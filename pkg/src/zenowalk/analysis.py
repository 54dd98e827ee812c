"""Derived quantities and transition finding.

Everything here works in degrees on its public surface (matching the plots
the tooling reproduces) and converts to radians once, at the boundary to the
walk core.  The central object is the gap

    gap(theta) = measured survival - undisturbed survival

whose sign change in the coin angle locates the Zeno transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, NoTransitionError
from .walk import (
    CoinParams,
    PositionDistribution,
    build_coin,
    evolve,
    initial_state,
    position_distribution,
)
from .zeno import MeasurementSchedule, survival_series, survival_undisturbed, zeno_survival

#: Pre-scan resolution (degrees) used to bracket the transition angle.
SCAN_STEP_DEG = 1.0
#: Default bisection width (degrees) for the transition angle.
DEFAULT_TOLERANCE_DEG = 0.01

#: Columns a sweep can be asked to produce.
SWEEP_OUTPUTS = ("undisturbed", "disturbed", "transient", "variance")


def transient_probability(params: CoinParams, t: int) -> float:
    """Probability that the walker has left the origin after ``t`` steps."""
    return 1.0 - survival_undisturbed(params, t)


def variance_of(dist: PositionDistribution) -> float:
    """Position variance of a distribution, normalized by its total mass."""
    mass = dist.total_mass
    if mass <= 0.0:
        raise ValueError("cannot take the variance of a zero-mass distribution")
    xs = dist.positions.astype(np.float64)
    ps = dist.probabilities / mass
    mean = float(np.dot(xs, ps))
    return float(np.dot(xs * xs, ps)) - mean * mean


def canonical_theta_deg(theta_deg: float) -> float:
    """Reduce an angle to its equivalent in [0, 90] degrees.

    Survival-type quantities depend on the coin angle only through |sin| and
    |cos|, which are preserved by reflecting modulo 180.  Used when planning
    sweeps; the walk core never rewrites angles.
    """
    reduced = math.fmod(theta_deg, 180.0)
    if reduced < 0.0:
        reduced += 180.0
    return 180.0 - reduced if reduced > 90.0 else reduced


@dataclass(frozen=True)
class CriticalPoint:
    """A located transition: the abscissa where measured survival overtakes
    the undisturbed one."""

    kind: str                     # "theta_c" or "n_c"
    value: float | int
    steps: int
    interval: int | None          # measurement interval, for theta_c runs
    theta_deg: float | None       # fixed coin angle, for n_c runs
    bracket: tuple[float, float]
    gap_at_value: float
    scan: list[tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit of the undisturbed survival decay against step count."""

    theta_deg: float
    t_range: tuple[int, int]
    exponent: float
    amplitude: float
    residual: float
    n_points: int


def zeno_gap(theta_deg: float, steps: int, interval: int) -> float:
    """Measured minus undisturbed survival for the unbiased coin at ``theta_deg``."""
    params = CoinParams.from_degrees(0.0, theta_deg, 0.0)
    result = zeno_survival(params, MeasurementSchedule(interval, steps // interval))
    return result.survival_disturbed - result.survival_undisturbed


def critical_theta(
    steps: int, interval: int, tolerance_deg: float = DEFAULT_TOLERANCE_DEG
) -> CriticalPoint:
    """Locate the coin angle where measured survival overtakes the undisturbed one.

    Pre-scans the open interval (0, 90) degrees at one-degree resolution,
    takes the largest grid pair where the gap turns positive, and bisects it
    down to ``tolerance_deg``.  The gap can wobble where both survivals are
    tiny, so the largest sign change is the one reported.
    """
    _validate_steps_interval(steps, interval)
    if tolerance_deg <= 0.0:
        raise ValueError(f"tolerance_deg must be positive, got {tolerance_deg}")

    grid = [float(d) for d in range(1, 90)]
    gaps = [zeno_gap(theta, steps, interval) for theta in grid]
    scan = list(zip(grid, gaps))

    bracket_index = None
    for i in range(len(grid) - 1, 0, -1):
        if gaps[i] > 0.0 and gaps[i - 1] <= 0.0:
            bracket_index = i - 1
            break
    if bracket_index is None:
        raise NoTransitionError(
            f"no sign change of the survival gap on the 1-degree scan for "
            f"steps={steps}, interval={interval}",
            scan=scan,
        )

    lo, hi = grid[bracket_index], grid[bracket_index + 1]
    while hi - lo > tolerance_deg:
        mid = 0.5 * (lo + hi)
        if zeno_gap(mid, steps, interval) > 0.0:
            hi = mid
        else:
            lo = mid
    value = 0.5 * (lo + hi)
    return CriticalPoint(
        kind="theta_c",
        value=value,
        steps=steps,
        interval=interval,
        theta_deg=None,
        bracket=(lo, hi),
        gap_at_value=zeno_gap(value, steps, interval),
        scan=scan,
    )


def admissible_measurement_counts(steps: int) -> list[int]:
    """Measurement counts n for which steps/n is an even integer."""
    if steps < 2 or steps % 2 != 0:
        raise ValueError(f"steps must be a positive even integer, got {steps}")
    return [n for n in range(1, steps + 1) if steps % n == 0 and (steps // n) % 2 == 0]


def critical_n(steps: int, params: CoinParams) -> CriticalPoint:
    """Smallest admissible measurement count whose measured survival wins.

    Walks the admissible counts (even interval required) in increasing order
    and returns the first with a positive gap.  When none qualifies, the
    measured protocol never beats the single final measurement in this
    parameter regime, and a :class:`NoTransitionError` carrying the full scan
    is raised.
    """
    counts = admissible_measurement_counts(steps)
    undisturbed = survival_undisturbed(params, steps)
    scan: list[tuple[float, float]] = []
    found: tuple[int, float] | None = None
    for n in counts:
        result = zeno_survival(params, MeasurementSchedule(steps // n, n))
        gap = result.survival_disturbed - undisturbed
        scan.append((float(n), gap))
        if found is None and gap > 0.0:
            found = (n, gap)
    if found is None:
        raise NoTransitionError(
            f"no admissible measurement count gives measured survival above the "
            f"undisturbed value at steps={steps}, theta={params.theta_deg:.4g} deg",
            scan=scan,
        )
    n_c, gap_at_value = found
    below = [int(n) for n, gap in scan if n < n_c and gap <= 0.0]
    lower = max(below) if below else n_c
    return CriticalPoint(
        kind="n_c",
        value=n_c,
        steps=steps,
        interval=None,
        theta_deg=params.theta_deg,
        bracket=(float(lower), float(n_c)),
        gap_at_value=gap_at_value,
        scan=scan,
    )


def fit_power_law(ts: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope/amplitude of ``values ~ amplitude * ts**slope``.

    Returns (slope, amplitude, rms residual of the log-log fit).
    """
    log_t = np.log(np.asarray(ts, dtype=np.float64))
    log_v = np.log(np.asarray(values, dtype=np.float64))
    slope, intercept = np.polyfit(log_t, log_v, 1)
    residual = float(np.sqrt(np.mean((log_v - (slope * log_t + intercept)) ** 2)))
    return float(slope), float(math.exp(intercept)), residual


def scaling_exponent(params: CoinParams, t_min: int, t_max: int) -> ScalingFit:
    """Fit the decay exponent of the undisturbed survival over even steps.

    The raw survival oscillates around its decay envelope, so adjacent pairs
    of even-step samples are averaged before the log-log fit.  Zero samples
    (exact parity zeros never occur at even t, but theta = 0 kills the origin
    entirely) are dropped.
    """
    if t_min % 2 != 0 or t_max % 2 != 0:
        raise ValueError(f"t_min and t_max must be even, got {t_min}, {t_max}")
    if t_max < t_min + 40:
        raise ValueError(f"need t_max >= t_min + 40, got [{t_min}, {t_max}]")

    series = survival_series(params, t_max)
    ts = np.arange(t_min, t_max + 1, 2)
    values = series[ts]
    keep = values > 0.0
    ts, values = ts[keep], values[keep]

    paired = len(ts) // 2 * 2
    t_smooth = (ts[0:paired:2] + ts[1:paired:2]) / 2.0
    v_smooth = (values[0:paired:2] + values[1:paired:2]) / 2.0
    if len(t_smooth) < 20:
        raise InsufficientDataError(
            f"only {len(t_smooth)} smoothed samples in [{t_min}, {t_max}]; need at least 20"
        )
    slope, amplitude, residual = fit_power_law(t_smooth, v_smooth)
    return ScalingFit(
        theta_deg=params.theta_deg,
        t_range=(t_min, t_max),
        exponent=slope,
        amplitude=amplitude,
        residual=residual,
        n_points=len(t_smooth),
    )


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """A grid of (coin angle, measurement interval) points at fixed steps."""

    theta_grid: tuple[float, ...]
    steps: int
    intervals: tuple[int, ...]
    outputs: tuple[str, ...] = SWEEP_OUTPUTS

    def __post_init__(self):
        if not self.theta_grid:
            raise ValueError("theta_grid must be non-empty")
        if not self.intervals:
            raise ValueError("intervals must be non-empty")
        for interval in self.intervals:
            if interval % 2 != 0 or interval < 2:
                raise ValueError(f"interval {interval} is not a positive even integer")
            if self.steps % interval != 0:
                raise ValueError(f"interval {interval} does not divide steps={self.steps}")
        unknown = set(self.outputs) - set(SWEEP_OUTPUTS)
        if unknown:
            raise ValueError(f"unknown sweep outputs: {sorted(unknown)}")
        object.__setattr__(
            self,
            "theta_grid",
            tuple(canonical_theta_deg(float(t)) for t in self.theta_grid),
        )
        object.__setattr__(self, "intervals", tuple(int(i) for i in self.intervals))


@dataclass(frozen=True)
class SweepPoint:
    theta_deg: float
    steps: int
    interval: int
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class SweepRow:
    """One sweep result; columns not requested stay None, and a failed point
    is flagged through ``error`` instead of sinking the whole table."""

    theta_deg: float
    steps: int
    interval: int
    n: int
    p_undisturbed: float | None
    p_disturbed: float | None
    transient: float | None
    variance: float | None
    error: str | None = None


def sweep_points(spec: SweepSpec) -> list[SweepPoint]:
    """Expand a spec into its canonical (interval, theta) evaluation order."""
    return [
        SweepPoint(theta, spec.steps, interval, spec.outputs)
        for interval in sorted(spec.intervals)
        for theta in sorted(spec.theta_grid)
    ]


def evaluate_sweep_point(point: SweepPoint) -> SweepRow:
    """Compute one sweep row.  Pure; safe to run in worker processes."""
    n = point.steps // point.interval
    try:
        params = CoinParams.from_degrees(0.0, point.theta_deg, 0.0)
        result = zeno_survival(params, MeasurementSchedule(point.interval, n))
        undisturbed = result.survival_undisturbed
        disturbed = result.survival_disturbed
        variance = None
        if "variance" in point.outputs:
            final = evolve(initial_state(point.steps), build_coin(params), point.steps)
            variance = variance_of(position_distribution(final))
        return SweepRow(
            theta_deg=point.theta_deg,
            steps=point.steps,
            interval=point.interval,
            n=n,
            p_undisturbed=undisturbed if "undisturbed" in point.outputs else None,
            p_disturbed=disturbed if "disturbed" in point.outputs else None,
            transient=1.0 - undisturbed if "transient" in point.outputs else None,
            variance=variance,
        )
    except Exception as exc:  # flagged row, never a sweep abort
        return SweepRow(
            theta_deg=point.theta_deg,
            steps=point.steps,
            interval=point.interval,
            n=n,
            p_undisturbed=None,
            p_disturbed=None,
            transient=None,
            variance=None,
            error=str(exc),
        )


def sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate every grid point sequentially, in canonical order."""
    return [evaluate_sweep_point(point) for point in sweep_points(spec)]
