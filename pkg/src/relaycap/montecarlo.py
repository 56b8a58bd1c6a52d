"""Seeded Monte Carlo verification of high-dimensional sphere/shell geometry.

Verifies, at finite dimension, the probabilistic statements the capacity
bound rests on: measure concentration around equators, the blowing-up
property of set neighborhoods, and the cap-intersection property (a random
cap of slightly enlarged angle captures at least the orthogonal-pole
cap-intersection volume from any set of matching effective angle, with
high probability).

Sets here are axially symmetric: a cap, a band, or a union of two
antipodal caps, each described by polar-angle intervals about an axis.
That structure is what makes the intersection measure estimable at
m ~ several hundred, where the intersection occupies a ~2^-70 fraction of
the random cap and hit-or-miss sampling is hopeless: the azimuth toward
the set axis is importance-sampled uniformly over exactly the interval
where membership holds, with the true density folded into log-domain
weights.  The estimator is unbiased and its calibration against the
quadrature formulas is part of the test suite.

All randomness comes from counter-based Philox streams keyed by
(seed, stream_index): trials are independent, reproducible bit-for-bit,
and safe to evaluate in parallel with results reduced in trial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import geometry
from .errors import DomainError, UnsupportedSet
from .geometry import ShellSpec, _log2_radial_integral, _log2_sin_integral_zero_to

LN2 = math.log(2.0)
HALF_PI = math.pi / 2.0

_CHUNK_ELEMENTS = 8_000_000
_POLAR_TABLE_NODES = 4096


def trial_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream); streams are disjoint."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def sample_uniform_sphere(m: int, R: float, rng: np.random.Generator, size: int | None = None):
    """Uniform (rotation-invariant) points on the sphere of radius R in R^m.

    Standard Gaussian vectors normalized and scaled; returns shape (m,) for
    size=None, else (size, m).
    """
    if m < 2:
        raise DomainError(f"sphere sampling needs m >= 2, got {m}")
    n = 1 if size is None else int(size)
    g = rng.standard_normal((n, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = R * g
    return pts[0] if size is None else pts


@lru_cache(maxsize=64)
def _polar_angle_table(m: int, angle: float) -> PchipInterpolator:
    """Monotone inverse of the polar-angle CDF on [0, angle] at sin^(m-2) density.

    Tabulates the log2 cumulative mass at Chebyshev-clustered nodes (dense
    at both endpoints, where all the probability lives when m is large) and
    interpolates angle as a function of log2(CDF) with a monotone cubic.
    Working on the log scale keeps the table meaningful where the CDF
    itself underflows.
    """
    n = _POLAR_TABLE_NODES
    j = np.arange(1, n + 1)
    nodes = angle * 0.5 * (1.0 - np.cos(math.pi * j / n))
    total = _log2_sin_integral_zero_to(m - 2, angle)
    log_cdf = np.array(
        [_log2_sin_integral_zero_to(m - 2, float(r)) for r in nodes]
    ) - total
    log_cdf[-1] = 0.0
    # PCHIP needs strictly increasing abscissae: drop -inf heads and, where
    # the log-CDF saturates in float64 (mass beyond a node below one ulp,
    # e.g. past the equator for angle = pi), keep the last node of each flat
    # run so log_cdf = 0 still maps to rho = angle.
    keep = np.isfinite(log_cdf)
    keep[:-1] &= np.diff(log_cdf) > 0.0
    log_cdf, nodes = log_cdf[keep], nodes[keep]
    return PchipInterpolator(log_cdf, nodes, extrapolate=False)


def sample_uniform_cap(
    m: int,
    R: float,
    pole,
    angle: float,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Uniform points on the cap of half-angle `angle` around `pole`.

    Polar angle by numeric inverse-CDF of the sin^(m-2) density restricted
    to [0, angle]; the orthogonal component is an independent uniform
    direction in the pole's orthocomplement.
    """
    if m < 2:
        raise DomainError(f"cap sampling needs m >= 2, got {m}")
    if not 0.0 < angle <= math.pi:
        raise DomainError(f"cap angle must lie in (0, pi], got {angle}")
    pole = np.asarray(pole, dtype=float)
    p_hat = pole / np.linalg.norm(pole)
    n = 1 if size is None else int(size)

    table = _polar_angle_table(m, float(angle))
    u = 1.0 - rng.random(n)  # (0, 1]
    log_u = np.log2(u)
    lo = float(table.x[0])
    rho = np.asarray(table(np.clip(log_u, lo, 0.0)))

    g = rng.standard_normal((n, m))
    g -= np.outer(g @ p_hat, p_hat)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = R * (np.cos(rho)[:, None] * p_hat + np.sin(rho)[:, None] * g)
    return pts[0] if size is None else pts


# ---------------------------------------------------------------------------
# Axially symmetric sets
# ---------------------------------------------------------------------------


def _merge_intervals(intervals) -> tuple[tuple[float, float], ...]:
    ivs = sorted((float(lo), float(hi)) for lo, hi in intervals)
    merged: list[list[float]] = []
    for lo, hi in ivs:
        if not 0.0 <= lo < hi <= math.pi:
            raise DomainError(f"polar interval must satisfy 0 <= lo < hi <= pi, got ({lo}, {hi})")
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


def _default_axis(m: int) -> np.ndarray:
    axis = np.zeros(m)
    axis[0] = 1.0
    return axis


def _solve_angle_for_mass(m: int, target_log2: float) -> float:
    """Cap angle whose sin^(m-2) mass equals target_log2 (bisection to 1e-12)."""
    lo, hi = 0.0, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _log2_sin_integral_zero_to(m - 2, mid) < target_log2:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


@dataclass(eq=False)
class SphereSet:
    """An axially symmetric subset of the sphere: polar-angle intervals.

    Covers the three built-in shapes (cap, band, two antipodal caps) in one
    representation; membership depends only on the angle to `axis`.
    """

    m: int
    intervals: tuple[tuple[float, float], ...]
    axis: np.ndarray
    label: str = "set"

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DomainError(f"sphere sets need m >= 2, got {self.m}")
        self.axis = np.asarray(self.axis, dtype=float)
        if self.axis.shape != (self.m,):
            raise DomainError(f"axis must have shape ({self.m},), got {self.axis.shape}")
        norm = float(np.linalg.norm(self.axis))
        if norm == 0.0:
            raise DomainError("axis must be nonzero")
        self.axis = self.axis / norm
        self.intervals = _merge_intervals(self.intervals)
        if not self.intervals:
            raise DomainError("set must contain at least one polar interval")

    # -- constructors ------------------------------------------------------

    @classmethod
    def cap(cls, m: int, angle: float, axis=None) -> "SphereSet":
        if not 0.0 < angle <= math.pi:
            raise DomainError(f"cap angle must lie in (0, pi], got {angle}")
        return cls(m, ((0.0, angle),), _default_axis(m) if axis is None else axis, "cap")

    @classmethod
    def band(cls, m: int, center: float, half_width: float, axis=None) -> "SphereSet":
        if not 0.0 < half_width <= math.pi / 2.0:
            raise DomainError(f"band half-width must lie in (0, pi/2], got {half_width}")
        lo = max(0.0, center - half_width)
        hi = min(math.pi, center + half_width)
        return cls(m, ((lo, hi),), _default_axis(m) if axis is None else axis, "band")

    @classmethod
    def two_cap_union(cls, m: int, angle1: float, angle2: float, axis=None) -> "SphereSet":
        """Two caps at antipodal poles along the axis; they must be disjoint."""
        if angle1 + angle2 >= math.pi:
            raise UnsupportedSet(
                "two-cap union supports disjoint antipodal caps only: "
                f"angle1 + angle2 = {angle1 + angle2} >= pi"
            )
        ivs = ((0.0, angle1), (math.pi - angle2, math.pi))
        return cls(m, ivs, _default_axis(m) if axis is None else axis, "twocaps")

    @classmethod
    def band_with_effective_angle(
        cls, m: int, theta: float, center: float = HALF_PI, axis=None
    ) -> "SphereSet":
        """Equatorial-style band whose measure matches a cap of angle theta.

        Half-width found by bisection in log space (the matching band can be
        astronomically thin at large m).
        """
        target = _log2_sin_integral_zero_to(m - 2, theta)
        w_hi = min(center, math.pi - center)

        def mass(w: float) -> float:
            return geometry.log2_sin_power_integral(m - 2, center - w, center + w)

        if mass(w_hi) < target:
            raise DomainError(
                f"no band at center {center} reaches the mass of a cap of angle {theta}"
            )
        ln_lo, ln_hi = math.log(w_hi) - 800.0, math.log(w_hi)
        for _ in range(120):
            ln_mid = 0.5 * (ln_lo + ln_hi)
            if mass(math.exp(ln_mid)) < target:
                ln_lo = ln_mid
            else:
                ln_hi = ln_mid
        w = math.exp(0.5 * (ln_lo + ln_hi))
        return cls.band(m, center, w, axis)

    @classmethod
    def two_caps_with_effective_angle(cls, m: int, theta: float, axis=None) -> "SphereSet":
        """Two equal antipodal caps whose total measure matches a theta-cap."""
        target = _log2_sin_integral_zero_to(m - 2, theta) - 1.0
        a = _solve_angle_for_mass(m, target)
        return cls.two_cap_union(m, a, a, axis)

    # -- measures ----------------------------------------------------------

    def log2_angular_mass(self) -> float:
        """log2 of the sin^(m-2) mass of the polar-interval union."""
        parts = [
            geometry.log2_sin_power_integral(self.m - 2, lo, hi) for lo, hi in self.intervals
        ]
        total = -math.inf
        for p in parts:
            total = float(np.logaddexp2(total, p))
        return total

    @property
    def effective_theta(self) -> float:
        """Angle of the cap with the same measure as this set."""
        if self._effective is None:
            if len(self.intervals) == 1 and self.intervals[0][0] == 0.0:
                self._effective = self.intervals[0][1]
            else:
                self._effective = _solve_angle_for_mass(self.m, self.log2_angular_mass())
        return self._effective

    _effective: float | None = field(default=None, repr=False, init=False)

    # -- membership --------------------------------------------------------

    def polar_angles(self, points: np.ndarray, radius: float = 1.0) -> np.ndarray:
        cosang = np.clip(points @ self.axis / radius, -1.0, 1.0)
        return np.arccos(cosang)

    def contains_polar(self, polar: np.ndarray) -> np.ndarray:
        member = np.zeros(polar.shape, dtype=bool)
        for lo, hi in self.intervals:
            member |= (polar >= lo) & (polar <= hi)
        return member

    def expanded_intervals(self, t: float) -> tuple[tuple[float, float], ...]:
        """Polar intervals of the t-neighborhood of the set."""
        return _merge_intervals(
            (max(0.0, lo - t), min(math.pi, hi + t)) for lo, hi in self.intervals
        )


@dataclass(eq=False)
class ShellSet:
    """An axially symmetric angular set extruded over a radial sub-interval."""

    spec: ShellSpec
    angular: SphereSet
    r_lo: float
    r_hi: float
    label: str = "shellset"

    def __post_init__(self) -> None:
        if self.angular.m != self.spec.m:
            raise DomainError("angular set dimension must match the shell dimension")
        if not self.spec.r_lower <= self.r_lo < self.r_hi <= self.spec.r_upper:
            raise DomainError(
                f"radial interval [{self.r_lo}, {self.r_hi}] must lie inside "
                f"[{self.spec.r_lower}, {self.spec.r_upper}]"
            )

    @classmethod
    def extruded(
        cls,
        spec: ShellSpec,
        angular: SphereSet,
        frac_lo: float = 0.0,
        frac_hi: float = 1.0,
        label: str | None = None,
    ) -> "ShellSet":
        """Extrude an angular set over a fractional slice of the shell height."""
        if not 0.0 <= frac_lo < frac_hi <= 1.0:
            raise DomainError(f"need 0 <= frac_lo < frac_hi <= 1, got {frac_lo}, {frac_hi}")
        height = spec.r_upper - spec.r_lower
        return cls(
            spec,
            angular,
            spec.r_lower + frac_lo * height,
            spec.r_lower + frac_hi * height,
            label or f"{angular.label}-extruded",
        )

    @property
    def base_radius(self) -> float:
        return math.sqrt(self.spec.m * self.spec.N)

    def log2_radial_part(self) -> float:
        return _log2_radial_integral(self.spec.m, self.base_radius, self.r_lo, self.r_hi)

    def log2_volume(self) -> float:
        front = geometry._log2_cap_front(self.spec.m, self.base_radius)
        return front + self.angular.log2_angular_mass() + self.log2_radial_part()

    @property
    def effective_theta(self) -> float:
        """Angle theta with |self| = |ShellCap(theta)| over the full shell."""
        radial_full = _log2_radial_integral(
            self.spec.m, self.base_radius, self.spec.r_lower, self.spec.r_upper
        )
        target = (
            self.angular.log2_angular_mass() + self.log2_radial_part() - radial_full
        )
        return _solve_angle_for_mass(self.spec.m, target)


# ---------------------------------------------------------------------------
# Intersection estimator
# ---------------------------------------------------------------------------


def estimate_cap_intersection(
    sphere_set: SphereSet,
    y_hat: np.ndarray,
    beta: float,
    n_samples: int,
    rng: np.random.Generator,
    radius: float = 1.0,
) -> tuple[float, float]:
    """Unbiased log-domain estimate of mu(A intersect Cap(y, beta)).

    Parametrize the cap around y by polar angle rho (to y) and azimuth psi
    measured toward the set axis; the remaining directions integrate out
    exactly into the unit (m-3)-sphere area.  rho is drawn uniformly on
    [0, beta]; psi uniformly on the sub-intervals where membership in A
    holds (computed per sample in closed form), with the uniform-measure
    density sin^(m-2) rho sin^(m-3) psi carried as a log-domain weight.

    Returns (log2 estimate, standard error in bits).  An estimate of -inf
    means no sample carried weight (empty intersection at every draw).
    """
    m = sphere_set.m
    if m < 4:
        raise DomainError(f"intersection estimation needs m >= 4, got {m}")
    if not 0.0 < beta <= math.pi:
        raise DomainError(f"cap angle must lie in (0, pi], got {beta}")
    k = int(n_samples)
    if k < 1:
        raise DomainError("need at least one sample")

    y_hat = np.asarray(y_hat, dtype=float)
    y_hat = y_hat / np.linalg.norm(y_hat)
    cy = float(np.clip(y_hat @ sphere_set.axis, -1.0, 1.0))
    ca = max(math.sqrt(max(0.0, 1.0 - cy * cy)), 1e-300)

    rho = beta * rng.random(k)
    v = rng.random(k)
    cos_rho = np.cos(rho)
    sin_rho = np.sin(rho)
    denom = np.maximum(sin_rho * ca, 1e-300)

    ivs = sphere_set.intervals
    psi_lo = np.empty((k, len(ivs)))
    lengths = np.empty((k, len(ivs)))
    for j, (lo, hi) in enumerate(ivs):
        cb_lo, cb_hi = math.cos(hi), math.cos(lo)
        a_cos = np.clip((cb_lo - cos_rho * cy) / denom, -1.0, 1.0)
        b_cos = np.clip((cb_hi - cos_rho * cy) / denom, -1.0, 1.0)
        p_lo = np.arccos(b_cos)
        p_hi = np.arccos(a_cos)
        psi_lo[:, j] = p_lo
        lengths[:, j] = np.maximum(p_hi - p_lo, 0.0)

    total = lengths.sum(axis=1)
    cum = np.cumsum(lengths, axis=1)
    target = v * total
    seg = np.minimum((target[:, None] > cum).sum(axis=1), len(ivs) - 1)
    prev = np.where(seg > 0, np.take_along_axis(cum, np.maximum(seg - 1, 0)[:, None], 1)[:, 0], 0.0)
    psi = np.take_along_axis(psi_lo, seg[:, None], 1)[:, 0] + (target - prev)
    psi = np.clip(psi, 0.0, math.pi)

    with np.errstate(divide="ignore"):
        log_w = (
            np.log2(total)
            + (m - 2) * np.log2(sin_rho)
            + (m - 3) * np.log2(np.sin(psi))
        )

    w_max = float(np.max(log_w))
    if w_max == -math.inf:
        return -math.inf, math.inf
    w = np.exp2(log_w - w_max)
    s = float(w.sum())
    const = (
        math.log2(beta)
        - math.log2(k)
        + (m - 1) * math.log2(radius)
        + geometry.log_sphere_area(m - 2, 1.0).log2_value
    )
    log2_est = const + w_max + math.log2(s)
    mean = s / k
    se_rel = float(w.std(ddof=1)) / (math.sqrt(k) * mean) if k > 1 else math.inf
    return log2_est, se_rel / LN2


# ---------------------------------------------------------------------------
# Experiment configuration and reports
# ---------------------------------------------------------------------------


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class McConfig:
    """Seeded experiment configuration.

    epsilon plays the double role it has in the verified statements (angular
    slack and probability level); angular_slack overrides the slack alone
    for sensitivity studies.
    """

    seed: int
    samples_per_estimate: int = 10_000
    trials: int = 200
    epsilon: float = 0.1
    angular_slack: float | None = None

    def __post_init__(self) -> None:
        if self.samples_per_estimate < 1 or self.trials < 1:
            raise DomainError("counts must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def slack(self) -> float:
        return self.epsilon if self.angular_slack is None else self.angular_slack


@dataclass(frozen=True)
class McReport:
    """Outcome of one verification experiment."""

    estimate: float
    std_error: float
    n_used: int
    threshold: float
    verdict: Verdict
    seed: int
    details: dict = field(default_factory=dict)


def _verdict(estimate: float, threshold: float, se: float, passes_when: str) -> Verdict:
    if abs(estimate - threshold) < 3.0 * se:
        return Verdict.INCONCLUSIVE
    ok = estimate >= threshold if passes_when == ">=" else estimate <= threshold
    return Verdict.PASS if ok else Verdict.FAIL


def _binomial_se(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------


def verify_concentration(m: int, mu_cut: float, cfg: McConfig) -> McReport:
    """Empirical tail P(|cos angle(e1, Y)| >= mu) against the 1/(m mu^2) bound."""
    if not 0.0 < mu_cut < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu_cut}")
    if m < 2:
        raise DomainError(f"need m >= 2, got {m}")
    rng = trial_rng(cfg.seed, 0)
    n = cfg.samples_per_estimate
    rows = max(1, _CHUNK_ELEMENTS // m)
    hits = one_sided_hits = 0
    remaining = n
    while remaining > 0:
        take = min(rows, remaining)
        g = rng.standard_normal((take, m))
        cos1 = g[:, 0] / np.linalg.norm(g, axis=1)
        hits += int(np.count_nonzero(np.abs(cos1) >= mu_cut))
        one_sided_hits += int(np.count_nonzero(cos1 >= mu_cut))
        remaining -= take
    estimate = hits / n
    se = _binomial_se(estimate, n)
    threshold = min(1.0, 1.0 / (m * mu_cut * mu_cut))
    return McReport(
        estimate=estimate,
        std_error=se,
        n_used=n,
        threshold=threshold,
        verdict=_verdict(estimate, threshold, se, "<="),
        seed=cfg.seed,
        details={"one_sided_estimate": one_sided_hits / n, "m": m, "mu": mu_cut},
    )


def verify_blowup(m: int, sphere_set: SphereSet, epsilon: float, cfg: McConfig) -> McReport:
    """P(Y within angle pi/2 - theta + epsilon of the set) against 1 - epsilon."""
    if sphere_set.m != m:
        raise DomainError("set dimension does not match m")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    theta = sphere_set.effective_theta
    if theta <= 0.0:
        raise DomainError("set must have positive effective angle")
    t = HALF_PI - theta + epsilon
    expanded = sphere_set.expanded_intervals(max(t, 0.0))
    rng = trial_rng(cfg.seed, 0)
    n = cfg.samples_per_estimate
    rows = max(1, _CHUNK_ELEMENTS // m)
    hits = 0
    remaining = n
    while remaining > 0:
        take = min(rows, remaining)
        g = rng.standard_normal((take, m))
        cosang = np.clip(g @ sphere_set.axis / np.linalg.norm(g, axis=1), -1.0, 1.0)
        polar = np.arccos(cosang)
        member = np.zeros(take, dtype=bool)
        for lo, hi in expanded:
            member |= (polar >= lo) & (polar <= hi)
        hits += int(np.count_nonzero(member))
        remaining -= take
    estimate = hits / n
    se = _binomial_se(estimate, n)
    threshold = 1.0 - epsilon
    return McReport(
        estimate=estimate,
        std_error=se,
        n_used=n,
        threshold=threshold,
        verdict=_verdict(estimate, threshold, se, ">="),
        seed=cfg.seed,
        details={"neighborhood_angle": t, "effective_theta": theta, "m": m},
    )


def _isoperimetry_trials(
    trial_estimate, trials: int, log2_required: float, cfg: McConfig
) -> McReport:
    successes = 0
    margins = []
    for t in range(trials):
        log2_est, _ = trial_estimate(t)
        margin = log2_est - log2_required
        margins.append(margin)
        if margin > 0.0:
            successes += 1
    estimate = successes / trials
    se = _binomial_se(estimate, trials)
    threshold = 1.0 - cfg.epsilon
    finite = [x for x in margins if math.isfinite(x)]
    return McReport(
        estimate=estimate,
        std_error=se,
        n_used=trials,
        threshold=threshold,
        verdict=_verdict(estimate, threshold, se, ">="),
        seed=cfg.seed,
        details={
            "log2_required": log2_required,
            "margin_bits_min": min(margins) if margins else math.nan,
            "margin_bits_median": float(np.median(finite)) if finite else -math.inf,
            "successes": successes,
        },
    )


def verify_isoperimetry_sphere(
    m: int, sphere_set: SphereSet, omega: float, cfg: McConfig, n_scale: float = 1.0
) -> McReport:
    """Cap-intersection verification on the sphere.

    Per trial, a uniform Y is drawn, mu(A intersect Cap(Y, omega + slack))
    is estimated with cfg.samples_per_estimate importance samples, and the
    trial succeeds when the estimate exceeds (1 - epsilon) times the
    orthogonal-pole intersection volume V computed by quadrature.  The
    report compares the success fraction with 1 - epsilon.
    """
    if sphere_set.m != m:
        raise DomainError("set dimension does not match m")
    if m < 4:
        raise DomainError(f"need m >= 4, got {m}")
    theta = sphere_set.effective_theta
    if not 0.0 < theta <= HALF_PI:
        raise DomainError(f"effective angle must lie in (0, pi/2], got {theta}")
    if not 0.0 < omega <= HALF_PI:
        raise DomainError(f"omega must lie in (0, pi/2], got {omega}")
    if theta + omega <= HALF_PI:
        raise DomainError(
            f"need theta + omega > pi/2, got {theta} + {omega} = {theta + omega}"
        )
    radius = math.sqrt(m * n_scale)
    v_log2 = geometry.log_cap_intersection(m, n_scale, theta, omega).log2_value
    log2_required = math.log2(1.0 - cfg.epsilon) + v_log2
    beta = min(omega + cfg.slack, math.pi)

    def trial_estimate(t: int) -> tuple[float, float]:
        rng = trial_rng(cfg.seed, t)
        y = rng.standard_normal(m)
        return estimate_cap_intersection(
            sphere_set, y, beta, cfg.samples_per_estimate, rng, radius
        )

    report = _isoperimetry_trials(trial_estimate, cfg.trials, log2_required, cfg)
    report.details.update(
        {"m": m, "theta": theta, "omega": omega, "beta": beta, "log2_V": v_log2}
    )
    return report


def verify_isoperimetry_shell(
    shell_set: ShellSet,
    omega: float,
    cfg: McConfig,
    radial_law: str = "uniform",
) -> McReport:
    """Cap-intersection verification on a shell.

    Shell caps are radial cones, so the intersection volume factorizes into
    the angular intersection on the base sphere times the set's exact
    radial integral; only the angular factor is estimated by sampling.
    Y is drawn from a rotationally invariant law on the shell whose radial
    part is uniform-in-radius by default ("power" selects the density
    proportional to r^(m-1)); the intersection volume does not depend on
    the radial law, which only enters through the draw itself.
    """
    spec = shell_set.spec
    m = spec.m
    if m < 4:
        raise DomainError(f"need m >= 4, got {m}")
    if radial_law not in ("uniform", "power"):
        raise DomainError(f"radial law must be 'uniform' or 'power', got {radial_law!r}")
    theta = shell_set.effective_theta
    if not 0.0 < theta <= HALF_PI:
        raise DomainError(f"effective angle must lie in (0, pi/2], got {theta}")
    if not 0.0 < omega <= HALF_PI:
        raise DomainError(f"omega must lie in (0, pi/2], got {omega}")
    if theta + omega <= HALF_PI:
        raise DomainError(
            f"need theta + omega > pi/2, got {theta} + {omega} = {theta + omega}"
        )
    v_log2 = geometry.log_shellcap_intersection_bounds(spec, theta, omega).exact.log2_value
    log2_required = math.log2(1.0 - cfg.epsilon) + v_log2
    beta = min(omega + cfg.slack, math.pi)
    radius = shell_set.base_radius
    log2_radial = shell_set.log2_radial_part()
    r_lo, r_hi = spec.r_lower, spec.r_upper

    def draw_radius(rng: np.random.Generator) -> float:
        u = rng.random()
        if radial_law == "uniform":
            return r_lo + u * (r_hi - r_lo)
        t = m * math.log(r_lo / r_hi)
        base = math.exp(t) if t > -745.0 else 0.0
        return r_hi * (base + u * (1.0 - base)) ** (1.0 / m)

    def trial_estimate(t: int) -> tuple[float, float]:
        rng = trial_rng(cfg.seed, t)
        y = rng.standard_normal(m)
        _ = draw_radius(rng)  # part of the Y draw; the cone geometry ignores it
        est, se = estimate_cap_intersection(
            shell_set.angular, y, beta, cfg.samples_per_estimate, rng, radius
        )
        return est + log2_radial, se

    report = _isoperimetry_trials(trial_estimate, cfg.trials, log2_required, cfg)
    report.details.update(
        {
            "m": m,
            "theta": theta,
            "omega": omega,
            "beta": beta,
            "log2_V": v_log2,
            "radial_law": radial_law,
        }
    )
    return report
