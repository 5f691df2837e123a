"""Numerical core for fitting an availability profile to a target capacity factor.

A profile is a series of per-unit values p_i in [0, 1]. Raising every
positive value to a common exponent x >= 0 moves the profile mean

    S(x) = (1/m) * sum(p_i ** x  for p_i > 0)

monotonically from r/m at x = 0 (r = count of nonzero values) down to
n/m as x grows (n = count of values equal to 1). Fitting a target mean
mu therefore reduces to a scalar root solve of S(x) = mu, which this
module performs with a doubling bracket search followed by bisection.
Targets outside the reachable band (n/m, r/m] are clamped to x = 0 or
to a large fallback exponent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BracketNotFoundError",
    "EmptyProfileError",
    "Feasibility",
    "FitOptions",
    "FitOutcome",
    "FitStatus",
    "MaxIterationsExceededError",
    "NonFiniteValueError",
    "Profile",
    "ProfileFitError",
    "ProfileStats",
    "ProfileValidationError",
    "TargetOutOfRangeError",
    "ValueOutOfRangeError",
    "apply_exponent",
    "bisect_root",
    "classify_feasibility",
    "find_search_interval",
    "find_solution",
    "mean_power",
    "mean_power_derivative",
    "profile_stats",
    "sigma_pow",
    "validate_profile",
]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class ProfileFitError(Exception):
    """Base class for every error raised by this package."""


class ProfileValidationError(ProfileFitError):
    """A candidate profile violates the per-unit value contract."""


class EmptyProfileError(ProfileValidationError):
    def __init__(self, message: str = "profile contains no values"):
        super().__init__(message)


class NonFiniteValueError(ProfileValidationError):
    """A profile value is NaN or infinite."""

    def __init__(self, index: int, line: int | None = None):
        self.index = index
        self.line = line
        where = f"line {line}" if line is not None else f"index {index}"
        super().__init__(f"non-finite profile value at {where}")


class ValueOutOfRangeError(ProfileValidationError):
    """A profile value lies outside [0, 1]."""

    def __init__(self, index: int, value: float, line: int | None = None):
        self.index = index
        self.value = value
        self.line = line
        where = f"line {line}" if line is not None else f"index {index}"
        super().__init__(f"profile value {value!r} at {where} is outside [0, 1]")


class TargetOutOfRangeError(ProfileFitError):
    """A target capacity factor is not strictly between 0 and 1."""

    def __init__(self, value: float, path: str | None = None):
        self.value = value
        self.path = path
        origin = f" for {path}" if path else ""
        super().__init__(f"target capacity factor {value!r}{origin} must lie in (0, 1)")


class BracketNotFoundError(ProfileFitError):
    """The doubling search hit the exponent cap without straddling the target.

    Raised for targets that pass the feasibility test but need an exponent
    beyond the configured cap, e.g. profiles whose values sit just below 1.
    """

    def __init__(self, mu: float, limit: float, last_mean: float):
        self.mu = mu
        self.limit = limit
        self.last_mean = last_mean
        super().__init__(
            f"no sign change up to exponent {limit:g}: target {mu:g} "
            f"vs mean {last_mean:g} at the cap; the target may only be "
            f"reachable with a larger exponent cap"
        )


class MaxIterationsExceededError(ProfileFitError):
    def __init__(self, max_iter: int):
        self.max_iter = max_iter
        super().__init__(f"bisection did not converge within {max_iter} iterations")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Profile:
    """A validated per-unit availability series.

    Holds a read-only float64 array with every value in [0, 1]. Construct
    through :func:`validate_profile`; code that builds values known to be
    in range (e.g. :func:`apply_exponent`) may construct directly.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ProfileStats:
    """Counts that bound the reachable mean band (asymptote, max_reachable]."""

    m: int      # total number of values
    r: int      # values strictly greater than 0
    n: int      # values exactly equal to 1
    mean: float  # arithmetic mean of all values, the current capacity factor

    @property
    def max_reachable(self) -> float:
        """Largest attainable mean, r/m: the value of S at exponent 0."""
        return self.r / self.m

    @property
    def asymptote(self) -> float:
        """Limit of the mean as the exponent grows, n/m."""
        return self.n / self.m


@dataclass(frozen=True)
class FitOptions:
    """Knobs for the root solve and its clamping fallback."""

    target_mu: float = 0.6
    residual_tol: float = 1e-10
    interval_tol: float = 1e-12
    max_bisect_iter: int = 200
    large_exponent: float = 1000.0

    def __post_init__(self):
        if not 0.0 < self.target_mu < 1.0:
            raise TargetOutOfRangeError(self.target_mu)
        if self.residual_tol <= 0.0:
            raise ValueError("residual_tol must be positive")
        if self.interval_tol <= 0.0:
            raise ValueError("interval_tol must be positive")
        if self.max_bisect_iter < 1:
            raise ValueError("max_bisect_iter must be a positive integer")
        if self.large_exponent <= 0.0:
            raise ValueError("large_exponent must be positive")


class Feasibility(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE_HIGH = "infeasible_high"   # target above r/m, the reachable maximum
    INFEASIBLE_LOW = "infeasible_low"     # target at or below the asymptote n/m


class FitStatus(enum.Enum):
    EXACT = "exact"
    CLAMPED_LOW = "clamped_low"    # exponent forced to 0
    CLAMPED_HIGH = "clamped_high"  # exponent forced to the large fallback


@dataclass(frozen=True)
class FitOutcome:
    """Result of a fit: the exponent, what it achieves, and how it was found."""

    exponent: float
    achieved_mean: float
    status: FitStatus
    iterations: int
    bracket: tuple[float, float] | None = None


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def validate_profile(values) -> Profile:
    """Check a sequence of numbers and wrap it as a :class:`Profile`.

    Every value must be finite and within [0, 1], and the sequence must be
    non-empty. Input order is preserved. Raises :class:`EmptyProfileError`,
    :class:`NonFiniteValueError` or :class:`ValueOutOfRangeError` on the
    first offending value.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D sequence of values, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyProfileError()
    finite = np.isfinite(arr)
    if not finite.all():
        idx = int(np.argmin(finite))
        raise NonFiniteValueError(idx)
    bad = (arr < 0.0) | (arr > 1.0)
    if bad.any():
        idx = int(np.argmax(bad))
        raise ValueOutOfRangeError(idx, float(arr[idx]))
    return Profile(arr)


def profile_stats(p: Profile) -> ProfileStats:
    """Count total, nonzero and exactly-one values, and the current mean."""
    v = p.values
    m = int(v.size)
    r = int(np.count_nonzero(v > 0.0))
    n = int(np.count_nonzero(v == 1.0))
    return ProfileStats(m=m, r=r, n=n, mean=float(v.sum() / m))


def sigma_pow(p: float, x: float) -> float:
    """p ** x with the continuous zero convention: 0 for p = 0, any x.

    In particular sigma_pow(0, 0) is 0, overriding the usual 0 ** 0 == 1,
    so that x -> sigma_pow(p, x) is continuous for every p in [0, 1].
    """
    return float(p) ** x if p > 0.0 else 0.0


def mean_power(p: Profile, x: float) -> float:
    """Transformed mean S(x) = (1/m) * sum of p_i ** x over nonzero values.

    Division is by the total count m, zeros included, so the result lies
    in [0, r/m]. Underflow of tiny bases at large exponents rounds to 0,
    which is the correct limit.
    """
    v = p.values
    pos = v[v > 0.0]
    if pos.size == 0:
        return 0.0
    return float(np.sum(pos ** x) / v.size)


def mean_power_derivative(p: Profile, x: float) -> float:
    """Slope of the transformed mean: (1/m) * sum of p_i**x * ln(p_i).

    Nonpositive everywhere; zero exactly when every nonzero value is 1.
    Used for diagnostics and test oracles only; the root solve itself is
    derivative-free.
    """
    v = p.values
    pos = v[v > 0.0]
    if pos.size == 0:
        return 0.0
    return float(np.sum(pos ** x * np.log(pos)) / v.size)


def classify_feasibility(stats: ProfileStats, mu: float) -> Feasibility:
    """Decide whether S(x) = mu has a root: feasible iff n/m < mu <= r/m."""
    if mu > stats.max_reachable:
        return Feasibility.INFEASIBLE_HIGH
    if mu <= stats.asymptote:
        return Feasibility.INFEASIBLE_LOW
    return Feasibility.FEASIBLE


def find_search_interval(
    p: Profile, mu: float, opts: FitOptions | None = None
) -> tuple[float, float]:
    """Bracket the root of S(x) - mu on the doubling sequence 0, 1, 2, 4, 8, ...

    Returns consecutive sequence points (a, b) with a sign change of
    S(x) - mu between them, or a degenerate (v, v) when a sequence point
    hits the target exactly. Probing stops once the next point would
    exceed ``opts.large_exponent``; if no sign change occurred by then,
    :class:`BracketNotFoundError` is raised.
    """
    if opts is None:
        opts = FitOptions()
    fa = mean_power(p, 0.0) - mu
    if fa == 0.0:
        return (0.0, 0.0)
    a = 0.0
    b = 1.0
    while b <= opts.large_exponent:
        fb = mean_power(p, b) - mu
        if fb == 0.0:
            return (b, b)
        if fa * fb < 0.0:
            return (a, b)
        a, fa = b, fb
        b *= 2.0
    raise BracketNotFoundError(mu, opts.large_exponent, last_mean=fa + mu)


def bisect_root(
    p: Profile,
    mu: float,
    a: float,
    b: float,
    opts: FitOptions | None = None,
) -> tuple[float, int]:
    """Bisect S(x) - mu on a sign-changing bracket [a, b].

    Stops when |S(x) - mu| <= residual_tol or the bracket has shrunk to
    interval_tol. A degenerate bracket (a == b) returns a immediately with
    zero iterations. Raises :class:`MaxIterationsExceededError` if neither
    tolerance is met within ``opts.max_bisect_iter`` halvings.
    """
    if opts is None:
        opts = FitOptions()
    if a > b:
        raise ValueError(f"invalid bracket: a={a!r} > b={b!r}")
    if a == b:
        return (float(a), 0)
    fa = mean_power(p, a) - mu
    if abs(fa) <= opts.residual_tol:
        return (float(a), 0)
    fb = mean_power(p, b) - mu
    if abs(fb) <= opts.residual_tol:
        return (float(b), 0)
    if fa * fb > 0.0:
        raise ValueError(
            f"bracket [{a!r}, {b!r}] does not straddle the target mean {mu!r}"
        )
    lo, hi, flo = float(a), float(b), fa
    for iteration in range(1, opts.max_bisect_iter + 1):
        mid = 0.5 * (lo + hi)
        fmid = mean_power(p, mid) - mu
        if abs(fmid) <= opts.residual_tol:
            return (mid, iteration)
        if (flo > 0.0) == (fmid > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= opts.interval_tol:
            return (0.5 * (lo + hi), iteration)
    raise MaxIterationsExceededError(opts.max_bisect_iter)


def find_solution(
    p, mu: float | None = None, opts: FitOptions | None = None
) -> FitOutcome:
    """Find the exponent whose transformed mean matches the target.

    ``p`` may be a :class:`Profile` or any raw sequence, which is validated
    first. ``mu`` defaults to ``opts.target_mu``. Feasible targets are
    solved exactly (bracket + bisection); a target above r/m clamps to
    exponent 0, a target at or below n/m clamps to ``opts.large_exponent``.
    """
    if not isinstance(p, Profile):
        p = validate_profile(p)
    if opts is None:
        opts = FitOptions()
    mu = opts.target_mu if mu is None else float(mu)
    if not 0.0 < mu < 1.0:
        raise TargetOutOfRangeError(mu)

    stats = profile_stats(p)
    feasibility = classify_feasibility(stats, mu)
    if feasibility is Feasibility.INFEASIBLE_HIGH:
        return FitOutcome(
            exponent=0.0,
            achieved_mean=mean_power(p, 0.0),
            status=FitStatus.CLAMPED_LOW,
            iterations=0,
        )
    if feasibility is Feasibility.INFEASIBLE_LOW:
        x = float(opts.large_exponent)
        return FitOutcome(
            exponent=x,
            achieved_mean=mean_power(p, x),
            status=FitStatus.CLAMPED_HIGH,
            iterations=0,
        )

    a, b = find_search_interval(p, mu, opts)
    x, iterations = bisect_root(p, mu, a, b, opts)
    return FitOutcome(
        exponent=float(x),
        achieved_mean=mean_power(p, x),
        status=FitStatus.EXACT,
        iterations=iterations,
        bracket=(a, b),
    )


def apply_exponent(p, x: float) -> Profile:
    """Raise every value to the exponent, keeping zeros at zero.

    Elementwise :func:`sigma_pow`; order and length are preserved and the
    result is again a valid profile (values stay within [0, 1] for x >= 0).
    """
    if not isinstance(p, Profile):
        p = validate_profile(p)
    if x < 0.0:
        raise ValueError(f"exponent must be nonnegative, got {x!r}")
    v = p.values
    out = np.zeros_like(v)
    pos = v > 0.0
    out[pos] = v[pos] ** x
    return Profile(out)
