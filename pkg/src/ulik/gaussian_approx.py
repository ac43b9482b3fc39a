"""Gaussian building blocks of the interference approximation: region moments
of the pathloss-difference variable, the lognormal-times-exponential Gaussian
surrogate, the Berry-Esseen certificate tau and the per-interferer Gaussian.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DegenerateGeometryError, ValidationError, ZeroVarianceError

BERRY_ESSEEN_C0 = 0.56
# Gaussian surrogate for S + 10*log10(H), H ~ exp(1): shift the mean and
# widen the variance by fixed dB offsets.
MEAN_OFFSET_DB = -2.5
STD_OFFSET_DB = 5.57
# The surrogate is only rated accurate above this combined shadowing variance.
SURROGATE_MIN_VARIANCE = 36.0

DEFAULT_TAU_THRESHOLD = 0.01


class SurrogateAccuracyWarning(UserWarning):
    """Combined shadowing variance too small for the rated surrogate accuracy."""


@dataclass(frozen=True)
class GaussianApprox:
    """(mean dB, variance dB^2) of a dB-domain Gaussian approximation."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValidationError(f"variance must be nonnegative, got {self.variance}")


@dataclass(frozen=True)
class RegionMoments:
    mu_l: float
    var_l: float
    abs3_l: float
    std_errors: tuple[float, float, float]
    sample_count: int

    def __post_init__(self):
        if self.var_l < 0 or self.abs3_l < 0:
            raise ValidationError("moments must be nonnegative")
        # Lyapunov: E|X|^3 >= (E X^2)^(3/2); holds exactly for sample moments.
        if self.abs3_l < self.var_l**1.5 * (1 - 1e-9):
            raise ValidationError(
                f"third absolute moment {self.abs3_l} violates the Lyapunov "
                f"bound {self.var_l ** 1.5}"
            )


@dataclass(frozen=True)
class TauCertificate:
    tau: float
    threshold: float
    passes: bool


def lognormal_exp_gaussian(s_stats: GaussianApprox) -> GaussianApprox:
    """Gaussian surrogate for S + 10*log10(H) with S ~ N(s_stats), H ~ exp(1)."""
    if not math.isfinite(s_stats.mean):
        raise ValidationError("combined shadowing mean must be finite")
    if s_stats.variance <= SURROGATE_MIN_VARIANCE:
        warnings.warn(
            f"surrogate rated accurate only for variance > {SURROGATE_MIN_VARIANCE} "
            f"dB^2, got {s_stats.variance}",
            SurrogateAccuracyWarning,
            stacklevel=2,
        )
    return GaussianApprox(
        mean=s_stats.mean + MEAN_OFFSET_DB,
        variance=s_stats.variance + STD_OFFSET_DB**2,
    )


def pathloss_difference(xs, ys, own_bs, victim_bs, params, pc):
    """The dB-domain variable (eta-1)*A + alpha*log10(d_own^eta / d_victim)."""
    d_own = np.hypot(xs - own_bs.x, ys - own_bs.y)
    d_vic = np.hypot(xs - victim_bs.x, ys - victim_bs.y)
    if np.any(d_own <= 0) or np.any(d_vic <= 0):
        raise DegenerateGeometryError("sampled UE position coincides with a BS")
    return (pc.eta - 1.0) * params.a_db + params.alpha * (
        pc.eta * np.log10(d_own) - np.log10(d_vic)
    )


def region_moments(
    region: geometry.Region,
    own_bs: geometry.Point,
    victim_bs: geometry.Point,
    params,
    pc,
    n: int,
    rng: np.random.Generator,
) -> RegionMoments:
    """Monte Carlo mean / variance / third absolute central moment of the
    pathloss-difference variable over a uniform UE position in the region.

    Central moments are taken against the estimated mean, over the same
    sample set (two passes).
    """
    xs, ys = geometry.sample_uniform_xy(region, rng, n)
    lvals = pathloss_difference(xs, ys, own_bs, victim_bs, params, pc)
    mu = float(lvals.mean())
    centered = lvals - mu
    sq = centered**2
    cu = np.abs(centered) ** 3
    var = float(sq.mean())
    abs3 = float(cu.mean())
    rt = math.sqrt(n)
    errs = (
        float(lvals.std() / rt),
        float(sq.std() / rt),
        float(cu.std() / rt),
    )
    return RegionMoments(mu_l=mu, var_l=var, abs3_l=abs3, std_errors=errs, sample_count=n)


def tau(
    moments: RegionMoments,
    g: GaussianApprox,
    threshold: float = DEFAULT_TAU_THRESHOLD,
) -> TauCertificate:
    """Berry-Esseen certificate bounding the CDF gap of the Gaussian
    approximation of the per-interferer dB interference."""
    denom_var = moments.var_l + g.variance
    if denom_var <= 0:
        raise ZeroVarianceError("tau undefined: total variance is zero")
    t = BERRY_ESSEEN_C0 * moments.abs3_l / denom_var**1.5
    return TauCertificate(tau=t, threshold=threshold, passes=t <= threshold)


def interferer_gaussian(
    p0_dbm: float, moments: RegionMoments, g: GaussianApprox
) -> GaussianApprox:
    """Gaussian approximation of one interferer's received power in dBm."""
    return GaussianApprox(
        mean=p0_dbm + moments.mu_l + g.mean,
        variance=moments.var_l + g.variance,
    )
