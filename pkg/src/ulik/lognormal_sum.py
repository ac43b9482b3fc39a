"""Single-lognormal fit to a sum of independent lognormals by matching the
Gauss-Hermite approximated MGF at two design points.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidDesignPointsError, UnsupportedOrderError, ValidationError
from .gaussian_approx import GaussianApprox

ZETA = 10.0 / math.log(10.0)

RESIDUAL_TOL = 1e-8
# Newton polishes well past the contract tolerance so that parameters, not
# just residuals, are recovered to near machine precision.
_TARGET_TOL = 1e-13
_MAX_NEWTON_ITER = 200


@dataclass(frozen=True)
class GaussHermiteRule:
    order: int
    abscissas: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class LognormalFit:
    mu_q: float
    var_q: float
    residuals: tuple[float, float]  # relative MGF mismatch at (s1, s2)
    iterations: int
    converged: bool


def gh_rule(m0: int) -> GaussHermiteRule:
    """Physicists' Gauss-Hermite nodes and weights (weight function e^{-x^2})."""
    if not 2 <= m0 <= 64:
        raise UnsupportedOrderError(f"Gauss-Hermite order must be in [2, 64], got {m0}")
    a, w = np.polynomial.hermite.hermgauss(m0)
    rt_pi = math.sqrt(math.pi)
    if abs(w.sum() - rt_pi) > 1e-12 or abs((w * a**2).sum() - rt_pi / 2) > 1e-12:
        raise UnsupportedOrderError(f"Gauss-Hermite rule of order {m0} failed moment checks")
    return GaussHermiteRule(order=m0, abscissas=a, weights=w)


def _log_mgf(mu: float, var: float, s: float, rule: GaussHermiteRule) -> float:
    """log of the GH-approximated MGF of the lognormal 10^(X/10), X ~ N(mu, var).

    When the MGF is close to 1 (weak components, the interesting regime for
    dense-network sums) log(MGF) is of order -s*E[X] and must keep full
    relative precision, so it is formed with expm1/log1p; the logsumexp route
    takes over when the MGF itself is small.
    """
    z = np.exp((math.sqrt(2.0 * max(var, 0.0)) * rule.abscissas + mu) / ZETA)
    t = float(np.dot(rule.weights, np.expm1(-s * z))) / math.sqrt(math.pi)
    if t > -0.5:
        return math.log1p(t)
    log_terms = np.log(rule.weights / math.sqrt(math.pi)) - s * z
    return float(logsumexp(log_terms))


def lognormal_mgf(mu: float, var: float, s: float, rule: GaussHermiteRule) -> float:
    """GH-approximated MGF evaluated at s > 0; exact exp(-s*10^(mu/10)) at var=0."""
    if s <= 0:
        raise InvalidDesignPointsError(f"MGF design point must be positive, got {s}")
    if var < 0:
        raise ValidationError(f"variance must be nonnegative, got {var}")
    return math.exp(_log_mgf(mu, var, s, rule))


def fenton_wilkinson(components: Sequence[GaussianApprox]) -> tuple[float, float]:
    """Moment-matched (mu, var) seed for the fit: match the linear-domain mean
    and variance of the sum of lognormals."""
    mus = np.array([c.mean for c in components])
    vs = np.array([c.variance for c in components])
    m = np.exp(mus / ZETA + vs / (2 * ZETA**2))
    v = (np.exp(vs / ZETA**2) - 1.0) * np.exp(2 * mus / ZETA + vs / ZETA**2)
    m_tot = m.sum()
    v_tot = v.sum()
    var_q = ZETA**2 * math.log1p(v_tot / m_tot**2)
    mu_q = ZETA * math.log(m_tot) - var_q / (2 * ZETA)
    return mu_q, var_q


def _residuals(mu, log_sigma, targets, s_points, rule):
    """Log-MGF mismatch at the design points, scaled by the target magnitude.

    The scaling matters: for sums of many weak components both MGF targets sit
    just below 1 and all information lives in log(MGF) ~ -1e-8, so an absolute
    tolerance on the MGF would accept fits with arbitrary variance.
    """
    var = math.exp(2.0 * log_sigma)
    return np.array(
        [
            (_log_mgf(mu, var, s, rule) - t) / max(abs(t), 1e-300)
            for s, t in zip(s_points, targets)
        ]
    )


def _jacobian(mu, log_sigma, targets, s_points, rule):
    h_mu = 1e-6 * max(1.0, abs(mu))
    h_ls = 1e-6
    jac = np.empty((2, 2))
    jac[:, 0] = (
        _residuals(mu + h_mu, log_sigma, targets, s_points, rule)
        - _residuals(mu - h_mu, log_sigma, targets, s_points, rule)
    ) / (2 * h_mu)
    jac[:, 1] = (
        _residuals(mu, log_sigma + h_ls, targets, s_points, rule)
        - _residuals(mu, log_sigma - h_ls, targets, s_points, rule)
    ) / (2 * h_ls)
    return jac


def _solve_mu_for_target(log_sigma, target, s, rule):
    # log MGF is strictly decreasing in mu; bisect on a wide bracket.
    var = math.exp(2.0 * log_sigma)
    lo, hi = -500.0, 500.0
    flo = _log_mgf(lo, var, s, rule) - target
    fhi = _log_mgf(hi, var, s, rule) - target
    if flo < 0 or fhi > 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (_log_mgf(mid, var, s, rule) - target) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bisection_fallback(targets, s_points, rule):
    """Nested bisection: outer on log sigma, inner on mu via the first equation."""

    def outer(ls):
        mu = _solve_mu_for_target(ls, targets[0], s_points[0], rule)
        if mu is None:
            return None, None
        r2 = _residuals(mu, ls, targets, s_points, rule)[1]
        return mu, r2

    grid = np.linspace(math.log(1e-6), math.log(1e3), 200)
    prev_ls, prev_r2 = None, None
    for ls in grid:
        mu, r2 = outer(ls)
        if r2 is None:
            continue
        if prev_r2 is not None and (r2 == 0 or (r2 > 0) != (prev_r2 > 0)):
            lo, hi = prev_ls, ls
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                _, rm = outer(mid)
                if rm is None:
                    break
                if (rm > 0) == (prev_r2 > 0):
                    lo = mid
                else:
                    hi = mid
            ls_star = 0.5 * (lo + hi)
            mu_star, _ = outer(ls_star)
            return mu_star, ls_star
        prev_ls, prev_r2 = ls, r2
    return None, None


def fit_sum(
    components: Sequence[GaussianApprox],
    s1: float = 1.0,
    s2: float = 0.1,
    rule: GaussHermiteRule | None = None,
    max_iter: int = _MAX_NEWTON_ITER,
    ref_dbm: float | None = None,
) -> LognormalFit:
    """Fit (mu_q, var_q) so the fitted MGF matches the product of component
    MGFs at the two design points, evaluated on components normalized to a
    reference level (see below).

    ref_dbm sets the dB level treated as 0 dB during the fit, e.g. the
    cell-edge receive target of the network the components came from.  Left
    as None, the aggregate linear-domain mean level is used, which makes the
    fit exactly equivariant under a common dB shift of all components.

    Damped Newton in (mu, log sigma) from a Fenton-Wilkinson seed; falls back
    to nested bisection if Newton stalls.  A fit with converged=False carries
    the best iterate found.
    """
    if not components:
        raise ValidationError("need at least one component")
    if not 0 < s2 < s1:
        raise InvalidDesignPointsError(f"need 0 < s2 < s1, got s1={s1}, s2={s2}")
    if rule is None:
        rule = gh_rule(12)
    s_points = (s1, s2)
    # Work on components normalized to a reference level.  At raw dBm scale
    # (1e-10 mW interferers) both MGF targets collapse to 1 - O(1e-8) and the
    # design points carry no shape information; the rescaling moves them to
    # the informative regime.
    if ref_dbm is not None:
        ref = float(ref_dbm)
    else:
        ref = ZETA * logsumexp(
            [c.mean / ZETA + c.variance / (2 * ZETA**2) for c in components]
        )
    norm = [GaussianApprox(c.mean - ref, c.variance) for c in components]
    # Product of component MGFs, accumulated in the log domain.
    targets = [
        sum(_log_mgf(c.mean, c.variance, s, rule) for c in norm) for s in s_points
    ]

    if all(c.variance == 0 for c in components):
        # Sum of constants: exact degenerate lognormal.
        total_mw = sum(10 ** (c.mean / 10.0) for c in norm)
        mu_q = ref + 10.0 * math.log10(total_mw)
        res = _residuals(mu_q - ref, -400.0, targets, s_points, rule)  # exp(-800) == 0.0
        rel = tuple(
            float(math.expm1(r * abs(t))) for r, t in zip(res, targets)
        )
        ok = max(abs(r) for r in res) <= RESIDUAL_TOL
        return LognormalFit(
            mu_q=mu_q,
            var_q=0.0,
            residuals=rel,
            iterations=0,
            converged=ok and max(abs(r) for r in rel) <= RESIDUAL_TOL,
        )

    mu0, var0 = fenton_wilkinson(norm)
    ls = 0.5 * math.log(max(var0, 1e-16))
    mu = mu0
    best = (mu, ls, float("inf"))
    iterations = 0
    for _ in range(max_iter):
        f = _residuals(mu, ls, targets, s_points, rule)
        norm = float(np.max(np.abs(f)))
        if norm < best[2]:
            best = (mu, ls, norm)
        if norm <= _TARGET_TOL:
            break
        iterations += 1
        jac = _jacobian(mu, ls, targets, s_points, rule)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        for _ in range(40):
            f_new = _residuals(mu + lam * step[0], ls + lam * step[1], targets, s_points, rule)
            if float(np.max(np.abs(f_new))) < norm:
                mu += lam * step[0]
                ls += lam * step[1]
                improved = True
                break
            lam *= 0.5
        if not improved:
            break

    mu, ls, norm = best
    if norm > RESIDUAL_TOL:
        mu_b, ls_b = _bisection_fallback(targets, s_points, rule)
        if mu_b is not None:
            norm_b = float(np.max(np.abs(_residuals(mu_b, ls_b, targets, s_points, rule))))
            if norm_b < norm:
                mu, ls, norm = mu_b, ls_b, norm_b

    res = _residuals(mu, ls, targets, s_points, rule)
    rel = (
        float(math.expm1(res[0] * abs(targets[0]))),
        float(math.expm1(res[1] * abs(targets[1]))),
    )
    var_q = math.exp(2.0 * ls)
    if var_q < 1e-12:
        var_q = 0.0
    ok = float(np.max(np.abs(res))) <= RESIDUAL_TOL
    return LognormalFit(
        mu_q=float(ref + mu),
        var_q=float(var_q),
        residuals=rel,
        iterations=iterations,
        converged=ok and max(abs(r) for r in rel) <= RESIDUAL_TOL,
    )
