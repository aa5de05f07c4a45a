"""Closed-form quantities: inclusion factors, estimator weights, variances, thresholds.

All functions are pure. Binomial coefficients go through an exact integer
path when the arguments are small and through ``math.lgamma`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DomainError",
    "VarianceBreakdown",
    "comb",
    "log_comb",
    "xi",
    "eta",
    "psi",
    "kappa",
    "hypergeom_pmf",
    "base_variance",
    "base_variance_factors",
    "multi_variance",
    "impr_variance_bound",
    "fd_variance_bound",
    "mascot_c_variance",
    "min_M_base",
    "min_M_impr",
    "min_M_fd",
]

_EXACT_LIMIT = 2000


class DomainError(ValueError):
    pass


def comb(n: int, k: int) -> int:
    """C(n, k) with C(n, k) = 0 outside 0 <= k <= n (so C(0, 0) = 1)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def log_comb(n: int, k: int) -> float:
    if k < 0 or n < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def xi(a: int, b: int, M: int) -> float:
    """Reciprocal of the probability that ``a`` given edges are all in a size-``M`` reservoir after ``b`` insertions."""
    if not 1 <= a <= min(M, b):
        raise DomainError(f"xi needs 1 <= a <= min(M, b); got a={a}, b={b}, M={M}")
    if b <= M:
        return 1.0
    out = 1.0
    for i in range(a):
        out *= (b - i) / (M - i)
    return out


def eta(t: int, M: int):
    """Per-triangle weight of the improved insertion-only estimator at time ``t``."""
    num = (t - 1) * (t - 2)
    den = M * (M - 1)
    if num <= den:
        return 1
    return num / den


def psi(a: int, b: float, c: int) -> float:
    """Random-pairing analogue of ``xi``: prod_{i<a} (c-i)/(b-i), for a <= b <= c.

    ``b`` may be real (the FD variance bound evaluates it at ``M(1-alpha')``).
    """
    if not a <= b <= c:
        raise DomainError(f"psi needs a <= b <= c; got a={a}, b={b}, c={c}")
    out = 1.0
    for i in range(a):
        out *= (c - i) / (b - i)
    return out


def hypergeom_pmf(j: int, s: int, d: int, draws: int, exact: bool | None = None) -> float:
    """Pr(j of the ``draws`` sampled items come from the ``s`` live ones, ``d`` dead ones)."""
    n = s + d
    if exact is None:
        exact = n <= _EXACT_LIMIT
    if exact:
        den = comb(n, draws)
        if den == 0:
            return 0.0
        return float(Fraction(comb(s, j) * comb(d, draws - j), den))
    lnum = log_comb(s, j) + log_comb(d, draws - j)
    if lnum == -math.inf:
        return 0.0
    return math.exp(lnum - log_comb(n, draws))


def kappa(s: int, d_i: int, d_o: int, M: int, exact: bool | None = None) -> float:
    """Probability that a random-pairing sample holds at least three edges.

    ``s`` live edges, ``d_i + d_o`` uncompensated deletions, capacity ``M``.
    """
    if min(s, d_i, d_o) < 0:
        raise DomainError("kappa needs non-negative s, d_i, d_o")
    d = d_i + d_o
    omega = min(M, s + d)
    if d == 0:
        # the sample is exactly min(M, s) edges
        return 1.0 if omega >= 3 else 0.0
    n = s + d
    if exact is None:
        exact = n <= _EXACT_LIMIT
    if exact:
        den = comb(n, omega)
        low = sum(comb(s, j) * comb(d, omega - j) for j in range(3))
        return float(Fraction(den - low, den))
    low = sum(hypergeom_pmf(j, s, d, omega, exact=False) for j in range(3))
    return max(0.0, 1.0 - low)


@dataclass(frozen=True)
class VarianceBreakdown:
    delta_term: float
    r_term: float
    w_term: float
    r2_term: float = 0.0

    @property
    def total(self) -> float:
        return self.delta_term + self.r_term + self.w_term + self.r2_term

    def as_dict(self):
        return {
            "delta_term": self.delta_term,
            "r_term": self.r_term,
            "w_term": self.w_term,
            "r2_term": self.r2_term,
            "total": self.total,
        }


def base_variance_factors(t, M):
    """Per-class factors ``(f, g, h, j)`` of the reservoir estimator's variance.

    ``f`` is the variance of one triangle's indicator times ``xi``; ``g``,
    ``h`` and ``j`` are the covariances of one ordered pair of triangles
    sharing one edge, no edge, and two edges respectively.
    """
    x = xi(3, t, M)
    f = x - 1
    g = x * (M - 3) * (M - 4) / ((t - 3) * (t - 4)) - 1
    h = x * (M - 3) * (M - 4) * (M - 5) / ((t - 3) * (t - 4) * (t - 5)) - 1
    j = x * (M - 3) / (t - 3) - 1
    return f, g, h, j


def base_variance(total, r, w, t, M) -> VarianceBreakdown:
    """Exact variance of the reservoir estimator (zero while ``t <= M``).

    ``r`` and ``w`` are unordered pair counts; each unordered pair contributes
    two ordered covariance terms.
    """
    if t <= M:
        return VarianceBreakdown(0.0, 0.0, 0.0)
    if M < 6:
        raise DomainError("variance formula needs M >= 6")
    f, g, h, _ = base_variance_factors(t, M)
    return VarianceBreakdown(total * f, 2 * r * g, 2 * w * h)


def multi_variance(total, r1, r2, q, t, M) -> VarianceBreakdown:
    """Multigraph version: ``r2`` counts unordered triangle pairs sharing two edges."""
    if t <= M:
        return VarianceBreakdown(0.0, 0.0, 0.0)
    if M < 6:
        raise DomainError("variance formula needs M >= 6")
    f, g, h, j = base_variance_factors(t, M)
    return VarianceBreakdown(total * f, 2 * r1 * g, 2 * q * h, 2 * r2 * j)


def impr_variance_bound(total, z, t, M) -> float:
    if t <= M:
        return 0.0
    return total * (eta(t, M) - 1) + z * (t - 1 - M) / M


def fd_min_memory(s, alpha, alpha_prime) -> float:
    """Smallest capacity for which the FD variance bound applies."""
    return 7 * math.log(s) / (2 * math.sqrt(alpha_prime - alpha))


def fd_variance_bound(total, r, s, M, alpha, alpha_prime, kappa_val) -> float:
    """Upper bound on the FD estimator's variance when ``d <= alpha * s``."""
    if not 0 <= alpha < alpha_prime < 1:
        raise DomainError("need 0 <= alpha < alpha_prime < 1")
    if s < M:
        raise DomainError(f"bound needs s >= M (s={s}, M={M})")
    need = fd_min_memory(s, alpha, alpha_prime)
    if M < need:
        raise DomainError(f"bound needs M >= {need:.4g} (7 ln s / (2 sqrt(alpha' - alpha)))")
    if kappa_val <= 0:
        raise DomainError("kappa must be positive")
    b = M * (1 - alpha_prime)
    p3 = psi(3, b, s)
    p5 = psi(5, b, s)
    inner = total * (p3 - 1) + 2 + r * (p3 * p3 / p5 - 1)
    return inner / kappa_val**2


def mascot_c_variance(total, r, p) -> float:
    """Variance of ``tau / p**3`` under independent edge sampling; ``r`` counts unordered pairs."""
    if not 0 < p <= 1:
        raise DomainError("p must be in (0, 1]")
    return total * (p**-3 - 1) + 2 * r * (p**-1 - 1)


# --------------------------------------------------------------------------
# memory thresholds for (eps, delta) guarantees


def _check_eps_delta(eps, delta):
    if not (0 < eps < 1 and 0 < delta < 1):
        raise DomainError("eps and delta must lie in (0, 1)")


def _smallest_int_above(x: float) -> int:
    return math.floor(x) + 1


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1 / 3), x)


def min_M_base_bound(eps, delta, h, total, t) -> float:
    _check_eps_delta(eps, delta)
    if total <= 0:
        raise DomainError("needs a positive triangle count")
    k = 3 * h + 1
    phi = _cbrt(8 / eps**2 * k / total * math.log(k * math.e / delta))
    x = t * phi
    lg = math.log(x)
    first = x * (1 + 0.5 * _cbrt(lg * lg))
    return max(first, 12 / eps + math.e**2, 25.0)


def min_M_base(eps, delta, h, total, t) -> int:
    """Smallest M meeting the reservoir estimator's concentration condition (``M >= bound``)."""
    return math.ceil(min_M_base_bound(eps, delta, h, total, t))


def min_M_impr_bound(eps, delta, z, total, t) -> float:
    _check_eps_delta(eps, delta)
    if total <= 0:
        raise DomainError("needs a positive triangle count")
    c = delta * eps**2 * total
    first = math.sqrt(2 * (t - 1) * (t - 2) / (c + 2) + 0.25) + 0.5
    second = 2 * z * (t - 1) / (c * total + 2 * z) if z else 0.0
    return max(first, second)


def min_M_impr(eps, delta, z, total, t) -> int:
    """Smallest M strictly above the improved estimator's Chebyshev threshold."""
    return _smallest_int_above(min_M_impr_bound(eps, delta, z, total, t))


def min_M_fd_bound(eps, delta, r, total, s, kappa_val, alpha, alpha_prime) -> float:
    _check_eps_delta(eps, delta)
    if not 0 <= alpha < alpha_prime < 1:
        raise DomainError("need 0 <= alpha < alpha_prime < 1")
    if total <= 0:
        raise DomainError("needs a positive triangle count")
    scale = 1 / (1 - alpha_prime)
    first = 7 * math.log(s) / math.sqrt(alpha_prime - alpha)
    den2 = delta * eps**2 * total * kappa_val**2 + 2 * (total - 2) / total
    second = scale * (_cbrt(2 * s * (s - 1) * (s - 2) / den2) + 2)
    if r:
        third = scale / 3 * (r * s / (delta * eps**2 * total**2 * kappa_val**-2 + 2 * r))
    else:
        third = 0.0
    return max(first, second, third)


def min_M_fd(eps, delta, r, total, s, kappa_val, alpha, alpha_prime) -> int:
    return _smallest_int_above(min_M_fd_bound(eps, delta, r, total, s, kappa_val, alpha, alpha_prime))
