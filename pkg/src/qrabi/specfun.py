"""Numerically stable scalar special functions.

Everything here is needed by the closed-form strong-coupling formulas:
Laguerre and associated Laguerre polynomials (band energies and displacement
matrix elements), integer-order Bessel functions of the first kind (the
large-photon-number limit of the Rabi frequencies), and log-factorials
(every factorial ratio is evaluated in log space, since the formulas are
used at photon numbers where n! overflows any fixed-width float).

Evaluations that can leave the float range are available in a split
representation, ``value * exp(log_scale)``, via the ``*_report`` variants.
"""

import math
from dataclasses import dataclass

from .errors import SpecfunOverflowError, ValidationError

__all__ = [
    "PolyEvalReport",
    "log_factorial",
    "laguerre",
    "laguerre_report",
    "assoc_laguerre",
    "assoc_laguerre_report",
    "bessel_j",
    "bessel_j_report",
    "laguerre_bessel_limit_error",
]

# Magnitude at which the Laguerre recurrence is renormalized. Far from the
# float limits so intermediate recurrence steps cannot overflow.
_RESCALE_LIMIT = 1e250

# Exact ln(n!) by cumulative summation for small n; lgamma above.
_EXACT_LOG_FACTORIAL_MAX = 256
_LF_TABLE = [0.0]
for _k in range(1, _EXACT_LOG_FACTORIAL_MAX + 1):
    _LF_TABLE.append(_LF_TABLE[-1] + math.log(_k))


@dataclass(frozen=True)
class PolyEvalReport:
    """Result of a polynomial/series evaluation with overflow protection.

    The represented number is ``value * exp(log_scale)``. ``method`` records
    which evaluation scheme produced it ("recurrence", "series" or
    "asymptotic") so cross-checks can tell independent routes apart.
    """

    value: float
    log_scale: float
    method: str

    def reconstruct(self) -> float:
        """Collapse to a plain float. May overflow to inf or underflow to 0."""
        if self.value == 0.0:
            return 0.0
        try:
            return self.value * math.exp(self.log_scale)
        except OverflowError:
            return math.copysign(math.inf, self.value)

    @property
    def log_abs(self) -> float:
        """ln(|value * exp(log_scale)|); -inf for an exact zero."""
        if self.value == 0.0:
            return -math.inf
        return math.log(abs(self.value)) + self.log_scale

    @property
    def sign(self) -> float:
        return math.copysign(1.0, self.value) if self.value != 0.0 else 0.0


def _check_index(name, value, upper):
    if not isinstance(value, (int,)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValidationError(f"{name} must be non-negative, got {value}")
    if value > upper:
        raise ValidationError(f"{name} exceeds supported maximum {upper}")


def log_factorial(n: int) -> float:
    """ln(n!), exact cumulative sum for n <= 256, log-gamma above."""
    _check_index("n", n, 10**7)
    if n <= _EXACT_LOG_FACTORIAL_MAX:
        return _LF_TABLE[n]
    return math.lgamma(n + 1.0)


def _laguerre_recurrence(n: int, alpha: int, x: float):
    """Three-term recurrence in the degree with periodic renormalization.

    Returns (value, log_scale) for L_n^{(alpha)}(x).
    """
    if n == 0:
        return 1.0, 0.0
    prev = 1.0
    cur = alpha + 1.0 - x
    scale = 0.0
    for k in range(1, n):
        nxt = ((2.0 * k + alpha + 1.0 - x) * cur - (k + alpha) * prev) / (k + 1.0)
        prev, cur = cur, nxt
        mag = max(abs(prev), abs(cur))
        if mag > _RESCALE_LIMIT or (0.0 < mag < 1.0 / _RESCALE_LIMIT):
            prev /= mag
            cur /= mag
            scale += math.log(mag)
    return cur, scale


def _laguerre_ladder(n_top: int, alpha: int, x: float):
    """All of L_0^{(a)}(x) .. L_{n_top}^{(a)}(x) in one recurrence pass.

    Returns (values, log_scales) lists; entry k represents
    values[k] * exp(log_scales[k]).
    """
    values = [1.0]
    scales = [0.0]
    if n_top == 0:
        return values, scales
    prev, cur, scale = 1.0, alpha + 1.0 - x, 0.0
    values.append(cur)
    scales.append(0.0)
    for k in range(1, n_top):
        nxt = ((2.0 * k + alpha + 1.0 - x) * cur - (k + alpha) * prev) / (k + 1.0)
        prev, cur = cur, nxt
        mag = max(abs(prev), abs(cur))
        if mag > _RESCALE_LIMIT or (0.0 < mag < 1.0 / _RESCALE_LIMIT):
            prev /= mag
            cur /= mag
            scale += math.log(mag)
        values.append(cur)
        scales.append(scale)
    return values, scales


def assoc_laguerre_report(n: int, alpha: int, x: float) -> PolyEvalReport:
    """Associated Laguerre polynomial L_n^{(alpha)}(x) with overflow split."""
    _check_index("n", n, 10**6)
    _check_index("alpha", alpha, 10**6)
    if not math.isfinite(x):
        raise ValidationError(f"x must be finite, got {x!r}")
    if x < 0:
        raise ValidationError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        # L_n^{(a)}(0) = C(n+a, n), exact in integer arithmetic
        comb = math.comb(n + alpha, n)
        try:
            return PolyEvalReport(float(comb), 0.0, "series")
        except OverflowError:
            log_comb = (
                log_factorial(n + alpha) - log_factorial(n) - log_factorial(alpha)
            )
            return PolyEvalReport(1.0, log_comb, "series")
    value, scale = _laguerre_recurrence(n, alpha, x)
    return PolyEvalReport(value, scale, "recurrence")


def assoc_laguerre(n: int, alpha: int, x: float) -> float:
    """L_n^{(alpha)}(x) as a plain float; raises if it overflows."""
    report = assoc_laguerre_report(n, alpha, x)
    out = report.reconstruct()
    if math.isinf(out):
        raise SpecfunOverflowError(report)
    return out


def laguerre_report(n: int, x: float) -> PolyEvalReport:
    """Laguerre polynomial L_n(x) with overflow split."""
    return assoc_laguerre_report(n, 0, x)


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x); raises if it overflows a float."""
    return assoc_laguerre(n, 0, x)


def _bessel_series(order: int, x: float):
    """Ascending power series, log-space prefactor. Good for x <= ~15."""
    if x == 0.0:
        return (1.0, 0.0) if order == 0 else (0.0, 0.0)
    log_pref = order * math.log(x / 2.0) - log_factorial(order)
    q = 0.25 * x * x
    term = 1.0
    acc = 1.0
    for j in range(1, 501):
        term *= -q / (j * (order + j))
        acc += term
        if abs(term) < 1e-17 * abs(acc):
            break
    return acc, log_pref


def _bessel_miller(order: int, x: float) -> float:
    """Downward recurrence normalized by J_0 + 2*sum J_{2k} = 1."""
    start = int(max(order + 20, x + 12.0 * x ** (1.0 / 3.0) + 25))
    if start % 2:
        start += 1
    jp = 0.0  # J_{k+1}, unnormalized
    jc = 1e-250  # J_k
    even_acc = 0.0
    target = 0.0
    if order == start:
        target = jc
    if start > 0 and start % 2 == 0:
        even_acc = jc
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp, jc = jc, jm
        idx = k - 1
        if idx == order:
            target = jc
        if idx > 0 and idx % 2 == 0:
            even_acc += jc
        if abs(jc) > _RESCALE_LIMIT:
            jp /= _RESCALE_LIMIT
            jc /= _RESCALE_LIMIT
            even_acc /= _RESCALE_LIMIT
            target /= _RESCALE_LIMIT
    norm = jc + 2.0 * even_acc  # jc is now the unnormalized J_0
    return target / norm


def bessel_j_report(order: int, x: float) -> PolyEvalReport:
    """Integer-order Bessel function of the first kind, J_order(x)."""
    _check_index("order", order, 10**4)
    if not math.isfinite(x):
        raise ValidationError(f"x must be finite, got {x!r}")
    if x < 0:
        raise ValidationError(f"x must be >= 0, got {x!r}")
    if x > 10**6:
        raise ValidationError(f"x exceeds supported maximum 1e6, got {x!r}")
    if x <= 15.0:
        value, log_pref = _bessel_series(order, x)
        return PolyEvalReport(value, log_pref, "series")
    return PolyEvalReport(_bessel_miller(order, x), 0.0, "recurrence")


def bessel_j(order: int, x: float) -> float:
    """J_order(x) as a plain float (|J| <= 1, never overflows)."""
    return bessel_j_report(order, x).reconstruct()


def laguerre_bessel_limit_error(n: int, alpha: int, x: float) -> float:
    """Relative mismatch of the large-n Laguerre-to-Bessel limit.

    Compares e^{-x/2} (x/n)^{alpha/2} L_n^{(alpha)}(x) against
    J_alpha(2 sqrt(n x)). The comparison scale is floored at unity: both
    sides are bounded by about one, and a bare relative difference would
    blow up near the Bessel zeros instead of measuring convergence. This is
    a convergence diagnostic, not an approximation routine.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if x <= 0:
        raise ValidationError(f"x must be > 0, got {x!r}")
    lag = assoc_laguerre_report(n, alpha, x)
    if lag.value == 0.0:
        lhs = 0.0
    else:
        log_mag = -0.5 * x + 0.5 * alpha * (math.log(x) - math.log(n)) + lag.log_abs
        lhs = lag.sign * math.exp(log_mag)
    rhs = bessel_j(alpha, 2.0 * math.sqrt(n * x))
    denom = max(abs(lhs), abs(rhs), 1.0)
    return abs(lhs - rhs) / denom
