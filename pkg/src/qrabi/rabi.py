"""Rabi frequencies between dressed bands, selection rules, Bessel limits.

A static perturbation drives transitions between dressed levels that are
degenerate in TOTAL energy, free part included. The resonance residual
reported here is therefore

    detuning = (E_{n,sigma} + n omega) - (E_{m,sigma'} + m omega),

zero exactly at resonance. For a mode frequency much larger than the
splitting this residual cannot vanish for n != m, so the two-level
rotating-wave reduction is an approximation whose quality is measured by
|detuning| / R; it is reported, never assumed zero.

Parity selection is exact: interband transitions (sigma != sigma') connect
photon indices differing by an odd number, intraband by an even number.
Forbidden combinations return an exact zero frequency, not a small one.
The closed forms, with theta = 2 g / omega and m >= n,

    R  = delta sqrt(n!/m!) theta^{m-n} e^{-theta^2/2} |L_n^{(m-n)}(theta^2)|

(equal to delta |<n|sinh[theta (a - adag)]|m>| interband and the cosh
analogue intraband) are evaluated in log space, and approach
delta |J_{m-n}(4 sqrt(n) g / omega)| at large n.
"""

import math
from dataclasses import dataclass

from .dressed import band_energy
from .errors import ValidationError
from .model import BandLabel, ModelParams
from .specfun import assoc_laguerre_report, bessel_j, log_factorial

__all__ = [
    "INTERBAND",
    "INTRABAND",
    "TransitionSpec",
    "RabiResult",
    "detuning",
    "rabi_frequency",
    "rabi_asymptotic",
    "rwa_pair_evolution",
    "transition_table",
]

INTERBAND = "interband"
INTRABAND = "intraband"


@dataclass(frozen=True)
class TransitionSpec:
    """Directed pair of band labels with derived classification."""

    from_label: BandLabel
    to_label: BandLabel

    def __post_init__(self):
        BandLabel(*self.from_label).validate()
        BandLabel(*self.to_label).validate()

    @property
    def kind(self) -> str:
        return INTERBAND if self.from_label.sigma != self.to_label.sigma else INTRABAND

    @property
    def diff(self) -> int:
        """Photon-number change, to minus from."""
        return self.to_label.n - self.from_label.n

    def allowed(self) -> bool:
        """Parity selection: interband odd diff, intraband even diff."""
        odd = self.diff % 2 != 0
        return odd if self.kind == INTERBAND else not odd

    def reversed(self) -> "TransitionSpec":
        return TransitionSpec(self.to_label, self.from_label)


@dataclass(frozen=True)
class RabiResult:
    """One transition's exact frequency, asymptote and resonance residual."""

    spec: TransitionSpec
    frequency: float
    detuning: float
    asymptotic: float
    bessel_order: int
    bessel_argument: float


def detuning(spec: TransitionSpec, params: ModelParams) -> float:
    """Total dressed-energy mismatch of the pair; zero means exact resonance."""
    return (
        band_energy(spec.from_label, params)
        - band_energy(spec.to_label, params)
        - spec.diff * params.omega
    )


def _frequency(spec: TransitionSpec, params: ModelParams) -> float:
    if not spec.allowed():
        return 0.0
    n = min(spec.from_label.n, spec.to_label.n)
    m = max(spec.from_label.n, spec.to_label.n)
    if params.delta == 0.0:
        return 0.0
    theta = params.theta()
    d = m - n
    if theta == 0.0:
        return params.delta if d == 0 else 0.0
    lag = assoc_laguerre_report(n, d, theta * theta)
    if lag.value == 0.0:
        return 0.0
    log_r = (
        math.log(params.delta)
        + 0.5 * (log_factorial(n) - log_factorial(m))
        + d * math.log(theta)
        - 0.5 * theta * theta
        + lag.log_abs
    )
    return math.exp(log_r)


def rabi_asymptotic(spec: TransitionSpec, params: ModelParams) -> float:
    """Large-photon-number limit delta |J_{|diff|}(4 sqrt(n) g / omega)|.

    Returns 0 for parity-forbidden specs so the exact and asymptotic
    surfaces stay comparable (J itself would not vanish there).
    """
    if not spec.allowed():
        return 0.0
    n = min(spec.from_label.n, spec.to_label.n)
    arg = 4.0 * math.sqrt(n) * params.g / params.omega
    return params.delta * abs(bessel_j(abs(spec.diff), arg))


def rabi_frequency(spec: TransitionSpec, params: ModelParams) -> RabiResult:
    """Exact closed-form Rabi frequency plus asymptote and detuning."""
    n = min(spec.from_label.n, spec.to_label.n)
    return RabiResult(
        spec=spec,
        frequency=_frequency(spec, params),
        detuning=detuning(spec, params),
        asymptotic=rabi_asymptotic(spec, params),
        bessel_order=abs(spec.diff),
        bessel_argument=4.0 * math.sqrt(n) * params.g / params.omega,
    )


def rwa_pair_evolution(
    spec: TransitionSpec,
    a_from_0: complex,
    a_to_0: complex,
    t: float,
    params: ModelParams,
):
    """Resonant two-level rotation of a band amplitude pair.

    a_from(t) = a_from(0) cos(R t / 2) - i a_to(0) sin(R t / 2) and the
    mirror image, with R the full Rabi angular frequency of the population
    oscillation (population period 2 pi / R). Probability is conserved
    exactly by the trigonometric identity.
    """
    if not spec.allowed():
        raise ValidationError(f"parity-forbidden transition {spec}")
    if abs(a_from_0) ** 2 + abs(a_to_0) ** 2 > 1.0 + 1e-12:
        raise ValidationError("pair amplitudes exceed unit probability")
    r = _frequency(spec, params)
    c = math.cos(0.5 * r * t)
    s = math.sin(0.5 * r * t)
    return (
        a_from_0 * c - 1j * a_to_0 * s,
        a_to_0 * c - 1j * a_from_0 * s,
    )


def transition_table(params: ModelParams, n_range, max_diff: int):
    """Survey of parity-allowed transitions, one entry per (n, diff).

    diff runs 0..max_diff (negative values fold onto positive by the
    frequency symmetry). Interband entries go from (n, +1) to (n+diff, -1),
    intraband from (n, +1) to (n+diff, +1). Sorted by (n, diff).
    """
    n_list = sorted(set(int(n) for n in n_range))
    if not n_list or max_diff < 0:
        raise ValidationError("empty sweep ranges")
    if n_list[0] < 0:
        raise ValidationError("photon indices must be >= 0")
    out = []
    for n in n_list:
        for diff in range(0, max_diff + 1):
            sigma_to = -1 if diff % 2 else 1
            spec = TransitionSpec(BandLabel(n, 1), BandLabel(n + diff, sigma_to))
            out.append(rabi_frequency(spec, params))
    return out
