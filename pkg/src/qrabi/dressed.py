"""Strong-coupling dressed structure: free propagator, bands, decompositions.

The unperturbed problem omega adag a + g sigma_1 (adag + a) is diagonal in
displaced number states tensored with sigma_1 eigenstates, with energies
E_n = n omega - g^2/omega independent of the sigma_1 label. The level
splitting term then lifts each doubly degenerate level into a band pair

    E_{n,sigma} = sigma (delta/2) e^{-theta^2/2} L_n(theta^2),
    theta = 2 g / omega,

whose eigenstates are entangled atom-field superpositions

    |psi_n;sigma> = (sigma |[n;a_+]>|+1> + |[n;a_-]>|-1>) / sqrt(2).

Sign conventions follow qrabi.model. With those conventions the physical
ground-ish state |0>|g> populates exactly one band label per photon index,
sigma = (-1)^{n+1}, with Poisson weights e^{-g^2/w^2} (g^2/w^2)^n / n!.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .fock import SPIN_E, SPIN_G, SpinFockVector, displacement
from .model import BandLabel, ModelParams, TruncationConfig
from .specfun import laguerre_report, log_factorial

__all__ = [
    "BandDecomposition",
    "DressedFrame",
    "band_energy",
    "band_eigenstate",
    "decompose",
    "default_band_nmax",
    "free_energy",
    "frame_for",
    "initial_amplitudes",
    "recompose",
    "u_free_propagate",
]

# column layout of BandDecomposition.coeffs
SIGMA_COLS = {1: 0, -1: 1}
COL_SIGMAS = (1, -1)


def free_energy(n: int, params: ModelParams) -> float:
    """Unperturbed level n omega - g^2/omega (doubly degenerate)."""
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    return n * params.omega - params.g**2 / params.omega


def _band_epsilon(n: int, params: ModelParams) -> float:
    """(delta/2) e^{-theta^2/2} L_n(theta^2), evaluated in log space."""
    theta2 = params.theta() ** 2
    rep = laguerre_report(n, theta2)
    if rep.value == 0.0 or params.delta == 0.0:
        return 0.0
    # |e^{-x/2} L_n(x)| <= 1, so the combined exponent never overflows
    return 0.5 * params.delta * rep.sign * math.exp(rep.log_abs - 0.5 * theta2)


def band_energy(label: BandLabel, params: ModelParams) -> float:
    """Band eigenvalue E_{n,sigma}; antisymmetric in sigma."""
    n, sigma = BandLabel(*label).validate()
    return sigma * _band_epsilon(n, params)


@dataclass
class BandDecomposition:
    """Coefficients of a state over the band eigenbasis.

    coeffs[n, 0] belongs to (n, sigma=+1), coeffs[n, 1] to (n, sigma=-1).
    residual is the probability mass the retained bands failed to capture.
    """

    coeffs: np.ndarray
    residual: float = field(default=0.0)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != 2:
            raise ValidationError(
                f"coeffs must have shape (n_max+1, 2), got {self.coeffs.shape}"
            )

    @property
    def n_max(self) -> int:
        return self.coeffs.shape[0] - 1

    def coefficient(self, label: BandLabel) -> complex:
        n, sigma = BandLabel(*label).validate()
        return complex(self.coeffs[n, SIGMA_COLS[sigma]])

    def norm_sq(self) -> float:
        return float((np.abs(self.coeffs) ** 2).sum())

    def populations(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def to_json_obj(self) -> list:
        out = []
        for n in range(self.n_max + 1):
            for sigma in (-1, 1):  # sorted by n then sigma
                z = self.coeffs[n, SIGMA_COLS[sigma]]
                out.append(
                    {"n": n, "sigma": sigma, "re": float(z.real), "im": float(z.imag)}
                )
        return out

    @classmethod
    def from_json_obj(cls, items: list) -> "BandDecomposition":
        n_max = max(item["n"] for item in items)
        coeffs = np.zeros((n_max + 1, 2), dtype=complex)
        for item in items:
            coeffs[item["n"], SIGMA_COLS[item["sigma"]]] = complex(
                item["re"], item["im"]
            )
        return cls(coeffs)


class DressedFrame:
    """Cached displaced-basis machinery for one (params, trunc) pair.

    Holds the two displacement matrices D(-g/w) and D(+g/w) whose columns
    are the lambda = +1 and lambda = -1 displaced number states, and exposes
    the basis transforms built from them. All heavy operations of this
    module go through here so repeated calls do not re-exponentiate.
    """

    def __init__(self, params: ModelParams, trunc: TruncationConfig,
                 leak_tol: float = 1e-2):
        self.params = params
        self.trunc = trunc
        shift = params.g / params.omega
        self._ket_plus = displacement(trunc, -shift, leak_tol=leak_tol)
        self._ket_minus = displacement(trunc, +shift, leak_tol=leak_tol)

    # ---- basis pieces -----------------------------------------------------

    def displaced_photon_state(self, n: int, lam: int) -> np.ndarray:
        if lam not in (1, -1):
            raise ValidationError(f"lambda must be +1 or -1, got {lam}")
        if n + self.trunc.guard > self.trunc.n_max:
            raise ValidationError(
                f"photon index {n} violates n + guard <= n_max for {self.trunc}"
            )
        mat = self._ket_plus if lam == 1 else self._ket_minus
        return mat[:, n].copy()

    def band_state(self, label: BandLabel) -> SpinFockVector:
        n, sigma = BandLabel(*label).validate()
        u = self.displaced_photon_state(n, 1)
        v = self.displaced_photon_state(n, -1)
        amps = np.empty((self.trunc.dim, 2), dtype=complex)
        amps[:, SPIN_E] = (sigma * u + v) / 2.0
        amps[:, SPIN_G] = (sigma * u - v) / 2.0
        return SpinFockVector(self.trunc, amps)

    # ---- transforms -------------------------------------------------------

    def _to_displaced(self, psi_plus, psi_minus):
        # coefficient n of |[n;a_lam]> in each sigma_1 sector
        return self._ket_plus.T @ psi_plus, self._ket_minus.T @ psi_minus

    def _from_displaced(self, c_plus, c_minus):
        return self._ket_plus @ c_plus, self._ket_minus @ c_minus

    def u_free(self, state: SpinFockVector, t: float) -> SpinFockVector:
        """Apply U_F(t) = sum e^{-i E_n t} |[n;a_l]><[n;a_l]| x |l><l|."""
        if state.trunc != self.trunc:
            raise ValidationError("state truncation does not match frame")
        phases = np.exp(
            -1j
            * t
            * (np.arange(self.trunc.dim) * self.params.omega
               - self.params.g**2 / self.params.omega)
        )
        plus, minus = state.to_sigma1()
        c_plus, c_minus = self._to_displaced(plus, minus)
        plus, minus = self._from_displaced(phases * c_plus, phases * c_minus)
        return SpinFockVector.from_sigma1(
            self.trunc, plus, minus, is_state=state.is_state
        )

    def decompose(self, state: SpinFockVector, n_max: int | None = None,
                  residual_tol: float = 1e-6) -> BandDecomposition:
        """Coefficients <psi_n;sigma|state> for n up to n_max."""
        if state.trunc != self.trunc:
            raise ValidationError("state truncation does not match frame")
        if n_max is None:
            n_max = self.trunc.n_used
        if n_max > self.trunc.n_max:
            raise ValidationError(
                f"band n_max {n_max} exceeds truncation {self.trunc.n_max}"
            )
        plus, minus = state.to_sigma1()
        c_plus, c_minus = self._to_displaced(plus, minus)
        coeffs = np.empty((n_max + 1, 2), dtype=complex)
        u = c_plus[: n_max + 1]
        v = c_minus[: n_max + 1]
        coeffs[:, SIGMA_COLS[1]] = (u + v) / math.sqrt(2.0)
        coeffs[:, SIGMA_COLS[-1]] = (-u + v) / math.sqrt(2.0)
        captured = float((np.abs(coeffs) ** 2).sum())
        residual = max(state.norm() ** 2 - captured, 0.0)
        if residual > residual_tol:
            warnings.warn(
                f"band decomposition residual {residual:.3e} exceeds "
                f"{residual_tol:.1e}; increase n_max or truncation",
                stacklevel=2,
            )
        return BandDecomposition(coeffs, residual=residual)

    def recompose(self, decomp: BandDecomposition) -> SpinFockVector:
        """Rebuild the sigma_3-basis state from band coefficients."""
        a_plus = decomp.coeffs[:, SIGMA_COLS[1]]
        a_minus = decomp.coeffs[:, SIGMA_COLS[-1]]
        pad = self.trunc.dim - decomp.coeffs.shape[0]
        if pad < 0:
            raise ValidationError("decomposition larger than truncation")
        u = np.concatenate([(a_plus - a_minus) / math.sqrt(2.0), np.zeros(pad)])
        v = np.concatenate([(a_plus + a_minus) / math.sqrt(2.0), np.zeros(pad)])
        plus, minus = self._from_displaced(u, v)
        return SpinFockVector.from_sigma1(self.trunc, plus, minus, is_state=False)


@lru_cache(maxsize=16)
def frame_for(params: ModelParams, trunc: TruncationConfig) -> DressedFrame:
    return DressedFrame(params, trunc)


def band_eigenstate(label: BandLabel, params: ModelParams,
                    trunc: TruncationConfig) -> SpinFockVector:
    """Normalized |psi_n;sigma> in the sigma_3 product basis."""
    return frame_for(params, trunc).band_state(label)


def u_free_propagate(state: SpinFockVector, t: float,
                     params: ModelParams) -> SpinFockVector:
    """Evolve a state with the free strong-coupling propagator U_F(t)."""
    return frame_for(params, state.trunc).u_free(state, t)


def decompose(state: SpinFockVector, params: ModelParams,
              n_max: int | None = None) -> BandDecomposition:
    """Band coefficients of an arbitrary normalized state."""
    return frame_for(params, state.trunc).decompose(state, n_max=n_max)


def recompose(decomp: BandDecomposition, params: ModelParams,
              trunc: TruncationConfig) -> SpinFockVector:
    """Inverse of decompose on the captured support."""
    return frame_for(params, trunc).recompose(decomp)


def default_band_nmax(params: ModelParams) -> int:
    """Band count capturing the |0>|g> Poisson weights to well below 1e-12."""
    mu = (params.g / params.omega) ** 2
    return int(math.ceil(mu + 8.0 * math.sqrt(mu))) + 16


def initial_amplitudes(params: ModelParams, n_max: int) -> BandDecomposition:
    """Closed-form band coefficients of the physical initial state |0>|g>.

    Exactly one sigma survives per photon index, sigma = (-1)^{n+1}, with

        a_{n,sigma} = sigma e^{-g^2/2w^2} (g/w)^n / sqrt(n!).

    The per-n weights are the Poisson law e^{-mu} mu^n / n!, mu = (g/w)^2.
    Note the sign of the bracket [sigma - (-1)^n]/2: it is fixed by the
    requirement that at g = 0 the state |0>|g> coincides with the band
    state of energy -delta/2, and is verified against the overlap oracle
    in the tests.
    """
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    ratio = params.g / params.omega
    pref = math.exp(-0.5 * ratio * ratio)
    coeffs = np.zeros((n_max + 1, 2), dtype=complex)
    for n in range(n_max + 1):
        sigma = -1 if n % 2 == 0 else 1
        if ratio == 0.0:
            mag = pref if n == 0 else 0.0
        else:
            mag = math.exp(
                -0.5 * ratio * ratio + n * math.log(ratio) - 0.5 * log_factorial(n)
            )
        coeffs[n, SIGMA_COLS[sigma]] = sigma * mag
    # Poisson tail beyond n_max must be negligible for the completeness bar
    mu = ratio * ratio
    tail = 0.0
    if mu > 0.0:
        for n in range(n_max + 1, n_max + 400):
            logw = -mu + n * math.log(mu) - log_factorial(n)
            w = math.exp(logw)
            tail += w
            if w < 1e-18 * max(tail, 1e-300):
                break
    if tail >= 1e-12:
        raise ValidationError(
            f"Poisson tail {tail:.3e} beyond n_max={n_max} is too heavy; "
            f"need n_max >= {default_band_nmax(params)}"
        )
    return BandDecomposition(coeffs, residual=tail)
