"""Truncated Fock-space linear algebra.

Ladder operators, the real displacement operator D(theta) = exp(theta (adag
- a)), displaced number states, and the closed-form displacement matrix
elements evaluated in log space. The matrix-exponential route and the
closed-form route are kept deliberately independent: their agreement is one
of the toolkit's primary cross-checks.

States live in the sigma_3 product basis, amplitude array shape
(n_max + 1, 2) with spin column 0 = |e>, 1 = |g> (see qrabi.model for the
full convention block).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import TruncationLeakageError, ValidationError
from .model import ModelParams, TruncationConfig, default_guard
from .specfun import _laguerre_ladder, assoc_laguerre_report, log_factorial

__all__ = [
    "SPIN_E",
    "SPIN_G",
    "SpinFockVector",
    "ladder",
    "displacement",
    "displaced_matrix_element",
    "displacement_element_matrix",
    "displaced_number_state",
    "guard_for",
]

SPIN_E = 0
SPIN_G = 1

# sigma_1 eigenvectors in the (e, g) basis, columns lambda = +1, -1
_SIGMA1_BASIS = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def guard_for(theta: float, n_top: int) -> int:
    """Guard sized for a displaced |n_top>: default plus the sqrt(n) spread.

    The theta-only default covers small photon indices; the displaced state
    of |n> additionally spreads by ~theta sqrt(n), measured to need about
    3 theta sqrt(n+1) extra levels for tail mass below 1e-13.
    """
    return default_guard(theta) + int(math.ceil(3.0 * abs(theta) * math.sqrt(n_top + 1.0)))


def ladder(trunc: TruncationConfig):
    """Annihilation/creation pair on the truncated space.

    <m|a|n> = sqrt(n) delta_{m,n-1} exactly on retained indices; a_dagger is
    the transpose (real entries).
    """
    if trunc.dim == 0:
        raise ValidationError("empty truncation")
    a = np.diag(np.sqrt(np.arange(1.0, trunc.dim)), 1)
    return a, a.T.copy()


def _edge_mass(block: np.ndarray, guard: int) -> float:
    """Largest per-column probability mass in the top edge rows."""
    rows = max(2, guard // 4)
    tail = np.abs(block[-rows:, :]) ** 2
    return float(tail.sum(axis=0).max())


def displacement(trunc: TruncationConfig, theta: float, leak_tol: float = 1e-3):
    """Matrix of D(theta) = exp(theta (adag - a)) by scaling-and-squaring.

    The generator is real antisymmetric, so the result is orthogonal; norm
    is conserved exactly and truncation error shows up only through
    amplitude folded back at the edge. Columns up to trunc.n_used are
    checked for edge mass and rejected above leak_tol.
    """
    if abs(theta) > 10.0:
        raise ValidationError(f"|theta| must be <= 10, got {theta!r}")
    a, ad = ladder(trunc)
    mat = expm(theta * (ad - a))
    interior = mat[:, : trunc.n_used + 1]
    leak = _edge_mass(interior, trunc.guard)
    if leak > leak_tol:
        raise TruncationLeakageError(
            leak, leak_tol, context=f"displacement(theta={theta}, {trunc})"
        )
    return mat


def displaced_matrix_element(m: int, n: int, theta: float) -> float:
    """Closed-form <m|D(theta)|n>, stable at photon numbers where n! overflows.

    For m >= n:
        <m|D(theta)|n> = sqrt(n!/m!) theta^{m-n} e^{-theta^2/2}
                         L_n^{(m-n)}(theta^2)
    and for m < n by the symmetry <m|D(theta)|n> = (-1)^{n-m} <n|D(theta)|m>.
    """
    if m < 0 or n < 0:
        raise ValidationError(f"indices must be >= 0, got m={m}, n={n}")
    if theta == 0.0:
        return 1.0 if m == n else 0.0
    if m < n:
        return (-1.0) ** (n - m) * displaced_matrix_element(n, m, theta)
    diff = m - n
    lag = assoc_laguerre_report(n, diff, theta * theta)
    if lag.value == 0.0:
        return 0.0
    log_mag = (
        0.5 * (log_factorial(n) - log_factorial(m))
        + diff * math.log(abs(theta))
        - 0.5 * theta * theta
        + lag.log_abs
    )
    sign = lag.sign * (math.copysign(1.0, theta) ** diff)
    return sign * math.exp(log_mag)


def displacement_element_matrix(n_max: int, theta: float, cut: float = 0.0):
    """All closed-form elements <m|D(theta)|n>, m, n <= n_max, as one array.

    Built diagonal by diagonal with the vectorized Laguerre ladder; a
    diagonal whose largest magnitude falls below ``cut`` ends the build
    (the elements decay faster than exponentially in |m - n|). Entries
    below ``cut`` are left at zero.
    """
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    out = np.zeros((n_max + 1, n_max + 1))
    if theta == 0.0:
        np.fill_diagonal(out, 1.0)
        return out
    x = theta * theta
    sign_theta = math.copysign(1.0, theta)
    lf = np.array([log_factorial(k) for k in range(n_max + 1)])
    for d in range(n_max + 1):
        vals, scales = _laguerre_ladder(n_max - d, d, x)
        ns = np.arange(n_max - d + 1)
        log_pref = (
            0.5 * (lf[ns] - lf[ns + d]) + d * math.log(abs(theta)) - 0.5 * x
        )
        vals = np.asarray(vals)
        mags = np.where(
            vals == 0.0, 0.0, np.exp(log_pref + np.asarray(scales) + np.log(np.abs(np.where(vals == 0.0, 1.0, vals))))
        )
        diag = np.sign(vals) * (sign_theta**d) * mags
        if cut > 0.0 and d > 0 and np.abs(diag).max() < cut:
            break
        out[ns + d, ns] = diag
        if d > 0:
            out[ns, ns + d] = (-1.0) ** d * diag
    if cut > 0.0:
        out[np.abs(out) < cut] = 0.0
    return out


def displaced_number_state(
    n: int,
    lam: int,
    params: ModelParams,
    trunc: TruncationConfig,
    leak_tol: float = 1e-8,
) -> np.ndarray:
    """Photon part of the dressed basis state, D(-lambda g/omega)|n>.

    The defining exponent is (g/omega) lambda (a - adag), i.e. a displacement
    by -lambda g/omega in the D(theta) = exp(theta (adag - a)) convention.
    Returns the photon amplitude vector (length n_max + 1, real).
    """
    if lam not in (1, -1):
        raise ValidationError(f"lambda must be +1 or -1, got {lam}")
    if n < 0 or n + trunc.guard > trunc.n_max:
        raise ValidationError(
            f"photon index {n} violates n + guard <= n_max for {trunc}"
        )
    dmat = displacement(trunc, -lam * params.g / params.omega, leak_tol=1e-2)
    vec = dmat[:, n].copy()
    rows = max(2, trunc.guard // 4)
    leak = float((np.abs(vec[-rows:]) ** 2).sum())
    if leak > leak_tol:
        raise TruncationLeakageError(
            leak, leak_tol, context=f"displaced_number_state(n={n}, lam={lam})"
        )
    return vec


@dataclass
class SpinFockVector:
    """State on (Fock up to n_max) x (two-level atom), sigma_3 basis.

    amps[k, 0] is the |k>|e> amplitude, amps[k, 1] the |k>|g> one.
    """

    trunc: TruncationConfig
    amps: np.ndarray
    is_state: bool = field(default=True)

    NORM_TOL = 1e-8

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.trunc.dim, 2):
            raise ValidationError(
                f"amps shape {self.amps.shape} != ({self.trunc.dim}, 2)"
            )
        if self.is_state:
            nrm = self.norm()
            if abs(nrm - 1.0) > self.NORM_TOL:
                raise ValidationError(
                    f"state norm {nrm!r} deviates from 1 beyond {self.NORM_TOL}"
                )

    @classmethod
    def zero(cls, trunc: TruncationConfig) -> "SpinFockVector":
        return cls(trunc, np.zeros((trunc.dim, 2), dtype=complex), is_state=False)

    @classmethod
    def basis_state(cls, trunc: TruncationConfig, n: int, spin: int) -> "SpinFockVector":
        if spin not in (SPIN_E, SPIN_G):
            raise ValidationError(f"spin must be {SPIN_E} (e) or {SPIN_G} (g)")
        if not 0 <= n <= trunc.n_max:
            raise ValidationError(f"fock index {n} outside truncation")
        amps = np.zeros((trunc.dim, 2), dtype=complex)
        amps[n, spin] = 1.0
        return cls(trunc, amps)

    @classmethod
    def vacuum_g(cls, trunc: TruncationConfig) -> "SpinFockVector":
        """The physical initial state |0>|g>."""
        return cls.basis_state(trunc, 0, SPIN_G)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def overlap(self, other: "SpinFockVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "SpinFockVector") -> float:
        return abs(self.overlap(other)) ** 2

    def spin_populations(self):
        """(pop_e, pop_g) summed over photon number."""
        pops = (np.abs(self.amps) ** 2).sum(axis=0)
        return float(pops[SPIN_E]), float(pops[SPIN_G])

    def photon_distribution(self) -> np.ndarray:
        return (np.abs(self.amps) ** 2).sum(axis=1)

    def to_sigma1(self):
        """Photon vectors in the sigma_1 spin basis (psi_plus, psi_minus)."""
        plus = (self.amps[:, SPIN_E] + self.amps[:, SPIN_G]) / math.sqrt(2.0)
        minus = (self.amps[:, SPIN_E] - self.amps[:, SPIN_G]) / math.sqrt(2.0)
        return plus, minus

    @classmethod
    def from_sigma1(cls, trunc, plus, minus, is_state=True):
        amps = np.empty((trunc.dim, 2), dtype=complex)
        amps[:, SPIN_E] = (plus + minus) / math.sqrt(2.0)
        amps[:, SPIN_G] = (plus - minus) / math.sqrt(2.0)
        return cls(trunc, amps, is_state=is_state)

    def to_json_obj(self) -> dict:
        return {
            "n_max": self.trunc.n_max,
            "guard": self.trunc.guard,
            "basis": "sigma3 product, spin columns (e, g), sigma3|e> = +|e>",
            "amps": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.amps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict, is_state: bool = True) -> "SpinFockVector":
        trunc = TruncationConfig(n_max=int(obj["n_max"]), guard=int(obj["guard"]))
        amps = np.array(
            [[complex(re, im) for re, im in row] for row in obj["amps"]],
            dtype=complex,
        )
        return cls(trunc, amps, is_state=is_state)

    @classmethod
    def from_json(cls, text: str, is_state: bool = True) -> "SpinFockVector":
        return cls.from_json_obj(json.loads(text), is_state=is_state)
