"""Core parameter and labeling types shared by all modules.

Basis conventions, fixed toolkit-wide:

* internal (spin) basis is the sigma_3 eigenbasis, ordered (e, g) with
  sigma_3|e> = +|e>, sigma_3|g> = -|g>;
* sigma_1 eigenvectors |lambda=+1> = (|e>+|g>)/sqrt(2),
  |lambda=-1> = (|e>-|g>)/sqrt(2) are derived views;
* the displacement operator is D(theta) = exp(theta (adag - a)) with real
  theta, so the displaced number state with label lambda is
  exp((g/omega) lambda (a - adag)) |n> = D(-lambda g/omega) |n>.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ValidationError

__all__ = ["ModelParams", "BandLabel", "TruncationConfig", "default_guard"]


@dataclass(frozen=True)
class ModelParams:
    """Physical triple of the model: mode frequency, level splitting, coupling.

    Units are hbar = 1 energy units; only the ratios delta/omega and g/omega
    matter physically.
    """

    omega: float
    delta: float
    g: float

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValidationError(f"omega must be > 0, got {self.omega!r}")
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise ValidationError(f"delta must be >= 0, got {self.delta!r}")
        if not (self.g >= 0 and math.isfinite(self.g)):
            raise ValidationError(f"g must be >= 0, got {self.g!r}")

    def theta(self) -> float:
        """Dimensionless displacement parameter 2 g / omega."""
        return 2.0 * self.g / self.omega

    def is_strong_coupling(self) -> bool:
        """True in the regime the closed forms are aimed at (g >= delta)."""
        return self.g >= self.delta


class BandLabel(NamedTuple):
    """Dressed level identifier: photon index n and band sign sigma."""

    n: int
    sigma: int

    def validate(self) -> "BandLabel":
        if self.n < 0:
            raise ValidationError(f"band index n must be >= 0, got {self.n}")
        if self.sigma not in (1, -1):
            raise ValidationError(f"sigma must be +1 or -1, got {self.sigma}")
        return self


def default_guard(theta: float) -> int:
    """Default buffer levels beyond the largest physically used Fock index.

    A displacement by theta shifts photon number by about theta^2 and spreads
    by a few theta sqrt(n); ceil(10 theta^2) + 10 is validated empirically by
    the leakage measurements in the fock module tests.
    """
    return int(math.ceil(10.0 * theta * theta)) + 10


@dataclass(frozen=True)
class TruncationConfig:
    """Fock-space truncation: highest retained index plus edge buffer."""

    n_max: int
    guard: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValidationError(f"n_max must be >= 0, got {self.n_max}")
        if self.guard < 0:
            raise ValidationError(f"guard must be >= 0, got {self.guard}")
        if self.guard > self.n_max:
            raise ValidationError(
                f"guard {self.guard} exceeds n_max {self.n_max}"
            )

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def n_used(self) -> int:
        """Largest Fock index considered physically reliable."""
        return self.n_max - self.guard

    @classmethod
    def for_theta(cls, n_used: int, theta: float, guard: int | None = None):
        """Truncation holding indices up to n_used with a theta-sized buffer."""
        if guard is None:
            guard = default_guard(theta)
        return cls(n_max=n_used + guard, guard=guard)
