"""Unitary discrete Fourier transform over complex amplitude vectors.

The transmitter maps the modulated Gaussian vector to subcarriers with the
inverse transform; the receiver undoes it with the forward transform.  Both
directions carry the 1/sqrt(n) normalization, so the pair is exactly unitary
and Parseval holds without bookkeeping factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import ConfigError

# admissible time-domain transmittance components live in [0, 1/sqrt(2)]
RE_IM_BOUND = 1.0 / np.sqrt(2.0)


class Domain(Enum):
    """Which side of the transform a vector lives on."""

    SINGLE_CARRIER = "single_carrier"
    SUBCARRIER = "subcarrier"

    def flipped(self) -> "Domain":
        if self is Domain.SINGLE_CARRIER:
            return Domain.SUBCARRIER
        return Domain.SINGLE_CARRIER


@dataclass(eq=False)
class ModulatedVector:
    """Complex amplitude vector tagged with the domain it currently lives in."""

    entries: np.ndarray
    domain_tag: Domain = Domain.SINGLE_CARRIER

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        if self.entries.ndim != 1 or self.entries.size == 0:
            raise ConfigError("modulated vector must be a nonempty 1-d complex array")
        if not isinstance(self.domain_tag, Domain):
            raise ConfigError("domain_tag must be a Domain")

    def __len__(self) -> int:
        return int(self.entries.size)


def unitary_dft(x: np.ndarray) -> np.ndarray:
    """DFT with 1/sqrt(n) normalization; accepts any length n >= 1."""
    return np.fft.fft(np.asarray(x, dtype=np.complex128), norm="ortho")


def unitary_idft(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`unitary_dft`, same normalization."""
    return np.fft.ifft(np.asarray(x, dtype=np.complex128), norm="ortho")


def forward_transform(v: ModulatedVector) -> ModulatedVector:
    """Unitary DFT of the vector; flips the domain tag."""
    return ModulatedVector(unitary_dft(v.entries), v.domain_tag.flipped())


def inverse_transform(v: ModulatedVector) -> ModulatedVector:
    """Unitary inverse DFT of the vector; flips the domain tag."""
    return ModulatedVector(unitary_idft(v.entries), v.domain_tag.flipped())


def fourier_transmittance(t_time) -> np.ndarray:
    """Fourier-domain transmittance coefficients of a time-domain gain vector.

    Entries must satisfy 0 <= Re <= 1/sqrt(2) and 0 <= Im <= 1/sqrt(2); this
    bound applies only to user-supplied time-domain gains.  Random
    Fourier-domain models bypass this path and are unbounded by construction.
    """
    t = np.asarray(t_time, dtype=np.complex128)
    if t.ndim != 1 or t.size == 0:
        raise ConfigError("transmittance vector must be a nonempty 1-d array")
    re, im = t.real, t.imag
    if np.any(re < 0.0) or np.any(re > RE_IM_BOUND) or np.any(im < 0.0) or np.any(im > RE_IM_BOUND):
        raise ConfigError(
            "time-domain transmittance out of bounds: components must lie in [0, 1/sqrt(2)]"
        )
    return unitary_dft(t)
