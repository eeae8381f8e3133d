"""Seeded sampling of every random object in the transmission chain.

All randomness is drawn from counter-based Philox substreams keyed by
(seed, stream_index), so a sample depends only on those two integers and not
on execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .transform import Domain, ModulatedVector

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """Substream handle: identical (seed, stream_index) gives bit-identical draws."""

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.seed) < _U64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if not (0 <= int(self.stream_index) < _U64):
            raise ConfigError("stream_index must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_index),))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ComplexGaussianSpec:
    """Zero-mean circular-symmetric complex Gaussian vector spec.

    variance_per_entry[i] is E[|z_i|^2]; real and imaginary parts each carry
    half of it.
    """

    dimension: int
    variance_per_entry: tuple

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ConfigError("dimension must be >= 1")
        var = tuple(float(v) for v in self.variance_per_entry)
        if len(var) != int(self.dimension):
            raise ConfigError("variance_per_entry length must equal dimension")
        if any(v < 0.0 for v in var):
            raise ConfigError("variances must be nonnegative")
        object.__setattr__(self, "variance_per_entry", var)

    @classmethod
    def iid(cls, dimension: int, variance: float) -> "ComplexGaussianSpec":
        return cls(dimension, (float(variance),) * int(dimension))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-sub-channel additive noise variances.

    sigma2_per_subchannel[i] is the variance of each quadrature of the i-th
    noise entry, so E[|noise_i|^2] = 2 * sigma2_per_subchannel[i].
    """

    sigma2_per_subchannel: tuple

    def __post_init__(self):
        var = tuple(float(v) for v in self.sigma2_per_subchannel)
        if len(var) == 0:
            raise ConfigError("noise spec must cover at least one sub-channel")
        if any(v < 0.0 for v in var):
            raise ConfigError("noise variances must be nonnegative")
        object.__setattr__(self, "sigma2_per_subchannel", var)

    @classmethod
    def iid(cls, l: int, sigma2: float) -> "NoiseSpec":
        return cls((float(sigma2),) * int(l))

    def __len__(self) -> int:
        return len(self.sigma2_per_subchannel)


RAYLEIGH = "rayleigh"
FIXED = "fixed"
UNIFORM_PHASE = "uniform_phase"


@dataclass(frozen=True)
class TransmittanceModel:
    """Per-sub-channel Fourier-domain gain model.

    rayleigh: F ~ CN(0, sigma2_f), i.e. |F|^2 exponential with mean sigma2_f.
    fixed: configured complex values used verbatim.
    uniform_phase: constant magnitude, phase uniform on [0, 2*pi).
    """

    kind: str
    sigma2_f: float = 1.0
    values: tuple | None = None
    magnitude: float | None = None

    def __post_init__(self):
        if self.kind == RAYLEIGH:
            if float(self.sigma2_f) < 0.0:
                raise ConfigError("sigma2_f must be nonnegative")
        elif self.kind == FIXED:
            if not self.values:
                raise ConfigError("fixed model needs at least one value")
            object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        elif self.kind == UNIFORM_PHASE:
            if self.magnitude is None or not (0.0 <= float(self.magnitude) <= 1.0):
                raise ConfigError("uniform_phase magnitude must lie in [0, 1]")
        else:
            raise ConfigError(f"unknown transmittance model kind: {self.kind!r}")

    @classmethod
    def rayleigh(cls, sigma2_f: float = 1.0) -> "TransmittanceModel":
        return cls(RAYLEIGH, sigma2_f=float(sigma2_f))

    @classmethod
    def fixed(cls, values) -> "TransmittanceModel":
        return cls(FIXED, values=tuple(complex(v) for v in values))

    @classmethod
    def uniform_phase(cls, magnitude: float) -> "TransmittanceModel":
        return cls(UNIFORM_PHASE, magnitude=float(magnitude))


def _complex_normal_block(g: np.random.Generator, count: int, variances) -> np.ndarray:
    # each row consumes its own contiguous run of the normal stream (real
    # parts, then imaginary parts), so row 0 of any block reproduces the
    # single-draw case; the layout is part of the determinism contract
    n = len(variances)
    draws = g.standard_normal((count, 2, n))
    scale = np.sqrt(np.asarray(variances, dtype=np.float64) / 2.0)
    return (draws[:, 0, :] + 1j * draws[:, 1, :]) * scale


def sample_modulation_vector(spec: ComplexGaussianSpec, rng: RngStream) -> ModulatedVector:
    """One draw of the modulated Gaussian vector z."""
    block = _complex_normal_block(rng.generator(), 1, spec.variance_per_entry)
    return ModulatedVector(block[0], Domain.SINGLE_CARRIER)


def sample_modulation_block(spec: ComplexGaussianSpec, rng: RngStream, count: int) -> np.ndarray:
    """count independent draws, shape (count, n); row 0 equals the single draw."""
    if int(count) < 1:
        raise ConfigError("count must be >= 1")
    return _complex_normal_block(rng.generator(), int(count), spec.variance_per_entry)


def sample_noise_vector(spec: NoiseSpec, rng: RngStream) -> np.ndarray:
    """One complex noise draw per sub-channel; each quadrature has variance sigma2."""
    doubled = tuple(2.0 * v for v in spec.sigma2_per_subchannel)
    return _complex_normal_block(rng.generator(), 1, doubled)[0]


def sample_noise_block(spec: NoiseSpec, rng: RngStream, count: int) -> np.ndarray:
    if int(count) < 1:
        raise ConfigError("count must be >= 1")
    doubled = tuple(2.0 * v for v in spec.sigma2_per_subchannel)
    return _complex_normal_block(rng.generator(), int(count), doubled)


def sample_transmittances(
    model: TransmittanceModel, l: int, rng: RngStream, count: int | None = None
) -> np.ndarray:
    """Fourier-domain gains for l sub-channels; shape (l,) or (count, l)."""
    l = int(l)
    if l < 1:
        raise ConfigError("l must be >= 1")
    m = 1 if count is None else int(count)
    if m < 1:
        raise ConfigError("count must be >= 1")
    if model.kind == RAYLEIGH:
        block = _complex_normal_block(rng.generator(), m, (model.sigma2_f,) * l)
    elif model.kind == FIXED:
        if len(model.values) != l:
            raise ConfigError("fixed model value count must equal l")
        block = np.tile(np.asarray(model.values, dtype=np.complex128), (m, 1))
    else:  # uniform_phase
        g = rng.generator()
        phase = g.uniform(0.0, 2.0 * np.pi, size=(m, l))
        block = float(model.magnitude) * np.exp(1j * phase)
    return block[0] if count is None else block
