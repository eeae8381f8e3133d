"""Phase-space constellations, permutation spreading, and diversity metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .sampling import RngStream


def constellation_size(rate_bits: float) -> int:
    """Point count for a rate: round(2^rate), never below 2."""
    if not np.isfinite(rate_bits):
        raise ConfigError("rate_bits must be finite")
    return max(2, int(round(2.0 ** float(rate_bits))))


@dataclass(frozen=True)
class Constellation:
    """Distinct phase-space points whose count matches round(2^rate_bits)."""

    points: tuple
    rate_bits: float

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ConfigError("a constellation needs at least 2 points")
        if len(set(pts)) != len(pts):
            raise ConfigError("constellation points must be pairwise distinct")
        if len(pts) != constellation_size(self.rate_bits):
            raise ConfigError("point count must equal round(2^rate_bits), clamped to >= 2")

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.complex128)

    @classmethod
    def from_points(cls, points) -> "Constellation":
        pts = tuple(complex(p) for p in points)
        return cls(pts, math.log2(max(2, len(pts))))

    @classmethod
    def square_grid(cls, rate_bits: float) -> "Constellation":
        """Default layout: first m points of a k x k grid over [-1,1]^2,
        scaled to unit average energy."""
        m = constellation_size(rate_bits)
        k = int(math.ceil(math.sqrt(m)))
        axis = np.linspace(-1.0, 1.0, k) if k > 1 else np.array([0.0])
        grid = (axis[None, :] + 1j * axis[:, None]).ravel()[:m]
        energy = float(np.mean(np.abs(grid) ** 2))
        if energy <= 0.0:
            raise ConfigError("degenerate grid: zero average energy")
        return cls(tuple(grid / math.sqrt(energy)), rate_bits)


@dataclass(frozen=True)
class PermutationConstellation:
    """Base constellation plus l-1 permutations, one derived constellation per sub-channel."""

    base: Constellation
    perms: tuple  # l-1 index permutations of the base points

    def __post_init__(self):
        d = len(self.base)
        norm = []
        for p in self.perms:
            idx = tuple(int(i) for i in p)
            if sorted(idx) != list(range(d)):
                raise ConfigError("each permutation must be a bijection on point indices")
            norm.append(idx)
        object.__setattr__(self, "perms", tuple(norm))

    @property
    def l(self) -> int:
        return 1 + len(self.perms)

    def constellations(self) -> list:
        """Point arrays for all l sub-channels; index 0 is the base itself."""
        base = self.base.as_array()
        return [base] + [base[list(p)] for p in self.perms]


def build_permutation_constellation(
    base: Constellation, l: int, rng: RngStream, identity: bool = False
) -> PermutationConstellation:
    """l constellations: the base plus l-1 uniformly random permutations of it.

    identity=True swaps every permutation for the identity (test hook).
    """
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    d = len(base)
    if identity:
        perms = tuple(tuple(range(d)) for _ in range(int(l) - 1))
    else:
        g = rng.generator()
        perms = tuple(tuple(int(i) for i in g.permutation(d)) for _ in range(int(l) - 1))
    return PermutationConstellation(base, perms)


def normalized_difference(
    p_a: complex, p_b: complex, sigma2_omega_prime: float, sigma2_n: float
) -> complex:
    """(p_a - p_b) / sqrt(sigma2_omega_prime / sigma2_n); points may be complex."""
    if float(sigma2_omega_prime) <= 0.0 or float(sigma2_n) <= 0.0:
        raise ConfigError("variances must be positive")
    return (complex(p_a) - complex(p_b)) / math.sqrt(
        float(sigma2_omega_prime) / float(sigma2_n)
    )


def product_distance(p_a, p_b, sigma2_omega_prime: float, sigma2_n_per_subchannel) -> float:
    """Product over sub-channels of the squared normalized difference magnitudes.

    A zero factor (identical components) is allowed and simply zeroes the
    product; the caller decides what to do with it.
    """
    a = np.asarray(p_a, dtype=np.complex128)
    b = np.asarray(p_b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ConfigError("codewords must be equal-length nonempty vectors")
    s2n = np.asarray(sigma2_n_per_subchannel, dtype=np.float64)
    if s2n.ndim == 0:
        s2n = np.full(a.size, float(s2n))
    if s2n.shape != a.shape:
        raise ConfigError("noise variances must broadcast to the codeword length")
    prod = 1.0
    for pa_i, pb_i, s2_i in zip(a, b, s2n):
        prod *= abs(normalized_difference(pa_i, pb_i, sigma2_omega_prime, s2_i)) ** 2
    return prod


def product_distance_bound(l: int, rate_bits: float, c: float = 1.0) -> float:
    """(c / (l * 2^rate_bits))^l, the worst-case product-distance floor."""
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    if float(c) <= 0.0:
        raise ConfigError("c must be positive")
    return (float(c) / (int(l) * 2.0 ** float(rate_bits))) ** int(l)


def exceeds_product_distance_bound(
    value: float, l: int, rate_bits: float, c: float = 1.0
) -> bool:
    """True when a measured product distance clears the floor (strictly)."""
    return float(value) > product_distance_bound(l, rate_bits, c)


@dataclass(frozen=True)
class DiversityMetrics:
    """Constant and rate entering the product-distance floor."""

    per_subchannel_rate: float
    c: float = 1.0

    def __post_init__(self):
        if float(self.c) <= 0.0:
            raise ConfigError("c must be positive")

    def bound(self, l: int) -> float:
        return product_distance_bound(l, self.per_subchannel_rate, self.c)

    def exceeds(self, value: float, l: int) -> bool:
        return exceeds_product_distance_bound(value, l, self.per_subchannel_rate, self.c)


@dataclass(frozen=True)
class DiversityParams:
    """(l, zeta) and the diversity order delta they induce."""

    l: int
    zeta: float
    delta: float

    def __post_init__(self):
        if int(self.l) < 1:
            raise ConfigError("l must be >= 1")
        if not (0.0 <= float(self.zeta) < 1.0):
            raise ConfigError("zeta must lie in [0, 1)")
        if float(self.delta) < 0.0:
            raise ConfigError("delta must be nonnegative")


SINGLE = "single"
AMQD = "amqd"


def diversity_order(l: int, zeta: float, mode: str = AMQD) -> DiversityParams:
    """Diversity order: 1 - zeta for a single carrier, l * (1 - zeta) multicarrier."""
    z = float(zeta)
    if not (0.0 <= z < 1.0):
        raise ConfigError("zeta must lie in [0, 1); the diversity order would vanish")
    if mode == SINGLE:
        if int(l) != 1:
            raise ConfigError("single-carrier mode requires l = 1")
        return DiversityParams(1, z, 1.0 - z)
    if mode == AMQD:
        if int(l) < 1:
            raise ConfigError("l must be >= 1")
        return DiversityParams(int(l), z, int(l) * (1.0 - z))
    raise ConfigError(f"unknown mode: {mode!r}")
