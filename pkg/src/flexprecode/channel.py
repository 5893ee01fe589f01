"""Multipath scenario generation and array manifolds for a planar movable region.

Geometry lives in the x-z plane. A transmit antenna sits at continuous
coordinates (x, z); users are single-antenna with L-path channels whose
angles are parameterized as virtual direction cosines in [-1, 1].
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s

# floating-point slack on the half-wavelength spacing constraint
SPACING_TOL = 1e-9


def wavelength_from_carrier(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_hz}")
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class PathSet:
    """Per-user multipath parameters: complex gains and virtual DoAs, all (K, L)."""

    gains: np.ndarray      # complex path gains
    azimuth: np.ndarray    # virtual azimuth (sin*sin direction cosine), in [-1, 1]
    elevation: np.ndarray  # virtual elevation (cos direction cosine), in [-1, 1]

    def __post_init__(self):
        if self.gains.ndim != 2:
            raise ValueError("gains must be a K x L matrix")
        if self.azimuth.shape != self.gains.shape or self.elevation.shape != self.gains.shape:
            raise ValueError("azimuth/elevation must match gains shape")
        if np.any(np.abs(self.azimuth) > 1.0) or np.any(np.abs(self.elevation) > 1.0):
            raise ValueError("virtual DoAs must lie in [-1, 1]")

    @property
    def num_users(self) -> int:
        return self.gains.shape[0]

    @property
    def num_paths(self) -> int:
        return self.gains.shape[1]

    def digest(self) -> str:
        """Stable hash of the scenario, used to assert paired-trial sharing."""
        h = hashlib.sha1()
        for arr in (self.gains, self.azimuth, self.elevation):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class PositionGrid:
    """Half-wavelength discretization of the movable region, anchored at (0, 0).

    Grid index g is x-major: g -> (i, j) with i = g % nx, j = g // nx,
    at coordinates (i*d, j*d) where d = wavelength / 2.
    """

    nx: int
    nz: int
    wavelength: float

    def __post_init__(self):
        if self.nx < 1 or self.nz < 1:
            raise ValueError("grid must have at least one point per axis")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")

    @property
    def spacing(self) -> float:
        return self.wavelength / 2.0

    @property
    def size(self) -> int:
        return self.nx * self.nz

    @property
    def bounds(self) -> tuple[float, float]:
        """(x_max, z_max) of the region bounding box; the origin is (0, 0)."""
        return (self.nx - 1) * self.spacing, (self.nz - 1) * self.spacing

    def coords(self, index: int) -> tuple[float, float]:
        if not 0 <= index < self.size:
            raise IndexError(f"grid index {index} out of range for G={self.size}")
        return (index % self.nx) * self.spacing, (index // self.nx) * self.spacing

    def all_coords(self) -> np.ndarray:
        """(G, 2) array of grid coordinates in x-major index order."""
        i = np.arange(self.size) % self.nx
        j = np.arange(self.size) // self.nx
        return np.column_stack([i * self.spacing, j * self.spacing])

    @classmethod
    def square(cls, size: int, wavelength: float) -> "PositionGrid":
        side = round(np.sqrt(size))
        if side * side != size:
            raise ValueError(f"region size G={size} is not a perfect square; use an explicit nx x nz grid")
        return cls(side, side, wavelength)


@dataclass(frozen=True)
class AntennaPositions:
    """Ordered continuous (x, z) antenna coordinates in meters, shape (N, 2)."""

    coords: np.ndarray

    def __post_init__(self):
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise ValueError("coords must be an (N, 2) array")

    @property
    def count(self) -> int:
        return self.coords.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def zs(self) -> np.ndarray:
        return self.coords[:, 1]

    def min_pairwise_distance(self) -> float:
        if self.count < 2:
            return np.inf
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        return float(dist[np.triu_indices(self.count, k=1)].min())

    def validate(self, region: PositionGrid) -> None:
        """Check the half-wavelength spacing and region-box invariants."""
        half = region.wavelength / 2.0
        if self.min_pairwise_distance() < half - SPACING_TOL:
            raise ValueError("antenna positions violate the half-wavelength spacing constraint")
        x_max, z_max = region.bounds
        if (np.any(self.xs < -SPACING_TOL) or np.any(self.xs > x_max + SPACING_TOL)
                or np.any(self.zs < -SPACING_TOL) or np.any(self.zs > z_max + SPACING_TOL)):
            raise ValueError("antenna positions fall outside the movable region")


def sample_paths(seed: int, num_users: int, num_paths: int) -> PathSet:
    """Draw a random scenario: uniform virtual DoAs, unit-variance complex Gaussian gains."""
    if num_users < 1:
        raise ValueError(f"need at least one user, got {num_users}")
    if num_paths < 1:
        raise ValueError(f"need at least one path, got {num_paths}")
    rng = np.random.default_rng(seed)
    shape = (num_users, num_paths)
    azimuth = rng.uniform(-1.0, 1.0, shape)
    elevation = rng.uniform(-1.0, 1.0, shape)
    gains = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return PathSet(gains=gains, azimuth=azimuth, elevation=elevation)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Derive the per-trial seed from (master seed, trial index) alone.

    Uses a SeedSequence keyed on both integers, so trial streams are
    independent and reproducible without any sequential draw order.
    """
    ss = np.random.SeedSequence([int(master_seed), int(trial_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def angle_manifold(positions: AntennaPositions, theta: float, phi: float,
                   wavelength: float) -> np.ndarray:
    """Array response to one plane wave: entry n is exp(j*2pi/lambda*(phi*x_n + theta*z_n)).

    Unit-modulus entries; no 1/sqrt(N) array factor.
    """
    if abs(theta) > 1.0 or abs(phi) > 1.0:
        raise ValueError("virtual DoAs must lie in [-1, 1]")
    k0 = 2.0 * np.pi / wavelength
    return np.exp(1j * k0 * (phi * positions.xs + theta * positions.zs))


def user_channel(positions: AntennaPositions, paths: PathSet, user: int,
                 wavelength: float) -> np.ndarray:
    """Length-N channel h_k = sqrt(1/L) * sum_l gain_{k,l} * a(theta_{k,l}, phi_{k,l})."""
    if not 0 <= user < paths.num_users:
        raise IndexError(f"user index {user} out of range for K={paths.num_users}")
    k0 = 2.0 * np.pi / wavelength
    # (L, N) per-path phases across antennas
    phase = k0 * (paths.azimuth[user][:, None] * positions.xs[None, :]
                  + paths.elevation[user][:, None] * positions.zs[None, :])
    terms = paths.gains[user][:, None] * np.exp(1j * phase)
    return terms.sum(axis=0) / np.sqrt(paths.num_paths)


def _manifold_at(paths: PathSet, xs: np.ndarray, zs: np.ndarray, wavelength: float) -> np.ndarray:
    """(K, M) matrix of position manifolds at M candidate positions."""
    k0 = 2.0 * np.pi / wavelength
    phase = k0 * (paths.azimuth[:, :, None] * xs[None, None, :]
                  + paths.elevation[:, :, None] * zs[None, None, :])
    terms = np.conj(paths.gains)[:, :, None] * np.exp(-1j * phase)
    return terms.sum(axis=1) / np.sqrt(paths.num_paths)


def position_manifold(paths: PathSet, x: float, z: float, wavelength: float) -> np.ndarray:
    """Length-K response of one antenna at (x, z) across every user's paths.

    Entry k is the conjugate of that user's single-antenna channel, so a
    channel matrix with rows h_k^H has these vectors as columns.
    """
    return _manifold_at(paths, np.atleast_1d(float(x)), np.atleast_1d(float(z)), wavelength)[:, 0]


def position_manifold_grad(paths: PathSet, x: float, z: float,
                           wavelength: float) -> tuple[np.ndarray, np.ndarray]:
    """Spatial partials (db/dx, db/dz) of the position manifold, each length K."""
    k0 = 2.0 * np.pi / wavelength
    phase = k0 * (paths.azimuth * x + paths.elevation * z)
    core = np.conj(paths.gains) * np.exp(-1j * phase) / np.sqrt(paths.num_paths)
    dbdx = (-1j * k0 * paths.azimuth * core).sum(axis=1)
    dbdz = (-1j * k0 * paths.elevation * core).sum(axis=1)
    return dbdx, dbdz


def channel_matrix(paths: PathSet, positions: AntennaPositions, wavelength: float) -> np.ndarray:
    """K x N downlink channel with rows h_k^H, i.e. columns b(x_n, z_n)."""
    return _manifold_at(paths, positions.xs, positions.zs, wavelength)


def build_dictionary(paths: PathSet, grid: PositionGrid) -> np.ndarray:
    """K x G dictionary: column g is the position manifold at grid point g (x-major)."""
    coords = grid.all_coords()
    return _manifold_at(paths, coords[:, 0], coords[:, 1], grid.wavelength)
