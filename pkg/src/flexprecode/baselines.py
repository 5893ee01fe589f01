"""Comparison schemes: fixed half-wavelength array, greedy capacity-based
antenna selection over the grid, and a brute-force on-grid oracle for small
instances.
"""

from __future__ import annotations

import itertools
import math
from enum import Enum

import numpy as np

from .channel import AntennaPositions, PathSet, PositionGrid, build_dictionary
from .precoding import rzf_objective

# largest subset count the exhaustive oracle will enumerate
EXHAUSTIVE_GUARD = 10 ** 6


class BaselineKind(Enum):
    FIXED_ARRAY = "fixed"
    FAST_AS = "fast_as"
    EXHAUSTIVE_ORACLE = "exhaustive"


def fixed_array_positions(nx: int, nz: int, wavelength: float) -> AntennaPositions:
    """nx x nz lattice at half-wavelength spacing, anchored at the origin."""
    if nx < 1 or nz < 1:
        raise ValueError("array must have at least one element per axis")
    half = wavelength / 2.0
    n = np.arange(nx * nz)
    coords = np.column_stack([(n % nx) * half, (n // nx) * half])
    return AntennaPositions(coords)


def fast_antenna_selection(paths: PathSet, grid: PositionGrid, num_antennas: int,
                           noise_power: float) -> AntennaPositions:
    """Greedy selection of grid points maximizing log det(I + H_S H_S^H / noise).

    Each step scores every remaining candidate through the matrix-determinant
    lemma, so one K x K inverse serves the whole sweep. Grid spacing is
    lambda/2, which makes the spacing constraint automatic. Ties break to the
    lowest grid index.
    """
    if num_antennas > grid.size:
        raise ValueError(f"cannot select {num_antennas} antennas from {grid.size} grid points")
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    dictionary = build_dictionary(paths, grid)
    K = paths.num_users
    selected: list[int] = []
    remaining = np.arange(grid.size)
    A = np.eye(K, dtype=complex)  # I + H_S H_S^H / noise for the current S
    for _ in range(num_antennas):
        Ainv = np.linalg.inv(A)
        cols = dictionary[:, remaining]
        # gain of adding column b: log(1 + b^H A^-1 b / noise); argmax of the quadratic form
        quad = np.einsum("kg,kl,lg->g", cols.conj(), Ainv, cols).real
        best = int(remaining[int(np.argmax(quad))])
        selected.append(best)
        b = dictionary[:, best]
        A = A + np.outer(b, b.conj()) / noise_power
        remaining = remaining[remaining != best]
    return AntennaPositions(grid.all_coords()[selected])


def exhaustive_selection_oracle(paths: PathSet, grid: PositionGrid, num_antennas: int,
                                alpha: float) -> tuple[AntennaPositions, float]:
    """Best on-grid support by full enumeration of the RLS objective.

    Only valid for small instances; guards against more than 10^6 subsets.
    """
    count = math.comb(grid.size, num_antennas)
    if count > EXHAUSTIVE_GUARD:
        raise ValueError(f"C({grid.size}, {num_antennas}) = {count} exceeds the enumeration guard")
    dictionary = build_dictionary(paths, grid)
    best_combo = None
    best_obj = np.inf
    for combo in itertools.combinations(range(grid.size), num_antennas):
        obj = rzf_objective(dictionary[:, combo], alpha)
        if obj < best_obj:
            best_combo = combo
            best_obj = obj
    return AntennaPositions(grid.all_coords()[list(best_combo)]), float(best_obj)
