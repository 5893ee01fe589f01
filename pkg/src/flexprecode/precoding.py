"""Closed-form regularized zero-forcing (RZF) precoding and rate evaluation.

Dual form H^H (H H^H + a I)^-1 and primal form (H^H H + a I)^-1 H^H agree for
a > 0; the regularization factor a sweeps the precoder between matched
filtering (a -> inf), zero forcing (a -> 0) and MMSE (a = noise power).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

# condition-number guard for the unregularized (a = 0) solves
COND_LIMIT = 1e12


def _solve_hpd(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian positive-definite A via Cholesky."""
    try:
        factor = cho_factor(A, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(f"Gram matrix is not positive definite: {err}") from err
    return cho_solve(factor, B, check_finite=False)


def rzf_dual(H: np.ndarray, alpha: float) -> np.ndarray:
    """RZF precoder H^H (H H^H + alpha I_K)^-1 for a K x N channel."""
    if alpha < 0:
        raise ValueError(f"regularization factor must be >= 0, got {alpha}")
    K = H.shape[0]
    gram = H @ H.conj().T + alpha * np.eye(K)
    if alpha == 0 and np.linalg.cond(gram) > COND_LIMIT:
        raise np.linalg.LinAlgError(
            "H H^H is numerically singular at alpha = 0; use alpha > 0")
    # gram is Hermitian, so solve(gram, H) = gram^-1 H and F = (gram^-1 H)^H
    return _solve_hpd(gram, H).conj().T


def rzf_primal(H: np.ndarray, alpha: float) -> np.ndarray:
    """RZF precoder (H^H H + alpha I_n)^-1 H^H; requires alpha > 0.

    Identical to rzf_dual for the same H and alpha, but the Gram matrix is
    n x n and stays invertible however few antenna columns H carries.
    """
    if alpha <= 0:
        raise ValueError(f"primal form needs alpha > 0, got {alpha}")
    n = H.shape[1]
    gram = H.conj().T @ H + alpha * np.eye(n)
    return _solve_hpd(gram, H.conj().T)


def rls_fit(H: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Fit F by regularized LS; returns (F, residual I - H F, objective value).

    The objective is ||I - H F||_F^2 + alpha ||F||_F^2.
    """
    F = rzf_primal(H, alpha)
    R = np.eye(H.shape[0]) - H @ F
    obj = float(np.linalg.norm(R) ** 2 + alpha * np.linalg.norm(F) ** 2)
    return F, R, obj


def rzf_objective(H: np.ndarray, alpha: float) -> float:
    """Value of ||I - H F||_F^2 + alpha ||F||_F^2 at the RZF solution."""
    return rls_fit(H, alpha)[2]


def normalize_precoder(F: np.ndarray, total_power: float) -> np.ndarray:
    """Scale each column to squared norm total_power / K (equal per-user power)."""
    if total_power <= 0:
        raise ValueError(f"total power must be positive, got {total_power}")
    col_norms = np.linalg.norm(F, axis=0)
    if np.any(col_norms == 0):
        raise ValueError("cannot normalize a precoder with a zero column")
    K = F.shape[1]
    return F * (np.sqrt(total_power / K) / col_norms)


def sinr_per_user(H: np.ndarray, F: np.ndarray, noise_power: float) -> np.ndarray:
    """Per-user SINR for channel rows h_k^H and precoder columns f_k."""
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    if H.shape[1] != F.shape[0] or H.shape[0] != F.shape[1]:
        raise ValueError(f"dimension mismatch: H is {H.shape}, F is {F.shape}")
    link = np.abs(H @ F) ** 2  # link[k, i] = |h_k^H f_i|^2
    signal = np.diag(link)
    interference = link.sum(axis=1) - signal
    return signal / (interference + noise_power)


def sum_rate(H: np.ndarray, F: np.ndarray, noise_power: float) -> float:
    """Aggregate spectral efficiency sum_k log2(1 + SINR_k), in bits/s/Hz."""
    return float(np.log2(1.0 + sinr_per_user(H, F, noise_power)).sum())


def regularized_projection(H: np.ndarray, alpha: float) -> np.ndarray:
    """Shrunken projection H (H^H H + alpha I)^-1 H^H onto the column space of H.

    Hermitian with eigenvalues in [0, 1]; idempotent only in the alpha -> 0
    limit with full column rank.
    """
    if alpha < 0:
        raise ValueError(f"regularization factor must be >= 0, got {alpha}")
    n = H.shape[1]
    gram = H.conj().T @ H + alpha * np.eye(n)
    if alpha == 0 and np.linalg.cond(gram) > COND_LIMIT:
        raise np.linalg.LinAlgError(
            "H^H H is numerically singular at alpha = 0; use alpha > 0")
    return H @ _solve_hpd(gram, H.conj().T)


@dataclass
class PrecodingState:
    """Channel/precoder/residual triple kept consistent through optimizer updates."""

    channel: np.ndarray   # K x n, columns are selected position manifolds
    precoder: np.ndarray  # n x K
    residual: np.ndarray  # K x K, equals I - channel @ precoder
    alpha: float

    @classmethod
    def from_channel(cls, channel: np.ndarray, alpha: float) -> "PrecodingState":
        F, R, _ = rls_fit(channel, alpha)
        return cls(channel=channel, precoder=F, residual=R, alpha=alpha)

    @property
    def objective(self) -> float:
        return float(np.linalg.norm(self.residual) ** 2
                     + self.alpha * np.linalg.norm(self.precoder) ** 2)

    def residual_error(self) -> float:
        """Max deviation of the stored residual from I - channel @ precoder."""
        K = self.channel.shape[0]
        return float(np.abs(self.residual - (np.eye(K) - self.channel @ self.precoder)).max())
