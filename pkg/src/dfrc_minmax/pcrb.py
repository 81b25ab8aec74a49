"""Posterior Cramer-Rao bounds for angle/distance and the power floors they imply.

A PcrbModel stores, per unit transmit power, the eigenvalues of the whitened
observed Fisher information together with the squared prior-row weights that
couple them to the angle and distance variances.  Both bounds then reduce to
rational sums in the transmit power p:

    bound(p) = sum_m  b_sq[m] / (p * eigs[m] + 1)
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError

N_PARAMS = 4

_HERMITIAN_TOL = 1e-9
_PD_TOL = 1e-12
_FLOOR_TOL_W = 1e-9
_BRACKET_CAP = 2.0 ** 60


def _validated_row(values, name) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (N_PARAMS,):
        raise ValueError(f"{name} must have shape ({N_PARAMS},)")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{name} entries must be finite and >= 0")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PcrbModel:
    """Per-vehicle sensing model: squared prior rows and unit-power eigenvalues.

    All-zero eigenvalues are representable (no observation information); the
    floor computations reject them as infeasible only when a threshold
    actually requires observation power.
    """

    b1_sq: np.ndarray
    b2_sq: np.ndarray
    eigs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b1_sq", _validated_row(self.b1_sq, "b1_sq"))
        object.__setattr__(self, "b2_sq", _validated_row(self.b2_sq, "b2_sq"))
        object.__setattr__(self, "eigs", _validated_row(self.eigs, "eigs"))
        if not self.b1_sq.sum() > 0:
            raise ValueError("b1_sq needs at least one positive entry")
        if not self.b2_sq.sum() > 0:
            raise ValueError("b2_sq needs at least one positive entry")


@dataclass(frozen=True)
class PcrbThresholds:
    """Accuracy requirements: angle variance in rad^2, distance variance in m^2."""

    xi_theta: float
    xi_dist: float

    def __post_init__(self):
        if not (self.xi_theta > 0 and self.xi_dist > 0):
            raise ValueError("PCRB thresholds must be strictly positive")


def pcrb_angle(p: float, model: PcrbModel) -> float:
    """Angle-estimation variance bound at transmit power p (rad^2)."""
    if p < 0:
        raise ValueError("power must be >= 0")
    return float(np.sum(model.b1_sq / (p * model.eigs + 1.0)))


def pcrb_dist(p: float, model: PcrbModel) -> float:
    """Distance-estimation variance bound at transmit power p (m^2)."""
    if p < 0:
        raise ValueError("power must be >= 0")
    return float(np.sum(model.b2_sq / (p * model.eigs + 1.0)))


def _relaxed_row_floor(b_sq, eigs, xi, label) -> float:
    active = b_sq > 0
    if np.any(eigs[active] == 0):
        raise InfeasibleError(
            f"relaxed {label} bound unreachable: a zero eigenvalue carries weight")
    return float(np.sum(b_sq[active] / eigs[active]) / xi)


def power_floor_relaxed(model: PcrbModel, thr: PcrbThresholds) -> float:
    """Minimum power under the relaxed bounds (the +1 dropped from denominators)."""
    p_theta = _relaxed_row_floor(model.b1_sq, model.eigs, thr.xi_theta, "angle")
    p_dist = _relaxed_row_floor(model.b2_sq, model.eigs, thr.xi_dist, "distance")
    return max(p_theta, p_dist)


def power_floor_exact(model: PcrbModel, thr: PcrbThresholds) -> float:
    """Smallest p meeting both exact bounds, by bisection to 1e-9 W.

    Returns 0.0 when no power is needed.  Raises InfeasibleError when a
    threshold sits at or below the infinite-power limit of its bound.
    """
    lim_theta = float(np.sum(model.b1_sq[model.eigs == 0]))
    lim_dist = float(np.sum(model.b2_sq[model.eigs == 0]))
    if lim_theta >= thr.xi_theta or lim_dist >= thr.xi_dist:
        raise InfeasibleError(
            "a PCRB threshold lies at or below its infinite-power limit")

    def satisfied(p):
        return (pcrb_angle(p, model) <= thr.xi_theta
                and pcrb_dist(p, model) <= thr.xi_dist)

    if satisfied(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while not satisfied(hi):
        lo, hi = hi, 2.0 * hi
        if hi > _BRACKET_CAP:
            raise InfeasibleError("no finite power satisfies the PCRB thresholds")
    while hi - lo > _FLOOR_TOL_W:
        mid = 0.5 * (lo + hi)
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _check_hermitian(mat, name):
    if mat.shape != (N_PARAMS, N_PARAMS):
        raise ValueError(f"{name} must be {N_PARAMS}x{N_PARAMS}")
    asym = float(np.max(np.abs(mat - mat.conj().T)))
    if asym > _HERMITIAN_TOL:
        raise ValueError(f"{name} is not Hermitian (asymmetry {asym:.3e})")


def build_pcrb_model(prior_fisher, unit_power_observed_fisher) -> PcrbModel:
    """Derive a PcrbModel from prior and unit-power observed Fisher matrices.

    The observed matrix is whitened by the Hermitian square root of the
    prior, eigendecomposed, and the prior's first two rows are expressed in
    that eigenbasis.  The resulting sums reproduce the diagonal of the
    power-parameterised bound matrix exactly (see the round-trip tests).

    Args:
        prior_fisher: Hermitian positive-definite 4x4 matrix.
        unit_power_observed_fisher: Hermitian positive-semidefinite 4x4
            matrix of observed information per watt.
    """
    j_prior = np.asarray(prior_fisher, dtype=complex)
    j_obs = np.asarray(unit_power_observed_fisher, dtype=complex)
    _check_hermitian(j_prior, "prior_fisher")
    _check_hermitian(j_obs, "unit_power_observed_fisher")

    prior_eigs, prior_vecs = np.linalg.eigh(j_prior)
    if prior_eigs.min() <= _PD_TOL:
        raise ValueError("prior_fisher must be positive definite")
    obs_eigs = np.linalg.eigvalsh(j_obs)
    if obs_eigs.min() < -_HERMITIAN_TOL:
        raise ValueError("unit_power_observed_fisher must be positive semidefinite")

    sqrt_prior = (prior_vecs * np.sqrt(prior_eigs)) @ prior_vecs.conj().T
    inv_sqrt_prior = (prior_vecs / np.sqrt(prior_eigs)) @ prior_vecs.conj().T

    whitened = inv_sqrt_prior @ j_obs @ inv_sqrt_prior.conj().T
    whitened = 0.5 * (whitened + whitened.conj().T)
    lam, basis = np.linalg.eigh(whitened)
    order = np.argsort(-lam, kind="stable")
    lam = np.clip(lam[order], 0.0, None)
    basis = basis[:, order]

    rows = sqrt_prior @ basis
    return PcrbModel(b1_sq=np.abs(rows[0]) ** 2,
                     b2_sq=np.abs(rows[1]) ** 2,
                     eigs=lam)
