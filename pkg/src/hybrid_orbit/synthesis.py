"""Per-phase gain design and spectral-radius stability certificates.

Three independent ways to pick the parameter-feedback gains K_i, all
working phase by phase from the section-map sensitivities (A_i, F_i):

* symmetric-matrix: drive every designed Jacobian to one symmetric
  contraction target through a pseudoinverse solve;
* scale-factor: shrink each A_i so its largest entry is eta / k;
* DLQR: discrete LQR gain on the linearized section dynamics, optionally
  rescaling Q until the largest designed entry is below 1 / k.

The certificates check the two sufficient conditions under which the
product of per-phase contractions is guaranteed to contract: all factors
symmetric with radius below one, or all entries strictly below 1 / k.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import (
    NumericsError,
    as_matrix,
    dlqr_gain,
    max_abs_entry,
    pinv,
    spectral_radius,
)
from .poincare import PhaseJacobians, compose_jacobians

__all__ = [
    "GainSet",
    "TheoremCertificate",
    "StabilityReport",
    "SynthesisError",
    "RESIDUAL_TOL",
    "designed_jacobians",
    "symmetric_matrix_gains",
    "scale_factor_gains",
    "dlqr_gains",
    "certify_theorem3",
    "certify_theorem4",
    "stability_report",
]

# Above this design residual (max-entry norm) the pinv target was not
# reachable and the gain set is flagged inexact.
RESIDUAL_TOL = 1e-6


class SynthesisError(RuntimeError):
    """Gain synthesis failed (unreachable target or solver failure)."""


@dataclass
class GainSet:
    """Gains from one synthesis method plus per-phase design residuals."""

    method: str
    gains: list[np.ndarray]
    residuals: list[float]
    inexact: bool
    scale_factors: list[float] | None = None
    q_scalings: list[float] | None = None


@dataclass
class TheoremCertificate:
    name: str
    passed: bool
    per_phase: list[dict]

    def failures(self) -> list[dict]:
        return [entry for entry in self.per_phase if not entry["ok"]]


@dataclass
class StabilityReport:
    designed: list[np.ndarray]
    per_phase_radius: list[float]
    product: np.ndarray
    product_radius: float
    cert_theorem3: TheoremCertificate
    cert_theorem4: TheoremCertificate
    stable: bool
    inexact_design: bool


def _unpack(jacs) -> list[tuple[np.ndarray, np.ndarray]]:
    pairs = []
    for j in jacs:
        if isinstance(j, PhaseJacobians):
            pairs.append((as_matrix(j.A), as_matrix(j.F)))
        else:
            a, f = j
            pairs.append((as_matrix(a), as_matrix(f)))
    if not pairs:
        raise ValueError("need at least one phase")
    return pairs


def designed_jacobians(jacs, gains: GainSet) -> list[np.ndarray]:
    """Closed-loop per-phase Jacobians A_i - F_i K_i."""
    pairs = _unpack(jacs)
    if len(gains.gains) != len(pairs):
        raise ValueError("gain count does not match phase count")
    out = []
    for (a, f), k in zip(pairs, gains.gains):
        k = as_matrix(k)
        if f.shape[1] != k.shape[0] or k.shape[1] != a.shape[1]:
            raise ValueError(
                f"dimension mismatch: A {a.shape}, F {f.shape}, K {k.shape}"
            )
        out.append(a - f @ k)
    return out


def _solve_gain(a, f, target) -> tuple[np.ndarray, float]:
    gain = pinv(f) @ (a - target)
    residual = max_abs_entry(a - f @ gain - target) if a.size else 0.0
    return gain, residual


def symmetric_matrix_gains(jacs, m_sym: np.ndarray | None = None, sym_tol: float = 1e-10) -> GainSet:
    """Drive every phase to one symmetric contraction target.

    The default target is the zero matrix (deadbeat): it is symmetric, has
    spectral radius zero, and maximizes the contraction margin.  Rank
    deficient F_i leaves the target unreachable; the residual records how
    far the achieved Jacobian lands from it.
    """
    pairs = _unpack(jacs)
    k_dim = pairs[0][0].shape[0]
    if m_sym is None:
        m_sym = np.zeros((k_dim, k_dim))
    m_sym = as_matrix(m_sym)
    if m_sym.shape != (k_dim, k_dim):
        raise ValueError(f"target has shape {m_sym.shape}, expected ({k_dim}, {k_dim})")
    if max_abs_entry(m_sym - m_sym.T) > sym_tol:
        raise ValueError("target matrix must be symmetric")
    if spectral_radius(m_sym) >= 1.0:
        raise ValueError("target matrix must have spectral radius below one")

    gains, residuals = [], []
    for a, f in pairs:
        gain, residual = _solve_gain(a, f, m_sym)
        gains.append(gain)
        residuals.append(residual)
    return GainSet(
        method="symmetric",
        gains=gains,
        residuals=residuals,
        inexact=any(r > RESIDUAL_TOL for r in residuals),
    )


def scale_factor_gains(jacs, eta: float = 1.0) -> GainSet:
    """Shrink each phase Jacobian by c_i = eta / (k * max |A_i|).

    With eta = 1 the largest designed entry sits exactly on the 1/k
    boundary; eta < 1 restores a strict margin for the entrywise
    certificate.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    pairs = _unpack(jacs)
    gains, residuals, factors = [], [], []
    for idx, (a, f) in enumerate(pairs):
        m_i = max_abs_entry(a)
        if m_i == 0.0:
            raise SynthesisError(f"phase {idx}: A is zero, the scale factor is undefined")
        k_dim = a.shape[0]
        c_i = eta / (k_dim * m_i)
        gain, residual = _solve_gain(a, f, c_i * a)
        gains.append(gain)
        residuals.append(residual)
        factors.append(c_i)
    return GainSet(
        method="scale_factor",
        gains=gains,
        residuals=residuals,
        inexact=any(r > RESIDUAL_TOL for r in residuals),
        scale_factors=factors,
    )


def dlqr_gains(
    jacs,
    q: list[np.ndarray] | None = None,
    r: list[np.ndarray] | None = None,
    enforce_theorem4: bool = False,
    q_growth: float = 10.0,
    max_q_scalings: int = 12,
) -> GainSet:
    """Per-phase discrete LQR gains on the section dynamics.

    Defaults to identity weights.  With enforce_theorem4 each Q_i is grown
    geometrically until the largest designed entry drops strictly below
    1 / k (larger Q shrinks the designed Jacobian); the applied scale is
    reported per phase.
    """
    pairs = _unpack(jacs)
    n = len(pairs)
    if q is None:
        q = [np.eye(a.shape[0]) for a, _ in pairs]
    if r is None:
        r = [np.eye(f.shape[1]) for _, f in pairs]
    if len(q) != n or len(r) != n:
        raise ValueError("need one Q and one R per phase")

    gains, scalings = [], []
    for idx, ((a, f), q_i, r_i) in enumerate(zip(pairs, q, r)):
        k_dim = a.shape[0]
        scale = 1.0
        try:
            gain = dlqr_gain(a, f, scale * np.asarray(q_i, dtype=float), r_i)
            if enforce_theorem4:
                for _ in range(max_q_scalings):
                    if max_abs_entry(a - f @ gain) < 1.0 / k_dim:
                        break
                    scale *= q_growth
                    gain = dlqr_gain(a, f, scale * np.asarray(q_i, dtype=float), r_i)
                else:
                    raise SynthesisError(
                        f"phase {idx}: entrywise bound not reached after "
                        f"{max_q_scalings} Q scalings"
                    )
        except NumericsError as exc:
            raise SynthesisError(f"phase {idx}: {exc}") from exc
        gains.append(gain)
        scalings.append(scale)
    return GainSet(
        method="dlqr",
        gains=gains,
        residuals=[0.0] * n,
        inexact=False,
        q_scalings=scalings,
    )


def certify_theorem3(designed, sym_tol: float = 1e-10) -> TheoremCertificate:
    """Symmetric-contraction certificate.

    Passes when every designed Jacobian is symmetric (within sym_tol) with
    spectral radius below one; the product radius is then below one as
    well, because for symmetric factors the spectral norm equals the
    spectral radius and the norm is submultiplicative.
    """
    per_phase = []
    for idx, m in enumerate(designed):
        m = as_matrix(m)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"designed Jacobian {idx} is not square: {m.shape}")
        defect = max_abs_entry(m - m.T)
        radius = spectral_radius(m)
        per_phase.append(
            {
                "phase": idx,
                "symmetry_defect": defect,
                "radius": radius,
                "ok": bool(defect <= sym_tol and radius < 1.0),
            }
        )
    return TheoremCertificate(
        name="theorem3",
        passed=all(entry["ok"] for entry in per_phase),
        per_phase=per_phase,
    )


def certify_theorem4(designed) -> TheoremCertificate:
    """Entrywise-bound certificate, strict form.

    Passes when every entry of every designed Jacobian is strictly below
    1 / k.  The strict inequality matters: a chain of matrices with all
    entries exactly 1 / k has product radius exactly one.
    """
    per_phase = []
    k_dim = None
    for idx, m in enumerate(designed):
        m = as_matrix(m)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"designed Jacobian {idx} is not square: {m.shape}")
        if k_dim is None:
            k_dim = m.shape[0]
        elif m.shape[0] != k_dim:
            raise ValueError("designed Jacobians must share one dimension")
        m_i = max_abs_entry(m)
        per_phase.append(
            {
                "phase": idx,
                "max_abs_entry": m_i,
                "margin": 1.0 / k_dim - m_i,
                "ok": bool(m_i < 1.0 / k_dim),
            }
        )
    return TheoremCertificate(
        name="theorem4",
        passed=all(entry["ok"] for entry in per_phase),
        per_phase=per_phase,
    )


def stability_report(jacs, gains: GainSet) -> StabilityReport:
    """Designed Jacobians, both certificates and the product-radius verdict.

    The verdict is always the directly computed product radius; the
    certificates are sufficient conditions layered on top.  When the gain
    set is inexact the certificates refer to the achieved (not the target)
    Jacobians, which is what the product is built from anyway.
    """
    designed = designed_jacobians(jacs, gains)
    product = compose_jacobians(designed)
    product_radius = spectral_radius(product)
    return StabilityReport(
        designed=designed,
        per_phase_radius=[spectral_radius(m) for m in designed],
        product=product,
        product_radius=product_radius,
        cert_theorem3=certify_theorem3(designed),
        cert_theorem4=certify_theorem4(designed),
        stable=bool(product_radius < 1.0),
        inexact_design=gains.inexact,
    )
