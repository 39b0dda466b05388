"""Exact algebraic and structural identity checks on geometry bundles.

Every check produces an IdentityReport with a named tolerance class:
"algebraic" residuals are pure eigenvalue algebra and must sit at round-off
(1e-10 to 1e-12 relative), while "differencing" residuals involve finite
differences and are allowed C*h^2.  Discretization noise must never be able
to mask an algebraic failure, so the two classes are never mixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .geometry import GeometryBundle, bundle as make_bundle, laplace_beltrami
from .grid import CutoffProfile, ScalarField2, gradient_fd

__all__ = [
    "IdentityReport",
    "check_form_equivalence",
    "check_complex_factorization",
    "check_volume_formula",
    "check_cutoff_volume_identity",
    "check_slope_volume",
    "check_coordinate_laplacian",
]


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one identity check: pass iff max residual <= tolerance."""

    name: str
    max_residual: float
    location: tuple[int, int]
    tolerance: float
    passed: bool
    tol_class: str
    details: dict = field(default_factory=dict)


def _argmax_abs(arr: np.ndarray) -> tuple[int, int]:
    i, j = np.unravel_index(np.argmax(np.abs(arr)), arr.shape)
    return int(i), int(j)


def _report(name, resid, tol, tol_class, **details) -> IdentityReport:
    loc = _argmax_abs(resid)
    mx = float(np.abs(resid[loc]))
    return IdentityReport(
        name=name,
        max_residual=mx,
        location=loc,
        tolerance=float(tol),
        passed=bool(mx <= tol),
        tol_class=tol_class,
        details=details,
    )


def check_form_equivalence(
    u: ScalarField2, psi: ScalarField2, slack_coeff: float = 10.0
) -> IdentityReport:
    """Equivalence of the arctangent form and the product form of the equation.

    Computes both residuals from the differenced Hessian of u:
      R1 = arctan(lam1) + arctan(lam2) - psi
      R2 = cos(psi)*tr(D^2 u) + sin(psi)*(det(D^2 u) - 1)
    and asserts the scaling relation
      max|R2| <= (1 + max V) * max|R1| + slack_coeff*h^2
    (for a consistent pair R2 = V sin(R1), so a small arctangent residual
    forces a small product-form residual with the volume element as the
    amplification factor).  For a genuine solution pair R1 itself must be at
    differencing level, so the check also requires max|R1| <= slack_coeff*h^2;
    an arbitrary mismatched pair fails there, informatively.
    """
    if u.grid != psi.grid:
        raise ValueError("potential and phase grids differ")
    B = make_bundle(u)
    h = u.grid.h
    r1 = B.phase - psi.values
    r2 = np.cos(psi.values) * B.sig1 + np.sin(psi.values) * (B.sig2 - 1.0)
    max_r1 = float(np.max(np.abs(r1)))
    vmax = float(np.max(B.vol))
    scale_tol = (1.0 + vmax) * max_r1 + slack_coeff * h * h
    phase_tol = slack_coeff * h * h
    loc = _argmax_abs(r2)
    max_r2 = float(np.abs(r2[loc]))
    passed = (max_r2 <= scale_tol) and (max_r1 <= phase_tol)
    return IdentityReport(
        name="form_equivalence",
        max_residual=max_r2,
        location=loc,
        tolerance=float(scale_tol),
        passed=passed,
        tol_class="differencing",
        details={
            "max_arctan_residual": max_r1,
            "phase_tolerance": phase_tol,
            "vol_max": vmax,
        },
    )


def check_complex_factorization(
    B: GeometryBundle, rtol: float = 1e-12
) -> IdentityReport:
    """(1 + i lam1)(1 + i lam2) = (1 - sig2) + i sig1 = V e^{i phase}, node-wise.

    Pure eigenvalue algebra; tolerance rtol*(1 + max V), class algebraic.
    """
    re = (1.0 - B.sig2) - B.vol * np.cos(B.phase)
    im = B.sig1 - B.vol * np.sin(B.phase)
    resid = np.maximum(np.abs(re), np.abs(im))
    tol = rtol * (1.0 + float(np.max(B.vol)))
    return _report("complex_factorization", resid, tol, "algebraic")


def check_volume_formula(
    B: GeometryBundle, delta: float = 1e-3, rtol: float = 1e-10
) -> IdentityReport:
    """V = sig1 / sin(phase) on nodes with sin(phase) >= sin(delta).

    Requires phase in (0, pi) everywhere on the bundle; nodes too close to
    the endpoints (sin below sin(delta)) are excluded from the residual to
    keep the division well-conditioned, and their count is reported.
    """
    if float(np.min(B.phase)) <= 0.0 or float(np.max(B.phase)) >= math.pi:
        raise PreconditionError(
            "volume formula needs phase in (0, pi) on the whole region"
        )
    mask = np.sin(B.phase) >= math.sin(min(delta, 0.5 * math.pi))
    if not mask.any():
        raise PreconditionError("no nodes with sin(phase) above the cutoff")
    resid = np.zeros_like(B.vol)
    resid[mask] = B.vol[mask] - B.sig1[mask] / np.sin(B.phase[mask])
    tol = rtol * float(np.max(B.vol))
    return _report(
        "volume_formula",
        resid,
        tol,
        "algebraic",
        excluded_nodes=int(np.size(mask) - np.count_nonzero(mask)),
    )


def check_cutoff_volume_identity(
    B: GeometryBundle, cutoff: CutoffProfile, slack_coeff: float = 10.0
) -> IdentityReport:
    """|grad_g phi|^2 V <= |D phi|^2 (2 cos(phase) + sig1 sin(phase)), node-wise.

    The left side contracts the analytic cutoff gradient with g^{-1}; the
    right side is the closed form of |D phi|^2 (2 + lam1^2 + lam2^2)/V
    obtained from the factorization identities.  Equality holds exactly when
    the cutoff gradient is an eigenvector of the Hessian; in general the
    eigenvalue-versus-trace bound makes it a one-sided inequality, asserted
    with differencing slack slack_coeff*h^2.
    """
    if cutoff.grid != B.grid:
        raise ValueError("cutoff and bundle grids differ")
    lhs = (
        _quadform(B, cutoff.grad.c1.values, cutoff.grad.c2.values) * B.vol
    )
    dphi2 = cutoff.grad.c1.values ** 2 + cutoff.grad.c2.values ** 2
    rhs = dphi2 * (2.0 * np.cos(B.phase) + B.sig1 * np.sin(B.phase))
    violation = np.maximum(lhs - rhs, 0.0)
    tol = slack_coeff * B.grid.h ** 2
    rep = _report("cutoff_volume", violation, tol, "differencing")
    return IdentityReport(
        name=rep.name,
        max_residual=rep.max_residual,
        location=rep.location,
        tolerance=rep.tolerance,
        passed=rep.passed,
        tol_class=rep.tol_class,
        details={"min_margin": float(np.min(rhs - lhs))},
    )


def _quadform(B: GeometryBundle, v1, v2):
    return B.inv11 * v1 * v1 + 2.0 * B.inv12 * v1 * v2 + B.inv22 * v2 * v2


def check_slope_volume(B: GeometryBundle) -> IdentityReport:
    """Slope dominated by volume element: b <= V node-wise (zero tolerance)."""
    resid = B.slope - B.vol
    i, j = np.unravel_index(np.argmax(resid), resid.shape)
    loc = (int(i), int(j))
    mx = float(resid[loc])
    return IdentityReport(
        name="slope_volume",
        max_residual=mx,
        location=loc,
        tolerance=0.0,
        passed=bool(mx <= 0.0),
        tol_class="algebraic",
        details={"min_margin": float(np.min(B.vol - B.slope))},
    )


def check_coordinate_laplacian(
    B: GeometryBundle,
    psi: ScalarField2 | None = None,
    slack_coeff: float = 20.0,
    margin_cells: int = 2,
) -> IdentityReport:
    """Laplace-Beltrami of the coordinates against the mean curvature algebra.

    For the graph of Du, the manifold Laplacian of an ambient coordinate
    equals the matching mean curvature component; in base coordinates
      lap_g x_k = -(M g^{-1} D psi)_k,  M = D^2 u.
    The left side runs through the divergence-form operator, the right side
    is pointwise algebra on the bundle plus one gradient of the phase, so
    agreement at O(h^2) exercises both routes.  Checked on the interior
    (margin_cells away from the boundary band).
    """
    g = B.grid
    if psi is None:
        psi = ScalarField2(g, B.phase)
    elif psi.grid != g:
        raise ValueError("phase field and bundle grids differ")
    gpsi = gradient_fd(psi)
    p1, p2 = gpsi.c1.values, gpsi.c2.values
    w1 = B.inv11 * p1 + B.inv12 * p2
    w2 = B.inv12 * p1 + B.inv22 * p2
    m11 = B.hess.m11.values
    m12 = B.hess.m12.values
    m22 = B.hess.m22.values
    alg = np.stack([-(m11 * w1 + m12 * w2), -(m12 * w1 + m22 * w2)])
    x1, x2 = g.coords()
    lap1 = laplace_beltrami(ScalarField2(g, x1 + np.zeros_like(x2)), B).values
    lap2 = laplace_beltrami(ScalarField2(g, x2 + np.zeros_like(x1)), B).values
    m = margin_cells
    resid = np.stack([lap1, lap2]) - alg
    core = resid[:, m:-m, m:-m]
    scale = 1.0 + float(np.max(np.abs(B.lam1))) ** 2
    tol = slack_coeff * g.h ** 2 * scale
    k, i, j = np.unravel_index(np.argmax(np.abs(core)), core.shape)
    mx = float(np.abs(core[k, i, j]))
    return IdentityReport(
        name="coordinate_laplacian",
        max_residual=mx,
        location=(int(i) + m, int(j) + m),
        tolerance=float(tol),
        passed=bool(mx <= tol),
        tol_class="differencing",
        details={"component": int(k) + 1},
    )
