"""Per-node geometry of the gradient graph (x, Du(x)) over a 2D potential.

From the Hessian of a potential u this module builds: ordered eigenvalues
lam1 >= lam2, the phase arctan(lam1) + arctan(lam2), the symmetric functions
sig1 = lam1 + lam2 and sig2 = lam1*lam2, the induced metric g = I + (D^2 u)^2
with its inverse, the volume element V = sqrt(det g), and the slope function
b = ln sqrt(1 + lam1^2).  On top of the metric it provides the squared metric
gradient norm, a divergence-form Laplace-Beltrami operator with exact
discrete summation by parts, and the mean curvature vector of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2, ScalarField2, SymMat2Field, Vec2Field, gradient_fd, hessian_fd

__all__ = [
    "GeometryBundle",
    "SlopeConstants",
    "eigen_sym2",
    "bundle",
    "bundle_from_hessian",
    "negate_bundle",
    "grad_g_norm2",
    "laplace_beltrami",
    "laplace_beltrami_nondiv",
    "mean_curvature",
    "slope",
    "modified_slope",
]


def eigen_sym2(m11, m12, m22):
    """Eigenvalues of symmetric 2x2 matrices, elementwise.

    Returns (lam1, lam2) with lam1 >= lam2, from the closed form
    (tr +- sqrt(tr^2 - 4 det))/2.  The discriminant is evaluated in the
    rearranged form ((m11 - m22)/2)^2 + m12^2 and clamped at zero, so
    round-off can never produce a negative radicand.
    """
    m11 = np.asarray(m11, dtype=float)
    m12 = np.asarray(m12, dtype=float)
    m22 = np.asarray(m22, dtype=float)
    if not (np.all(np.isfinite(m11)) and np.all(np.isfinite(m12)) and np.all(np.isfinite(m22))):
        raise ValueError("symmetric matrix entries must be finite")
    mid = 0.5 * (m11 + m22)
    disc = (0.5 * (m11 - m22)) ** 2 + m12 * m12
    d = np.sqrt(np.maximum(disc, 0.0))
    return mid + d, mid - d


@dataclass(frozen=True)
class SlopeConstants:
    """Constants steering the slope-function checks.

    delta     supercritical phase margin (phase >= delta), radians
    c         quadratic coefficient in the slope curvature inequality
    A         weight of the quadratic added to the slope (modified slope)
    C         additive constant of the slope curvature inequality (0 = fit)
    eps_gap   relative eigenvalue-gap floor below which pointwise slope
              checks exclude a node (the slope is a function of the largest
              eigenvalue and loses smoothness where the eigenvalues cross)
    """

    delta: float = 0.3
    c: float = 0.5
    A: float = 0.0
    C: float = 0.0
    eps_gap: float = 1e-6

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not 0.0 < self.c <= 1.0:
            raise ValueError(f"c must lie in (0, 1], got {self.c}")
        if self.A < 0:
            raise ValueError(f"A must be non-negative, got {self.A}")
        if not self.eps_gap > 0:
            raise ValueError(f"eps_gap must be positive, got {self.eps_gap}")


@dataclass(frozen=True, eq=False)
class GeometryBundle:
    """All per-node graph geometry derived from one Hessian field.

    Arrays are (n, n), read-only, and mutually consistent:
    lam1 >= lam2, phase = arctan(lam1) + arctan(lam2) in (-pi, pi),
    sig1 = lam1 + lam2, sig2 = lam1*lam2,
    vol = sqrt((1 + lam1^2)(1 + lam2^2)) = sqrt(det g),
    g = I + M^2 for the stored Hessian M (positive definite),
    inv* are the components of g^{-1}, and
    slope = ln sqrt(1 + lam1^2) >= 0.

    grad optionally carries the potential's gradient (needed by volume and
    Hessian-estimate checks); bundles built directly from a Hessian field
    leave it None.
    """

    grid: Grid2
    hess: SymMat2Field
    lam1: np.ndarray
    lam2: np.ndarray
    phase: np.ndarray
    sig1: np.ndarray
    sig2: np.ndarray
    vol: np.ndarray
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    inv11: np.ndarray
    inv12: np.ndarray
    inv22: np.ndarray
    slope: np.ndarray
    grad: Vec2Field | None = None

    @property
    def sqrt_det_g(self) -> np.ndarray:
        return self.vol


def _ro(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def bundle_from_hessian(hess: SymMat2Field, grad: Vec2Field | None = None) -> GeometryBundle:
    """Assemble a GeometryBundle from a (possibly analytic) Hessian field."""
    m11 = hess.m11.values
    m12 = hess.m12.values
    m22 = hess.m22.values
    lam1, lam2 = eigen_sym2(m11, m12, m22)
    phase = np.arctan(lam1) + np.arctan(lam2)
    sig1 = lam1 + lam2
    sig2 = lam1 * lam2
    vol = np.sqrt((1.0 + lam1 * lam1) * (1.0 + lam2 * lam2))
    g11 = 1.0 + m11 * m11 + m12 * m12
    g12 = m12 * (m11 + m22)
    g22 = 1.0 + m22 * m22 + m12 * m12
    detg = g11 * g22 - g12 * g12
    inv11 = g22 / detg
    inv12 = -g12 / detg
    inv22 = g11 / detg
    b = 0.5 * np.log1p(lam1 * lam1)
    return GeometryBundle(
        grid=hess.grid,
        hess=hess,
        lam1=_ro(lam1),
        lam2=_ro(lam2),
        phase=_ro(phase),
        sig1=_ro(sig1),
        sig2=_ro(sig2),
        vol=_ro(vol),
        g11=_ro(g11),
        g12=_ro(g12),
        g22=_ro(g22),
        inv11=_ro(inv11),
        inv12=_ro(inv12),
        inv22=_ro(inv22),
        slope=_ro(b),
        grad=grad,
    )


def bundle(u: ScalarField2, hess: SymMat2Field | None = None) -> GeometryBundle:
    """Geometry bundle of a potential, differencing its Hessian if not given."""
    if hess is None:
        hess = hessian_fd(u)
    elif hess.grid != u.grid:
        raise ValueError("hessian grid does not match potential grid")
    return bundle_from_hessian(hess, grad=gradient_fd(u))


def negate_bundle(B: GeometryBundle) -> GeometryBundle:
    """Bundle of the negated potential (phase flips sign, metric unchanged)."""
    g = B.grid
    hess = SymMat2Field(
        ScalarField2(g, -B.hess.m11.values),
        ScalarField2(g, -B.hess.m12.values),
        ScalarField2(g, -B.hess.m22.values),
    )
    grad = None
    if B.grad is not None:
        grad = Vec2Field(
            ScalarField2(g, -B.grad.c1.values), ScalarField2(g, -B.grad.c2.values)
        )
    return bundle_from_hessian(hess, grad=grad)


def _quadform_inv(B: GeometryBundle, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """g^{ij} v_i v_j elementwise."""
    return B.inv11 * v1 * v1 + 2.0 * B.inv12 * v1 * v2 + B.inv22 * v2 * v2


def grad_g_norm2(
    f: ScalarField2, B: GeometryBundle, grad: Vec2Field | None = None
) -> ScalarField2:
    """Squared metric gradient norm |grad_g f|^2 = g^{ij} f_i f_j.

    The Euclidean gradient defaults to second-order differences of f; pass
    grad to use an analytic gradient instead (e.g. a cutoff profile's).
    """
    if f.grid != B.grid:
        raise ValueError("field and bundle grids differ")
    if grad is None:
        grad = gradient_fd(f)
    elif grad.grid != B.grid:
        raise ValueError("gradient and bundle grids differ")
    q = _quadform_inv(B, grad.c1.values, grad.c2.values)
    return ScalarField2(B.grid, q)


def laplace_beltrami_nondiv(f: ScalarField2, B: GeometryBundle) -> ScalarField2:
    """Laplace-Beltrami in non-divergence form (cross-check oracle).

    Expands (1/W) d_i(W g^{ij} d_j f) into g^{ij} f_ij plus first-order
    terms whose coefficients are differenced fields; used to validate the
    divergence-form operator, not as the canonical operator.
    """
    if f.grid != B.grid:
        raise ValueError("field and bundle grids differ")
    g = B.grid
    W = B.vol
    A11 = W * B.inv11
    A12 = W * B.inv12
    A22 = W * B.inv22
    hf = hessian_fd(f)
    gf = gradient_fd(f)
    h = g.h
    dA11_1 = _grad_axis(A11, h, 0)
    dA12_1 = _grad_axis(A12, h, 0)
    dA12_2 = _grad_axis(A12, h, 1)
    dA22_2 = _grad_axis(A22, h, 1)
    second = (
        B.inv11 * hf.m11.values
        + 2.0 * B.inv12 * hf.m12.values
        + B.inv22 * hf.m22.values
    )
    first = ((dA11_1 + dA12_2) * gf.c1.values + (dA12_1 + dA22_2) * gf.c2.values) / W
    return ScalarField2(g, second + first)


def _grad_axis(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    return np.gradient(values, h, axis=axis, edge_order=2)


def laplace_beltrami(f: ScalarField2, B: GeometryBundle) -> ScalarField2:
    """Divergence-form Laplace-Beltrami (1/W) d_i(W g^{ij} d_j f), W = sqrt(det g).

    Interior nodes use half-node flux stencils (coefficients averaged to the
    half nodes, cross derivatives averaged from nodal central differences),
    which makes the discrete operator satisfy summation by parts exactly
    against weights vanishing near the grid boundary.  The outermost node
    ring, where no flux stencil fits, falls back to the non-divergence form;
    checks needing interior smoothness stay 2h away from the boundary anyway.
    O(h^2) truncation on smooth data.
    """
    if f.grid != B.grid:
        raise ValueError("field and bundle grids differ")
    g = B.grid
    h = g.h
    v = f.values
    W = B.vol
    A11 = W * B.inv11
    A12 = W * B.inv12
    A22 = W * B.inv22

    # nodal central first derivatives feed the cross terms of the fluxes
    d1 = _grad_axis(v, h, 0)
    d2 = _grad_axis(v, h, 1)

    # flux through half nodes (i+1/2, j): A11*d1 + A12*d2 there
    f1 = 0.5 * (A11[1:, :] + A11[:-1, :]) * (v[1:, :] - v[:-1, :]) / h
    f1 += 0.25 * (A12[1:, :] + A12[:-1, :]) * (d2[1:, :] + d2[:-1, :])
    # flux through half nodes (i, j+1/2): A12*d1 + A22*d2 there
    f2 = 0.5 * (A22[:, 1:] + A22[:, :-1]) * (v[:, 1:] - v[:, :-1]) / h
    f2 += 0.25 * (A12[:, 1:] + A12[:, :-1]) * (d1[:, 1:] + d1[:, :-1])

    out = laplace_beltrami_nondiv(f, B).values.copy()
    div = (f1[1:, 1:-1] - f1[:-1, 1:-1]) / h + (f2[1:-1, 1:] - f2[1:-1, :-1]) / h
    out[1:-1, 1:-1] = div / W[1:-1, 1:-1]
    return ScalarField2(g, out)


def mean_curvature(B: GeometryBundle, psi: ScalarField2):
    """Mean curvature vector of the graph: the quarter-turn of the lifted
    metric gradient of the phase.

    For w = g^{-1} D(psi), the tangential lift of the metric gradient is
    (w, M w) in R^2 x R^2 with M the Hessian; applying the quarter-turn
    J(a, b) = (-b, a) gives the ambient mean curvature vector.  Returns the
    (n, n, 4) ambient components and the pointwise norm field, which equals
    sqrt(g^{ij} psi_i psi_j).
    """
    if psi.grid != B.grid:
        raise ValueError("phase field and bundle grids differ")
    gpsi = gradient_fd(psi)
    p1 = gpsi.c1.values
    p2 = gpsi.c2.values
    w1 = B.inv11 * p1 + B.inv12 * p2
    w2 = B.inv12 * p1 + B.inv22 * p2
    m11 = B.hess.m11.values
    m12 = B.hess.m12.values
    m22 = B.hess.m22.values
    t1 = m11 * w1 + m12 * w2
    t2 = m12 * w1 + m22 * w2
    H = np.stack([-t1, -t2, w1, w2], axis=-1)
    norm2 = _quadform_inv(B, p1, p2)
    hnorm = ScalarField2(B.grid, np.sqrt(np.maximum(norm2, 0.0)))
    return H, hnorm


def slope(B: GeometryBundle) -> ScalarField2:
    """Slope function ln sqrt(1 + lam1^2) of the larger Hessian eigenvalue."""
    return ScalarField2(B.grid, B.slope)


def modified_slope(B: GeometryBundle, K: SlopeConstants) -> ScalarField2:
    """Slope plus the quadratic (A/2)|x|^2 that restores subharmonicity."""
    return ScalarField2(B.grid, B.slope + 0.5 * K.A * B.grid.radius2())
