"""Differential inequality checks and the interior Hessian-estimate harness.

Each check returns an InequalityReport with explicit left/right sides, the
slack that was granted (quadrature or Lipschitz), and any fitted constants.
Constants with no analytic value (the slope-curvature additive constant, the
quadratic modification weight, the volume-bound prefactor, the exponential
budget) are fitted and reported rather than assumed: the point of the suite
is to verify the structure of each inequality and the stability of its
constants under refinement.

Quadrature slack convention: node-indicator disk quadrature carries an O(h)
boundary layer, so integral comparisons over a disk of radius r receive
20*h*r*sup|integrand| of slack, reported in the result so a failure can
never be a boundary-layer artifact.  Phase-regime boundaries are tested with
closed conditions (a 1e-12 cushion) to avoid float-equality traps, and
uniformly negative-phase bundles are canonicalized by negating the potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .geometry import (
    GeometryBundle,
    SlopeConstants,
    bundle as make_bundle,
    grad_g_norm2,
    laplace_beltrami,
    modified_slope,
    negate_bundle,
    slope,
)
from .grid import (
    CutoffProfile,
    ScalarField2,
    Vec2Field,
    gradient_fd,
    integrate_disk,
    sup_norm_disk,
)

__all__ = [
    "InequalityReport",
    "check_weak_max_principle",
    "check_super_iso",
    "check_jacobi_pointwise",
    "check_subharmonic_modified_slope",
    "fit_modification_weight",
    "check_jacobi_integral",
    "check_volume_bound",
    "check_hessian_estimate",
    "fit_exp_budget",
]

REGIME_CUSHION = 1e-12
PHASE_SPLIT = 0.75 * math.pi


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check: pass iff margin >= -slack."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    slack: float = 0.0
    fitted: dict = field(default_factory=dict)
    excluded: int = 0
    details: dict = field(default_factory=dict)


def _disk_quad_slack(h: float, r: float, sup_integrand: float) -> float:
    return 20.0 * h * r * max(1.0, sup_integrand)


def _canonical(B: GeometryBundle) -> tuple[GeometryBundle, bool]:
    """Flip to the negated potential when the phase is uniformly <= 0."""
    if float(np.max(B.phase)) <= 0.0 and float(np.min(B.phase)) < 0.0:
        return negate_bundle(B), True
    return B, False


def check_weak_max_principle(
    f: ScalarField2,
    trials: int = 200,
    seed: int = 0,
    slack_coeff: float = 2.0,
    radius: float = 2.0,
) -> InequalityReport:
    """Sampled weak maximum principle on subdomains of the disk |x| <= radius.

    Draws `trials` random sub-disks and sub-rectangles inside the disk and
    verifies, for each, that the max over interior nodes does not exceed the
    max over the nodes within 2h of the subdomain boundary by more than
    slack_coeff * h * Lip(f), with Lip(f) estimated from differenced
    gradients.  Any boundary point of a subdomain has an inside node within
    about 1.7h, so slack_coeff = 2 cannot produce a spurious failure; it is
    the sharpest coefficient with headroom.  Subdomains too small to hold
    both node sets are skipped and counted.  The report carries the worst
    margin over all admissible trials.
    """
    g = f.grid
    if g.L < radius:
        raise PreconditionError(
            f"weak maximum principle needs the grid to contain the disk of radius {radius}"
        )
    h = g.h
    ax = g.axis()
    vals = f.values
    gf = gradient_fd(f)
    lip_mask = g.disk_mask(min(g.L, radius + 2 * h))
    lip = float(np.max(np.hypot(gf.c1.values, gf.c2.values)[lip_mask]))
    slack = slack_coeff * h * lip
    band = 2.0 * h
    size_lo = max(6.0 * h, 0.15)
    if size_lo >= 0.7 * radius:
        raise PreconditionError("no admissible subdomains at this resolution")

    rng = np.random.default_rng(seed)
    worst = math.inf
    worst_lhs = worst_rhs = math.nan
    degenerate = 0
    ran = 0

    def window(c, half):
        lo = np.searchsorted(ax, c - half - h)
        hi = np.searchsorted(ax, c + half + h, side="right")
        return slice(max(lo, 0), min(hi, g.n))

    for trial in range(trials):
        if trial % 2 == 0:
            rho = rng.uniform(size_lo, 0.8 * radius)
            if rho >= radius or rho <= 3.0 * h + band:
                degenerate += 1
                continue
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rad = math.sqrt(rng.uniform(0.0, 1.0)) * (radius - rho)
            c1, c2 = rad * math.cos(ang), rad * math.sin(ang)
            s1, s2 = window(c1, rho), window(c2, rho)
            x1 = ax[s1][:, None] - c1
            x2 = ax[s2][None, :] - c2
            d2 = x1 * x1 + x2 * x2
            inside = d2 <= rho * rho
            interior = d2 < (rho - band) ** 2
        else:
            w1 = rng.uniform(size_lo, 0.7 * radius)
            w2 = rng.uniform(size_lo, 0.7 * radius)
            ok = False
            for _ in range(20):
                c1 = rng.uniform(-radius, radius)
                c2 = rng.uniform(-radius, radius)
                if (abs(c1) + w1) ** 2 + (abs(c2) + w2) ** 2 <= radius * radius:
                    ok = True
                    break
            if not ok or min(w1, w2) <= 3.0 * h + band:
                degenerate += 1
                continue
            s1, s2 = window(c1, w1), window(c2, w2)
            x1 = np.abs(ax[s1][:, None] - c1)
            x2 = np.abs(ax[s2][None, :] - c2)
            inside = (x1 <= w1) & (x2 <= w2)
            interior = (x1 < w1 - band) & (x2 < w2 - band)

        boundary = inside & ~interior
        sub = vals[s1, s2]
        if not interior.any() or not boundary.any():
            degenerate += 1
            continue
        ran += 1
        int_max = float(np.max(sub[interior]))
        bnd_max = float(np.max(sub[boundary]))
        margin = bnd_max + slack - int_max
        if margin < worst:
            worst, worst_lhs, worst_rhs = margin, int_max, bnd_max + slack

    if ran == 0:
        raise PreconditionError("no admissible subdomains at this resolution")
    return InequalityReport(
        name="weak_max_principle",
        lhs=worst_lhs,
        rhs=worst_rhs,
        margin=worst,
        passed=bool(worst >= 0.0),
        slack=slack,
        excluded=degenerate,
        details={"trials_run": ran, "lipschitz": lip, "seed": seed},
    )


def check_super_iso(
    f: ScalarField2,
    trials: int = 200,
    seed: int = 0,
    grad: Vec2Field | None = None,
) -> InequalityReport:
    """Sup over the unit disk bounded by gradient and value integrals over B2.

    Asserts  sup_{|x|<=1} f  <=  int_{B2} |Df| dx + int_{B2} f dx  + slack.
    Preconditions: f >= 0 on B2 and f passes the sampled weak maximum
    principle there; both are enforced, and a violation raises
    PreconditionError rather than reporting a failure.
    """
    g = f.grid
    b2 = g.disk_mask(2.0)
    if float(np.min(f.values[b2])) < 0.0:
        raise PreconditionError("super isoperimetric check needs f >= 0 on B2")
    wmp = check_weak_max_principle(f, trials=trials, seed=seed)
    if not wmp.passed:
        raise PreconditionError(
            "super isoperimetric check needs the weak maximum principle "
            f"(worst margin {wmp.margin:.3e})"
        )
    if grad is None:
        grad = gradient_fd(f)
    dmag = grad.magnitude()
    lhs = sup_norm_disk(f, 1.0)
    int_grad = integrate_disk(dmag, 2.0)
    int_f = integrate_disk(f, 2.0)
    sup_int = float(np.max(dmag.values[b2]) + np.max(f.values[b2]))
    slack = _disk_quad_slack(g.h, 2.0, sup_int)
    rhs = int_grad + int_f
    margin = rhs + slack - lhs
    return InequalityReport(
        name="super_iso",
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        passed=bool(margin >= 0.0),
        slack=slack,
        details={"int_grad": int_grad, "int_f": int_f, "wmp_margin": wmp.margin},
    )


def _interior_mask(n: int, margin_cells: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=bool)
    k = margin_cells
    m[k:-k, k:-k] = True
    return m


def check_jacobi_pointwise(
    B: GeometryBundle,
    K: SlopeConstants,
    C_budget: float = math.inf,
    radius: float | None = None,
    margin_cells: int = 2,
) -> InequalityReport:
    """Pointwise slope curvature inequality lap_g b >= c |grad_g b|^2 - C.

    Evaluates m = min(lap_g b - c |grad_g b|^2) over interior nodes (2h from
    the boundary band, optionally restricted to a disk), excluding nodes
    whose eigenvalue gap is below eps_gap*(1 + |lam1|): there the slope is a
    function of the larger eigenvalue only and differencing across the
    crossing is unreliable.  If every node is excluded but the slope field is
    globally constant (coalesced eigenvalues everywhere, e.g. an isotropic
    quadratic), the check proceeds on the full interior since the slope is
    then exactly smooth.  Reports the smallest additive constant
    C_hat = max(0, -m) that makes the inequality hold; passes iff
    C_hat <= C_budget.
    """
    B, flipped = _canonical(B)
    g = B.grid
    b = slope(B)
    lap = laplace_beltrami(b, B).values
    gn = grad_g_norm2(b, B).values
    include = _interior_mask(g.n, margin_cells)
    if radius is not None:
        include &= g.disk_mask(radius)
    gap_ok = (B.lam1 - B.lam2) >= K.eps_gap * (1.0 + np.abs(B.lam1))
    excluded = int(np.count_nonzero(include & ~gap_ok))
    mask = include & gap_ok
    if not mask.any():
        span = float(np.max(B.slope) - np.min(B.slope))
        if span <= 1e-12 * (1.0 + float(np.max(np.abs(B.slope)))):
            # coalesced eigenvalues with constant slope: smooth, keep all nodes
            mask = include
            excluded = 0
        else:
            raise PreconditionError("eigenvalue-gap filter excluded every node")
    m = float(np.min((lap - K.c * gn)[mask]))
    c_hat = max(0.0, -m)
    return InequalityReport(
        name="jacobi_pointwise",
        lhs=c_hat,
        rhs=float(C_budget),
        margin=float(C_budget) - c_hat,
        passed=bool(c_hat <= C_budget),
        fitted={"C_hat": c_hat, "c": K.c, "min_defect": m},
        excluded=excluded,
        details={"canonicalized": flipped, "nodes_checked": int(np.count_nonzero(mask))},
    )


def fit_modification_weight(
    B: GeometryBundle,
    K: SlopeConstants,
    rho: float = 2.0,
    margin_cells: int = 2,
) -> tuple[float, float]:
    """Smallest weight A >= 0 making the modified slope subharmonic on |x| <= rho.

    The operator is linear, so min over the region of
    lap_g(b) + A*lap_g(|x|^2/2) is concave piecewise-linear in A.  When the
    quadratic's Laplacian is positive on the whole region (the generic case)
    the optimum is the closed-form max of -lap_g(b)/lap_g(q); otherwise a
    bounded scalar search maximizes the concave minimum.  Returns (A_hat,
    attained minimum at A_hat).
    """
    g = B.grid
    mask = _interior_mask(g.n, margin_cells) & g.disk_mask(rho)
    lap_b = laplace_beltrami(slope(B), B).values[mask]
    q = ScalarField2(g, 0.5 * g.radius2())
    lap_q = laplace_beltrami(q, B).values[mask]

    def attained(a: float) -> float:
        return float(np.min(lap_b + a * lap_q))

    if float(np.min(lap_q)) > 0.0:
        need = -lap_b / lap_q
        a_hat = max(0.0, float(np.max(need)))
        return a_hat, attained(a_hat)
    # mixed-sign quadratic Laplacian: maximize the concave minimum directly
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(
        lambda a: -attained(a), bounds=(0.0, 1e3), method="bounded",
        options={"xatol": 1e-10},
    )
    a_hat = float(res.x)
    return a_hat, attained(a_hat)


def check_subharmonic_modified_slope(
    B: GeometryBundle,
    K: SlopeConstants,
    rho: float = 2.0,
    slack: float = 1e-4,
    margin_cells: int = 2,
    trials: int = 200,
    seed: int = 0,
) -> InequalityReport:
    """Subharmonicity of the modified slope b + (A/2)|x|^2 on |x| <= rho.

    Requires supercritical phase (phase >= delta) on the region.  Evaluates
    min lap_g(b_mod) over the region and demands it be >= -slack; then runs
    the weak-maximum-principle sampler on the modified slope, since that is
    the property the subharmonicity is for.  Passes only if both hold.
    """
    B, flipped = _canonical(B)
    g = B.grid
    mask = _interior_mask(g.n, margin_cells) & g.disk_mask(rho)
    if float(np.min(B.phase[mask])) < K.delta - REGIME_CUSHION:
        raise PreconditionError(
            f"modified-slope check needs phase >= delta={K.delta} on the region"
        )
    bmod = modified_slope(B, K)
    lap = laplace_beltrami(bmod, B).values
    m = float(np.min(lap[mask]))
    wmp = check_weak_max_principle(bmod, trials=trials, seed=seed, radius=min(rho, 2.0))
    passed = (m >= -slack) and wmp.passed
    return InequalityReport(
        name="subharmonic_modified_slope",
        lhs=0.0,
        rhs=m,
        margin=m,
        passed=bool(passed),
        slack=slack,
        fitted={"A": K.A, "min_laplacian": m},
        details={"canonicalized": flipped, "wmp_margin": wmp.margin, "wmp_passed": wmp.passed},
    )


def check_jacobi_integral(
    B: GeometryBundle,
    cutoff: CutoffProfile,
    K: SlopeConstants,
    C_hat: float | None = None,
    ibp_coeff: float = 10.0,
) -> InequalityReport:
    """Integral form of the slope curvature inequality through a cutoff.

    With dv = V dx and a cutoff phi (support radius r2, plateau radius r1),
    asserts
      int_{B_{r1}} |grad_g b|^2 dv
        <= (4/c^2) int |grad_g phi|^2 dv + (2/c) C int phi^2 dv + slack,
    where C defaults to the fitted pointwise constant.  Also verifies the
    discrete integration-by-parts step
      int phi^2 lap_g(b) dv = -int <2 phi grad_g phi, grad_g b>_g dv
    to ibp_coeff*h; the divergence-form operator makes this exact up to the
    nodal-versus-half-node quadrature mismatch, since phi vanishes well
    inside the grid.
    """
    if cutoff.grid != B.grid:
        raise ValueError("cutoff and bundle grids differ")
    B, flipped = _canonical(B)
    g = B.grid
    if cutoff.r2 > g.L - 2 * g.h:
        raise PreconditionError("cutoff support must stay 2h inside the grid")
    if C_hat is None:
        C_hat = check_jacobi_pointwise(B, K).fitted["C_hat"]
    h = g.h
    b = slope(B)
    gnb = grad_g_norm2(b, B).values
    phi = cutoff.phi.values
    gnphi = (
        B.inv11 * cutoff.grad.c1.values ** 2
        + 2.0 * B.inv12 * cutoff.grad.c1.values * cutoff.grad.c2.values
        + B.inv22 * cutoff.grad.c2.values ** 2
    )
    V = B.vol
    lhs = integrate_disk(ScalarField2(g, gnb * V), cutoff.r1)
    i_phi = integrate_disk(ScalarField2(g, gnphi * V), cutoff.r2)
    i_phi2 = integrate_disk(ScalarField2(g, phi * phi * V), cutoff.r2)
    rhs = (4.0 / K.c**2) * i_phi + (2.0 / K.c) * C_hat * i_phi2
    sup_int = float(np.max(gnb * V))
    slack = _disk_quad_slack(h, cutoff.r1, sup_int)
    margin = rhs + slack - lhs

    lap_b = laplace_beltrami(b, B).values
    gb = gradient_fd(b)
    cross = (
        B.inv11 * cutoff.grad.c1.values * gb.c1.values
        + B.inv12
        * (cutoff.grad.c1.values * gb.c2.values + cutoff.grad.c2.values * gb.c1.values)
        + B.inv22 * cutoff.grad.c2.values * gb.c2.values
    )
    ibp_lhs = float(np.sum(phi * phi * lap_b * V) * h * h)
    ibp_rhs = float(-np.sum(2.0 * phi * cross * V) * h * h)
    ibp_resid = abs(ibp_lhs - ibp_rhs)
    ibp_tol = ibp_coeff * h
    passed = (margin >= 0.0) and (ibp_resid <= ibp_tol)
    return InequalityReport(
        name="jacobi_integral",
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        passed=bool(passed),
        slack=slack,
        fitted={"C_hat": float(C_hat), "ibp_residual": ibp_resid, "ibp_tolerance": ibp_tol},
        details={"canonicalized": flipped, "int_grad_phi": i_phi, "int_phi2": i_phi2},
    )


def check_volume_bound(
    B: GeometryBundle,
    regime: str,
    K: SlopeConstants,
    inner: float = 2.0,
    mid: float = 3.0,
    outer: float = 4.0,
) -> InequalityReport:
    """Volume-element bounds for the two supercritical phase regimes.

    regime "case1" (delta <= phase <= 3pi/4 on B_inner): asserts the exact
    node-wise bound V sin(delta) <= sig1 on B_inner (zero slack; it follows
    from V sin(phase) = sig1), and fits the prefactor
      C2 = sin(delta) * int_{B_inner} V dx / sup_{B_mid} |Du|
    of the integral bound, reporting it.

    regime "case2" (phase > 3pi/4 on B_mid): asserts
      int_{B_mid} V dx <= sqrt(2) * (sup_{B_outer} |Du|)^2 + slack.
    That bound fails already for isotropic quadratics, so the report also
    carries the gradient-image-area reading
      int_{B_mid} (sig2 - 1) dx <= pi * (sup_{B_mid} |Du|)^2
    (valid here because phase > pi/2 forces sig2 > 1, hence a convex
    potential and an injective gradient map), with its own pass flag in
    fitted["alt_passed"].

    The bundle must carry the potential's gradient.
    """
    if B.grad is None:
        raise PreconditionError("volume bound needs a bundle built from a potential")
    B, flipped = _canonical(B)
    g = B.grid
    h = g.h
    if regime not in ("case1", "case2"):
        raise ValueError(f"unknown regime {regime!r}")
    dmag = B.grad.magnitude()
    if regime == "case1":
        region = g.disk_mask(inner)
        ph = B.phase[region]
        if float(np.min(ph)) < K.delta - REGIME_CUSHION or float(np.max(ph)) > PHASE_SPLIT + REGIME_CUSHION:
            raise PreconditionError(
                "case1 needs delta <= phase <= 3pi/4 on the inner disk"
            )
        sd = math.sin(K.delta)
        margin_nodes = B.sig1[region] - B.vol[region] * sd
        node_min = float(np.min(margin_nodes))
        int_v = integrate_disk(ScalarField2(g, B.vol), inner)
        du_sup = sup_norm_disk(dmag, mid)
        c2 = sd * int_v / du_sup if du_sup > 0 else 0.0
        return InequalityReport(
            name="volume_bound_case1",
            lhs=float(np.max(B.vol[region] * sd)),
            rhs=float(np.max(B.sig1[region])),
            margin=node_min,
            passed=bool(node_min >= 0.0),
            slack=0.0,
            fitted={"C2": c2, "int_vol": int_v, "grad_sup": du_sup},
            details={"canonicalized": flipped},
        )
    region = g.disk_mask(mid)
    if float(np.min(B.phase[region])) <= PHASE_SPLIT + REGIME_CUSHION:
        raise PreconditionError("case2 needs phase > 3pi/4 on the middle disk")
    if outer > g.L:
        raise PreconditionError(
            f"case2 needs the grid to contain the disk of radius {outer}"
        )
    lhs = integrate_disk(ScalarField2(g, B.vol), mid)
    du_outer = sup_norm_disk(dmag, outer)
    rhs = math.sqrt(2.0) * du_outer * du_outer
    slack = _disk_quad_slack(h, mid, float(np.max(B.vol[region])))
    margin = rhs + slack - lhs
    alt_lhs = integrate_disk(ScalarField2(g, B.sig2 - 1.0), mid)
    du_mid = sup_norm_disk(dmag, mid)
    alt_rhs = math.pi * du_mid * du_mid
    alt_slack = _disk_quad_slack(h, mid, float(np.max(np.abs(B.sig2 - 1.0))))
    return InequalityReport(
        name="volume_bound_case2",
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        passed=bool(margin >= 0.0),
        slack=slack,
        fitted={
            "alt_lhs": alt_lhs,
            "alt_rhs": alt_rhs,
            "alt_margin": alt_rhs + alt_slack - alt_lhs,
            "alt_passed": float(alt_rhs + alt_slack - alt_lhs >= 0.0),
        },
        details={"canonicalized": flipped, "grad_sup_outer": du_outer},
    )


def fit_exp_budget(level: float, growth: float, tol: float = 1e-6) -> float:
    """Smallest C >= 0 with level <= C * exp(C * growth), by bisection.

    The map C -> C e^{C g} is strictly increasing for g >= 0, so the minimal
    constant is the unique root; bisection runs to absolute tolerance tol.
    """
    if level <= 0.0:
        return 0.0
    hi = 1.0
    while hi * math.exp(hi * growth) < level:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError("exponential budget fit diverged")
    lo = 0.0
    while hi - lo > tol:
        midp = 0.5 * (lo + hi)
        if midp * math.exp(midp * growth) < level:
            lo = midp
        else:
            hi = midp
    return 0.5 * (lo + hi)


def check_hessian_estimate(
    u: ScalarField2,
    R: float,
    regime: str = "auto",
    K: SlopeConstants | None = None,
    C_budget: float = math.inf,
) -> InequalityReport:
    """Interior Hessian estimate harness on the disk of radius R.

    Computes L = |D^2 u(0)| (spectral norm from the central stencil at the
    origin node; n must be odd) and the growth ratio
      G = sup_{B_R} |Du| / R        for the moderate-phase regime "case1",
      G = (sup_{B_R} |Du| / R)^2    for the large-phase regime "case2",
    then fits the minimal C* >= 0 with L <= C* exp(C* G) and passes iff
    C* <= C_budget.  regime "auto" classifies by the range of |phase| over
    B_R against 3pi/4 (with a 1e-12 cushion); a range straddling the split,
    or dipping below delta, raises PreconditionError.  A zero Hessian at the
    origin short-circuits to C* = 0.
    """
    if K is None:
        K = SlopeConstants()
    g = u.grid
    if R > g.L:
        raise PreconditionError(f"estimate needs the grid to contain B_R, R={R}")
    B = make_bundle(u)
    B, flipped = _canonical(B)
    oi, oj = g.origin_index()
    level = float(max(abs(B.lam1[oi, oj]), abs(B.lam2[oi, oj])))
    dmag = B.grad.magnitude()
    du_sup = sup_norm_disk(dmag, R)
    if level <= 1e-14:
        return InequalityReport(
            name="hessian_estimate",
            lhs=0.0,
            rhs=float(C_budget),
            margin=float(C_budget),
            passed=True,
            fitted={"C_star": 0.0, "hess_origin": level, "growth": du_sup / R},
            details={"regime": "degenerate", "canonicalized": flipped},
        )
    mask = g.disk_mask(R)
    pmin = float(np.min(B.phase[mask]))
    pmax = float(np.max(B.phase[mask]))
    if pmin < K.delta - REGIME_CUSHION:
        raise PreconditionError(
            f"estimate needs supercritical phase >= delta={K.delta} on B_R "
            f"(min {pmin:.4f})"
        )
    if regime == "auto":
        if pmin > PHASE_SPLIT + REGIME_CUSHION:
            regime = "case2"
        elif pmax <= PHASE_SPLIT + REGIME_CUSHION:
            regime = "case1"
        else:
            raise PreconditionError("phase range straddles 3pi/4; pick a regime")
    elif regime == "case1":
        if pmax > PHASE_SPLIT + REGIME_CUSHION:
            raise PreconditionError("case1 requested but phase exceeds 3pi/4")
    elif regime == "case2":
        if pmin <= PHASE_SPLIT + REGIME_CUSHION:
            raise PreconditionError("case2 requested but phase is not above 3pi/4")
    else:
        raise ValueError(f"unknown regime {regime!r}")
    growth = du_sup / R if regime == "case1" else (du_sup / R) ** 2
    c_star = fit_exp_budget(level, growth)
    return InequalityReport(
        name="hessian_estimate",
        lhs=c_star,
        rhs=float(C_budget),
        margin=float(C_budget) - c_star,
        passed=bool(c_star <= C_budget),
        fitted={"C_star": c_star, "hess_origin": level, "growth": growth},
        details={"regime": regime, "canonicalized": flipped, "grad_sup": du_sup},
    )
