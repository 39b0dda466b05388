"""Solution generators: manufactured solution pairs and a damped-Newton
Dirichlet solver for the prescribed-phase equation on the square.

Manufactured problems start from an analytic potential; the phase is defined
pointwise from the analytic Hessian, so the pair solves the equation exactly
by construction and doubles as ground truth for convergence studies.  The
Newton solver discretizes the arctangent form of the equation, whose
linearization has the inverse graph metric as coefficients and is therefore
uniformly elliptic at every iterate; the product form is kept only as a
residual cross-check elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import LinearSolveError, PreconditionError
from .geometry import eigen_sym2
from .grid import Grid2, ScalarField2, SymMat2Field, gradient_fd, hessian_fd, sample

__all__ = [
    "AnalyticFunction2",
    "ManufacturedProblem",
    "SolveState",
    "quadratic_family",
    "anisotropic_family",
    "perturbed_family",
    "rescale_analytic",
    "negate_analytic",
    "manufacture",
    "newton_solve",
    "linear_solve",
    "phase_residual",
    "convergence_study",
]

PHASE_SPLIT = 0.75 * math.pi


@dataclass(frozen=True)
class AnalyticFunction2:
    """A C^4 potential given by closures for its value, gradient and Hessian.

    value(x1, x2) -> array; gradient(x1, x2) -> (g1, g2);
    hessian(x1, x2) -> (m11, m12, m22).  All must broadcast numpy arrays.
    """

    value: callable
    gradient: callable
    hessian: callable
    name: str = ""


def quadratic_family(a: float) -> AnalyticFunction2:
    """Isotropic quadratic a|x|^2/2 with constant phase 2*arctan(a)."""
    a = float(a)
    return AnalyticFunction2(
        value=lambda x1, x2: 0.5 * a * (x1 * x1 + x2 * x2),
        gradient=lambda x1, x2: (a * x1 + 0.0 * x2, a * x2 + 0.0 * x1),
        hessian=lambda x1, x2: (
            a + 0.0 * x1 + 0.0 * x2,
            0.0 * x1 + 0.0 * x2,
            a + 0.0 * x1 + 0.0 * x2,
        ),
        name=f"quadratic(a={a:g})",
    )


def anisotropic_family(theta1: float, theta2: float) -> AnalyticFunction2:
    """Diagonal quadratic (tan(theta1) x1^2 + tan(theta2) x2^2)/2.

    Constant Hessian with distinct eigenvalues and phase theta1 + theta2.
    """
    t1, t2 = math.tan(theta1), math.tan(theta2)
    return AnalyticFunction2(
        value=lambda x1, x2: 0.5 * (t1 * x1 * x1 + t2 * x2 * x2),
        gradient=lambda x1, x2: (t1 * x1 + 0.0 * x2, t2 * x2 + 0.0 * x1),
        hessian=lambda x1, x2: (
            t1 + 0.0 * x1 + 0.0 * x2,
            0.0 * x1 + 0.0 * x2,
            t2 + 0.0 * x1 + 0.0 * x2,
        ),
        name=f"anisotropic(theta1={theta1:g},theta2={theta2:g})",
    )


def perturbed_family(eps: float) -> AnalyticFunction2:
    """|x|^2/2 + eps sin(x1) sin(x2): near-isotropic with oscillating Hessian."""
    eps = float(eps)
    return AnalyticFunction2(
        value=lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2) + eps * np.sin(x1) * np.sin(x2),
        gradient=lambda x1, x2: (
            x1 + eps * np.cos(x1) * np.sin(x2),
            x2 + eps * np.sin(x1) * np.cos(x2),
        ),
        hessian=lambda x1, x2: (
            1.0 - eps * np.sin(x1) * np.sin(x2),
            eps * np.cos(x1) * np.cos(x2),
            1.0 - eps * np.sin(x1) * np.sin(x2),
        ),
        name=f"perturbed(eps={eps:g})",
    )


def rescale_analytic(f: AnalyticFunction2, s: float) -> AnalyticFunction2:
    """The rescaled potential v(x) = f(s x)/s^2, which keeps the Hessian range."""
    s = float(s)
    return AnalyticFunction2(
        value=lambda x1, x2: f.value(s * x1, s * x2) / (s * s),
        gradient=lambda x1, x2: tuple(gi / s for gi in f.gradient(s * x1, s * x2)),
        hessian=lambda x1, x2: f.hessian(s * x1, s * x2),
        name=f"{f.name}~scaled(s={s:g})",
    )


def negate_analytic(f: AnalyticFunction2) -> AnalyticFunction2:
    """The negated potential (phase changes sign)."""
    return AnalyticFunction2(
        value=lambda x1, x2: -f.value(x1, x2),
        gradient=lambda x1, x2: tuple(-gi for gi in f.gradient(x1, x2)),
        hessian=lambda x1, x2: tuple(-mi for mi in f.hessian(x1, x2)),
        name=f"-{f.name}",
    )


@dataclass(frozen=True, eq=False)
class ManufacturedProblem:
    """Exact-by-construction solution pair on a grid.

    The phase field comes from the analytic Hessian (never from finite
    differences), the boundary trace is the exact potential on the boundary
    ring, and the regime tag classifies the phase range: "case1" for
    0 < phase <= 3pi/4, "case2" for phase > 3pi/4, "subcritical" otherwise.
    """

    analytic: AnalyticFunction2
    u_exact: ScalarField2
    psi: ScalarField2
    hess_exact: SymMat2Field
    regime: str

    @property
    def grid(self) -> Grid2:
        return self.u_exact.grid

    @property
    def name(self) -> str:
        return self.analytic.name

    def boundary_trace(self) -> ScalarField2:
        """The exact potential; the solver reads only its boundary ring."""
        return self.u_exact


def manufacture(analytic: AnalyticFunction2, grid: Grid2) -> ManufacturedProblem:
    """Sample an analytic potential and define its phase from the equation."""
    u = sample(analytic.value, grid)
    x1, x2 = grid.coords()
    m11, m12, m22 = (
        np.broadcast_to(np.asarray(c, dtype=float), (grid.n, grid.n))
        for c in analytic.hessian(x1, x2)
    )
    hess = SymMat2Field(
        ScalarField2(grid, m11), ScalarField2(grid, m12), ScalarField2(grid, m22)
    )
    lam1, lam2 = eigen_sym2(m11, m12, m22)
    psi_vals = np.arctan(lam1) + np.arctan(lam2)
    if not np.all(np.isfinite(psi_vals)):
        raise ValueError("phase overflow while manufacturing the problem")
    psi = ScalarField2(grid, psi_vals)
    pmin, pmax = float(np.min(psi_vals)), float(np.max(psi_vals))
    if pmin > PHASE_SPLIT + 1e-12:
        regime = "case2"
    elif pmin > 0.0 and pmax <= PHASE_SPLIT + 1e-12:
        regime = "case1"
    else:
        regime = "subcritical"
    return ManufacturedProblem(
        analytic=analytic, u_exact=u, psi=psi, hess_exact=hess, regime=regime
    )


@dataclass(eq=False)
class SolveState:
    """Newton iteration record for one Dirichlet solve.

    When converged is set, residuals is strictly decreasing and ends at or
    below the tolerance; every iterate carries the boundary trace exactly.
    """

    u: ScalarField2
    residuals: list[float]
    damping: list[float]
    lin_tol: float
    tolerance: float
    converged: bool
    iterations: int
    lin_iterations: list[int] = field(default_factory=list)
    message: str = ""


def phase_residual(u: ScalarField2, psi: ScalarField2) -> float:
    """Sup-norm of arctan(lam1) + arctan(lam2) - psi over interior nodes.

    Recomputed from scratch (fresh differencing, no reused intermediates);
    used to certify converged states independently of the solve loop.
    """
    hess = hessian_fd(u)
    lam1, lam2 = eigen_sym2(hess.m11.values, hess.m12.values, hess.m22.values)
    r = np.arctan(lam1) + np.arctan(lam2) - psi.values
    return float(np.max(np.abs(r[1:-1, 1:-1])))


def _interior_arrays(grid: Grid2):
    n = grid.n
    idx = -np.ones((n, n), dtype=np.int64)
    k = np.arange((n - 2) * (n - 2), dtype=np.int64)
    idx[1:-1, 1:-1] = k.reshape(n - 2, n - 2)
    return idx


def _assemble_linearization(grid: Grid2, inv11, inv12, inv22) -> sp.csr_matrix:
    """Sparse matrix of inv11*D11 + 2*inv12*D12 + inv22*D22 on interior nodes.

    Central stencils throughout (interior nodes have full neighborhoods);
    couplings to boundary nodes are dropped since corrections vanish there.
    """
    n = grid.n
    h2 = grid.h * grid.h
    idx = _interior_arrays(grid)
    ii, jj = np.meshgrid(np.arange(1, n - 1), np.arange(1, n - 1), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    rows_base = idx[ii, jj]
    a = inv11[ii, jj] / h2
    c = inv22[ii, jj] / h2
    b = 2.0 * inv12[ii, jj] / (4.0 * h2)

    offsets = [
        (0, 0, -2.0 * a - 2.0 * c),
        (1, 0, a),
        (-1, 0, a),
        (0, 1, c),
        (0, -1, c),
        (1, 1, b),
        (-1, -1, b),
        (1, -1, -b),
        (-1, 1, -b),
    ]
    rows = []
    cols = []
    data = []
    for di, dj, coef in offsets:
        ci = idx[ii + di, jj + dj]
        keep = ci >= 0
        rows.append(rows_base[keep])
        cols.append(ci[keep])
        data.append(np.asarray(coef)[keep] if np.ndim(coef) else np.full(keep.sum(), coef))
    mat = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(rows_base.size, rows_base.size),
    )
    return mat.tocsr()


def linear_solve(A, rhs: np.ndarray, tol: float = 1e-12, direct_threshold: int = 4900):
    """Solve A x = rhs to relative residual tol.

    Small systems (and iterative failures) go straight to a sparse direct
    factorization; otherwise an incomplete-LU-preconditioned LGMRES handles
    the nonsymmetric system.  Returns (x, iterations).  Breakdown or
    stagnation past the direct fallback raises LinearSolveError carrying the
    iteration count.
    """
    rhs = np.asarray(rhs, dtype=float)
    norm = float(np.linalg.norm(rhs))
    if norm == 0.0:
        return np.zeros_like(rhs), 0
    A = sp.csr_matrix(A)
    iterations = 0
    if rhs.size > direct_threshold:
        try:
            # strong incomplete factorization: the Krylov loop then needs only
            # a handful of iterations even at rtol 1e-12
            ilu = spla.spilu(A.tocsc(), drop_tol=1e-7, fill_factor=30)
            M = spla.LinearOperator(A.shape, ilu.solve)
            counter = {"k": 0}

            def cb(_):
                counter["k"] += 1

            x, info = spla.lgmres(A, rhs, M=M, rtol=tol, atol=0.0, maxiter=20, callback=cb)
            iterations = counter["k"]
            # judge by the measured residual, not the flag: stagnation a
            # whisker above rtol (round-off floor) is still a usable solve
            res = float(np.linalg.norm(A @ x - rhs)) / norm
            if res <= 10.0 * tol:
                return x, iterations
        except RuntimeError:
            pass
    try:
        x = spla.splu(A.tocsc()).solve(rhs)
    except RuntimeError as exc:
        raise LinearSolveError(f"direct factorization failed: {exc}", iterations) from exc
    res = float(np.linalg.norm(A @ x - rhs)) / norm
    if not np.isfinite(res) or res > max(10.0 * tol, 1e-9):
        raise LinearSolveError(
            f"linear solve stagnated at relative residual {res:.3e}", iterations + 1
        )
    return x, iterations + 1


def _laplace_matrix(grid: Grid2) -> sp.csr_matrix:
    n = grid.n
    ones = np.ones((n, n))
    zeros = np.zeros((n, n))
    return _assemble_linearization(grid, ones, zeros, ones)


def _dirichlet_rhs(grid: Grid2, boundary_vals: np.ndarray, source: float) -> np.ndarray:
    """Right side of a constant-coefficient Laplace problem with Dirichlet data."""
    n = grid.n
    h2 = grid.h * grid.h
    rhs = np.full((n - 2, n - 2), source)
    rhs[0, :] -= boundary_vals[0, 1:-1] / h2
    rhs[-1, :] -= boundary_vals[-1, 1:-1] / h2
    rhs[:, 0] -= boundary_vals[1:-1, 0] / h2
    rhs[:, -1] -= boundary_vals[1:-1, -1] / h2
    return rhs.ravel()


def _initial_iterate(grid: Grid2, boundary: ScalarField2, psi: ScalarField2, mode: str):
    """Discrete harmonic extension of the boundary data, optionally bent to
    match the mean phase.

    "harmonic": plain harmonic extension.
    "phase_matched": adds t*(q - harmonic extension of q's trace) where q is
    the paraboloid |x|^2/2 and t = tan(mean(psi)/2); for isotropic quadratic
    boundary data this reproduces the exact discrete solution, and in general
    it starts the iteration at the right mean curvature.
    """
    n = grid.n
    lap = _laplace_matrix(grid)
    lu = spla.splu(lap.tocsc())
    bvals = boundary.values
    u0 = bvals.copy()
    u0[1:-1, 1:-1] = lu.solve(_dirichlet_rhs(grid, bvals, 0.0)).reshape(n - 2, n - 2)
    if mode == "harmonic":
        return u0
    if mode != "phase_matched":
        raise ValueError(f"unknown initial iterate mode {mode!r}")
    psibar = float(np.mean(psi.values[1:-1, 1:-1]))
    t = math.tan(0.5 * psibar)
    q = 0.5 * grid.radius2()
    harm_q = q.copy()
    harm_q[1:-1, 1:-1] = lu.solve(_dirichlet_rhs(grid, q, 0.0)).reshape(n - 2, n - 2)
    # q - harm_q vanishes on the boundary ring and has discrete Laplacian 2,
    # so u0 keeps the trace exactly while matching the mean curvature; for
    # isotropic quadratic data it is the exact discrete solution
    return u0 + t * (q - harm_q)


def newton_solve(
    psi: ScalarField2,
    boundary: ScalarField2,
    grid: Grid2 | None = None,
    tol: float = 1e-10,
    max_iter: int = 30,
    lin_tol: float = 1e-12,
    armijo: float = 1e-4,
    min_step: float = 2.0**-20,
    initial: str = "phase_matched",
) -> SolveState:
    """Damped Newton iteration for the arctangent-form Dirichlet problem.

    The residual at interior nodes is arctan(lam1) + arctan(lam2) - psi of
    the differenced Hessian; the Newton system has the inverse graph metric
    as coefficients (positive definite at any iterate, so descent directions
    never degenerate).  Steps are damped by Armijo backtracking on the
    residual sup-norm.  Non-convergence within max_iter returns the state
    with the converged flag unset rather than raising.
    """
    if grid is None:
        grid = psi.grid
    if psi.grid != grid or boundary.grid != grid:
        raise ValueError("phase and boundary grids must match")
    pmin = float(np.min(psi.values))
    pmax = float(np.max(psi.values))
    if not (0.0 < pmin and pmax < math.pi):
        raise PreconditionError(
            f"solver needs supercritical phase in (0, pi), got range "
            f"[{pmin:.4f}, {pmax:.4f}]"
        )
    n = grid.n

    def residual(uarr: np.ndarray) -> np.ndarray:
        hess = hessian_fd(ScalarField2(grid, uarr))
        lam1, lam2 = eigen_sym2(hess.m11.values, hess.m12.values, hess.m22.values)
        theta = np.arctan(lam1) + np.arctan(lam2)
        return (theta - psi.values)[1:-1, 1:-1]

    def coefficients(uarr: np.ndarray):
        hess = hessian_fd(ScalarField2(grid, uarr))
        m11 = hess.m11.values
        m12 = hess.m12.values
        m22 = hess.m22.values
        g11 = 1.0 + m11 * m11 + m12 * m12
        g12 = m12 * (m11 + m22)
        g22 = 1.0 + m22 * m22 + m12 * m12
        detg = g11 * g22 - g12 * g12
        inv11 = g22 / detg
        inv12 = -g12 / detg
        inv22 = g11 / detg
        ell = 0.5 * (inv11 + inv22) - np.sqrt(
            (0.5 * (inv11 - inv22)) ** 2 + inv12 * inv12
        )
        if float(np.min(ell)) <= 0.0:
            # impossible for a true inverse metric; signals a coding fault
            raise RuntimeError("linearization lost ellipticity")
        return inv11, inv12, inv22

    u = _initial_iterate(grid, boundary, psi, initial)
    residuals: list[float] = []
    damping: list[float] = []
    lin_iters: list[int] = []
    converged = False
    message = ""
    it = 0
    r = residual(u)
    rn = float(np.max(np.abs(r)))
    residuals.append(rn)
    while it < max_iter:
        if rn <= tol:
            converged = True
            break
        inv11, inv12, inv22 = coefficients(u)
        A = _assemble_linearization(grid, inv11, inv12, inv22)
        try:
            s_int, k = linear_solve(A, -r.ravel(), tol=lin_tol)
        except LinearSolveError as exc:
            message = str(exc)
            break
        lin_iters.append(k)
        step = np.zeros((n, n))
        step[1:-1, 1:-1] = s_int.reshape(n - 2, n - 2)
        t = 1.0
        while t >= min_step:
            r_new = residual(u + t * step)
            rn_new = float(np.max(np.abs(r_new)))
            if rn_new <= (1.0 - armijo * t) * rn:
                break
            t *= 0.5
        else:
            message = "line search failed to reduce the residual"
            break
        u = u + t * step
        r, rn = r_new, rn_new
        residuals.append(rn)
        damping.append(t)
        it += 1
    else:
        message = f"no convergence within {max_iter} iterations"
    if rn <= tol:
        converged = True
    return SolveState(
        u=ScalarField2(grid, u),
        residuals=residuals,
        damping=damping,
        lin_tol=lin_tol,
        tolerance=tol,
        converged=converged,
        iterations=it,
        lin_iterations=lin_iters,
        message=message,
    )


@dataclass(frozen=True)
class StudyLevel:
    n: int
    h: float
    err_u: float
    err_grad: float
    err_hess: float
    iterations: int


@dataclass(frozen=True)
class StudyResult:
    levels: list[StudyLevel]
    orders_u: list[float | None]
    orders_grad: list[float | None]
    orders_hess: list[float | None]


def _order(e0: float, e1: float, floor: float = 1e-12) -> float | None:
    if e0 <= floor or e1 <= floor:
        return None
    return math.log2(e0 / e1)


def convergence_study(
    analytic: AnalyticFunction2, grids: list[Grid2], **solver_kwargs
) -> StudyResult:
    """Solve on a ladder of halving-h grids and measure observed orders.

    Needs at least three grids with h halving at each level (n - 1 doubling).
    Errors are sup norms against the analytic truth: the solution directly,
    its differenced gradient and Hessian against the analytic closures.
    Orders below the round-off floor are reported as None rather than a
    meaningless number.  Any non-converged level raises RuntimeError.
    """
    if len(grids) < 3:
        raise ValueError("convergence study needs at least three grids")
    for a, b in zip(grids, grids[1:]):
        if b.n - 1 != 2 * (a.n - 1) or a.L != b.L:
            raise ValueError("grids must halve h at each level (n - 1 doubling)")
    levels = []
    for g in grids:
        prob = manufacture(analytic, g)
        state = newton_solve(prob.psi, prob.boundary_trace(), g, **solver_kwargs)
        if not state.converged:
            raise RuntimeError(f"level n={g.n} failed to converge: {state.message}")
        x1, x2 = g.coords()
        err_u = float(np.max(np.abs(state.u.values - prob.u_exact.values)))
        gn = gradient_fd(state.u)
        g1, g2 = analytic.gradient(x1, x2)
        err_grad = float(
            max(
                np.max(np.abs(gn.c1.values - g1)),
                np.max(np.abs(gn.c2.values - g2)),
            )
        )
        hn = hessian_fd(state.u)
        m11, m12, m22 = analytic.hessian(x1, x2)
        err_hess = float(
            max(
                np.max(np.abs(hn.m11.values - m11)),
                np.max(np.abs(hn.m12.values - m12)),
                np.max(np.abs(hn.m22.values - m22)),
            )
        )
        levels.append(
            StudyLevel(
                n=g.n,
                h=g.h,
                err_u=err_u,
                err_grad=err_grad,
                err_hess=err_hess,
                iterations=state.iterations,
            )
        )
    orders_u = [_order(a.err_u, b.err_u) for a, b in zip(levels, levels[1:])]
    orders_grad = [_order(a.err_grad, b.err_grad) for a, b in zip(levels, levels[1:])]
    orders_hess = [_order(a.err_hess, b.err_hess) for a, b in zip(levels, levels[1:])]
    return StudyResult(levels, orders_u, orders_grad, orders_hess)
