"""Damped least squares (Levenberg-Marquardt) with finite-difference Jacobians.

The damping term is scaled by diag(J^T J) (Marquardt), so the iteration is
invariant under rescaling of individual parameters, and the damping factor
follows Nielsen's update rule. Everything is deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError

EPS = np.finfo(float).eps
_STEP = EPS ** (1 / 3)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a least-squares fit.

    ``params`` and ``sigmas`` are keyed by parameter name; ``sigmas`` are
    1-sigma values from the residual-variance-scaled covariance. When
    ``converged`` is false the parameters must not be used.
    """

    names: tuple
    params: dict
    sigmas: dict
    covariance: np.ndarray
    residual_rms: float
    converged: bool
    iterations: int
    cost: float = 0.0
    message: str = ""
    warnings: tuple = field(default_factory=tuple)

    @property
    def usable(self) -> bool:
        return self.converged

    def values(self) -> np.ndarray:
        return np.array([self.params[n] for n in self.names])

    def to_dict(self) -> dict:
        return {
            "params": dict(self.params),
            "sigmas": dict(self.sigmas),
            "covariance": np.asarray(self.covariance).tolist(),
            "residual_rms": self.residual_rms,
            "converged": self.converged,
            "iterations": self.iterations,
            "message": self.message,
            "warnings": list(self.warnings),
        }


def numerical_jacobian(fun, p, steps=None) -> np.ndarray:
    """Central-difference Jacobian of the vector function ``fun`` at ``p``.

    Default steps are eps^(1/3) max(|p_i|, 1). Quotients use
    the representable difference of the two evaluation points, not 2h.
    """
    p = np.asarray(p, dtype=float)
    if steps is None:
        steps = _STEP * np.maximum(np.abs(p), 1.0)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), p.shape)
    cols = []
    for i in range(p.size):
        hi = p.copy()
        lo = p.copy()
        hi[i] = p[i] + steps[i]
        lo[i] = p[i] - steps[i]
        cols.append((np.asarray(fun(hi)) - np.asarray(fun(lo))) / (hi[i] - lo[i]))
    return np.column_stack(cols)


def _covariance(J, cost, n, p):
    norms = np.sqrt(np.sum(J * J, axis=0))
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise ConvergenceError("singular normal matrix: a parameter does not affect the model")
    Js = J / norms
    s = np.linalg.svd(Js, compute_uv=False)
    if s[-1] <= s[0] * 1e-12:
        raise ConvergenceError("singular normal matrix: parameters are not identifiable")
    inv = sla.inv(Js.T @ Js) / np.outer(norms, norms)
    dof = n - p
    s2 = cost / dof if dof > 0 else 0.0
    cov = s2 * inv
    return 0.5 * (cov + cov.T)


def least_squares_core(model, initial_guess, data, *, names=None, max_iter=200,
                       ftol=1e-14, xtol=1e-12, gtol=1e-12, diff_steps=None,
                       lam0=1e-3) -> FitResult:
    """Minimize sum (model(x, p) - y)^2 over p.

    Parameters
    ----------
    model : callable
        ``model(x, p) -> y_model`` with ``p`` a 1-d float array.
    initial_guess : sequence of float
    data : tuple
        ``(x, y)`` arrays.
    names : sequence of str, optional
        Parameter names; defaults to ``p0, p1, ...``.
    max_iter : int
        Cap on trial steps. Exceeding it returns ``converged=False``.
    diff_steps : array_like, optional
        Absolute finite-difference steps per parameter.

    Returns
    -------
    FitResult

    Raises
    ------
    ConvergenceError
        If the normal matrix is singular (unidentifiable parameters) or the
        model is not finite at the initial guess.
    """
    x, y = (np.asarray(a, dtype=float) for a in data)
    p = np.array(initial_guess, dtype=float)
    names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(p.size))
    if len(names) != p.size:
        raise ValueError("names and initial_guess differ in length")
    n = y.size

    def resid(q):
        return np.asarray(model(x, q), dtype=float) - y

    r = resid(p)
    if not np.all(np.isfinite(r)):
        raise ConvergenceError("model is not finite at the initial guess")
    cost = float(r @ r)
    scale = max(float(np.max(np.abs(y))), np.finfo(float).tiny)
    tiny_cost = n * (1e-13 * scale) ** 2

    # steps never shrink below the scale of the initial guess, so a parameter
    # converging to ~0 keeps a resolvable difference step
    typical = np.where(p != 0, np.abs(p), 1.0)

    def linearize(q):
        steps = diff_steps if diff_steps is not None else _STEP * np.maximum(np.abs(q), typical)
        J = numerical_jacobian(resid, q, steps)
        A = J.T @ J
        if not np.all(np.isfinite(A)) or np.any(np.diag(A) == 0):
            raise ConvergenceError(
                "singular normal matrix: a parameter does not affect the model")
        return J, A

    J, A = linearize(p)
    lam, nu = lam0, 2.0
    it = 0
    converged = cost <= tiny_cost
    message = "residual at machine precision" if converged else ""

    while not converged and it < max_iter:
        g = J.T @ r
        D = np.diag(A)
        gnorm = np.abs(g) / np.sqrt(D * max(cost, np.finfo(float).tiny))
        if np.max(gnorm) <= gtol:
            converged, message = True, "gradient orthogonal to residual"
            break
        it += 1
        # solve in Marquardt-scaled variables, where the damped matrix has unit diagonal
        # plus lam; an ill-conditioned solve is treated like a failed step
        root = np.sqrt(D)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                z = sla.solve(A / np.outer(root, root) + lam * np.eye(D.size), -g / root,
                              assume_a="pos")
            step = z / root
        except (np.linalg.LinAlgError, sla.LinAlgWarning):
            lam *= nu
            nu *= 2
            continue
        small = np.all(np.abs(step) <= xtol * (np.abs(p) + xtol))
        p_new = p + step
        r_new = resid(p_new)
        cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
        predicted = -(2 * step @ g + step @ A @ step)
        if cost_new < cost:
            rho = (cost - cost_new) / predicted if predicted > 0 else 0.0
            drop = cost - cost_new
            p, r, cost_old, cost = p_new, r_new, cost, cost_new
            lam *= max(1 / 3, 1 - (2 * rho - 1) ** 3)
            nu = 2.0
            J, A = linearize(p)
            if cost <= tiny_cost:
                converged, message = True, "residual at machine precision"
            elif small:
                converged, message = True, "step below xtol"
            elif drop <= ftol * cost_old:
                converged, message = True, "relative cost reduction below ftol"
        else:
            if small:
                converged, message = True, "no further decrease possible within xtol"
                break
            lam *= nu
            nu *= 2
            if lam > 1e20:
                message = "damping diverged"
                break

    if not converged and not message:
        message = f"iteration cap ({max_iter}) reached"
    cov = _covariance(J, cost, n, p.size)
    sig = np.sqrt(np.clip(np.diag(cov), 0, None))
    return FitResult(
        names=names,
        params={k: float(v) for k, v in zip(names, p)},
        sigmas={k: float(v) for k, v in zip(names, sig)},
        covariance=cov,
        residual_rms=float(np.sqrt(cost / n)),
        converged=bool(converged),
        iterations=it,
        cost=cost,
        message=message,
    )
