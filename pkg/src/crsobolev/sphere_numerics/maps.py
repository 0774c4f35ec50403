"""Cayley transform, dilations, ball automorphisms and the balancing step."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BalanceError(RuntimeError):
    """Balancing iteration did not converge."""


def cayley(z, t):
    """Cayley transform H^n -> S^{2n+1} minus the south pole; z has shape (..., n)."""
    z = np.asarray(z, dtype=complex)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    den = np.asarray(1 + r2 - 1j * np.asarray(t))
    tail = (1 - r2 + 1j * np.asarray(t)) / den
    return np.concatenate([2 * z / den[..., None], tail[..., None]], axis=-1)


def dilation(delta: float, points):
    """tau_delta and its (complex) conformal factor J at ``points`` (last coordinate is the pole axis)."""
    pts = np.asarray(points, dtype=complex)
    zl = pts[..., -1]
    den = 1 + zl + delta**2 * (1 - zl)
    head = 2 * delta * pts[..., :-1] / den[..., None]
    tail = (1 + zl - delta**2 * (1 - zl)) / den
    return np.concatenate([head, tail[..., None]], axis=-1), 2 * delta / den


def boost(a, points):
    """Ball automorphism b_a(z) = (a + P_a z + s Q_a z) / (1 + <z, a>), s = sqrt(1 - |a|^2).

    b_0 is the identity and b_a(0) = a. Returns the image and the conformal
    factor |J| = s / |1 + <z, a>|.
    """
    a = np.asarray(a, dtype=complex)
    pts = np.asarray(points, dtype=complex)
    aa = float(np.vdot(a, a).real)
    if aa >= 1:
        raise ValueError("boost parameter must lie in the open unit ball")
    if aa == 0:
        return pts.copy(), np.ones(pts.shape[0])
    za = pts @ np.conj(a)
    den = 1 + za
    s = np.sqrt(1 - aa)
    proj = np.outer(za / aa, a)
    image = (a[None, :] + proj + s * (pts - proj)) / den[:, None]
    return image, s / np.abs(den)


@dataclass
class AutomorphismParams:
    """Phi = U o b_xi o tau_delta; ``xi = 0`` means no boost."""
    xi: np.ndarray
    delta: float = 1.0
    unitary: np.ndarray | None = None

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=complex)
        if np.linalg.norm(self.xi) >= 1:
            raise ValueError("|xi| must be < 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


def apply_automorphism(params: AutomorphismParams, points):
    """Image points and |J_Phi| (the conformal factor; the Jacobian is |J|^{2n+2})."""
    pts = np.asarray(points, dtype=complex)
    factor = np.ones(pts.shape[0])
    if params.delta != 1.0:
        pts, J = dilation(params.delta, pts)
        factor = factor * np.abs(J)
    if np.any(params.xi != 0):
        pts, J = boost(params.xi, pts)
        factor = factor * J
    if params.unitary is not None:
        pts = pts @ np.asarray(params.unitary).T
    return pts, factor


@dataclass
class BalanceResult:
    params: AutomorphismParams
    residual: float
    iterations: int
    converged: bool


def _moments(a, density, grid, Q):
    pts = grid.complex_nodes() if grid.sphere != "cr" else grid.nodes
    image, J = boost(a, pts)
    mass = grid.weights * J**Q * density(image)
    return (mass[:, None] * pts).sum(axis=0) / mass.sum()


def balance(density, grid, tol: float = 1e-12, max_iter: int = 60):
    """Find xi with vanishing first moments of |J_Phi|^Q density(Phi), Phi = b_xi.

    Damped Newton iteration on the center of mass with a finite-difference
    Jacobian. ``density`` is |u|^p as a function of points of C^{n+1}.
    """
    n = grid.n if grid.sphere == "cr" else (grid.n - 1) // 2
    Q = 2 * n + 2

    def resid(v):
        a = v[: n + 1] + 1j * v[n + 1:]
        m = _moments(a, density, grid, Q)
        return np.concatenate([m.real, m.imag])

    v = np.zeros(2 * n + 2)
    r = resid(v)
    it = 0
    while np.linalg.norm(r) > tol and it < max_iter:
        it += 1
        h = 1e-7
        jac = np.empty((len(v), len(v)))
        for i in range(len(v)):
            e = np.zeros_like(v)
            e[i] = h
            jac[:, i] = (resid(v + e) - resid(v - e)) / (2 * h)
        step = np.linalg.solve(jac, -r)
        t = 1.0
        while True:
            cand = v + t * step
            if np.linalg.norm(cand) < 1 - 1e-9:
                rc = resid(cand)
                if np.linalg.norm(rc) < np.linalg.norm(r) or t < 1e-6:
                    break
            t /= 2
            if t < 1e-10:
                raise BalanceError("line search failed while balancing")
        v, r = cand, rc
    xi = v[: n + 1] + 1j * v[n + 1:]
    res = float(np.max(np.abs(r)))
    if res > 1e-8:
        raise BalanceError(f"balancing did not converge: residual {res:.3e} after {it} iterations")
    return BalanceResult(AutomorphismParams(xi), res, it, True)


def pushed_moments(params: AutomorphismParams, density, grid, n: int = 1):
    """First moments of |u^Phi|^p = |J_Phi|^Q density(Phi), normalized by its mass."""
    Q = 2 * n + 2
    pts = grid.complex_nodes() if grid.sphere != "cr" else grid.nodes
    image, J = apply_automorphism(params, pts)
    mass = grid.weights * J**Q * density(image)
    return (mass[:, None] * pts).sum(axis=0) / mass.sum()
