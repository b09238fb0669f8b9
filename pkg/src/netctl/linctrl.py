"""Minimum-energy control of linear networks ``dx/dt = A x + B u``.

Matrix exponential, finite-horizon controllability Gramian, condition
number, minimum-energy input and its simulation, a discretised brute-force
energy oracle, and closed-form analytics for one-dimensional chains.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.integrate import simpson

from .errors import (
    DimensionError,
    NumericOverflowError,
    ParameterError,
    UncontrollableError,
    ValidationError,
)
from .matching import ControlMatrix

__all__ = [
    "C_BAR_DEFAULT",
    "EX_THRESHOLD_DEFAULT",
    "ControlProblem",
    "ControlOutcome",
    "ChainAnalytics",
    "matrix_exponential",
    "gramian",
    "condition_number",
    "minimum_energy",
    "simulate_control",
    "oracle_energy",
    "chain_matrix",
    "chain_energy",
]

C_BAR_DEFAULT = 1e12
EX_THRESHOLD_DEFAULT = 1e-4
PINV_CUTOFF = 1e-13

# Padé coefficients and 1-norm thresholds (Higham 2005)
_PADE = {
    3: (1.495585217958292e-2, (120.0, 60.0, 12.0, 1.0)),
    5: (2.539398330063230e-1, (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0)),
    7: (9.504178996162932e-1,
        (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0)),
    9: (2.097847961257068e0,
        (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
         2162160.0, 110880.0, 3960.0, 90.0, 1.0)),
}
_THETA13 = 5.371920351148152
_B13 = (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
        33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0)


def _as_dense_b(b, n):
    if isinstance(b, ControlMatrix):
        if b.n != n:
            raise DimensionError(f"control matrix is for n={b.n}, system has n={n}")
        return b.dense()
    b = np.asarray(b, dtype=np.float64)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] != n:
        raise DimensionError(f"B has {b.shape[0]} rows, system has n={n}")
    return b


def _square(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def matrix_exponential(m):
    """``exp(m)`` by scaling and squaring with a diagonal Padé approximant."""
    m = _square(m)
    if not np.all(np.isfinite(m)):
        raise NumericOverflowError("matrix exponential of a non-finite matrix")
    n = m.shape[0]
    if n == 0:
        return m.copy()
    ident = np.eye(n)
    norm = np.linalg.norm(m, 1)
    if norm == 0.0:
        return ident
    m2 = m @ m
    for deg in (3, 5, 7, 9):
        theta, b = _PADE[deg]
        if norm <= theta:
            u = np.zeros_like(m)
            v = np.zeros_like(m)
            power = ident
            for k in range(0, deg + 1, 2):
                v = v + b[k] * power
                u = u + b[k + 1] * power
                power = power @ m2
            u = m @ u
            return np.linalg.solve(v - u, v + u)

    s = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    a = m / 2.0 ** s
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    b = _B13
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise NumericOverflowError(f"matrix exponential overflowed (1-norm {norm:.3g})")
    return r


def gramian(a, b, t_f, method="block-exp", rtol=1e-10):
    """Controllability Gramian ``W = int_0^t_f e^{A s} B B^T e^{A^T s} ds``.

    ``method="block-exp"`` reads ``W`` off the exponential of the block
    matrix ``[[A, B B^T], [0, -A^T]]``; ``method="quadrature"`` integrates the
    integrand by adaptive Simpson to relative tolerance ``rtol``.
    """
    a = _square(a, "A")
    n = a.shape[0]
    bd = _as_dense_b(b, n)
    if not t_f > 0:
        raise ParameterError(f"t_f must be positive, got {t_f}")
    bbt = bd @ bd.T
    try:
        if method == "block-exp":
            w = _gramian_block(a, bbt, t_f)
        elif method == "quadrature":
            w = _gramian_simpson(a, bbt, t_f, rtol)
        else:
            raise ParameterError(f"unknown Gramian method {method!r}")
    except NumericOverflowError:
        w = None
    if w is None or not np.all(np.isfinite(w)):
        raise NumericOverflowError(
            f"Gramian overflowed for t_f={t_f} and ||A||_2={np.linalg.norm(a, 2):.4g}")
    return 0.5 * (w + w.T)


def _gramian_block(a, bbt, t_f):
    n = a.shape[0]
    blk = np.zeros((2 * n, 2 * n))
    blk[:n, :n] = a
    blk[:n, n:] = bbt
    blk[n:, n:] = -a.T
    f = matrix_exponential(blk * t_f)
    return f[:n, n:] @ f[:n, :n].T


def _gramian_simpson(a, bbt, t_f, rtol, max_depth=40):
    cache = {}

    def f(t):
        if t not in cache:
            e = matrix_exponential(a * t)
            cache[t] = e @ bbt @ e.T
        return cache[t]

    def simpson_rule(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    f0, fm, f1 = f(0.0), f(0.5 * t_f), f(t_f)
    whole = simpson_rule(0.0, t_f, f0, fm, f1)
    # entries far below the Gramian's scale carry no double-precision information
    floor = 1e-15 * max(np.abs(whole).max(), np.abs(f0).max(), np.abs(f1).max(), 1e-300)
    total = np.zeros_like(whole)
    stack = [(0.0, t_f, f0, fm, f1, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson_rule(lo, mid, flo, flm, fmid)
        right = simpson_rule(mid, hi, fmid, frm, fhi)
        both = left + right
        err = np.abs(both - est)
        if depth >= max_depth or np.all(err <= 15.0 * rtol * np.maximum(np.abs(both), floor)):
            total += both + (both - est) / 15.0
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return total


def condition_number(w, sym_tol=1e-10):
    """``lambda_max / lambda_min`` of a symmetric PSD matrix; ``inf`` if singular."""
    w = _square(w, "W")
    scale = np.abs(w).max() if w.size else 0.0
    if scale > 0 and np.abs(w - w.T).max() > sym_tol * scale:
        raise ValidationError("matrix is not symmetric within tolerance")
    lam = np.linalg.eigvalsh(0.5 * (w + w.T))
    lmin, lmax = lam[0], lam[-1]
    if lmax <= 0 or lmin <= 1e-300:
        return math.inf
    return float(lmax / lmin)


@dataclass(frozen=True)
class ControlProblem:
    a: np.ndarray
    b: object
    x0: np.ndarray
    xf: np.ndarray
    t_f: float = 1.0

    def __post_init__(self):
        a = _square(self.a, "A")
        n = a.shape[0]
        x0 = np.asarray(self.x0, dtype=np.float64).reshape(-1)
        xf = np.asarray(self.xf, dtype=np.float64).reshape(-1)
        if len(x0) != n or len(xf) != n:
            raise DimensionError("x0 and xf must have one entry per node")
        if not self.t_f > 0:
            raise ParameterError(f"t_f must be positive, got {self.t_f}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "xf", xf)
        object.__setattr__(self, "t_f", float(self.t_f))

    @property
    def n(self):
        return self.a.shape[0]

    def b_dense(self):
        return _as_dense_b(self.b, self.n)


@dataclass
class ControlOutcome:
    w: np.ndarray
    c_w: float
    energy: float
    controllable: bool
    t_grid: np.ndarray
    u_samples: np.ndarray
    costate0: np.ndarray = field(repr=False)
    e_x: float | None = None
    x_final: np.ndarray | None = None
    x_samples: np.ndarray | None = field(default=None, repr=False)
    quad_energy: float | None = None
    solver: str = "cholesky"

    def to_dict(self):
        return {"cw": self.c_w, "energy": self.energy, "ex": self.e_x,
                "controllable": bool(self.controllable)}


def _solve_gramian(w, v, lam, vecs):
    try:
        factor = sla.cho_factor(w, lower=True, check_finite=False)
        z = sla.cho_solve(factor, v, check_finite=False)
        if np.all(np.isfinite(z)):
            return z, "cholesky"
    except np.linalg.LinAlgError:
        pass
    keep = lam > PINV_CUTOFF * lam[-1]
    z = vecs[:, keep] @ ((vecs[:, keep].T @ v) / lam[keep])
    return z, "pinv"


def minimum_energy(p, steps=1000, method="block-exp", c_bar=C_BAR_DEFAULT, w=None):
    """Minimum-energy transfer from ``p.x0`` to ``p.xf`` in time ``p.t_f``.

    The input ``u(t) = B^T e^{A^T (t_f - t)} z`` with ``W z = xf - e^{A t_f} x0``
    is sampled on ``steps + 1`` uniform grid points.  A precomputed Gramian
    may be passed as ``w``.
    """
    a, bd, t_f = p.a, p.b_dense(), p.t_f
    if w is None:
        w = gramian(a, bd, t_f, method=method)
    lam, vecs = np.linalg.eigh(w)
    if lam[-1] <= 0 or lam[0] <= 1e-300:
        null = vecs[:, lam <= max(lam[-1], 0.0) * PINV_CUTOFF]
        raise UncontrollableError("Gramian is singular; some directions cannot be reached",
                                  null_space=null)
    c_w = float(lam[-1] / lam[0])
    v = p.xf - matrix_exponential(a * t_f) @ p.x0
    z, solver = _solve_gramian(w, v, lam, vecs)
    energy = float(v @ z)

    h = t_f / steps
    step_back = matrix_exponential(a.T * h)
    costate = np.empty((steps + 1, p.n))
    costate[steps] = z
    for k in range(steps - 1, -1, -1):
        costate[k] = step_back @ costate[k + 1]
    if not np.all(np.isfinite(costate)):
        raise NumericOverflowError(f"control input overflowed for t_f={t_f}")
    u = costate @ bd
    t = np.linspace(0.0, t_f, steps + 1)
    return ControlOutcome(w=w, c_w=c_w, energy=energy, controllable=c_w < c_bar,
                          t_grid=t, u_samples=u, costate0=costate[0], solver=solver)


def simulate_control(p, outcome, steps=None, hold="exact", record=False):
    """Integrate the controlled system under ``outcome``'s input.

    ``hold="exact"`` steps the joint state/input-generator system with its
    exact per-step transition matrix, so the only error left is round-off;
    ``hold="zoh"`` holds each stored input sample constant over its interval.
    Fills ``e_x``, ``x_final`` and ``quad_energy`` and returns ``outcome``;
    with ``record`` the state at every grid point is kept in ``x_samples``.
    """
    if steps is None:
        steps = len(outcome.t_grid) - 1
    if steps < 100:
        raise ParameterError("simulation needs at least 100 steps")
    a, bd, t_f, n = p.a, p.b_dense(), p.t_f, p.n
    h = t_f / steps
    if hold == "exact":
        blk = np.zeros((2 * n, 2 * n))
        blk[:n, :n] = a
        blk[:n, n:] = bd @ bd.T
        blk[n:, n:] = -a.T
        step = matrix_exponential(blk * h)
        state = np.concatenate([p.x0, outcome.costate0])
        path = [state[:n]] if record else None
        for _ in range(steps):
            state = step @ state
            if record:
                path.append(state[:n])
        x = state[:n]
    elif hold == "zoh":
        if steps != len(outcome.t_grid) - 1:
            raise ParameterError("zero-order hold uses the stored input grid")
        m = bd.shape[1]
        blk = np.zeros((n + m, n + m))
        blk[:n, :n] = a
        blk[:n, n:] = bd
        e = matrix_exponential(blk * h)
        phi, gam = e[:n, :n], e[:n, n:]
        x = p.x0.copy()
        path = [x] if record else None
        for k in range(steps):
            x = phi @ x + gam @ outcome.u_samples[k]
            if record:
                path.append(x)
    else:
        raise ParameterError(f"unknown hold {hold!r}")
    if not np.all(np.isfinite(x)):
        raise NumericOverflowError(f"state overflowed during simulation (t_f={t_f})")
    outcome.x_final = x
    if record:
        outcome.x_samples = np.array(path)
    outcome.e_x = float(np.linalg.norm(x - p.xf) / max(np.linalg.norm(p.xf), 1.0))
    outcome.quad_energy = float(simpson(np.sum(outcome.u_samples ** 2, axis=1), x=outcome.t_grid))
    return outcome


def oracle_energy(p, k_steps=400):
    """Least-norm energy over piecewise-constant inputs on ``k_steps`` intervals.

    Each interval is discretised exactly; the minimum-norm solution of the
    reachability equation gives an upper bound that decreases towards the
    continuous minimum as the grid is refined.
    """
    if k_steps < 50:
        raise ParameterError("oracle needs at least 50 intervals")
    a, bd, t_f, n = p.a, p.b_dense(), p.t_f, p.n
    m = bd.shape[1]
    h = t_f / k_steps
    blk = np.zeros((n + m, n + m))
    blk[:n, :n] = a
    blk[:n, n:] = bd
    e = matrix_exponential(blk * h)
    phi, gam = e[:n, :n], e[:n, n:]
    cols = np.empty((n, k_steps * m))
    g = gam
    for j in range(k_steps - 1, -1, -1):
        cols[:, j * m:(j + 1) * m] = g
        g = phi @ g
    phi_total = matrix_exponential(a * t_f)
    v = p.xf - phi_total @ p.x0
    # scaled unknowns sqrt(h) u_j make the energy a plain squared norm
    reach = cols / math.sqrt(h)
    sol, _, rank, _ = np.linalg.lstsq(reach, v, rcond=None)
    if rank < n:
        warnings.warn(f"discrete reachability matrix has rank {rank} < {n}; "
                      "pseudo-inverse solution used", RuntimeWarning, stacklevel=2)
    return float(sol @ sol)


def chain_matrix(l, directed="uni"):
    """Adjacency of a chain ``0 -> 1 -> ... -> l-1`` (``bi``: both directions)."""
    a = np.zeros((l, l))
    idx = np.arange(l - 1)
    a[idx + 1, idx] = 1.0
    if directed == "bi":
        a[idx, idx + 1] = 1.0
    elif directed != "uni":
        raise ParameterError(f"directed must be 'uni' or 'bi', got {directed!r}")
    return a


@dataclass(frozen=True)
class ChainAnalytics:
    l: int
    t_f: float
    directed: str
    e_l: float
    lambda_h_min: float
    c_w: float
    bound: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def to_dict(self):
        return {"l": self.l, "tf": self.t_f, "directed": self.directed, "E": self.e_l,
                "lambda_H_min": self.lambda_h_min, "cw": self.c_w, "bound": self.bound}


def chain_energy(l, t_f=1.0, directed="uni", dps=60):
    """Energy and spectral data of a single-driver chain of ``l`` nodes.

    The driver is node 0.  ``e_l`` is the energy to bring a unit deviation
    at the far end of the chain back to the origin.  Gramian and H-matrix are
    evaluated with ``dps`` significant digits because their condition number
    exceeds double precision from ``l = 8`` on.  ``eigenvalues`` and
    ``eigenvectors`` are the closed-form spectrum of the undirected chain.
    """
    import mpmath

    l = int(l)
    if not 2 <= l <= 12:
        raise ParameterError(f"chain length must lie in [2, 12], got {l}")
    if not t_f > 0:
        raise ParameterError("t_f must be positive")
    a = chain_matrix(l, directed)
    with mpmath.workdps(dps):
        am = mpmath.matrix(a.tolist())
        tf = mpmath.mpf(t_f)
        blk = mpmath.zeros(2 * l, 2 * l)
        for i in range(l):
            for j in range(l):
                blk[i, j] = am[i, j] * tf
                blk[l + i, l + j] = -am[j, i] * tf
        blk[0, l] = tf
        f = mpmath.expm(blk)
        f11 = f[:l, :l]
        f12 = f[:l, l:]
        w = f12 * f11.T
        w = (w + w.T) / 2
        e_neg = mpmath.expm(-am * tf)
        h = e_neg * w * e_neg.T
        h = (h + h.T) / 2
        x0 = mpmath.zeros(l, 1)
        x0[l - 1] = 1
        energy = (x0.T * mpmath.lu_solve(h, x0))[0]
        lam_w = mpmath.eigsy(w, eigvals_only=True)
        lam_h = mpmath.eigsy(h, eigvals_only=True)
        c_w = max(lam_w) / min(lam_w)
        lam_h_min = min(lam_h)
        e_l, lh, cw = float(energy), float(lam_h_min), float(c_w)

    idx = np.arange(1, l + 1)
    theta = math.pi / (l + 1)
    eigvals = 2.0 * np.cos(theta * idx)
    eigvecs = math.sqrt(2.0 / (l + 1)) * np.sin(theta * np.outer(idx, idx))
    bound = (l + 1) * math.factorial(l) ** 2 / t_f ** (2 * l)
    return ChainAnalytics(l=l, t_f=float(t_f), directed=directed, e_l=e_l, lambda_h_min=lh,
                          c_w=cw, bound=bound, eigenvalues=eigvals, eigenvectors=eigvecs)
