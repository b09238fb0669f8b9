"""Ensemble experiments and the statistical models built on them.

Per-trial random streams are seeded with ``master_seed ^ trial_index`` so a
record depends only on its index, never on scheduling or thread count.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import integrate

from .chains import control_profile, topological_diameter
from .errors import DomainError, InsufficientDataError, NetctlError, ParameterError
from .graph import generate_ba, generate_er
from .linctrl import (
    C_BAR_DEFAULT,
    ControlProblem,
    chain_energy,
    chain_matrix,
    condition_number,
    gramian,
    minimum_energy,
    simulate_control,
)
from .matching import ControlMatrix, control_matrix, maximum_matching

__all__ = [
    "CSV_HEADER",
    "EnsembleConfig",
    "TrialRecord",
    "FitResult",
    "SkeletonPrediction",
    "DoubleChainResult",
    "trial_seed",
    "random_unit_states",
    "run_trial",
    "run_ensemble",
    "practical_controllability",
    "write_records_csv",
    "read_records_csv",
    "fit_power_law",
    "fit_exponential",
    "fit_chain_growth",
    "lcc_samples",
    "skeleton_prediction",
    "skeleton_cdf",
    "lower_gamma",
    "double_chain_ensemble",
    "log_bins",
]

CSV_HEADER = ("seed", "n", "avg_k", "p_b", "n_d", "d_c", "m", "c_w", "controllable",
              "energy", "e_x", "topo_diameter")


def trial_seed(master_seed, index):
    return int(master_seed) ^ int(index)


def random_unit_states(rng, n):
    """Initial and target states: independent Gaussian directions of unit norm."""
    x0 = rng.standard_normal(n)
    xf = rng.standard_normal(n)
    return x0 / np.linalg.norm(x0), xf / np.linalg.norm(xf)


@dataclass(frozen=True)
class EnsembleConfig:
    model: str = "er"
    n: int = 100
    avg_k: float = 6.0
    pb: float = 0.1
    t_f: float = 1.0
    trials: int = 100
    seed: int = 0
    c_bar: float = C_BAR_DEFAULT
    simulate: bool = True
    steps: int = 1000

    def __post_init__(self):
        if self.model not in ("er", "ba"):
            raise ParameterError(f"model must be 'er' or 'ba', got {self.model!r}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.t_f > 0:
            raise ParameterError("t_f must be positive")

    def network(self, seed):
        if self.model == "er":
            return generate_er(self.n, self.avg_k, self.pb, seed)
        return generate_ba(self.n, max(1, int(round(self.avg_k / 2))), self.pb, seed)


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    avg_k: float
    p_b: float
    n_d: float
    d_c: int
    m: int
    c_w: float
    controllable: bool
    energy: float | None = None
    e_x: float | None = None
    topo_diameter: int | None = None

    def row(self):
        out = []
        for f in CSV_HEADER:
            v = getattr(self, f)
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("1" if v else "0")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        return out


def run_trial(cfg, index):
    seed = trial_seed(cfg.seed, index)
    try:
        net = cfg.network(seed)
    except ParameterError as exc:
        raise ParameterError(f"trial {index}: {exc}") from None
    match = maximum_matching(net)
    prof = control_profile(net, match.drivers)
    a = net.adjacency()
    b = control_matrix(match)
    try:
        w = gramian(a, b, cfg.t_f)
        c_w = condition_number(w)
    except NetctlError:
        w, c_w = None, math.inf
    ok = c_w < cfg.c_bar
    energy = e_x = None
    if ok:
        rng = np.random.default_rng([seed, 1])
        x0, xf = random_unit_states(rng, net.n)
        prob = ControlProblem(a, b, x0, xf, cfg.t_f)
        out = minimum_energy(prob, steps=cfg.steps, c_bar=cfg.c_bar, w=w)
        energy = out.energy
        if cfg.simulate:
            e_x = simulate_control(prob, out).e_x
    return TrialRecord(seed=seed, n=net.n, avg_k=float(cfg.avg_k), p_b=float(cfg.pb),
                       n_d=match.driver_density, d_c=prof.d_c, m=prof.m, c_w=c_w,
                       controllable=ok, energy=energy, e_x=e_x,
                       topo_diameter=topological_diameter(net))


def run_ensemble(cfg, threads=None):
    """Run ``cfg.trials`` independent trials; records come back in index order."""
    if threads is None:
        threads = int(os.environ.get("NETCTL_THREADS", "1") or 1)
    if threads <= 1:
        return [run_trial(cfg, i) for i in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda i: run_trial(cfg, i), range(cfg.trials)))


def practical_controllability(records):
    if not records:
        raise InsufficientDataError("no records")
    return sum(r.controllable for r in records) / len(records)


def write_records_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())


def read_records_csv(stream):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(line for line in stream if not line.startswith("#"))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ParameterError(f"unexpected CSV header {header}")
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    for row in reader:
        kw = {}
        for name, raw in zip(CSV_HEADER, row):
            if raw == "":
                kw[name] = None
            elif name == "controllable":
                kw[name] = raw in ("1", "True", "true")
            elif "int" in str(types[name]) and "float" not in str(types[name]):
                kw[name] = int(float(raw))
            else:
                kw[name] = float(raw)
        out.append(TrialRecord(**kw))
    return out


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict
    x_min: float | None
    goodness: float
    n_samples: int
    valid: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["params"] = dict(self.params)
        return d


def fit_power_law(samples, min_tail=30):
    """Continuous power-law MLE with ``x_min`` chosen by minimum KS distance.

    For each candidate ``x_min`` among the sorted samples the exponent is
    ``1 + n / sum(log(x / x_min))`` over the tail; the candidate with the
    smallest Kolmogorov–Smirnov distance between the tail and the fitted law
    wins.  Candidates leaving fewer than ``min_tail`` tail samples are
    skipped.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ParameterError("power-law samples must be positive and finite")
    if len(x) < min_tail:
        raise InsufficientDataError(f"need at least {min_tail} samples, got {len(x)}")
    logs = np.log(x)
    suffix = np.cumsum(logs[::-1])[::-1]
    best = None
    cands = np.unique(x[: len(x) - min_tail + 1])
    starts = np.searchsorted(x, cands, side="left")
    for xm, i in zip(cands, starts):
        tail_n = len(x) - i
        if tail_n < min_tail:
            continue
        s = suffix[i] - tail_n * math.log(xm)
        if s <= 0:
            continue
        alpha = 1.0 + tail_n / s
        tail = x[i:]
        model_cdf = 1.0 - (tail / xm) ** (1.0 - alpha)
        emp_hi = np.arange(1, tail_n + 1) / tail_n
        emp_lo = np.arange(0, tail_n) / tail_n
        ks = max(np.max(np.abs(emp_hi - model_cdf)), np.max(np.abs(emp_lo - model_cdf)))
        if best is None or ks < best[0]:
            best = (ks, alpha, xm, tail_n)
    if best is None:
        raise InsufficientDataError("no x_min leaves a non-degenerate tail")
    ks, alpha, xm, tail_n = best
    sigma = (alpha - 1.0) / math.sqrt(tail_n)
    return FitResult("power-law", {"alpha": alpha, "alpha_err": sigma}, float(xm), float(ks),
                     tail_n, valid=tail_n >= 30)


def fit_exponential(samples, kind="d_c", from_mode=True, min_samples=30):
    """Least-squares fit of ``log P(x) = log a - b x`` to integer samples.

    Frequencies are taken over the observed support; with ``from_mode`` the
    fit starts at the most frequent value so a rising flank does not bias
    the decay rate.  Each value is weighted by its count, the inverse
    variance of its log-frequency, so sparse tail bins do not dominate.  ``kind`` only names the parameters: ``(a, b)`` for
    control diameters, ``(c, g)`` for degeneracies.
    """
    x = np.asarray(samples)
    if len(x) < min_samples:
        raise InsufficientDataError(f"need at least {min_samples} samples, got {len(x)}")
    if np.any(x != np.round(x)):
        raise ParameterError("samples must be integer valued")
    x = x.astype(np.int64)
    values, counts = np.unique(x, return_counts=True)
    if from_mode:
        start = int(np.argmax(counts))
        values, counts = values[start:], counts[start:]
    if len(values) < 3 or values[-1] - values[0] < 2:
        raise InsufficientDataError("support narrower than three values")
    freq = counts / len(x)
    logf = np.log(freq)
    slope, intercept = np.polyfit(values, logf, 1, w=np.sqrt(counts))
    resid = logf - (intercept + slope * values)
    mean = np.average(logf, weights=counts)
    ss_tot = np.sum(counts * (logf - mean) ** 2)
    r2 = 1.0 - np.sum(counts * resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    names = ("a", "b") if kind == "d_c" else ("c", "g")
    params = {names[0]: float(math.exp(intercept)), names[1]: float(-slope)}
    return FitResult("exponential", params, float(values[0]), float(r2), len(x),
                     valid=-slope > 0, extra={"kind": kind, "support": values.tolist()})


def fit_chain_growth(lengths, energies):
    """Fit ``E_L = A exp(B L)`` by least squares on ``log E_L``."""
    lengths = np.asarray(lengths, dtype=np.float64)
    energies = np.asarray(energies, dtype=np.float64)
    if len(lengths) < 2 or np.any(energies <= 0):
        raise InsufficientDataError("need two or more positive energies")
    slope, intercept = np.polyfit(lengths, np.log(energies), 1)
    logs = np.log(energies)
    resid = logs - (intercept + slope * lengths)
    ss_tot = np.sum((logs - logs.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return FitResult("exponential-growth", {"A": float(math.exp(intercept)), "B": float(slope)},
                     None, float(r2), len(lengths))


def lcc_samples(records, kind="d_c", min_dc=3):
    """Control diameters, or degeneracies of networks with ``d_c >= min_dc``."""
    if kind == "d_c":
        return [r.d_c for r in records]
    return [r.m for r in records if r.d_c >= min_dc]


def lower_gamma(s, x):
    """Lower incomplete gamma ``int_0^x t^(s-1) e^-t dt`` by quadrature.

    Substituting ``t = u^(1/s)`` removes the endpoint singularity.
    """
    if s <= 0:
        raise DomainError("shape must be positive")
    if x <= 0:
        return 0.0
    # the integrand is below e^-700 past t = 700
    upper = min(x, 700.0) ** s
    val, _ = integrate.quad(lambda u: math.exp(-u ** (1.0 / s)), 0.0, upper, limit=200)
    return val / s


@dataclass(frozen=True)
class SkeletonPrediction:
    exponent: float
    energies: np.ndarray
    density: np.ndarray
    h_gamma: np.ndarray | None = None

    @property
    def h_gamma_mean(self):
        return None if self.h_gamma is None else float(np.mean(self.h_gamma))


def skeleton_prediction(fit_dc, fit_el, fit_m=None, energies=None):
    """Energy-tail exponent ``1 + b/B`` implied by the skeleton of longest chains.

    ``fit_dc`` carries the decay rate ``b`` of the control-diameter law and
    ``fit_el`` the growth rate ``B`` of chain energy with length.  When the
    degeneracy fit ``fit_m`` is given, the density is normalised and the
    gamma-function factor ``h`` is evaluated over ``energies``.
    """
    b = fit_dc.params.get("b", 0.0)
    big_a, big_b = fit_el.params["A"], fit_el.params["B"]
    if big_b <= 0:
        raise DomainError("chain-energy growth rate B must be positive")
    exponent = 1.0 + b / big_b
    if energies is None:
        energies = np.logspace(0, 12, 49)
    energies = np.asarray(energies, dtype=np.float64)
    h = None
    if fit_m is not None and b > 0:
        c, g = fit_m.params["c"], fit_m.params["g"]
        a = fit_dc.params["a"]
        s = b / big_b
        h = np.array([lower_gamma(s, g * e) for e in energies])
        pref = c * a * big_a ** s / (g * big_b) * g ** (-(2.0 + s))
        density = pref * h * energies ** (-exponent)
    else:
        density = energies ** (-exponent)
    return SkeletonPrediction(exponent, energies, density, h)


def skeleton_cdf(energy, fit_dc, fit_el, fit_m):
    """``P(m * E_L < energy)`` by direct numerical integration.

    ``E_L`` has the density implied by the exponential diameter law mapped
    through ``E_L = A exp(B D)`` for ``E_L >= A``; ``m`` is exponentially
    distributed with rate ``g``.
    """
    a, b = fit_dc.params["a"], fit_dc.params["b"]
    big_a, big_b = fit_el.params["A"], fit_el.params["B"]
    c, g = fit_m.params["c"], fit_m.params["g"]
    s = b / big_b

    def p_l(el):
        return a / big_b * big_a ** s * el ** (-(1.0 + s))

    def inner(log_el):
        el = math.exp(log_el)
        return p_l(el) * el * (c / g) * (1.0 - math.exp(-g * energy / el))

    val, _ = integrate.quad(inner, math.log(big_a), math.log(big_a) + 200.0 / max(s, 1e-3) + 50,
                            limit=400)
    return val


@dataclass(frozen=True)
class DoubleChainResult:
    energies: np.ndarray
    lengths: np.ndarray
    controllable: np.ndarray
    c_w: np.ndarray
    states: tuple = field(default=(), repr=False)

    @property
    def samples(self):
        return self.energies[self.controllable]


def _double_chain(l1, l2, p, p12, rng):
    n = l1 + l2
    a = np.zeros((n, n))
    a[:l1, :l1] = chain_matrix(l1)
    a[l1:, l1:] = chain_matrix(l2)
    link = rng.random((l1, l2)) < p
    forward = rng.random((l1, l2)) < p12
    i, j = np.nonzero(link & forward)
    a[l1 + j, i] = 1.0
    i, j = np.nonzero(link & ~forward)
    a[i, l1 + j] = 1.0
    return a


def double_chain_ensemble(lengths, p, p12, trials, seed, t_f=1.0, c_bar=C_BAR_DEFAULT):
    """Energies of two randomly coupled unidirectional chains.

    ``lengths`` is a single chain length or an inclusive ``(lo, hi)`` range
    from which both lengths are drawn uniformly.  Every cross pair is linked
    with probability ``p``, pointing from the first chain to the second with
    probability ``p12``.  The two chain heads are the drivers.
    """
    if not 0.0 <= p <= 1.0 or not 0.0 <= p12 <= 1.0:
        raise ParameterError("p and p12 must lie in [0, 1]")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if isinstance(lengths, (tuple, list)):
        lo, hi = int(lengths[0]), int(lengths[1])
    else:
        lo = hi = int(lengths)
    if lo < 1 or hi < lo:
        raise ParameterError(f"invalid chain length range {lengths}")
    energies = np.full(trials, np.nan)
    lens = np.zeros((trials, 2), dtype=np.int64)
    ok = np.zeros(trials, dtype=bool)
    cws = np.full(trials, np.inf)
    states = []
    for t in range(trials):
        rng = np.random.default_rng([int(seed), t])
        l1, l2 = (int(x) for x in rng.integers(lo, hi + 1, size=2))
        lens[t] = (l1, l2)
        a = _double_chain(l1, l2, p, p12, rng)
        b = ControlMatrix(l1 + l2, (0, l1))
        x0, xf = random_unit_states(rng, l1 + l2)
        states.append((x0, xf))
        try:
            w = gramian(a, b, t_f)
            cws[t] = condition_number(w)
        except NetctlError:
            continue
        if cws[t] < c_bar:
            ok[t] = True
            energies[t] = minimum_energy(ControlProblem(a, b, x0, xf, t_f), steps=100, w=w).energy
    return DoubleChainResult(energies=energies, lengths=lens, controllable=ok, c_w=cws,
                             states=tuple(states))


def log_bins(samples, per_decade=20):
    """Log-binned density: returns ``(bin_centres, density)``."""
    x = np.asarray(samples, dtype=np.float64)
    x = x[x > 0]
    if len(x) == 0:
        return np.array([]), np.array([])
    lo, hi = math.floor(math.log10(x.min())), math.ceil(math.log10(x.max()))
    hi = max(hi, lo + 1)
    edges = np.logspace(lo, hi, (hi - lo) * per_decade + 1)
    counts, edges = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    density = counts / (len(x) * widths)
    centres = np.sqrt(edges[:-1] * edges[1:])
    keep = counts > 0
    return centres[keep], density[keep]
