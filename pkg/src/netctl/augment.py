"""Driver-set augmentation and redundant control inputs.

Two pipelines live here.  ``augment_uncontrollable`` adds inputs until the
Gramian of a network is well enough conditioned to be practically usable.
``place_redundant`` and ``reduction_report`` add extra inputs to an already
controllable network to cut its control energy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chains import control_profile
from .errors import ConsistencyError, NetctlError, ParameterError, UncontrollableError
from .graph import DirectedNetwork
from .linctrl import C_BAR_DEFAULT, ControlProblem, gramian, minimum_energy
from .matching import ControlMatrix, maximum_matching

__all__ = [
    "AugmentationReport",
    "augment_uncontrollable",
    "place_redundant",
    "reduction_report",
    "strategy_ratios",
    "table_row",
    "table_row_json",
    "florida_like",
    "RANDOM_REPEATS",
]

RANDOM_REPEATS = 10
RANK_TOL = 1e-13


@dataclass(frozen=True)
class AugmentationReport:
    base_drivers: tuple
    m_star: int
    augmented_drivers: tuple
    strategy: str
    extra_inputs: tuple = ()
    e_before: float = math.nan
    e_after: float = math.nan
    ratio: float = math.nan
    c_w_before: float = math.inf
    c_w_after: float = math.inf
    controllable: bool = False
    c_w_history: tuple = field(default=(), repr=False)
    flags: tuple = ()

    def __post_init__(self):
        if not set(self.base_drivers) <= set(self.augmented_drivers):
            raise ConsistencyError("augmented driver set must contain the base drivers")
        if self.m_star < 0:
            raise ConsistencyError("m_star must be non-negative")
        # actuator monotonicity; a baseline beyond the threshold is only flagged
        # because its energy is itself unreliable
        if (not math.isnan(self.ratio) and self.ratio > 1.0 + 1e-6
                and "ill-conditioned-baseline" not in self.flags):
            raise ConsistencyError(f"adding inputs raised the energy (ratio {self.ratio:.6g})")

    def to_dict(self):
        return {
            "base_drivers": list(self.base_drivers),
            "m_star": self.m_star,
            "augmented_drivers": list(self.augmented_drivers),
            "strategy": self.strategy,
            "extra_inputs": list(self.extra_inputs),
            "e_before": _num(self.e_before),
            "e_after": _num(self.e_after),
            "ratio": _num(self.ratio),
            "c_w_before": _num(self.c_w_before),
            "c_w_after": _num(self.c_w_after),
            "controllable": self.controllable,
            "flags": list(self.flags),
        }


def _num(x):
    """JSON-safe float: NaN and infinities become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _adjacency(net):
    if isinstance(net, DirectedNetwork):
        return net.adjacency()
    a = np.asarray(net, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError("network must be a DirectedNetwork or a square matrix")
    return a


def _spectrum(a, inputs, t_f):
    """Eigen-decomposition of the Gramian, or ``None`` if it overflows."""
    try:
        w = gramian(a, ControlMatrix(a.shape[0], tuple(inputs)), t_f)
    except NetctlError:
        return None
    lam, vecs = np.linalg.eigh(w)
    return w, lam, vecs


def _cond(lam):
    """Condition number, infinite once the Gramian is numerically rank deficient."""
    if lam[-1] <= 0 or lam[0] <= len(lam) * np.finfo(float).eps * lam[-1]:
        return math.inf
    return float(lam[-1] / lam[0])


def _energy(a, inputs, t_f, x0, xf):
    """Minimum energy and ``C_W`` for the given input nodes (NaN if singular)."""
    spec = _spectrum(a, inputs, t_f)
    if spec is None:
        return math.nan, math.inf
    w, lam, _ = spec
    c_w = _cond(lam)
    try:
        out = minimum_energy(ControlProblem(a, ControlMatrix(a.shape[0], tuple(inputs)), x0, xf, t_f),
                             steps=100, w=w)
    except (UncontrollableError, NetctlError):
        return math.nan, c_w
    return out.energy, c_w


def augment_uncontrollable(net, matching, t_f=1.0, c_bar=C_BAR_DEFAULT, x0=None, xf=None,
                           seed=0):
    """Add inputs until the Gramian condition number drops below ``c_bar``.

    Each round takes the eigenvector of the smallest Gramian eigenvalue and
    places a new input on its largest-magnitude node that is not yet driven.
    At most ``n`` inputs are added.  Energies use ``x0``/``xf`` when given,
    otherwise unit-norm Gaussian directions drawn from ``seed``.
    """
    a = _adjacency(net)
    n = a.shape[0]
    base = tuple(sorted(int(d) for d in matching.drivers))
    if x0 is None or xf is None:
        rng = np.random.default_rng(seed)
        g0, g1 = rng.standard_normal(n), rng.standard_normal(n)
        x0 = g0 / np.linalg.norm(g0) if x0 is None else x0
        xf = g1 / np.linalg.norm(g1) if xf is None else xf
    inputs = list(base)
    history = []
    flags = []
    spec = _spectrum(a, inputs, t_f)
    c_w0 = math.inf if spec is None else _cond(spec[1])
    for _ in range(n + 1):
        if spec is None:
            history.append(math.inf)
            flags.append("gramian-overflow")
            break
        _, lam, vecs = spec
        c_w = _cond(lam)
        history.append(c_w)
        if c_w < c_bar or len(inputs) == n:
            break
        order = np.argsort(-np.abs(vecs[:, 0]), kind="stable")
        taken = set(inputs)
        node = next(int(v) for v in order if int(v) not in taken)
        inputs.append(node)
        spec = _spectrum(a, inputs, t_f)
    c_w_final = history[-1]
    ok = c_w_final < c_bar
    e_before, _ = _energy(a, base, t_f, x0, xf) if c_w0 < c_bar else (math.nan, c_w0)
    e_after = _energy(a, inputs, t_f, x0, xf)[0] if ok else math.nan
    if not ok:
        flags.append("practically-uncontrollable")
    ratio = e_after / e_before if ok and not math.isnan(e_before) else math.nan
    return AugmentationReport(
        base_drivers=base,
        m_star=len(inputs) - len(base),
        augmented_drivers=tuple(sorted(inputs)),
        strategy="mstar",
        extra_inputs=tuple(inputs[len(base):]),
        e_before=e_before,
        e_after=e_after,
        ratio=ratio,
        c_w_before=c_w0,
        c_w_after=c_w_final,
        controllable=ok,
        c_w_history=tuple(history),
        flags=tuple(flags),
    )


def place_redundant(net, drivers, profile, strategy="mid", count_for_random=1, seed=0):
    """Nodes for redundant inputs under the ``mid``, ``end`` or ``random`` rule.

    ``mid`` takes the node at 1-based position ``ceil(d_c / 2)`` on every
    stored LCC, ``end`` the LCC end nodes, ``random`` a uniform sample of
    non-driver nodes.
    """
    drivers = {int(d) for d in drivers}
    n = net.n if isinstance(net, DirectedNetwork) else _adjacency(net).shape[0]
    if strategy == "mid":
        pos = math.ceil(profile.d_c / 2) - 1
        nodes = {p[pos] for p in profile.lcc_paths if len(p) > pos}
    elif strategy == "end":
        nodes = set(profile.end_nodes)
    elif strategy == "random":
        pool = np.array(sorted(set(range(n)) - drivers), dtype=np.int64)
        if count_for_random > len(pool) or count_for_random < 0:
            raise ParameterError(f"cannot draw {count_for_random} nodes from {len(pool)} non-drivers")
        rng = np.random.default_rng(seed)
        nodes = set(int(v) for v in rng.choice(pool, size=count_for_random, replace=False))
    else:
        raise ParameterError(f"unknown strategy {strategy!r}")
    return sorted(int(v) for v in nodes - drivers)


def reduction_report(net, drivers, extras, t_f, x0, xf, strategy="custom"):
    """Energy with ``drivers`` alone against ``drivers`` plus ``extras``."""
    a = _adjacency(net)
    drivers = tuple(sorted(int(d) for d in drivers))
    extras = tuple(sorted(int(e) for e in extras))
    if set(extras) & set(drivers):
        raise ParameterError("extras must be disjoint from drivers")
    e_before, c_before = _energy(a, drivers, t_f, x0, xf)
    if extras:
        e_after, c_after = _energy(a, drivers + extras, t_f, x0, xf)
    else:
        e_after, c_after = e_before, c_before
    flags = []
    if math.isnan(e_before):
        flags.append("before-uncontrollable")
        ratio = math.nan
    else:
        ratio = 1.0 if not extras else e_after / e_before
        if c_before >= C_BAR_DEFAULT:
            flags.append("ill-conditioned-baseline")
    return AugmentationReport(
        base_drivers=drivers,
        m_star=0,
        augmented_drivers=tuple(sorted(drivers + extras)),
        strategy=strategy,
        extra_inputs=extras,
        e_before=e_before,
        e_after=e_after,
        ratio=ratio,
        c_w_before=c_before,
        c_w_after=c_after,
        controllable=not math.isnan(e_after),
        flags=tuple(flags),
    )


def strategy_ratios(net, drivers, profile, t_f, x0, xf, seed=0, repeats=RANDOM_REPEATS):
    """``E_x / E`` for mid and end placement and their random baselines.

    Each random baseline uses as many inputs as the strategy it shadows and
    is averaged over ``repeats`` placements.  All values are NaN when the
    driver set alone cannot control the network.
    """
    a = _adjacency(net)
    drivers = tuple(sorted(int(d) for d in drivers))
    e_base, _ = _energy(a, drivers, t_f, x0, xf)
    keys = ("mid", "end", "random_mid", "random_end")
    if math.isnan(e_base):
        return dict.fromkeys(keys, math.nan)

    def ratio(extras):
        if not extras:
            return 1.0
        return _energy(a, drivers + tuple(extras), t_f, x0, xf)[0] / e_base

    out = {}
    baseline = {}
    for strategy in ("mid", "end"):
        extras = place_redundant(net, drivers, profile, strategy)
        out[strategy] = ratio(extras)
        k = len(extras)
        if k not in baseline:
            vals = [ratio(place_redundant(net, drivers, profile, "random", k, seed=[seed, r]))
                    for r in range(repeats)]
            baseline[k] = float(np.mean(vals))
        out[f"random_{strategy}"] = baseline[k]
    return out


def table_row(net, name="network", t_f=1.0, c_bar=C_BAR_DEFAULT, seed=0):
    """One row in the layout of the real-network summary table."""
    match = maximum_matching(net)
    n = net.n
    rng = np.random.default_rng(seed)
    g0, g1 = rng.standard_normal(n), rng.standard_normal(n)
    x0, xf = g0 / np.linalg.norm(g0), g1 / np.linalg.norm(g1)
    aug = augment_uncontrollable(net, match, t_f, c_bar, x0=x0, xf=xf)
    drivers = aug.augmented_drivers
    prof = control_profile(net, drivers)
    mid = place_redundant(net, drivers, prof, "mid")
    end = place_redundant(net, drivers, prof, "end")
    if aug.controllable:
        e_mid = reduction_report(net, drivers, mid, t_f, x0, xf, "mid").e_after
        e_end = reduction_report(net, drivers, end, t_f, x0, xf, "end").e_after
    else:
        e_mid = e_end = math.nan
    return {
        "name": name,
        "N": n,
        "ND": match.n_drivers,
        "Mstar": aug.m_star,
        "nD": round(match.n_drivers / n, 2),
        "nDstar": round((match.n_drivers + aug.m_star) / n, 2),
        "Estar": _num(aug.e_after),
        "Mmid": len(mid),
        "Emid": _num(e_mid),
        "Mend": len(end),
        "Eend": _num(e_end),
        "DC": prof.d_c,
    }


def table_row_json(row):
    return json.dumps(row, sort_keys=False)


def florida_like(n=128, avg_k=22.0, p_bi=0.5, seed=0):
    """Dense synthetic food-web stand-in: many loops and reciprocal links.

    Every node pair is linked with probability ``avg_k / (n - 1)``; a link is
    reciprocal with probability ``p_bi`` and otherwise gets a random
    direction.
    """
    rng = np.random.default_rng(seed)
    p = avg_k / (n - 1)
    i, j = np.triu_indices(n, 1)
    keep = rng.random(len(i)) < p
    i, j = i[keep], j[keep]
    bi = rng.random(len(i)) < p_bi
    flip = rng.random(len(i)) < 0.5
    edges = []
    for u, v, b, f in zip(i.tolist(), j.tolist(), bi.tolist(), flip.tolist()):
        if b:
            edges.append((u, v))
            edges.append((v, u))
        else:
            edges.append((v, u) if f else (u, v))
    return DirectedNetwork(n, edges, metadata={"model": "florida-like", "seed": seed})
