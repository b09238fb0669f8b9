"""Cascaded parallel R-C ladder driven by a voltage source at its first stage.

Stage voltages ``u_1..u_l`` follow ``C du/dt = A' u + ...`` where every
capacitor couples to its neighbours through a resistor ``R``; the source
``U(t)`` feeds stage 1 through another ``R``.  Extra current sources may be
attached to any capacitor.  Node arguments in this module are 1-based, as
stage numbers are.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionError, ParameterError
from .linctrl import ControlProblem, chain_matrix, minimum_energy, simulate_control
from .matching import ControlMatrix

__all__ = [
    "RcLadder",
    "build_circuit",
    "inject_current",
    "dissipated_energy",
    "circuit_report",
]


@dataclass(frozen=True)
class RcLadder:
    l: int
    r: float = 1.0
    c: float = 1.0
    injections: tuple = ()

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 1:
            raise ParameterError(f"stage count must be a positive integer, got {self.l}")
        if not (self.r > 0 and self.c > 0):
            raise ParameterError("resistance and capacitance must be positive")
        inj = tuple(int(v) for v in self.injections)
        for v in inj:
            _check_node(self.l, v)
        object.__setattr__(self, "injections", inj)

    @property
    def tau(self):
        return self.r * self.c

    def system_matrix(self):
        k = 1.0 / self.tau
        a = np.zeros((self.l, self.l))
        idx = np.arange(self.l)
        a[idx, idx] = -2.0 * k
        a[-1, -1] = -k
        a[idx[1:], idx[:-1]] = k
        a[idx[:-1], idx[1:]] = k
        return a

    def control_matrix(self):
        cols = (0,) + tuple(v - 1 for v in self.injections)
        gains = (1.0 / self.tau,) + (1.0 / self.c,) * len(self.injections)
        return ControlMatrix(self.l, cols, gains)


def _check_node(l, node):
    if not 1 <= node <= l:
        raise ParameterError(f"stage {node} outside 1..{l}")


def build_circuit(l, r=1.0, c=1.0):
    """System matrix and source input matrix of an ``l``-stage ladder."""
    ladder = RcLadder(l, r, c)
    return ladder.system_matrix(), ladder.control_matrix()


def inject_current(ladder, node):
    """Input matrix of ``ladder`` with a current source added at stage ``node``.

    Injecting at stage 1 is allowed; the column then duplicates the source
    column's node and shows up in ``ControlMatrix.duplicates``.
    """
    _check_node(ladder.l, node)
    return RcLadder(ladder.l, ladder.r, ladder.c, ladder.injections + (int(node),)).control_matrix()


def dissipated_energy(ladder, u_samples, x_samples, t_grid=None):
    """Energy delivered by the voltage source, ``int U (U - u_1) / R dt``.

    ``u_samples`` holds the source voltage (first column if 2-D) and
    ``x_samples`` the stage voltages on the same grid.  Without ``t_grid``
    the grid is taken as unit-spaced.
    """
    u = np.asarray(u_samples, dtype=np.float64)
    x = np.asarray(x_samples, dtype=np.float64)
    if u.ndim == 2:
        u = u[:, 0]
    if x.ndim == 1:
        x = x[:, None]
    if len(u) != len(x) or (t_grid is not None and len(t_grid) != len(u)):
        raise DimensionError("input, state and time grids must have the same length")
    if x.shape[1] != ladder.l:
        raise DimensionError(f"state samples need {ladder.l} columns, got {x.shape[1]}")
    if len(u) < 2:
        return 0.0
    power = u * (u - x[:, 0]) / ladder.r
    return float(simpson(power, x=t_grid) if t_grid is not None else simpson(power))


def _unit_target(l, seed):
    rng = np.random.default_rng(seed)
    xf = rng.standard_normal(l)
    return xf / np.linalg.norm(xf)


def circuit_report(l=7, r=1.0, c=1.0, injections=None, t_f=1.0, seed=0, steps=1000):
    """Control energy, dissipated energy and chain reference for one ladder.

    The task is ``x0 = 0`` to a unit-norm Gaussian target drawn from
    ``seed``.  ``injections`` defaults to the middle stage; each gets its own
    energy ratio against the source-only energy.
    """
    if steps < 1000:
        raise ParameterError("circuit simulation needs at least 1000 steps")
    ladder = RcLadder(l, r, c)
    if injections is None:
        injections = [math.ceil(l / 2)]
    injections = [int(v) for v in injections]
    for v in injections:
        _check_node(l, v)
    a = ladder.system_matrix()
    x0 = np.zeros(l)
    xf = _unit_target(l, seed)

    prob = ControlProblem(a, ladder.control_matrix(), x0, xf, t_f)
    out = minimum_energy(prob, steps=steps)
    simulate_control(prob, out, record=True)
    # the source voltage is the input scaled by the stage-1 gain
    voltage = out.u_samples[:, 0]
    e_real = dissipated_energy(ladder, voltage, out.x_samples, out.t_grid)

    chain = minimum_energy(ControlProblem(chain_matrix(l), ControlMatrix(l, (0,)), x0, xf, t_f),
                           steps=100)
    ratios = {}
    duplicates = []
    for v in injections:
        cm = inject_current(ladder, v)
        if cm.duplicates:
            duplicates.append(v)
        e = minimum_energy(ControlProblem(a, cm, x0, xf, t_f), steps=100).energy
        ratios[str(v)] = e / out.energy
    report = {
        "L": l,
        "R": r,
        "C": c,
        "E_control": out.energy,
        "E_real": e_real,
        "E_chain_equiv": chain.energy,
        "injections": injections,
        "ratios": ratios,
        "tf": t_f,
        "seed": seed,
        "e_x": out.e_x,
    }
    if duplicates:
        report["duplicate_injections"] = duplicates
    return report


def report_json(report):
    return json.dumps(report, indent=2)
