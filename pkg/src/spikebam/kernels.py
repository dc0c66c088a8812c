"""Response kernels of the spike response model and the STDP windows.

All kernels are defined on elapsed time ``s`` in milliseconds and are
exactly zero for ``s <= 0`` (causality) and beyond their truncation
horizon ``support``.  The engine works on an integer 1 ms grid and uses
:func:`kernel_table` lookups; the scalar functions are the reference
definitions and are what the lookups are built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelParams:
    """Parameters of the PSP (eps), hyperpolarisation (eta) and CaAP (rho) kernels.

    Time constants are in ms, amplitudes in potential units.  ``eta_amp`` is
    applied with a negative sign.
    """

    tau_s: float = 5.0
    eps_amp: float = 1.0
    tau_r: float = 5.0
    eta_amp: float = 5.0
    tau_ca: float = 10.0
    rho_amp: float = 0.6
    support: int = 90

    def __post_init__(self) -> None:
        for name in ("tau_s", "tau_r", "tau_ca"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("eps_amp", "eta_amp", "rho_amp"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if int(self.support) != self.support:
            raise ValueError(f"support must be an integer number of ms, got {self.support!r}")
        longest = max(self.tau_s, self.tau_r, self.tau_ca)
        if self.support < 5 * longest:
            raise ValueError(
                f"support must be >= 5 x the largest time constant ({5 * longest} ms), "
                f"got {self.support!r}"
            )


@dataclass(frozen=True)
class StdpWindowParams:
    """Peaks and widths (ms) of the linear potentiation/depression windows."""

    a_plus: float = 0.1
    tau_plus: float = 20.0
    a_minus: float = 0.12
    tau_minus: float = 20.0

    def __post_init__(self) -> None:
        for name in ("tau_plus", "tau_minus"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("a_plus", "a_minus"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {value!r}")


def _alpha(s: float, amp: float, tau: float, support: float) -> float:
    if s <= 0 or s > support:
        return 0.0
    x = s / tau
    return amp * x * math.exp(1.0 - x)


def eps(s: float, p: KernelParams) -> float:
    """Postsynaptic potential kernel; alpha shape peaking at ``eps_amp`` for ``s == tau_s``."""
    return _alpha(s, p.eps_amp, p.tau_s, p.support)


def rho(s: float, p: KernelParams) -> float:
    """Somatic response to a calcium spike; alpha shape peaking at ``rho_amp``."""
    return _alpha(s, p.rho_amp, p.tau_ca, p.support)


def eta(s: float, p: KernelParams) -> float:
    """Afterhyperpolarisation following the neuron's own spike."""
    if s <= 0 or s > p.support:
        return 0.0
    return -p.eta_amp * math.exp(-s / p.tau_r)


def omega_plus(dt: float, w: StdpWindowParams) -> float:
    """Potentiation gain for a post spike ``dt > 0`` ms after the pre spike."""
    if dt <= 0:
        raise ValueError(f"omega_plus is defined for dt > 0 only, got {dt!r}")
    if dt > w.tau_plus:
        return 0.0
    return w.a_plus * (1.0 - dt / w.tau_plus)


def omega_minus(dt: float, w: StdpWindowParams) -> float:
    """Depression gain (<= 0) for a pre spike ``-dt`` ms after the post spike."""
    if dt >= 0:
        raise ValueError(f"omega_minus is defined for dt < 0 only, got {dt!r}")
    if dt < -w.tau_minus:
        return 0.0
    return -w.a_minus * (1.0 + dt / w.tau_minus)


def kernel_table(kernel, p: KernelParams) -> np.ndarray:
    """Sample ``kernel`` on the integer grid ``0..support`` (inclusive).

    Entries are produced by the scalar definition itself so that table
    lookups and direct evaluation agree bit for bit.
    """
    return np.array([kernel(float(s), p) for s in range(int(p.support) + 1)], dtype=np.float64)
