"""Model definition and closed-form massless solutions.

A single relativistic particle lives on [-a, a] with the confining
boundary conditions

    u(+a) = -v(+a),    u(-a) = +v(-a),

and feels the linear potential V(x) = lam*x.  Natural units (hbar = c = 1)
are used throughout, so energies carry dimension 1/length.

In the massless case the two-component equation decouples in the
combinations w_pm = u +- i v, which are pure phases,

    w_pm(x) = C_pm * exp(+-i*(lam*x^2/2 - eps*x)),

and the boundary conditions quantise the energy to

    eps_n = (2n + 1) * pi / (4a),   n = 0, +-1, +-2, ...

independently of lam.  The amplitudes obey C_+ = i*C_- * exp(-i*(lam*a^2
+ 2*eps*a)); together with |C_+| = |C_-| the probability density is the
constant 1/(2a) for every massless mode.

Phase convention: every mode is normalised with u(-a) real and positive,
which makes matrix elements reproducible across the analytic and the
shooting representations.  With that choice the massless spinor is real:

    u(x) =  cos(phi(x) - pi/4) / sqrt(2a)
    v(x) = -sin(phi(x) - pi/4) / sqrt(2a),
    phi(x) = lam*(a^2 - x^2)/2 + eps*(x + a).

Quadrature: all integrals over [-a, a] use composite 32-node
Gauss-Legendre panels, with enough panels that the phase budget
lam*a^2/2 + |eps|*a of the integrand advances less than pi per panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BagConfig",
    "Mode",
    "ClosedFormMode",
    "massless_levels",
    "closed_form_mode",
    "eval_mode",
    "overlap",
    "panel_quadrature",
    "mode_phase_budget",
]

GAUSS_NODES_PER_PANEL = 32

_BASE_RULE = np.polynomial.legendre.leggauss(GAUSS_NODES_PER_PANEL)


@dataclass(frozen=True)
class BagConfig:
    """Physical parameters: half-width a > 0, mass >= 0, coupling lam."""

    a: float = 1.0
    mass: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not (self.a > 0.0):
            raise ValueError(f"half-width a must be positive, got {self.a}")
        if self.mass < 0.0:
            raise ValueError(f"mass must be non-negative, got {self.mass}")

    def without_potential(self) -> "BagConfig":
        return BagConfig(a=self.a, mass=self.mass, lam=0.0)


@dataclass(frozen=True)
class Mode:
    """One normalised single-particle eigenstate.

    ``spinor`` maps x (scalar or array, |x| <= a) to the pair (u, v);
    ``norm_check`` is the residual |integral(|u|^2 + |v|^2) - 1| obtained
    with the module quadrature rule.
    """

    index: int
    energy: float
    spinor: Callable[[np.ndarray], tuple]
    norm_check: float
    config: BagConfig

    def density(self, x):
        u, v = self.spinor(x)
        return np.abs(u) ** 2 + np.abs(v) ** 2


@dataclass(frozen=True)
class ClosedFormMode:
    """Analytic massless mode: amplitudes C_pm, energy, coupling, width."""

    c_plus: complex
    c_minus: complex
    energy: float
    lam: float
    a: float

    def as_mode(self, index: int) -> Mode:
        cfg = BagConfig(a=self.a, mass=0.0, lam=self.lam)
        spinor = lambda x: eval_mode(self, x)
        # Pure-phase w_pm make the density exactly 1/(2a); the quadrature
        # residual is recomputed anyway as a sanity value.
        xs, ws = panel_quadrature(self.a, mode_phase_budget(self.energy, self.lam, self.a) * 2.0)
        u, v = eval_mode(self, xs)
        norm = float(np.sum(ws * (np.abs(u) ** 2 + np.abs(v) ** 2)))
        return Mode(index=index, energy=self.energy, spinor=spinor,
                    norm_check=abs(norm - 1.0), config=cfg)


def massless_levels(a: float, n_lo: int, n_hi: int) -> np.ndarray:
    """Energies eps_n = (2n+1)*pi/(4a) for n = n_lo..n_hi (inclusive)."""
    if not (a > 0.0):
        raise ValueError(f"half-width a must be positive, got {a}")
    if n_lo > n_hi:
        raise ValueError(f"need n_lo <= n_hi, got {n_lo} > {n_hi}")
    n = np.arange(n_lo, n_hi + 1)
    return (2 * n + 1) * (math.pi / (4.0 * a))


def closed_form_mode(n: int, lam: float, a: float) -> ClosedFormMode:
    """Normalised massless mode for level n with the u(-a) > 0 convention."""
    if not (a > 0.0):
        raise ValueError(f"half-width a must be positive, got {a}")
    eps = (2 * n + 1) * math.pi / (4.0 * a)
    # w_-(-a) = exp(-i*pi/4)/sqrt(2a) pins the overall phase.
    c_minus = np.exp(-0.25j * math.pi) / math.sqrt(2.0 * a) \
        * np.exp(1j * (0.5 * lam * a * a + eps * a))
    c_plus = 1j * c_minus * np.exp(-1j * (lam * a * a + 2.0 * eps * a))
    return ClosedFormMode(c_plus=complex(c_plus), c_minus=complex(c_minus),
                          energy=eps, lam=lam, a=a)


def eval_mode(mode: ClosedFormMode, x):
    """Spinor (u, v) of a closed-form mode at x, from u = (w+ + w-)/2,
    v = (w+ - w-)/(2i)."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > mode.a * (1.0 + 1e-12)):
        raise ValueError(f"evaluation point outside [-a, a], a={mode.a}")
    phase = 0.5 * mode.lam * x * x - mode.energy * x
    c, s = np.cos(phase), np.sin(phase)
    w_plus = mode.c_plus * (c + 1j * s)
    w_minus = mode.c_minus * (c - 1j * s)
    u = 0.5 * (w_plus + w_minus)
    v = (w_plus - w_minus) / 2.0j
    return u, v


def mode_phase_budget(energy: float, lam: float, a: float) -> float:
    """Oscillation budget lam*a^2/2 + |eps|*a of one mode over [-a, a]."""
    return 0.5 * abs(lam) * a * a + abs(energy) * a


def panel_quadrature(a: float, phase_budget: float):
    """Composite Gauss-Legendre rule on [-a, a].

    The panel count keeps the given phase budget below pi per panel, so
    oscillatory mode products are resolved to near machine precision by
    the 32-node panels.
    """
    n_panels = max(1, int(math.ceil(phase_budget / math.pi)) + 1)
    base_x, base_w = _BASE_RULE
    edges = np.linspace(-a, a, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    ws = (half[:, None] * base_w[None, :]).ravel()
    return xs, ws


def overlap(mode_j: Mode, mode_k: Mode) -> complex:
    """Inner product integral(conj(u_j)*u_k + conj(v_j)*v_k) dx."""
    if mode_j.config != mode_k.config:
        raise ValueError(
            f"modes belong to different configurations: {mode_j.config} vs {mode_k.config}")
    a = mode_j.config.a
    lam = mode_j.config.lam
    budget = (mode_phase_budget(mode_j.energy, lam, a)
              + mode_phase_budget(mode_k.energy, lam, a))
    xs, ws = panel_quadrature(a, budget)
    uj, vj = mode_j.spinor(xs)
    uk, vk = mode_k.spinor(xs)
    val = np.sum(ws * (np.conj(uj) * uk + np.conj(vj) * vk))
    return complex(val)
