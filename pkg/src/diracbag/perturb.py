"""Perturbative energy shifts of the one-particle ground state.

The unperturbed basis is the lam = 0 spectrum of the same (a, mass);
the perturbation is V(x) = lam*x.  The second-order shift of level 0 is

    W2 = lam^2 * sum_k |<0|x|k>|^2 / (eps_0 - eps_k)

with the intermediate set depending on the occupancy prescription:

* FEYNMAN  - every level k != 0, positive and negative energies alike;
* PAULI    - only unoccupied levels, i.e. positive energies k = 1..cutoff
  (the negative-energy sea is filled and the valence particle sits in
  level 0).

The Feynman sum is only conditionally convergent in the massless case,
so the summation order is part of the contract: terms are accumulated in
k <-> -k pairs (each pair reduced first), pairs added in ascending k.
Every report records the cutoff scheme; an "asymmetric" scheme (positive
indices to N, negative ones to N/2) is available to expose how the
partial sums move when the pairing is broken.

Matrix elements <j|x|k> are quadrature integrals of x*(u_j u_k + v_j v_k)
over closed-form massless modes when mass = 0 and over shooting modes
otherwise; with the u(-a) > 0 phase convention they are real.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import shooting
from .bagmodel import (BagConfig, Mode, closed_form_mode, mode_phase_budget,
                       panel_quadrature)

__all__ = [
    "Prescription",
    "PAULI",
    "FEYNMAN",
    "ShiftReport",
    "x_matrix_element",
    "first_order",
    "second_order",
    "compare",
    "convergence_traces",
    "unperturbed_modes",
]


class Prescription(enum.Enum):
    """Intermediate-state occupancy rule for the second-order sum."""

    PAULI = "pauli"        # exclude transitions into the occupied sea
    FEYNMAN = "feynman"    # include every intermediate state except level 0


PAULI = Prescription.PAULI
FEYNMAN = Prescription.FEYNMAN

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class ShiftReport:
    """First/second-order shifts, partial-sum traces and verdicts."""

    config: BagConfig
    level: int
    cutoff: int
    tol: float
    scheme: str
    w_first: float
    w_second: dict
    partial_sums: dict
    cauchy_residual: dict
    converged: dict
    w_extrapolated: dict = field(default_factory=dict)
    w_exact: float | None = None
    agreement: dict | None = None
    matches_exact: dict | None = None


def _default_tol(cfg: BagConfig) -> float:
    # Dimensionally natural scale of the second-order shift.
    return 1.0e-9 * max(cfg.lam * cfg.lam * cfg.a ** 3, 1.0e-30)


def _require_same_basis(mode_j: Mode, mode_k: Mode) -> None:
    if mode_j.config != mode_k.config:
        raise ValueError(
            f"modes from different configurations: {mode_j.config} vs {mode_k.config}")


def _x_element(a, lam_basis, spinor_j, e_j, spinor_k, e_k) -> complex:
    budget = (mode_phase_budget(e_j, lam_basis, a)
              + mode_phase_budget(e_k, lam_basis, a))
    xs, ws = panel_quadrature(a, budget)
    uj, vj = spinor_j(xs)
    uk, vk = spinor_k(xs)
    return complex(np.sum(ws * xs * (np.conj(uj) * uk + np.conj(vj) * vk)))


def x_matrix_element(mode_j: Mode, mode_k: Mode) -> complex:
    """<j|x|k> = integral x*(conj(u_j) u_k + conj(v_j) v_k) dx."""
    _require_same_basis(mode_j, mode_k)
    cfg = mode_j.config
    return _x_element(cfg.a, cfg.lam, mode_j.spinor, mode_j.energy,
                      mode_k.spinor, mode_k.energy)


def unperturbed_modes(cfg: BagConfig, indices) -> dict:
    """Basis modes of the lam = 0 problem, keyed by level index."""
    indices = sorted(set(int(i) for i in indices))
    base = cfg.without_potential()
    if cfg.mass == 0.0:
        return {n: closed_form_mode(n, 0.0, cfg.a).as_mode(n) for n in indices}
    out = {}
    pos = [n for n in indices if n >= 0]
    neg = [n for n in indices if n < 0]
    if pos:
        hi = _level_energy_bound(cfg, max(pos))
        spec = shooting.find_levels(base, (0.0, hi))
        for n in pos:
            out[n] = spec.mode(n)
    if neg:
        lo = -_level_energy_bound(cfg, min(neg))
        spec = shooting.find_levels(base, (lo, 0.0))
        for n in neg:
            out[n] = spec.mode(n)
    return out


def _level_energy_bound(cfg: BagConfig, level: int) -> float:
    k = (2 * abs(level) + 2) * math.pi / (4.0 * cfg.a)
    return math.hypot(cfg.mass, k) + math.pi / (8.0 * cfg.a)


# Cache of ground-row data keyed by (a, mass); entries hold the largest
# cutoff computed so far and are sliced for smaller requests.
_row_cache: dict = {}
_ROW_CACHE_MAX = 8


def _ground_row(cfg: BagConfig, cutoff: int):
    """Energies eps_k and elements <0|x|k> for k in [-cutoff, cutoff].

    Returns (energies, elements) as arrays indexed by k + cutoff; the
    k = 0 element slot holds <0|x|0>.
    """
    key = (cfg.a, cfg.mass)
    cached = _row_cache.get(key)
    if cached is not None and cached["cutoff"] >= cutoff:
        c = cached["cutoff"]
        sl = slice(c - cutoff, c + cutoff + 1)
        return cached["energies"][sl], cached["elements"][sl]

    modes = unperturbed_modes(cfg, range(-cutoff, cutoff + 1))
    mode0 = modes[0]
    ks = np.arange(-cutoff, cutoff + 1)
    energies = np.array([modes[k].energy for k in ks])
    elements = np.empty(len(ks))
    for i, k in enumerate(ks):
        el = _x_element(cfg.a, 0.0, mode0.spinor, mode0.energy,
                        modes[k].spinor, modes[k].energy)
        elements[i] = el.real
    if len(_row_cache) >= _ROW_CACHE_MAX:
        _row_cache.clear()
    _row_cache[key] = {"cutoff": cutoff, "energies": energies, "elements": elements}
    return energies, elements


def first_order(cfg: BagConfig, level: int) -> float:
    """First-order shift lam * <level|x|level> in the lam = 0 basis."""
    if cfg.lam == 0.0:
        return 0.0
    mode = unperturbed_modes(cfg, [level])[level]
    return cfg.lam * x_matrix_element(mode, mode).real


def _term_arrays(cfg: BagConfig, cutoff: int):
    """Second-order terms t_k = lam^2 |<0|x|k>|^2 / (eps_0 - eps_k)."""
    energies, elements = _ground_row(cfg, cutoff)
    e0 = energies[cutoff]
    lam2 = cfg.lam * cfg.lam
    ks = np.arange(1, cutoff + 1)
    el_pos = elements[cutoff + ks]
    el_neg = elements[cutoff - ks]
    den_pos = e0 - energies[cutoff + ks]
    den_neg = e0 - energies[cutoff - ks]
    t_pos = lam2 * el_pos * el_pos / den_pos
    t_neg = lam2 * el_neg * el_neg / den_neg
    return t_pos, t_neg


def _partial_sums(t_pos, t_neg, prescription: Prescription, scheme: str):
    if prescription is Prescription.PAULI:
        return np.cumsum(t_pos)
    if scheme == SYMMETRIC:
        # Reduce each k <-> -k pair first, then accumulate in ascending k.
        return np.cumsum(t_pos + t_neg)
    # Asymmetric: S_N takes positive indices to N, negative ones to N//2.
    cum_pos = np.cumsum(t_pos)
    cum_neg = np.concatenate([[0.0], np.cumsum(t_neg)])
    ns = np.arange(1, len(t_pos) + 1)
    return cum_pos + cum_neg[ns // 2]


def second_order(cfg: BagConfig, level: int, prescription: Prescription,
                 cutoff: int, tol: float | None = None,
                 scheme: str = SYMMETRIC) -> ShiftReport:
    """Second-order shift of the ground state under one prescription.

    Convergence is judged by the Cauchy residual |S_N - S_{N/2}|; a sum
    that fails the criterion is reported with converged=False rather than
    raised.  The converged flag also requires the symmetric scheme, which
    is the declared summation order of this artifact.
    """
    if level != 0:
        raise ValueError("second-order shifts are defined here for level 0 "
                         "(ground state of the one-particle sector)")
    if cutoff < 4:
        raise ValueError(f"cutoff must be >= 4, got {cutoff}")
    if scheme not in (SYMMETRIC, ASYMMETRIC):
        raise ValueError(f"unknown cutoff scheme {scheme!r}")
    prescription = Prescription(prescription)
    if tol is None:
        tol = _default_tol(cfg)
    t_pos, t_neg = _term_arrays(cfg, cutoff)
    sums = _partial_sums(t_pos, t_neg, prescription, scheme)
    residual = abs(float(sums[-1] - sums[cutoff // 2 - 1]))
    converged = bool(residual < tol and scheme == SYMMETRIC)
    name = prescription.value
    report = ShiftReport(
        config=cfg, level=level, cutoff=cutoff, tol=tol, scheme=scheme,
        w_first=first_order(cfg, level),
        w_second={name: float(sums[-1])},
        partial_sums={name: sums},
        cauchy_residual={name: residual},
        converged={name: converged},
        w_extrapolated=_tail_extrapolation(name, sums),
    )
    return report


def _tail_extrapolation(name: str, sums: np.ndarray) -> dict:
    """Richardson limit of the partial sums on the 1/N tail.

    The order is estimated empirically from the cutoffs (N/4, N/2, N); a
    non-geometric tail (e.g. the exactly cancelling Feynman sums, or any
    cutoff < 16) yields no extrapolation entry.
    """
    n = len(sums)
    if n < 16:
        return {}
    s4, s2, s1 = sums[n // 4 - 1], sums[n // 2 - 1], sums[-1]
    d1, d2 = s2 - s4, s1 - s2
    if d1 == 0.0 or d2 == 0.0 or (d1 / d2) <= 1.0:
        return {}
    p = math.log2(abs(d1 / d2))
    return {name: float(s1 + d2 / (2.0 ** p - 1.0))}


def compare(cfg: BagConfig, level: int, cutoff: int, tol: float | None = None,
            verdict_tol: float = 1.0e-8) -> ShiftReport:
    """Both prescriptions against the exact shift, with agreement verdicts."""
    rep_p = second_order(cfg, level, PAULI, cutoff, tol)
    rep_f = second_order(cfg, level, FEYNMAN, cutoff, tol)
    w_exact = shooting.exact_shift(cfg, level)
    w_second = {**rep_p.w_second, **rep_f.w_second}
    agreement = {k: abs(w - w_exact) for k, w in w_second.items()}
    return ShiftReport(
        config=cfg, level=level, cutoff=cutoff, tol=rep_p.tol, scheme=SYMMETRIC,
        w_first=rep_p.w_first,
        w_second=w_second,
        partial_sums={**rep_p.partial_sums, **rep_f.partial_sums},
        cauchy_residual={**rep_p.cauchy_residual, **rep_f.cauchy_residual},
        converged={**rep_p.converged, **rep_f.converged},
        w_extrapolated={**rep_p.w_extrapolated, **rep_f.w_extrapolated},
        w_exact=float(w_exact),
        agreement=agreement,
        matches_exact={k: bool(d < verdict_tol) for k, d in agreement.items()},
    )


def convergence_traces(cfg: BagConfig, cutoff: int, tol: float | None = None):
    """Partial-sum traces for both prescriptions and both cutoff schemes.

    Returns a list of dicts {prescription, scheme, cutoffs, partial_sums}
    ready for serialisation (the traces share the term arrays, so this
    costs one row computation).
    """
    if tol is None:
        tol = _default_tol(cfg)
    t_pos, t_neg = _term_arrays(cfg, cutoff)
    out = []
    for prescription in (FEYNMAN, PAULI):
        for scheme in (SYMMETRIC, ASYMMETRIC):
            if prescription is PAULI and scheme == ASYMMETRIC:
                continue  # the Pauli sum has no negative-index terms to split
            sums = _partial_sums(t_pos, t_neg, prescription, scheme)
            out.append({
                "prescription": prescription.value,
                "scheme": scheme,
                "cutoffs": np.arange(1, cutoff + 1),
                "partial_sums": sums,
                "cauchy_residual": abs(float(sums[-1] - sums[cutoff // 2 - 1])),
            })
    return out
