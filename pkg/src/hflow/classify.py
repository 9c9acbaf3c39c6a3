"""Potential-well membership, trajectory verdicts, decay fits and blow-up reports.

An initial datum is placed by comparing its energy E with the estimated
well depth d and reading the sign of the Nehari functional D:

    regime      sign of D        code     expected outcome
    E < d       D > 0            t21      global-decay
    E < d       D < 0            t22      blowup
    |E - d|     D >= 0           t31      global-decay
      <= tol    D < 0            t32      blowup
    E > d       high-energy inequality   t52      blowup
    E > d       D > 0, |u|_2 <= lambda^  t51.1    global-decay (heuristic)
    E > d       D < 0, |u|_2 >= Lambda^  t51.2    blowup (heuristic)

The codes are stable strings used in artifacts; lambda^ / Lambda^ are
sampled estimates, so verdicts that rely on them are flagged heuristic.
Critical-regime detection uses a relative tolerance since d itself carries
estimation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import functionals
from .flow import BLOWUP_SUSPECTED, TrajectoryRecord
from .grid import VectorField
from .nehari import WellParameters, delta_roots

SIGN_TOL_FACTOR = 1e-10  # |D_delta| below this times h1_sq counts as zero

GLOBAL_DECAY = "global-decay"
BLOWUP = "blowup"
UNDETERMINED = "undetermined"


@dataclass
class Verdict:
    energy_regime: str  # low | critical | high
    well: str  # W | V | boundary | outside
    applicable_theorem: str  # t21 | t22 | t31 | t32 | t51.1 | t51.2 | t52 | none
    expected_outcome: str  # global-decay | blowup | undetermined
    heuristic: bool = False
    details: dict = field(default_factory=dict)


@dataclass
class BlowupReport:
    suspected: bool
    t_last: float
    concavity_positive_from: int | None
    gradient_max: float


@dataclass
class DeltaSignReport:
    delta: float
    persistent: bool
    sign: int  # first nonzero sign along the trajectory (0 if never nonzero)
    first_violation: int | None


@dataclass
class DecayFit:
    rate: float
    bound_satisfied: bool | None
    n_fit: int


def check_e54(u0: VectorField, H: float):
    """High-energy blow-up inequality E(u0) <= |u0|_2 < -(1/3) H int u0 . u0x ^ u0y.

    Returns (satisfied, measurements).  The measurements include the split
    identity E + (1/3) H int(...) - D/2, which vanishes identically; when
    the inequality holds it forces D(u0) < 0.
    """
    rep = functionals.report(u0, H)
    b_coeff = 0.5 * (rep.nehari - rep.dirichlet)  # = H int u . u_x ^ u_y
    l2_norm = math.sqrt(rep.l2_sq)
    volume_bound = -b_coeff / 3.0
    satisfied = (rep.energy <= l2_norm) and (l2_norm < volume_bound)
    resid = rep.energy + b_coeff / 3.0 - 0.5 * rep.nehari
    scale = max(abs(rep.energy), abs(b_coeff) / 3.0, abs(rep.nehari) / 2.0, 1e-300)
    meas = {
        "energy": rep.energy,
        "l2_norm": l2_norm,
        "volume_bound": volume_bound,
        "nehari": rep.nehari,
        "identity_residual_rel": abs(resid) / scale,
    }
    return satisfied, meas


def delta_window(u0: VectorField, wp: WellParameters):
    """Roots (delta1, delta2) of the well-depth curve at level E(u0)."""
    e = functionals.energy_E(u0, wp.H)
    if not (0.0 < e <= wp.d):
        raise ValueError(f"delta window needs 0 < E(u0) <= d, got E={e}, d={wp.d}")
    return delta_roots(e, wp.d)


def classify_initial(
    u0: VectorField,
    wp: WellParameters,
    tol_d: float = 1e-3,
    lambda_bounds: tuple[float, float] | None = None,
) -> Verdict:
    """Verdict for an initial datum against the estimated well parameters.

    tol_d is the relative width of the critical band around d.
    lambda_bounds, when given, are sampled (lambda^, Lambda^) estimates used
    for the high-energy membership checks (flagged heuristic).
    """
    rep = functionals.report(u0, wp.H)
    e, dd = rep.energy, rep.nehari
    details: dict = {
        "energy": e,
        "nehari": dd,
        "dirichlet": rep.dirichlet,
        "l2_sq": rep.l2_sq,
        "d": wp.d,
        "tol_d": tol_d,
    }

    if rep.l2_sq == 0.0:
        details["note"] = "zero datum: stays zero for all time"
        return Verdict("low", "W", "none", GLOBAL_DECAY, details=details)

    tau = SIGN_TOL_FACTOR * rep.dirichlet
    band = tol_d * wp.d

    if 0.0 < e <= wp.d:
        d1, d2 = delta_roots(min(e, wp.d), wp.d)
        details["delta1"], details["delta2"] = d1, d2
    elif e <= 0.0:
        # nonpositive energy: the Nehari sign persists for every delta
        details["delta1"], details["delta2"] = 0.0, 1.5

    if e < wp.d - band:
        if dd > tau:
            return Verdict("low", "W", "t21", GLOBAL_DECAY, details=details)
        if dd < -tau:
            return Verdict("low", "V", "t22", BLOWUP, details=details)
        details["note"] = "D vanishes below the well depth (discretization boundary case)"
        return Verdict("low", "boundary", "none", UNDETERMINED, details=details)

    if abs(e - wp.d) <= band:
        if dd >= -tau:
            return Verdict("critical", "boundary", "t31", GLOBAL_DECAY, details=details)
        return Verdict("critical", "boundary", "t32", BLOWUP, details=details)

    # high energy
    e54_ok, e54_meas = check_e54(u0, wp.H)
    details["e54"] = e54_meas
    if e54_ok:
        return Verdict("high", "outside", "t52", BLOWUP, details=details)
    if lambda_bounds is not None:
        lam_hat, cap_hat = lambda_bounds
        details["lambda_hat"], details["Lambda_hat"] = lam_hat, cap_hat
        l2_norm = math.sqrt(rep.l2_sq)
        if dd > tau and l2_norm <= lam_hat:
            return Verdict("high", "outside", "t51.1", GLOBAL_DECAY, heuristic=True, details=details)
        if dd < -tau and l2_norm >= cap_hat:
            return Verdict("high", "outside", "t51.2", BLOWUP, heuristic=True, details=details)
    return Verdict("high", "outside", "none", UNDETERMINED, details=details)


def check_sign_persistence(tr: TrajectoryRecord, deltas=None) -> list[DeltaSignReport]:
    """Verify that sign(D_delta(u(t))) is constant along the recorded samples.

    Values within SIGN_TOL_FACTOR * h1_sq of zero are treated as signless
    and cannot break persistence.
    """
    if deltas is None:
        deltas = tr.delta_list
    reports = []
    tol = SIGN_TOL_FACTOR * tr.h1_sq
    for d in deltas:
        matches = [j for j, dl in enumerate(tr.delta_list) if dl == d]
        if not matches:
            raise ValueError(f"delta {d} was not monitored along this trajectory")
        series = tr.D_delta[:, matches[0]]
        signs = np.where(np.abs(series) <= tol, 0, np.sign(series)).astype(int)
        nonzero = signs[signs != 0]
        if nonzero.size == 0:
            reports.append(DeltaSignReport(d, True, 0, None))
            continue
        lead = int(nonzero[0])
        bad = np.nonzero(signs == -lead)[0]
        reports.append(
            DeltaSignReport(d, bad.size == 0, lead, int(bad[0]) if bad.size else None)
        )
    return reports


def fit_decay_rate(tr: TrajectoryRecord, delta1: float | None = None) -> DecayFit:
    """Least-squares decay rate of log |u|_2^2 and the pointwise decay bound.

    The fit runs over samples with l2_sq above 1e3 times the decay floor.
    When delta1 is given, bound_satisfied checks
    l2_sq(t) <= l2_sq(0) exp(-2 (1 - delta1) t) at every sample (the bound
    relies on the first Dirichlet eigenvalue of the unit square exceeding 1).
    """
    mask = tr.l2_sq > 1e3 * tr.params.decay_l2_floor
    if int(mask.sum()) < 2:
        raise ValueError("fit error: fewer than 2 samples above the decay floor")
    slope = np.polyfit(tr.t[mask], np.log(tr.l2_sq[mask]), 1)[0]
    bound = None
    if delta1 is not None:
        envelope = tr.l2_sq[0] * np.exp(-2.0 * (1.0 - delta1) * tr.t)
        bound = bool(np.all(tr.l2_sq <= envelope * (1.0 + 1e-12)))
    return DecayFit(rate=-float(slope), bound_satisfied=bound, n_fit=int(mask.sum()))


def blowup_report(tr: TrajectoryRecord) -> BlowupReport:
    """Blow-up evidence: stop cause, trailing concavity window, gradient peak."""
    conc = tr.concavity
    start = len(conc)
    for k in range(len(conc) - 1, -1, -1):
        if conc[k] > 0.0:
            start = k
        else:
            break
    return BlowupReport(
        suspected=tr.status == BLOWUP_SUSPECTED,
        t_last=float(tr.t[-1]),
        concavity_positive_from=None if start == len(conc) else start,
        gradient_max=float(np.max(tr.h1_sq)),
    )
