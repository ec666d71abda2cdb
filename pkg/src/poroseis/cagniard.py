"""Deformed-contour geometry in the complex horizontal-slowness plane.

For each wave the time-domain field at transverse slowness q is obtained by
deforming the horizontal-slowness integration path onto the curve where the
travel-time function

    T(gamma) = d_top * kappa_top(gamma) + d_bot * kappa_bottom(gamma)
               + i * gamma * x

is real and equal to the observation time t.  Here d_top is the path length
in the fluid measured vertically (the image depth z + h for the reflected
wave, the source height h for transmitted waves), d_bot the receiver depth
below the interface, and the kappas use the fictitious velocities
v/sqrt(1 + v^2 q^2) that fold the transverse direction into a plane problem.

Two pieces of the deformed path matter:

* the volume piece gamma(t, q) in the lower-right quadrant, starting at the
  saddle point -i*p0(q) at the fictitious arrival time and bending towards
  the real axis, and
* when the saddle slowness p0(q) exceeds the fastest slowness 1/v_max, a
  head piece upsilon(t, q) = -i*zeta running down the negative imaginary
  axis between the fastest branch point and the saddle.  It carries the
  refracted (head-wave) part of the field.

Everything upstream of the interface coefficients is geometry and lives
here: arrival times, window bounds in q at fixed t, and the contour points
with their time derivatives.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .branch_math import branch_sqrt, fictitious_velocity
from .errors import ConvergenceFailure, DomainError, RootNotFound
from .media import AcousticMedium, PoroelasticDerived

# Offsets below this fraction of the total vertical path have no usable head
# segment; the window formulas divide by x.
_MIN_HEAD_OFFSET = 1e-9
# Residual target of the volume-contour Newton solve, scaled by (1 + t).
_GAMMA_TOL = 1e-12
# Residual target of the head-segment solve, scaled by (1 + t).
_UPSILON_TOL = 1e-11


class WaveKind(enum.Enum):
    REFLECTED = "reflected"
    TRANSMITTED_PF = "transmitted_pf"
    TRANSMITTED_PS = "transmitted_ps"
    TRANSMITTED_S = "transmitted_s"


@dataclass(frozen=True)
class WaveBranch:
    kind: WaveKind
    v_top: float     # fluid sound speed, m/s
    v_bottom: float  # speed of the receiving branch, m/s (v_top when reflected)


def reflected_branch(acoustic: AcousticMedium) -> WaveBranch:
    return WaveBranch(WaveKind.REFLECTED, acoustic.v_plus, acoustic.v_plus)


def transmitted_branches(acoustic: AcousticMedium,
                         poro: PoroelasticDerived) -> dict[WaveKind, WaveBranch]:
    v = acoustic.v_plus
    return {
        WaveKind.TRANSMITTED_PF: WaveBranch(WaveKind.TRANSMITTED_PF, v, poro.v_pf),
        WaveKind.TRANSMITTED_PS: WaveBranch(WaveKind.TRANSMITTED_PS, v, poro.v_ps),
        WaveKind.TRANSMITTED_S: WaveBranch(WaveKind.TRANSMITTED_S, v, poro.v_s),
    }


@dataclass(frozen=True)
class Geometry:
    """Source-receiver layout relative to the interface plane z = 0."""

    h: float  # source height above the interface, m, > 0
    x: float  # horizontal offset, m, >= 0
    z: float  # receiver height, m (negative below the interface)
    r: float = field(init=False)  # image distance of the reflected wave, m

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError(f"source height must be positive, got {self.h}")
        if not self.x >= 0.0:
            raise ValueError(f"horizontal offset must be non-negative, got {self.x}")
        object.__setattr__(self, "r", math.hypot(self.x, self.z + self.h))


@dataclass(frozen=True)
class ArrivalTimes:
    """Wave-front timing of one branch at one geometry.

    When no head segment exists, t_h1, t_h2 and q_max are NaN.
    """

    t0: float           # volume-wave arrival, s
    head_exists: bool
    t_h1: float         # head-wave onset, s
    t_h2: float         # time at which the head segment is exhausted, s
    q_max: float        # largest transverse slowness with a head segment, s/m


@dataclass(frozen=True)
class ContourPoint:
    value: complex     # contour location in the q_x plane, s/m
    dt: complex        # time derivative of the location, s/m per s
    residual: float    # |T(value) - t| achieved by the solve, s


def _depths(geom: Geometry, branch: WaveBranch) -> tuple[float, float]:
    """Vertical path lengths (d_top, d_bot) with side checks."""
    if branch.kind is WaveKind.REFLECTED:
        if geom.z < 0.0:
            raise DomainError(
                f"reflected wave needs a receiver at z >= 0, got z={geom.z}")
        return geom.z + geom.h, 0.0
    if geom.z > 0.0:
        raise DomainError(
            f"transmitted wave needs a receiver at z <= 0, got z={geom.z}")
    return geom.h, -geom.z


def snell_time(xi, q, geom: Geometry, branch: WaveBranch):
    """Travel time of the broken ray crossing the interface at offset xi.

    Uses the fictitious velocities at transverse slowness q.  For the
    reflected wave the receiver is mirrored through the interface, which
    turns the bounce into the same two-leg form.
    """
    va = fictitious_velocity(branch.v_top, q)
    vb = fictitious_velocity(branch.v_bottom, q)
    xi = np.asarray(xi, dtype=float)
    d = abs(geom.z)
    t = np.hypot(xi, geom.h) / va + np.hypot(geom.x - xi, d) / vb
    if t.ndim == 0:
        return float(t)
    return t


def _xi_zero(q, geom: Geometry, branch: WaveBranch):
    """Interface crossing of the fastest broken ray.

    The one-way time is strictly convex in xi, so its derivative has exactly
    one root in [0, x].  A short bisection brackets it, then Newton steps on
    the slope finish the job (its derivative is the positive curvature, so
    the iteration cannot leave the bracket once close).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if geom.x == 0.0:
        return np.zeros_like(q)
    va = fictitious_velocity(branch.v_top, q)
    vb = fictitious_velocity(branch.v_bottom, q)
    h, d, x = geom.h, abs(geom.z), geom.x

    def slope(xi):
        return xi / (va * np.hypot(xi, h)) \
            - (x - xi) / (vb * np.hypot(x - xi, d))

    lo = np.zeros_like(q)
    hi = np.full_like(q, x)
    for _ in range(22):
        mid = 0.5 * (lo + hi)
        neg = slope(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    xi = 0.5 * (lo + hi)
    for _ in range(4):
        la = np.hypot(xi, h)
        lb = np.hypot(x - xi, d)
        g = xi / (va * la) - (x - xi) / (vb * lb)
        curv = h * h / (va * la ** 3) + d * d / (vb * lb ** 3)
        xi = np.clip(xi - g / curv, lo, hi)
    return xi


def _t0_vec(q, geom: Geometry, branch: WaveBranch):
    """Fictitious arrival time, vectorized over q."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if branch.kind is WaveKind.REFLECTED:
        return geom.r * np.sqrt(1.0 / branch.v_top ** 2 + q * q)
    return snell_time(_xi_zero(q, geom, branch), q, geom, branch)


def _p0_vec(q, geom: Geometry, branch: WaveBranch):
    """Saddle slowness p0(q): the contour leaves -i*p0 at the arrival time."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if branch.kind is WaveKind.REFLECTED:
        return (geom.x / geom.r) * np.sqrt(1.0 / branch.v_top ** 2 + q * q)
    xi0 = _xi_zero(q, geom, branch)
    va = fictitious_velocity(branch.v_top, q)
    return xi0 / (va * np.hypot(xi0, geom.h))


def fictitious_arrival(q: float, geom: Geometry, branch: WaveBranch) -> float:
    """Earliest time of the volume wave at transverse slowness q.

    The reflected wave has the closed image form r/V(q).  Transmitted waves
    minimize the two-leg travel time; the stationarity condition squares to
    a quartic in the crossing offset whose admissible root is computed by
    numpy.roots and checked against the original (unsquared) equation.

    Raises
    ------
    RootNotFound
        If no quartic root lies in [0, x] with a vanishing time slope.
    """
    _depths(geom, branch)
    if branch.kind is WaveKind.REFLECTED:
        return geom.r * math.sqrt(1.0 / branch.v_top ** 2 + q * q)
    if geom.x == 0.0:
        return float(snell_time(0.0, q, geom, branch))

    va = float(fictitious_velocity(branch.v_top, q))
    vb = float(fictitious_velocity(branch.v_bottom, q))
    sa, sb = 1.0 / va ** 2, 1.0 / vb ** 2
    x, h, d = geom.x, geom.h, abs(geom.z)
    coeffs = np.array([
        sa - sb,
        2.0 * x * (sb - sa),
        (x * x + d * d) * sa - (x * x + h * h) * sb,
        2.0 * x * h * h * sb,
        -x * x * h * h * sb,
    ])
    scale = max(abs(c) for c in coeffs)
    roots = np.roots(coeffs / scale)

    va_arr = fictitious_velocity(branch.v_top, q)
    vb_arr = fictitious_velocity(branch.v_bottom, q)
    best = None
    for root in roots:
        if abs(root.imag) > 1e-6 * max(x, 1.0):
            continue
        xi = float(root.real)
        if not -1e-9 * x <= xi <= x * (1.0 + 1e-9):
            continue
        xi = min(max(xi, 0.0), x)
        slope = xi / (va * math.hypot(xi, h)) \
            - (x - xi) / (vb * math.hypot(x - xi, d))
        if abs(slope) > 1e-6 * (1.0 / va + 1.0 / vb):
            continue
        t = float(snell_time(xi, q, geom, branch))
        if best is None or t < best:
            best = t
    del va_arr, vb_arr
    if best is None:
        raise RootNotFound(
            f"no stationary interface crossing in [0, {x}] for q={q}, "
            f"branch={branch.kind.value}")
    return best


def _head_time(q, geom: Geometry, branch: WaveBranch, v_max: float):
    """Onset time of the head segment at transverse slowness q."""
    d_top, d_bot = _depths(geom, branch)
    c1 = math.sqrt(max(1.0 / branch.v_top ** 2 - 1.0 / v_max ** 2, 0.0))
    c2 = math.sqrt(max(1.0 / branch.v_bottom ** 2 - 1.0 / v_max ** 2, 0.0))
    q = np.asarray(q, dtype=float)
    return d_top * c1 + d_bot * c2 + geom.x * np.sqrt(1.0 / v_max ** 2 + q * q)


def arrival_times(geom: Geometry, branch: WaveBranch, v_max: float) -> ArrivalTimes:
    """Compute the wave-front timing of one branch.

    The head segment exists when the saddle slowness at q = 0 exceeds the
    fastest slowness 1/v_max (post-critical geometry) and the offset is not
    degenerate.  q_max, the largest transverse slowness carrying a head
    segment, is found by bisection on the sign change of
    t0(q) - t_head(q); the closed critical-ray expression serves as a
    non-fatal cross-check.
    """
    d_top, d_bot = _depths(geom, branch)
    t0 = fictitious_arrival(0.0, geom, branch)
    p0 = float(_p0_vec(np.array([0.0]), geom, branch)[0])
    nan = float("nan")
    if geom.x < _MIN_HEAD_OFFSET * (d_top + d_bot) or p0 <= 1.0 / v_max:
        return ArrivalTimes(t0=t0, head_exists=False,
                            t_h1=nan, t_h2=nan, q_max=nan)

    c1 = math.sqrt(1.0 / branch.v_top ** 2 - 1.0 / v_max ** 2)
    c2 = math.sqrt(max(1.0 / branch.v_bottom ** 2 - 1.0 / v_max ** 2, 0.0))
    t_h1 = float(_head_time(0.0, geom, branch, v_max))

    # Critical-ray geometry: the head segment dies where the stationary ray
    # itself reaches the critical angle.
    denom = d_top / c1 + (d_bot / c2 if d_bot > 0.0 else 0.0)
    rad = (geom.x / denom) ** 2 - 1.0 / v_max ** 2
    if rad <= 0.0:
        raise ConvergenceFailure(t0, 0.0, branch.kind.value,
                                 "inconsistent head-segment gate")
    q_closed = math.sqrt(rad)

    # The time gap t0(q) - t_head(q) itself only touches zero at q_max (its
    # slope vanishes there too, because the stationary ray degenerates into
    # the critical one), so bisect the transversal form of the same
    # condition: saddle slowness minus the fastest branch-point slowness.
    def saddle_excess(q):
        return float(_p0_vec(np.array([q]), geom, branch)[0]) \
            - math.sqrt(1.0 / v_max ** 2 + q * q)

    hi = None
    cand = q_closed
    for _ in range(60):
        cand *= 1.25
        if saddle_excess(cand) < 0.0:
            hi = cand
            break
    if hi is None:
        warnings.warn(
            f"head-segment end bisection found no bracket near q={q_closed}; "
            f"falling back to the closed form", stacklevel=2)
        q_max = q_closed
    else:
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if saddle_excess(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        q_max = 0.5 * (lo + hi)
        if abs(q_max - q_closed) > 1e-6 * (q_closed + 1.0 / v_max):
            warnings.warn(
                f"head-segment end disagrees with the critical-ray form: "
                f"bisection {q_max}, closed {q_closed}", stacklevel=2)
    t_h2 = float(_head_time(q_max, geom, branch, v_max))
    return ArrivalTimes(t0=t0, head_exists=True, t_h1=t_h1, t_h2=t_h2, q_max=q_max)


def q0_of_t(t: float, geom: Geometry, branch: WaveBranch) -> float:
    """Upper bound of the volume window: the q with fictitious arrival t."""
    return _q0_scalar(t, geom, branch)


def _q0_scalar(t, geom, branch):
    if branch.kind is WaveKind.REFLECTED:
        rad = (t / geom.r) ** 2 - 1.0 / branch.v_top ** 2
        if rad < 0.0:
            raise DomainError(
                f"t={t} is before the reflected arrival {geom.r / branch.v_top}")
        return math.sqrt(rad)
    out = _q0_vec(np.array([t]), geom, branch)
    return float(out[0])


def _q0_vec(t, geom: Geometry, branch: WaveBranch):
    """Invert the fictitious arrival, vectorized over t > t0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if branch.kind is WaveKind.REFLECTED:
        rad = (t / geom.r) ** 2 - 1.0 / branch.v_top ** 2
        if np.any(rad < 0.0):
            bad = float(t[np.argmax(rad < 0.0)])
            raise DomainError(
                f"t={bad} is before the reflected arrival {geom.r / branch.v_top}")
        return np.sqrt(rad)

    t0 = float(_t0_vec(np.array([0.0]), geom, branch)[0])
    if np.any(t < t0):
        bad = float(t[np.argmax(t < t0)])
        raise DomainError(f"t={bad} is before the volume arrival {t0}")

    hi_val = max(2.0 / branch.v_bottom, 2.0 / branch.v_top)
    for _ in range(200):
        if np.all(_t0_vec(np.full(1, hi_val), geom, branch) >= t.max()):
            break
        hi_val *= 2.0
    else:
        raise ConvergenceFailure(float(t.max()), hi_val, branch.kind.value,
                                 "volume-window inversion found no upper bracket")

    def time_and_slope(q):
        # The crossing point is stationary in xi, so the arrival slope in q
        # needs no xi derivative.
        xi0 = _xi_zero(q, geom, branch)
        sa = np.sqrt(1.0 / branch.v_top ** 2 + q * q)
        sb = np.sqrt(1.0 / branch.v_bottom ** 2 + q * q)
        la = np.hypot(xi0, geom.h)
        lb = np.hypot(geom.x - xi0, abs(geom.z))
        return la * sa + lb * sb, q * (la / sa + lb / sb)

    # Newton on the arrival time, kept inside a shrinking bracket; the
    # arrival is increasing and convex in q, so steps from above converge
    # monotonically once the bracket is tight.
    lo = np.zeros_like(t)
    hi = np.full_like(t, hi_val)
    q0 = 0.5 * (lo + hi)
    tol = 1e-12 * np.maximum(t, 1e-300)
    for _ in range(80):
        f, df = time_and_slope(q0)
        f = f - t
        done = np.abs(f) <= tol
        if np.all(done):
            break
        lo = np.where(f < 0.0, q0, lo)
        hi = np.where(f > 0.0, q0, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(df > 0.0, f / np.maximum(df, 1e-300), 0.0)
        cand = q0 - step
        inside = (cand > lo) & (cand < hi) & np.isfinite(cand)
        q0 = np.where(done, q0, np.where(inside, cand, 0.5 * (lo + hi)))
    resid = np.abs(_t0_vec(q0, geom, branch) - t)
    if np.any(resid > 1e-9 * np.maximum(t, 1e-300)):
        i = int(np.argmax(resid))
        raise ConvergenceFailure(float(t[i]), float(q0[i]), branch.kind.value,
                                 f"window inversion residual {resid[i]:.3e}")
    return q0


def q1_of_t(t: float, geom: Geometry, branch: WaveBranch, v_max: float) -> float:
    """Upper bound of the head window: the q whose head onset equals t."""
    d_top, d_bot = _depths(geom, branch)
    if geom.x < _MIN_HEAD_OFFSET * (d_top + d_bot):
        raise DomainError("no head segment at (near) zero offset")
    c1 = math.sqrt(max(1.0 / branch.v_top ** 2 - 1.0 / v_max ** 2, 0.0))
    c2 = math.sqrt(max(1.0 / branch.v_bottom ** 2 - 1.0 / v_max ** 2, 0.0))
    rad = ((t - d_top * c1 - d_bot * c2) / geom.x) ** 2 - 1.0 / v_max ** 2
    if rad < -1e-14:
        raise DomainError(f"t={t} is before the head onset at zero slowness")
    return math.sqrt(max(rad, 0.0))


def volume_window(t: float, arrivals: ArrivalTimes, geom: Geometry,
                  branch: WaveBranch) -> tuple[float, float] | None:
    """Transverse-slowness window of the volume piece at time t, or None."""
    if t <= arrivals.t0:
        return None
    return 0.0, _q0_scalar(t, geom, branch)


def head_window(t: float, arrivals: ArrivalTimes, geom: Geometry,
                branch: WaveBranch, v_max: float) -> tuple[float, float] | None:
    """Transverse-slowness window of the head piece at time t, or None.

    Between the head onset and the volume arrival the window is
    (0, q1(t)); between the volume arrival and the head end it shrinks to
    (q0(t), q1(t)).
    """
    if not arrivals.head_exists:
        return None
    if t <= arrivals.t_h1 or t >= arrivals.t_h2:
        return None
    hi = q1_of_t(t, geom, branch, v_max)
    lo = 0.0 if t <= arrivals.t0 else _q0_scalar(t, geom, branch)
    if hi <= lo:
        return None
    return lo, hi


def phase_time(gamma_val, q, geom: Geometry, branch: WaveBranch):
    """Travel-time function T(gamma) whose level sets define the contours."""
    d_top, d_bot = _depths(geom, branch)
    va = fictitious_velocity(branch.v_top, np.asarray(q, dtype=float))
    vb = fictitious_velocity(branch.v_bottom, np.asarray(q, dtype=float))
    g = np.asarray(gamma_val, dtype=complex)
    out = d_top * branch_sqrt(1.0 / va ** 2 + g * g) + 1j * g * geom.x
    if d_bot != 0.0:
        out = out + d_bot * branch_sqrt(1.0 / vb ** 2 + g * g)
    if np.ndim(gamma_val) == 0 and np.ndim(q) == 0:
        return complex(out)
    return out


def gamma(t: float, q: float, geom: Geometry, branch: WaveBranch) -> ContourPoint:
    """Volume-contour point at (t, q), for t past the fictitious arrival."""
    t0q = float(_t0_vec(np.array([q]), geom, branch)[0])
    if t <= t0q:
        raise DomainError(
            f"t={t} is not past the fictitious arrival {t0q} at q={q}")
    val, dt, res = _gamma_vec(t, np.array([q], dtype=float), geom, branch)
    return ContourPoint(value=complex(val[0]), dt=complex(dt[0]),
                        residual=float(res[0]))


def _gamma_vec(t: float, q, geom: Geometry, branch: WaveBranch):
    """Volume-contour points for one time and an array of q, with d/dt.

    The reflected wave has a closed form.  Transmitted waves solve
    T(gamma) = t by damped Newton iteration seeded at the saddle-point
    expansion, with a planar residual search as a last resort.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    d_top, d_bot = _depths(geom, branch)
    x = geom.x

    if branch.kind is WaveKind.REFLECTED:
        va = fictitious_velocity(branch.v_top, q)
        r = geom.r
        rad = (t / r) ** 2 - 1.0 / va ** 2
        if np.any(rad <= 0.0):
            raise DomainError(
                f"volume contour requested before arrival at q={q[np.argmax(rad <= 0.0)]}")
        big_d = np.sqrt(rad)
        gam = -1j * (x * t / r ** 2) + (d_top / r) * big_d
        kap = (d_top * t / r ** 2) - 1j * (x / r) * big_d
        dgdt = kap / (r * big_d)
        resid = np.abs(phase_time(gam, q, geom, branch) - t)
        return gam, dgdt, resid

    va = fictitious_velocity(branch.v_top, q)
    vb = fictitious_velocity(branch.v_bottom, q)
    t0q = _t0_vec(q, geom, branch)
    if np.any(t <= t0q):
        raise DomainError(
            f"volume contour requested before arrival at q={q[np.argmax(t <= t0q)]}")
    p0 = _p0_vec(q, geom, branch)

    def t_func(g):
        return d_top * branch_sqrt(1.0 / va ** 2 + g * g) \
            + d_bot * branch_sqrt(1.0 / vb ** 2 + g * g) + 1j * g * x

    def t_slope(g):
        ka = branch_sqrt(1.0 / va ** 2 + g * g)
        kb = branch_sqrt(1.0 / vb ** 2 + g * g)
        return d_top * g / ka + d_bot * g / kb + 1j * x

    # Saddle-point seed: T is quadratic in (gamma + i*p0) near the saddle
    # with a real positive second derivative.
    ka0 = np.sqrt(1.0 / va ** 2 - p0 ** 2)
    kb0 = np.sqrt(1.0 / vb ** 2 - p0 ** 2)
    curv = d_top / (va ** 2 * ka0 ** 3) + d_bot / (vb ** 2 * kb0 ** 3)
    g = -1j * p0 + np.sqrt(2.0 * (t - t0q) / curv)

    tol = _GAMMA_TOL * (1.0 + abs(t))
    f = t_func(g) - t
    for _ in range(100):
        bad = (np.abs(f) > tol) | ~np.isfinite(f)
        if not np.any(bad):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(bad, f / t_slope(g), 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        g_new = g - step
        f_new = t_func(g_new) - t
        worse = bad & (np.abs(f_new) > np.abs(f))
        for _ in range(50):
            if not np.any(worse):
                break
            step = np.where(worse, 0.5 * step, step)
            g_new = np.where(worse, g - step, g_new)
            f_new = np.where(worse, t_func(g_new) - t, f_new)
            worse = worse & (np.abs(f_new) > np.abs(f))
        g = np.where(bad, g_new, g)
        f = np.where(bad, f_new, f)

    # Roots come in pairs (g, -conj(g)); keep the one in the right half.
    flip = g.real < -1e-13 * np.abs(g)
    if np.any(flip):
        g = np.where(flip, -np.conj(g), g)
        f = t_func(g) - t

    bad = (np.abs(f) > tol) | ~np.isfinite(f)
    for i in np.flatnonzero(bad):
        g[i] = _plane_search(
            lambda gc, i=i: complex(
                d_top * branch_sqrt(1.0 / float(va[i]) ** 2 + gc * gc)
                + d_bot * branch_sqrt(1.0 / float(vb[i]) ** 2 + gc * gc)
                + 1j * gc * x),
            t, complex(g[i]), tol, float(q[i]), branch)
    f = t_func(g) - t

    dgdt = 1.0 / t_slope(g)
    return g, dgdt, np.abs(f)


def _plane_search(t_scalar, t, center, tol, q, branch):
    """Shrinking 3x3 grid search for |T(gamma) - t| in the complex plane.

    Fallback when Newton stalls; slow but only visits isolated points.
    t_scalar maps a complex scalar to the travel time.
    """
    span = max(abs(center), 1e-6) * 0.5
    best = complex(center)
    best_val = abs(t_scalar(best) - t)
    for _ in range(220):
        improved = False
        for dre in (-span, 0.0, span):
            for dim in (-span, 0.0, span):
                cand = best + dre + 1j * dim
                if cand.real < 0.0:
                    continue
                val = abs(t_scalar(cand) - t)
                if val < best_val:
                    best, best_val = cand, val
                    improved = True
        if best_val <= tol:
            return best
        if not improved:
            span *= 0.5
            if span < 1e-25:
                break
    raise ConvergenceFailure(t, q, branch.kind.value,
                             f"volume contour stalled at residual {best_val:.3e}")


def upsilon(t: float, q: float, geom: Geometry, branch: WaveBranch,
            v_max: float) -> ContourPoint:
    """Head-segment point at (t, q): purely imaginary, travel time t.

    Valid only inside the head windows returned by head_window; elsewhere a
    DomainError is raised.
    """
    arr = arrival_times(geom, branch, v_max)
    window = head_window(t, arr, geom, branch, v_max)
    slack = 1e-12 * (1.0 + abs(q))
    if window is None or not window[0] - slack <= q <= window[1] + slack:
        raise DomainError(
            f"(t={t}, q={q}) is outside the head segment of {branch.kind.value}")
    val, dt, res = _upsilon_vec(t, np.array([q], dtype=float), geom, branch, v_max)
    return ContourPoint(value=complex(val[0]), dt=complex(dt[0]),
                        residual=float(res[0]))


def _upsilon_vec(t: float, q, geom: Geometry, branch: WaveBranch, v_max: float):
    """Head-segment points for one time and an array of q.

    Solves T(-i*zeta) = t for real zeta between the fastest branch point and
    the saddle slowness, where T is real and strictly increasing.  Newton
    with a bisection safeguard; the time derivative is -i/T'(zeta), whose
    negative imaginary part is asserted.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    d_top, d_bot = _depths(geom, branch)
    x = geom.x
    va = fictitious_velocity(branch.v_top, q)
    vb = fictitious_velocity(branch.v_bottom, q)
    tip = np.sqrt(1.0 / v_max ** 2 + q * q)
    p0 = _p0_vec(q, geom, branch)

    def t_of(zeta):
        pa = np.sqrt(np.maximum(1.0 / va ** 2 - zeta * zeta, 0.0))
        pb = np.sqrt(np.maximum(1.0 / vb ** 2 - zeta * zeta, 0.0))
        return d_top * pa + d_bot * pb + zeta * x

    def t_slope(zeta):
        pa = np.sqrt(np.maximum(1.0 / va ** 2 - zeta * zeta, 1e-300))
        pb = np.sqrt(np.maximum(1.0 / vb ** 2 - zeta * zeta, 1e-300))
        return x - d_top * zeta / pa - d_bot * zeta / pb

    lo = tip.copy()
    hi = p0.copy()
    zeta = 0.5 * (lo + hi)
    tol = _UPSILON_TOL * (1.0 + abs(t))
    f = t_of(zeta) - t
    for _ in range(100):
        bad = np.abs(f) > tol
        if not np.any(bad):
            break
        lo = np.where(bad & (f < 0.0), zeta, lo)
        hi = np.where(bad & (f > 0.0), zeta, hi)
        slope = t_slope(zeta)
        with np.errstate(divide="ignore", invalid="ignore"):
            znew = zeta - f / slope
        inside = (znew > lo) & (znew < hi) & (slope > 0.0)
        znew = np.where(bad & inside, znew, 0.5 * (lo + hi))
        zeta = np.where(bad, znew, zeta)
        f = t_of(zeta) - t

    resid = np.abs(f)
    if np.any(resid > tol):
        i = int(np.argmax(resid))
        raise ConvergenceFailure(t, float(q[i]), branch.kind.value,
                                 f"head segment stalled at residual {resid[i]:.3e}")
    slope = t_slope(zeta)
    if np.any(slope <= 0.0):
        i = int(np.argmax(slope <= 0.0))
        raise ConvergenceFailure(t, float(q[i]), branch.kind.value,
                                 "head segment hit a non-increasing travel time")
    val = -1j * zeta
    dt = -1j / slope
    return val, dt, resid
