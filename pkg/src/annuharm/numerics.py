"""Shared numerical kernels.

Adaptive quadrature with integrable-endpoint handling, bracketed root
finding, scalar minimization by scan + golden section, an embedded
Runge-Kutta integrator with dense monotone-cubic output, and the
monotone-cubic interpolant itself.  Tolerances are absolute-error targets;
every routine either meets its target or raises.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import DivergentIntegral, NoBracket, NoConvergence, StepUnderflow

__all__ = [
    "Interpolant",
    "integrate_adaptive",
    "find_root_bracketed",
    "minimize_scalar",
    "ode_integrate",
]

_EPS = np.finfo(float).eps


class _ArrayFunc:
    """Adapter calling a scalar-or-vector callable on numpy arrays.

    The first array call probes whether the callable is numpy-aware; if not,
    evaluation falls back to a per-element loop.
    """

    def __init__(self, f: Callable[[float], float]):
        self._f = f
        self._vectorized: bool | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._vectorized is None or self._vectorized:
            try:
                y = np.asarray(self._f(x), dtype=float)
                if y.shape == x.shape:
                    self._vectorized = True
                    return y
            except (TypeError, ValueError):
                pass
            self._vectorized = False
        out = np.array([self._f(float(v)) for v in x.ravel()], dtype=float)
        return out.reshape(x.shape)

    def probe(self, x: float) -> float:
        """Single-point evaluation that maps arithmetic blowups to +inf."""
        try:
            return float(self._f(float(x)))
        except (ZeroDivisionError, OverflowError, FloatingPointError, ValueError):
            return math.inf
        except TypeError:
            try:
                return float(self(np.asarray([x]))[0])
            except (ZeroDivisionError, OverflowError, FloatingPointError,
                    ValueError):
                return math.inf


_GAUSS_LO = np.polynomial.legendre.leggauss(7)
_GAUSS_HI = np.polynomial.legendre.leggauss(15)

_MAX_PANELS = 1_000_000
_SINGULAR_OFFSET = 1e-12
_SINGULAR_MAGNITUDE = 1e6
# growth of the integrand toward an endpoint relative to the interior that
# also flags a singularity (catches integrable 1/sqrt blowups whose probe
# value stays just under the absolute threshold)
_SINGULAR_GROWTH = 1e4


def _panel(F: _ArrayFunc, lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    coarse = half * float(np.dot(_GAUSS_LO[1], F(mid + half * _GAUSS_LO[0])))
    fine = half * float(np.dot(_GAUSS_HI[1], F(mid + half * _GAUSS_HI[0])))
    return fine, abs(fine - coarse)


def _adaptive_core(F: _ArrayFunc, a: float, b: float, tol: float) -> float:
    """Globally adaptive bisection with a paired Gauss rule per panel.

    The panel with the worst error estimate is refined first, so sharp
    boundary layers cannot starve the error budget of the smooth remainder.
    """
    span = b - a
    floor_width = 1e-13 * span
    value, err = _panel(F, a, b)
    heap = [(-err, a, b, value)]
    refinable_err = err
    settled: list[tuple[float, float]] = []  # (value, err) at rounding floor
    settled_err = 0.0
    n_panels = 1
    while heap and refinable_err + settled_err > tol:
        neg_err, lo, hi, val = heapq.heappop(heap)
        worst = -neg_err
        refinable_err -= worst
        width = hi - lo
        if width < floor_width:
            if not np.isfinite(val):
                raise DivergentIntegral(
                    f"integrand not resolvable near [{lo}, {hi}]"
                )
            settled.append((val, worst))
            settled_err += worst
            continue
        mid = 0.5 * (lo + hi)
        for sub_lo, sub_hi in ((lo, mid), (mid, hi)):
            sub_val, sub_err = _panel(F, sub_lo, sub_hi)
            if not np.isfinite(sub_err):
                sub_err = math.inf
            heapq.heappush(heap, (-sub_err, sub_lo, sub_hi, sub_val))
            refinable_err += sub_err
        n_panels += 2
        if n_panels > _MAX_PANELS:
            raise NoConvergence(
                f"quadrature on [{a}, {b}] exceeded {_MAX_PANELS} panels"
            )
    total = math.fsum([v for v, _ in settled] + [entry[3] for entry in heap])
    if not np.isfinite(total):
        raise DivergentIntegral(f"integral over [{a}, {b}] is not finite")
    return total


def _divergence_guard(F: _ArrayFunc, endpoint: float, inward: float) -> None:
    """Reject endpoint singularities stronger than an integrable 1/sqrt.

    Checks the substitution-transformed integrand g(u) = 2 u f(endpoint +/-
    u^2) just off the endpoint; the probe offset is widened only as far as
    floating-point representability of endpoint + u^2 requires, keeping the
    acceptance threshold scale-equivalent to |g(1e-12)| <= 1e12.
    """
    u = max(_SINGULAR_OFFSET, math.sqrt(100.0 * _EPS * max(abs(endpoint), 1.0)))
    g = 2.0 * u * F.probe(endpoint + inward * u * u)
    if not np.isfinite(g) or abs(g) > 1.0 / u:
        raise DivergentIntegral(
            f"endpoint singularity at {endpoint} is not integrable"
        )


def _integrate_left_singular(F: _ArrayFunc, a: float, b: float, tol: float) -> float:
    _divergence_guard(F, a, +1.0)
    big = math.sqrt(b - a)
    transformed = _ArrayFunc(lambda u: 2.0 * u * F(a + u * u))
    return _adaptive_core(transformed, 0.0, big, tol)


def _integrate_right_singular(F: _ArrayFunc, a: float, b: float, tol: float) -> float:
    _divergence_guard(F, b, -1.0)
    big = math.sqrt(b - a)
    transformed = _ArrayFunc(lambda u: 2.0 * u * F(b - u * u))
    return _adaptive_core(transformed, 0.0, big, tol)


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    *,
    singular_left: bool | None = None,
    singular_right: bool | None = None,
) -> float:
    """Integrate f over [a, b] to absolute error tol.

    Endpoint singularities of integrable 1/sqrt type are detected
    automatically (or forced via the keyword flags) and removed by the
    substitution y = a + u^2 (resp. y = b - u^2).

    Raises NoConvergence when the panel budget is exhausted and
    DivergentIntegral when an endpoint blowup is too strong to integrate.
    """
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ValueError(f"need finite a < b, got [{a}, {b}]")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    F = _ArrayFunc(f)
    span = b - a

    if singular_left is None or singular_right is None:
        interior = max(
            1.0,
            abs(F.probe(a + 0.25 * span)),
            abs(F.probe(a + 0.5 * span)),
            abs(F.probe(b - 0.25 * span)),
        )

        def looks_singular(value: float) -> bool:
            return (
                not np.isfinite(value)
                or abs(value) > _SINGULAR_MAGNITUDE
                or abs(value) > _SINGULAR_GROWTH * interior
            )

        if singular_left is None:
            singular_left = looks_singular(F.probe(a + _SINGULAR_OFFSET))
        if singular_right is None:
            singular_right = looks_singular(F.probe(b - _SINGULAR_OFFSET))

    if singular_left and singular_right:
        mid = 0.5 * (a + b)
        return _integrate_left_singular(F, a, mid, 0.5 * tol) + \
            _integrate_right_singular(F, mid, b, 0.5 * tol)
    if singular_left:
        return _integrate_left_singular(F, a, b, tol)
    if singular_right:
        return _integrate_right_singular(F, a, b, tol)
    return _adaptive_core(F, a, b, tol)


def find_root_bracketed(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Root of f in [lo, hi] given a sign change.

    Bisection accelerated by secant steps; a secant step is taken only when
    it lands strictly inside the current bracket, and a plain bisection is
    forced whenever two consecutive steps fail to halve the bracket.  Stops
    when |f(x)| <= tol or the bracket width drops to tol.  Never evaluates f
    outside [lo, hi].
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    flo = float(f(lo))
    fhi = float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoBracket(f"f({lo})={flo} and f({hi})={fhi} have equal signs")

    stalls = 0
    while hi - lo > tol:
        width = hi - lo
        x = None
        if stalls < 2 and fhi != flo:
            secant = hi - fhi * (hi - lo) / (fhi - flo)
            inset = 0.01 * width
            if lo + inset < secant < hi - inset:
                x = secant
        if x is None:
            x = 0.5 * (lo + hi)
            stalls = 0
        fx = float(f(x))
        if abs(fx) <= tol or fx == 0.0:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        stalls = stalls + 1 if (hi - lo) > 0.5 * width else 0
    return 0.5 * (lo + hi)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Golden-section minimum of f on [lo, hi] to bracket width tol."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = float(f(x1))
    f2 = float(f(x2))
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = float(f(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = float(f(x2))
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minimize_scalar(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Global-scan minimization on [a, b]: 1024-point scan, then golden
    section around the scan winner.  Returns (argmin, min); endpoints are
    always among the candidates.
    """
    if b < a:
        raise ValueError("need a <= b")
    if b == a:
        return a, float(f(a))
    F = _ArrayFunc(f)
    xs = np.linspace(a, b, 1024)
    ys = F(xs)
    i = int(np.nanargmin(ys))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    gx, gy = _golden_section(lambda x: float(F(np.asarray([x]))[0]), lo, hi, tol)
    best_x, best_y = gx, gy
    for cx, cy in ((float(xs[i]), float(ys[i])), (a, float(ys[0])), (b, float(ys[-1]))):
        if cy < best_y:
            best_x, best_y = cx, cy
    return best_x, best_y


class Interpolant:
    """Monotone-cubic interpolant through strictly increasing knots.

    Evaluation reproduces knot values exactly, and strictly monotone data
    yields a monotone interpolant.  Without supplied derivatives the slopes
    are the shape-preserving harmonic means (pchip); with ``derivs`` the
    supplied slopes are used after Fritsch-Carlson limiting, which keeps the
    monotone guarantee while gaining an order of accuracy when the slopes
    are exact.
    """

    mode = "monotone-cubic"

    def __init__(self, knots, values, derivs=None):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
            raise ValueError("need matching 1-D knots/values with >= 2 points")
        if not np.all(np.diff(knots) > 0.0):
            raise ValueError("knots must be strictly increasing")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ValueError("knots and values must be finite")
        self.knots = knots
        self.values = values
        if derivs is None:
            self._spline = PchipInterpolator(knots, values, extrapolate=True)
        else:
            slopes = self._limited(knots, values, np.asarray(derivs, dtype=float))
            self._spline = CubicHermiteSpline(knots, values, slopes,
                                              extrapolate=True)

    @staticmethod
    def _limited(knots, values, derivs):
        """Fritsch-Carlson slope limiting for monotone data: each slope is
        boxed into [0, 3 min(adjacent secants)] (mirrored for decreasing
        data); mixed-sign data passes through unlimited."""
        if derivs.shape != knots.shape:
            raise ValueError("derivs must match knots in shape")
        secants = np.diff(values) / np.diff(knots)
        if np.all(secants >= 0.0):
            sign = 1.0
        elif np.all(secants <= 0.0):
            sign = -1.0
        else:
            return derivs
        mags = np.abs(secants)
        caps = 3.0 * np.minimum(np.concatenate(([mags[0]], mags)),
                                np.concatenate((mags, [mags[-1]])))
        return sign * np.clip(sign * derivs, 0.0, caps)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def __call__(self, x):
        y = self._spline(x)
        if np.ndim(y) == 0:
            # the right endpoint is the only knot the piecewise evaluation
            # does not reproduce bitwise; snap it to keep knot exactness
            if x == self.knots[-1]:
                return float(self.values[-1])
            return float(y)
        y = np.asarray(y)
        y[np.asarray(x) == self.knots[-1]] = self.values[-1]
        return y

    def __repr__(self):  # pragma: no cover - debugging aid
        lo, hi = self.domain
        return f"Interpolant({self.knots.size} knots on [{lo:g}, {hi:g}])"


# Dormand-Prince 5(4) tableau; fifth-order solution is propagated.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_ERR = _DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def ode_integrate(
    rhs: Callable[[float, float], float],
    y0: float,
    s0: float,
    s1: float,
    tol: float,
    max_step: float | None = None,
) -> Interpolant:
    """Integrate dy/ds = rhs(s, y) from s0 to s1 (either direction) with an
    embedded Runge-Kutta 5(4) pair under absolute per-step error control.

    Returns the accepted trajectory as a monotone-cubic Interpolant whose
    knots are the accepted steps (in increasing s).  Raises StepUnderflow
    when the controller is forced below 1e-14 of the span.
    """
    span = s1 - s0
    if span == 0.0:
        raise ValueError("s0 and s1 must differ")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    direction = math.copysign(1.0, span)
    h_cap = abs(span) if max_step is None else min(abs(max_step), abs(span))
    h = direction * min(h_cap, abs(span) / 50.0)
    min_h = 1e-14 * abs(span)

    s = float(s0)
    y = float(y0)
    knots = [s]
    values = [y]
    k = np.empty(7)
    while (s1 - s) * direction > 0.0:
        remaining = s1 - s
        if abs(remaining) <= min_h:
            # microscopic clamp remainder: close it with one Euler nubbin
            y += remaining * rhs(s, y)
            s = s1
            knots.append(s)
            values.append(y)
            break
        final = (s + h - s1) * direction >= 0.0
        if final:
            h = remaining
        bad = False
        k[0] = rhs(s, y)
        for i in range(1, 7):
            yi = y + h * float(np.dot(_DP_A[i], k[:i]))
            k[i] = rhs(s + _DP_C[i] * h, yi)
            if not math.isfinite(k[i]):
                bad = True
                break
        if not bad:
            y_new = y + h * float(np.dot(_DP_B5, k))
            err = abs(h * float(np.dot(_DP_ERR, k)))
            bad = not math.isfinite(y_new)
        if bad:
            h *= 0.5
            if abs(h) < min_h:
                raise StepUnderflow(
                    f"step {h:g} below resolvable scale near s={s:g}"
                )
            continue
        if err <= tol:
            s = s1 if final else s + h
            y = y_new
            knots.append(s)
            values.append(y)
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * (tol / err) ** 0.2)
            h = direction * min(h_cap, abs(h) * max(grow, 0.2))
        else:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            if abs(h) < min_h:
                raise StepUnderflow(
                    f"step {h:g} below resolvable scale near s={s:g}"
                )

    ks = np.asarray(knots)
    vs = np.asarray(values)
    if direction < 0:
        ks = ks[::-1]
        vs = vs[::-1]
    # collapse any numerically duplicated abscissae (can only come from a
    # final clamped step of rounding size)
    keep = np.concatenate(([True], np.diff(ks) > 0.0))
    return Interpolant(ks[keep], vs[keep])
