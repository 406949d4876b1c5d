"""Construction of the energy-minimal radial map between annuli.

Given a radial density rho on the target annulus A(q, Q) and a domain
annulus A(r, 1), the minimizer is w(s e^{it}) = p(s) e^{it} where the
radial profile solves p'(s) = sqrt(p^2 + c/rho(p)) / s with p(1) = Q, and
the constant c is fixed by the modulus equation

    mu(c) := int_q^Q dy / sqrt(y^2 + c/rho(y)) = log(1/r).

mu is strictly decreasing in c and attains its largest (possibly infinite)
value at the critical constant c0 = -min_{[q,Q]} y^2 rho(y); domain annuli
fatter than r0 = exp(-mu(c0)) admit no radial minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BelowCritical,
    DivergentIntegral,
    DivergentModulus,
    NegativeRadicand,
    NoConvergence,
    OutOfDomain,
    ProfileMismatch,
)
from .metrics import RadialMetric, parse_metric
from .numerics import Interpolant, find_root_bracketed, integrate_adaptive, \
    minimize_scalar, ode_integrate

__all__ = [
    "CONFORMAL",
    "EXPANDING",
    "SUBCRITICAL",
    "CRITICAL",
    "ProblemSpec",
    "SolverConfig",
    "MinimizerProfile",
    "critical_constant",
    "modulus_of_c",
    "solve_c",
    "critical_inner_radius",
    "build_profile",
    "euclidean_nitsche_map",
]

CONFORMAL = "Conformal"
EXPANDING = "Expanding"
SUBCRITICAL = "Subcritical"
CRITICAL = "Critical"

_MODULUS_TOL = 1e-11
# relative closeness of c to the critical constant below which the modulus
# integrand must be treated as endpoint-singular
_NEAR_CRITICAL = 1e-6


@dataclass(frozen=True)
class ProblemSpec:
    """Normalized problem data: domain annulus A(r, 1), target annulus
    A(q, Q), radial metric on the target.

    Domain annuli A(r1, R1) with R1 != 1 are handled by the rescaling
    s -> s/R1 (which leaves the energy unchanged); pass r = r1/R1.
    """

    metric: RadialMetric
    q: float
    Q: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.q < self.Q:
            raise ValueError(f"need 0 < q < Q, got q={self.q}, Q={self.Q}")
        if not self.metric.contains(self.q, self.Q):
            raise OutOfDomain(
                f"target radii [{self.q}, {self.Q}] outside validity interval "
                f"{self.metric.valid_interval} of metric {self.metric.name!r}"
            )
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"need 0 < r < 1, got r={self.r}")


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and discretization sizes for the solver."""

    tol_c: float = 1e-9
    tol_quad: float = 1e-11
    tol_ode: float = 1e-10
    profile_knots: int = 512
    seed: int = 42

    def __post_init__(self):
        if min(self.tol_c, self.tol_quad, self.tol_ode) <= 0.0:
            raise ValueError("all tolerances must be positive")
        if self.profile_knots < 16:
            raise ValueError("profile_knots must be at least 16")


@dataclass(frozen=True)
class MinimizerProfile:
    """A solved radial minimizer.

    ``profile`` carries p on [r, 1], ``inverse`` its inverse on [q, Q];
    ``c`` is the variational constant of the modulus equation and
    ``critical_c`` the critical constant of the (q, Q, metric) triple.
    ``exact_radial``, when set, is a closed-form evaluator for p used by
    high-accuracy consumers.
    """

    c: float
    profile: Interpolant
    inverse: Interpolant
    classification: str
    spec: ProblemSpec
    critical_c: float
    exact_radial: Callable | None = field(default=None, compare=False)

    def slope(self, s):
        """p'(s) recomputed from the profile ODE right-hand side.

        Using the first integral instead of differentiating the interpolant
        keeps derived fields exactly consistent with the solved dynamics.
        """
        p = self.profile(s)
        radicand = np.maximum(p * p + self.c / self.spec.metric.eval(p), 0.0)
        out = np.sqrt(radicand) / np.asarray(s, dtype=float)
        return float(out) if np.ndim(out) == 0 else out


def _weight(metric: RadialMetric, y):
    return y * y * metric.eval(y)


def _critical_info(metric: RadialMetric, q: float, Q: float) -> tuple[float, float]:
    """(argmin, -min) of y^2 rho(y) on [q, Q]."""
    if not q < Q:
        raise OutOfDomain(f"need q < Q, got q={q}, Q={Q}")
    if not metric.contains(q, Q):
        raise OutOfDomain(
            f"[{q}, {Q}] outside validity interval of metric {metric.name!r}"
        )
    y_star, w_min = minimize_scalar(lambda y: _weight(metric, y), q, Q, 1e-13)
    return y_star, -w_min


def critical_constant(metric: RadialMetric, q: float, Q: float) -> float:
    """The most negative admissible variational constant,
    -min over [q, Q] of y^2 rho(y); always strictly negative."""
    return _critical_info(metric, q, Q)[1]


def modulus_of_c(
    metric: RadialMetric, q: float, Q: float, c: float, tol: float = _MODULUS_TOL
) -> float:
    """mu(c) = int_q^Q dy / sqrt(y^2 + c/rho(y)).

    At c equal (or nearly equal) to the critical constant the integrand has
    a 1/sqrt endpoint singularity which is removed by substitution; an
    interior zero of the radicand makes the integral diverge and raises
    DivergentModulus.
    """
    y_star, c_crit = _critical_info(metric, q, Q)
    scale = max(1.0, abs(c_crit))
    if c < c_crit - 1e-12 * scale:
        raise BelowCritical(
            f"c={c} below the critical constant {c_crit}", critical_c=c_crit
        )
    near_critical = (c - c_crit) <= _NEAR_CRITICAL * scale
    span = Q - q
    if near_critical and min(y_star - q, Q - y_star) > 1e-7 * span:
        raise DivergentModulus(
            f"radicand vanishes at interior radius {y_star}; modulus diverges"
        )

    def integrand(y):
        radicand = np.maximum(y * y + c / metric.eval(y), 0.0)
        with np.errstate(divide="ignore"):
            return 1.0 / np.sqrt(radicand)

    force_left = True if (near_critical and y_star - q <= 1e-7 * span) else None
    force_right = True if (near_critical and Q - y_star <= 1e-7 * span) else None
    try:
        return integrate_adaptive(
            integrand, q, Q, tol,
            singular_left=force_left, singular_right=force_right,
        )
    except (DivergentIntegral, NoConvergence) as exc:
        if near_critical:
            raise DivergentModulus(str(exc)) from exc
        raise


def critical_inner_radius(metric: RadialMetric, q: float, Q: float) -> float:
    """exp(-mu(c0)): domain annuli with r below this admit no radial
    minimizer.  Returns 0.0 when the critical modulus diverges (every
    domain annulus is then feasible)."""
    c_crit = critical_constant(metric, q, Q)
    try:
        return math.exp(-modulus_of_c(metric, q, Q, c_crit))
    except DivergentModulus:
        return 0.0


def solve_c(spec: ProblemSpec, config: SolverConfig = SolverConfig()) -> float:
    """Solve mu(c) = log(1/r) for the variational constant.

    Returns 0 for conformal pairs, the critical constant when the target
    modulus matches the critical modulus to tol_c, and raises BelowCritical
    when the domain annulus is fatter than the critical configuration.
    """
    metric, q, Q = spec.metric, spec.q, spec.Q
    target = math.log(1.0 / spec.r)
    mu = lambda c: modulus_of_c(metric, q, Q, c, tol=config.tol_quad)
    mu0 = mu(0.0)
    if abs(mu0 - target) <= config.tol_c:
        return 0.0
    if target < mu0:
        # expanding regime: c > 0 shrinks the modulus
        c_hi = 1.0
        while mu(c_hi) > target:
            c_hi *= 2.0
            if c_hi > 1e12:
                raise NoConvergence("could not bracket c upward")
        return find_root_bracketed(lambda c: mu(c) - target, 0.0, c_hi, config.tol_c)

    c_crit = critical_constant(metric, q, Q)
    try:
        mu_max = mu(c_crit)
    except DivergentModulus:
        mu_max = math.inf
    if target > mu_max + config.tol_c:
        raise BelowCritical(
            f"domain modulus {target:.12g} exceeds the critical modulus "
            f"{mu_max:.12g}; no radial minimizer exists",
            critical_c=c_crit,
            critical_r=math.exp(-mu_max),
        )
    if math.isfinite(mu_max) and abs(target - mu_max) <= config.tol_c:
        return c_crit
    eps = max(1e-12, 1e-12 * abs(c_crit))
    lo = c_crit + eps
    if mu(lo) < target:
        # target sits inside the sqrt-width collar around the critical
        # modulus that c-space cannot resolve; report the critical constant
        return c_crit
    return find_root_bracketed(lambda c: mu(c) - target, lo, 0.0, config.tol_c)


def _classify(c: float, c_crit: float, tol_c: float) -> str:
    if abs(c) <= tol_c:
        return CONFORMAL
    if c - c_crit <= tol_c:
        return CRITICAL
    if c > tol_c:
        return EXPANDING
    return SUBCRITICAL


def build_profile(
    spec: ProblemSpec, c: float, config: SolverConfig = SolverConfig()
) -> MinimizerProfile:
    """Integrate the profile ODE backward from p(1) = Q down to s = r and
    package the result (profile, inverse, classification).

    The square-root radicand is clamped at zero when the trajectory grazes
    the degenerate level; the clamp magnitude is audited afterwards.
    """
    metric, q, Q, r = spec.metric, spec.q, spec.Q, spec.r
    rho = metric.eval

    def rhs(s: float, p: float) -> float:
        radicand = p * p + c / float(rho(p))
        if radicand < 0.0:
            radicand = 0.0
        return math.sqrt(radicand) / s

    max_step = (1.0 - r) / max(config.profile_knots - 1, 15)
    path = ode_integrate(rhs, Q, 1.0, r, config.tol_ode, max_step=max_step)
    knots = path.knots.copy()
    values = path.values.copy()

    mismatch = abs(values[0] - q)
    if mismatch > 1e-6 * Q:
        raise ProfileMismatch(
            f"profile reached p(r)={values[0]:.12g}, expected q={q:.12g} "
            f"(off by {mismatch:.3g}); (q, Q, r, c) are inconsistent"
        )
    radicand = values * values + c / np.asarray(rho(values), dtype=float)
    clamp_bound = max(1e-10, 10.0 * config.tol_ode)
    worst = float(radicand.min())
    if worst < -clamp_bound:
        raise NegativeRadicand(
            f"radicand dipped to {worst:.3g}, beyond the clamp allowance "
            f"{clamp_bound:.3g}"
        )

    c_crit = critical_constant(metric, q, Q)
    classification = _classify(c, c_crit, config.tol_c)

    values[-1] = Q
    if classification == CRITICAL:
        # the exact critical profile touches q at s = r
        values[0] = q
        np.maximum(values, q, out=values)
    values = np.maximum.accumulate(values)

    def slopes_at(s, p):
        radicand = np.maximum(p * p + c / np.asarray(rho(p), dtype=float), 0.0)
        return np.sqrt(radicand) / s

    profile = Interpolant(knots, values, derivs=slopes_at(knots, values))
    inverse = _build_inverse(profile, slopes_at, max_step)

    return MinimizerProfile(
        c=c,
        profile=profile,
        inverse=inverse,
        classification=classification,
        spec=spec,
        critical_c=c_crit,
    )


def _build_inverse(profile: Interpolant, slopes_at, max_step: float) -> Interpolant:
    """Inverse interpolant consistent with the stored profile.

    The profile knots are augmented with a quadratically graded ladder near
    the inner boundary, where a critical profile flattens and the inverse
    derivative blows up; the graded knots keep the inverse's round trip with
    the profile at interpolation accuracy.
    """
    s_lo, s_hi = profile.domain
    width = min(0.25 * (s_hi - s_lo), 64.0 * max_step)
    ladder = s_lo + width * (np.arange(1, 160) / 160.0) ** 2
    s_all = np.unique(np.concatenate((profile.knots, ladder)))
    p_all = np.asarray(profile(s_all), dtype=float)
    rising = np.concatenate(([True], np.diff(p_all) > 0.0))
    s_all, p_all = s_all[rising], p_all[rising]
    dp = slopes_at(s_all, p_all)
    with np.errstate(divide="ignore"):
        inv_slopes = np.where(dp > 1e-30, 1.0 / np.maximum(dp, 1e-30), 1e30)
    return Interpolant(p_all, s_all, derivs=inv_slopes)


def euclidean_nitsche_map(r: float) -> MinimizerProfile:
    """The closed-form critical minimizer for the Euclidean metric:
    p(s) = (r^2 + s^2) / (s (1 + r^2)) between A(r, 1) and A(2r/(1+r^2), 1),
    with c = -4 r^2 / (1 + r^2)^2.  Built directly, without the solver."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"need 0 < r < 1, got r={r}")
    metric = parse_metric("euclidean")
    denom = 1.0 + r * r
    q = 2.0 * r / denom
    # -4 r^2/(1+r^2)^2 equals -q^2; computing it that way makes the radicand
    # vanish bitwise at the inner boundary
    c = -(q * q)
    spec = ProblemSpec(metric=metric, q=q, Q=1.0, r=r)

    def radial(s):
        s = np.asarray(s, dtype=float)
        out = (r * r + s * s) / (s * denom)
        return float(out) if out.ndim == 0 else out

    def slopes_at(s, p):
        radicand = np.maximum(p * p + c, 0.0)
        return np.sqrt(radicand) / s

    s_knots = np.linspace(r, 1.0, 1025)
    p_vals = np.asarray(radial(s_knots))
    p_vals[0] = q
    p_vals[-1] = 1.0
    profile = Interpolant(s_knots, p_vals, derivs=slopes_at(s_knots, p_vals))
    inverse = _build_inverse(profile, slopes_at, (1.0 - r) / 1024.0)
    return MinimizerProfile(
        c=c,
        profile=profile,
        inverse=inverse,
        classification=CRITICAL,
        spec=spec,
        critical_c=c,
        exact_radial=radial,
    )


_GAUSS_PANEL = np.polynomial.legendre.leggauss(14)


class ImplicitRadialProfile:
    """Machine-accuracy evaluation of the radial profile by inverting its
    first integral.

    p(s) is defined implicitly by Psi(p) = log(1/s) where Psi(p) =
    int_p^Q dy / sqrt(y^2 + c/rho(y)).  The integral is computed in the
    substituted variable u = sqrt(|y - anchor|) (anchor at the endpoint
    where the radicand can vanish), on a fixed graded composite Gauss grid,
    so evaluation is smooth in s and accurate to ~1e-13, which is what a
    finite-difference stencil on top of it needs.
    """

    def __init__(
        self,
        metric: RadialMetric,
        q: float,
        Q: float,
        c: float,
        n_panels: int = 64,
    ):
        self.metric = metric
        self.q = q
        self.Q = Q
        self.c = c
        y_star, _ = _critical_info(metric, q, Q)
        self._anchor_right = (Q - y_star) < 1e-9 * (Q - q)
        self._cap = math.sqrt(Q - q)

        # quadratically graded panel edges cluster toward the anchor (u = 0)
        k = np.arange(n_panels + 1, dtype=float) / n_panels
        self._edges = self._cap * k * k
        nodes01 = 0.5 * (_GAUSS_PANEL[0] + 1.0)
        weights01 = 0.5 * _GAUSS_PANEL[1]
        widths = np.diff(self._edges)
        panel_nodes = self._edges[:-1, None] + widths[:, None] * nodes01[None, :]
        panel_weights = widths[:, None] * weights01[None, :]
        vals = self._transformed(panel_nodes)
        panel_integrals = np.sum(panel_weights * vals, axis=1)
        if self._anchor_right:
            # Psi grows with u = sqrt(Q - p): prefix sums
            self._accum = np.concatenate(([0.0], np.cumsum(panel_integrals)))
        else:
            # Psi is the tail above u = sqrt(p - q): suffix sums
            self._accum = np.concatenate(
                (np.cumsum(panel_integrals[::-1])[::-1], [0.0])
            )
        self._nodes01 = nodes01
        self._weights01 = weights01

    def _transformed(self, u):
        """2 u g(y(u)) with g = 1/sqrt(y^2 + c/rho(y)); smooth through the
        anchor even when the radicand has a simple zero there."""
        u = np.asarray(u, dtype=float)
        y = (self.Q - u * u) if self._anchor_right else (self.q + u * u)
        radicand = np.maximum(y * y + self.c / self.metric.eval(y), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2.0 * u / np.sqrt(radicand)
        return np.where(radicand > 0.0, out, 0.0)

    def _psi_of_u(self, u):
        """Psi at profile radii parameterized by u (vectorized)."""
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(self._edges, u, side="right") - 1, 0,
                      len(self._edges) - 2)
        if self._anchor_right:
            base = self._accum[idx]
            lo = self._edges[idx]
            span = u - lo
            nodes = lo[..., None] + span[..., None] * self._nodes01
        else:
            base = self._accum[idx + 1]
            hi = self._edges[idx + 1]
            span = hi - u
            nodes = u[..., None] + span[..., None] * self._nodes01
        partial = np.sum(self._weights01 * self._transformed(nodes), axis=-1) * span
        return base + partial

    def total_modulus(self) -> float:
        end = self._cap if self._anchor_right else 0.0
        return float(self._psi_of_u(np.asarray(end)))

    def p_of_s(self, s):
        """Profile radii for domain radii s (scalar or array)."""
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        # clamp into the attainable range so rounding at s = r (where the
        # target meets the total modulus) cannot push the root off the grid
        target = np.clip(-np.log(s), 0.0, self.total_modulus())
        lo = np.zeros_like(target)
        hi = np.full_like(target, self._cap)
        sign = 1.0 if self._anchor_right else -1.0
        h_lo = self._psi_of_u(lo) - target
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            h_mid = self._psi_of_u(mid) - target
            go_right = np.sign(h_mid) == np.sign(h_lo)
            lo = np.where(go_right, mid, lo)
            h_lo = np.where(go_right, h_mid, h_lo)
            hi = np.where(go_right, hi, mid)
        u = 0.5 * (lo + hi)
        for _ in range(6):
            slope = sign * self._transformed(u)
            usable = np.abs(slope) > 1e-300
            denom = np.where(usable, slope, 1.0)
            step = np.where(usable, (self._psi_of_u(u) - target) / denom, 0.0)
            u = np.clip(u - step, 0.0, self._cap)
        p = (self.Q - u * u) if self._anchor_right else (self.q + u * u)
        return float(p[0]) if scalar else p


def precise_radial_map(profile: MinimizerProfile) -> Callable:
    """Best-available radial evaluator for a profile: the closed form when
    one exists, otherwise implicit-quadrature inversion of the first
    integral."""
    if profile.exact_radial is not None:
        return profile.exact_radial
    spec = profile.spec
    if profile.c == 0.0:
        # conformal pairs have the exact linear profile for any density
        return lambda s: spec.Q * np.asarray(s, dtype=float)
    implicit = ImplicitRadialProfile(spec.metric, spec.q, spec.Q, profile.c)
    return implicit.p_of_s
