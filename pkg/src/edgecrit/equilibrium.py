"""One-interval equilibrium measure, deformation measures, and critical constants.

All structural quantities (support endpoints, the edge polynomials h0, h1, h2,
masses, log-potentials) are computed by exact polynomial algebra:

* h0 is the polynomial part at infinity of V0'(z)/R(z),
* h1, h2 are the polynomial parts at infinity of R(z)*Vj'(z),

with R(z) = ((z-a)(z-b))^{1/2}.  Principal-value and log-kernel quadratures
exist only as independent test oracles; nothing in this module integrates
numerically except the Gauss-Chebyshev sums, which are exact for polynomial
numerators against the 1/sqrt endpoint weight.

Sign conventions (+ boundary values from the upper half plane):
    rho0(x)  = h0(x) sqrt((x-a)(b-x)) / (2 pi)
    psi_j(x) = -h_j(x) / (2 pi sqrt((x-a)(b-x)))      j = 1, 2
so the deformed density is rho0 + s*psi1 + t*psi2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (AssumptionViolated, DegenerateInterval, NoConvergence,
                     OutOfSupport)
from .potentials import DeformedFamily, Polynomial


@dataclass(frozen=True)
class SupportInterval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DegenerateInterval(f"need a < b, got ({self.a}, {self.b})")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def radius(self) -> float:
        return 0.5 * (self.b - self.a)


@dataclass(frozen=True)
class CriticalConstants:
    c: float
    c1: float
    c2: float


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float


@dataclass
class AssumptionReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {c.name: {"passed": c.passed, "residual": c.residual}
                for c in self.checks}


@dataclass
class VariationalReport:
    ell: float
    max_interior_deviation: float
    exterior_gaps: dict[float, float]   # x -> E(x) - ell (must be < 0)

    @property
    def exterior_ok(self) -> bool:
        return all(g < 0 for g in self.exterior_gaps.values())


# ---------------------------------------------------------------------------
# exact angular moments:  (1/pi) Int_0^pi p(m + r cos(phi)) cos(k phi) dphi
# ---------------------------------------------------------------------------

def _binom_frac(n: int, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


def _cos_power_coeff(j: int, k: int) -> Fraction:
    """(1/pi) Int_0^pi cos^j(phi) cos(k phi) dphi, exact."""
    if k > j or (j - k) % 2 == 1:
        return Fraction(0)
    half = (j - k) // 2
    return _binom_frac(j, half) / Fraction(2 ** j) * (1 if k == 0 else 1)


def angular_moment(poly: Polynomial, m: Fraction, r: Fraction, k: int = 0) -> Fraction:
    """(1/pi) Int_0^pi poly(m + r cos phi) cos(k phi) dphi, exact rationals."""
    shifted = poly.shift(m)          # q(w) with q(w) = poly(m + w)
    total = Fraction(0)
    for j, q in enumerate(shifted.coeffs):
        if q == 0:
            continue
        total += q * (r ** j) * _cos_power_coeff(j, k)
    return total


def poly_to_cheb(poly_in_w: Polynomial) -> list[Fraction]:
    """Chebyshev coefficients c_k with poly(w) = sum c_k T_k(w), exact."""
    d = poly_in_w.degree
    out = []
    for k in range(d + 1):
        ck = Fraction(0)
        for j, q in enumerate(poly_in_w.coeffs):
            ck += q * _cos_power_coeff(j, k)
        if k > 0:
            ck *= 2
        out.append(ck)
    return out


# ---------------------------------------------------------------------------
# support endpoints
# ---------------------------------------------------------------------------

def _moment_conditions(v0: Polynomial, m: Fraction, r: Fraction) -> tuple[Fraction, Fraction]:
    """One-cut endpoint conditions in normalized form (both must be 0).

    F1 = (1/pi) Int V0'(u) / sqrt((u-a)(b-u)) du
    F2 = (1/pi) Int u V0'(u) / sqrt((u-a)(b-u)) du - 2
    """
    vp = v0.derivative()
    f1 = angular_moment(vp, m, r)
    u_vp = Polynomial([0, 1]) * vp
    f2 = angular_moment(u_vp, m, r) - 2
    return f1, f2


def solve_support(v0: Polynomial, guess: SupportInterval,
                  tol: float = 1e-15, max_iter: int = 400) -> SupportInterval:
    """Solve the two one-cut moment conditions for the support by damped Newton.

    Works in midpoint/radius coordinates with the moment integrals and the
    Jacobian as exact polynomial expressions, evaluated in 70-digit
    arithmetic.  At a 5/2-critical right edge the root is degenerate in the
    b-direction (the conditions flatten to cubic order there), so Newton
    degrades to a linear 2/3-rate; high precision removes the residual floor
    and a step-size stopping rule controls the endpoint error directly.
    """
    import mpmath as _mp

    vp = v0.derivative()
    vpp = vp.derivative()
    u_vp = Polynomial([0, 1]) * vp
    d_u_vp = u_vp.derivative()

    def conditions(mf: Fraction, rf: Fraction):
        f1 = angular_moment(vp, mf, rf)
        f2 = angular_moment(u_vp, mf, rf) - 2
        return f1, f2

    with _mp.workdps(70):
        m = _mp.mpf(0.5) * (_mp.mpf(guess.a) + _mp.mpf(guess.b))
        r = _mp.mpf(0.5) * (_mp.mpf(guess.b) - _mp.mpf(guess.a))
        small_steps = 0
        for _ in range(max_iter):
            if r < 1e-12:
                raise DegenerateInterval("support radius collapsed during Newton")
            mf, rf = _frac(m), _frac(r)
            f1, f2 = conditions(mf, rf)
            f1, f2 = _mp.mpf(f1.numerator) / f1.denominator, _mp.mpf(f2.numerator) / f2.denominator
            j11 = _mpf_of(angular_moment(vpp, mf, rf))
            j12 = _mpf_of(angular_moment(vpp, mf, rf, k=1))
            j21 = _mpf_of(angular_moment(d_u_vp, mf, rf))
            j22 = _mpf_of(angular_moment(d_u_vp, mf, rf, k=1))
            det = j11 * j22 - j12 * j21
            if det == 0:
                raise NoConvergence("singular Jacobian in support Newton")
            dm = -(j22 * f1 - j12 * f2) / det
            dr = -(-j21 * f1 + j11 * f2) / det
            lam = _mp.mpf(1)
            while r + lam * dr <= 0:
                lam *= 0.5
                if lam < 1e-3:
                    raise DegenerateInterval("radius update collapsed")
            base = abs(f1) + abs(f2)
            while lam >= 1 / 64:
                g1, g2 = conditions(_frac(m + lam * dm), _frac(r + lam * dr))
                if abs(_mpf_of(g1)) + abs(_mpf_of(g2)) < base:
                    break
                lam *= 0.5
            m += lam * dm
            r += lam * dr
            step = abs(lam * dm) + abs(lam * dr)
            if step < tol * (1 + abs(m) + abs(r)):
                small_steps += 1
                if small_steps >= 2:
                    return SupportInterval(float(m - r), float(m + r))
            else:
                small_steps = 0
    raise NoConvergence(f"support Newton did not reach step tolerance {tol}")


def _frac(x) -> Fraction:
    """Exact rational value of an mpmath mpf (or anything Fraction accepts)."""
    if hasattr(x, "_mpf_"):
        sign, man, exp, _ = x._mpf_
        val = Fraction(-man if sign else man)
        return val * Fraction(2) ** exp
    return Fraction(x)


def _mpf_of(fr: Fraction):
    import mpmath as _mp
    return _mp.mpf(fr.numerator) / fr.denominator


# ---------------------------------------------------------------------------
# edge polynomials h0, h1, h2
# ---------------------------------------------------------------------------

def _sqrt_series_coeffs(kmax: int, inverse: bool) -> list[Fraction]:
    """Coefficients of (1 - x)^(+-1/2) = sum_k gamma_k x^k, exact."""
    out = []
    for k in range(kmax + 1):
        central = _binom_frac(2 * k, k)
        if inverse:
            out.append(central / Fraction(4 ** k))               # (1-x)^{-1/2}
        else:
            out.append(-central / Fraction(4 ** k * (2 * k - 1)))  # (1-x)^{+1/2}
    return out


def _poly_part(v_prime: Polynomial, support: SupportInterval, inverse: bool) -> Polynomial:
    """Polynomial part at infinity of V'(z)/R(z) (inverse) or R(z)V'(z)."""
    m = Fraction(support.midpoint)
    r2 = Fraction(support.radius) ** 2
    p = v_prime.shift(m)          # p(w) = V'(m + w)
    d = p.degree
    kmax = (d + 1) // 2 + 1
    gam = _sqrt_series_coeffs(kmax, inverse)
    base_pow = -1 if inverse else 1
    out = [Fraction(0)] * (d + 2)
    for j, pj in enumerate(p.coeffs):
        if pj == 0:
            continue
        for k in range(kmax + 1):
            e = j + base_pow - 2 * k
            if e >= 0:
                out[e] += pj * gam[k] * (r2 ** k)
    return Polynomial(out).shift(Fraction(-m))  # back to the x variable


def compute_h0(v0: Polynomial, support: SupportInterval) -> Polynomial:
    """Edge polynomial of the base measure: dnu0 = h0(x) sqrt((x-a)(b-x)) dx / 2pi."""
    return _poly_part(v0.derivative(), support, inverse=True)


def compute_hj(vj: Polynomial, support: SupportInterval) -> Polynomial:
    """Edge polynomial of a deformation direction (polynomial part of R*Vj')."""
    return _poly_part(vj.derivative(), support, inverse=False)


# ---------------------------------------------------------------------------
# equilibrium data and pointwise densities
# ---------------------------------------------------------------------------

@dataclass
class EquilibriumData:
    support: SupportInterval
    h0: Polynomial
    h1: Polynomial
    h2: Polynomial
    family: Optional[DeformedFamily] = None
    ell: Optional[float] = None

    def sqrt_map(self, x: float) -> complex:
        """Boundary value R_+(x) = i sqrt((x-a)(b-x)) on (a, b)."""
        a, b = self.support.a, self.support.b
        if not a < x < b:
            raise OutOfSupport(f"{x} outside ({a}, {b})")
        return 1j * math.sqrt((x - a) * (b - x))

    def rho0(self, x: float) -> float:
        a, b = self.support.a, self.support.b
        if not a < x < b:
            raise OutOfSupport(f"{x} outside ({a}, {b})")
        return self.h0(float(x)) * math.sqrt((x - a) * (b - x)) / (2 * math.pi)

    def psi_j(self, j: int, x: float) -> float:
        a, b = self.support.a, self.support.b
        if not a < x < b:
            raise OutOfSupport(f"{x} outside ({a}, {b})")
        hj = self.h1 if j == 1 else self.h2
        return -hj(float(x)) / (2 * math.pi * math.sqrt((x - a) * (b - x)))


def density(eq: EquilibriumData, s: float, t: float, x: float) -> float:
    """Deformed equilibrium density at x in (a, b); may be negative."""
    val = eq.rho0(x)
    if s:
        val += s * eq.psi_j(1, x)
    if t:
        val += t * eq.psi_j(2, x)
    return val


def build_equilibrium(family: DeformedFamily,
                      guess: Optional[SupportInterval] = None) -> EquilibriumData:
    """Full pipeline: support endpoints, then h0, h1, h2."""
    if guess is None:
        guess = SupportInterval(-3.0, 3.0)
    sup = solve_support(family.v0, guess)
    return EquilibriumData(
        support=sup,
        h0=compute_h0(family.v0, sup),
        h1=compute_hj(family.v1, sup),
        h2=compute_hj(family.v2, sup),
        family=family,
    )


# ---------------------------------------------------------------------------
# Gauss-Chebyshev moments of the deformed measure
# ---------------------------------------------------------------------------

def measure_moments(eq: EquilibriumData, s: float, t: float,
                    n_nodes: int = 0) -> tuple[float, float]:
    """Mass and first moment of the deformed measure by Gauss-Chebyshev.

    The integrand has polynomial numerator over the 1/sqrt endpoint weight,
    so the quadrature is exact once n_nodes exceeds half the degree.
    """
    m, r = eq.support.midpoint, eq.support.radius
    deg = max(eq.h0.degree + 3, eq.h1.degree, eq.h2.degree) + 2
    n = n_nodes or max(2 * deg, 16)
    phi = (2 * np.arange(1, n + 1) - 1) * math.pi / (2 * n)
    u = m + r * np.cos(phi)
    h0u = np.polyval(eq.h0.float_coeffs()[::-1], u)
    h1u = np.polyval(eq.h1.float_coeffs()[::-1], u)
    h2u = np.polyval(eq.h2.float_coeffs()[::-1], u)
    a, b = eq.support.a, eq.support.b
    numer = h0u * (u - a) * (b - u) - s * h1u - t * h2u
    mass = numer.sum() / (2 * n)
    first = (u * numer).sum() / (2 * n)
    return float(mass), float(first)


# ---------------------------------------------------------------------------
# critical constants
# ---------------------------------------------------------------------------

def constants(eq: EquilibriumData) -> CriticalConstants:
    """Edge scaling constant and the two parameter rescalings.

    c  = ((15/2) h0''(b) sqrt(b-a))^{2/7}
    c1 = h1(b) / (c^{1/2} (b-a)^{1/2})
    c2 = -h2'(b) / (c^{3/2} (b-a)^{1/2})
    """
    b = eq.support.b
    width = eq.support.b - eq.support.a
    h0pp_b = eq.h0.derivative().derivative()(float(b))
    if h0pp_b <= 0:
        raise AssumptionViolated(f"h0''(b) = {h0pp_b} <= 0: edge is not 5/2-critical")
    c = (7.5 * h0pp_b * math.sqrt(width)) ** (2.0 / 7.0)
    c1 = eq.h1(float(b)) / (math.sqrt(c) * math.sqrt(width))
    c2 = -eq.h2.derivative()(float(b)) / (c ** 1.5 * math.sqrt(width))
    return CriticalConstants(c=c, c1=c1, c2=c2)


# ---------------------------------------------------------------------------
# assumption verification
# ---------------------------------------------------------------------------

def verify_assumptions(family: DeformedFamily, eq: EquilibriumData,
                       tol: float = 1e-10, interior_samples: int = 400) -> AssumptionReport:
    """Check the structural edge assumptions and the critical condition.

    Failures are reported, never raised.
    """
    rep = AssumptionReport()
    a, b = eq.support.a, eq.support.b
    m, r = eq.support.midpoint, eq.support.radius

    h0a = eq.h0(float(a))
    rep.checks.append(CheckResult("h0(a) > 0", h0a > tol, h0a))
    h0b = eq.h0(float(b))
    rep.checks.append(CheckResult("h0(b) = 0", abs(h0b) < tol, abs(h0b)))
    h0pb = eq.h0.derivative()(float(b))
    rep.checks.append(CheckResult("h0'(b) = 0", abs(h0pb) < tol, abs(h0pb)))
    h0ppb = eq.h0.derivative().derivative()(float(b))
    rep.checks.append(CheckResult("h0''(b) > 0", h0ppb > tol, h0ppb))

    # critical condition: Int sqrt((u-a)/(b-u)) V2'(u) du = 0
    # integrand = (u-a) V2'(u) / sqrt((u-a)(b-u)): exact Gauss-Chebyshev
    v2p = family.v2.derivative()
    integrand = Polynomial([-Fraction(a), 1]) * v2p
    crit = math.pi * float(angular_moment(integrand, Fraction(m), Fraction(r)))
    rep.checks.append(CheckResult("critical condition integral = 0",
                                  abs(crit) < max(tol, 1e-12), abs(crit)))

    for j, name in ((1, "nu1"), (2, "nu2")):
        hj = eq.h1 if j == 1 else eq.h2
        zm = float(angular_moment(hj, Fraction(m), Fraction(r))) / 2.0
        rep.checks.append(CheckResult(f"{name} zero mass", abs(zm) < tol, abs(zm)))

    xs = np.linspace(a, b, interior_samples + 2)[1:-1]
    vals = np.array([eq.rho0(float(x)) for x in xs])
    min_rho = float(vals.min())
    rep.checks.append(CheckResult("rho0 > 0 on interior", min_rho > 0, min_rho))
    return rep


# ---------------------------------------------------------------------------
# logarithmic potential (closed Chebyshev form) and variational conditions
# ---------------------------------------------------------------------------

def _measure_cheb_coeffs(eq: EquilibriumData, s: float, t: float) -> np.ndarray:
    """Cosine coefficients g_k of 2*pi * dnu_{s,t}/dphi under u = m + r cos(phi).

    dnu = (1/2pi)[h0(u) r^2 sin^2(phi) - (s h1 + t h2)(u)] dphi.
    Returns float coefficients of the finite expansion sum g_k cos(k phi).
    """
    m, rr = Fraction(eq.support.midpoint), Fraction(eq.support.radius)
    # polynomial in w = cos(phi):  h0(m + r w) * r^2 (1 - w^2)
    h0w = eq.h0.shift(m)
    h0w = Polynomial([c * rr ** j for j, c in enumerate(h0w.coeffs)])
    part0 = h0w * Polynomial([rr ** 2]) * Polynomial([1, 0, -1])
    coeffs = [float(c) for c in poly_to_cheb(part0)]
    for hj, coef in ((eq.h1, s), (eq.h2, t)):
        if coef == 0.0:
            continue
        hw = hj.shift(m)
        hw = Polynomial([c * rr ** j for j, c in enumerate(hw.coeffs)])
        cj = poly_to_cheb(hw)
        for k, c in enumerate(cj):
            while len(coeffs) <= k:
                coeffs.append(0.0)
            coeffs[k] -= coef * float(c)
    return np.array(coeffs)


def _log_kernel_integrals(xhat: float, kmax: int) -> np.ndarray:
    """I_k = Int_0^pi cos(k phi) log|xhat - cos(phi)| dphi for k = 0..kmax."""
    out = np.empty(kmax + 1)
    if abs(xhat) <= 1.0:
        theta = math.acos(min(1.0, max(-1.0, xhat)))
        out[0] = -math.pi * math.log(2.0)
        for k in range(1, kmax + 1):
            out[k] = -math.pi * math.cos(k * theta) / k
    else:
        ax = abs(xhat)
        rho = ax + math.sqrt(ax * ax - 1.0)
        sign = 1.0 if xhat > 0 else -1.0
        out[0] = math.pi * math.log(rho / 2.0)
        p = 1.0
        for k in range(1, kmax + 1):
            p /= rho
            out[k] = -math.pi * (sign ** k) * p / k
    return out


def log_potential(eq: EquilibriumData, s: float, t: float, x: float) -> float:
    """Int log|x - u| dnu_{s,t}(u), exact Chebyshev closed form."""
    g = _measure_cheb_coeffs(eq, s, t)
    m, r = eq.support.midpoint, eq.support.radius
    xhat = (x - m) / r
    I = _log_kernel_integrals(xhat, len(g) - 1)
    mass = g[0] / 2.0  # (1/2pi) * g0 * pi
    return float(np.dot(g, I) / (2 * math.pi) + mass * math.log(r))


def variational_check(family: DeformedFamily, eq: EquilibriumData,
                      s: float, t: float,
                      interior_grid: Optional[Sequence[float]] = None,
                      exterior_points: Sequence[float] = ()) -> VariationalReport:
    """Effective-potential check E(x) = 2 Int log|x-u| dnu - V_{s,t}(x).

    E must be constant (= ell) on the support and < ell outside.
    """
    a, b = eq.support.a, eq.support.b
    if interior_grid is None:
        phi = np.linspace(0.05, math.pi - 0.05, 200)
        interior_grid = eq.support.midpoint + eq.support.radius * np.cos(phi)
    g = _measure_cheb_coeffs(eq, s, t)
    m, r = eq.support.midpoint, eq.support.radius
    mass = g[0] / 2.0
    kmax = len(g) - 1

    def E(x: float) -> float:
        I = _log_kernel_integrals((x - m) / r, kmax)
        lp = float(np.dot(g, I)) / (2 * math.pi) + mass * math.log(r)
        return 2.0 * lp - family.eval(s, t, float(x))

    vals = np.array([E(float(x)) for x in interior_grid])
    ell = float(vals.mean())
    dev = float(np.abs(vals - ell).max())
    ext = {}
    for x in exterior_points:
        if a <= x <= b:
            raise OutOfSupport(f"exterior point {x} lies in [{a}, {b}]")
        ext[float(x)] = E(float(x)) - ell
    return VariationalReport(ell=ell, max_interior_deviation=dev, exterior_gaps=ext)
