"""Rank-one separable-potential model with closed-form scattering solutions.

The Hamiltonian is H = k^2/m - lambda |g><g| on the s-wave radial momentum
half-line with measure int_0^inf dk k^2 and form factor g(k) = 1/(mpi^2 + k^2).
Everything reduces to the resolvent matrix element of the free Hamiltonian
between form factors, which is rational-over-sqrt in the energy and therefore
known in closed form; an independent principal-value quadrature route is kept
alongside as a cross-check.

Normalization conventions, used consistently by the wave-packet pipeline:

* ``coupling`` multiplies g(k) g(k') under the radial measure, so the
  bound-state and T-matrix denominators contain the *radial* integral
  I(z) = int_0^inf dk k^2 g(k)^2 / (z - k^2/m).
* :func:`resolvent_form_factor_element` returns the full three-dimensional
  element int d^3k g^2/(E +- i0 - k^2/m) = 4*pi*I(E +- i0); divide by 4*pi
  where the radial coupling convention is in force.
* The on-shell density is rho(E) = m k / 2 (from dk/dE = m/(2k) against the
  k^2 measure), hence S(k) = 1 - i*pi*m*k*t(k), unimodular for real coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError

DEFAULT_MASS = 938.9
DEFAULT_MPI = 139.0
DEFAULT_BINDING = -2.2246

_QUAD_OPTS = {"epsabs": 1e-15, "epsrel": 1e-12, "limit": 400}


@dataclass(frozen=True)
class SeparableModel:
    """Physical constants of the toy Hamiltonian H = k^2/m - coupling |g><g|."""

    mass: float
    coupling: float
    mpi: float = DEFAULT_MPI

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise DomainError(f"mass must be positive and finite, got {self.mass}")
        if not (math.isfinite(self.mpi) and self.mpi > 0):
            raise DomainError(f"mpi must be positive and finite, got {self.mpi}")
        if not math.isfinite(self.coupling):
            raise DomainError(f"coupling must be finite, got {self.coupling}")


@dataclass(frozen=True)
class OnShellAmplitude:
    """On-shell scattering data at momentum k.

    ``s_matrix = 1 - i*pi*mass*k*t_on_shell`` and ``phase_shift = arg(S)/2``.
    """

    momentum: float
    t_on_shell: complex
    s_matrix: complex
    phase_shift: float


def form_factor(model: SeparableModel, k):
    """Form factor g(k) = 1/(mpi^2 + k^2); accepts scalars or arrays."""
    return 1.0 / (model.mpi**2 + np.asarray(k, dtype=float) ** 2)


def _f_closed(zp: complex, beta: float, side: str) -> complex:
    """F(z') = int_0^inf k^2 dk / [(k^2+beta^2)^2 (z' - k^2)] in closed form.

    ``zp`` is real; ``side`` picks the z' +- i0 boundary value when zp > 0.
    Partial fractions give A/(k^2+b^2) + B/(k^2+b^2)^2 + C/(z'-k^2) with
    A = C = z'/d^2, B = -b^2/d, d = z'+b^2, integrated term by term.  The
    individual terms blow up like 1/d^2 while F stays finite, so for
    |d| <= b^2/4 the partial-fraction form is abandoned for the expansion
    F = -(pi/b^3) sum_n c_n (d/b^2)^n, c_0 = 1/16,
    c_{n+1}/c_n = (2n+3)/(2n+6), which converges geometrically there and
    keeps the relative error near machine precision on both branches.
    """
    b2 = beta * beta
    d = zp + b2
    if abs(d) <= 0.25 * b2:
        u = d / b2
        term = 1.0 / 16.0
        total = term
        for n in range(60):
            term *= u * (2 * n + 3) / (2 * n + 6)
            total += term
            if abs(term) <= 1e-17 * abs(total):
                break
        return -(math.pi / beta**3) * total
    a_coef = zp / (d * d)
    b_coef = -b2 / d
    total = a_coef * math.pi / (2.0 * beta) + b_coef * math.pi / (4.0 * beta**3)
    if zp == 0.0:
        return complex(total)
    if zp > 0.0:
        kappa = -1j * math.sqrt(zp) if side == "above" else 1j * math.sqrt(zp)
    else:
        kappa = complex(math.sqrt(-zp))
    return total - math.pi * zp / (2.0 * d * d * kappa)


def _radial_resolvent(model: SeparableModel, energy: float, side: str = "above") -> complex:
    """I(E +- i0) = int_0^inf dk k^2 g(k)^2 / (E +- i0 - k^2/m)."""
    return model.mass * _f_closed(model.mass * energy, model.mpi, side)


def _radial_resolvent_quadrature(model: SeparableModel, energy: float, side: str) -> complex:
    m = model.mass
    zp = m * energy

    def integrand(k: float) -> float:
        g = 1.0 / (model.mpi**2 + k * k)
        return m * k * k * g * g / (zp - k * k)

    if energy == 0.0:

        def at_threshold(k: float) -> float:
            g = 1.0 / (model.mpi**2 + k * k)
            return -m * g * g

        val, _ = integrate.quad(at_threshold, 0.0, np.inf, **_QUAD_OPTS)
        return complex(val)
    if energy < 0.0:
        val, _ = integrate.quad(integrand, 0.0, np.inf, **_QUAD_OPTS)
        return complex(val)

    k_on = math.sqrt(zp)
    cut = 2.0 * k_on + 4.0 * model.mpi

    def cauchy_numerator(k: float) -> float:
        g = 1.0 / (model.mpi**2 + k * k)
        return -m * k * k * g * g / (k + k_on)

    principal, _ = integrate.quad(
        cauchy_numerator, 0.0, cut, weight="cauchy", wvar=k_on, **_QUAD_OPTS
    )
    tail, _ = integrate.quad(integrand, cut, np.inf, **_QUAD_OPTS)
    g_on = 1.0 / (model.mpi**2 + zp)
    residue = math.pi * (m * k_on / 2.0) * g_on * g_on
    imag = -residue if side == "above" else residue
    return complex(principal + tail, imag)


def resolvent_form_factor_element(
    model: SeparableModel,
    energy: float,
    side: str = "above",
    *,
    method: str = "closed_form",
) -> complex:
    """<g|(E +- i0 - H0)^-1|g> as a three-dimensional momentum integral.

    Equals 4*pi times the radial integral I(E +- i0).  ``side`` selects the
    boundary value approached from above or below the real axis; for E <= 0
    both sides coincide and the result is real.  ``method`` is either the
    closed form or an independent principal-value quadrature with explicit
    on-shell residue (the two must agree; tests enforce 1e-8 relative).
    """
    if side not in ("above", "below"):
        raise ValueError(f"side must be 'above' or 'below', got {side!r}")
    if isinstance(energy, complex):
        raise DomainError("energy must be real; boundary side is chosen via 'side'")
    if not math.isfinite(energy):
        raise DomainError(f"energy must be finite, got {energy}")
    if method == "closed_form":
        radial = _radial_resolvent(model, energy, side)
    elif method == "quadrature":
        radial = _radial_resolvent_quadrature(model, energy, side)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 4.0 * math.pi * radial


def exact_t_on_shell(model: SeparableModel, k: float) -> complex:
    """On-shell half-line T-matrix t(k) = -coupling*g(k)^2 / (1 + coupling*I(E+i0)).

    The denominator uses the radial resolvent integral I = element/(4*pi);
    the result obeys Im t = -(pi*m*k/2)|t|^2, i.e. exact elastic unitarity.
    """
    if not (k > 0.0 and math.isfinite(k)):
        raise DomainError(f"momentum must be positive and finite, got {k}")
    energy = k * k / model.mass
    denom = 1.0 + model.coupling * _radial_resolvent(model, energy, "above")
    if abs(denom) < 1e-12:
        raise ArithmeticError(
            f"T-matrix denominator vanished at k={k}; real coupling cannot "
            "place a pole on the physical sheet"
        )
    g = 1.0 / (model.mpi**2 + k * k)
    return -model.coupling * g * g / denom


def exact_s_on_shell(model: SeparableModel, k: float) -> complex:
    """S(k) = 1 - i*pi*m*k*t(k); |S| = 1 for real coupling."""
    return 1.0 - 1j * math.pi * model.mass * k * exact_t_on_shell(model, k)


def on_shell_amplitude(model: SeparableModel, k: float) -> OnShellAmplitude:
    """Bundle t(k), S(k) and the phase shift arg(S)/2 at one momentum."""
    t = exact_t_on_shell(model, k)
    s = 1.0 - 1j * math.pi * model.mass * k * t
    delta = 0.5 * math.atan2(s.imag, s.real)
    return OnShellAmplitude(momentum=k, t_on_shell=t, s_matrix=s, phase_shift=delta)


def bound_state_energy(model: SeparableModel) -> Optional[float]:
    """Root E < 0 of 1 + coupling*I(E) = 0, or None when no bound state exists.

    I(E) is real and strictly decreasing on E < 0, so the root is unique when
    the coupling exceeds the critical value; found by bracketing plus Brent
    iteration to 1e-10 MeV.
    """

    def f(energy: float) -> float:
        return 1.0 + model.coupling * _radial_resolvent(model, energy, "above").real

    if f(0.0) >= 0.0:
        return None
    lo = -1.0
    while f(lo) <= 0.0:
        lo *= 2.0
        if lo < -1e12:
            raise ArithmeticError("bound-state bracket expansion failed")
    return float(optimize.brentq(f, lo, 0.0, xtol=1e-10, rtol=8.9e-16))


def critical_coupling(mass: float = DEFAULT_MASS, mpi: float = DEFAULT_MPI) -> float:
    """Coupling at which a zero-energy bound state first appears: 4*mpi^3/(pi*m)."""
    probe = SeparableModel(mass=mass, coupling=0.0, mpi=mpi)
    return -1.0 / _radial_resolvent(probe, 0.0, "above").real


def coupling_for_binding(
    mass: float = DEFAULT_MASS,
    binding: float = DEFAULT_BINDING,
    mpi: float = DEFAULT_MPI,
) -> float:
    """Coupling that places the bound state exactly at the given energy (< 0)."""
    if not (binding < 0.0 and math.isfinite(binding)):
        raise DomainError(f"binding energy must be negative, got {binding}")
    probe = SeparableModel(mass=mass, coupling=0.0, mpi=mpi)
    return -1.0 / _radial_resolvent(probe, binding, "above").real


def default_model() -> SeparableModel:
    """Deuteron-like defaults: m = 938.9, mpi = 139, bound state at -2.2246 MeV."""
    return SeparableModel(
        mass=DEFAULT_MASS,
        coupling=coupling_for_binding(DEFAULT_MASS, DEFAULT_BINDING, DEFAULT_MPI),
        mpi=DEFAULT_MPI,
    )
