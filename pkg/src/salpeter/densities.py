"""Probability densities and currents: the Born pair and the Dirac-bridge pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (Event, GridSpec, GridState, SuperpositionState, UnitSystem, check_same_grid,
                   grid_superposition, mode_phases, pair_velocity, sample_superposition, to_momentum,
                   dispersion_energy)
from .operators import SeriesTruncation, apply_A, apply_B, apply_symbol, propagate, symbol_A, symbol_B

SERIES_SUPPORT = 0.9
# grid-mode amplitudes below this fraction of the largest are left out of mode double sums
MODE_RTOL = 1e-17


class SupportError(ValueError):
    """State has momentum content where the derivative series does not converge."""


@dataclass(frozen=True, eq=False)
class DensityCurrentPair:
    rho: np.ndarray
    current: np.ndarray
    grid: GridSpec | None = None


@dataclass(frozen=True, eq=False)
class SpinorField:
    upper: np.ndarray
    lower: np.ndarray
    grid: GridSpec
    units: UnitSystem


def _real(values: np.ndarray, what: str, rtol: float = 1e-12) -> np.ndarray:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        scale = np.max(np.abs(values)) if values.size else 0.0
        if np.max(np.abs(values.imag), initial=0.0) > rtol * max(scale, 1e-300):
            raise ArithmeticError(f"{what} has a non-negligible imaginary part")
        values = values.real
    return np.array(values, dtype=float)


def _events_or_grid(state, event):
    if isinstance(state, GridState):
        if event is not None:
            raise ValueError("grid states are evaluated on their own grid; pass no event")
        return state.grid.x, 0.0
    if event is None:
        raise ValueError("superposition states need an event (x, t) to evaluate at")
    return event.x, event.t


def born_density(state, event: Event | None = None) -> np.ndarray:
    """|psi|^2 on the grid or at the given events."""
    _events_or_grid(state, event)
    if isinstance(state, GridState):
        return np.abs(state.samples) ** 2
    return np.abs(sample_superposition(state, event)) ** 2


def _mode_amplitudes(state, event):
    """Per-mode complex amplitudes a_i(x, t) = A_i exp(i phase_i), and the superposition."""
    if isinstance(state, GridState):
        _events_or_grid(state, event)
        sup = grid_superposition(state, rtol=MODE_RTOL)
        event = Event(state.grid.x, 0.0)
    else:
        sup = state
    return sup, np.exp(1j * mode_phases(sup, event)) * sup.amplitudes


def born_current_bilinear(state, event: Event | None = None) -> np.ndarray:
    """J = sum_{i,j} conj(a_j) U_ij a_i, the resummed Born current.

    Exact for any momentum content; for two plane waves it is the double
    cosine sum with weights U_ij.
    """
    sup, a = _mode_amplitudes(state, event)
    p = sup.momenta
    U = pair_velocity(p[:, None], p[None, :], sup.units)
    return _real(np.sum(np.conj(a) * (a @ U), axis=-1), "Born current")


def born_density_closed_form(state: SuperpositionState, event: Event) -> np.ndarray:
    """sum_{i,j} |A_i||A_j| cos(phase_i - phase_j + delta_ij), written out with cosines."""
    phase = mode_phases(state, event) + np.angle(state.amplitudes)
    mod = np.abs(state.amplitudes)
    diff = phase[..., :, None] - phase[..., None, :]
    return np.sum(mod[:, None] * mod[None, :] * np.cos(diff), axis=(-1, -2))


def born_current_closed_form(state: SuperpositionState, event: Event) -> np.ndarray:
    """sum_{i,j} |A_i||A_j| U_ij cos(phase_i - phase_j + delta_ij)."""
    phase = mode_phases(state, event) + np.angle(state.amplitudes)
    mod = np.abs(state.amplitudes)
    p = state.momenta
    U = pair_velocity(p[:, None], p[None, :], state.units)
    diff = phase[..., :, None] - phase[..., None, :]
    return np.sum(mod[:, None] * mod[None, :] * U * np.cos(diff), axis=(-1, -2))


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def current_series_coefficient(k: int) -> float:
    """(2k-3)!! / (2k)!! for k >= 1."""
    return double_factorial(2 * k - 3) / double_factorial(2 * k)


def born_current_series(state: GridState, trunc: SeriesTruncation) -> np.ndarray:
    """Truncated derivative series for the Born current.

    J = -(i m c^2/hbar) sum_{k=1}^{k_max} (2k-3)!!/(2k)!! (hbar/mc)^(2k)
        sum_{l=0}^{2k-1} (-1)^l (d^l psi*)(d^(2k-l-1) psi)

    Derivatives are spectral. Only valid for states supported in
    |p| <= 0.9 mc; anything else raises :class:`SupportError`.
    """
    u = state.units
    if u.m == 0:
        raise ValueError("the derivative series needs m > 0")
    phi = np.abs(to_momentum(state))
    outside = np.abs(state.grid.momenta) > SERIES_SUPPORT * u.mc
    peak = phi.max()
    if peak > 0 and outside.any() and phi[outside].max() > 1e-10 * peak:
        raise SupportError(f"state has momentum content beyond {SERIES_SUPPORT} mc")
    # project onto the support so roundoff above mc is not amplified by high powers of p
    y = np.where(outside, 0.0, state.grid.momenta / u.mc)
    spectrum = np.fft.fft(state.samples)
    n_deriv = max(2 * trunc.k_max, 1)
    # scaled derivatives (hbar/mc)^n d^n psi / dx^n
    derivs = [np.fft.ifft((1j * y) ** n * spectrum) for n in range(n_deriv)]
    total = np.zeros(state.grid.n_points, dtype=complex)
    for k in range(1, trunc.k_max + 1):
        inner = sum((-1) ** l * np.conj(derivs[l]) * derivs[2 * k - l - 1] for l in range(2 * k))
        total += current_series_coefficient(k) * inner
    return _real(-1j * u.c * total, "series current", rtol=1e-10)


def dirac_spinor_from_scalar(state: GridState, normalize: bool = False) -> SpinorField:
    """Two-component positive-energy spinor (A psi, B psi).

    ``normalize`` rescales phi(p) by 1/sqrt(2E) first, so that the Dirac density
    integrates to the Born norm of ``state``.
    """
    if normalize:
        u = state.units
        state = apply_symbol(state, lambda p: 1.0 / np.sqrt(2 * dispersion_energy(p, u)), check=False)
    upper = apply_A(state, check=False)
    lower = apply_B(state, check=False)
    return SpinorField(upper.samples, lower.samples, state.grid, state.units)


def _dirac_from_components(upper, lower, units: UnitSystem, grid=None) -> DensityCurrentPair:
    rho = np.abs(upper) ** 2 + np.abs(lower) ** 2
    current = units.c * 2.0 * np.real(np.conj(upper) * lower)
    peak = np.max(rho) if np.size(rho) else 0.0
    if np.any(rho < -1e-12 * peak) or np.any(np.abs(current) > units.c * rho + 1e-10 * units.c * peak):
        raise ArithmeticError("Dirac density/current violate rho >= |J|/c")
    return DensityCurrentPair(rho, current, grid)


def dirac_density_current(spinor: SpinorField) -> DensityCurrentPair:
    """rho_D = |A psi|^2 + |B psi|^2 and J_D = c ((A psi)* (B psi) + c.c.)."""
    return _dirac_from_components(spinor.upper, spinor.lower, spinor.units, spinor.grid)


def dirac_spinor_modes(state: SuperpositionState, event: Event) -> tuple[np.ndarray, np.ndarray]:
    """Spinor components sum_i A_i u(p_i) exp(i phase_i) at the given events."""
    w = np.exp(1j * mode_phases(state, event)) * state.amplitudes
    p = state.momenta
    return w @ symbol_A(p, state.units), w @ symbol_B(p, state.units)


def dirac_density_current_modes(state: SuperpositionState, event: Event) -> DensityCurrentPair:
    upper, lower = dirac_spinor_modes(state, event)
    return _dirac_from_components(upper, lower, state.units)


def born_pair(state: GridState) -> DensityCurrentPair:
    return DensityCurrentPair(born_density(state), born_current_bilinear(state), state.grid)


def dirac_pair(state: GridState, normalize: bool = False) -> DensityCurrentPair:
    return dirac_density_current(dirac_spinor_from_scalar(state, normalize))


def spectral_derivative(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    k = 2 * math.pi * grid.wavenumbers / grid.length
    k = np.where(grid.wavenumbers == -grid.n_points // 2, 0.0, k)
    return np.real(np.fft.ifft(1j * k * np.fft.fft(values)))


def continuity_residual(before: DensityCurrentPair, now: DensityCurrentPair,
                        after: DensityCurrentPair, dt: float) -> float:
    """max |d_t rho + d_x J| / max |d_t rho| from three snapshots dt apart.

    Centered differences in time, spectral derivative in space. A density that
    is static to roundoff is reported as the absolute residual times dt / max rho
    instead, since the relative form would divide noise by noise.
    """
    grid = now.grid
    if grid is None:
        raise ValueError("continuity_residual needs grid-sampled pairs")
    check_same_grid(before.grid, now.grid, after.grid)
    drho = (after.rho - before.rho) / (2 * dt)
    div = spectral_derivative(now.current, grid)
    numer = float(np.max(np.abs(drho + div)))
    denom = float(np.max(np.abs(drho)))
    rho_scale = float(np.max(np.abs(now.rho)))
    if denom <= 1e-10 * rho_scale / dt:
        return numer * dt / rho_scale if rho_scale > 0 else numer
    return numer / denom


def continuity_check(state: GridState, dt: float, which: str = "born") -> float:
    """Continuity residual of the Born ("born") or Dirac ("dirac") pair around ``state``."""
    pair_fn = {"born": born_pair, "dirac": dirac_pair}[which]
    snaps = [pair_fn(propagate(state, s * dt)) for s in (-1, 0, 1)]
    return continuity_residual(*snaps, dt)
