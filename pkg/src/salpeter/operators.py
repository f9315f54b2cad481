"""Functions of the momentum operator applied spectrally on a periodic grid."""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import GridState, UnitSystem, dispersion_energy, to_momentum

BAND_EDGE_FRACTION = 0.05
BAND_LIMIT_RTOL = 1e-10


class BandLimitWarning(UserWarning):
    pass


class BandLimitError(ValueError):
    pass


def strict_mode() -> bool:
    return os.environ.get("SALPETER_STRICT", "") == "1"


@dataclass(frozen=True)
class SymbolFunction:
    """Scalar momentum-space multiplier p -> f(p)."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "f"

    def __call__(self, p):
        return self.func(p)


@dataclass(frozen=True)
class SeriesTruncation:
    k_max: int

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise ValueError(f"k_max must be a nonnegative integer, got {self.k_max!r}")


def band_edge_ratio(state: GridState) -> float:
    """max |phi| over the top 5% of |p_k|, relative to the global max |phi|."""
    phi = np.abs(to_momentum(state))
    peak = phi.max()
    if peak == 0:
        return 0.0
    absp = np.abs(state.grid.momenta)
    n_edge = max(1, int(math.ceil(BAND_EDGE_FRACTION * absp.size)))
    edge = np.argsort(absp, kind="stable")[-n_edge:]
    return float(phi[edge].max() / peak)


def check_band_limit(state: GridState, strict: bool | None = None) -> None:
    ratio = band_edge_ratio(state)
    if ratio <= BAND_LIMIT_RTOL:
        return
    msg = f"state is not band-limited: edge/peak spectral ratio {ratio:.3e} > {BAND_LIMIT_RTOL:g}"
    if strict_mode() if strict is None else strict:
        raise BandLimitError(msg)
    warnings.warn(msg, BandLimitWarning, stacklevel=3)


def _multiply(state: GridState, values: np.ndarray) -> GridState:
    return state.with_samples(np.fft.ifft(values * np.fft.fft(state.samples)))


def apply_symbol(state: GridState, f, check: bool = True, strict: bool | None = None) -> GridState:
    """Transform, multiply by f(p_k), transform back.

    ``f`` is a :class:`SymbolFunction` or any vectorized callable of momentum.
    With ``check`` the band-limit policy runs first (warning, or
    :class:`BandLimitError` in strict mode / ``SALPETER_STRICT=1``).
    """
    if check:
        check_band_limit(state, strict)
    values = np.asarray(f(state.grid.momenta))
    if not np.all(np.isfinite(values)):
        raise ValueError("symbol is not finite on the momentum grid")
    return _multiply(state, values)


def energy_symbol(units: UnitSystem) -> SymbolFunction:
    return SymbolFunction(lambda p: dispersion_energy(p, units), "E")


def apply_sqrt_hamiltonian(state: GridState, **kw) -> GridState:
    return apply_symbol(state, energy_symbol(state.units), **kw)


def series_coefficient(k: int) -> float:
    """Generalized binomial coefficient C(1/2, k)."""
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    out = 1.0
    for j in range(int(k)):
        out *= (0.5 - j) / (j + 1)
    return out


def truncated_series_symbol(p, k_max: int, units: UnitSystem):
    """mc^2 * sum_{k<=k_max} C(1/2,k) (p/mc)^(2k), the partial sums of the derivative series."""
    y = (np.asarray(p, dtype=float) / units.mc) ** 2
    total = np.zeros_like(y)
    power = np.ones_like(y)
    for k in range(k_max + 1):
        total = total + series_coefficient(k) * power
        power = power * y
    out = units.rest_energy * total
    return float(out) if np.ndim(out) == 0 else out


def apply_truncated_series(state: GridState, trunc: SeriesTruncation, noise_floor: float = 1e-14,
                           **kw) -> GridState:
    """Partial sum of the derivative series applied as a polynomial symbol.

    Spectral coefficients below ``noise_floor`` times the peak are roundoff and
    are zeroed first; the symbol grows like (p/mc)^(2 k_max) and would otherwise
    blow them up. Genuine content beyond |p| = mc still diverges.
    """
    if state.units.m == 0:
        raise ValueError("the derivative series needs m > 0")
    if kw.pop("check", True):
        check_band_limit(state, kw.pop("strict", None))
    spectrum = np.fft.fft(state.samples)
    mags = np.abs(spectrum)
    spectrum[mags <= noise_floor * mags.max()] = 0.0
    values = truncated_series_symbol(state.grid.momenta, trunc.k_max, state.units)
    return state.with_samples(np.fft.ifft(values * spectrum))


def symbol_A(p, units: UnitSystem):
    """sqrt(E(p) + mc^2), upper component of the positive-energy spinor."""
    return np.sqrt(dispersion_energy(p, units) + units.rest_energy)


def symbol_B(p, units: UnitSystem):
    """c p / sqrt(E(p) + mc^2), lower component of the positive-energy spinor."""
    p = np.asarray(p, dtype=float)
    a = symbol_A(p, units)
    out = np.divide(units.c * p, a, out=np.zeros_like(a, dtype=float), where=a > 0)
    return float(out) if np.ndim(out) == 0 else out


def apply_A(state: GridState, **kw) -> GridState:
    return apply_symbol(state, SymbolFunction(lambda p: symbol_A(p, state.units), "A"), **kw)


def apply_B(state: GridState, **kw) -> GridState:
    return apply_symbol(state, SymbolFunction(lambda p: symbol_B(p, state.units), "B"), **kw)


def propagate(state: GridState, t: float) -> GridState:
    """Exact Salpeter evolution: phi(p) -> phi(p) exp(-i E(p) t / hbar)."""
    u = state.units
    return _multiply(state, np.exp(-1j * dispersion_energy(state.grid.momenta, u) * t / u.hbar))


def schrodinger_propagate(state: GridState, t: float, include_rest_phase: bool = True) -> GridState:
    """Free nonrelativistic evolution with phase (mc^2 + p^2/2m) t / hbar; rest term optional."""
    u = state.units
    if u.m == 0:
        raise ValueError("Schrodinger evolution needs m > 0")
    p = state.grid.momenta
    energy = p**2 / (2 * u.m) + (u.rest_energy if include_rest_phase else 0.0)
    return _multiply(state, np.exp(-1j * energy * t / u.hbar))


def remove_rest_phase(state: GridState, t: float) -> GridState:
    u = state.units
    return state.with_samples(state.samples * np.exp(1j * u.rest_energy * t / u.hbar))
