"""Units, plane-wave superpositions, periodic grids and the relativistic dispersion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class UnitSystem:
    """Rest mass, light speed and action quantum. Defaults are natural units.

    ``m = 0`` is accepted for massless checks; the Compton length is then infinite.
    """

    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.m >= 0 and math.isfinite(self.m)):
            raise ValueError(f"m must be finite and >= 0, got {self.m!r}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be finite and > 0, got {self.c!r}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be finite and > 0, got {self.hbar!r}")

    @property
    def l_c(self) -> float:
        if self.m == 0:
            return math.inf
        return self.hbar / (self.m * self.c)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @property
    def mc(self) -> float:
        return self.m * self.c


NATURAL = UnitSystem()


def dispersion_energy(p, units: UnitSystem = NATURAL):
    """E(p) = sqrt(c^2 p^2 + m^2 c^4); works elementwise on arrays."""
    p = np.asarray(p, dtype=float)
    out = np.hypot(units.c * p, units.rest_energy)
    return float(out) if out.ndim == 0 else out


def mode_velocity(p, units: UnitSystem = NATURAL):
    """Group velocity dE/dp = p c^2 / E."""
    p = np.asarray(p, dtype=float)
    out = p * units.c**2 / np.hypot(units.c * p, units.rest_energy)
    return float(out) if out.ndim == 0 else out


def pair_velocity(p_i, p_j, units: UnitSystem = NATURAL):
    """U_ij = (p_i + p_j) c^2 / (E_i + E_j), symmetric in its arguments.

    Also equal to (E_i - E_j) / (p_i - p_j) when p_i != p_j, which is why the
    bilinear current it weights satisfies the continuity equation exactly.
    """
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    denom = dispersion_energy(p_i, units) + dispersion_energy(p_j, units)
    out = (p_i + p_j) * units.c**2 / denom
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PlaneWaveMode:
    amplitude: complex
    momentum: float
    units: UnitSystem = NATURAL

    @property
    def energy(self) -> float:
        return dispersion_energy(self.momentum, self.units)

    @property
    def velocity(self) -> float:
        return mode_velocity(self.momentum, self.units)

    @property
    def phase(self) -> float:
        return float(np.angle(self.amplitude))


@dataclass(frozen=True)
class SuperpositionState:
    """Finite sum of plane waves; repeated momenta are merged on construction."""

    modes: tuple[PlaneWaveMode, ...]
    units: UnitSystem = NATURAL

    def __post_init__(self):
        if len(self.modes) == 0:
            raise ValueError("a superposition needs at least one mode")
        merged: dict[float, complex] = {}
        for mode in self.modes:
            p = float(mode.momentum)
            merged[p] = merged.get(p, 0j) + complex(mode.amplitude)
        modes = tuple(PlaneWaveMode(a, p, self.units) for p, a in merged.items())
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_arrays(cls, amplitudes: Iterable[complex], momenta: Iterable[float],
                    units: UnitSystem = NATURAL) -> "SuperpositionState":
        amplitudes, momenta = list(amplitudes), list(momenta)
        if len(amplitudes) != len(momenta):
            raise ValueError("amplitudes and momenta differ in length")
        return cls(tuple(PlaneWaveMode(complex(a), float(p), units)
                         for a, p in zip(amplitudes, momenta)), units)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([m.amplitude for m in self.modes], dtype=complex)

    @property
    def momenta(self) -> np.ndarray:
        return np.array([m.momentum for m in self.modes], dtype=float)

    @property
    def energies(self) -> np.ndarray:
        return dispersion_energy(self.momenta, self.units) * np.ones(len(self.modes))

    def __len__(self):
        return len(self.modes)


@dataclass(frozen=True)
class Event:
    """Spacetime point (or broadcastable arrays of points)."""

    x: float | np.ndarray
    t: float | np.ndarray = 0.0


def mode_phases(state: SuperpositionState, event: Event) -> np.ndarray:
    """(p_i x - E_i t)/hbar with a trailing mode axis."""
    x = np.asarray(event.x, dtype=float)[..., None]
    t = np.asarray(event.t, dtype=float)[..., None]
    return (state.momenta * x - state.energies * t) / state.units.hbar


def sample_superposition(state: SuperpositionState, event: Event):
    """psi(x, t) = sum_i A_i exp(i (p_i x - E_i t) / hbar)."""
    out = np.exp(1j * mode_phases(state, event)) @ state.amplitudes
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L/2, L/2) with N (even) points.

    ``momenta`` are listed in FFT order, i.e. k = 0, 1, ..., N/2-1, -N/2, ..., -1,
    which is the set p_k = 2 pi hbar k / L for k in [-N/2, N/2).
    """

    n_points: int
    length: float
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points <= 0 or self.n_points % 2:
            raise ValueError(f"n_points must be a positive even integer, got {self.n_points!r}")
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError(f"length must be finite and > 0, got {self.length!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def dp(self) -> float:
        return 2 * math.pi * self.hbar / self.length

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.length + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def momenta(self) -> np.ndarray:
        return self.dp * self.wavenumbers

    @property
    def p_max(self) -> float:
        return self.dp * self.n_points / 2

    def index_of_momentum(self, p: float, atol: float = 1e-9) -> int:
        """FFT-order index of grid momentum ``p``; raises if ``p`` is off-grid."""
        k = p / self.dp
        k_round = round(k)
        if abs(k - k_round) > atol * max(1.0, abs(k)) or not -self.n_points // 2 <= k_round < self.n_points // 2:
            raise ValueError(f"momentum {p!r} is not on the grid (dp = {self.dp!r})")
        return int(k_round) % self.n_points


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridState:
    grid: GridSpec
    samples: np.ndarray
    units: UnitSystem = NATURAL

    def __post_init__(self):
        samples = _readonly(self.samples)
        if samples.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {samples.shape}")
        if self.grid.hbar != self.units.hbar:
            raise ValueError("grid and units disagree on hbar")
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples) -> "GridState":
        return GridState(self.grid, samples, self.units)

    def norm2(self) -> float:
        """Integral of |psi|^2 over the box."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dx)

    @classmethod
    def from_momentum_samples(cls, grid: GridSpec, phi, units: UnitSystem = NATURAL) -> "GridState":
        return cls(grid, from_momentum(grid, phi), units)

    @classmethod
    def plane_wave(cls, grid: GridSpec, p: float, amplitude: complex = 1.0,
                   units: UnitSystem = NATURAL) -> "GridState":
        grid.index_of_momentum(p)
        return cls(grid, amplitude * np.exp(1j * p * grid.x / units.hbar), units)

    @classmethod
    def from_superposition(cls, state: SuperpositionState, grid: GridSpec, t: float = 0.0) -> "GridState":
        for mode in state.modes:
            grid.index_of_momentum(mode.momentum)
        return cls(grid, sample_superposition(state, Event(grid.x, t)), state.units)

    @classmethod
    def gaussian(cls, grid: GridSpec, p0: float, sigma_p: float, x0: float = 0.0,
                 units: UnitSystem = NATURAL) -> "GridState":
        """Normalized Gaussian packet; sigma_p is the standard deviation of |phi(p)|^2."""
        p = grid.momenta
        phi = np.exp(-((p - p0) ** 2) / (4 * sigma_p**2) - 1j * p * x0 / units.hbar)
        psi = from_momentum(grid, phi)
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
        return cls(grid, psi, units)


def _phase_shift(grid: GridSpec) -> np.ndarray:
    return np.exp(-1j * grid.momenta * grid.x[0] / grid.hbar)


def to_momentum(state_or_grid, samples=None) -> np.ndarray:
    """phi(p_k) = dx / sqrt(2 pi hbar) * sum_n psi(x_n) exp(-i p_k x_n / hbar).

    Built on the orthonormal DFT, so sum |psi|^2 dx == sum |phi|^2 dp exactly.
    Output is in FFT order, matching ``GridSpec.momenta``.
    """
    if isinstance(state_or_grid, GridState):
        grid, samples = state_or_grid.grid, state_or_grid.samples
    else:
        grid = state_or_grid
    scale = math.sqrt(grid.dx / grid.dp)
    return scale * _phase_shift(grid) * np.fft.fft(samples, norm="ortho")


def from_momentum(grid: GridSpec, phi) -> np.ndarray:
    """Inverse of :func:`to_momentum`."""
    scale = math.sqrt(grid.dp / grid.dx)
    return scale * np.fft.ifft(np.asarray(phi) / _phase_shift(grid), norm="ortho")


def grid_superposition(state: GridState, rtol: float = 0.0) -> SuperpositionState:
    """Plane-wave expansion of a grid state, one mode per grid momentum.

    Modes with ``|A_k| <= rtol * max|A|`` are dropped (``rtol = 0`` keeps every nonzero mode).
    """
    grid = state.grid
    amps = to_momentum(state) * grid.dp / math.sqrt(2 * math.pi * grid.hbar)
    mags = np.abs(amps)
    keep = mags > rtol * mags.max()
    if not keep.any():
        keep[0] = True
    return SuperpositionState.from_arrays(amps[keep], grid.momenta[keep], state.units)


def check_same_grid(*grids: GridSpec) -> None:
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise ValueError(f"grid mismatch: {first} vs {g}")
