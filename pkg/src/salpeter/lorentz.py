"""Boost kinematics, the two-plane-wave Born-rule counterexample and the Dirac four-vector check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (NATURAL, Event, SuperpositionState, UnitSystem, dispersion_energy, mode_velocity,
                   pair_velocity)
from .densities import dirac_density_current_modes
from .operators import symbol_A, symbol_B
from .rng import SplitMix64

# sweeps redraw when |U_12 - v| < gap * c: beta_12 loses ~eps / |U_12 - v| to cancellation there
DEGENERACY_GAP = 1e-3


class DegenerateBoostError(ValueError):
    """The boosted pair velocity vanishes, so beta_12 is undefined."""


@dataclass(frozen=True)
class Boost:
    v: float
    c: float = 1.0

    def __post_init__(self):
        if not abs(self.v) < self.c:
            raise ValueError(f"boost velocity must satisfy |v| < c, got v={self.v!r}")

    @classmethod
    def from_rapidity(cls, eta: float, c: float = 1.0) -> "Boost":
        return cls(c * math.tanh(eta), c)

    @property
    def beta(self) -> float:
        return self.v / self.c

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    @property
    def rapidity(self) -> float:
        return math.atanh(self.beta)

    def compose(self, other: "Boost") -> "Boost":
        """Boost by ``self`` then ``other``: relativistic velocity addition."""
        return Boost((self.v + other.v) / (1.0 + self.v * other.v / self.c**2), self.c)


def boost_momentum(p, boost: Boost, units: UnitSystem = NATURAL):
    """(p', E') = (gamma (p - v E / c^2), gamma (E - v p))."""
    E = dispersion_energy(p, units)
    g = boost.gamma
    return g * (p - boost.v * E / units.c**2), g * (E - boost.v * p)


def boost_event(event: Event, boost: Boost) -> Event:
    g, v, c = boost.gamma, boost.v, boost.c
    x = np.asarray(event.x, dtype=float)
    t = np.asarray(event.t, dtype=float)
    xp, tp = g * (x - v * t), g * (t - v * x / c**2)
    if xp.ndim == 0:
        return Event(float(xp), float(tp))
    return Event(xp, tp)


def alpha_coefficient(p_i, p_j, boost: Boost, units: UnitSystem = NATURAL):
    """alpha_ij = gamma (1 - v U_ij / c^2)."""
    return boost.gamma * (1.0 - boost.v * pair_velocity(p_i, p_j, units) / units.c**2)


def beta_coefficient(p_1, p_2, boost: Boost, units: UnitSystem = NATURAL) -> float:
    """beta_12 = gamma (U_12 - v) / U'_12, with U'_12 built from the boosted momenta."""
    U = pair_velocity(p_1, p_2, units)
    q1, _ = boost_momentum(p_1, boost, units)
    q2, _ = boost_momentum(p_2, boost, units)
    U_boosted = pair_velocity(q1, q2, units)
    if U_boosted == 0.0 or U == boost.v:
        raise DegenerateBoostError(f"U'_12 = 0 (U_12 = v = {boost.v!r}); beta_12 undefined")
    return boost.gamma * (U - boost.v) / U_boosted


def consistency_ratio(p_1, p_2, boost: Boost, units: UnitSystem = NATURAL):
    """alpha_11 alpha_22 / alpha_12^2; equals 1 only when the two mode velocities coincide."""
    c2 = units.c**2
    a11 = 1.0 - boost.v * mode_velocity(p_1, units) / c2
    a22 = 1.0 - boost.v * mode_velocity(p_2, units) / c2
    a12 = 1.0 - boost.v * pair_velocity(p_1, p_2, units) / c2
    return a11 * a22 / a12**2


def momentum_from_velocity(u, units: UnitSystem = NATURAL):
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) >= units.c):
        raise ValueError("mode velocities must satisfy |u| < c")
    b = u / units.c
    out = units.m * u / np.sqrt((1.0 - b) * (1.0 + b))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class RatioSurface:
    velocities: np.ndarray
    ratio: np.ndarray  # ratio[i, j] at (u_1, u_2) = (velocities[i], velocities[j])
    boost: Boost

    def rows(self):
        for i, u1 in enumerate(self.velocities):
            for j, u2 in enumerate(self.velocities):
                yield float(u1), float(u2), float(self.ratio[i, j])


def ratio_surface(u_min: float, u_max: float, steps: int, boost: Boost,
                  units: UnitSystem = NATURAL) -> RatioSurface:
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not (abs(u_min) < units.c and abs(u_max) < units.c):
        raise ValueError("velocity bounds must lie strictly inside (-c, c)")
    u = np.linspace(u_min, u_max, steps)
    p = momentum_from_velocity(u, units)
    table = consistency_ratio(p[:, None], p[None, :], boost, units)
    # the symmetric pair-velocity formula makes the table symmetric; pin the diagonal exactly
    np.fill_diagonal(table, 1.0)
    return RatioSurface(u, table, boost)


@dataclass(frozen=True)
class BornResidualReport:
    alpha_11: float
    alpha_22: float
    alpha_12: float
    beta_12: float | None
    ratio: float
    a1_boosted_sq: float
    a2_boosted_sq: float
    r: float
    tolerance: float

    @property
    def inconsistent(self) -> bool:
        return abs(self.r) > self.tolerance

    def as_dict(self) -> dict:
        return {"alpha_11": self.alpha_11, "alpha_22": self.alpha_22, "alpha_12": self.alpha_12,
                "beta_12": self.beta_12, "ratio": self.ratio, "a1_boosted_sq": self.a1_boosted_sq,
                "a2_boosted_sq": self.a2_boosted_sq, "r": self.r, "inconsistent": self.inconsistent}


def born_transform_residual(modes, boost: Boost, tolerance: float = 1e-10) -> BornResidualReport:
    """Solve the density/current moduli equations and measure how badly the cross term fails.

    ``modes`` is a two-mode :class:`SuperpositionState` or a pair of
    :class:`PlaneWaveMode` (the pair form allows p_1 = p_2). The diagonal
    equations fix |A'_i|^2 = alpha_ii |A_i|^2; the cross-term equation then
    demands |A'_1||A'_2| = alpha_12 |A_1||A_2|, and ``r`` is the relative
    violation of that demand.
    """
    if isinstance(modes, SuperpositionState):
        units = modes.units
        modes = modes.modes
    else:
        units = modes[0].units
    if len(modes) != 2:
        raise ValueError(f"the counterexample needs exactly two modes, got {len(modes)}")
    m1, m2 = modes
    p1, p2 = m1.momentum, m2.momentum
    mod1, mod2 = abs(m1.amplitude), abs(m2.amplitude)
    if mod1 == 0 or mod2 == 0:
        raise ValueError("both amplitudes must be nonzero")
    a11 = alpha_coefficient(p1, p1, boost, units)
    a22 = alpha_coefficient(p2, p2, boost, units)
    a12 = alpha_coefficient(p1, p2, boost, units)
    try:
        b12 = beta_coefficient(p1, p2, boost, units)
    except DegenerateBoostError:
        b12 = None
    a1p_sq = a11 * mod1**2
    a2p_sq = a22 * mod2**2
    r = math.sqrt(a1p_sq * a2p_sq) / (a12 * mod1 * mod2) - 1.0
    return BornResidualReport(a11, a22, a12, b12, consistency_ratio(p1, p2, boost, units),
                              a1p_sq, a2p_sq, r, tolerance)


def spinor_boost_matrix(boost: Boost) -> np.ndarray:
    """S = cosh(eta/2) I - sinh(eta/2) sigma_x, mapping u(p) to u(p') for u = (A, B) symbols."""
    half = 0.5 * boost.rapidity
    ch, sh = math.cosh(half), math.sinh(half)
    return np.array([[ch, -sh], [-sh, ch]])


def spinor(p, units: UnitSystem = NATURAL) -> np.ndarray:
    """Positive-energy plane-wave spinor u(p) = (sqrt(E + mc^2), c p / sqrt(E + mc^2))."""
    return np.array([symbol_A(p, units), symbol_B(p, units)])


def boost_superposition(state: SuperpositionState, boost: Boost) -> SuperpositionState:
    """Boosted scalar state whose Dirac spinor is S times the original spinor, mode by mode."""
    S = spinor_boost_matrix(boost)
    amps, moms = [], []
    for mode in state.modes:
        q, _ = boost_momentum(mode.momentum, boost, state.units)
        boosted = S @ (mode.amplitude * spinor(mode.momentum, state.units))
        amps.append(boosted[0] / symbol_A(q, state.units))
        moms.append(q)
    return SuperpositionState.from_arrays(amps, moms, state.units)


def dirac_fourvector_residual(state: SuperpositionState, boost: Boost, events: Event) -> float:
    """Max deviation of the boosted (rho_D, J_D) from the four-vector rule, over ``events``.

    Both terms are normalized by max rho_D (the current term also by c).
    """
    units = state.units
    if boost.c != units.c:
        raise ValueError("boost and state disagree on c")
    here = dirac_density_current_modes(state, events)
    there = dirac_density_current_modes(boost_superposition(state, boost), boost_event(events, boost))
    g, v, c = boost.gamma, boost.v, units.c
    rho_expected = g * (here.rho - v * here.current / c**2)
    j_expected = g * (here.current - v * here.rho)
    scale = float(np.max(np.abs(here.rho)))
    err = max(float(np.max(np.abs(there.rho - rho_expected))),
              float(np.max(np.abs(there.current - j_expected))) / c)
    return err / scale


def random_two_mode_state(rng: SplitMix64, p_max: float, units: UnitSystem = NATURAL) -> SuperpositionState:
    """Two modes with uniform |A| in [0.1, 1], uniform phase, uniform p in [-p_max, p_max] mc."""
    amps, moms = [], []
    for _ in range(2):
        modulus = rng.uniform(0.1, 1.0)
        phase = rng.uniform(-math.pi, math.pi)
        amps.append(modulus * complex(math.cos(phase), math.sin(phase)))
        moms.append(rng.uniform(-p_max, p_max) * units.mc)
    return SuperpositionState.from_arrays(amps, moms, units)


def random_events(rng: SplitMix64, n: int, extent: float = 10.0, units: UnitSystem = NATURAL) -> Event:
    """n events uniform in |x| <= extent l_c, |t| <= extent l_c / c."""
    scale = units.l_c
    x = np.array([rng.uniform(-extent, extent) * scale for _ in range(n)])
    t = np.array([rng.uniform(-extent, extent) * scale / units.c for _ in range(n)])
    return Event(x, t)


@dataclass
class IdentityResult:
    name: str
    max_residual: float
    tolerance: float
    samples: int
    rejected: int = 0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass
class _Tracker:
    worst: dict = field(default_factory=dict)

    def update(self, name, value):
        self.worst[name] = max(self.worst.get(name, 0.0), float(value))


def identity_sweep(seed: int, samples: int, p_max: float = 3.0, v_max: float = 0.9,
                   tolerance: float = 1e-12, units: UnitSystem = NATURAL) -> list[IdentityResult]:
    """Seeded random checks of every exact kinematic identity the counterexample relies on.

    Draws (p_1, p_2, v) uniformly from |p| <= p_max mc, |v| <= v_max c and redraws
    whenever |U_12 - v| < DEGENERACY_GAP c or a mode speed reaches 0.999 c.
    """
    rng = SplitMix64(seed)
    c, mc2 = units.c, units.rest_energy
    track = _Tracker()
    rejected = 0
    for _ in range(samples):
        while True:
            p1 = rng.uniform(-p_max, p_max) * units.mc
            p2 = rng.uniform(-p_max, p_max) * units.mc
            v = rng.uniform(-v_max, v_max) * c
            U = pair_velocity(p1, p2, units)
            fast = max(abs(mode_velocity(p1, units)), abs(mode_velocity(p2, units))) >= 0.999 * c
            if abs(U - v) >= DEGENERACY_GAP * c and not fast:
                break
            rejected += 1
        boost = Boost(v, c)
        q1, e1 = boost_momentum(p1, boost, units)
        q2, e2 = boost_momentum(p2, boost, units)

        alpha = alpha_coefficient(p1, p2, boost, units)
        track.update("beta_equals_alpha", abs(beta_coefficient(p1, p2, boost, units) / alpha - 1.0))

        for q, e in ((q1, e1), (q2, e2)):
            track.update("mass_shell", abs((e * e - (c * q) ** 2) - mc2**2) / mc2**2)

        U_boosted = pair_velocity(q1, q2, units)
        U_added = (U - v) / (1.0 - v * U / c**2)
        track.update("pair_velocity_addition", abs(U_boosted - U_added) / abs(U_added))

        x = rng.uniform(-10.0, 10.0) * units.l_c
        t = rng.uniform(-10.0, 10.0) * units.l_c / c
        ev = boost_event(Event(x, t), boost)
        scale = (c * t) ** 2 + x**2
        track.update("interval", abs(((c * ev.t) ** 2 - ev.x**2) - ((c * t) ** 2 - x**2)) / scale)

        E1 = dispersion_energy(p1, units)
        phase = p1 * x - E1 * t
        phase_boosted = q1 * ev.x - e1 * ev.t
        scale = abs(p1 * x) + abs(E1 * t) + abs(q1 * ev.x) + abs(e1 * ev.t)
        track.update("phase_invariance", abs(phase_boosted - phase) / scale)

        S = spinor_boost_matrix(boost)
        u_before, u_after = spinor(p1, units), spinor(q1, units)
        track.update("spinor_boost", np.max(np.abs(S @ u_before - u_after)) / np.max(np.abs(u_after)))

        w = rng.uniform(-v_max, v_max) * c
        second = Boost(w, c)
        composed = spinor_boost_matrix(boost) @ spinor_boost_matrix(second)
        track.update("spinor_composition",
                     np.max(np.abs(composed - spinor_boost_matrix(boost.compose(second)))))

        r12 = consistency_ratio(p1, p2, boost, units)
        track.update("ratio_symmetry", abs(r12 - consistency_ratio(p2, p1, boost, units)) / r12)

    return [IdentityResult(name, worst, tolerance, samples, rejected)
            for name, worst in track.worst.items()]
