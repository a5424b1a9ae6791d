"""
Level structure of the 87Rb D2 line: basis states, hyperfine energies, dipole couplings,
Zeeman shifts and radiative decay channels.

Two modes are supported:
- ScalarN4: the reduced four-level N scheme (F=1, F=2, F'=1, F'=2, one sublevel each)
- FullZeeman24: every Zeeman sublevel of F=1,2 and F'=0..3 (8 + 16 states)
"""
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

import config
from eit_nsim.atom.angular import dipole_element
from eit_nsim.errors import ConfigError, UnsupportedModeError


class Manifold(str, Enum):
    GROUND = "Ground5S12"
    EXCITED = "Excited5P32"


class SchemeMode(str, Enum):
    SCALAR_N4 = "ScalarN4"
    FULL_ZEEMAN_24 = "FullZeeman24"


ALLOWED_F = {Manifold.GROUND: (1, 2), Manifold.EXCITED: (0, 1, 2, 3)}
SCALAR_LEVELS = {Manifold.GROUND: (1, 2), Manifold.EXCITED: (1, 2)}

# (manifold, lower F, upper F) -> splitting in MHz
IntervalKey = Tuple[Manifold, int, int]


def default_intervals() -> Dict[IntervalKey, float]:
    return {
        (Manifold.GROUND, 1, 2): config.GROUND_HFS_MHZ,
        (Manifold.EXCITED, 0, 1): config.EXCITED_0_1_MHZ,
        (Manifold.EXCITED, 1, 2): config.EXCITED_1_2_MHZ,
        (Manifold.EXCITED, 2, 3): config.EXCITED_2_3_MHZ,
    }


def default_g_factors() -> Dict[Tuple[Manifold, int], float]:
    return {
        (Manifold.GROUND, 1): config.G_GROUND_F1,
        (Manifold.GROUND, 2): config.G_GROUND_F2,
        (Manifold.EXCITED, 0): 0.0,
        (Manifold.EXCITED, 1): config.G_EXCITED,
        (Manifold.EXCITED, 2): config.G_EXCITED,
        (Manifold.EXCITED, 3): config.G_EXCITED,
    }


def default_branching() -> Dict[int, Tuple[float, float]]:
    # excited F' -> (fraction to F=1, fraction to F=2)
    return {1: (0.5, 0.5), 2: (0.5, 0.5)}


@dataclass
class LevelSchemeConfig:
    mode: SchemeMode = SchemeMode.SCALAR_N4
    gamma: float = config.GAMMA_MHZ
    hyperfine_intervals: Dict[IntervalKey, float] = field(default_factory=default_intervals)
    g_factors: Dict[Tuple[Manifold, int], float] = field(default_factory=default_g_factors)
    branching: Dict[int, Tuple[float, float]] = field(default_factory=default_branching)


@dataclass(frozen=True)
class AtomicState:
    manifold: Manifold
    F: int
    mF: int
    index: int

    @property
    def label(self) -> str:
        prime = "'" if self.manifold is Manifold.EXCITED else ""
        return f"F{prime}={self.F},mF{prime}={self.mF:+d}"


@dataclass(frozen=True)
class DipoleCoupling:
    ground: int
    excited: int
    q: int
    amplitude: float


@dataclass(frozen=True)
class DecayChannel:
    label: str
    q: Optional[int]
    operator: np.ndarray      # lowering operator, sqrt(MHz)


@dataclass(frozen=True, eq=False)
class LevelScheme:
    mode: SchemeMode
    states: Tuple[AtomicState, ...]
    energies: np.ndarray                    # MHz, offset from the manifold reference level
    gamma: float
    g_factors: Mapping[Tuple[Manifold, int], float]
    hyperfine_intervals: Mapping[IntervalKey, float]
    branching: Mapping[int, Tuple[float, float]]

    @property
    def n(self) -> int:
        return len(self.states)

    def levels(self, manifold: Manifold) -> Tuple[int, ...]:
        """Hyperfine F values present in a manifold, ascending"""
        return tuple(sorted({s.F for s in self.states if s.manifold is manifold}))

    def indices(self, manifold: Manifold, F: Optional[int] = None) -> List[int]:
        return [s.index for s in self.states
                if s.manifold is manifold and (F is None or s.F == F)]

    def index_of(self, manifold: Manifold, F: int, mF: int = 0) -> int:
        for s in self.states:
            if s.manifold is manifold and s.F == F and s.mF == mF:
                return s.index
        raise KeyError(f"no state {manifold.value} F={F} mF={mF} in {self.mode.value} scheme")

    def projector(self, manifold: Manifold, F: Optional[int] = None) -> np.ndarray:
        p = np.zeros((self.n, self.n))
        idx = self.indices(manifold, F)
        p[idx, idx] = 1.0
        return p

    def level_energy(self, manifold: Manifold, F: int) -> float:
        return hyperfine_energy(self, manifold, F)


def _interval(intervals: Mapping[IntervalKey, float], key: IntervalKey) -> float:
    if key not in intervals:
        raise ConfigError(f"missing hyperfine interval {key[0].value} F={key[1]}-{key[2]}",
                          key="scheme.hyperfine_intervals")
    value = float(intervals[key])
    if not value > 0:
        raise ConfigError(f"interval {key[0].value} F={key[1]}-{key[2]} must be positive, got {value}",
                          key="scheme.hyperfine_intervals")
    return value


def _level_offsets(intervals: Mapping[IntervalKey, float], mode: SchemeMode) -> Dict[Tuple[Manifold, int], float]:
    # references: ground F=1 and excited F'=1 sit at 0
    offsets = {
        (Manifold.GROUND, 1): 0.0,
        (Manifold.GROUND, 2): _interval(intervals, (Manifold.GROUND, 1, 2)),
        (Manifold.EXCITED, 1): 0.0,
        (Manifold.EXCITED, 2): _interval(intervals, (Manifold.EXCITED, 1, 2)),
    }
    if mode is SchemeMode.FULL_ZEEMAN_24:
        offsets[(Manifold.EXCITED, 0)] = -_interval(intervals, (Manifold.EXCITED, 0, 1))
        offsets[(Manifold.EXCITED, 3)] = offsets[(Manifold.EXCITED, 2)] + _interval(
            intervals, (Manifold.EXCITED, 2, 3))
    return offsets


def build_level_scheme(cfg: Optional[LevelSchemeConfig] = None) -> LevelScheme:
    """Build and validate the basis for the configured mode"""
    cfg = cfg or LevelSchemeConfig()
    mode = SchemeMode(cfg.mode)
    if not cfg.gamma > 0:
        raise ConfigError(f"natural linewidth must be positive, got {cfg.gamma}", key="scheme.gamma")

    offsets = _level_offsets(cfg.hyperfine_intervals, mode)

    states: List[AtomicState] = []
    energies: List[float] = []
    for manifold in (Manifold.GROUND, Manifold.EXCITED):
        levels = SCALAR_LEVELS[manifold] if mode is SchemeMode.SCALAR_N4 else ALLOWED_F[manifold]
        for F in levels:
            m_values = (0,) if mode is SchemeMode.SCALAR_N4 else range(-F, F + 1)
            for mF in m_values:
                states.append(AtomicState(manifold, F, mF, len(states)))
                energies.append(offsets[(manifold, F)])

    g_factors = dict(cfg.g_factors)
    if mode is SchemeMode.FULL_ZEEMAN_24:
        for key in [(m, F) for m in (Manifold.GROUND, Manifold.EXCITED) for F in ALLOWED_F[m] if F > 0]:
            if key not in g_factors:
                raise ConfigError(f"missing g-factor for {key[0].value} F={key[1]}", key="scheme.g_factors")
        g_factors.setdefault((Manifold.EXCITED, 0), 0.0)

    branching = {}
    if mode is SchemeMode.SCALAR_N4:
        for Fe in SCALAR_LEVELS[Manifold.EXCITED]:
            ratios = tuple(float(x) for x in cfg.branching.get(Fe, (0.5, 0.5)))
            if len(ratios) != 2 or min(ratios) < 0 or abs(sum(ratios) - 1.0) > 1e-12:
                raise ConfigError(f"branching ratios of F'={Fe} must be two non-negative numbers "
                                  f"summing to 1, got {ratios}", key="scheme.branching")
            branching[Fe] = ratios

    scheme = LevelScheme(
        mode=mode,
        states=tuple(states),
        energies=np.array(energies),
        gamma=float(cfg.gamma),
        g_factors=MappingProxyType(g_factors),
        hyperfine_intervals=MappingProxyType(dict(cfg.hyperfine_intervals)),
        branching=MappingProxyType(branching),
    )
    scheme.energies.setflags(write=False)
    return scheme


def hyperfine_energy(scheme: LevelScheme, manifold: Manifold, F: int) -> float:
    """Offset of hyperfine level F from its manifold reference (ground F=1, excited F'=1), MHz"""
    for s in scheme.states:
        if s.manifold is manifold and s.F == F:
            return float(scheme.energies[s.index])
    # levels outside a ScalarN4 basis still have a defined position
    return _level_offsets(scheme.hyperfine_intervals, SchemeMode.FULL_ZEEMAN_24)[(manifold, F)]


def _stretched_norm() -> float:
    return dipole_element(2, 2, 3, 3, 1)


def dipole_couplings(scheme: LevelScheme) -> List[DipoleCoupling]:
    """All dipole-allowed ground->excited couplings, amplitudes normalized so the
    stretched F=2,mF=2 -> F'=3,mF'=3 transition carries 1"""
    if scheme.mode is SchemeMode.SCALAR_N4:
        return [DipoleCoupling(g, e, 0, 1.0)
                for g in scheme.indices(Manifold.GROUND)
                for e in scheme.indices(Manifold.EXCITED)]

    norm = _stretched_norm()
    couplings = []
    for g in scheme.states[:len(scheme.indices(Manifold.GROUND))]:
        for e in scheme.states:
            if e.manifold is not Manifold.EXCITED:
                continue
            q = e.mF - g.mF
            if abs(q) > 1:
                continue
            amp = dipole_element(g.F, g.mF, e.F, e.mF, q)
            if amp != 0.0:
                couplings.append(DipoleCoupling(g.index, e.index, q, amp / norm))
    return couplings


def dipole_matrices(scheme: LevelScheme) -> Dict[int, np.ndarray]:
    """q -> matrix with amplitude at [excited, ground]"""
    mats = {q: np.zeros((scheme.n, scheme.n)) for q in (-1, 0, 1)}
    for c in dipole_couplings(scheme):
        mats[c.q][c.excited, c.ground] = c.amplitude
    return mats


def transition_strength(scheme: LevelScheme, F_gnd: int, F_exc: int) -> float:
    """Relative strength of F -> F', summed over sublevels and q, normalized over F' for fixed F"""
    sums: Dict[int, float] = {}
    for c in dipole_couplings(scheme):
        g, e = scheme.states[c.ground], scheme.states[c.excited]
        if g.F == F_gnd:
            sums[e.F] = sums.get(e.F, 0.0) + c.amplitude ** 2
    total = sum(sums.values())
    return sums.get(F_exc, 0.0) / total if total else 0.0


def zeeman_shift(state: AtomicState, B_magnitude: float, scheme: LevelScheme) -> float:
    """Linear Zeeman shift gF * muB * B * mF in MHz"""
    if scheme.mode is not SchemeMode.FULL_ZEEMAN_24:
        raise UnsupportedModeError("Zeeman shifts need the FullZeeman24 basis")
    return scheme.g_factors[(state.manifold, state.F)] * config.MU_B_MHZ_PER_G * B_magnitude * state.mF


def zeeman_diagonal(scheme: LevelScheme, B_magnitude: float) -> np.ndarray:
    if scheme.mode is SchemeMode.SCALAR_N4 or B_magnitude == 0.0:
        return np.zeros(scheme.n)
    return np.array([zeeman_shift(s, B_magnitude, scheme) for s in scheme.states])


def decay_channels(scheme: LevelScheme) -> List[DecayChannel]:
    """Radiative lowering operators; sum_k L_k^dag L_k = gamma * (excited projector)"""
    n = scheme.n
    channels: List[DecayChannel] = []
    if scheme.mode is SchemeMode.SCALAR_N4:
        for Fe in scheme.levels(Manifold.EXCITED):
            e = scheme.index_of(Manifold.EXCITED, Fe)
            for k, Fg in enumerate((1, 2)):
                rate = scheme.branching[Fe][k] * scheme.gamma
                op = np.zeros((n, n))
                op[scheme.index_of(Manifold.GROUND, Fg), e] = np.sqrt(rate)
                channels.append(DecayChannel(f"F'={Fe}->F={Fg}", None, op))
        return channels

    root_gamma = np.sqrt(scheme.gamma)
    for q, d in dipole_matrices(scheme).items():
        # emission of a q photon lowers e -> g with the absorption amplitude transposed
        channels.append(DecayChannel(f"q={q:+d}", q, root_gamma * d.T))
    return channels
