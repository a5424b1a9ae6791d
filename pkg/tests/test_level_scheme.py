import numpy as np
import pytest

from eit_nsim.atom.level_scheme import (
    LevelSchemeConfig, Manifold, SchemeMode, build_level_scheme, decay_channels, default_intervals,
    dipole_couplings, dipole_matrices, hyperfine_energy, transition_strength, zeeman_diagonal, zeeman_shift,
)
from eit_nsim.errors import ConfigError, UnsupportedModeError


def test_scalar_basis(scalar_scheme):
    assert scalar_scheme.n == 4
    assert scalar_scheme.levels(Manifold.GROUND) == (1, 2)
    assert scalar_scheme.levels(Manifold.EXCITED) == (1, 2)
    np.testing.assert_allclose(scalar_scheme.energies, [0.0, 6834.682611, 0.0, 156.9])


def test_full_basis(full_scheme):
    assert full_scheme.n == 24
    assert len(full_scheme.indices(Manifold.GROUND)) == 8
    assert full_scheme.levels(Manifold.EXCITED) == (0, 1, 2, 3)
    assert full_scheme.index_of(Manifold.EXCITED, 3, 3) == 23
    assert full_scheme.states[5].label == "F=2,mF=+0"


def test_excited_hyperfine_positions(full_scheme):
    assert hyperfine_energy(full_scheme, Manifold.EXCITED, 0) == pytest.approx(-72.218)
    assert hyperfine_energy(full_scheme, Manifold.EXCITED, 2) == pytest.approx(156.9)
    assert hyperfine_energy(full_scheme, Manifold.EXCITED, 3) == pytest.approx(423.55)


def test_scalar_scheme_still_places_missing_levels(scalar_scheme):
    assert hyperfine_energy(scalar_scheme, Manifold.EXCITED, 3) == pytest.approx(423.55)


def test_energies_read_only(scalar_scheme):
    with pytest.raises(ValueError):
        scalar_scheme.energies[0] = 1.0


@pytest.mark.parametrize("F, Fe, expected", [
    (2, 3, 7 / 10), (2, 2, 1 / 4), (2, 1, 1 / 20),
    (1, 2, 5 / 12), (1, 1, 5 / 12), (1, 0, 1 / 6),
])
def test_d2_relative_line_strengths(full_scheme, F, Fe, expected):
    assert transition_strength(full_scheme, F, Fe) == pytest.approx(expected, rel=1e-9)


def test_forbidden_line_strength_is_zero(full_scheme):
    assert transition_strength(full_scheme, 1, 3) == 0.0
    assert transition_strength(full_scheme, 2, 0) == 0.0


def test_sum_rule_per_excited_sublevel(full_scheme):
    totals = np.zeros(full_scheme.n)
    for c in dipole_couplings(full_scheme):
        totals[c.excited] += c.amplitude ** 2
    np.testing.assert_allclose(totals[full_scheme.indices(Manifold.EXCITED)], 1.0, atol=1e-12)


def test_sum_rule_per_ground_sublevel(full_scheme):
    totals = np.zeros(full_scheme.n)
    for c in dipole_couplings(full_scheme):
        totals[c.ground] += c.amplitude ** 2
    ground = totals[full_scheme.indices(Manifold.GROUND)]
    assert len(ground) == 8
    np.testing.assert_allclose(ground, ground[0], rtol=1e-12)
    # four excited sublevels per ground sublevel on a J=1/2 -> 3/2 line
    assert ground[0] == pytest.approx(2.0, rel=1e-12)


def test_dipole_matrices_respect_delta_m(full_scheme):
    for q, d in dipole_matrices(full_scheme).items():
        for e, g in zip(*np.nonzero(d)):
            assert full_scheme.states[e].mF - full_scheme.states[g].mF == q


@pytest.mark.parametrize("mode", [SchemeMode.SCALAR_N4, SchemeMode.FULL_ZEEMAN_24])
def test_decay_channels_trace_rate(mode):
    scheme = build_level_scheme(LevelSchemeConfig(mode=mode))
    total = sum(ch.operator.conj().T @ ch.operator for ch in decay_channels(scheme))
    np.testing.assert_allclose(total, scheme.gamma * scheme.projector(Manifold.EXCITED), atol=1e-12)


def test_zeeman_shifts(full_scheme):
    s = full_scheme.states[full_scheme.index_of(Manifold.GROUND, 2, 2)]
    assert zeeman_shift(s, 1.0, full_scheme) == pytest.approx(0.5 * 1.39962 * 2, rel=1e-4)
    assert np.all(zeeman_diagonal(full_scheme, 0.0) == 0.0)


def test_zeeman_needs_full_basis(scalar_scheme):
    with pytest.raises(UnsupportedModeError):
        zeeman_shift(scalar_scheme.states[0], 1.0, scalar_scheme)


def test_rejects_bad_configs():
    with pytest.raises(ConfigError, match="scheme.gamma"):
        build_level_scheme(LevelSchemeConfig(gamma=0.0))
    intervals = default_intervals()
    intervals[(Manifold.EXCITED, 1, 2)] = -1.0
    with pytest.raises(ConfigError, match="hyperfine"):
        build_level_scheme(LevelSchemeConfig(hyperfine_intervals=intervals))
    with pytest.raises(ConfigError, match="branching"):
        build_level_scheme(LevelSchemeConfig(branching={1: (0.7, 0.7), 2: (0.5, 0.5)}))


def test_missing_state_lookup(scalar_scheme):
    with pytest.raises(KeyError):
        scalar_scheme.index_of(Manifold.EXCITED, 3)
