import pytest

from eit_nsim.atom.angular import dipole_element, reduced_hyperfine_element


def test_selection_rules():
    assert dipole_element(1, 0, 2, 0, 1) == 0.0        # m' != m + q
    assert dipole_element(1, 1, 3, 2, 1) == 0.0        # |F - F'| > 1
    assert dipole_element(2, 2, 3, 3, 1) != 0.0


def test_stretched_transition_is_largest():
    stretched = abs(dipole_element(2, 2, 3, 3, 1))
    for F in (1, 2):
        for Fe in range(max(0, F - 1), F + 2):
            for m in range(-F, F + 1):
                for q in (-1, 0, 1):
                    if abs(m + q) <= Fe:
                        assert abs(dipole_element(F, m, Fe, m + q, q)) <= stretched + 1e-12


def test_hyperfine_factors_sum_to_fine_structure_line():
    # sum over F' of |<F'||d||F>|^2 / (2F+1) is the same for both ground levels
    sums = {F: sum(reduced_hyperfine_element(Fe, F) ** 2 for Fe in range(max(0, F - 1), F + 2)) / (2 * F + 1)
            for F in (1, 2)}
    assert sums[1] == pytest.approx(sums[2], rel=1e-12)


def test_pi_transition_between_zero_sublevels_vanishes_for_equal_F():
    # <F 0|d_0|F 0> = 0 for F -> F' = F
    assert dipole_element(1, 0, 1, 0, 0) == pytest.approx(0.0, abs=1e-15)
    assert dipole_element(2, 0, 2, 0, 0) == pytest.approx(0.0, abs=1e-15)
