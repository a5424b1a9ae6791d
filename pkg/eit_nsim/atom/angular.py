"""
Angular-momentum factors of the D2 line (J=1/2 -> J'=3/2, I=3/2), evaluated exactly with
sympy and cached as floats. Amplitudes are in units of the fine-structure reduced element.
"""
from functools import lru_cache
from sympy import Rational, sqrt
from sympy.physics.wigner import wigner_3j, wigner_6j

J_GROUND = Rational(1, 2)
J_EXCITED = Rational(3, 2)
I_NUCLEAR = Rational(3, 2)


@lru_cache(maxsize=None)
def reduced_hyperfine_element(F_exc: int, F_gnd: int) -> float:
    """<J' I F'||d||J I F> / <J'||d||J>"""
    phase = (-1) ** int(J_EXCITED + I_NUCLEAR + F_gnd + 1)
    value = phase * sqrt((2 * F_exc + 1) * (2 * F_gnd + 1)) * wigner_6j(
        J_EXCITED, F_exc, I_NUCLEAR, F_gnd, J_GROUND, 1)
    return float(value)


@lru_cache(maxsize=None)
def dipole_element(F_gnd: int, m_gnd: int, F_exc: int, m_exc: int, q: int) -> float:
    """<F' m'|d_q|F m> by Wigner-Eckart; nonzero only for m' = m + q and |F - F'| <= 1"""
    if m_exc != m_gnd + q or abs(F_exc - F_gnd) > 1:
        return 0.0
    three_j = wigner_3j(F_exc, 1, F_gnd, -m_exc, q, m_gnd)
    if three_j == 0:
        return 0.0
    return float((-1) ** (F_exc - m_exc) * three_j) * reduced_hyperfine_element(F_exc, F_gnd)
