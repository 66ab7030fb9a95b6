import numpy as np
import pytest

from lifshitz.dispersion import (DRUDE, PLASMA, DispersionModel,
                                 eval_permittivity, symmetry_report,
                                 zeta2_eps_imag_axis)
from lifshitz.errors import DomainError, ValidationError


def test_plasma_zero_at_plasma_frequency():
    m = DispersionModel(PLASMA, omega_p=1.0)
    assert eval_permittivity(m, 1.0) == 0.0


def test_plasma_direct_substitution():
    m = DispersionModel(PLASMA, omega_p=1.0)
    assert abs(eval_permittivity(m, 2.0) - 0.75) < 1e-15


def test_drude_imaginary_axis_hand_value():
    # eps(i zeta) = 1 + wp^2/(zeta (zeta + 2 gamma)) = 1 + 1/1.2 at zeta = 1
    m = DispersionModel(DRUDE, omega_p=1.0, gamma=0.1)
    val = eval_permittivity(m, 1j)
    assert abs(val - (1.0 + 1.0 / 1.2)) < 1e-14
    assert val.imag == 0.0


def test_poles_raise():
    with pytest.raises(DomainError):
        eval_permittivity(DispersionModel(PLASMA, 1.0), 0.0)
    with pytest.raises(DomainError):
        eval_permittivity(DispersionModel(DRUDE, 1.0, 0.1), -0.2j)


def test_parameter_validation():
    with pytest.raises(ValidationError):
        DispersionModel(PLASMA, omega_p=-1.0)
    with pytest.raises(ValidationError):
        DispersionModel(DRUDE, omega_p=1.0, gamma=-0.1)
    # plasma ignores gamma
    assert DispersionModel(PLASMA, 1.0, gamma=0.3).gamma == 0.0


def _probes(n=100, seed=3):
    rng = np.random.RandomState(seed)
    return rng.uniform(0.2, 3.0, n) + 1j * rng.uniform(0.1, 3.0, n)


def test_plasma_symmetry_report():
    rep = symmetry_report(DispersionModel(PLASMA, 1.0), _probes())
    assert rep.even_in_omega and rep.real_on_imaginary_axis
    assert rep.max_violation < 1e-14


def test_drude_breaks_evenness_on_real_probes():
    m = DispersionModel(DRUDE, 1.0, gamma=0.1)
    rep = symmetry_report(m, np.linspace(0.3, 3.0, 50))
    assert not rep.even_in_omega
    assert rep.real_on_imaginary_axis
    # at omega = omega_p the difference eps(w) - eps(-w) is O(gamma), not tiny
    d = eval_permittivity(m, 1.0) - eval_permittivity(m, -1.0)
    assert abs(d) > 1e-2


def test_drude_gamma_zero_is_plasma():
    md = DispersionModel(DRUDE, 1.0, gamma=0.0)
    mp = DispersionModel(PLASMA, 1.0)
    for w in _probes(20):
        assert eval_permittivity(md, w) == eval_permittivity(mp, w)


def test_drude_imag_axis_real_and_above_one():
    m = DispersionModel(DRUDE, 1.0, gamma=0.25)
    for z in np.linspace(0.05, 10.0, 40):
        e = eval_permittivity(m, 1j * z)
        assert e.imag == 0.0
        assert e.real > 1.0


def test_drude_to_plasma_rate_linear_in_gamma():
    # |eps_D - eps_p| ~ 2 gamma wp^2/|w|^3 at fixed w: halving gamma halves it
    w = 1.7 + 0.4j
    mp = DispersionModel(PLASMA, 1.0)
    d1 = abs(eval_permittivity(DispersionModel(DRUDE, 1.0, 1e-3), w)
             - eval_permittivity(mp, w))
    d2 = abs(eval_permittivity(DispersionModel(DRUDE, 1.0, 5e-4), w)
             - eval_permittivity(mp, w))
    assert d1 / d2 == pytest.approx(2.0, rel=1e-3)


def test_reality_condition():
    # conj(eps(-conj(w))) == eps(w) for both models
    for m in (DispersionModel(PLASMA, 1.0), DispersionModel(DRUDE, 1.0, 0.2)):
        for w in _probes(50, seed=11):
            lhs = np.conj(eval_permittivity(m, -np.conj(w)))
            rhs = eval_permittivity(m, w)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_zeta2_eps_regular_at_origin():
    m = DispersionModel(DRUDE, 1.0, gamma=0.1)
    assert zeta2_eps_imag_axis(m, 0.0) == 0.0
    mp = DispersionModel(PLASMA, 2.0)
    assert zeta2_eps_imag_axis(mp, 0.0) == 4.0
