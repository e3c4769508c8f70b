import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from splitdg.fluxes import Flux
from splitdg.linearized import (
    MAX_DOF,
    DensityWaveBase,
    PerturbationState,
    assemble_jacobian,
    dg_linearized_rhs,
    fd_density_perturbation_rate,
    fd_energy_rate,
    fd_linearized_rhs,
    kg_pressure_drift,
    linearization_consistency_check,
    reduced_energy,
    reduced_energy_rate,
    spectral_abscissa,
    symmetrized_energy_rate,
    symmetrizer,
)
from splitdg.sbp import make_sbp_operator

TWO_PI = 2 * np.pi
LINEARIZED_DG = [Flux.MKEP, Flux.KEEP_PE, Flux.CENTRAL, Flux.DUCROS]


def wave(amp=0.98):
    return lambda x: 1.0 + amp * np.sin(TWO_PI * x)


def dg_base(elements=4, N=3, V=0.1, P=20.0, profile=None):
    return DensityWaveBase.dg(profile or wave(), elements, make_sbp_operator(N), V, P)


def random_pert(rng, shape):
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    return PerturbationState(*rng.standard_normal((3,) + shape))


def random_fd_base(rng, cells, V, P=None):
    r = rng.uniform(0.05, 3.0, cells)
    return DensityWaveBase(r, V, P if P is not None else rng.uniform(0.5, 30.0), 1.0 / cells)


def test_reduced_energy_hand_value():
    base = DensityWaveBase(np.array([1.0]), 0.0, 20.0, 1.0)
    total, nodal = reduced_energy(PerturbationState(np.array([5.0]), np.array([0.2]), np.array([0.1])), base)
    assert nodal[0] == pytest.approx(0.01 / 56 + 0.02, rel=1e-15)
    assert total == pytest.approx(0.02017857142857, rel=1e-12)
    assert reduced_energy(PerturbationState.zeros((1,)), base)[0] == 0.0


@given(seed=st.integers(0, 2**31))
def test_reduced_energy_ignores_density(seed):
    rng = np.random.default_rng(seed)
    base = dg_base()
    pert = random_pert(rng, base.shape)
    other = PerturbationState(rng.standard_normal(base.shape), pert.u, pert.p)
    assert reduced_energy(pert, base)[0] == reduced_energy(other, base)[0]


def test_dg_reduced_energy_uses_quadrature():
    base = dg_base(elements=3, N=4, profile=lambda x: np.ones_like(x))
    pert = PerturbationState(np.zeros(base.shape), np.ones(base.shape), np.zeros(base.shape))
    assert reduced_energy(pert, base)[0] == pytest.approx(0.5 * 2.0, rel=1e-14)


def test_base_validation():
    with pytest.raises(ValueError):
        DensityWaveBase(np.array([1.0, -0.1]), 0.1, 1.0, 0.5)
    with pytest.raises(ValueError):
        DensityWaveBase(np.array([1.0, 1.0]), 0.1, 0.0, 0.5)
    with pytest.raises(ValueError):
        DensityWaveBase(np.ones((2, 3)), 0.1, 1.0, 0.5, make_sbp_operator(3))


# {{{ finite-difference schemes


@pytest.mark.parametrize("flux", [Flux.CENTRAL, Flux.DUCROS, Flux.MKEP, Flux.KEEP_PE])
def test_fd_zero_perturbation(flux, rng):
    base = random_fd_base(rng, 9, 0.7)
    out = fd_linearized_rhs(flux, base, PerturbationState.zeros(base.shape))
    assert not np.any(out.to_vector())


def test_fd_kg_zero_perturbation_and_advection_guard(rng):
    base = random_fd_base(rng, 9, 0.0)
    assert not np.any(fd_linearized_rhs(Flux.KG, base, PerturbationState.zeros(9)).to_vector())
    with pytest.raises(ValueError):
        fd_linearized_rhs(Flux.KG, random_fd_base(rng, 9, 0.3), PerturbationState.zeros(9))


def test_fd_split_equals_central_for_constant_base(rng):
    base = DensityWaveBase(np.full(12, 1.7), 0.4, 3.0, 1 / 12)
    pert = random_pert(rng, 12)
    a = fd_linearized_rhs(Flux.MKEP, base, pert).to_vector()
    b = fd_linearized_rhs(Flux.CENTRAL, base, pert).to_vector()
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-13)


def test_fd_central_rows_by_hand(rng):
    # density row: dx drho_e/dt + V Delta{rho}_e + Delta{r u}_e = 0
    base = random_fd_base(rng, 7, 0.6)
    pert = random_pert(rng, 7)
    out = fd_linearized_rhs(Flux.CENTRAL, base, pert)
    r, rho, u, p = base.r, pert.rho, pert.u, pert.p
    face = lambda a: 0.5 * (a + np.roll(a, -1))  # noqa: E731
    delta = lambda a: a - np.roll(a, 1)  # noqa: E731
    np.testing.assert_allclose(out.rho, -(base.V * delta(face(rho)) + delta(face(r * u))) / base.dx, rtol=1e-12)
    gP = base.gamma * base.P
    np.testing.assert_allclose(out.p, -(base.V * delta(face(p)) + gP * delta(face(u))) / base.dx, rtol=1e-12)
    r_t = -base.V * delta(face(r)) / base.dx
    ru_t = -(delta(face(p)) + base.V * delta(face(r * u))) / base.dx
    np.testing.assert_allclose(out.u, (ru_t - u * r_t) / r, rtol=1e-12, atol=1e-12)


def test_fd_central_closed_form_spec_grid():
    cells = 8
    x = np.arange(cells) / cells
    base = DensityWaveBase(1 + 0.5 * np.sin(TWO_PI * x), 1.0, 1.0, 1 / cells)
    pert = PerturbationState(np.zeros(cells), np.sin(TWO_PI * x), np.zeros(cells))
    computed, closed = fd_energy_rate(Flux.CENTRAL, base, pert)
    r, u = base.r, pert.u
    brute = 0.0
    for e in range(cells):
        n = (e + 1) % cells
        brute += (r[n] - r[e]) * (u[n] - u[e]) ** 2
    assert closed == pytest.approx(0.25 * base.V * brute, abs=1e-15)
    assert abs(computed - closed) <= 1e-12


@pytest.mark.parametrize("flux", [Flux.CENTRAL, Flux.DUCROS])
@given(seed=st.integers(0, 2**31), cells=st.integers(3, 40), V=st.floats(-2, 2))
def test_fd_central_energy_identity(flux, seed, cells, V):
    rng = np.random.default_rng(seed)
    base = random_fd_base(rng, cells, V)
    pert = random_pert(rng, cells)
    computed, closed = fd_energy_rate(flux, base, pert)
    assert abs(computed - closed) <= 1e-12 * max(1.0, np.abs(pert.to_vector()).max() ** 2)


def test_fd_central_half_factor_is_wrong(rng):
    # the closed form carries V/4; V/2 is off by a factor two on generic data
    base = random_fd_base(rng, 16, 1.0)
    pert = random_pert(rng, 16)
    computed, closed = fd_energy_rate(Flux.CENTRAL, base, pert)
    assert abs(closed) > 1e-3
    assert abs(computed - 2 * closed) > 1e-3


@given(seed=st.integers(0, 2**31), cells=st.integers(3, 40))
def test_fd_kg_energy_identity(seed, cells):
    rng = np.random.default_rng(seed)
    base = random_fd_base(rng, cells, 0.0)
    pert = random_pert(rng, cells)
    computed, closed = fd_energy_rate(Flux.KG, base, pert)
    assert abs(computed - closed) <= 1e-12 * max(1.0, abs(closed))


def test_fd_kg_constant_base_conserves(rng):
    base = DensityWaveBase(np.full(10, 0.8), 0.0, 5.0, 0.1)
    computed, closed = fd_energy_rate(Flux.KG, base, random_pert(rng, 10))
    assert abs(computed) <= 1e-13 and closed == 0.0


@pytest.mark.parametrize("flux", [Flux.MKEP, Flux.KEEP_PE])
@given(seed=st.integers(0, 2**31), cells=st.integers(3, 40), V=st.floats(-2, 2))
def test_fd_split_conserves_energy(flux, seed, cells, V):
    rng = np.random.default_rng(seed)
    base = random_fd_base(rng, cells, V)
    computed, closed = fd_energy_rate(flux, base, random_pert(rng, cells))
    assert abs(computed) <= 1e-12 and closed == 0.0


@given(seed=st.integers(0, 2**31), cells=st.integers(3, 40), V=st.floats(-2, 2))
def test_fd_density_convection_is_neutral(seed, cells, V):
    rng = np.random.default_rng(seed)
    base = random_fd_base(rng, cells, V)
    computed, coupling = fd_density_perturbation_rate(Flux.MKEP, base, random_pert(rng, cells))
    assert abs(computed - coupling) <= 1e-12 * max(1.0, abs(coupling))


# }}}


# {{{ DG schemes


@pytest.mark.parametrize("flux", LINEARIZED_DG)
def test_dg_zero_perturbation(flux):
    base = dg_base()
    assert not np.any(dg_linearized_rhs(flux, base, PerturbationState.zeros(base.shape)).to_vector())


def test_dg_rejects_kg_and_fd_base(rng):
    base = dg_base()
    with pytest.raises(ValueError):
        dg_linearized_rhs(Flux.KG, base, PerturbationState.zeros(base.shape))
    with pytest.raises(ValueError):
        dg_linearized_rhs(Flux.MKEP, random_fd_base(rng, 5, 0.1), PerturbationState.zeros(5))


def test_keep_pe_and_mkep_linearize_identically(rng):
    base = dg_base()
    pert = random_pert(rng, base.shape)
    np.testing.assert_array_equal(dg_linearized_rhs(Flux.KEEP_PE, base, pert).to_vector(),
                                  dg_linearized_rhs(Flux.MKEP, base, pert).to_vector())


def test_dg_mkep_density_wave_conserves_energy():
    base = dg_base()
    x = base.coordinates()
    pert = PerturbationState(np.cos(TWO_PI * x), np.sin(TWO_PI * x), np.sin(2 * TWO_PI * x))
    assert abs(reduced_energy_rate(Flux.MKEP, base, pert)) <= 1e-11


@pytest.mark.parametrize("flux", [Flux.MKEP, Flux.KEEP_PE])
@given(seed=st.integers(0, 2**31), elements=st.integers(1, 5), N=st.integers(1, 6), V=st.floats(-2, 2))
def test_dg_split_conserves_energy_random(flux, seed, elements, N, V):
    rng = np.random.default_rng(seed)
    op = make_sbp_operator(N)
    base = DensityWaveBase(rng.uniform(0.05, 3.0, (elements, op.n)), V, rng.uniform(0.5, 30.0),
                           2.0 / elements, op)
    assert abs(reduced_energy_rate(flux, base, random_pert(rng, base.shape))) <= 1e-11


def test_dg_central_produces_energy():
    # a single-harmonic u' gives zero by symmetry (the rate behaves like the
    # integral of r_x u_x^2, i.e. of cos^3); a second harmonic breaks it
    base = dg_base()
    x = base.coordinates()
    zero = np.zeros_like(x)
    single = PerturbationState(zero, np.sin(TWO_PI * x), zero)
    assert abs(reduced_energy_rate(Flux.CENTRAL, base, single)) <= 1e-12
    pert = PerturbationState(zero, np.sin(TWO_PI * x) + np.sin(2 * TWO_PI * x), zero)
    assert abs(reduced_energy_rate(Flux.CENTRAL, base, pert)) > 1e-3
    assert abs(reduced_energy_rate(Flux.MKEP, base, pert)) <= 1e-11


@pytest.mark.parametrize("flux", LINEARIZED_DG)
def test_linearization_matches_nonlinear_solver(flux, rng):
    base = dg_base()
    x = base.coordinates()
    pert = PerturbationState(np.cos(TWO_PI * x), np.sin(TWO_PI * x), np.cos(2 * TWO_PI * x))
    g1 = linearization_consistency_check(flux, base, pert, 1e-4)
    g2 = linearization_consistency_check(flux, base, pert, 5e-5)
    assert g1 <= 1e-6
    assert 3.0 <= g1 / g2 <= 5.0
    assert linearization_consistency_check(flux, base, PerturbationState.zeros(base.shape), 1e-5) == 0.0
    with pytest.raises(ValueError):
        linearization_consistency_check(flux, base, pert, 1e-2)


# }}}


# {{{ spectra


def test_zero_operator_abscissa():
    assert spectral_abscissa(np.zeros((6, 6))) == 0.0
    assert spectral_abscissa(np.diag([-1.0, 0.5, 0.2])) == pytest.approx(0.5)


def test_mkep_constant_base_is_neutrally_stable():
    base = dg_base(profile=lambda x: np.full_like(x, 1.3))
    J = assemble_jacobian(Flux.MKEP, base)
    assert J.shape == (3 * base.r.size,) * 2
    assert spectral_abscissa(J) <= 1e-10


def test_kg_density_wave_has_unstable_eigenvalue():
    base = dg_base()
    assert base.r.min() >= 0.02 - 1e-12
    assert spectral_abscissa(assemble_jacobian(Flux.KG, base, method="nonlinear")) > 0.0


def test_linearized_and_nonlinear_jacobians_agree():
    base = dg_base(elements=2, N=2)
    a = assemble_jacobian(Flux.MKEP, base)
    b = assemble_jacobian(Flux.MKEP, base, method="nonlinear", eps=1e-5)
    assert np.max(np.abs(a - b)) <= 1e-5 * np.max(np.abs(a))


def test_jacobian_size_cap():
    op = make_sbp_operator(8)
    base = DensityWaveBase(np.ones((MAX_DOF // 27 + 1, op.n)), 0.1, 1.0, 0.01, op)
    with pytest.raises(ValueError):
        assemble_jacobian(Flux.MKEP, base)
    with pytest.raises(ValueError):
        assemble_jacobian(Flux.MKEP, dg_base(), method="adjoint")


# }}}


# {{{ symmetrization


def test_symmetrizer_without_gradient():
    S = symmetrizer(1.3, 0.0, 2.0, V=0.4)
    assert not np.any(S.B_tilde) and not np.any(S.C_tilde)
    np.testing.assert_allclose(S.A_tilde, S.A_tilde.T, atol=1e-14)
    ev = np.sort(np.linalg.eigvalsh(S.A_tilde))
    np.testing.assert_allclose(ev, [0.4 - S.c, 0.4, 0.4 + S.c], atol=1e-14)


def test_symmetrizer_printed_entry():
    S = symmetrizer(1.0, 1.0, 1.4)
    assert S.c == pytest.approx(1.4)
    assert S.C_tilde[0, 1] == pytest.approx(5 * 1.4 / (4 * np.sqrt(1.4)), rel=1e-15)


@given(r=st.floats(0.1, 5), rx=st.floats(-3, 3), P=st.floats(0.1, 20))
def test_c_tilde_equals_b_minus_half_a_x(r, rx, P):
    # dA/dx by the chain rule through r, by central differences in r
    h = 1e-6 * r
    dA = (symmetrizer(r + h, 0, P).A_tilde - symmetrizer(r - h, 0, P).A_tilde) / (2 * h) * rx
    S = symmetrizer(r, rx, P)
    np.testing.assert_allclose(S.C_tilde, S.B_tilde - 0.5 * dA, atol=1e-6 * max(1.0, abs(rx)) * S.c)


@given(r=st.floats(0.1, 5), rx=st.floats(-3, 3), P=st.floats(0.1, 20), V=st.floats(-1, 1))
def test_symmetrizer_reproduces_linearized_system(r, rx, P, V):
    # S^-1 (A q_x + B q) S maps onto the symmetric form: compare A~ = S^-1 A S
    g = 1.4
    S = symmetrizer(r, rx, P, V)
    A = np.array([[V, r, 0.0], [0.0, V, 1.0 / r], [0.0, g * P, V]])
    Sm = np.linalg.inv(S.S_inv)
    np.testing.assert_allclose(S.S_inv @ A @ Sm, S.A_tilde, atol=1e-10 * max(1.0, S.c))


def test_symmetric_energy_conserved_for_constant_base(rng):
    base = dg_base(profile=lambda x: np.full_like(x, 0.9))
    for flux in (Flux.MKEP, Flux.CENTRAL):
        assert abs(symmetrized_energy_rate(flux, base, random_pert(rng, base.shape))) <= 1e-12 * 1e3


def test_symmetrizer_rejects_nonpositive_density():
    with pytest.raises(ValueError):
        symmetrizer(0.0, 0.0, 1.0)


# }}}


# {{{ KG pressure drift


def _drift(V=1.0, cells=(32, 64, 128, 256, 512)):
    return kg_pressure_drift(lambda x: 2 + np.sin(TWO_PI * x), lambda x: TWO_PI * np.cos(TWO_PI * x),
                             lambda x: -TWO_PI**2 * np.sin(TWO_PI * x), V, 1.0, cells)


def test_kg_drift_is_second_order():
    d = _drift()
    assert abs(d.orders[-1] - 2.0) <= 0.01
    assert np.all(d.orders >= 1.9)
    rel = [np.max(np.abs(m - p)) / np.max(np.abs(m)) for m, p in zip(d.measured, d.prediction)]
    ratios = np.array(rel[:-1]) / np.array(rel[1:])
    assert np.all(np.abs(ratios - 4.0) <= 0.3)


def test_kg_drift_vanishes_without_gradient_or_advection():
    d = kg_pressure_drift(lambda x: np.full_like(x, 1.5), np.zeros_like, np.zeros_like, 1.0, 1.0, [16])
    assert np.max(np.abs(d.measured[0])) <= 1e-12
    assert np.max(np.abs(_drift(V=0.0, cells=[16]).measured[0])) <= 1e-12


# }}}
