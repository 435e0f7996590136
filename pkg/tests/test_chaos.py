import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from baptista import _prng
from baptista.chaos import (
    MapKind,
    MapSpec,
    OrbitState,
    PerturbConfig,
    iterate,
    iterate_n,
    lyapunov_pwlcm,
    orbit,
    random_pwlcm,
)
from baptista.errors import DomainError

OFF = PerturbConfig.off()


def step(mapspec, x, perturb=OFF):
    return iterate(OrbitState.start(x, perturb), mapspec, perturb).x


def test_logistic_peak():
    assert step(MapSpec.logistic(4.0), 0.5) == 1.0


def test_tent_apex_takes_first_branch():
    m = MapSpec.skew_tent(0.37)
    assert step(m, 0.37) == 1.0


def test_tent_second_branch():
    assert step(MapSpec.skew_tent(0.25), 0.3) == pytest.approx((1 - 0.3) / (1 - 0.25), rel=1e-15)


def test_tent_matches_two_branch_pwlcm():
    tent = MapSpec.skew_tent(0.37)
    pw = MapSpec.pwlcm([(0.37, 0), (1.0, 1)])
    xs = np.random.default_rng(1).random(1000)
    assert all(tent(x) == pw(x) for x in xs)
    assert np.array_equal(orbit(tent, 0.123, 5000), orbit(pw, 0.123, 5000))


def test_iterate_n_zero_is_identity():
    s = OrbitState.start(0.3)
    assert iterate_n(s, MapSpec.skew_tent(0.4), OFF, 0) == s


def test_logistic_fixed_chain():
    s = iterate_n(OrbitState.start(0.5), MapSpec.logistic(4.0), OFF, 2)
    assert s.x == 0.0
    assert s.total_iters == 2


@pytest.mark.parametrize("perturb", [OFF, PerturbConfig(True, 16, 99, 8), PerturbConfig(True, 1, 5, 16)])
@pytest.mark.parametrize("mapspec", [
    MapSpec.skew_tent(0.37),
    MapSpec.logistic(3.99),
    MapSpec.pwlcm([(0.2, 1), (0.5, 0), (0.9, 1), (1.0, 0)]),
])
def test_batch_matches_single_steps(mapspec, perturb):
    s = OrbitState.start(0.123, perturb)
    one = s
    for _ in range(1000):
        one = iterate(one, mapspec, perturb)
    batch = iterate_n(s, mapspec, perturb, 1000)
    assert batch == one


def test_orbit_continues_from_state():
    m, pert = MapSpec.skew_tent(0.37), PerturbConfig(True, 16, 3, 8)
    full = orbit(m, 0.2, 300, pert)
    s = iterate_n(OrbitState.start(0.2, pert), m, pert, 100)
    assert np.array_equal(orbit(m, None, 200, pert, state=s), full[100:])


def test_equal_states_evolve_identically():
    m, pert = MapSpec.skew_tent(0.61), PerturbConfig(True, 7, 11, 8)
    a = iterate_n(OrbitState(0.4, 3, 5, 12345), m, pert, 777)
    b = iterate_n(OrbitState(0.4, 3, 5, 12345), m, pert, 777)
    assert a == b


def test_out_of_domain_state_rejected():
    with pytest.raises(DomainError):
        iterate(OrbitState(1.5), MapSpec.skew_tent(0.5), OFF)
    with pytest.raises(DomainError):
        orbit(MapSpec.logistic(4.0), -0.1, 10)


@pytest.mark.parametrize("bad", [
    lambda: MapSpec.logistic(3.5),
    lambda: MapSpec.logistic(4.01),
    lambda: MapSpec.skew_tent(0.0),
    lambda: MapSpec.skew_tent(1.0),
    lambda: MapSpec.pwlcm([(1.0, 0)]),
    lambda: MapSpec.pwlcm([(0.5, 0), (0.4, 1), (1.0, 0)]),
    lambda: MapSpec.pwlcm([(0.5, 0), (0.9, 1)]),
    lambda: MapSpec.pwlcm([(0.5, 2), (1.0, 0)]),
])
def test_invalid_maps_rejected_at_construction(bad):
    with pytest.raises(ValueError):
        bad()


def _vector_step(kind, x, param=None, bps=None):
    # independent numpy evaluation of the same arithmetic
    if kind is MapKind.LOGISTIC:
        return param * (x * (1 - x))
    out = np.empty_like(x)
    lo = 0.0
    done = np.zeros(x.shape, bool)
    for hi, anchor in bps:
        sel = ~done & (x <= hi)
        out[sel] = (x[sel] - lo) / (hi - lo) if anchor == 0 else (hi - x[sel]) / (hi - lo)
        done |= sel
        lo = hi
    return out


@pytest.mark.parametrize("mapspec", [
    MapSpec.logistic(4.0),
    MapSpec.skew_tent(0.37),
    MapSpec.pwlcm([(0.1, 0), (0.35, 1), (0.8, 0), (1.0, 1)]),
])
def test_interval_closure_many_starts(mapspec):
    x = np.random.default_rng(2).random(10**6)
    bps = mapspec.breakpoints if mapspec.kind is MapKind.PWLCM else [(mapspec.p, 0), (1.0, 1)]
    for _ in range(20):
        x = _vector_step(mapspec.kind, x, mapspec.b, bps)
        assert x.min() >= 0.0 and x.max() <= 1.0
    # spot check the vector oracle against the library map
    y = np.random.default_rng(3).random(200)
    assert np.array_equal(_vector_step(mapspec.kind, y, mapspec.b, bps), [mapspec(v) for v in y])


@given(st.floats(0.0, 1.0), st.floats(0.01, 0.99), st.integers(1, 64), st.integers(0, 2**64 - 1))
def test_perturbed_iterates_stay_in_interval(x, p, delta, seed):
    pert = PerturbConfig(True, delta, seed, 16)
    s = iterate_n(OrbitState.start(x, pert), MapSpec.skew_tent(p), pert, 200)
    assert 0.0 <= s.x <= 1.0


def test_perturbation_happens_every_delta_steps():
    m = MapSpec.skew_tent(0.37)
    pert = PerturbConfig(True, 4, 21, 8)
    s = OrbitState.start(0.3, pert)
    prng = _prng.seed_state(21)
    x = 0.3
    for i in range(1, 13):
        s = iterate(s, m, pert)
        x = m(x)
        if i % 4 == 0:
            prng, r = _prng.xorshift64star(prng)
            x += (r & 0xFF) * 2.0**-52
            if x > 1.0:
                x -= 1.0
        assert s.x == x


def test_lyapunov_symmetric_tent_is_ln2():
    assert lyapunov_pwlcm(MapSpec.skew_tent(0.5)) == math.log(2)


def test_lyapunov_skew_tent_closed_form():
    expected = -0.3 * math.log(0.3) - 0.7 * math.log(0.7)
    assert lyapunov_pwlcm(MapSpec.skew_tent(0.3)) == pytest.approx(expected, rel=1e-15)


def test_lyapunov_equal_branches():
    m = MapSpec.pwlcm([(0.25, 0), (0.5, 1), (0.75, 0), (1.0, 1)])
    assert lyapunov_pwlcm(m) == pytest.approx(math.log(4), rel=1e-15)


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_lyapunov_bounds_random_pwlcm(m, seed):
    spec = random_pwlcm(np.random.default_rng(seed), m)
    lam = lyapunov_pwlcm(spec)
    assert 0.0 < lam <= math.log(m) + 1e-12


def test_lyapunov_rejects_logistic():
    with pytest.raises(ValueError):
        lyapunov_pwlcm(MapSpec.logistic(4.0))


def test_dyadic_tent_collapses_without_perturbation():
    # every double is dyadic, so the symmetric tent reaches 0 in finitely many steps
    xs = orbit(MapSpec.skew_tent(0.5), 0.1234567, 200)
    assert xs[-1] == 0.0


def test_perturbation_rescues_symmetric_tent():
    xs = orbit(MapSpec.skew_tent(0.5), 0.1234567, 10**5, PerturbConfig(True, 1, 5, 16))
    assert np.count_nonzero(xs == 0.0) == 0
    assert 0.45 < xs.mean() < 0.55
