import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from trspec import ModelSpec
from trspec.classify import (
    QuarticCoefficients,
    Verdict,
    classify,
    classify_n2,
    goldstein_kac_rate,
    goldstein_kac_spec,
    random_walk_block_spec,
    random_walk_quartic,
    routh_hurwitz_quartic,
    turing_criterion,
)
from trspec.errors import (
    DimensionMismatchError,
    NonPositiveLambdaError,
    NonPositiveRatesError,
    PreconditionUnmetError,
)
from trspec.linalg import eigenvalues
from trspec.modes import mode_matrix, sigma_max, spectrum_table

from conftest import REFERENCE_MODELS, HYPERBOLIC_MODEL, TURING_MODEL, make
from oracles import matching_distance

SPEEDS = [0.1, 0.2, 0.3, 0.4, 0.5, -0.1, -0.2, -0.3, -0.4, -0.5]


def test_turing_example():
    rep = classify(make(*TURING_MODEL))
    assert rep.verdict is Verdict.TURING
    assert rep.dominant_modes == [-4, 4]
    sig = rep.sigma_profile.as_dict()
    assert all(sig[k] > rep.b and sig[k] > 0 for k in rep.dominant_modes)


def test_hyperbolic_example():
    rep = classify(make(*HYPERBOLIC_MODEL))
    assert rep.verdict is Verdict.HYPERBOLIC and rep.b == 2
    assert np.all(rep.sigma_profile.sigma < rep.b)


def test_stable_example():
    rep = classify(ModelSpec.create([0.5, -0.1], [[-2, 3], [-1, -1]]))
    assert rep.verdict is Verdict.STABLE and rep.dominant_modes == []


def test_unstable_reaction():
    rep = classify(ModelSpec.create([0.1, -0.1], [[1, 0], [0, -1]]))
    assert rep.verdict is Verdict.UNSTABLE_REACTION


def test_eventually_constant_flagged():
    B, v, _ = REFERENCE_MODELS["n2_eventually_constant"]
    rep = classify(make(B, v))
    assert rep.eventually_constant
    assert any("eventually constant" in w for w in rep.warnings)


def test_degenerate_velocities_warn():
    rep = classify(ModelSpec.create([0.1, 0.1], [[-1, 0.5], [0.5, -1]]))
    assert rep.verdict is Verdict.STABLE
    assert any("degenerate" in w for w in rep.warnings)


def test_report_dict():
    d = classify(make(*TURING_MODEL)).to_dict("profile.csv")
    assert d["verdict"] == "TuringPattern" and d["dominant_modes"] == [-4, 4]
    assert d["sigma_profile_csv"] == "profile.csv" and d["K_max"] == 484


def test_classify_needs_d1():
    with pytest.raises(DimensionMismatchError):
        classify(ModelSpec.create([[0.1, 0.2]], [[-1.0]]))


def test_n2_examples():
    assert classify_n2(ModelSpec.create([0.1, -0.1], [[3, 8], [-3, -7]])).verdict is Verdict.HYPERBOLIC
    assert classify_n2(ModelSpec.create([-0.5, -0.1], [[-5, 2], [-4, -1]])).verdict is Verdict.STABLE
    assert classify_n2(ModelSpec.create([0.1, 0.1], [[3, 8], [-3, -7]])).verdict is Verdict.STABLE
    with pytest.raises(DimensionMismatchError):
        classify_n2(make(*TURING_MODEL))


@given(st.integers(0, 100_000))
def test_n2_agreement(seed):
    rng = np.random.default_rng(seed)
    v = rng.choice(SPEEDS, 2, replace=False)
    spec = ModelSpec.create(v, rng.uniform(-10, 10, (2, 2)))
    assert classify(spec).verdict == classify_n2(spec).verdict


def _random_unstable(rng, N):
    while True:
        v = rng.choice(SPEEDS, N, replace=False)
        B = rng.uniform(-10, 10, (N, N))
        if eigenvalues(B).values.real.max() < -0.1:
            spec = ModelSpec.create(v, B)
            if sigma_max(spectrum_table(spec, 50)).sup > 0.05:
                return spec


@pytest.mark.parametrize("seed", range(8))
def test_dichotomy_exhaustive(seed):
    spec = _random_unstable(np.random.default_rng(seed), 3)
    assert classify(spec).verdict in (Verdict.TURING, Verdict.HYPERBOLIC)


def test_positive_diagonal_never_stable():
    rng = np.random.default_rng(11)
    hits = 0
    while hits < 5:
        B = rng.uniform(-10, 10, (3, 3))
        if eigenvalues(B).values.real.max() < 0 and np.diag(B).max() > 0:
            spec = ModelSpec.create(rng.choice(SPEEDS, 3, replace=False), B)
            assert classify(spec).verdict is not Verdict.STABLE
            hits += 1


def test_turing_criterion():
    B, v, _ = REFERENCE_MODELS["n3_turing_3"]
    spec = make(B, v)
    assert turing_criterion(spec)
    assert classify(spec).verdict is Verdict.TURING
    hyp = ModelSpec.create([0.1, -0.1], [[3, 8], [-3, -7]])
    assert not turing_criterion(hyp)
    with pytest.raises(PreconditionUnmetError):
        turing_criterion(ModelSpec.create([0.1, -0.1], [[1, 0], [0, -1]]))
    with pytest.raises(PreconditionUnmetError):
        turing_criterion(ModelSpec.create([0.5, -0.1], [[-2, 3], [-1, -1]]))


def test_routh_hurwitz_examples():
    ok, margins = routh_hurwitz_quartic((4, 6, 4, 1))
    assert ok and margins == (4, 20, 64, 64)
    assert not routh_hurwitz_quartic((0, 1, 1, 1))[0]
    assert routh_hurwitz_quartic(QuarticCoefficients(4, 6, 4, 1))[0]


@given(st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=4, max_size=4))
def test_routh_hurwitz_property(c):
    roots = np.roots([1.0, *c])
    margin = np.abs(roots.real).min()
    if margin < 1e-6:
        return  # a root on the imaginary axis: verdict is numerically ambiguous
    assert routh_hurwitz_quartic(c)[0] == bool(np.all(roots.real < 0))


def test_quartic_k0():
    nu = [[0.3, 0.1], [0.2, -0.4]]
    q = random_walk_quartic(1.0, 2.0, 0.5, 0.7, nu, k=0)
    det = 0.3 * -0.4 - 0.1 * 0.2
    assert q.a3 == pytest.approx(2 * 1.2 - (-0.1))
    assert q.a0 == pytest.approx(4 * 0.5 * 0.7 * det)


@pytest.mark.parametrize("k", [0, 1, 3, 7])
def test_quartic_matches_block_eigenvalues(k):
    nu = np.array([[0.3, -1.1], [0.8, -0.4]])
    args = (0.7, 1.3, 0.5, 0.9, nu)
    q = random_walk_quartic(*args, L=2.0, k=k)
    spec = random_walk_block_spec(*args, L=2.0)
    lam = eigenvalues(mode_matrix(spec, [k])).values
    assert matching_distance(q.roots(), lam) < 1e-8


def test_quartic_length_scaling():
    nu = [[0.3, 0.1], [0.2, -0.4]]
    a = random_walk_quartic(1.0, 2.0, 0.5, 0.7, nu, L=1.0, k=4)
    b = random_walk_quartic(1.0, 2.0, 0.5, 0.7, nu, L=2.0, k=8)
    assert_allclose(a.as_tuple(), b.as_tuple(), rtol=1e-12)


def test_quartic_rates_positive():
    with pytest.raises(NonPositiveRatesError):
        random_walk_quartic(1.0, 0.0, 0.5, 0.7, np.eye(2))
    with pytest.raises(NonPositiveRatesError):
        random_walk_quartic(1.0, 1.0, -0.5, 0.7, np.eye(2))


def test_goldstein_kac_rate():
    assert goldstein_kac_rate(3, 0.5) == -3
    assert goldstein_kac_rate(10, 0.5) == pytest.approx(-0.5063, abs=1e-4)
    assert goldstein_kac_rate(10, 0.5, L=2) == pytest.approx(-10 + math.sqrt(100 - math.pi ** 2 / 4))
    with pytest.raises(NonPositiveLambdaError) as info:
        goldstein_kac_rate(-1.0, 0.5)
    assert info.value.growth_rate == 2.0


@pytest.mark.parametrize("Lambda,v,L", [(1, 1, 1), (3, 0.5, 1), (10, 0.5, 1), (10, 0.5, 3), (0.5, 0.1, 1)])
def test_goldstein_kac_sup_sigma(Lambda, v, L):
    spec = goldstein_kac_spec(Lambda, v, L)
    table = spectrum_table(spec, 40)
    nonzero = table.ks[:, 0] != 0
    sup = table.lambdas[nonzero].real.max()
    assert sup == pytest.approx(goldstein_kac_rate(Lambda, v, L), abs=1e-10)
    assert matching_distance(table.at(0), [0, -2 * Lambda]) < 1e-12
