import math

import numpy as np
import pytest

from leohfl.aggregation import (AggregatorConfig, ClientReport, ParamVector, Scheme, global_merge,
                                global_weights, loss_term, mass_term, merge, subregion_weights)
from leohfl.errors import (AllZeroMass, EmptyReportSet, LayoutMismatch, UnnormalizedWeights,
                           ZeroTotalLoss)

TAG = "test-layout"


def vec(values, tag=TAG):
    return ParamVector(np.asarray(values, dtype=float), tag)


def report(d, k, loss, values=(0.0,)):
    return ClientReport(vec(values), d, k, loss)


def random_reports(rng, n=None):
    n = int(rng.integers(1, 12)) if n is None else n
    return [report(int(rng.integers(1, 500)), int(rng.integers(1, 100)), float(rng.uniform(1e-4, 2.0)))
            for _ in range(n)]


# subregion_weights

@pytest.mark.parametrize("scheme", list(Scheme))
def test_identical_reports_split_evenly(scheme):
    w = subregion_weights([report(50, 5, 0.3), report(50, 5, 0.3)], AggregatorConfig(scheme))
    assert np.allclose(w, [0.5, 0.5], atol=1e-15)


def test_mass_only_example():
    cfg = AggregatorConfig(Scheme.FEDSEL, beta=1.0, kappa=1.0)
    w = subregion_weights([report(100, 4, 0.1), report(200, 2, 0.9)], cfg)
    assert np.allclose(w, [0.5, 0.5], atol=1e-15)


def test_loss_only_example():
    cfg = AggregatorConfig(Scheme.FEDSEL, beta=0.0)
    w = subregion_weights([report(10, 1, 1.0), report(999, 9, 3.0)], cfg)
    assert np.allclose(w, [0.75, 0.25], atol=1e-15)
    assert np.allclose(subregion_weights([report(10, 1, 1.0), report(999, 9, 3.0)],
                                         AggregatorConfig(Scheme.FEDLOL)), [0.75, 0.25])


def test_blend_by_hand():
    reps = [report(100, 4, 1.0), report(300, 1, 3.0)]
    w = subregion_weights(reps, AggregatorConfig(Scheme.FEDSEL, beta=0.5, kappa=0.5))
    m = np.array([100 * 2.0, 300 * 1.0])
    expected = 0.5 * m / m.sum() + 0.5 * np.array([0.75, 0.25])
    assert np.allclose(w, expected, atol=1e-15)


def test_fedavg_is_sample_share():
    w = subregion_weights([report(10, 90, 0.1), report(30, 1, 5.0)], AggregatorConfig(Scheme.FEDAVG))
    assert np.allclose(w, [0.25, 0.75])


def test_fedindi_by_hand():
    reps = [report(100, 4, 1.0), report(300, 1, 3.0)]
    w = subregion_weights(reps, AggregatorConfig(Scheme.FEDINDI, kappa=1.0))
    prod = np.array([0.25, 0.75]) * np.array([0.8, 0.2]) * np.array([0.75, 0.25])
    assert np.allclose(w, prod / prod.sum())


@pytest.mark.parametrize("scheme", list(Scheme))
def test_single_report_passes_through(scheme):
    assert subregion_weights([report(5, 2, 0.0)], AggregatorConfig(scheme)).tolist() == [1.0]


def test_errors():
    with pytest.raises(EmptyReportSet):
        subregion_weights([], AggregatorConfig())
    with pytest.raises(ZeroTotalLoss):
        subregion_weights([report(5, 2, 0.0), report(6, 2, 0.0)], AggregatorConfig(Scheme.FEDSEL))
    with pytest.raises(AllZeroMass):
        subregion_weights([report(5, 0, 0.1), report(6, 0, 0.2)],
                          AggregatorConfig(Scheme.FEDAVEP, kappa=1.0))
    with pytest.raises(ValueError):
        AggregatorConfig(beta=1.5)
    with pytest.raises(ValueError):
        Scheme.parse("fedprox")
    with pytest.raises(ValueError):
        ClientReport(vec([0.0]), 1, 1, -0.1)


def test_simplex_property_all_schemes():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        reps = random_reports(rng)
        beta, kappa = float(rng.uniform(0, 1)), float(rng.uniform(0, 2))
        for scheme in Scheme:
            w = subregion_weights(reps, AggregatorConfig(scheme, beta, kappa))
            assert abs(math.fsum(w) - 1.0) <= 1e-9
            assert np.all(w >= 0) and np.all(w <= 1)


def test_term_normalization():
    rng = np.random.default_rng(1)
    for _ in range(200):
        reps = random_reports(rng, int(rng.integers(2, 12)))
        beta = float(rng.uniform(0, 1))
        assert math.fsum((1 - beta) * loss_term(reps)) == pytest.approx(1 - beta, abs=1e-12)
        assert math.fsum(beta * mass_term(reps, 0.5)) == pytest.approx(beta, abs=1e-12)


def test_scale_invariance_of_sample_weights():
    rng = np.random.default_rng(2)
    for _ in range(50):
        reps = random_reports(rng, 5)
        scaled = [report(r.data_count * 7, r.epochs, r.loss) for r in reps]
        for scheme in (Scheme.FEDAVG, Scheme.FEDAVEP):
            cfg = AggregatorConfig(scheme)
            assert np.allclose(subregion_weights(reps, cfg), subregion_weights(scaled, cfg), atol=1e-15)


def test_fedavep_with_equal_epochs_is_fedavg():
    rng = np.random.default_rng(3)
    for _ in range(50):
        reps = [report(int(d), 7, 0.5) for d in rng.integers(1, 500, 6)]
        a = subregion_weights(reps, AggregatorConfig(Scheme.FEDAVEP, kappa=0.8))
        b = subregion_weights(reps, AggregatorConfig(Scheme.FEDAVG))
        assert np.array_equal(a, b)


def test_more_epochs_more_weight_under_mass_term():
    cfg = AggregatorConfig(Scheme.FEDAVEP, kappa=0.5)
    w = subregion_weights([report(100, 16, 0.2), report(100, 4, 0.2)], cfg)
    assert w[0] == pytest.approx(2 / 3)


# global_weights

def test_global_weights_examples():
    assert global_weights([[report(10, 3, 0.1)]], 0.5).tolist() == [1.0]
    w = global_weights([[report(100, 4, 0.1)], [report(200, 2, 0.1), report(100, 2, 0.4)]], 1.0)
    assert np.allclose(w, [0.4, 0.6])
    same = [[report(10, 4, 0.1)] for _ in range(4)]
    assert np.allclose(global_weights(same, 0.5), 0.25)


def test_global_weights_empty_gateway_gets_zero():
    w = global_weights([[report(10, 4, 0.1)], []], 0.5)
    assert w.tolist() == [1.0, 0.0]
    with pytest.raises(AllZeroMass):
        global_weights([[], []], 0.5)


def test_cloud_kappa():
    assert AggregatorConfig(Scheme.FEDAVG, kappa=0.7).cloud_kappa == 0.0
    assert AggregatorConfig(Scheme.FEDSEL, kappa=0.7).cloud_kappa == 0.7


# merge

def test_merge_examples():
    v = vec([1.0, -2.0, 3.5])
    assert merge([ClientReport(v, 1, 1, 0.1)], [1.0]).values.tolist() == v.values.tolist()
    neg = vec(-v.values)
    assert np.array_equal(global_merge([v, neg], [0.5, 0.5]).values, np.zeros(3))


def test_merge_matches_dot_product_oracle():
    rng = np.random.default_rng(4)
    vs = [vec(rng.normal(size=200)) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    w[-1] = 1.0 - w[0] - w[1]
    out = global_merge(vs, w).values
    stacked = np.stack([v.values for v in vs])
    for i in range(200):
        assert out[i] == pytest.approx(math.fsum(w * stacked[:, i]), abs=1e-12)


def test_merge_of_identical_vectors_is_identity():
    rng = np.random.default_rng(5)
    v = vec(rng.normal(size=50))
    for _ in range(20):
        w = rng.dirichlet(np.ones(4))
        w[-1] = 1.0 - w[:-1].sum()
        assert np.allclose(global_merge([v] * 4, w).values, v.values, atol=1e-14)


def test_merge_errors():
    with pytest.raises(LayoutMismatch):
        global_merge([vec([1.0]), vec([1.0], tag="other")], [0.5, 0.5])
    with pytest.raises(UnnormalizedWeights):
        global_merge([vec([1.0]), vec([1.0])], [0.5, 0.6])
    with pytest.raises(UnnormalizedWeights):
        global_merge([vec([1.0]), vec([1.0])], [1.0])
    with pytest.raises(EmptyReportSet):
        global_merge([], [])


def test_merge_is_bit_stable():
    rng = np.random.default_rng(6)
    vs = [vec(rng.normal(size=1000)) for _ in range(5)]
    w = np.full(5, 0.2)
    assert global_merge(vs, w).digest() == global_merge(vs, w).digest()


def test_param_vector_validation():
    assert vec(np.zeros(10)).n_bits == 320
    with pytest.raises(ValueError):
        vec([np.nan])
    with pytest.raises(ValueError):
        ParamVector(np.zeros((2, 2)), TAG)
