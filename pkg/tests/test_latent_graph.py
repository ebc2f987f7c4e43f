import math

import numpy as np
import pytest

from maskgcn import autodiff as ad
from maskgcn.errors import ConfigError
from maskgcn.latent_graph import (
    DIST_EPS,
    GraphLearnerParams,
    embed,
    init_graph_learner,
    snapshot_graph,
    soft_adjacency,
)

from conftest import finite_diff_grad, max_rel_err


def _edge_law(d, t, theta):
    """Independent recomputation of the declared edge formula."""
    return 1.0 / (1.0 + math.exp(t * d + theta))


class TestEmbed:
    def test_zero_params_give_zero_embedding(self, rng):
        p = init_graph_learner(5, seed=0)
        for w in (p.w1, p.b1, p.w2, p.b2):
            w.data[...] = 0.0
        out = embed(ad.Value(rng.uniform(-1, 1, (4, 5))), p)
        np.testing.assert_array_equal(out.data, np.zeros((4, 8)))

    def test_single_node_shape(self, rng):
        p = init_graph_learner(5, seed=1)
        assert embed(ad.Value(rng.uniform(-1, 1, (1, 5))), p).data.shape == (1, 8)

    def test_width_mismatch(self, rng):
        p = init_graph_learner(5, seed=1)
        with pytest.raises(ConfigError):
            embed(ad.Value(rng.uniform(-1, 1, (4, 7))), p)

    def test_grad_wrt_weights_matches_finite_differences(self, rng):
        x = rng.uniform(-1, 1, (5, 4))
        p = init_graph_learner(4, hidden=6, embed_dim=3, seed=2)

        def loss_with(w1):
            q = GraphLearnerParams(
                w1=ad.Parameter(w1, "graph.w1"), b1=ad.Parameter(p.b1.data, "graph.b1"),
                w2=ad.Parameter(p.w2.data, "graph.w2"), b2=ad.Parameter(p.b2.data, "graph.b2"),
                temperature_raw=p.temperature_raw, threshold=p.threshold,
            )
            return ad.sum(embed(ad.Value(x), q)).item()

        ad.backward(ad.sum(embed(ad.Value(x), p)))
        fd = finite_diff_grad(loss_with, p.w1.data.copy())
        assert max_rel_err(p.w1.grad, fd) < 1e-5


class TestSoftAdjacency:
    def test_zero_distance_gives_half(self):
        xhat = ad.Value(np.zeros((3, 2)))
        g = soft_adjacency(xhat, ad.constant(5.0), ad.constant(0.0))
        np.testing.assert_allclose(np.diag(g.weights.data), 0.5, atol=1e-15)

    def test_unit_distance_unit_temperature(self):
        xhat = ad.Value([[0.0], [1.0]])
        g = soft_adjacency(xhat, ad.constant(1.0), ad.constant(0.0))
        expected = _edge_law(math.sqrt(1.0 + DIST_EPS), 1.0, 0.0)
        assert g.weights.data[0, 1] == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(1.0 / (1.0 + math.e), abs=1e-9)

    def test_far_tail(self):
        xhat = ad.Value([[0.0], [50.0]])
        g = soft_adjacency(xhat, ad.constant(1.0), ad.constant(0.0))
        assert g.weights.data[0, 1] < 1e-20

    def test_entries_in_open_unit_interval(self, rng):
        xhat = ad.Value(rng.uniform(-2, 2, (6, 4)))
        w = soft_adjacency(xhat, ad.constant(2.0), ad.constant(0.5)).weights.data
        assert np.all(w > 0.0) and np.all(w < 1.0)

    def test_symmetry_exact_and_diagonal_law(self, rng):
        theta = 0.7
        xhat = ad.Value(rng.uniform(-2, 2, (7, 3)))
        w = soft_adjacency(xhat, ad.constant(1.3), ad.constant(theta)).weights.data
        assert np.array_equal(w, w.T)
        np.testing.assert_allclose(np.diag(w), _edge_law(0.0, 1.3, theta), atol=1e-15)

    def test_monotone_decreasing_in_distance(self):
        positions = np.array([[0.0], [0.5], [1.5], [4.0]])
        xhat = ad.Value(positions)
        w = soft_adjacency(xhat, ad.constant(1.0), ad.constant(0.0)).weights.data
        weights_from_origin = w[0, 1:]
        assert np.all(np.diff(weights_from_origin) < 0)

    def test_doubling_temperature_equals_doubling_distance(self):
        distances = [0.25, 0.5, 1.0, 2.0, 3.0]
        for d in distances:
            one = _edge_law(d, 2.0, 0.0)
            other = _edge_law(2.0 * d, 1.0, 0.0)
            assert one == pytest.approx(other, abs=1e-15)
        # and through the module itself, with embeddings at the right spots
        for d in distances:
            raw = math.sqrt(max(d * d - DIST_EPS, 0.0))
            xa = ad.Value([[0.0], [raw]])
            w_t2 = soft_adjacency(xa, ad.constant(2.0), ad.constant(0.0)).weights.data[0, 1]
            raw2 = math.sqrt(max(4 * d * d - DIST_EPS, 0.0))
            xb = ad.Value([[0.0], [raw2]])
            w_t1 = soft_adjacency(xb, ad.constant(1.0), ad.constant(0.0)).weights.data[0, 1]
            assert w_t2 == pytest.approx(w_t1, abs=1e-12)

    def test_grads_wrt_temperature_threshold_and_input(self, rng):
        x = rng.uniform(-1, 1, (5, 3))
        t0, th0 = np.array([[1.7]]), np.array([[0.3]])

        def run(xa, ta, tha):
            g = soft_adjacency(ad.Value(xa), ad.Value(ta), ad.Value(tha))
            return ad.sum(g.weights)

        xv, tv, thv = ad.Value(x), ad.Value(t0), ad.Value(th0)
        ad.backward(ad.sum(soft_adjacency(xv, tv, thv).weights))
        assert max_rel_err(xv.grad, finite_diff_grad(lambda a: run(a, t0, th0).item(), x)) < 1e-5
        assert max_rel_err(tv.grad, finite_diff_grad(lambda a: run(x, a, th0).item(), t0)) < 1e-5
        assert max_rel_err(thv.grad, finite_diff_grad(lambda a: run(x, t0, a).item(), th0)) < 1e-5


class TestSnapshot:
    def test_snapshot_equals_weights_and_detaches(self, rng):
        xhat = ad.Value(rng.uniform(-1, 1, (4, 2)))
        g = soft_adjacency(xhat, ad.constant(1.0), ad.constant(0.0))
        snap = snapshot_graph(g)
        np.testing.assert_array_equal(snap, g.weights.data)
        snap[0, 0] = -1.0
        assert g.weights.data[0, 0] != -1.0

    def test_unstructured_data_gives_unstructured_graph(self, rng):
        # no class signal in the features: intra/inter block means coincide
        x = rng.standard_normal((40, 6))
        labels = np.arange(40) % 2
        p = init_graph_learner(6, seed=3)
        xhat = embed(ad.Value(x), p)
        w = snapshot_graph(soft_adjacency(xhat, p.temperature(), p.threshold))
        same = labels[:, None] == labels[None, :]
        off_diag = ~np.eye(40, dtype=bool)
        intra = w[same & off_diag].mean()
        inter = w[~same].mean()
        assert np.all(w > 0) and np.all(w < 1)
        assert abs(intra - inter) / inter < 0.25

    def test_temperature_positive_and_initialized_near_two(self):
        p = init_graph_learner(4, seed=0)
        assert p.temperature().item() == pytest.approx(2.0, abs=1e-12)
