import numpy as np
import pytest

from maskgcn import autodiff as ad
from maskgcn.classifier import forward, init_classifier, normalize_graph
from maskgcn.errors import ConfigError
from maskgcn.latent_graph import LatentGraph

from conftest import finite_diff_grad, max_rel_err


def _graph_from(weights: np.ndarray) -> LatentGraph:
    return LatentGraph(weights=ad.Value(weights))


def _power_iteration_spectral_radius(m, iters=500):
    v = np.ones(m.shape[0]) / np.sqrt(m.shape[0])
    for _ in range(iters):
        v = m @ v
        v = v / np.linalg.norm(v)
    return abs(v @ m @ v)


class TestNormalizeGraph:
    def test_isolated_nodes_reduce_to_identity(self):
        g = _graph_from(np.full((4, 4), 1e-300))
        out = normalize_graph(g).data
        np.testing.assert_allclose(out, np.eye(4), atol=1e-12)

    def test_two_node_hand_case(self):
        # adjacency of ones everywhere: A_hat = [[2,1],[1,2]], degrees 3
        g = _graph_from(np.array([[1.0, 1.0], [1.0, 1.0]]))
        out = normalize_graph(g).data
        np.testing.assert_allclose(out, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-15)

    def test_row_normalized_variant_cross_check(self, rng):
        # the same degree vector must make D^{-1} A_hat exactly row-stochastic
        w = rng.uniform(0, 1, (6, 6))
        w = (w + w.T) / 2
        a_hat = w + np.eye(6)
        deg = a_hat.sum(axis=1)
        row_norm = a_hat / deg[:, None]
        np.testing.assert_allclose(row_norm.sum(axis=1), 1.0, atol=1e-12)
        # and the symmetric variant is similar to it: same eigenvalues
        sym = normalize_graph(_graph_from(w)).data
        ev_sym = np.sort(np.linalg.eigvals(sym).real)
        ev_row = np.sort(np.linalg.eigvals(row_norm).real)
        np.testing.assert_allclose(ev_sym, ev_row, atol=1e-9)

    def test_symmetry_and_spectral_radius(self, rng):
        for n in (3, 6, 10):
            w = rng.uniform(0, 1, (n, n))
            w = (w + w.T) / 2
            out = normalize_graph(_graph_from(w)).data
            assert np.max(np.abs(out - out.T)) < 1e-12
            assert _power_iteration_spectral_radius(out) <= 1.0 + 1e-9

    def test_differentiable_through_adjacency(self, rng):
        w = rng.uniform(0.05, 0.95, (4, 4))
        w = (w + w.T) / 2
        gv = ad.Value(w)
        ad.backward(ad.sum(normalize_graph(LatentGraph(weights=gv))))
        fd = finite_diff_grad(
            lambda a: ad.sum(normalize_graph(_graph_from(a))).item(), w
        )
        assert max_rel_err(gv.grad, fd) < 1e-5


class TestForward:
    def test_zero_weights_give_zero_logits(self, rng):
        params = init_classifier(5, 3, seed=0)
        for p in params.parameters():
            p.data[...] = 0.0
        g = _graph_from(rng.uniform(0, 1, (4, 4)))
        logits = forward(ad.Value(rng.uniform(-1, 1, (4, 5))), g, params)
        np.testing.assert_array_equal(logits.data, np.zeros((4, 3)))

    def test_softmax_rows_sum_to_one(self, rng):
        params = init_classifier(5, 3, seed=1)
        g = _graph_from(rng.uniform(0, 1, (6, 6)))
        logits = forward(ad.Value(rng.uniform(-1, 1, (6, 5))), g, params).data
        e = np.exp(logits - logits.max(axis=1, keepdims=True))
        np.testing.assert_allclose((e / e.sum(axis=1, keepdims=True)).sum(axis=1), 1.0,
                                   atol=1e-12)

    def test_identity_graph_is_per_node(self, rng):
        # with no edges the network must act row-locally
        params = init_classifier(4, 2, seed=2)
        x = rng.uniform(-1, 1, (5, 4))
        g = _graph_from(np.full((5, 5), 1e-300))
        base = forward(ad.Value(x), g, params).data
        perturbed = x.copy()
        perturbed[3] += rng.uniform(-1, 1, 4)
        out = forward(ad.Value(perturbed), g, params).data
        changed = np.abs(out - base).max(axis=1)
        assert changed[3] > 0
        np.testing.assert_allclose(np.delete(out, 3, axis=0), np.delete(base, 3, axis=0),
                                   atol=1e-12)

    def test_node_permutation_equivariance(self, rng):
        params = init_classifier(4, 3, seed=3)
        x = rng.uniform(-1, 1, (6, 4))
        w = rng.uniform(0, 1, (6, 6))
        w = (w + w.T) / 2
        perm = rng.permutation(6)
        base = forward(ad.Value(x), _graph_from(w), params).data
        permuted = forward(ad.Value(x[perm]), _graph_from(w[np.ix_(perm, perm)]), params).data
        assert np.max(np.abs(permuted - base[perm])) < 1e-9

    def test_shape_mismatch(self, rng):
        params = init_classifier(4, 3, seed=4)
        with pytest.raises(ConfigError):
            forward(ad.Value(rng.uniform(-1, 1, (5, 6))), _graph_from(np.eye(5) * 0.5), params)

    def test_zero_dropout_is_identity(self, rng):
        params = init_classifier(4, 3, seed=5)
        x = rng.uniform(-1, 1, (5, 4))
        g = _graph_from(rng.uniform(0, 1, (5, 5)))
        a = forward(ad.Value(x), g, params, dropout=0.0,
                    rng=np.random.default_rng(0)).data
        b = forward(ad.Value(x), g, params).data
        np.testing.assert_array_equal(a, b)

    def test_dropout_scales_expectation(self, rng):
        params = init_classifier(3, 2, seed=6)
        x = rng.uniform(0.5, 1.5, (4, 3))
        g = _graph_from(rng.uniform(0, 1, (4, 4)))
        out = forward(ad.Value(x), g, params, dropout=0.5, rng=np.random.default_rng(1))
        assert np.all(np.isfinite(out.data))
