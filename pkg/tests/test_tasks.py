import json

import numpy as np
import pytest

from rcdyn import prng, tasks
from rcdyn.prng import RngStream


def test_region_labels():
    assert tasks.label_line([0.5, 0.5])[0] == 1
    assert tasks.label_line([-0.3, 0.1])[0] == 0
    assert tasks.label_circle([0.0, 0.0])[0] == 1
    assert tasks.label_circle([1.0, 1.0])[0] == 0
    assert tasks.label_xor([0.5, 0.5])[0] == 1
    assert tasks.label_xor([-0.5, 0.5])[0] == 0
    assert tasks.label_xor([-0.2, -0.9])[0] == 1


@pytest.mark.parametrize("gen", [tasks.gen_line, tasks.gen_circle, tasks.gen_xor])
def test_spatial_balance_and_shape(gen):
    d = gen(10_000, 6, RngStream(1))
    assert d.X.shape == (10_000, 6, 2) and d.K == 2
    assert abs(d.labels.mean() - 0.5) < 0.015
    # constant frames, range
    assert np.all(d.X == d.X[:, :1, :])
    assert np.all(np.abs(d.X) <= 1)


def test_generators_pure():
    a = tasks.gen_circle(50, 6, RngStream(3))
    b = tasks.gen_circle(50, 6, RngStream(3))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_generator_needs_episodes():
    with pytest.raises(ValueError):
        tasks.gen_line(0, 6, RngStream(1))


def test_patches_checkerboard_is_xor_partition():
    pts = prng.uniform(RngStream(2), -1, 1, (2000, 2))
    lab = tasks.label_patches(pts, np.array([[0, 1], [1, 0]]))
    np.testing.assert_array_equal(lab, 1 - tasks.label_xor(pts))


def test_cell_border_goes_to_lower_cell():
    assert list(tasks.cell_index([-1.0, -1 / 3, 1 / 3, 1.0], 3)) == [0, 0, 1, 2]
    assert list(tasks.cell_index([0.0], 2)) == [0]


def test_patch_assignment_counts():
    a = tasks.patch_assignment(3, 3, RngStream(4))
    assert sorted(np.bincount(a.ravel())) == [3, 3, 3]
    a = tasks.patch_assignment(3, 2, RngStream(4))
    assert sorted(np.bincount(a.ravel())) == [4, 5]
    with pytest.raises(ValueError):
        tasks.patch_assignment(2, 5, RngStream(4))


def test_patches_balance():
    d = tasks.gen_patches(10_000, 6, RngStream(5), grid=3, K=3)
    freq = np.bincount(d.labels, minlength=3) / d.E
    assert np.all(np.abs(freq - 1 / 3) < 0.02)
    # labels agree with the layout
    np.testing.assert_array_equal(tasks.label_patches(d.points(), d.params["assignment"]), d.labels)


def test_patches_unequal_cells_exact_balance():
    d = tasks.gen_patches(1001, 6, RngStream(6), grid=3, K=2)
    counts = np.bincount(d.labels, minlength=2)
    assert abs(counts[0] - counts[1]) <= 1
    np.testing.assert_array_equal(tasks.label_patches(d.points(), d.params["assignment"]), d.labels)


def test_spatiotemporal_no_noise_equals_prototypes():
    d = tasks.gen_spatiotemporal(30, RngStream(7), eta=0.0)
    protos = d.params["prototypes"]
    for e in range(d.E):
        np.testing.assert_array_equal(d.X[e], protos[d.labels[e]])


def test_spatiotemporal_prototypes():
    p = tasks.spatiotemporal_prototypes(RngStream(8), K=3, M=2, T=6, n_zero=1)
    assert p.shape == (3, 6, 2)
    assert set(np.unique(p)) <= {-1.0, 0.0, 1.0}
    assert np.all(p[:, -1, :] == 0)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.count_nonzero(p[i] != p[j]) >= 4


def test_spatiotemporal_range_and_terminal_zero():
    d = tasks.gen_spatiotemporal(10_000, RngStream(9), eta=0.4, n_zero=1)
    assert np.all(np.abs(d.X) <= 1)
    for k in range(3):
        term = d.X[d.labels == k, -1, :]
        assert np.all(np.abs(term.mean(axis=0)) < 0.01)
    freq = np.bincount(d.labels) / d.E
    assert np.all(np.abs(freq - 1 / 3) < 0.001)


def test_spatiotemporal_impossible_prototypes():
    # one live ternary entry allows only 3 distinct patterns
    with pytest.raises(RuntimeError):
        tasks.spatiotemporal_prototypes(RngStream(1), K=12, M=1, T=2, n_zero=1, max_tries=50)


def test_train_test_share_layout():
    spec = tasks.TaskSpec(kind="patches")
    tr, te = spec.train_test(RngStream(10), 100, 100)
    np.testing.assert_array_equal(tr.params["assignment"], te.params["assignment"])
    assert not np.array_equal(tr.X, te.X)
    spec = tasks.TaskSpec(kind="spatiotemporal")
    tr, te = spec.train_test(RngStream(10), 100, 100)
    np.testing.assert_array_equal(tr.params["prototypes"], te.params["prototypes"])


def test_dataset_serialisation(tmp_path):
    d = tasks.gen_xor(3, 2, RngStream(11))
    p = tmp_path / "d.csv"
    d.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "episode,t,x0,x1,label"
    assert len(lines) == 1 + 3 * 2
    man = json.loads(d.manifest(seed=11))
    assert man["kind"] == "xor" and man["seed"] == 11 and man["E"] == 3


def test_stream_concatenation():
    d = tasks.gen_spatiotemporal(4, RngStream(12))
    s = d.stream()
    assert s.shape == (24, 2)
    np.testing.assert_array_equal(s[6:12], d.X[1])
