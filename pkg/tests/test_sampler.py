import math

import numpy as np
import pytest

from linkedrmt.classes import build_companion_classes, build_real_classes
from linkedrmt.linkfn import block_circulant, f1, f2, f3
from linkedrmt.sampler import (
    RADEMACHER,
    STANDARD_NORMAL,
    UNIFORM_SCALED,
    class_values_companion,
    class_values_real,
    derive_stream,
    sample_companion_matrix,
    sample_real_matrix,
)


def _draws(seed, s, c, n=8):
    return derive_stream(seed, s, c).standard_normal(n)


def test_streams_distinct():
    assert not np.array_equal(_draws(0, 0, 0), _draws(0, 0, 1))
    assert not np.array_equal(_draws(0, 0, 0), _draws(1, 0, 0))
    assert not np.array_equal(_draws(0, 0, 0), _draws(0, 1, 0))


def test_stream_reproducible():
    assert np.array_equal(_draws(0, 1, 0), _draws(0, 1, 0))


def test_class_values_use_derived_streams():
    vals = class_values_real(5, STANDARD_NORMAL, 7, 3)
    expect = [derive_stream(7, 3, c).standard_normal() for c in range(5)]
    assert vals.tolist() == expect


def test_real_matrix_equality_pattern():
    cmap = build_real_classes(block_circulant(2), 6)
    H = sample_real_matrix(cmap, STANDARD_NORMAL, 0, 0).entries
    assert len(set(H.ravel().tolist())) == 7
    assert np.array_equal(H, H.T)
    for c in range(cmap.n_classes):
        assert len(set(H[cmap.class_id == c].tolist())) == 1


def test_rademacher_entries():
    cmap = build_real_classes(f3(), 12)
    for s in range(5):
        H = sample_real_matrix(cmap, RADEMACHER, 1, s).entries
        assert set(np.unique(H).tolist()) <= {-1.0, 1.0}


@pytest.mark.parametrize("dist", [STANDARD_NORMAL, RADEMACHER, UNIFORM_SCALED])
def test_unit_variance(dist):
    x = np.array([class_values_real(7, dist, 0, s) for s in range(10_000)])
    var = x.var(axis=0)
    assert np.all(np.abs(var - 1) < 0.05)
    assert np.all(np.abs(x.mean(axis=0)) < 0.05)
    if dist == UNIFORM_SCALED:
        assert np.abs(x).max() <= math.sqrt(3)


def test_unknown_distribution():
    with pytest.raises(ValueError):
        class_values_real(3, "cauchy", 0, 0)


def test_kind_mismatch():
    with pytest.raises(ValueError):
        sample_real_matrix(build_companion_classes(f1(), 2))
    with pytest.raises(ValueError):
        sample_companion_matrix(build_real_classes(f1(), 2))


def test_companion_gue_draw():
    H = sample_companion_matrix(build_companion_classes(f1(), 2), 0, 0).entries
    assert H[0, 0].imag == 0 and H[1, 1].imag == 0
    assert H[0, 1] == np.conj(H[1, 0])
    assert H[0, 1].imag != 0


def test_companion_f3_is_real_symmetric():
    H = sample_companion_matrix(build_companion_classes(f3(), 2), 0, 4).entries
    assert np.all(H.imag == 0)
    assert np.array_equal(H, H.T)


def test_companion_f2_repeated_diagonal():
    H = sample_companion_matrix(build_companion_classes(f2(), 2), 0, 1).entries
    assert H[0, 0] == H[1, 1]


def test_complex_class_second_moments():
    is_real = np.array([False, False, True])
    z = np.array([class_values_companion(is_real, 3, s) for s in range(10_000)])
    assert np.all(np.abs(np.mean(np.abs(z) ** 2, axis=0) - 1) < 0.05)
    # E[z^2] = 0 for complex classes
    assert np.all(np.abs(np.mean(z[:, :2] ** 2, axis=0)) < 0.05)
    assert np.all(z[:, 2].imag == 0)


@pytest.mark.parametrize("f", [f1(), f2(), f3(), block_circulant(3)])
def test_exact_hermitian_structure(f):
    for N in (f.k * 4, f.k * 7):
        cmap = build_companion_classes(f, N)
        H = sample_companion_matrix(cmap, 11, 2).entries
        assert np.array_equal(H, H.conj().T)
        real_pos = cmap.class_is_real[cmap.class_id]
        assert np.all(H[real_pos].imag == 0)
        R = sample_real_matrix(build_real_classes(f, N), UNIFORM_SCALED, 11, 2).entries
        assert np.array_equal(R, R.T)


def test_replay_is_bit_identical():
    cmap = build_real_classes(block_circulant(3), 30)
    a = sample_real_matrix(cmap, STANDARD_NORMAL, 5, 17).entries
    b = sample_real_matrix(cmap, STANDARD_NORMAL, 5, 17).entries
    assert a.tobytes() == b.tobytes()
    c = sample_real_matrix(cmap, STANDARD_NORMAL, 5, 18).entries
    assert not np.array_equal(a, c)
