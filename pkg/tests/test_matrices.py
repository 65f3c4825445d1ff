"""Kerdock and Bernoulli constructions, and group attachment."""

import numpy as np
import pytest

from zerodetect.core import RngSpec
from zerodetect.errors import IndivisibleGroupSize, InvalidSpec
from zerodetect.matrices import (
    KerdockSpec,
    attach_groups,
    build_bernoulli,
    build_kerdock,
    kerdock_meta,
)


@pytest.fixture(scope="module")
def kerdock16():
    return build_kerdock(KerdockSpec(3))


def test_kerdock_spec_validation():
    with pytest.raises(InvalidSpec):
        KerdockSpec(2)
    with pytest.raises(InvalidSpec):
        KerdockSpec(0)
    with pytest.raises(InvalidSpec):
        KerdockSpec(-3)
    spec = KerdockSpec(3)
    assert (spec.rows, spec.cols) == (16, 256)


def test_kerdock_dimensions_and_entry_modulus(kerdock16):
    a = kerdock16.matrix
    assert a.shape == (16, 256)
    assert np.abs(np.abs(a) - 0.25).max() < 1e-15


def test_kerdock_columns_unit_norm(kerdock16):
    norms = np.linalg.norm(kerdock16.matrix, axis=0)
    assert np.abs(norms - 1.0).max() < 1e-12


def test_kerdock_worst_case_coherence_exhaustive(kerdock16):
    # exhaustive pairwise oracle over all 256*255/2 pairs
    a = kerdock16.matrix
    g = np.abs(a.conj().T @ a)
    np.fill_diagonal(g, 0.0)
    assert abs(g.max() - 0.25) < 1e-10


@pytest.mark.parametrize("m", [1, 3])
def test_kerdock_inner_products_two_valued(m):
    # every off-diagonal inner product has modulus 0 or 1/sqrt(M)
    mat = build_kerdock(KerdockSpec(m)).matrix
    target = 1.0 / np.sqrt(mat.shape[0])
    g = np.abs(mat.conj().T @ mat)
    np.fill_diagonal(g, -1.0)
    off = g[g >= 0.0]
    near_zero = off < 1e-10
    near_target = np.abs(off - target) < 1e-10
    assert np.all(near_zero | near_target)
    assert near_target.any()  # the worst case is attained


def test_kerdock_deterministic(kerdock16):
    again = build_kerdock(KerdockSpec(3))
    assert np.array_equal(kerdock16.matrix, again.matrix)


def test_kerdock_meta_records_polynomial():
    meta = kerdock_meta(KerdockSpec(3))
    assert meta["rows"] == "16" and meta["cols"] == "256"
    assert meta["poly_z4"] == "1,3,2,0,1"  # x^4 + 2x^2 + 3x + 1, ascending


def test_bernoulli_single_entry():
    m = build_bernoulli(1, 1, RngSpec(0))
    assert m.matrix[0, 0] in (1.0 + 0j, -1.0 + 0j)


def test_bernoulli_entries_and_norms():
    m = build_bernoulli(16, 256, RngSpec(5))
    a = m.matrix
    assert np.all(np.isin(a.real, (0.25, -0.25)))
    assert np.all(a.imag == 0.0)
    assert np.abs(np.linalg.norm(a, axis=0) - 1.0).max() < 1e-12


def test_bernoulli_empirical_mean():
    # law of large numbers over 10^6 entries
    m = build_bernoulli(100, 10_000, RngSpec(6))
    scaled = m.matrix.real * np.sqrt(100)  # back to +-1
    assert abs(scaled.mean()) < 3e-3


def test_bernoulli_reproducible_and_stream_dependent():
    a = build_bernoulli(8, 32, RngSpec(7, 1)).matrix
    b = build_bernoulli(8, 32, RngSpec(7, 1)).matrix
    c = build_bernoulli(8, 32, RngSpec(7, 2)).matrix
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_bernoulli_rejects_bad_shape():
    with pytest.raises(InvalidSpec):
        build_bernoulli(0, 4, RngSpec(0))


def test_attach_groups_kerdock(kerdock16):
    grouped = attach_groups(kerdock16, 8)
    assert grouped.groups.q == 32 and grouped.groups.r == 8
    assert np.array_equal(grouped.matrix, kerdock16.matrix)  # entries untouched


def test_attach_groups_whole_matrix(kerdock16):
    grouped = attach_groups(kerdock16, 256)
    assert grouped.groups.q == 1


def test_attach_groups_indivisible(kerdock16):
    with pytest.raises(IndivisibleGroupSize):
        attach_groups(kerdock16, 3)
