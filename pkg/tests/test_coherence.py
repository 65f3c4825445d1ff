"""Coherence statistics, property checks, and the orthogonality estimator."""

import numpy as np
import pytest

from zerodetect.coherence import (
    CoherenceReport,
    average_coherence,
    coherence_property_check,
    coherence_report,
    group_coherence_property_check,
    group_coherences,
    spectral_norm,
    stoc_estimate,
    worst_case_coherence,
)
from zerodetect.core import MeasurementMatrix, RngSpec, normalize_columns
from zerodetect.errors import BadK, BadValue, DimensionMismatch, NoGroups, SingleColumn, ZeroZ
from zerodetect.matrices import KerdockSpec, attach_groups, build_kerdock

# golden numbers for the 16 x 256 Kerdock frame, frozen from exact-sum and
# dense-SVD oracle runs
KERDOCK_NU = 1.0 / 17.0
KERDOCK_MU_GROUP_R8 = 1.5455756847831934
KERDOCK_NU_GROUP_R8 = 0.4759364906334003


@pytest.fixture(scope="module")
def kerdock16():
    return build_kerdock(KerdockSpec(3))


@pytest.fixture(scope="module")
def kerdock16_r8(kerdock16):
    return attach_groups(kerdock16, 8)


def _random_unit_matrix(rng, n, p):
    a = rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))
    return normalize_columns(a)


def _naive_worst_case(a):
    best = 0.0
    p = a.shape[1]
    for i in range(p):
        for j in range(p):
            if i != j:
                best = max(best, abs(np.vdot(a[:, i], a[:, j])))
    return best


def test_worst_case_identity_and_duplicates():
    assert worst_case_coherence(MeasurementMatrix(np.eye(4))) == 0.0
    dup = MeasurementMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    assert worst_case_coherence(dup) == 1.0


def test_worst_case_kerdock(kerdock16):
    assert abs(worst_case_coherence(kerdock16) - 0.25) < 1e-10


def test_worst_case_matches_two_loop_oracle():
    rng = np.random.default_rng(31)
    for _ in range(5):
        m = _random_unit_matrix(rng, 4, 7)
        assert abs(worst_case_coherence(m) - _naive_worst_case(m.matrix)) < 1e-12


def test_average_identity():
    assert average_coherence(MeasurementMatrix(np.eye(5))) == 0.0


def test_average_all_columns_equal():
    # p copies of one unit column: every off-diagonal product is 1
    col = np.array([[0.6], [0.8]])
    m = MeasurementMatrix(np.repeat(col, 4, axis=1))
    assert abs(average_coherence(m) - 1.0) < 1e-12


def test_average_kerdock_golden(kerdock16):
    assert abs(average_coherence(kerdock16) - KERDOCK_NU) < 1e-12


def test_average_single_column_rejected():
    with pytest.raises(SingleColumn):
        average_coherence(MeasurementMatrix(np.array([[1.0]])))


def test_nu_below_mu_on_random_matrices():
    rng = np.random.default_rng(32)
    for _ in range(10):
        m = _random_unit_matrix(rng, 6, 17)
        assert average_coherence(m) <= worst_case_coherence(m)


def test_coherences_invariant_under_left_unitary(kerdock16):
    rng = np.random.default_rng(33)
    q, _ = np.linalg.qr(rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
    rotated = MeasurementMatrix(q @ kerdock16.matrix)
    assert abs(worst_case_coherence(rotated) - 0.25) < 1e-8
    assert abs(average_coherence(rotated) - KERDOCK_NU) < 1e-8
    g0 = group_coherences(attach_groups(kerdock16, 8))
    g1 = group_coherences(attach_groups(rotated, 8))
    assert abs(g0.mu_group - g1.mu_group) < 1e-8
    assert abs(g0.nu_group - g1.nu_group) < 1e-8


def test_spectral_norm_against_svd():
    rng = np.random.default_rng(34)
    for shape in [(3, 3), (8, 8), (5, 2)]:
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        assert abs(spectral_norm(c) - np.linalg.svd(c, compute_uv=False)[0]) < 1e-9
    assert spectral_norm(np.zeros((4, 4))) == 0.0


def test_group_coherences_orthonormal_blocks():
    m = attach_groups(MeasurementMatrix(np.eye(8)), 2)
    mu_g, nu_g, _ = group_coherences(m)
    assert mu_g < 1e-12 and nu_g < 1e-12


def test_group_coherences_duplicated_block():
    block = np.eye(4)[:, :2]
    m = attach_groups(MeasurementMatrix(np.hstack([block, block])), 2)
    mu_g, _, pair = group_coherences(m)
    assert abs(mu_g - 1.0) < 1e-10
    assert pair == (1, 2)


def test_group_coherences_kerdock_vs_svd_oracle(kerdock16_r8):
    got = group_coherences(kerdock16_r8)
    a = kerdock16_r8.matrix
    blocks = [a[:, i * 8:(i + 1) * 8] for i in range(32)]
    mu_svd = max(
        np.linalg.svd(blocks[i].conj().T @ blocks[j], compute_uv=False)[0]
        for i in range(32) for j in range(32) if i != j
    )
    total = sum(blocks)
    nu_svd = max(
        np.linalg.svd(blocks[i].conj().T @ (total - blocks[i]), compute_uv=False)[0]
        for i in range(32)
    ) / 31
    assert abs(got.mu_group - mu_svd) < 1e-9
    assert abs(got.nu_group - nu_svd) < 1e-9
    assert abs(got.mu_group - KERDOCK_MU_GROUP_R8) < 1e-9
    assert abs(got.nu_group - KERDOCK_NU_GROUP_R8) < 1e-9


def test_group_coherences_r1_matches_elementwise(kerdock16):
    m = attach_groups(kerdock16, 1)
    mu_g, nu_g, _ = group_coherences(m)
    assert abs(mu_g - worst_case_coherence(kerdock16)) < 1e-10
    assert abs(nu_g - average_coherence(kerdock16)) < 1e-10


def test_group_coherences_requires_partition(kerdock16):
    with pytest.raises(NoGroups):
        group_coherences(kerdock16)
    with pytest.raises(NoGroups):
        group_coherences(attach_groups(kerdock16, 256))  # q = 1 degenerate


def test_coherence_property_check(kerdock16):
    got = coherence_property_check(kerdock16, mu0=1.0)
    assert abs(got.mu0_star - 0.25 * np.sqrt(np.log(256))) < 1e-12
    assert got.holds == (0.25 <= 1.0 / np.sqrt(np.log(256)))
    ident = coherence_property_check(MeasurementMatrix(np.eye(3)), mu0=0.5)
    assert ident.mu0_star == 0.0 and ident.holds
    dup = MeasurementMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    got = coherence_property_check(dup, mu0=2.0)
    assert abs(got.mu0_star - np.sqrt(np.log(2))) < 1e-12


def test_group_property_orthonormal_blocks():
    m = attach_groups(MeasurementMatrix(np.eye(8)), 2)
    got = group_coherence_property_check(m, 0.1, 0.1)
    assert got.mu_holds and got.nu_holds  # 0 <= every positive bound


def test_group_property_kerdock_truth_values(kerdock16_r8):
    got = group_coherence_property_check(kerdock16_r8, 1.0, 1.0)
    # independent evaluation from the computed coherences
    log_q = np.log(32)
    assert got.mu_holds == (got.mu_group <= 1.0 / np.sqrt(log_q))
    assert got.nu_holds == (got.nu_group <= got.mu_group * np.sqrt(8 * log_q / 16))
    assert not got.mu_holds  # 1.55 > 0.537 for this frame
    assert got.nu_holds


def test_group_property_q1_rejected(kerdock16):
    with pytest.raises(NoGroups):
        group_coherence_property_check(attach_groups(kerdock16, 256), 1.0, 1.0)


# ---------------------------------------------------------------------------
# StOC estimator


def _exact_orthonormal(p, rng):
    # signed/phased permutation of the identity: exactly orthonormal in floats
    phases = np.array([1, -1, 1j, -1j])[rng.integers(0, 4, p)]
    perm = rng.permutation(p)
    return MeasurementMatrix(np.eye(p, dtype=np.complex128)[:, perm] * phases)


def test_stoc_orthonormal_never_violates():
    rng = np.random.default_rng(35)
    m = _exact_orthonormal(16, rng)
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    est = stoc_estimate(m, 4, 0.0, z, 500, RngSpec(1))
    assert est.violations == 0 and est.delta_hat == 0.0


def test_stoc_kerdock_k1_coherence_level(kerdock16):
    # with k = 1 and z = e1 both inequalities reduce to single inner products,
    # all bounded by the coherence 0.25
    e1 = np.array([1.0 + 0j])
    for eps in (1.0, 0.5):
        est = stoc_estimate(kerdock16, 1, eps, e1, 300, RngSpec(2))
        assert est.delta_hat == 0.0


def test_stoc_golden_value(kerdock16):
    # frozen from a seeded 10000-permutation oracle run
    g = RngSpec(424242, stream_id=1).generator()
    parts = g.standard_normal((2, 32))
    z = parts[0] + 1j * parts[1]
    z /= np.linalg.norm(z)
    est = stoc_estimate(kerdock16, 32, 0.5, z, 10_000, RngSpec(424242))
    assert est.violations == 7624
    assert est.delta_hat == 0.7624


def test_stoc_reproducible(kerdock16):
    z = np.full(8, 1 / np.sqrt(8), dtype=np.complex128)
    a = stoc_estimate(kerdock16, 8, 0.4, z, 200, RngSpec(3))
    b = stoc_estimate(kerdock16, 8, 0.4, z, 200, RngSpec(3))
    assert (a.violations, a.delta_hat) == (b.violations, b.delta_hat)


def test_stoc_validation(kerdock16):
    z = np.ones(4, dtype=np.complex128)
    with pytest.raises(BadK):
        stoc_estimate(kerdock16, 0, 0.5, z[:0], 10, RngSpec(0))
    with pytest.raises(BadK):
        stoc_estimate(kerdock16, 256, 0.5, z, 10, RngSpec(0))
    with pytest.raises(ZeroZ):
        stoc_estimate(kerdock16, 4, 0.5, np.zeros(4), 10, RngSpec(0))
    with pytest.raises(DimensionMismatch):
        stoc_estimate(kerdock16, 5, 0.5, z, 10, RngSpec(0))
    with pytest.raises(BadValue):
        stoc_estimate(kerdock16, 4, -0.1, z, 10, RngSpec(0))


def test_coherence_report_fields(kerdock16_r8):
    rep = coherence_report(kerdock16_r8)
    assert rep.mu == 0.25
    assert abs(rep.nu - KERDOCK_NU) < 1e-12
    assert rep.mu_group is not None and rep.nu_group is not None
    i, j = rep.argmax_pair
    a = kerdock16_r8.matrix
    assert abs(abs(np.vdot(a[:, i - 1], a[:, j - 1])) - 0.25) < 1e-12


def test_coherence_report_rejects_inverted_order():
    with pytest.raises(BadValue):
        CoherenceReport(mu=0.1, nu=0.2, mu_group=None, nu_group=None, argmax_pair=(1, 2))
