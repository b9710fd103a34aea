import numpy as np
import pytest

from rlra import core, fixedrank, matgen, rangefinder
from rlra.accessors import DenseAccessor, InstrumentedAccessor
from rlra.errors import RankCollapse


def exact_rank_matrix(m, n, r, seed, best=2.0, worst=1.0):
    sig = np.concatenate([np.linspace(best, worst, r), np.zeros(min(m, n) - r)])
    a, _ = matgen.gen_decay("custom", m, n, seed=seed, sigma=sig)
    return a


def lu_structure_ok(f):
    return (
        np.count_nonzero(np.triu(f.L, 1)) == 0
        and np.count_nonzero(np.tril(f.U, -1)) == 0
    )


def test_randsvd_shapes_and_truncation():
    a = core.gaussian(0, 40, 30)
    f = fixedrank.randsvd(a, 5, q_os=3, p=1, seed=1)
    assert f.U.shape == (40, 8) and f.S.shape == (8,) and f.V.shape == (30, 8)
    ft = fixedrank.randsvd(a, 5, q_os=3, p=1, seed=1, truncate=True)
    assert ft.U.shape == (40, 5)
    assert np.array_equal(ft.S, f.S[:5])
    assert np.all(np.diff(f.S) <= 0)
    assert np.allclose(f.U.T @ f.U, np.eye(8), atol=1e-12)


def test_randsvd_recovers_exact_rank():
    a = exact_rank_matrix(50, 35, 8, seed=4)
    f = fixedrank.randsvd(a, 8, q_os=4, p=1, seed=0, truncate=True)
    assert core.rel_fro_error(a, (f.U * f.S) @ f.V.T) < 1e-12
    assert np.allclose(f.S, np.linspace(2.0, 1.0, 8), rtol=1e-10)


def test_randlu_recovers_exact_rank():
    a = exact_rank_matrix(50, 35, 8, seed=5)
    f = fixedrank.randlu(a, 8, q_os=4, p=1, seed=0)
    assert core.rel_fro_error(a, fixedrank.reconstruct(f)) < 1e-12
    assert f.rank == 8
    assert lu_structure_ok(f)
    core.check_perm(f.p, 50)
    core.check_perm(f.q, 35)


def test_powerlu_recovers_exact_rank_all_parities():
    a = exact_rank_matrix(50, 35, 8, seed=6)
    for v in (2, 3, 4, 5):
        f = fixedrank.powerlu(a, 8, q_os=4, v=v, seed=0)
        assert core.rel_fro_error(a, fixedrank.reconstruct(f)) < 1e-12
        assert lu_structure_ok(f)


def test_powerlu_tracks_optimum_on_decay():
    a, sigma = matgen.gen_decay("fast", 200, 200, seed=7)
    opt = matgen.oracle_error(sigma, 30)[0] / core.fro_norm(sigma)
    errs = []
    for seed in range(5):
        f = fixedrank.powerlu(a, 30, q_os=10, v=4, seed=seed)
        errs.append(core.rel_fro_error(a, fixedrank.reconstruct(f)))
    assert np.mean(errs) <= 2.0 * opt


def test_reconstruct_places_entries_by_permutation():
    a = exact_rank_matrix(20, 15, 6, seed=8)
    f = fixedrank.powerlu(a, 6, q_os=3, v=3, seed=2)
    r = fixedrank.reconstruct(f)
    assert np.array_equal(r[np.ix_(f.p, f.q)], f.L @ f.U)


def test_lu_from_projection_matches_projected_matrix():
    # the assembly is exact: L U must equal (A V V^T)[p, :][:, q] to roundoff
    rng = np.random.default_rng(9)
    a = core.gaussian_from(rng, 30, 25)
    vk, _ = np.linalg.qr(core.gaussian_from(rng, 25, 6))
    f = fixedrank.lu_from_projection(a @ vk, vk)
    projected = (a @ vk) @ vk.T
    assert np.allclose(
        f.L @ f.U, projected[f.p, :][:, f.q], atol=1e-13 * core.fro_norm(a)
    )
    assert lu_structure_ok(f)


def test_pass_budgets_exact():
    a = core.gaussian(10, 60, 45)
    for v in (2, 3, 4, 5):
        acc = InstrumentedAccessor(a)
        fixedrank.powerlu(acc, 8, q_os=4, v=v, seed=0)
        assert acc.product_count == v
    for p in (0, 1, 2):
        for fn in (fixedrank.randlu, fixedrank.randlu_noreorth, fixedrank.randsvd):
            acc = InstrumentedAccessor(a)
            fn(acc, 8, 4, p, 0)
            assert acc.product_count == 2 * p + 2


def test_noreorth_equals_randlu_at_p0():
    # with no interior renormalization steps the two are the same algorithm
    a = core.gaussian(11, 40, 30)
    f1 = fixedrank.randlu(a, 6, q_os=4, p=0, seed=3)
    f2 = fixedrank.randlu_noreorth(a, 6, q_os=4, p=0, seed=3)
    assert np.array_equal(f1.L, f2.L)
    assert np.array_equal(f1.U, f2.U)
    assert np.array_equal(f1.p, f2.p)
    assert np.array_equal(f1.q, f2.q)


def test_reorthogonalization_beats_raw_chain():
    a, _ = matgen.gen_decay("slow", 300, 300, seed=12)
    re, raw = [], []
    for seed in range(10):
        f = fixedrank.randlu(a, 80, q_os=10, p=2, seed=seed)
        re.append(core.rel_fro_error(a, fixedrank.reconstruct(f)))
        f = fixedrank.randlu_noreorth(a, 80, q_os=10, p=2, seed=seed)
        raw.append(core.rel_fro_error(a, fixedrank.reconstruct(f)))
    assert np.mean(re) <= np.mean(raw)


def test_shared_seed_ranges_agree_odd_pairing():
    # k = l on a full-rank matrix: the sketches before truncation span the
    # same subspace, so the factor ranges must coincide to roundoff
    sig = np.linspace(2.0, 1.0, 80)
    a, _ = matgen.gen_decay("custom", 100, 80, seed=13, sigma=sig)
    for seed in range(5):
        f1 = fixedrank.randlu(a, 15, q_os=0, p=1, seed=seed)
        f2 = fixedrank.powerlu(a, 15, q_os=0, v=3, seed=seed)
        assert fixedrank.range_agreement(f1, f2) < 1e-8


def test_range_agreement_extremes():
    ident = np.eye(10)
    perm = np.arange(10)

    def as_lu(cols):
        return fixedrank.LowRankLU(
            p=perm, q=np.arange(2), L=ident[:, cols], U=np.zeros((2, 2)), rank=2
        )

    same = fixedrank.range_agreement(as_lu([0, 1]), as_lu([0, 1]))
    assert same < 1e-12
    orth = fixedrank.range_agreement(as_lu([0, 1]), as_lu([2, 3]))
    assert orth == pytest.approx(np.pi / 2, rel=1e-12)


def test_range_agreement_rejects_mismatch():
    f = fixedrank.powerlu(core.gaussian(14, 20, 15), 4, q_os=2, v=3, seed=0)
    g = fixedrank.powerlu(core.gaussian(15, 20, 15), 5, q_os=2, v=3, seed=0)
    with pytest.raises(ValueError, match="rank"):
        fixedrank.range_agreement(f, g)
    h = fixedrank.powerlu(core.gaussian(16, 25, 15), 4, q_os=2, v=3, seed=0)
    with pytest.raises(ValueError, match="row dim"):
        fixedrank.range_agreement(f, h)


def test_rank_collapse_propagates_from_sketch():
    # bitwise-duplicated rows survive the products bitwise, so the interior
    # eliminations cancel them to exact zeros and the collapse is detected
    base = core.gaussian(17, 5, 30)
    a = np.vstack([base] * 8)
    with pytest.raises(RankCollapse):
        fixedrank.powerlu(a, 10, q_os=5, v=4, seed=0)
    with pytest.raises(RankCollapse):
        fixedrank.randlu(a, 10, q_os=5, p=1, seed=0)


def test_validation_errors():
    a = core.gaussian(18, 20, 10)
    with pytest.raises(ValueError):
        fixedrank.powerlu(a, 0, q_os=2, v=3, seed=0)
    with pytest.raises(ValueError):
        fixedrank.powerlu(a, 8, q_os=5, v=3, seed=0)  # width 13 > 10
    with pytest.raises(ValueError):
        fixedrank.powerlu(a, 4, q_os=2, v=1, seed=0)
    with pytest.raises(ValueError):
        fixedrank.randlu(a, 4, q_os=-1, p=1, seed=0)
