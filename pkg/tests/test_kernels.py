import pytest

from qdeq import _nested_py, kernels, mzv


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
@pytest.mark.parametrize("weak", [False, True])
def test_backends_agree_bit_for_bit(weak):
    from qdeq import _nested
    comps = [(2,), (2, 1), (3, 1, 1), (1, 2, 1), (4, 2)]
    limbs = kernels.frac_limbs_for(40)
    marks = [1, 10, 500, 3000]
    assert _nested.nested_sums(comps, 3000, weak, limbs, marks) == \
        _nested_py.nested_sums(comps, 3000, weak, limbs, marks)


@pytest.mark.parametrize("idx", [(2, 1), (1, 1, 1), (3,)])
def test_fixed_point_matches_exact(idx):
    d = 300
    exact = mzv.zeta_partial(d, idx)
    num = mzv.numeric_values([idx], d, digits=40)[idx]
    assert abs(float(num - exact)) < 1e-30
    weak = mzv.numeric_values([idx], d, weak=True, digits=40)[idx]
    assert abs(float(weak - mzv.sym_sum(d, idx))) < 1e-30


def test_limbs_cover_digits():
    assert kernels.frac_limbs_for(50) * 64 >= 50 * 3.33 + 40
