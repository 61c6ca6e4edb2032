import random

import numpy as np
import pytest

from cliquealg import bilinear
from cliquealg.ff import matmul_mod


def test_trivial_ranks():
    assert bilinear.trivial_algorithm(1, 1).t == 1
    assert bilinear.trivial_algorithm(2, 2).t == 8
    assert bilinear.trivial_algorithm(2, 3).t == 12


@pytest.mark.parametrize("d,e", [(1, 1), (2, 2), (2, 3), (3, 2), (4, 4), (1, 5)])
def test_trivial_identity_exhaustive(d, e):
    assert bilinear.verify_identity(bilinear.trivial_algorithm(d, e), p=101)


def test_strassen_identity_and_random_products():
    alg = bilinear.strassen()
    assert alg.t == 7
    assert bilinear.verify_identity(alg, p=101)
    rng = random.Random(0)
    for p in (101, 5):
        for _ in range(50):
            a = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
            b = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
            assert np.array_equal(bilinear.apply_algorithm(alg, a, b, p),
                                  matmul_mod(a, b, p))


def test_tensor_power_dimensions_and_identity():
    sq = bilinear.tensor_power(bilinear.strassen(), 2)
    assert (sq.d, sq.e, sq.t) == (4, 4, 49)
    rng = random.Random(1)
    p = 101
    for _ in range(50):
        a = np.array([[rng.randrange(p) for _ in range(4)] for _ in range(4)])
        b = np.array([[rng.randrange(p) for _ in range(4)] for _ in range(4)])
        assert np.array_equal(bilinear.apply_algorithm(sq, a, b, p),
                              matmul_mod(a, b, p))
    cube = bilinear.tensor_power(bilinear.strassen(), 3)
    assert (cube.d, cube.t) == (8, 343)
    assert bilinear.verify_identity(cube, p=101, trials=25)


def test_tensor_power_rank_multiplicative():
    base = bilinear.trivial_algorithm(2, 2)
    for k in range(4):
        assert bilinear.tensor_power(base, k).t == base.t ** k


def test_tensor_power_of_trivial_is_trivial():
    one = bilinear.tensor_power(bilinear.trivial_algorithm(2, 2), 1)
    ref = bilinear.trivial_algorithm(2, 2)
    # same rank and same evaluation on basis pairs
    assert one.t == ref.t
    assert bilinear.verify_identity(one, p=101)


def test_max_d_for_budget_examples():
    assert bilinear.max_d_for_budget("trivial", 64, 1.0) == 4
    assert bilinear.max_d_for_budget("trivial", 100, 1.0) == 4
    assert bilinear.max_d_for_budget("strassen", 49, 1.0) == 4
    assert bilinear.max_d_for_budget("trivial", 1, 0.0) == 1
    assert bilinear.max_d_for_budget("trivial", 100, 0.0) == 10


def test_max_d_strassen_gamma_restriction():
    with pytest.raises(ValueError):
        bilinear.max_d_for_budget("strassen", 49, 0.5)


def test_algorithm_for_families():
    alg = bilinear.algorithm_for("trivial", 3, 0.5)
    assert alg.d == 3 and alg.e == bilinear.inner_dim(3, 0.5) == 2
    st = bilinear.algorithm_for("strassen", 4, 1.0)
    assert st.t == 49
    with pytest.raises(ValueError):
        bilinear.algorithm_for("nope", 2, 1.0)
