import math

import numpy as np
import pytest

from gkf_kit.mc import chunk_rng, chunk_sizes, map_chunks, resolve_threads
from gkf_kit.numdiff import central_difference, derivative_grid, richardson


def test_central_difference_polynomials_exact():
    # the order-n stencil is exact on polynomials of degree n + 1
    for n in range(1, 5):
        f = lambda x, n=n: x ** (n + 1)
        assert central_difference(f, 0.7, 0.1, n) == pytest.approx(
            math.factorial(n + 1) * 0.7, rel=1e-8)


def test_richardson_improves_accuracy():
    crude = abs(central_difference(math.sin, 1.0, 0.1, 1) - math.cos(1.0))
    fine = abs(richardson(math.sin, 1.0, 0.1, 1, 3) - math.cos(1.0))
    assert fine < crude * 1e-4


def test_derivative_grid():
    xs = np.linspace(0, 2, 5)
    np.testing.assert_allclose(derivative_grid(np.exp, xs, 1e-2, 2, 3), np.exp(xs), rtol=1e-9)


def test_chunk_sizes_cover_total():
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert sum(chunk_sizes(1_000_001, 250_000)) == 1_000_001


def test_chunk_streams_are_distinct_and_reproducible():
    a = chunk_rng(3, 0).standard_normal(5)
    b = chunk_rng(3, 1).standard_normal(5)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, chunk_rng(3, 0).standard_normal(5))


def test_map_chunks_independent_of_threads():
    f = lambda rng, size: float(rng.standard_normal(size).sum())
    one = map_chunks(f, 11, 100_000, 7_000, threads=1)
    many = map_chunks(f, 11, 100_000, 7_000, threads=4)
    assert one == many


def test_resolve_threads():
    assert resolve_threads(3) == 3
    assert resolve_threads("auto") >= 1
    with pytest.raises(Exception):
        resolve_threads(0)
