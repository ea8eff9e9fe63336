import threading

import numpy as np
import pytest

from snprisk.parallel import DEFAULT_CHUNK, chunk_sizes, fsum_columns, run_chunks


def test_chunk_sizes():
    assert chunk_sizes(0) == []
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert sum(chunk_sizes(123_457)) == 123_457
    assert chunk_sizes(2 * DEFAULT_CHUNK) == [DEFAULT_CHUNK] * 2
    with pytest.raises(ValueError):
        chunk_sizes(-1)


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_results_independent_of_workers(workers):
    fn = lambda n, g: g.standard_normal(n)
    ref = run_chunks(fn, 10_007, np.random.default_rng(1), workers=1, chunk=1000)
    got = run_chunks(fn, 10_007, np.random.default_rng(1), workers=workers, chunk=1000)
    assert len(ref) == len(got) == 11
    for a, b in zip(ref, got):
        np.testing.assert_array_equal(a, b)


def test_caller_stream_advances_by_one_draw():
    a, b = np.random.default_rng(4), np.random.default_rng(4)
    run_chunks(lambda n, g: None, 50_000, a)
    b.integers(0, 2**63)
    assert a.random() == b.random()


def test_uses_threads():
    seen = set()
    barrier = threading.Barrier(2, timeout=5)

    def fn(n, g):
        seen.add(threading.get_ident())
        barrier.wait()
        return n

    assert run_chunks(fn, 20, np.random.default_rng(0), workers=2, chunk=10) == [10, 10]
    assert len(seen) == 2


def test_error_propagates():
    def fn(n, g):
        raise FloatingPointError("boom")

    with pytest.raises(FloatingPointError, match="boom"):
        run_chunks(fn, 100, np.random.default_rng(0), workers=4, chunk=10)


def test_fsum_columns_is_compensated():
    rows = [[1e16, 1.0], [1.0, 2.0], [-1e16, 3.0]]
    np.testing.assert_array_equal(fsum_columns(rows), [1.0, 6.0])
    assert fsum_columns([]).size == 0
