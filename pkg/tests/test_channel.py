import csv
from collections import Counter

import numpy as np
import pytest

from dkaczmarz.channel import (generate_nonstationary, generate_stationary,
                               generate_visibility_mask)
from dkaczmarz.numerics import InvalidArgumentError, rng_stream


def test_stationary_masks_all_ones(rng):
    ch = generate_stationary(2, 3, rng)
    assert ch.masks.tolist() == [[1, 1, 1], [1, 1, 1]]
    assert ch.D == 3


def test_stationary_full_dimensions(rng):
    ch = generate_stationary(128, 16, rng)
    assert ch.H.shape == (128, 16)
    assert (ch.M, ch.K) == (128, 16)


def test_stationary_unit_variance():
    rng = rng_stream(5)
    power = np.mean([np.mean(np.abs(generate_stationary(64, 8, rng).H) ** 2)
                     for _ in range(1000)])
    assert 0.95 <= power <= 1.05


@pytest.mark.parametrize("M,K", [(0, 3), (3, 0)])
def test_rejects_nonpositive_dims(M, K, rng):
    with pytest.raises(InvalidArgumentError):
        generate_stationary(M, K, rng)


def test_full_mask(rng):
    assert generate_visibility_mask(16, 16, rng).tolist() == [1] * 16


def test_single_user_mask(rng):
    assert generate_visibility_mask(1, 1, rng).tolist() == [1]


@pytest.mark.parametrize("D", [0, 5])
def test_mask_rejects_bad_D(D, rng):
    with pytest.raises(InvalidArgumentError):
        generate_visibility_mask(4, D, rng)


def test_mask_uniform_over_admissible_set():
    rng = rng_stream(11)
    draws = 60_000
    counts = Counter(tuple(generate_visibility_mask(4, 2, rng)) for _ in range(draws))
    assert len(counts) == 6
    for mask, n in counts.items():
        assert sum(mask) == 2
        assert abs(n / draws - 1 / 6) < 0.01


def test_nonstationary_rows_have_D_nonzeros(rng):
    ch = generate_nonstationary(128, 16, 8, rng)
    assert np.all(np.count_nonzero(ch.H, axis=1) == 8)
    assert np.all(ch.masks.sum(axis=1) == 8)
    assert np.all(ch.H[ch.masks == 0] == 0)


def test_nonstationary_full_visibility_is_bitwise_stationary():
    a = generate_nonstationary(4, 4, 4, rng_stream(3))
    b = generate_stationary(4, 4, rng_stream(3))
    assert np.array_equal(a.H, b.H)
    assert np.array_equal(a.masks, b.masks)


def test_rank_census():
    rng = rng_stream(21)
    ranks = Counter()
    for _ in range(100):
        H = generate_nonstationary(32, 8, 2, rng).H
        s = np.linalg.svd(H, compute_uv=False)
        ranks[int(np.sum(s > 1e-12 * s[0]))] += 1
    assert all(r <= 8 for r in ranks)
    assert sum(ranks.values()) == 100


def test_rows_uncorrelated():
    rng = rng_stream(8)
    N = 4000
    prods = []
    for _ in range(N):
        H = generate_nonstationary(2, 3, 2, rng).H
        prods.append(np.outer(H[0], H[1].conj()))
    prods = np.array(prods)
    mean = prods.mean(axis=0)
    se = prods.std(axis=0) / np.sqrt(N)
    assert np.all(np.abs(mean.real) <= 3 * se + 1e-12)
    assert np.all(np.abs(mean.imag) <= 3 * se + 1e-12)


def test_csv_dump(tmp_path, rng):
    ch = generate_nonstationary(3, 4, 2, rng)
    path = tmp_path / "h.csv"
    ch.to_csv(path)
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 12
    assert set(rows[0]) == {"m", "k", "re", "im", "visible"}
    for row in rows:
        h = complex(float(row["re"]), float(row["im"]))
        assert h == ch.H[int(row["m"]), int(row["k"])]
        assert int(row["visible"]) == ch.masks[int(row["m"]), int(row["k"])]
