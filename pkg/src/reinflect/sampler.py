"""Frequency-weighted train/dev/test split construction.

Triples are drawn without replacement with probability proportional to
their weight. The first draws become the (nested) low/medium/high training
sets; the remaining dev+test draws are shuffled and cut in two.

Randomness comes from the PCG64 bit generator. Only its raw 64-bit output
stream is used, so results do not depend on numpy's distribution code.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import MSD, Dataset, FormatError, Triple, _decode, _lines

DEV_TEST_FLOOR = 50


class PoolTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class WeightedPool:
    items: tuple  # of (Triple, weight)

    def __post_init__(self):
        items = tuple((t, float(w)) for t, w in self.items)
        for _, w in items:
            if not w >= 0 or math.isinf(w):
                raise ValueError(f"invalid weight {w!r}")
        if not any(w > 0 for _, w in items):
            raise ValueError("pool needs at least one positive weight")
        object.__setattr__(self, "items", items)

    def __len__(self):
        return len(self.items)

    @classmethod
    def uniform(cls, dataset):
        return cls(tuple((t, 1.0) for t in dataset))


@dataclass(frozen=True)
class SplitSpec:
    low: int = 100
    medium: int = 1000
    high: int = 10000
    dev: int = 1000
    test: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.low <= self.medium <= self.high:
            raise ValueError("need 0 <= low <= medium <= high")
        if self.dev < 0 or self.test < 0:
            raise ValueError("dev and test sizes must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def total(self):
        return self.high + self.dev + self.test


class Rng:
    """Raw PCG64 stream with the two derived draws the sampler needs."""

    def __init__(self, seed):
        self._bits = np.random.PCG64(seed)

    def raw(self, n):
        return self._bits.random_raw(n)

    def uniform(self, n):
        """n doubles in (0, 1], 53 bits each."""
        raw = self.raw(n) >> np.uint64(11)
        return (raw.astype(np.float64) + 1.0) * 2.0**-53

    def below(self, bound):
        """Unbiased integer in [0, bound) by rejection."""
        limit = (2**64 // bound) * bound
        while True:
            x = int(self.raw(1)[0])
            if x < limit:
                return x % bound

    def shuffle(self, seq):
        seq = list(seq)
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
        return seq


def weighted_order(weights, rng, k=None):
    """Indices in the order of k sequential weighted draws without replacement.

    Uses exponential race keys ``-log(u)/w``: the item with the smallest key
    is distributed exactly like the first proportional draw, and so on for
    the remaining items. Zero-weight items come last, in uniform random order.
    """
    weights = np.asarray(weights, dtype=np.float64)
    u = rng.uniform(len(weights))
    with np.errstate(divide="ignore"):
        keys = -np.log(u) / weights
    positive = weights > 0
    # zero-weight items are ranked after every positive one
    tiebreak = np.where(positive, 0.0, -np.log(u))
    keys = np.where(positive, keys, np.inf)
    order = np.lexsort((np.arange(len(weights)), tiebreak, keys))
    if k is not None:
        order = order[:k]
    return [int(i) for i in order]


def scale_down(spec, available):
    """Shrink a spec to fit ``available`` items.

    The high, then medium, regime is dropped (set equal to the next smaller
    one), then dev and test are halved repeatedly down to a floor of 50.
    Returns the new spec and the names of dropped regimes.
    """
    low, medium, high, dev, test = spec.low, spec.medium, spec.high, spec.dev, spec.test
    dropped = []

    def total():
        return high + dev + test

    if total() > available and high > medium:
        high = medium
        dropped.append("high")
    if total() > available and medium > low:
        medium = high = low
        dropped.append("medium")
    while total() > available and (dev > DEV_TEST_FLOOR or test > DEV_TEST_FLOOR):
        dev = max(DEV_TEST_FLOOR, dev // 2) if dev > DEV_TEST_FLOOR else dev
        test = max(DEV_TEST_FLOOR, test // 2) if test > DEV_TEST_FLOOR else test
    if total() > available:
        raise PoolTooSmall(
            f"pool has {available} triples, scaled-down splits still need {total()}"
        )
    return SplitSpec(low, medium, high, dev, test, spec.seed), dropped


def sample_splits(pool, spec, allow_scale_down=False, language=""):
    """Draw nested training sets plus dev and test sets.

    Returns a dict with keys ``low, medium, high, dev, test``; regimes
    dropped by scale-down map to None.
    """
    dropped = []
    if spec.total > len(pool):
        if not allow_scale_down:
            raise PoolTooSmall(
                f"pool has {len(pool)} triples but the splits need {spec.total} "
                f"(short by {spec.total - len(pool)})"
            )
        spec, dropped = scale_down(spec, len(pool))

    rng = Rng(spec.seed)
    order = weighted_order([w for _, w in pool.items], rng, spec.total)
    drawn = [pool.items[i][0] for i in order]
    train = drawn[: spec.high]
    rest = rng.shuffle(drawn[spec.high:])

    splits = {
        "low": Dataset(language, train[: spec.low]),
        "medium": Dataset(language, train[: spec.medium]),
        "high": Dataset(language, train),
        "dev": Dataset(language, rest[: spec.dev]),
        "test": Dataset(language, rest[spec.dev:]),
    }
    for name in dropped:
        splits[name] = None
    return splits


def read_weights(source):
    """Weight file rows ``lemma<TAB>MSD<TAB>form<TAB>weight``."""
    weights = {}
    for lineno, line in enumerate(_lines(_decode(source)), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise FormatError(f"expected 4 columns, found {len(cols)}", lineno)
        try:
            triple = Triple(cols[0], MSD.parse(cols[1]), cols[2])
            weights[triple] = float(cols[3])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from exc
    return weights


def build_pool(dataset, weights: Optional[dict] = None):
    """Pair each distinct triple with its weight; unlisted triples weigh 1.0."""
    weights = weights or {}
    unique = dict.fromkeys(dataset)
    return WeightedPool(tuple((t, weights.get(t, 1.0)) for t in unique))
