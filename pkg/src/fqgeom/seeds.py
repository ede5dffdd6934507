"""Seeded, implementation-independent random instance generation.

All corpus randomness flows from one 64-bit linear congruential generator:

    state' = (6364136223846793005 * state + 1442695040888963407) mod 2**64
    draw below n: advance, then take (state' >> 32) % n

Per-instance streams are derived by folding integer salts into the seed,
one LCG step per salt (see ``derive``).  The exact constants and draw
order are part of the reproducibility contract: a replay with the same
seed yields byte-identical reports in any implementation of this scheme.
"""

from __future__ import annotations

LCG_MULT = 6364136223846793005
LCG_INC = 1442695040888963407
_M64 = (1 << 64) - 1


class Lcg:
    """64-bit linear congruential generator with documented constants."""

    def __init__(self, state: int):
        self.state = state & _M64

    def step(self) -> int:
        self.state = (LCG_MULT * self.state + LCG_INC) & _M64
        return self.state

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n) from the top 32 bits."""
        if n <= 0:
            raise ValueError(f"draw bound must be positive, got {n}")
        return (self.step() >> 32) % n


def derive(seed: int, *salts: int) -> int:
    """Fold salts into a seed, one LCG step each; returns a new state."""
    h = seed & _M64
    for s in salts:
        h = (LCG_MULT * h + (s & _M64) + LCG_INC) & _M64
    return h


def instance_rng(seed: int, *salts: int) -> Lcg:
    return Lcg(derive(seed, *salts))


def sample_indices(rng: Lcg, domain: int, count: int) -> tuple:
    """count distinct indices in [0, domain), rejection-sampled, sorted."""
    if count > domain:
        raise ValueError(f"cannot draw {count} distinct values from {domain}")
    seen = set()
    while len(seen) < count:
        seen.add(rng.below(domain))
    return tuple(sorted(seen))


def decode_point(field, d: int, index: int) -> tuple:
    """Index -> point, first coordinate = lowest base-q digit."""
    coords = []
    for _ in range(d):
        coords.append(index % field.q)
        index //= field.q
    return tuple(coords)


def sample_points(rng: Lcg, field, d: int, count: int) -> tuple:
    idxs = sample_indices(rng, field.q ** d, count)
    return tuple(decode_point(field, d, i) for i in idxs)


def sample_motions(rng: Lcg, universe, count: int) -> tuple:
    idxs = sample_indices(rng, len(universe), count)
    return tuple(universe[i] for i in idxs)
