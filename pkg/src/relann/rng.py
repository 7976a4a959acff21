"""Deterministic 64-bit generator for reproducible sampling.

Implements splitmix64 (Steele, Lea & Flood 2014). Constants:

    state increment (gamma): 0x9E3779B97F4A7C15
    mix multiplier 1:        0xBF58476D1CE4E5B9
    mix multiplier 2:        0x94D049BB133111EB

The generator is pure integer arithmetic, so identical seeds produce
identical streams on any platform and Python version. Bounded draws use
rejection sampling to stay unbiased.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream seeded with an arbitrary Python int."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound). Rejects the biased tail."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) // bound) * bound
        while True:
            z = self.next_u64()
            if z < threshold:
                return z % bound

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), via partial Fisher-Yates."""
        if k > population:
            raise ValueError(f"cannot draw {k} from population of {population}")
        pool = list(range(population))
        for i in range(k):
            j = i + self.below(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
