"""Fixed-magnetization configuration basis.

A configuration is an N-bit word; bit ``i`` set means site ``i`` carries a
down spin. The sector with ``m`` down spins holds every word of popcount
``m``, stored in ascending numeric order so that lookups are a binary search.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

MAX_SITES = 30


@dataclass(frozen=True, eq=False)
class SectorBasis:
    num_sites: int
    num_down: int
    configs: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.configs)

    @property
    def sz(self) -> float:
        return self.num_sites / 2 - self.num_down

    def __len__(self):
        return self.dim

    def index_of(self, word: int) -> int:
        word = int(word)
        if word < 0 or word >> self.num_sites or bin(word).count("1") != self.num_down:
            raise ValueError(f"word {word:#b} is not a configuration with {self.num_down} down spins on {self.num_sites} sites")
        return int(np.searchsorted(self.configs, word))

    def indices(self, words: np.ndarray) -> np.ndarray:
        """Vectorized lookup; every word must belong to the sector."""
        return np.searchsorted(self.configs, words)

    def config_of(self, index: int) -> int:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} out of range for sector of dimension {self.dim}")
        return int(self.configs[index])

    def spins(self, site: int) -> np.ndarray:
        """S^z eigenvalue (+1/2 up, -1/2 down) of ``site`` in every configuration."""
        return 0.5 - ((self.configs >> site) & 1)


@lru_cache(maxsize=64)
def sector_basis(num_sites: int, num_down: int) -> SectorBasis:
    if not 0 <= num_sites <= MAX_SITES:
        raise ValueError(f"number of sites must be in [0, {MAX_SITES}], got {num_sites}")
    if not 0 <= num_down <= num_sites:
        raise ValueError(f"down-spin count must be in [0, {num_sites}], got {num_down}")
    dim = comb(num_sites, num_down)
    if num_down == 0:
        configs = np.zeros(1, dtype=np.int64)
    else:
        pos = np.fromiter(
            (p for c in combinations(range(num_sites), num_down) for p in c),
            dtype=np.int64,
            count=dim * num_down,
        ).reshape(dim, num_down)
        configs = np.sort((np.int64(1) << pos).sum(axis=1))
    configs.setflags(write=False)
    return SectorBasis(num_sites, num_down, configs)
