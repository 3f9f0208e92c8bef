"""Canonical feature subsets backed by a Python integer bitmask."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

MAX_FEATURES = 512


@dataclass(frozen=True)
class FeatureSubset:
    """A set of feature indices drawn from ``range(n_features)``.

    Equality and hashing only look at which bits are raised, so the order in
    which features were added never matters.
    """

    bits: int
    n_features: int
    cardinality: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.n_features <= MAX_FEATURES:
            raise ValueError(f"n_features must be in [1, {MAX_FEATURES}], got {self.n_features}")
        if self.bits < 0 or self.bits >> self.n_features:
            raise ValueError(f"bitmask {self.bits:#x} does not fit in {self.n_features} features")
        object.__setattr__(self, "cardinality", self.bits.bit_count())

    def __hash__(self):
        return hash(self.bits)

    @classmethod
    def empty(cls, n_features: int) -> "FeatureSubset":
        return cls(0, n_features)

    @classmethod
    def full(cls, n_features: int) -> "FeatureSubset":
        return cls((1 << n_features) - 1, n_features)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n_features: int) -> "FeatureSubset":
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < n_features:
                raise IndexError(f"feature index {i} out of range for {n_features} features")
            bits |= 1 << i
        return cls(bits, n_features)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.n_features and bool(self.bits >> index & 1)

    def __len__(self) -> int:
        return self.cardinality

    def __iter__(self):
        return iter(self.indices())

    def indices(self) -> list[int]:
        bits, out = self.bits, []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def available(self) -> np.ndarray:
        """Indices not yet in the subset, ascending."""
        return np.array([i for i in range(self.n_features) if not self.bits >> i & 1], dtype=np.int64)

    def add(self, index: int) -> "FeatureSubset":
        if not 0 <= index < self.n_features:
            raise IndexError(f"feature index {index} out of range for {self.n_features} features")
        if index in self:
            raise ValueError(f"feature {index} already in subset")
        return FeatureSubset(self.bits | 1 << index, self.n_features)

    @property
    def is_full(self) -> bool:
        return self.cardinality == self.n_features

    def added_feature(self, successor: "FeatureSubset") -> int:
        """The single feature that turns ``self`` into ``successor``.

        Raises ValueError unless ``successor`` is ``self`` plus exactly one feature.
        """
        if successor.n_features != self.n_features:
            raise ValueError("subsets come from different feature spaces")
        extra = successor.bits & ~self.bits
        if successor.bits & self.bits != self.bits or extra.bit_count() != 1:
            raise ValueError(f"{successor} is not {self} plus one feature")
        return extra.bit_length() - 1

    def hex(self) -> str:
        return f"{self.bits:#x}"

    def __str__(self):
        return "{" + ",".join(map(str, self.indices())) + "}"
