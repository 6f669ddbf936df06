"""Bitstring chromosomes over member systems and pairwise interfaces.

Layout for ``n`` systems: bits ``0..n-1`` are the systems ``S1..Sn``; the
remaining ``n(n-1)/2`` bits are the interfaces in row-major upper-triangular
order ``(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)``.  System ids are
1-based everywhere outside this module's array math.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class GenomeLayout:
    n_sys: int

    def __post_init__(self):
        if self.n_sys < 1:
            raise ValueError("n_sys must be >= 1")

    @property
    def n_pairs(self) -> int:
        return self.n_sys * (self.n_sys - 1) // 2

    @property
    def total_bits(self) -> int:
        return self.n_sys + self.n_pairs

    def interface_bit_index(self, j: int, jp: int) -> int:
        return interface_bit_index(self, j, jp)

    @cached_property
    def _pairs(self) -> tuple[np.ndarray, np.ndarray]:
        a, b = np.triu_indices(self.n_sys, k=1)
        a.setflags(write=False)
        b.setflags(write=False)
        return a, b

    def pair_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Zero-based endpoint arrays ``(a, b)`` for every interface bit, in order."""
        return self._pairs

    def pair_at(self, pos: int) -> tuple[int, int]:
        """One-based ``(j, j')`` for the interface bit at absolute position ``pos``."""
        a, b = self._pairs
        k = pos - self.n_sys
        if not 0 <= k < self.n_pairs:
            raise IndexError(f"position {pos} is not an interface bit")
        return int(a[k]) + 1, int(b[k]) + 1


def interface_bit_index(layout: GenomeLayout, j: int, jp: int) -> int:
    """Zero-based bit position of the interface between systems ``j < jp``."""
    n = layout.n_sys
    if not 1 <= j < jp <= n:
        raise IndexError(f"interface ({j}, {jp}) invalid for {n} systems; need 1 <= j < j' <= n")
    return n + (j - 1) * (2 * n - j) // 2 + (jp - j) - 1


class Genome:
    """Immutable bit vector bound to a layout.

    Equality and hashing go through the packed bytes, so genomes work as
    dict keys and in sets.
    """

    __slots__ = ("layout", "bits", "key")

    def __init__(self, layout: GenomeLayout, bits):
        arr = np.array(bits, dtype=np.uint8).ravel()
        if arr.size != layout.total_bits:
            raise FormatError(f"genome needs {layout.total_bits} bits, got {arr.size}")
        if arr.size and arr.max() > 1:
            raise FormatError("genome bits must be 0 or 1")
        arr.setflags(write=False)
        self.layout = layout
        self.bits = arr
        self.key = arr.tobytes()

    @classmethod
    def zeros(cls, layout: GenomeLayout) -> "Genome":
        return cls(layout, np.zeros(layout.total_bits, dtype=np.uint8))

    @classmethod
    def ones(cls, layout: GenomeLayout) -> "Genome":
        return cls(layout, np.ones(layout.total_bits, dtype=np.uint8))

    @property
    def systems(self) -> np.ndarray:
        return self.bits[: self.layout.n_sys]

    @property
    def interfaces(self) -> np.ndarray:
        return self.bits[self.layout.n_sys:]

    def with_bit(self, pos: int, value: int) -> "Genome":
        bits = self.bits.copy()
        bits[pos] = value
        return Genome(self.layout, bits)

    def __eq__(self, other):
        if not isinstance(other, Genome):
            return NotImplemented
        return self.layout == other.layout and self.key == other.key

    def __hash__(self):
        return hash((self.layout.n_sys, self.key))

    def __len__(self):
        return self.layout.total_bits

    def __str__(self):
        return genome_to_string(self)

    def __repr__(self):
        return f"Genome('{genome_to_string(self)}')"


def genome_to_string(g: Genome) -> str:
    return g.bits.tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode("ascii")


def genome_from_string(layout: GenomeLayout, text: str) -> Genome:
    text = text.strip()
    if len(text) != layout.total_bits:
        raise FormatError(f"expected {layout.total_bits} characters for {layout.n_sys} systems, got {len(text)}")
    if text.strip("01"):
        raise FormatError("genome string may contain only '0' and '1'")
    return Genome(layout, np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))


def contributions(g: Genome) -> tuple[float, float]:
    """Active-bit fractions of the system block and of the interface block.

    A one-system layout has no interface bits; its interface fraction is 0.
    """
    n, n_pairs = g.layout.n_sys, g.layout.n_pairs
    sys_frac = int(g.systems.sum()) / n
    if_frac = int(g.interfaces.sum()) / n_pairs if n_pairs else 0.0
    return sys_frac, if_frac


def read_genomes(path, layout: GenomeLayout) -> list[Genome]:
    """Bit-string genomes from a text file, one per line; blank lines and ``#`` comments skipped."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(genome_from_string(layout, line))
    return out
