"""Frontier vectors, the sparse accumulator, and the select-second/min SpMSV."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .graph import VERTEX

NO_VALUE = np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    logical_len: int

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=VERTEX)
        val = np.ascontiguousarray(self.values, dtype=VERTEX)
        if idx.shape != val.shape:
            raise ContractViolation("indices and values differ in length")
        if idx.size:
            if np.any(idx[1:] <= idx[:-1]):
                raise ContractViolation("sparse vector indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.logical_len:
                raise ContractViolation(f"sparse vector index outside [0, {self.logical_len})")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def empty(cls, logical_len):
        return cls(np.empty(0, VERTEX), np.empty(0, VERTEX), logical_len)

    @property
    def nnz(self):
        return int(self.indices.size)

    def __len__(self):
        return self.nnz

    def items(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.logical_len == other.logical_len
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))


class DenseBitmap:
    """Fixed-length bitmap packed into little-endian 64-bit words."""

    __slots__ = ("words", "logical_len")

    def __init__(self, words, logical_len):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.size != -(-logical_len // 64):
            raise ContractViolation(f"{words.size} words cannot hold exactly {logical_len} bits")
        tail = logical_len % 64
        if tail and words[-1] >> np.uint64(tail):
            raise ContractViolation("bits beyond logical_len must be zero")
        self.words = words
        self.logical_len = logical_len

    @classmethod
    def zeros(cls, logical_len):
        return cls(np.zeros(-(-logical_len // 64), dtype=np.uint64), logical_len)

    @classmethod
    def from_bool(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        n = mask.size
        nwords = -(-n // 64)
        buf = np.zeros(nwords * 64, dtype=bool)
        buf[:n] = mask
        packed = np.packbits(buf, bitorder="little")
        return cls(packed.view("<u8").astype(np.uint64), n)

    @classmethod
    def from_indices(cls, idx, logical_len):
        mask = np.zeros(logical_len, dtype=bool)
        mask[np.asarray(idx, dtype=VERTEX)] = True
        return cls.from_bool(mask)

    def to_bool(self):
        raw = np.unpackbits(self.words.astype("<u8").view(np.uint8), bitorder="little")
        return raw[:self.logical_len].astype(bool)

    def indices(self):
        return np.flatnonzero(self.to_bool()).astype(VERTEX)

    def popcount(self):
        return int(np.bitwise_count(self.words).sum())

    def test(self, i):
        if not 0 <= i < self.logical_len:
            raise ContractViolation(f"bit {i} outside [0, {self.logical_len})")
        return bool((int(self.words[i >> 6]) >> (i & 63)) & 1)

    @property
    def num_words(self):
        return int(self.words.size)

    def __len__(self):
        return self.logical_len

    def __eq__(self, other):
        if not isinstance(other, DenseBitmap):
            return NotImplemented
        return self.logical_len == other.logical_len and np.array_equal(self.words, other.words)

    def __repr__(self):
        return f"DenseBitmap(len={self.logical_len}, set={self.popcount()})"


def concat_bitmaps(parts):
    if not parts:
        return DenseBitmap.zeros(0)
    return DenseBitmap.from_bool(np.concatenate([p.to_bool() for p in parts]))


class SPA:
    """Sparse accumulator: dense values, occupancy mask and a touched list."""

    def __init__(self, size):
        self.size = size
        self.values = np.full(size, NO_VALUE, dtype=VERTEX)
        self.occupied = np.zeros(size, dtype=bool)
        self._touched = []

    @property
    def touched(self):
        if not self._touched:
            return np.empty(0, VERTEX)
        return np.concatenate(self._touched)

    def accumulate(self, idx, vals):
        """Min-merge ``vals`` into the slots ``idx``."""
        idx = np.asarray(idx, dtype=VERTEX)
        if not idx.size:
            return
        fresh = np.unique(idx[~self.occupied[idx]])
        if fresh.size:
            self.occupied[fresh] = True
            self._touched.append(fresh)
        np.minimum.at(self.values, idx, np.asarray(vals, dtype=VERTEX))

    def harvest(self, logical_len=None):
        """Occupied entries as a sorted SparseVector (the SPA does not reset itself)."""
        idx = np.sort(self.touched)
        return SparseVector(idx, self.values[idx], self.size if logical_len is None else logical_len)

    def reset(self):
        t = self.touched
        self.values[t] = NO_VALUE
        self.occupied[t] = False
        self._touched = []


def spmsv(A, f, spa=None):
    """Frontier expansion ``t = A (x) f`` over the (select-second, min) semiring.

    ``f`` indexes the compressed axis of ``A``; ``t(v)`` is the smallest
    ``f(u)`` over frontier entries ``u`` whose adjacency contains ``v``.
    """
    if f.logical_len != A.extent:
        raise ContractViolation(f"frontier length {f.logical_len} != matrix extent {A.extent}")
    out_len = A.target_len
    if spa is None:
        spa = SPA(out_len)
    elif spa.size != out_len:
        raise ContractViolation(f"SPA size {spa.size} != output length {out_len}")
    lengths, targets = A.gather(f.indices)
    spa.accumulate(targets, np.repeat(f.values, lengths))
    t = spa.harvest()
    spa.reset()
    return t
