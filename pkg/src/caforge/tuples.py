"""Interaction-tuple enumeration and the uncovered-tuple store.

Every required interaction is keyed by a parameter bit mask (bit ``i`` set
means parameter ``i`` participates).  Inside a mask group the value tuples are
held as packed mixed-radix integers in a flat presence array, which keeps the
per-candidate coverage count to a couple of vectorized gathers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .model import SystemModel


def enumerate_masks(model: SystemModel) -> list[int]:
    """All parameter masks required by the model, ascending and deduplicated.

    Main-strength combinations range over every parameter; each
    sub-configuration adds its own combinations at its sub-strength, restricted
    to its parameter set.  Overlaps collapse into a single group.
    """
    masks = set()
    for combo in itertools.combinations(range(model.param_count), model.main_strength):
        masks.add(_mask_of(combo))
    for sub in model.sub_configs:
        for combo in itertools.combinations(sub.params, sub.strength):
            masks.add(_mask_of(combo))
    return sorted(masks)


def _mask_of(params) -> int:
    mask = 0
    for i in params:
        mask |= 1 << i
    return mask


def mask_params(mask: int) -> tuple[int, ...]:
    """Set-bit positions of a mask, ascending."""
    out = []
    i = 0
    while mask >> i:
        if mask >> i & 1:
            out.append(i)
        i += 1
    return tuple(out)


def mask_to_string(mask: int, param_count: int) -> str:
    """Render a mask left-to-right, parameter 0 first (``0b0011, p=4 -> "1100"``)."""
    return "".join("1" if mask >> i & 1 else "0" for i in range(param_count))


class TupleStore:
    """Map from parameter mask to the set of not-yet-covered value tuples.

    Mutable and single-owner: one generation run owns one store.  ``fitness``
    is read-only; ``remove_covered`` mutates.
    """

    def __init__(self, model: SystemModel):
        self.model = model
        self.masks = tuple(enumerate_masks(model))
        values = model.values
        width = max(bin(m).count("1") for m in self.masks)

        p_idx = np.zeros((len(self.masks), width), dtype=np.int64)
        mult = np.zeros((len(self.masks), width), dtype=np.int64)
        sizes = np.empty(len(self.masks), dtype=np.int64)
        for k, mask in enumerate(self.masks):
            params = mask_params(mask)
            radices = [values[i] for i in params]
            m = 1
            for j in range(len(params) - 1, -1, -1):
                p_idx[k, j] = params[j]
                mult[k, j] = m
                m *= radices[j]
            sizes[k] = m
        offsets = np.zeros(len(self.masks), dtype=np.int64)
        offsets[1:] = np.cumsum(sizes)[:-1]

        self._p_idx = p_idx
        self._mult = mult
        self._sizes = sizes
        self._offsets = offsets
        self._flat = np.ones(int(sizes.sum()), dtype=bool)
        self._counts = sizes.copy()
        self._limits = np.asarray(values, dtype=np.int64)
        self.remaining = int(sizes.sum())

    def _keys(self, candidate) -> np.ndarray:
        values = np.asarray(candidate, dtype=np.int64)
        if values.shape != (self.model.param_count,):
            raise ValueError(
                f"candidate has {values.size} entries, model has {self.model.param_count}"
            )
        if ((values < 0) | (values >= self._limits)).any():
            raise ValueError(f"candidate value out of range: {values.tolist()}")
        return (values[self._p_idx] * self._mult).sum(axis=1) + self._offsets

    def fitness(self, candidate) -> int:
        """Number of still-uncovered tuples this candidate would cover."""
        return int(self._flat[self._keys(candidate)].sum())

    def remove_covered(self, candidate) -> int:
        """Delete every tuple the candidate covers; returns how many were deleted."""
        keys = self._keys(candidate)
        hit = self._flat[keys]
        self._flat[keys] = False
        self._counts -= hit
        removed = int(hit.sum())
        self.remaining -= removed
        return removed

    def groups(self) -> dict[int, set[tuple[int, ...]]]:
        """Uncovered tuples per mask; masks with nothing left are omitted."""
        out: dict[int, set[tuple[int, ...]]] = {}
        for k, mask in enumerate(self.masks):
            if self._counts[k] == 0:
                continue
            lo = int(self._offsets[k])
            present = np.nonzero(self._flat[lo:lo + int(self._sizes[k])])[0]
            params = mask_params(mask)
            radices = [self.model.values[i] for i in params]
            out[mask] = {self._decode(int(key), radices) for key in present}
        return out

    @staticmethod
    def _decode(key: int, radices) -> tuple[int, ...]:
        vals = []
        for v in reversed(radices):
            vals.append(key % v)
            key //= v
        return tuple(reversed(vals))

    def first_uncovered(self) -> tuple[int, tuple[int, ...]] | None:
        """Lowest-mask, lowest-key uncovered tuple, or None when exhausted."""
        for k, mask in enumerate(self.masks):
            if self._counts[k] == 0:
                continue
            lo = int(self._offsets[k])
            key = int(np.argmax(self._flat[lo:lo + int(self._sizes[k])]))
            params = mask_params(mask)
            return mask, self._decode(key, [self.model.values[i] for i in params])
        return None

    def dump(self) -> str:
        """One line per nonempty group: rendered mask, tab, uncovered count."""
        p = self.model.param_count
        return "\n".join(
            f"{mask_to_string(mask, p)}\t{int(self._counts[k])}"
            for k, mask in enumerate(self.masks)
            if self._counts[k] > 0
        )


def build_store(model: SystemModel) -> TupleStore:
    """Enumerate all interaction groups and fill them with full value products."""
    return TupleStore(model)


def verify_suite(suite, model: SystemModel) -> bool:
    """True iff replaying the suite against a fresh store covers everything."""
    store = TupleStore(model)
    for test in suite:
        store.remove_covered(getattr(test, "values", test))
        if store.remaining == 0:
            return True
    return store.remaining == 0


def uncovered_after(suite, model: SystemModel) -> int:
    """Tuples still uncovered after replaying the suite on a fresh store."""
    store = TupleStore(model)
    for test in suite:
        store.remove_covered(getattr(test, "values", test))
    return store.remaining


def expected_uniform_total(p: int, t: int, v: int) -> int:
    """Closed-form tuple total for a uniform model: C(p, t) * v**t."""
    return math.comb(p, t) * v**t
