"""Weight vectors pairing metric instances with their coefficients.

The genotype is conceptually a ring (the last element points back to the
first), which matters only to the genetic operators; here it is held as a
flat float array constrained to the probability simplex.
"""

from __future__ import annotations

import numpy as np

NORMALIZE_TOL = 1e-9


class WeightVector:
    __slots__ = ("values",)

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("weight vector must be a non-empty 1-d sequence")
        self.values = arr

    @staticmethod
    def uniform(n: int) -> "WeightVector":
        if n < 1:
            raise ValueError("weight vector needs at least one entry")
        return WeightVector(np.full(n, 1.0 / n))

    def normalized(self) -> "WeightVector":
        """Project onto the simplex: divide by the sum, uniform on all-zero."""
        clipped = np.clip(self.values, 0.0, None)
        total = clipped.sum()
        if total <= 0.0:
            return WeightVector.uniform(len(clipped))
        return WeightVector(clipped / total)

    def is_normalized(self, tol: float = NORMALIZE_TOL) -> bool:
        v = self.values
        return bool((v >= 0.0).all() and abs(v.sum() - 1.0) <= tol)

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, idx):
        return float(self.values[idx])

    def __eq__(self, other):
        return isinstance(other, WeightVector) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return "WeightVector(%s)" % np.array2string(self.values, precision=4)

    def to_mapping(self, names: list[str]) -> dict[str, float]:
        if len(names) != len(self):
            raise ValueError("name list does not match vector length")
        return {name: float(w) for name, w in zip(names, self.values)}

    @staticmethod
    def from_mapping(mapping: dict[str, float], names: list[str]) -> "WeightVector":
        """Align a name->weight map to the ensemble order; missing names are 0."""
        unknown = set(mapping) - set(names)
        if unknown:
            raise ValueError("unknown metric names: %s" % ", ".join(sorted(unknown)))
        return WeightVector([float(mapping.get(name, 0.0)) for name in names])
