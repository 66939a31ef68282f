"""Row <-> index lookup used when building Cayley tables from concrete models."""
from __future__ import annotations

import numpy as np


class RowIndex:
    """Map integer rows with entries in ``[-1, base)`` to their position in a list.

    Rows are packed into int64 keys by mixed radix when that fits, otherwise
    a dict keyed by the raw bytes is used.
    """

    def __init__(self, rows: np.ndarray, base: int):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        if rows.ndim != 2:
            raise ValueError("rows must be two dimensional")
        self.ncols = rows.shape[1]
        self.radix = base + 1
        self._packed = self.ncols == 0 or self.ncols * np.log2(self.radix) < 62
        if self._packed:
            self._powers = self.radix ** np.arange(self.ncols, dtype=np.int64)
            keys = self._keys(rows)
            self._order = np.argsort(keys, kind="stable")
            self._sorted = keys[self._order]
            if len(self._sorted) > 1 and np.any(self._sorted[1:] == self._sorted[:-1]):
                raise ValueError("duplicate rows")
        else:
            self._dict = {}
            for i, row in enumerate(rows):
                key = row.tobytes()
                if key in self._dict:
                    raise ValueError("duplicate rows")
                self._dict[key] = i

    def _keys(self, rows):
        if self.ncols == 0:
            return np.zeros(len(rows), dtype=np.int64)
        return (rows + 1) @ self._powers

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Indices of ``rows`` (shape ``(m, ncols)``); -1 where absent."""
        rows = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1, self.ncols)
        if self._packed:
            keys = self._keys(rows)
            pos = np.searchsorted(self._sorted, keys)
            pos = np.minimum(pos, len(self._sorted) - 1)
            found = self._sorted[pos] == keys if len(self._sorted) else np.zeros(len(keys), bool)
            out = np.where(found, self._order[pos] if len(self._sorted) else -1, -1)
            return out.astype(np.int64)
        return np.array([self._dict.get(r.tobytes(), -1) for r in rows], dtype=np.int64)


def table_from_rows(rows: np.ndarray, compose) -> np.ndarray:
    """Build ``mul[i, j]`` where ``compose(rows, j)`` returns rows of ``x_i * x_j``.

    Raises ``ValueError`` if some product falls outside the row set.
    """
    m = len(rows)
    base = int(rows.max()) + 1 if rows.size else 1
    index = RowIndex(rows, max(base, 1))
    mul = np.empty((m, m), dtype=np.int64)
    for j in range(m):
        col = index.lookup(compose(rows, j))
        if np.any(col < 0):
            i = int(np.argmax(col < 0))
            raise ValueError(f"product of elements {i} and {j} is not in the set")
        mul[:, j] = col
    return mul
