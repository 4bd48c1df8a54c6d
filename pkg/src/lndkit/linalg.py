"""Sparse exact linear algebra over Q (reduced row echelon form)."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional

Row = Dict[int, Fraction]


def rref(rows: Iterable[Row]) -> Dict[int, Row]:
    """Reduced row echelon form, as ``{pivot column: row}`` with unit pivots."""
    pivots: Dict[int, Row] = {}
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v}
        for c in [c for c in row if c in pivots]:
            f = row.get(c)
            if not f:
                continue
            for k, v in pivots[c].items():
                w = row.get(k, 0) - f * v
                if w:
                    row[k] = w
                else:
                    row.pop(k, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {k: v * inv for k, v in row.items()}
        for prow in pivots.values():
            f = prow.get(pc)
            if f:
                for k, v in row.items():
                    w = prow.get(k, 0) - f * v
                    if w:
                        prow[k] = w
                    else:
                        prow.pop(k, None)
        pivots[pc] = row
    return pivots


def _rows_from_columns(columns: List[Dict[Hashable, Fraction]]) -> List[Row]:
    rows: Dict[Hashable, Row] = {}
    for j, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[j] = v
    return list(rows.values())


def nullspace(columns: List[Dict[Hashable, Fraction]]) -> List[Row]:
    """Basis of ``{c : sum(c[j] * columns[j]) == 0}``; columns are sparse
    vectors keyed by arbitrary row labels."""
    n = len(columns)
    piv = rref(_rows_from_columns(columns))
    basis = []
    for f in range(n):
        if f in piv:
            continue
        vec = {f: Fraction(1)}
        for pc, row in piv.items():
            v = row.get(f)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def solve(columns: List[Dict[Hashable, Fraction]], rhs: Dict[Hashable, Fraction]) -> Optional[Row]:
    """One solution of ``sum(x[j] * columns[j]) == rhs`` (free variables set
    to zero), or ``None`` if the system is inconsistent."""
    n = len(columns)
    piv = rref(_rows_from_columns(list(columns) + [rhs]))
    if n in piv:
        return None
    return {pc: row[n] for pc, row in piv.items() if row.get(n)}
