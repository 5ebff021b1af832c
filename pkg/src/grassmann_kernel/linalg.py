"""Sparse exact row reduction over the rationals.

Rows are dicts ``{column: Fraction}``.  Smaller column indices have higher
pivot priority, so callers control normal forms by how they number columns.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Row = dict[int, Fraction]


class RowReducer:
    """Incrementally maintained reduced row echelon form.

    With ``track=True`` every pivot row remembers the combination of inserted
    rows (by label) that produced it, which is how membership certificates are
    recovered.
    """

    def __init__(self, track: bool = False):
        self.pivots: dict[int, Row] = {}
        self.track = track
        self.combos: dict[int, dict[Hashable, Fraction]] = {}

    def copy(self) -> "RowReducer":
        other = RowReducer(self.track)
        other.pivots = {c: dict(r) for c, r in self.pivots.items()}
        other.combos = {c: dict(r) for c, r in self.combos.items()}
        return other

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping[int, Fraction], with_combo: bool = False):
        """Residual of ``vec`` after subtracting pivot rows.

        Pivot rows are fully reduced, so one pass over the pivot columns present
        in ``vec`` suffices.  With ``with_combo`` also return the label
        combination that was subtracted.
        """
        out = dict(vec)
        combo: dict[Hashable, Fraction] = {}
        for col in [c for c in out if c in self.pivots]:
            f = out.get(col)
            if not f:
                continue
            for c, v in self.pivots[col].items():
                nv = out.get(c, 0) - f * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
            if with_combo and self.track:
                for lab, v in self.combos[col].items():
                    nv = combo.get(lab, 0) + f * v
                    if nv:
                        combo[lab] = nv
                    else:
                        combo.pop(lab, None)
        if with_combo:
            return out, combo
        return out

    def insert(self, vec: Mapping[int, Fraction], label: Hashable = None) -> bool:
        """Add a row; return True when it enlarges the row space."""
        residual, combo = self.reduce(vec, with_combo=True)
        if not residual:
            return False
        if self.track:
            # residual = vec - combo, so its own combination is label - combo
            own = {lab: -v for lab, v in combo.items()}
            own[label] = own.get(label, 0) + 1
            own = {k: v for k, v in own.items() if v}
        lead = min(residual)
        scale = 1 / residual[lead]
        residual = {c: v * scale for c, v in residual.items()}
        if self.track:
            own = {k: v * scale for k, v in own.items()}
        for col, row in self.pivots.items():
            f = row.get(lead)
            if not f:
                continue
            for c, v in residual.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            if self.track:
                rc = self.combos[col]
                for lab, v in own.items():
                    nv = rc.get(lab, 0) - f * v
                    if nv:
                        rc[lab] = nv
                    else:
                        rc.pop(lab, None)
        self.pivots[lead] = residual
        if self.track:
            self.combos[lead] = own
        return True

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)


def solve(equations: Iterable[Mapping[int, Fraction]], rhs: Iterable[Fraction], nunknowns: int):
    """Solve ``sum_j a_ij u_j = b_i`` exactly.

    Returns the particular solution with all free unknowns set to zero, or
    ``None`` when the system is inconsistent.
    """
    red = RowReducer()
    rhs_col = nunknowns
    for eq, b in zip(equations, rhs):
        row = {c: Fraction(v) for c, v in eq.items() if v}
        if b:
            row[rhs_col] = Fraction(b)
        if row:
            red.insert(row)
    if rhs_col in red.pivots:
        return None
    solution = [Fraction(0)] * nunknowns
    for col, row in red.pivots.items():
        solution[col] = row.get(rhs_col, Fraction(0))
    return solution


def nullspace(equations: Iterable[Mapping[int, Fraction]], nunknowns: int) -> list[Row]:
    """Basis of the solution space of the homogeneous system."""
    red = RowReducer()
    for eq in equations:
        row = {c: Fraction(v) for c, v in eq.items() if v}
        if row:
            red.insert(row)
    free = [c for c in range(nunknowns) if c not in red.pivots]
    basis = []
    for f in free:
        vec: Row = {f: Fraction(1)}
        for col, row in red.pivots.items():
            v = row.get(f)
            if v:
                vec[col] = -v
        basis.append(vec)
    return basis


def invert_matrix(matrix: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Exact inverse of a square matrix by Gauss-Jordan; None if singular."""
    n = len(matrix)
    work = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col]), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / work[col][col]
        work[col] = [v * inv for v in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[col])]
    return [row[n:] for row in work]
