"""Small dense matrices over Q(zeta_N): products, rank, inverse, linear solves."""

from __future__ import annotations

from ioalg.exactnum import CycloNumber, as_cyclo


class SingularMatrixError(ValueError):
    pass


class Matrix:
    __slots__ = ("rows", "order", "nrows", "ncols")

    def __init__(self, rows, order: int):
        self.order = order
        self.rows = [[as_cyclo(c, order) for c in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, n: int, order: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], order)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ "
                             f"{other.nrows}x{other.ncols}")
        zero = CycloNumber.zero(self.order)
        out = []
        for row in self.rows:
            new = []
            for j in range(other.ncols):
                acc = zero
                for k, a in enumerate(row):
                    if a:
                        b = other.rows[k][j]
                        if b:
                            acc = acc + a * b
                new.append(acc)
            out.append(new)
        return Matrix(out, self.order)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __repr__(self):
        return f"Matrix({[[str(c) for c in r] for r in self.rows]})"

    def _echelon(self, augment=None):
        """Row-reduce [self | augment]; returns (reduced rows, pivot columns)."""
        rows = [list(r) + (list(augment[i]) if augment is not None else [])
                for i, r in enumerate(self.rows)]
        pivots = []
        r = 0
        for c in range(self.ncols):
            p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [x * inv for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return rows, pivots

    def rank(self) -> int:
        return len(self._echelon()[1])

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise SingularMatrixError("non-square matrix")
        ident = Matrix.identity(self.nrows, self.order).rows
        rows, pivots = self._echelon(ident)
        if len(pivots) != self.nrows:
            raise SingularMatrixError("singular matrix")
        return Matrix([r[self.ncols:] for r in rows], self.order)

    def transpose(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.rows)], self.order)


def solve_combination(vectors, target, order: int):
    """Coefficients c with sum_j c_j vectors[j] == target, or None if not in the span.

    ``vectors`` and ``target`` are dicts coordinate -> scalar.  Raises
    SingularMatrixError if the vectors are linearly dependent.
    """
    coords = sorted(set().union(*[set(v) for v in vectors], set(target)), key=repr)
    n = len(vectors)
    if n == 0:
        return [] if not any(target.values()) else None
    zero = CycloNumber.zero(order)
    # equations: one row per coordinate
    mat = Matrix([[v.get(c, zero) for v in vectors] for c in coords], order)
    aug = [[as_cyclo(target.get(c, zero), order)] for c in coords]
    rows, pivots = mat._echelon(aug)
    if len(pivots) != n:
        raise SingularMatrixError("basis tables are linearly dependent")
    for row in rows[n:]:
        if row[n]:
            return None
    return [rows[i][n] for i in range(n)]
