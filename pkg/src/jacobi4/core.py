"""Symmetric matrices, the off-norm, and signed permutations.

Matrices are dense with exact symmetry enforced: every mutation writes
both triangles from one computed value.  Indices are 0-based throughout
the API; serialized pair/file formats are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class SymMatrix:
    """Dense symmetric n x n matrix over a scalar backend."""

    __slots__ = ("n", "a")

    def __init__(self, n: int, rows=None):
        if n < 2:
            raise ValueError("order must be >= 2")
        self.n = n
        if rows is None:
            self.a = [[0.0] * n for _ in range(n)]
        else:
            if len(rows) != n or any(len(r) != n for r in rows):
                raise ValueError("rows do not form an n x n grid")
            self.a = [list(r) for r in rows]
            for r in range(n):
                for s in range(r + 1, n):
                    if not (self.a[r][s] == self.a[s][r]):
                        raise ValueError(f"not symmetric at ({r},{s})")

    @classmethod
    def zeros(cls, n: int, ctx) -> "SymMatrix":
        z = ctx.zero()
        m = cls(n)
        m.a = [[z] * n for _ in range(n)]
        return m

    @classmethod
    def diagonal(cls, values, ctx) -> "SymMatrix":
        m = cls.zeros(len(values), ctx)
        for r, v in enumerate(values):
            m.a[r][r] = ctx.convert(v)
        return m

    def copy(self) -> "SymMatrix":
        m = SymMatrix.__new__(SymMatrix)
        m.n = self.n
        m.a = [row[:] for row in self.a]
        return m

    def get(self, r: int, s: int):
        return self.a[r][s]

    def set_sym(self, r: int, s: int, value) -> None:
        self.a[r][s] = value
        self.a[s][r] = value

    def diag(self):
        return [self.a[r][r] for r in range(self.n)]

    def upper_pairs(self):
        """Yield (r, s, value) over the strict upper triangle, row-major."""
        for r in range(self.n):
            for s in range(r + 1, self.n):
                yield r, s, self.a[r][s]

    def is_diagonal(self) -> bool:
        return all(v == 0 for _, _, v in self.upper_pairs())

    def __eq__(self, other):
        return (
            isinstance(other, SymMatrix)
            and self.n == other.n
            and all(
                self.a[r][s] == other.a[r][s]
                for r in range(self.n)
                for s in range(self.n)
            )
        )

    def __repr__(self):
        return f"SymMatrix(n={self.n})"

    # -- serialization: JSON {"n": int, "entries": row-major decimal strings},
    #    CSV one row per line --

    def to_json(self, ctx) -> str:
        entries = [ctx.to_decimal(v) for row in self.a for v in row]
        return json.dumps({"n": self.n, "entries": entries})

    @classmethod
    def from_json(cls, text: str, ctx) -> "SymMatrix":
        try:
            data = json.loads(text)
            n = int(data["n"])
            raw = data["entries"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed matrix JSON: {exc}") from exc
        if n < 2 or len(raw) != n * n:
            raise ValueError("matrix JSON has wrong entry count")
        vals = [ctx.from_decimal(s) for s in raw]
        rows = [vals[r * n:(r + 1) * n] for r in range(n)]
        return cls(n, rows)

    def to_csv(self, ctx) -> str:
        return "\n".join(
            ",".join(ctx.to_decimal(v) for v in row) for row in self.a
        ) + "\n"


def off_norm(x: SymMatrix, ctx):
    """sqrt of the sum of squared strict-upper entries; 0 iff diagonal."""
    with ctx.active():
        total = ctx.zero()
        a, n = x.a, x.n
        for r in range(n):
            for s in range(r + 1, n):
                v = a[r][s]
                total = total + v * v
        return ctx.sqrt(total)


def off_norm_sq(x: SymMatrix, ctx):
    with ctx.active():
        total = ctx.zero()
        a, n = x.a, x.n
        for r in range(n):
            for s in range(r + 1, n):
                v = a[r][s]
                total = total + v * v
        return total


@dataclass(frozen=True)
class SignedPermutation:
    """Signed permutation matrix: column j equals sign[j] * e[image[j]]."""

    images: tuple[tuple[int, int], ...]

    def __post_init__(self):
        idx = [i for i, _ in self.images]
        if sorted(idx) != list(range(len(idx))):
            raise ValueError("index map is not a bijection")
        if any(s not in (1, -1) for _, s in self.images):
            raise ValueError("signs must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.images)

    @staticmethod
    def identity(n: int) -> "SignedPermutation":
        return SignedPermutation(tuple((j, 1) for j in range(n)))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "SignedPermutation":
        imgs = list(range(n))
        imgs[i], imgs[j] = j, i
        return SignedPermutation(tuple((k, 1) for k in imgs))

    def is_pure(self) -> bool:
        return all(s == 1 for _, s in self.images)

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """Matrix product self @ other."""
        if self.n != other.n:
            raise ValueError("order mismatch")
        out = []
        for j in range(self.n):
            pj, sj = other.images[j]
            qj, tj = self.images[pj]
            out.append((qj, sj * tj))
        return SignedPermutation(tuple(out))

    def power(self, k: int) -> "SignedPermutation":
        if k < 0:
            raise ValueError("negative power")
        acc = SignedPermutation.identity(self.n)
        for _ in range(k):
            acc = acc.compose(self)
        return acc

    def column_vectors(self):
        """Human-readable form: list like ['e1', '-e2', ...] (1-based)."""
        return [f"{'-' if s < 0 else ''}e{i + 1}" for i, s in self.images]


def conjugate_signed_perm(x: SymMatrix, q: SignedPermutation) -> SymMatrix:
    """Q^T X Q.  Pure entry shuffling with signs; no rounding, so the
    off-norm is preserved exactly."""
    if x.n != q.n:
        raise ValueError("order mismatch")
    n = x.n
    out = SymMatrix.__new__(SymMatrix)
    out.n = n
    rows = []
    for r in range(n):
        pr, sr = q.images[r]
        row = []
        for s in range(n):
            ps, ss = q.images[s]
            v = x.a[pr][ps]
            if sr * ss < 0 and v != 0:
                v = -v
            row.append(v)
        rows.append(row)
    out.a = rows
    return out


def q_rotation() -> SignedPermutation:
    """The order-6 signed permutation [e1 e3 e4 -e2] used by the parallel
    step operator."""
    return SignedPermutation(((0, 1), (2, 1), (3, 1), (1, -1)))


def p12() -> SignedPermutation:
    return SignedPermutation.transposition(4, 0, 1)


def p34() -> SignedPermutation:
    return SignedPermutation.transposition(4, 2, 3)
