"""Exact arithmetic over small finite fields GF(p^d) and dense matrices.

Elements are plain ints in ``range(q)``.  An element's base-p digits are the
coefficients of its polynomial representative, least significant digit first,
so in GF(4) built on x^2 + x + 1 the element 2 is ``x`` and 3 is ``x + 1``.

Vectors are rows.  A code acts on a message row ``X`` by right
multiplication, ``X @ C``, everywhere in the package.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    NonPrimeCharacteristic,
    NotSquare,
    OrderCapExceeded,
    RaggedBlocks,
    ReduciblePolynomial,
)

MAX_ORDER = 256


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


# --- polynomials over GF(p), coefficient lists low -> high -----------------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _monic_polys(p: int, degree: int) -> Iterator[list[int]]:
    """Monic polynomials of exactly ``degree``, in high-to-low lexicographic order."""
    for high_to_low in itertools.product(range(p), repeat=degree):
        yield list(reversed(high_to_low)) + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    poly = _poly_trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for div in _monic_polys(p, d):
            if not _poly_mod(poly, div, p):
                return False
    return True


def default_irreducible(p: int, degree: int) -> tuple[int, ...]:
    for cand in _monic_polys(p, degree):
        if is_irreducible(cand, p):
            return tuple(cand)
    raise ReduciblePolynomial(f"no irreducible polynomial of degree {degree} over GF({p})")


# --- fields ----------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^degree) with its reduction polynomial (low -> high coefficients).

    Construction validates primality, the order cap and irreducibility, then
    materializes full addition, multiplication, negation and inverse tables.
    Instances are immutable and compare equal iff (p, degree, poly) agree.
    """

    p: int
    degree: int = 1
    poly: tuple[int, ...] = ()
    max_order: int = field(default=MAX_ORDER, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NonPrimeCharacteristic(f"characteristic {self.p} is not prime")
        if self.degree < 1:
            raise ReduciblePolynomial(f"degree must be positive, got {self.degree}")
        q = self.p**self.degree
        if q > self.max_order:
            raise OrderCapExceeded(f"field order {q} exceeds cap {self.max_order}")
        poly = tuple(int(c) % self.p for c in self.poly)
        if self.degree == 1:
            poly = ()
        else:
            if not poly:
                poly = default_irreducible(self.p, self.degree)
            if len(poly) != self.degree + 1 or poly[-1] != 1:
                raise ReduciblePolynomial(f"poly {list(poly)} is not monic of degree {self.degree}")
            if not is_irreducible(poly, self.p):
                raise ReduciblePolynomial(f"poly {list(poly)} is reducible over GF({self.p})")
        object.__setattr__(self, "poly", poly)
        add, mul = _build_tables(self.p, self.degree, poly)
        object.__setattr__(self, "_add", add)
        object.__setattr__(self, "_mul", mul)
        object.__setattr__(self, "_neg", tuple(row.index(0) for row in add))
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)
        object.__setattr__(self, "_inv", tuple(inv))

    @property
    def q(self) -> int:
        return self.p**self.degree

    @property
    def order(self) -> int:
        return self.q

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self._mul[a][self.inv(b)]

    def elements(self) -> range:
        return range(self.q)

    def to_json(self) -> dict:
        out: dict = {"p": self.p, "degree": self.degree}
        if self.degree > 1:
            out["poly"] = list(self.poly)
        return out

    def __str__(self) -> str:
        return f"GF({self.q})"


def _build_tables(p: int, degree: int, poly: tuple[int, ...]):
    q = p**degree
    digits = [[(v // p**i) % p for i in range(degree)] for v in range(q)]

    def encode(coefs: Sequence[int]) -> int:
        return sum(c * p**i for i, c in enumerate(coefs))

    add = tuple(
        tuple(encode([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q))
        for a in range(q)
    )
    if degree == 1:
        mul = tuple(tuple(a * b % p for b in range(q)) for a in range(q))
        return add, mul
    rows = []
    for a in range(q):
        row = []
        for b in range(q):
            prod = [0] * (2 * degree - 1)
            for i, x in enumerate(digits[a]):
                if x:
                    for j, y in enumerate(digits[b]):
                        prod[i + j] = (prod[i + j] + x * y) % p
            rem = _poly_mod(prod, poly, p)
            row.append(encode(rem + [0] * (degree - len(rem))))
        rows.append(tuple(row))
    return add, tuple(rows)


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, degree: int, poly: tuple[int, ...], max_order: int) -> FieldSpec:
    return FieldSpec(p, degree, poly, max_order)


def make_field(p: int, degree: int = 1, poly: Sequence[int] | None = None, *, max_order: int = MAX_ORDER) -> FieldSpec:
    """Build (or fetch the cached) GF(p^degree).

    With ``degree > 1`` and no ``poly`` the lexicographically smallest monic
    irreducible polynomial is used, reading coefficients from the top down.
    """
    return _cached_field(int(p), int(degree), tuple(poly or ()), max_order)


def field_from_json(obj: dict) -> FieldSpec:
    return make_field(obj["p"], obj.get("degree", 1), obj.get("poly"))


def field_order_to_spec(q: int) -> FieldSpec:
    """GF(q) from its order alone, with the default reduction polynomial."""
    for p in range(2, q + 1):
        if q % p == 0:
            d, rest = 0, q
            while rest % p == 0:
                rest //= p
                d += 1
            if rest != 1:
                raise NonPrimeCharacteristic(f"{q} is not a prime power")
            return make_field(p, d)
    raise NonPrimeCharacteristic(f"{q} is not a prime power")


# --- matrices --------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    """Dense immutable matrix over a FieldSpec, entries stored row-major."""

    field: FieldSpec
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        q = self.field.q
        if any(not 0 <= v < q for v in self.entries):
            raise ValueError(f"matrix entry outside GF({q})")

    # constructors

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionMismatch("ragged row lengths")
        return cls(field, len(rows), cols, tuple(int(v) for r in rows for v in r))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def selector(cls, field: FieldSpec, n: int, k: int, blocks: Sequence[int]) -> "Matrix":
        """(n*k) x (n*len(blocks)) matrix picking 1-based message blocks out of a row."""
        ent = [0] * (n * k * n * len(blocks))
        width = n * len(blocks)
        for out, b in enumerate(blocks):
            for t in range(n):
                ent[((b - 1) * n + t) * width + out * n + t] = 1
        return cls(field, n * k, width, tuple(ent))

    # access

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j :: self.cols] if self.cols else ()

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    # algebra

    def _check_field(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        add = self.field._add
        return Matrix(self.field, self.rows, self.cols, tuple(add[a][b] for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        neg = self.field._neg
        return Matrix(self.field, self.rows, self.cols, tuple(neg[a] for a in self.entries))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c: int) -> "Matrix":
        mul = self.field._mul[c]
        return Matrix(self.field, self.rows, self.cols, tuple(mul[a] for a in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        add, mul = self.field._add, self.field._mul
        cols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            nz = [(t, mul[a]) for t, a in enumerate(r) if a]
            for c in cols:
                s = 0
                for t, mrow in nz:
                    b = c[t]
                    if b:
                        s = add[s][mrow[b]]
                out.append(s)
        return Matrix(self.field, self.rows, other.cols, tuple(out))

    def vecmul(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Row vector times this matrix."""
        if len(vec) != self.rows:
            raise DimensionMismatch(f"vector of length {len(vec)} against {self.shape}")
        add, mul = self.field._add, self.field._mul
        acc = [0] * self.cols
        for i, a in enumerate(vec):
            if a:
                m = mul[a]
                base = i * self.cols
                for j in range(self.cols):
                    b = self.entries[base + j]
                    if b:
                        acc[j] = add[acc[j]][m[b]]
        return tuple(acc)

    @property
    def T(self) -> "Matrix":
        return Matrix(
            self.field, self.cols, self.rows, tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows))
        )

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(
            self.field, r1 - r0, c1 - c0, tuple(self.entries[i * self.cols + j] for i in range(r0, r1) for j in range(c0, c1))
        )

    def block(self, i: int, j: int, n: int) -> "Matrix":
        """The n x n block at block position (i, j), 0-based."""
        return self.submatrix(i * n, (i + 1) * n, j * n, (j + 1) * n)

    def rows_block(self, i: int, n: int) -> "Matrix":
        return self.submatrix(i * n, (i + 1) * n, 0, self.cols)

    def cols_block(self, j: int, n: int) -> "Matrix":
        return self.submatrix(0, self.rows, j * n, (j + 1) * n)


def hstack(mats: Sequence[Matrix], field: FieldSpec | None = None, rows: int | None = None) -> Matrix:
    if not mats:
        if field is None or rows is None:
            raise DimensionMismatch("empty hstack needs field and row count")
        return Matrix.zeros(field, rows, 0)
    f, r = mats[0].field, mats[0].rows
    for m in mats:
        if m.field != f:
            raise FieldMismatch("hstack over mixed fields")
        if m.rows != r:
            raise DimensionMismatch("hstack row counts differ")
    ent = tuple(v for i in range(r) for m in mats for v in m.row(i))
    return Matrix(f, r, sum(m.cols for m in mats), ent)


def vstack(mats: Sequence[Matrix], field: FieldSpec | None = None, cols: int | None = None) -> Matrix:
    if not mats:
        if field is None or cols is None:
            raise DimensionMismatch("empty vstack needs field and column count")
        return Matrix.zeros(field, 0, cols)
    f, c = mats[0].field, mats[0].cols
    for m in mats:
        if m.field != f:
            raise FieldMismatch("vstack over mixed fields")
        if m.cols != c:
            raise DimensionMismatch("vstack column counts differ")
    return Matrix(f, sum(m.rows for m in mats), c, tuple(v for m in mats for v in m.entries))


# --- elimination -----------------------------------------------------------


def rref(field: FieldSpec, rows: Iterable[Sequence[int]], ncols: int, pivot_limit: int | None = None):
    """Reduced row echelon form of a list of rows.

    Pivots are only searched in the first ``pivot_limit`` columns (all by
    default).  Returns ``(rows, pivots)`` with the reduced rows as lists.
    """
    add, mul, neg, inv = field._add, field._mul, field._neg, field._inv
    work = [list(r) for r in rows]
    limit = ncols if pivot_limit is None else pivot_limit
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r == len(work):
            break
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        s = mul[inv[prow[c]]]
        for j in range(c, ncols):
            prow[j] = s[prow[j]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = mul[neg[work[i][c]]]
                wi = work[i]
                for j in range(c, ncols):
                    if prow[j]:
                        wi[j] = add[wi[j]][f[prow[j]]]
        pivots.append(c)
        r += 1
    return work, pivots


def matrix_rank(A: Matrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    # eliminate along the shorter side
    M = A if A.rows <= A.cols else A.T
    _, piv = rref(M.field, [M.row(i) for i in range(M.rows)], M.cols)
    return len(piv)


def solve_left(A: Matrix, B: Matrix) -> Matrix | None:
    """Find X with X @ A == B, or None when no solution exists.

    Free variables of the reduced echelon parametrization are set to zero, so
    the returned solution is canonical.
    """
    if A.field != B.field:
        raise FieldMismatch(f"{A.field} vs {B.field}")
    if A.cols != B.cols:
        raise DimensionMismatch(f"X @ A = B needs A.cols == B.cols, got {A.shape} and {B.shape}")
    f = A.field
    r, s = A.rows, B.rows
    # A^T Y = B^T with Y = X^T; augmented rows are indexed by columns of A.
    aug = [list(A.col(c)) + list(B.col(c)) for c in range(A.cols)]
    red, piv = rref(f, aug, r + s, pivot_limit=r)
    for row in red[len(piv) :]:
        if any(row[r:]):
            return None
    Y = [[0] * s for _ in range(r)]
    for row, pc in zip(red, piv):
        Y[pc] = row[r:]
    return Matrix(f, s, r, tuple(Y[i][j] for j in range(s) for i in range(r)))


def invert_matrix(A: Matrix) -> Matrix | None:
    if A.rows != A.cols:
        raise NotSquare(f"cannot invert a {A.rows}x{A.cols} matrix")
    n = A.rows
    aug = [list(A.row(i)) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    red, piv = rref(A.field, aug, 2 * n, pivot_limit=n)
    if len(piv) < n:
        return None
    return Matrix(A.field, n, n, tuple(v for row in red for v in row[n:]))


def block_assemble(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Place an r x c grid of n x n blocks into one (r*n) x (c*n) matrix."""
    if not blocks or not blocks[0]:
        raise RaggedBlocks("empty block grid")
    c = len(blocks[0])
    if any(len(row) != c for row in blocks):
        raise RaggedBlocks("block rows have different lengths")
    first = blocks[0][0]
    n = first.rows
    for row in blocks:
        for b in row:
            if b.rows != n or b.cols != n:
                raise RaggedBlocks(f"expected {n}x{n} blocks, found {b.rows}x{b.cols}")
            if b.field != first.field:
                raise FieldMismatch("blocks over mixed fields")
    return vstack([hstack(list(row)) for row in blocks])


def block_extract(M: Matrix, n: int) -> list[list[Matrix]]:
    if M.rows % n or M.cols % n:
        raise RaggedBlocks(f"{M.shape} is not a grid of {n}x{n} blocks")
    return [[M.block(i, j, n) for j in range(M.cols // n)] for i in range(M.rows // n)]


def column_space_contains(A: Matrix, B: Matrix) -> bool:
    """Whether every column of B lies in the column space of A."""
    if A.cols == 0:
        return B.is_zero()
    return solve_left(A.T, B.T) is not None


def iter_vectors(field: FieldSpec, length: int) -> Iterator[tuple[int, ...]]:
    """All vectors of the given length, lexicographic (first coordinate most significant)."""
    return itertools.product(range(field.q), repeat=length)
