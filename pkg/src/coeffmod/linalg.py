"""Exact scalar arithmetic and dense exact linear algebra.

Two coefficient fields are supported: the rationals (arbitrary-precision
``Fraction`` entries) and prime fields F_q with canonical representatives in
``[0, q)``.  Prime-field matrices are stored as int64 numpy arrays so that
row reduction is vectorized; q*q must fit in int64, which holds for every
prime below 3*10^9.  No floating point exists anywhere in this module.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DimensionMismatchError, FieldMismatchError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin, valid far beyond the int64 matrix limit
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Descriptor plus arithmetic for an exact coefficient field."""

    name: str

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def of(self, n):
        """Embed a Python int (or Fraction over Q) into the field."""
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def random(self, rng):
        """Draw a coefficient for genericity arguments."""
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class RationalField(Field):
    name = "Q"

    # coefficients for random combinations are drawn from a bounded integer
    # box, emulating an infinite residue field
    RANDOM_BOUND = 100

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def of(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def random(self, rng):
        return Fraction(rng.randint(-self.RANDOM_BOUND, self.RANDOM_BOUND))


class PrimeField(Field):
    def __init__(self, q: int):
        if not _is_prime(q):
            raise ValueError(f"modulus {q} is not prime")
        if q * q > np.iinfo(np.int64).max:
            raise ValueError(f"modulus {q} too large for int64 kernels")
        self.q = q
        self.name = f"Fp:{q}"

    def zero(self):
        return 0

    def one(self):
        return 1

    def of(self, n):
        if isinstance(n, Fraction):
            if n.denominator == 1:
                return n.numerator % self.q
            return self.div(n.numerator % self.q, n.denominator % self.q)
        return int(n) % self.q

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def inv(self, a):
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.q)

    def is_zero(self, a):
        return a % self.q == 0

    def random(self, rng):
        return rng.randrange(self.q)


QQ = RationalField()


def field_from_name(name: str) -> Field:
    if name == "Q":
        return QQ
    if name.startswith("Fp:"):
        return PrimeField(int(name[3:]))
    raise ValueError(f"unknown field descriptor {name!r}")


def _check_same_field(a: Field, b: Field):
    if a != b:
        raise FieldMismatchError(f"fields differ: {a} vs {b}")


class ExactMatrix:
    """Dense exact matrix over Q or F_q.

    Prime-field data is a 2-D int64 numpy array with entries in [0, q);
    rational data is a list of lists of Fractions.  Instances are treated
    as immutable after construction.
    """

    def __init__(self, field: Field, data, copy: bool = True):
        self.field = field
        if isinstance(field, PrimeField):
            arr = np.asarray(data, dtype=np.int64)
            if arr.ndim != 2:
                arr = arr.reshape(len(data), -1) if len(data) else arr.reshape(0, 0)
            self.data = (arr % field.q).copy() if copy else arr % field.q
        else:
            self.data = [[Fraction(x) for x in row] for row in data]

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "ExactMatrix":
        if isinstance(field, PrimeField):
            return cls(field, np.zeros((rows, cols), dtype=np.int64), copy=False)
        return cls(field, [[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        if isinstance(field, PrimeField):
            return cls(field, np.eye(n, dtype=np.int64), copy=False)
        return cls(field, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        if isinstance(self.field, PrimeField):
            return int(self.data.shape[0])
        return len(self.data)

    @property
    def ncols(self) -> int:
        if isinstance(self.field, PrimeField):
            return int(self.data.shape[1])
        return len(self.data[0]) if self.data else 0

    def row(self, i: int):
        if isinstance(self.field, PrimeField):
            return self.data[i]
        return self.data[i]

    def get(self, i: int, j: int):
        if isinstance(self.field, PrimeField):
            return int(self.data[i, j])
        return self.data[i][j]

    def transpose(self) -> "ExactMatrix":
        if isinstance(self.field, PrimeField):
            return ExactMatrix(self.field, self.data.T, copy=True)
        return ExactMatrix(
            self.field,
            [[self.data[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
        )

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix) or self.field != other.field:
            return False
        if isinstance(self.field, PrimeField):
            return self.data.shape == other.data.shape and bool(
                np.array_equal(self.data, other.data)
            )
        return self.data == other.data

    def __repr__(self):
        return f"ExactMatrix({self.field}, {self.nrows}x{self.ncols})"


def rref(m: ExactMatrix):
    """Reduced row-echelon form and pivot columns.  Row space is preserved."""
    if isinstance(m.field, PrimeField):
        return _rref_mod(m)
    return _rref_frac(m)


def _rref_mod(m: ExactMatrix):
    q = m.field.q
    a = m.data.copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, q) % q
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % q
        pivots.append(c)
        r += 1
    out = ExactMatrix(m.field, a[:r] if r else np.zeros((0, cols), dtype=np.int64), copy=False)
    return out, pivots


def _rref_frac(m: ExactMatrix):
    a = [row[:] for row in m.data]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot_row = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return ExactMatrix(m.field, a[:r]), pivots


def kernel_basis(m: ExactMatrix):
    """Basis of the right null space, as a list of length-ncols vectors.

    Empty list iff the matrix has full column rank.
    """
    red, pivots = rref(m)
    cols = m.ncols
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    field = m.field
    for fc in free:
        if isinstance(field, PrimeField):
            v = np.zeros(cols, dtype=np.int64)
            v[fc] = 1
            for i, pc in enumerate(pivots):
                v[pc] = (-int(red.data[i, fc])) % field.q
            basis.append(v)
        else:
            v = [Fraction(0)] * cols
            v[fc] = Fraction(1)
            for i, pc in enumerate(pivots):
                v[pc] = -red.data[i][fc]
            basis.append(v)
    return basis


class Subspace:
    """A subspace of k^n held as an RREF basis; supports sum, intersection,
    membership and dimension."""

    def __init__(self, field: Field, ambient: int, matrix: ExactMatrix, pivots):
        self.field = field
        self.ambient = ambient
        self.matrix = matrix
        self.pivots = list(pivots)

    @classmethod
    def from_rows(cls, field: Field, ambient: int, rows) -> "Subspace":
        rows = list(rows)
        if not rows:
            m = ExactMatrix.zeros(field, 0, ambient)
            return cls(field, ambient, m, [])
        m = ExactMatrix(field, rows)
        if m.ncols != ambient:
            raise DimensionMismatchError(
                f"rows of width {m.ncols} in ambient dimension {ambient}"
            )
        red, piv = rref(m)
        return cls(field, ambient, red, piv)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def _check(self, other: "Subspace"):
        _check_same_field(self.field, other.field)
        if self.ambient != other.ambient:
            raise DimensionMismatchError(
                f"ambient dimensions differ: {self.ambient} vs {other.ambient}"
            )

    def reduce_vector(self, v):
        """Residual of v after elimination against the basis rows.

        The residual is the canonical coset representative supported on the
        non-pivot coordinates; it is zero iff v lies in the subspace.
        """
        if isinstance(self.field, PrimeField):
            q = self.field.q
            w = np.asarray(v, dtype=np.int64) % q
            for i, pc in enumerate(self.pivots):
                c = int(w[pc])
                if c:
                    w = (w - c * self.matrix.data[i]) % q
            return w
        w = [Fraction(x) for x in v]
        for i, pc in enumerate(self.pivots):
            c = w[pc]
            if c != 0:
                row = self.matrix.data[i]
                w = [x - c * y for x, y in zip(w, row)]
        return w

    def contains_vector(self, v) -> bool:
        w = self.reduce_vector(v)
        if isinstance(self.field, PrimeField):
            return not w.any()
        return all(x == 0 for x in w)

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains_vector(other.matrix.row(i)) for i in range(other.dim))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return False
        self._check(other)
        return self.matrix == other.matrix

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        rows = [self.matrix.row(i) for i in range(self.dim)]
        rows += [other.matrix.row(i) for i in range(other.dim)]
        return Subspace.from_rows(self.field, self.ambient, rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection via the left kernel of the stacked basis matrices."""
        self._check(other)
        a, b = self.dim, other.dim
        if a == 0 or b == 0:
            return Subspace.from_rows(self.field, self.ambient, [])
        if isinstance(self.field, PrimeField):
            stacked = np.vstack([self.matrix.data, other.matrix.data])
            left = kernel_basis(ExactMatrix(self.field, stacked.T, copy=False))
            rows = [(w[:a] @ self.matrix.data) % self.field.q for w in left]
        else:
            stacked = self.matrix.data + other.matrix.data
            cols = self.ambient
            transposed = [[stacked[i][j] for i in range(a + b)] for j in range(cols)]
            left = kernel_basis(ExactMatrix(self.field, transposed))
            rows = []
            for w in left:
                vec = [Fraction(0)] * cols
                for i in range(a):
                    if w[i] != 0:
                        vec = [x + w[i] * y for x, y in zip(vec, self.matrix.data[i])]
                rows.append(vec)
        return Subspace.from_rows(self.field, self.ambient, rows)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, {self.field})"


class SpanBuilder:
    """Incremental row-space accumulator.

    Rows are inserted one at a time and reduced against the current basis;
    dependent rows are dropped.  The basis is kept in echelon (not fully
    reduced) form ordered by pivot column, which is enough for membership
    tests during accumulation; ``subspace()`` returns the canonical RREF.
    """

    def __init__(self, field: Field, ambient: int):
        self.field = field
        self.ambient = ambient
        self.rows = []
        self.pivots = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _reduce(self, v):
        if isinstance(self.field, PrimeField):
            q = self.field.q
            w = np.asarray(v, dtype=np.int64) % q
            for pc, row in zip(self.pivots, self.rows):
                c = int(w[pc])
                if c:
                    w = (w - c * row) % q
            return w
        w = [Fraction(x) for x in v]
        for pc, row in zip(self.pivots, self.rows):
            c = w[pc]
            if c != 0:
                w = [x - c * y for x, y in zip(w, row)]
        return w

    def insert(self, v) -> bool:
        """Insert a vector; returns True if it enlarged the span."""
        w = self._reduce(v)
        if isinstance(self.field, PrimeField):
            nz = np.nonzero(w)[0]
            if nz.size == 0:
                return False
            pc = int(nz[0])
            w = w * pow(int(w[pc]), -1, self.field.q) % self.field.q
        else:
            pc = next((i for i, x in enumerate(w) if x != 0), None)
            if pc is None:
                return False
            inv = 1 / w[pc]
            w = [x * inv for x in w]
        at = next((i for i, p in enumerate(self.pivots) if p > pc), len(self.pivots))
        self.pivots.insert(at, pc)
        self.rows.insert(at, w)
        return True

    def contains_vector(self, v) -> bool:
        w = self._reduce(v)
        if isinstance(self.field, PrimeField):
            return not w.any()
        return all(x == 0 for x in w)

    def subspace(self) -> Subspace:
        return Subspace.from_rows(self.field, self.ambient, self.rows)
