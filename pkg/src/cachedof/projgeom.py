"""Subspaces of GF(q)^k: canonical forms, enumeration, and q-analog counting.

Subspace identity is the reduced row-echelon basis (unique per subspace), and
the total order on subspaces is lexicographic on the flattened basis entries
under the integer element encoding of :mod:`cachedof.gf`.  All counting
functions return exact arbitrary-precision integers.
"""

import itertools
import math
from dataclasses import dataclass

from .errors import AmbientMismatchError
from .gf import make_field


def gaussian_binomial(a, b, q):
    """Number of b-dim subspaces of an a-dim vector space over GF(q)."""
    if a < 0 or b < 0 or b > a:
        raise ValueError(f"need a >= b >= 0, got a={a}, b={b}")
    num = den = 1
    for i in range(b):
        num *= q ** (a - i) - 1
        den *= q ** (b - i) - 1
    return num // den


def theta(a, q):
    """Number of 1-dim subspaces (projective points) of GF(q)^a; theta(0) = 0."""
    if a < 0:
        raise ValueError(f"need a >= 0, got {a}")
    return (q**a - 1) // (q - 1)


def count_li_point_sets(k, a, b, q):
    """Count unordered b-sets of points extending a fixed a-dim subspace to dim a+b.

    Returns prod_{i=0}^{b-1} (theta(k) - theta(a+i)) / b!, exactly.
    """
    if a < 0 or b < 0 or not 1 <= a + b <= k:
        raise ValueError(f"need a, b >= 0 and 1 <= a + b <= k, got k={k}, a={a}, b={b}")
    num = 1
    for i in range(b):
        num *= theta(k, q) - theta(a + i, q)
    return num // math.factorial(b)


def count_complements(a, q):
    """Number of points C with A' + C = A when dim A = a, dim A' = a - 1."""
    if a < 1:
        raise ValueError(f"need a >= 1, got {a}")
    return q ** (a - 1)


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(q)^k held as its reduced row-echelon basis.

    basis rows are tuples of element encodings; dim 0 (empty basis) is the
    trivial space.  Equality of canonical bases is equality of subspaces.
    """

    k: int
    q: int
    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    @property
    def sort_key(self):
        return tuple(x for row in self.basis for x in row)

    def contains_vector(self, vec):
        field = make_field(self.q)
        vec = list(vec)
        for row in self.basis:
            piv = next(i for i, x in enumerate(row) if x)
            c = vec[piv]
            if c:
                vec = [field.sub(x, field.mul(c, y)) for x, y in zip(vec, row)]
        return not any(vec)


@dataclass(frozen=True)
class SubspaceFamily:
    """Sorted, duplicate-free tuple of subspaces with an optional role tag."""

    members: tuple
    role: str = ""

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


def _rref(rows, k, field):
    work = [list(r) for r in rows]
    rank = 0
    for col in range(k):
        pivot = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = field.inv(work[rank][col])
        work[rank] = [field.mul(inv, x) for x in work[rank]]
        prow = work[rank]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                c = work[i][col]
                work[i] = [field.sub(x, field.mul(c, y)) for x, y in zip(work[i], prow)]
        rank += 1
        if rank == len(work):
            break
    return tuple(tuple(r) for r in work[:rank])


def trivial_subspace(k, q):
    return Subspace(k=k, q=q, basis=())


def canonicalize(vectors, k, q):
    """Subspace spanned by the given vectors, in canonical (RREF) form."""
    field = make_field(q)
    for v in vectors:
        if len(v) != k:
            raise ValueError(f"vector of length {len(v)} in ambient dimension {k}")
        if not all(0 <= x < q for x in v):
            raise ValueError(f"vector {v} has entries outside the element range")
    return Subspace(k=k, q=q, basis=_rref(vectors, k, field))


def _check_ambient(a, b):
    if a.k != b.k or a.q != b.q:
        raise AmbientMismatchError(
            f"ambient mismatch: GF({a.q})^{a.k} vs GF({b.q})^{b.k}"
        )


def subspace_sum(a, b):
    """Canonical form of span(a union b)."""
    _check_ambient(a, b)
    return canonicalize(a.basis + b.basis, a.k, a.q)


def contains(outer, inner):
    """True iff every basis vector of `inner` lies in `outer`."""
    _check_ambient(outer, inner)
    return all(outer.contains_vector(row) for row in inner.basis)


def _iter_rref_matrices(n_cols, n_rows, q):
    """All reduced row-echelon matrices of full row rank n_rows over GF(q)."""
    if n_rows == 0:
        yield ()
        return
    for piv in itertools.combinations(range(n_cols), n_rows):
        pivset = set(piv)
        free = [
            (i, j)
            for i in range(n_rows)
            for j in range(n_cols)
            if j > piv[i] and j not in pivset
        ]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n_cols for _ in range(n_rows)]
            for i, p in enumerate(piv):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield tuple(tuple(r) for r in rows)


def enumerate_superspaces(base, d, role=""):
    """All d-dim subspaces of GF(q)^k containing `base`, sorted canonically.

    Iterates over RREF matrices of the quotient space, so the work is
    proportional to the Gaussian binomial [k - dim base, d - dim base]_q
    rather than the count of all d-dim subspaces.
    """
    if not base.dim <= d <= base.k:
        raise ValueError(f"need dim(base) <= d <= k, got {base.dim}, {d}, {base.k}")
    pivots = {next(i for i, x in enumerate(row) if x) for row in base.basis}
    loose = [j for j in range(base.k) if j not in pivots]
    members = []
    for mat in _iter_rref_matrices(len(loose), d - base.dim, base.q):
        lifted = []
        for row in mat:
            vec = [0] * base.k
            for j, x in enumerate(row):
                vec[loose[j]] = x
            lifted.append(tuple(vec))
        members.append(canonicalize(base.basis + tuple(lifted), base.k, base.q))
    members.sort(key=lambda s: s.sort_key)
    return SubspaceFamily(members=tuple(members), role=role)


def projective_points(k, q, role=""):
    """All 1-dim subspaces of GF(q)^k, sorted canonically."""
    return enumerate_superspaces(trivial_subspace(k, q), 1, role=role)


def vector_to_int(vec, q):
    """Pack a coordinate tuple into one integer, coordinate 0 least significant."""
    out = 0
    for x in reversed(vec):
        out = out * q + x
    return out


def int_to_vector(n, k, q):
    out = []
    for _ in range(k):
        out.append(n % q)
        n //= q
    return tuple(out)
