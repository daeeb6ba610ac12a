"""
Exact linear algebra over Z and Z/N.
Kernels mod N are found by splitting N into prime powers and running a local Smith
reduction with tracked column operations; integer lattices use incremental Hermite insertion.
"""

import logging
from typing import Dict, List, Sequence, Tuple

from sympy import factorint
from sympy.core.intfunc import igcdex

logger = logging.getLogger(__name__)

Vector = List[int]
Matrix = List[List[int]]


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def local_smith(matrix: Sequence[Sequence[int]], ncols: int, p: int, e: int) -> Tuple[List[int], Matrix]:
    """
    Diagonalize a matrix over Z/p^e.

    Args:
        matrix: rows of integers
        ncols: number of columns (needed when there are no rows)
        p: prime
        e: exponent, working modulo p^e

    Returns:
        (valuations, Q): the pivots are p^valuations[i] (unit factors removed) and Q is the
        accumulated column transform, so A*Q is diagonal after row operations
    """
    mod = p ** e
    a = [[x % mod for x in row] for row in matrix]
    m, n = len(a), ncols
    q = [[int(i == j) for j in range(n)] for i in range(n)]
    valuations: List[int] = []

    t = 0
    while t < min(m, n):
        # Pivot of least p-adic valuation in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j]:
                    v = _valuation(a[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        for row in q:
            row[t], row[j] = row[j], row[t]

        pv = p ** v
        unit_inv = pow(a[t][t] // pv, -1, mod)
        a[t] = [(x * unit_inv) % mod for x in a[t]]
        for r in range(m):
            if r != t and a[r][t]:
                f = a[r][t] // pv
                a[r] = [(x - f * y) % mod for x, y in zip(a[r], a[t])]
        for c in range(n):
            if c != t and a[t][c]:
                f = a[t][c] // pv
                for row in a:
                    row[c] = (row[c] - f * row[t]) % mod
                for row in q:
                    row[c] = (row[c] - f * row[t]) % mod
        valuations.append(v)
        t += 1
    return valuations, q


def kernel_mod(matrix: Sequence[Sequence[int]], ncols: int, modulus: int) -> Tuple[List[Vector], int]:
    """
    Generators and size of {v in (Z/N)^n : A v = 0 mod N}.

    Args:
        matrix: the condition matrix, one row per linear condition
        ncols: number of unknowns
        modulus: N >= 2

    Returns:
        (generators, size): generators span the kernel as a Z/N-module; size is its order
    """
    generators: List[Vector] = []
    size = 1
    for p, e in sorted(factorint(modulus).items()):
        pe = p ** e
        rest = modulus // pe
        # CRT idempotent: 1 mod p^e, 0 mod the cofactor
        idem = (rest * pow(rest, -1, pe)) % modulus if rest > 1 else 1
        valuations, q = local_smith(matrix, ncols, p, e)
        rank = len(valuations)
        size *= p ** (sum(valuations) + e * (ncols - rank))
        for col in range(ncols):
            if col < rank:
                if valuations[col] == 0:
                    continue
                factor = p ** (e - valuations[col])
            else:
                factor = 1
            vec = [(q[row][col] * factor % pe) * idem % modulus for row in range(ncols)]
            if any(vec):
                generators.append(vec)
        logger.debug("mod %d^%d: rank %d, valuations %s", p, e, rank, valuations)
    return generators, size


def kernel_size_mod(matrix: Sequence[Sequence[int]], ncols: int, modulus: int) -> int:
    return kernel_mod(matrix, ncols, modulus)[1]


def mat_vec_mod(matrix: Sequence[Sequence[int]], vec: Sequence[int], modulus: int) -> Vector:
    return [sum(a * b for a, b in zip(row, vec)) % modulus for row in matrix]


class HermiteLattice:
    """Integer lattice in Z^n kept as echelon rows keyed by pivot column."""

    def __init__(self, dimension: int):
        """
        Initialize an empty lattice.

        Args:
            dimension: ambient rank n
        """
        self.dimension = dimension
        self.rows: Dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, vector: Sequence[int]) -> bool:
        """Add a generator; returns True when the rank grew."""
        v = list(vector)
        while True:
            pivot = next((i for i, x in enumerate(v) if x), None)
            if pivot is None:
                return False
            row = self.rows.get(pivot)
            if row is None:
                self.rows[pivot] = v if v[pivot] > 0 else [-x for x in v]
                return True
            s, t, g = igcdex(row[pivot], v[pivot])
            a, b = row[pivot] // g, v[pivot] // g
            new_row = [s * x + t * y for x, y in zip(row, v)]
            v = [a * y - b * x for x, y in zip(row, v)]
            self.rows[pivot] = new_row if new_row[pivot] > 0 else [-x for x in new_row]

    def basis(self) -> List[Vector]:
        return [self.rows[p] for p in sorted(self.rows)]

    def coordinates(self, vector: Sequence[int]) -> Vector:
        """
        Integer coordinates of a lattice vector in basis().

        Raises:
            ValueError: if the vector is not in the lattice
        """
        v = list(vector)
        coords = []
        for p in sorted(self.rows):
            row = self.rows[p]
            c, r = divmod(v[p], row[p])
            if r:
                raise ValueError(f"vector is not in the lattice (pivot column {p})")
            coords.append(c)
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        if any(v):
            raise ValueError("vector is not in the lattice")
        return coords


def in_span_mod(vector: Sequence[int], generators: Sequence[Sequence[int]], modulus: int) -> bool:
    """Whether vector lies in the Z/N-span of generators, via the lattice span + N Z^n."""
    n = len(vector)
    lattice = HermiteLattice(n)
    for g in generators:
        lattice.insert(g)
    for i in range(n):
        lattice.insert([modulus if j == i else 0 for j in range(n)])
    try:
        lattice.coordinates([x % modulus for x in vector])
    except ValueError:
        return False
    return True
