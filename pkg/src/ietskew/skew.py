"""Skewing cocycles: integer 1-eigenvectors of A^T and periodic-type checks.

A skewing cocycle assigns an element of Z^m to each labelled interval.  The
pair (loop combinatorics, cocycle) is self-similar under induction exactly
when A^T phi = phi, in which case every identity downstream is exact
integer arithmetic.
"""

from __future__ import annotations

from .algebra import (
    IntMatrix,
    integer_kernel,
    invariant_factors,
    row_hnf,
    vec_add,
    zero_vector,
)
from .iet import TowerSystem


class SkewCocycle:
    """Fiber displacement per labelled interval.

    By default the values are required to generate Z^m (the working
    assumption everywhere downstream); pass ``check_generates=False`` for
    transient vectors such as renormalisations of a non-eigen cocycle.
    """

    __slots__ = ("values",)

    def __init__(self, values, check_generates: bool = True):
        values = tuple(tuple(int(x) for x in row) for row in values)
        if not values:
            raise ValueError("empty cocycle")
        m = len(values[0])
        if any(len(v) != m for v in values):
            raise ValueError("inconsistent fiber dimensions")
        if m == 0:
            raise ValueError("fiber dimension must be at least 1")
        if check_generates and invariant_factors(values) != (1,) * m:
            raise ValueError("cocycle values do not generate the full lattice Z^m")
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("SkewCocycle is immutable")

    def __eq__(self, other):
        return isinstance(other, SkewCocycle) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"SkewCocycle({list(map(list, self.values))})"

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    def of_label(self, label: int) -> tuple[int, ...]:
        return self.values[label - 1]


def _transpose_apply(a: IntMatrix, values) -> tuple[tuple[int, ...], ...]:
    """(A^T phi)_j = sum_i A[i][j] phi_i, acting on Z^m rows."""
    d = len(a)
    m = len(values[0])
    out = []
    for j in range(d):
        acc = list(zero_vector(m))
        for i in range(d):
            coeff = a[i][j]
            if coeff:
                acc = [x + coeff * y for x, y in zip(acc, values[i])]
        out.append(tuple(acc))
    return tuple(out)


def _solve_in_row_lattice(h, target):
    """Coefficients expressing target over the HNF basis rows (exact)."""
    coeffs = [0] * len(h)
    t = list(target)
    pivots = [next(j for j, x in enumerate(row) if x) for row in h]
    for idx, (row, c) in enumerate(zip(h, pivots)):
        q, rem = divmod(t[c], row[c])
        if rem:
            raise ArithmeticError("target not in the row lattice")
        coeffs[idx] = q
        t = [x - q * y for x, y in zip(t, row)]
    if any(t):
        raise ArithmeticError("target not in the row lattice")
    return coeffs


def eigencocycles(a: IntMatrix) -> tuple[int, list[tuple[int, ...]]]:
    """Integer basis of ker(A^T - I), re-coordinatised to generate Z^m.

    Returns (m, basis) where m is the kernel rank and basis lists m vectors
    of length d.  Reading the basis columnwise gives the cocycle values
    phi_j in Z^m; the change of coordinates identifies the lattice they
    span with Z^m itself, so the generation requirement holds by
    construction.  m = 0 means the loop supports no periodic-type
    skew-product.
    """
    d = len(a)
    at_minus_i = [
        [a[j][i] - (1 if i == j else 0) for j in range(d)] for i in range(d)
    ]
    kernel = integer_kernel(at_minus_i)
    m = len(kernel)
    if m == 0:
        return 0, []
    # value matrix: row j is phi_j, column c is the c-th kernel vector
    value_rows = [tuple(kernel[c][j] for c in range(m)) for j in range(d)]
    basis_of_lattice = row_hnf(value_rows)
    if len(basis_of_lattice) != m:
        raise ArithmeticError("kernel basis lost rank")  # impossible for independent columns
    new_rows = [
        tuple(_solve_in_row_lattice(basis_of_lattice, row)) for row in value_rows
    ]
    rotated = [tuple(new_rows[j][c] for j in range(d)) for c in range(m)]
    for vec in rotated:
        image = tuple(sum(a[i][j] * vec[i] for i in range(d)) for j in range(d))
        if image != vec:
            raise ArithmeticError("rotated basis left the 1-eigenspace")
    if invariant_factors(new_rows) != (1,) * m:
        raise ArithmeticError("rotation failed to reach the full lattice")
    return m, rotated


def skew_from_basis(basis: list[tuple[int, ...]]) -> SkewCocycle:
    """Cocycle whose value on interval j collects the j-th basis coordinates."""
    if not basis:
        raise ValueError("no eigencocycle basis to build from")
    d = len(basis[0])
    return SkewCocycle(tuple(tuple(vec[j] for vec in basis) for j in range(d)))


def check_periodic_type(a: IntMatrix, phi: SkewCocycle) -> bool:
    """True exactly when A^T phi = phi, componentwise over Z."""
    if len(a) != phi.d:
        raise ValueError("matrix size does not match cocycle length")
    return _transpose_apply(a, phi.values) == phi.values


def renormalized_phi(a: IntMatrix, phi: SkewCocycle, n: int) -> SkewCocycle:
    """(A^T)^n phi; equal to phi for every n in the periodic-type case."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    values = phi.values
    for _ in range(n):
        values = _transpose_apply(a, values)
    return SkewCocycle(values, check_generates=False)


def birkhoff_sum_at_return(tower: TowerSystem, phi: SkewCocycle, j: int) -> tuple[int, ...]:
    """Sum of phi over one pass up tower j; equals (A^T phi)_j exactly."""
    if not 1 <= j <= tower.d:
        raise ValueError(f"tower index {j} out of range")
    acc = zero_vector(phi.m)
    for letter in tower.words[j - 1]:
        acc = vec_add(acc, phi.of_label(letter))
    return acc
