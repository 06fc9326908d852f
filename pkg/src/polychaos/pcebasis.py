"""Multivariate total-degree PCE basis and its sparse projection tensors.

Multivariate inner products factor over germ dimensions, so every tensor entry
is a product of small one-dimensional tables ``T_d[n_1, ..., n_r]`` holding
``<phi_{n_1} ... phi_{n_r}>`` for that dimension's family. No tensor-grid
quadrature is ever formed.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .orthopoly import PolyFamily1D, QuadratureBudgetError

ZERO_TOL = 1e-14


def basis_size(n_xi: int, order: int) -> int:
    """Number of total-degree multi-indices, ``(n_xi + order)! / (n_xi! order!)``."""
    if n_xi < 0 or order < 0:
        raise ValueError("dimension and order must be non-negative")
    size = math.comb(n_xi + order, order)
    if size > np.iinfo(np.int64).max:
        raise OverflowError(f"basis size for n_xi={n_xi}, order={order} is not representable")
    return size


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_indices(n_xi: int, order: int) -> list[tuple[int, ...]]:
    """Multi-indices of total degree <= order, graded, then descending in the leading entries.

    >>> enumerate_indices(2, 1)
    [(0, 0), (1, 0), (0, 1)]
    """
    basis_size(n_xi, order)
    return [idx for d in range(order + 1) for idx in _compositions(d, n_xi)]


@dataclass(frozen=True, eq=False)
class BasisSet:
    families: tuple[PolyFamily1D, ...]
    order: int

    @property
    def n_xi(self) -> int:
        return len(self.families)

    @cached_property
    def indices(self) -> np.ndarray:
        idx = np.array(enumerate_indices(self.n_xi, self.order), dtype=np.int64)
        return idx.reshape(len(idx), self.n_xi)

    @cached_property
    def size(self) -> int:
        return basis_size(self.n_xi, self.order)

    def __len__(self):
        return self.size

    @cached_property
    def norms_sq(self) -> np.ndarray:
        """``lambda_n = <phi_n, phi_n>`` for every basis polynomial."""
        out = np.ones(self.size)
        for d, fam in enumerate(self.families):
            out *= fam.norms_sq(self.order)[self.indices[:, d]]
        out.setflags(write=False)
        return out

    def first_order_index(self, dim: int) -> int:
        """Position of the linear polynomial in germ dimension ``dim``."""
        return 1 + dim

    def position(self, multi_index: Sequence[int]) -> int:
        target = tuple(int(v) for v in multi_index)
        for n, idx in enumerate(self.indices):
            if tuple(idx) == target:
                return n
        raise KeyError(f"{target} is not in the basis")

    def evaluate(self, xi) -> np.ndarray:
        """Basis values at germ points ``xi`` of shape ``(n_xi, ...)``; returns ``(size, ...)``."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[:1] != (self.n_xi,):
            raise ValueError(f"expected germ array with leading dimension {self.n_xi}")
        out = np.ones((self.size,) + xi.shape[1:])
        for d, fam in enumerate(self.families):
            vals = fam.eval_all(self.order, xi[d])
            out *= vals[self.indices[:, d]]
        return out

    def same_as(self, other: "BasisSet") -> bool:
        return self.order == other.order and self.families == other.families

    # -- integral tables ---------------------------------------------------

    def _tables(self, slots: int, max_nodes: int | None = None) -> list[np.ndarray]:
        """Per-dimension ``<phi_{n_1} ... phi_{n_slots}>`` for ``n_s <= order``."""
        degree = slots * self.order
        tables = []
        for fam in self.families:
            needed = max(1, math.ceil((degree + 1) / 2))
            if max_nodes is not None and needed > max_nodes:
                raise QuadratureBudgetError(
                    f"degree {degree} products need {needed} Gauss nodes; budget is {max_nodes}"
                )
            rule = fam.rule_for_degree(degree)
            vals = fam.eval_all(self.order, rule.nodes)
            letters = "abcdefghij"[:slots]
            expr = ",".join(f"{c}z" for c in letters) + ",z->" + letters
            table = np.einsum(expr, *([vals] * slots), rule.weights)
            tables.append(table)
        return tables

    def product_integrals(self, tuples: np.ndarray, tables: list[np.ndarray] | None = None) -> np.ndarray:
        """``<phi_{t_1} ... phi_{t_r}>`` for each row of an ``(N, r)`` index array."""
        tuples = np.asarray(tuples, dtype=np.int64)
        slots = tuples.shape[1]
        if tables is None:
            tables = self._tables(slots)
        out = np.ones(len(tuples))
        base = self.order + 1
        for d, table in enumerate(tables):
            flat = np.zeros(len(tuples), dtype=np.int64)
            for s in range(slots):
                flat = flat * base + self.indices[tuples[:, s], d]
            out *= table.ravel()[flat]
        # with at most two non-constant factors orthogonality gives the value exactly
        active = np.count_nonzero(tuples, axis=1)
        out[active == 0] = 1.0
        out[active == 1] = 0.0
        two = np.nonzero(active == 2)[0]
        if len(two):
            pairs = np.sort(tuples[two], axis=1)[:, -2:]
            out[two] = np.where(pairs[:, 0] == pairs[:, 1], self.norms_sq[pairs[:, 1]], 0.0)
        return out


@dataclass(frozen=True)
class CoeffTensor:
    """Sparse ``e[j, k_1..k_p, i] = <phi_j phi_k1 .. phi_kp, phi_i> / <phi_i, phi_i>``."""

    p: int
    size: int
    coords: np.ndarray  # (nnz, p + 2): j, k_1..k_p, i
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.size,) * (self.p + 2))
        dense[tuple(self.coords.T)] = self.values
        return dense

    def contract_first(self, ahat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Sparse ``sum_j ahat[j] e[j, ...]`` as ``(coords (nnz, p + 1), values)``."""
        ahat = np.asarray(ahat, dtype=float)
        weights = ahat[self.coords[:, 0]] * self.values
        keep = weights != 0.0
        rest = self.coords[keep, 1:]
        weights = weights[keep]
        if rest.shape[1] == 0 or len(weights) == 0:
            return rest, weights
        flat = np.ravel_multi_index(tuple(rest.T), (self.size,) * rest.shape[1])
        uniq, inverse = np.unique(flat, return_inverse=True)
        summed = np.bincount(inverse, weights=weights, minlength=len(uniq))
        coords = np.stack(np.unravel_index(uniq, (self.size,) * rest.shape[1]), axis=1)
        return coords.astype(np.int64), summed

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j"] + [f"k{s + 1}" for s in range(self.p)] + ["i", "value"])
            for c, v in zip(self.coords, self.values):
                writer.writerow([*map(int, c), format(float(v), ".17g")])

    @classmethod
    def read_csv(cls, path, size: int) -> "CoeffTensor":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        p = len(rows[0]) - 3
        body = rows[1:]
        coords = np.array([[int(v) for v in r[:-1]] for r in body], dtype=np.int64).reshape(-1, p + 2)
        values = np.array([float(r[-1]) for r in body])
        return cls(p, size, coords, values)


def _sparsify(coords: np.ndarray, values: np.ndarray, scale: float):
    keep = np.abs(values) > ZERO_TOL * scale
    return coords[keep], values[keep]


def galerkin_tensor(b: BasisSet, p: int, max_nodes: int | None = None) -> CoeffTensor:
    """Normalised projection tensor for monomials with ``p`` state factors."""
    if p < 0:
        raise ValueError("monomial order must be >= 0")
    slots = p + 2
    tables = b._tables(slots, max_nodes)
    n = b.size
    rest = np.indices((n,) * (p + 1)).reshape(p + 1, -1).T
    coord_chunks, value_chunks = [], []
    for j in range(n):
        tuples = np.hstack([np.full((len(rest), 1), j, dtype=np.int64), rest])
        vals = b.product_integrals(tuples, tables) / b.norms_sq[tuples[:, -1]]
        nz = vals != 0.0
        coord_chunks.append(tuples[nz])
        value_chunks.append(vals[nz])
    coords = np.concatenate(coord_chunks) if coord_chunks else np.zeros((0, slots), np.int64)
    values = np.concatenate(value_chunks) if value_chunks else np.zeros(0)
    scale = np.abs(values).max() if len(values) else 0.0
    coords, values = _sparsify(coords, values, scale)
    coords.setflags(write=False)
    values.setflags(write=False)
    return CoeffTensor(p, n, coords, values)


@dataclass(frozen=True)
class MomentTensor:
    """Symmetric ``eps[i_1..i_m] = <phi_{i_1} ... phi_{i_m}>`` stored on sorted index tuples.

    ``multiplicity`` counts the distinct permutations each stored tuple stands for.
    """

    m: int
    size: int
    coords: np.ndarray  # (nnz, m), non-decreasing rows
    values: np.ndarray
    multiplicity: np.ndarray

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.size,) * self.m)
        for c, v in zip(self.coords, self.values):
            for perm in set(itertools.permutations(c)):
                dense[perm] = v
        return dense

    def apply(self, coeffs) -> np.ndarray:
        """Raw moment ``sum eps * x_{i_1} ... x_{i_m}`` for coefficients of shape ``(..., size)``."""
        x = np.asarray(coeffs, dtype=float)
        if x.shape[-1] != self.size:
            raise ValueError(f"coefficient length {x.shape[-1]} does not match basis size {self.size}")
        if len(self.values) == 0:
            return np.zeros(x.shape[:-1])
        w = self.values * self.multiplicity
        prod = x[..., self.coords[:, 0]]
        for s in range(1, self.m):
            prod = prod * x[..., self.coords[:, s]]
        return prod @ w


def _multiplicity(coords: np.ndarray) -> np.ndarray:
    """Distinct permutations of each sorted row: ``m! / prod(run_length!)``."""
    m = coords.shape[1]
    out = np.full(len(coords), float(math.factorial(m)))
    run = np.ones(len(coords))
    for s in range(1, m):
        run = np.where(coords[:, s] == coords[:, s - 1], run + 1, 1.0)
        out /= run
    return out


def moment_tensor(b: BasisSet, m: int) -> MomentTensor:
    if m < 1:
        raise ValueError("moment order must be >= 1")
    n = b.size
    combos = np.array(list(itertools.combinations_with_replacement(range(n), m)), dtype=np.int64)
    combos = combos.reshape(-1, m)
    if m == 1:
        vals = np.where(combos[:, 0] == 0, 1.0, 0.0)
    else:
        vals = b.product_integrals(combos)
    scale = np.abs(vals).max() if len(vals) else 0.0
    coords, vals = _sparsify(combos, vals, scale)
    return MomentTensor(m, n, coords, vals, _multiplicity(coords))
