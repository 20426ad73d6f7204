"""Bundled example families at a chosen truncation dimension.

Three named families exercise the interesting corners of weaving
certification; the regression and acceptance suites pin their exact
matrices.  Each lives naturally over an infinite index set, and the
generator truncates to ambient dimension d by taking the smallest
index prefix in which every basis vector e_1..e_d scheduled by the
pattern has appeared in both frames:

* ``example_a`` (n = 2d-1): F1 puts e_{j/2+1} on even columns and 0
  elsewhere; F2 repeats each e_k twice from column 2 on.  Certifiably
  woven for K = projection onto span{e_2..e_d}.
* ``example_b`` (n = d+1): the two frames disagree only on where e_2
  sits (column 2 vs column 3), which makes exactly the partitions
  picking column 2 from F2 and column 3 from F1 fail — the canonical
  not-woven certificate.
* ``example_pr2`` (n = 2d-1): not K-woven as given, but applying
  U = projection onto span{e_3..e_d} yields a family certifiably
  woven under the operator U K with universal bounds (1, 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimTooSmall
from .frames import Frame
from .kframe import KOperator

EXAMPLE_NAMES = ("example_a", "example_b", "example_pr2")


@dataclass(frozen=True, eq=False)
class PaperExample:
    name: str
    dim: int
    frames: list[Frame] = field(repr=False)
    k: KOperator = field(repr=False)
    u: np.ndarray | None = field(repr=False)

    @property
    def count(self) -> int:
        return self.frames[0].count


def _basis_projection(dim: int, first: int) -> np.ndarray:
    """Orthogonal projection onto span{e_first .. e_dim} (1-based)."""
    p = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(first - 1, dim):
        p[i, i] = 1.0
    return p


def _columns(dim: int, pattern: list[int]) -> Frame:
    """Build a frame from 1-based basis indices (0 means zero column)."""
    m = np.zeros((dim, len(pattern)), dtype=np.complex128)
    for j, k in enumerate(pattern):
        if k:
            m[k - 1, j] = 1.0
    return Frame(m)


def _example_a(dim: int) -> tuple[list[Frame], np.ndarray | None]:
    n = 2 * dim - 1
    f1 = [(j // 2 + 1) if j % 2 == 0 else 0 for j in range(1, n + 1)]
    f2 = [0] + [(j // 2 + 1) for j in range(2, n + 1)]
    return [_columns(dim, f1), _columns(dim, f2)], None


def _example_b(dim: int) -> tuple[list[Frame], np.ndarray | None]:
    n = dim + 1
    f1 = [1, 2, 0] + list(range(3, dim + 1))
    f2 = [1, 0, 2] + list(range(3, dim + 1))
    return [_columns(dim, f1), _columns(dim, f2)], None


def _example_pr2(dim: int) -> tuple[list[Frame], np.ndarray | None]:
    n = 2 * dim - 1
    f1 = [((j + 1) // 2) if j % 2 == 1 else 0 for j in range(1, n + 1)]
    f2 = [0, 1, 0, 2] + [((j + 1) // 2) for j in range(5, n + 1)]
    return [_columns(dim, f1), _columns(dim, f2)], _basis_projection(dim, 3)


_BUILDERS = {
    "example_a": _example_a,
    "example_b": _example_b,
    "example_pr2": _example_pr2,
}


def paper_example(name: str, dim: int) -> PaperExample:
    """Instantiate a named example family at ambient dimension ``dim``.

    All three use K = orthogonal projection onto span{e_2..e_dim};
    ``example_pr2`` additionally carries U = projection onto
    span{e_3..e_dim}.  Requires dim >= 4 so every pattern is
    nondegenerate.
    """
    if name not in _BUILDERS:
        raise ValueError(f"unknown example {name!r}; choose from {EXAMPLE_NAMES}")
    if dim < 4:
        raise DimTooSmall(f"example families need dim >= 4, got {dim}")
    frames, u = _BUILDERS[name](dim)
    k = KOperator(_basis_projection(dim, 2))
    return PaperExample(name=name, dim=dim, frames=frames, k=k, u=u)
