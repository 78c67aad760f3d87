"""Exact discrete Clifford algebra over n orthonormal sensor axes.

Sensor states are grade-1 sums (``s1 - s2`` reads "s1 on, s2 off"), actions
are blades (``s1s2``).  Coefficients are Python ints throughout; rationals only
appear inside :func:`rank` / :func:`nullspace`.

The boundary operator drops one factor at a time with alternating sign and
maps every vector to the scalar 1 (the augmentation).  The coboundary is its
exact transpose over lexicographically ordered blade bases.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

MAX_LADDER_N = 8


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Blade:
    """Canonical product of distinct basis vectors; ``Blade(())`` is the scalar unit."""

    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise AlgebraError(f"blade index out of range: {idx}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise AlgebraError(f"blade indices must be strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, *indices: int) -> "Blade":
        return cls(tuple(indices))

    @property
    def grade(self) -> int:
        return len(self.indices)

    def check(self, n: int) -> None:
        if self.indices and self.indices[-1] > n:
            raise AlgebraError(f"blade {self} outside dimension {n}")

    def __str__(self) -> str:
        if not self.indices:
            return "1"
        return "".join(f"s{i}" for i in self.indices)


SCALAR = Blade(())


def blade_product(a: Blade, b: Blade, n: Optional[int] = None, metric: int = 1) -> Tuple[int, Blade]:
    """Signed product of two blades.

    The sign counts the transpositions needed to sort the concatenated factors,
    then each repeated factor contracts to ``metric`` (s_i s_i = metric).
    """
    if metric not in (1, -1):
        raise AlgebraError("metric must be +1 or -1")
    if n is not None:
        a.check(n)
        b.check(n)
    swaps = 0
    for i in a.indices:
        for j in b.indices:
            if j < i:
                swaps += 1
    common = set(a.indices) & set(b.indices)
    sign = -1 if swaps % 2 else 1
    if metric == -1 and len(common) % 2:
        sign = -sign
    return sign, Blade(tuple(sorted(set(a.indices) ^ set(b.indices))))


class Multivector:
    """Integer-coefficient element of Cl(n).  Immutable; zero terms are never stored."""

    __slots__ = ("_terms", "n", "metric")

    def __init__(self, n: int, terms: Optional[Dict[Blade, int]] = None, metric: int = 1):
        if n < 0:
            raise AlgebraError("dimension must be non-negative")
        if metric not in (1, -1):
            raise AlgebraError("metric must be +1 or -1")
        clean: Dict[Blade, int] = {}
        for blade, coeff in (terms or {}).items():
            if not isinstance(blade, Blade):
                blade = Blade(tuple(blade))
            blade.check(n)
            coeff = int(coeff)
            if coeff:
                clean[blade] = clean.get(blade, 0) + coeff
        self._terms = {b: c for b, c in sorted(clean.items(), key=_basis_key) if c}
        self.n = n
        self.metric = metric

    # construction helpers
    @classmethod
    def scalar(cls, n: int, value: int = 1, metric: int = 1) -> "Multivector":
        return cls(n, {SCALAR: value}, metric)

    @classmethod
    def vector(cls, n: int, i: int, coeff: int = 1, metric: int = 1) -> "Multivector":
        return cls(n, {Blade((i,)): coeff}, metric)

    @classmethod
    def from_blade(cls, n: int, blade: Blade, coeff: int = 1, metric: int = 1) -> "Multivector":
        return cls(n, {blade: coeff}, metric)

    @classmethod
    def state(cls, n: int, orientations: Dict[int, int], metric: int = 1) -> "Multivector":
        """Grade-1 sum with one ±1 coefficient per sensor axis."""
        return cls(n, {Blade((i,)): o for i, o in orientations.items()}, metric)

    @property
    def terms(self) -> Dict[Blade, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Blade, int]]:
        return iter(self._terms.items())

    def coefficient(self, blade: Blade) -> int:
        return self._terms.get(blade, 0)

    def grades(self) -> List[int]:
        return sorted({b.grade for b in self._terms})

    def grade(self, k: int) -> "Multivector":
        return Multivector(self.n, {b: c for b, c in self._terms.items() if b.grade == k}, self.metric)

    def is_zero(self) -> bool:
        return not self._terms

    def _compatible(self, other: "Multivector") -> None:
        if other.n != self.n:
            raise AlgebraError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.metric != self.metric:
            raise AlgebraError("metric mismatch")

    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            self._compatible(other)
            return other
        if isinstance(other, int):
            return Multivector.scalar(self.n, other, self.metric)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for b, c in other._terms.items():
            out[b] = out.get(b, 0) + c
        return Multivector(self.n, out, self.metric)

    __radd__ = __add__

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, {b: -c for b, c in self._terms.items()}, self.metric)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Multivector(self.n, {b: c * other for b, c in self._terms.items()}, self.metric)
        if not isinstance(other, Multivector):
            return NotImplemented
        return geometric_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._terms == ({SCALAR: other} if other else {})
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and self.metric == other.metric and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, self.metric, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"Multivector({self.n}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for blade, c in self._terms.items():
            mag = abs(c)
            if blade.grade == 0:
                body = str(mag)
            else:
                body = (str(mag) if mag != 1 else "") + str(blade)
            parts.append(("-" if c < 0 else "+", body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _basis_key(item):
    blade = item[0] if isinstance(item, tuple) else item
    return (blade.grade, blade.indices)


def geometric_product(x: Multivector, y: Multivector) -> Multivector:
    x._compatible(y)
    out: Dict[Blade, int] = {}
    for a, ca in x.items():
        for b, cb in y.items():
            sign, blade = blade_product(a, b, metric=x.metric)
            out[blade] = out.get(blade, 0) + sign * ca * cb
    return Multivector(x.n, out, x.metric)


def reverse(x: Multivector) -> Multivector:
    out = {}
    for b, c in x.items():
        k = b.grade
        out[b] = -c if (k * (k - 1) // 2) % 2 else c
    return Multivector(x.n, out, x.metric)


def apply_action(action: Blade, state: Multivector) -> Multivector:
    """Sandwich ``action * state * reverse(action)``.

    For an even-grade action this is a 180 degree turn: vectors inside the
    action's support flip sign, vectors outside it are fixed.
    """
    if action.grade < 2:
        raise AlgebraError(f"an action needs grade >= 2, got {action}")
    a = Multivector.from_blade(state.n, action, metric=state.metric)
    return a * state * reverse(a)


def boundary(x: Multivector) -> Multivector:
    out: Dict[Blade, int] = {}
    for blade, c in x.items():
        for face, sign in _faces(blade):
            out[face] = out.get(face, 0) + sign * c
    return Multivector(x.n, out, x.metric)


def _faces(blade: Blade) -> Iterator[Tuple[Blade, int]]:
    idx = blade.indices
    for j in range(len(idx)):
        yield Blade(idx[:j] + idx[j + 1:]), (-1 if j % 2 else 1)


def boundary_identity_check(b: Blade, n: Optional[int] = None, metric: int = 1) -> bool:
    """``∂b == (sum of b's vectors) * b``; only holds for the +1 metric."""
    if b.grade < 1:
        raise AlgebraError("boundary identity needs grade >= 1")
    n = n if n is not None else (b.indices[-1] if b.indices else 0)
    blade = Multivector.from_blade(n, b, metric=metric)
    total = Multivector(n, {Blade((i,)): 1 for i in b.indices}, metric)
    return boundary(blade) == total * blade


def coboundary(x: Multivector, n: Optional[int] = None) -> Multivector:
    """Coface sum: each blade maps to the signed sum of blades one grade up that contain it."""
    n = x.n if n is None else n
    if n != x.n:
        x = Multivector(n, x.terms, x.metric)
    out: Dict[Blade, int] = {}
    for blade, c in x.items():
        present = set(blade.indices)
        for i in range(1, n + 1):
            if i in present:
                continue
            idx = tuple(sorted(present | {i}))
            pos = idx.index(i)
            sign = -1 if pos % 2 else 1
            coface = Blade(idx)
            out[coface] = out.get(coface, 0) + sign * c
    return Multivector(n, out, x.metric)


def basis(n: int, k: int) -> List[Blade]:
    """Lexicographic grade-k blade basis of Cl(n)."""
    return [Blade(c) for c in itertools.combinations(range(1, n + 1), k)]


@dataclass(frozen=True)
class GradedOperator:
    """Integer matrix of ∂_k (k -> k-1) or δ_k (k -> k+1) over lexicographic bases."""

    kind: str
    n: int
    source_grade: int
    target_grade: int
    matrix: Tuple[Tuple[int, ...], ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return comb(self.n, self.target_grade), comb(self.n, self.source_grade)

    def transpose(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(zip(*self.matrix)) if self.matrix and self.matrix[0] else ()


def _operator(kind: str, n: int, k: int, func) -> GradedOperator:
    target = k - 1 if kind == "boundary" else k + 1
    if not 0 <= k <= n or not 0 <= target <= n:
        raise AlgebraError(f"no {kind} operator from grade {k} in Cl({n})")
    rows = basis(n, target)
    cols = basis(n, k)
    row_pos = {b: i for i, b in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    for j, b in enumerate(cols):
        image = func(Multivector.from_blade(n, b))
        for blade, c in image.items():
            mat[row_pos[blade]][j] = c
    return GradedOperator(kind, n, k, target, tuple(tuple(r) for r in mat))


def boundary_operator(n: int, k: int) -> GradedOperator:
    return _operator("boundary", n, k, boundary)


def coboundary_operator(n: int, k: int) -> GradedOperator:
    return _operator("coboundary", n, k, coboundary)


# exact linear algebra --------------------------------------------------------

def _rref(rows: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    m = [[Fraction(v) for v in r] for r in rows]
    pivots: List[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(_rref(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of {v : M v = 0} over the rationals."""
    if not matrix or not matrix[0]:
        width = ncols or 0
        return [[Fraction(int(i == j)) for i in range(width)] for j in range(width)]
    red, pivots = _rref(matrix)
    width = len(matrix[0])
    free = [c for c in range(width) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * width
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        out.append(v)
    return out


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> List[List[int]]:
    if not a or not b:
        return []
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def _columns(matrix: Sequence[Sequence]) -> List[List]:
    return [list(c) for c in zip(*matrix)] if matrix and matrix[0] else []


@dataclass
class LadderReport:
    n: int
    dims: List[int]
    boundary_ranks: List[int]  # rank ∂_k, k = 1..n
    coboundary_ranks: List[int]  # rank δ_k, k = 0..n-1
    boundary_kernel_dims: List[int]  # dim ker ∂_k, k = 0..n
    coboundary_kernel_dims: List[int]  # dim ker δ_k, k = 0..n
    nilpotent: bool
    exact: List[bool]  # per grade 0..n of the augmented complex
    twisted: List[bool]  # per grade 1..n
    transpose_pairing: bool = True

    @property
    def ok(self) -> bool:
        return self.nilpotent and self.transpose_pairing and all(self.exact) and all(self.twisted)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dims": self.dims,
            "boundary_ranks": self.boundary_ranks,
            "coboundary_ranks": self.coboundary_ranks,
            "exact": self.exact,
            "twisted": self.twisted,
            "nilpotent": self.nilpotent,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def verify_ladder(n: int) -> LadderReport:
    """Exhaustive homology/cohomology ladder check of Cl(n) with exact ranks."""
    if not 1 <= n <= MAX_LADDER_N:
        raise AlgebraError(f"verify_ladder supports 1 <= n <= {MAX_LADDER_N}, got {n}")
    dims = [comb(n, k) for k in range(n + 1)]
    d = {k: boundary_operator(n, k).matrix for k in range(1, n + 1)}
    c = {k: coboundary_operator(n, k).matrix for k in range(0, n)}

    b_ranks = {k: rank(d[k]) for k in d}
    c_ranks = {k: rank(c[k]) for k in c}

    nilpotent = True
    for k in range(2, n + 1):
        if any(any(v for v in row) for row in matmul(d[k - 1], d[k])):
            nilpotent = False
    for k in range(0, n - 1):
        if any(any(v for v in row) for row in matmul(c[k + 1], c[k])):
            nilpotent = False

    pairing = all(tuple(zip(*d[k])) == c[k - 1] for k in range(1, n + 1))
    pairing = pairing and all(b_ranks[k] == c_ranks[k - 1] for k in range(1, n + 1))

    ker_b = [dims[0]] + [dims[k] - b_ranks[k] for k in range(1, n + 1)]
    ker_c = [dims[k] - c_ranks[k] for k in range(n)] + [dims[n]]

    # ker ∂_k == im ∂_{k+1}, with ∂_0 = 0 and ∂_{n+1} = 0
    exact = []
    for k in range(n + 1):
        image = b_ranks.get(k + 1, 0)
        exact.append(ker_b[k] == image)

    twisted = []
    for k in range(1, n + 1):
        kernel = nullspace(d[k])
        image = _columns(c[k - 1])
        joint = rank(kernel + image) if (kernel or image) else 0
        overlap = len(kernel) + c_ranks[k - 1] - joint
        twisted.append(overlap == 0 and len(kernel) + c_ranks[k - 1] == dims[k])

    return LadderReport(
        n=n,
        dims=dims,
        boundary_ranks=[b_ranks[k] for k in range(1, n + 1)],
        coboundary_ranks=[c_ranks[k] for k in range(0, n)],
        boundary_kernel_dims=ker_b,
        coboundary_kernel_dims=ker_c,
        nilpotent=nilpotent,
        exact=exact,
        twisted=twisted,
        transpose_pairing=pairing,
    )


def verify_identities(n: int) -> Dict[str, bool]:
    """Exhaustive integer checks of the pair identities and the boundary laws in Cl(n)."""
    if not 2 <= n <= MAX_LADDER_N:
        raise AlgebraError(f"identity suite supports 2 <= n <= {MAX_LADDER_N}, got {n}")
    one = Multivector.scalar(n)
    pair_flip = sandwich = square = True
    for i, j in itertools.combinations(range(1, n + 1), 2):
        si, sj = Multivector.vector(n, i), Multivector.vector(n, j)
        b = Blade.of(i, j)
        bij = Multivector.from_blade(n, b)
        pair_flip &= (si + sj) * bij == -si + sj
        square &= bij * bij == -one
        sandwich &= apply_action(b, si + sj) == -si - sj
        for k in range(1, n + 1):
            if k not in (i, j):
                sk = Multivector.vector(n, k)
                sandwich &= apply_action(b, sk) == sk
    blades = [b for k in range(1, n + 1) for b in basis(n, k)]
    ident = all(boundary_identity_check(b, n) for b in blades)
    nil_b = all(boundary(boundary(Multivector.from_blade(n, b))).is_zero() for b in blades)
    nil_c = all(
        coboundary(coboundary(Multivector.from_blade(n, b))).is_zero() for k in range(n + 1) for b in basis(n, k)
    )
    return {
        "pair_flip": pair_flip,
        "sandwich": sandwich,
        "bivector_square": square,
        "boundary_identity": ident,
        "boundary_nilpotent": nil_b,
        "coboundary_nilpotent": nil_c,
    }
