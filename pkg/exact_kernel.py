"""
Exact scalars, formal linear combinations, tensors and sparse linear algebra.
All arithmetic is over the rationals; nothing here ever rounds.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from errors import CapExceededError, ConfigError, DimensionMismatchError, TagMismatchError

logger = logging.getLogger(__name__)

Rational = Fraction

Word = Hashable


def as_rational(value) -> Fraction:
    """Coerce ints, strings like '3/4' and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Canonical text form `p` or `p/q`."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def sort_key(key) -> str:
    """Total structural order used for deterministic output."""
    return repr(key)


class _Combination:
    """Shared arithmetic of Element and Tensor: a dict from keys to nonzero Fractions."""

    __slots__ = ("label", "terms")

    def __init__(self, label, terms: Optional[Dict] = None):
        self.label = label
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                coeff = as_rational(coeff)
                if coeff:
                    self.terms[key] = coeff

    def _new(self, terms: Dict):
        return type(self)(self.label, terms)

    def _check(self, other):
        if type(other) is not type(self) or other.label != self.label:
            raise TagMismatchError(
                f"cannot combine {getattr(other, 'label', other)!r} with {self.label!r}"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def sorted_items(self) -> List[Tuple]:
        return sorted(self.terms.items(), key=lambda kv: sort_key(kv[0]))

    def coefficient(self, key) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            total = out.get(key, 0) + coeff
            if total:
                out[key] = total
            else:
                out.pop(key, None)
        return self._new(out)

    def __neg__(self):
        return self._new({key: -coeff for key, coeff in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "_Combination":
        factor = as_rational(factor)
        if not factor:
            return self._new({})
        return self._new({key: coeff * factor for key, coeff in self.terms.items()})

    def __mul__(self, factor):
        if isinstance(factor, (int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.label == other.label and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.label, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{format_rational(c)}*{k!r}" for k, c in self.sorted_items())
        return f"{type(self).__name__}({self.label!r}: {body or '0'})"


class Element(_Combination):
    """Finite rational combination of canonical basis words of one algebra."""

    __slots__ = ()

    @property
    def tag(self) -> str:
        return self.label

    @classmethod
    def zero(cls, tag: str) -> "Element":
        return cls(tag)

    @classmethod
    def monomial(cls, tag: str, word, coeff=1) -> "Element":
        return cls(tag, {word: coeff})


class Tensor(_Combination):
    """Finite rational combination of tuples of basis words; label is the tuple of slot tags."""

    __slots__ = ()

    @property
    def slots(self) -> Tuple[str, ...]:
        return self.label

    @property
    def degree(self) -> int:
        return len(self.label)

    @classmethod
    def zero(cls, slots: Sequence[str]) -> "Tensor":
        return cls(tuple(slots))

    @classmethod
    def scalar(cls, value=1) -> "Tensor":
        return cls((), {(): value})

    @classmethod
    def simple(cls, slots: Sequence[str], words: Sequence, coeff=1) -> "Tensor":
        return cls(tuple(slots), {tuple(words): coeff})

    @classmethod
    def from_element(cls, element: Element) -> "Tensor":
        return cls((element.tag,), {(w,): c for w, c in element.items()})

    def to_element(self) -> Element:
        if self.degree != 1:
            raise DimensionMismatchError(f"tensor of degree {self.degree} is not an element")
        return Element(self.slots[0], {key[0]: c for key, c in self.items()})

    def map_terms(self, slots: Sequence[str], fn: Callable[[Tuple], "Tensor"]) -> "Tensor":
        """Linear extension of `fn`, which sends a key tuple to a Tensor with `slots`."""
        out: Dict = {}
        for key, coeff in self.terms.items():
            image = fn(key)
            for k2, c2 in image.terms.items():
                total = out.get(k2, 0) + coeff * c2
                if total:
                    out[k2] = total
                else:
                    out.pop(k2, None)
        return Tensor(tuple(slots), out)


def tensor_product(a, b) -> Tensor:
    """
    Bilinear concatenation; Elements are promoted to degree-1 tensors.

    Slot tags concatenate as well, so factors over different algebras are always
    legal (K # H cochains are built this way). Tags are only compared on addition.
    """
    if isinstance(a, Element):
        a = Tensor.from_element(a)
    if isinstance(b, Element):
        b = Tensor.from_element(b)
    out: Dict = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            key = ka + kb
            out[key] = out.get(key, 0) + ca * cb
    return Tensor(a.slots + b.slots, out)


def linear_combination(label, pieces: Iterable[Tuple[Fraction, _Combination]], cls=Tensor):
    """Sum of coefficient * combination without intermediate objects."""
    out: Dict = {}
    for coeff, piece in pieces:
        if piece.label != label:
            raise TagMismatchError(f"cannot combine {piece.label!r} with {label!r}")
        for key, c in piece.terms.items():
            total = out.get(key, 0) + coeff * c
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return cls(label, out)


@dataclass(frozen=True)
class TruncationSpec:
    """Finite window in which bases are enumerated."""

    max_tensor_degree: int = 3
    weight: Optional[int] = None
    pbw_cap: int = 4
    delta_cap: int = 4
    sigma_range: Tuple[int, int] = (-2, 2)
    modulus: Optional[int] = None
    tree_cap: int = 4

    def __post_init__(self):
        for name in ("max_tensor_degree", "pbw_cap", "delta_cap", "tree_cap"):
            if getattr(self, name) < 0:
                raise ConfigError(f"truncation cap {name} must be >= 0")
        low, high = self.sigma_range
        if low > high:
            raise ConfigError(f"empty sigma range {self.sigma_range}")
        if self.modulus is not None and self.modulus < 1:
            raise ConfigError("sigma modulus must be positive")

    def sigma_exponents(self) -> List[int]:
        if self.modulus is not None:
            return list(range(self.modulus))
        low, high = self.sigma_range
        return list(range(low, high + 1))


class BasisIndex:
    """Bijection between hashable basis keys and matrix indices, in insertion order."""

    def __init__(self, keys: Iterable = ()):
        self._index: Dict = {}
        self.keys: List = []
        for key in keys:
            self.add(key)

    def add(self, key) -> int:
        if key not in self._index:
            self._index[key] = len(self.keys)
            self.keys.append(key)
        return self._index[key]

    def get(self, key) -> Optional[int]:
        return self._index.get(key)

    def __contains__(self, key) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self.keys)


def _integral_rows(rows: Dict[int, Dict[int, Fraction]]) -> Dict[int, Dict[int, int]]:
    """Scale each row by the lcm of its denominators; row scaling keeps rank and kernel."""
    out = {}
    for i, row in rows.items():
        lcm = math.lcm(*(v.denominator for v in row.values()))
        out[i] = {j: int(v * lcm) for j, v in row.items() if v}
    return out


class SparseMatrix:
    """Exact sparse matrix; rows and columns optionally labelled by basis keys."""

    def __init__(self, nrows: int, ncols: int, entries: Optional[Dict[Tuple[int, int], Fraction]] = None,
                 row_keys: Optional[Sequence] = None, col_keys: Optional[Sequence] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.row_keys = list(row_keys) if row_keys is not None else None
        self.col_keys = list(col_keys) if col_keys is not None else None
        self.rows: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), value in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionMismatchError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            value = as_rational(value)
            if value:
                self.rows.setdefault(i, {})[j] = value

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v}
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Dict], row_index: BasisIndex, strict: bool = False,
                     col_keys: Optional[Sequence] = None) -> "SparseMatrix":
        """Assemble from images given as dicts key -> coefficient.

        With `strict`, an image key outside `row_index` raises CapExceededError,
        otherwise new rows are registered on the fly.
        """
        entries = {}
        for j, column in enumerate(columns):
            for key, value in column.items():
                i = row_index.get(key)
                if i is None:
                    if strict:
                        raise CapExceededError(f"image term {key!r} leaves the truncated basis")
                    i = row_index.add(key)
                entries[(i, j)] = value
        return cls(len(row_index), len(columns), entries, row_keys=row_index.keys, col_keys=col_keys)

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows.get(i, {}).get(j, Fraction(0))

    def apply(self, vector: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """Matrix times a sparse column vector."""
        out: Dict[int, Fraction] = {}
        for i, row in self.rows.items():
            total = sum((v * vector[j] for j, v in row.items() if j in vector), Fraction(0))
            if total:
                out[i] = total
        return out

    def _rref(self, rows: Dict[int, Dict[int, Fraction]], ncols: int):
        nrows = max(rows.keys(), default=-1) + 1
        if nrows == 0 or ncols == 0:
            return {}, ()
        data = _integral_rows(rows)
        dm = DomainMatrix({i: {j: ZZ(v) for j, v in row.items()} for i, row in data.items() if row},
                          (nrows, ncols), ZZ)
        reduced, _den, pivots = dm.rref_den()
        sdm = reduced.to_sparse().rep
        table = {i: {j: int(v) for j, v in row.items()} for i, row in sdm.items()}
        return table, tuple(pivots)

    def rank(self) -> int:
        _table, pivots = self._rref(self.rows, self.ncols)
        return len(pivots)

    def kernel(self) -> List[Dict[int, Fraction]]:
        """Spanning vectors of the null space, one per free column."""
        table, pivots = self._rref(self.rows, self.ncols)
        pivot_rows = list(enumerate(pivots))
        pivot_set = set(pivots)
        basis = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            vector = {free: Fraction(1)}
            for i, p in pivot_rows:
                value = table.get(i, {}).get(free, 0)
                if value:
                    vector[p] = -Fraction(value, table[i][p])
            basis.append(vector)
        return basis

    def in_image(self, vector) -> Tuple[bool, Optional[Dict[int, Fraction]]]:
        """Decide whether `vector` lies in the column span; return a preimage when it does."""
        if isinstance(vector, dict):
            target = {i: as_rational(v) for i, v in vector.items() if v}
            if any(not 0 <= i < self.nrows for i in target):
                raise DimensionMismatchError(f"vector index outside {self.nrows} rows")
        else:
            if len(vector) != self.nrows:
                raise DimensionMismatchError(f"vector of length {len(vector)} against {self.nrows} rows")
            target = {i: as_rational(v) for i, v in enumerate(vector) if v}
        if not target:
            return True, {}
        augmented = {i: dict(row) for i, row in self.rows.items()}
        last = self.ncols
        for i, value in target.items():
            augmented.setdefault(i, {})[last] = value
        table, pivots = self._rref(augmented, self.ncols + 1)
        if last in pivots:
            return False, None
        witness = {}
        for i, p in enumerate(pivots):
            value = table.get(i, {}).get(last, 0)
            if value:
                witness[p] = Fraction(value, table[i][p])
        return True, witness


def span_rank(vectors: Sequence[Dict[int, Fraction]], dimension: int) -> int:
    """Rank of a family of sparse vectors in a space of the given dimension."""
    entries = {(i, j): v for j, vec in enumerate(vectors) for i, v in vec.items()}
    return SparseMatrix(dimension, len(vectors), entries).rank()


def splice(tensor: Tensor, position: int, fn: Callable, fn_slots: Sequence[str]) -> Tensor:
    """Replace the word in slot `position` by the Tensor `fn(word)`, which has `fn_slots`."""
    slots = tensor.slots[:position] + tuple(fn_slots) + tensor.slots[position + 1:]
    out: Dict = {}
    for key, coeff in tensor.terms.items():
        image = fn(key[position])
        head, tail = key[:position], key[position + 1:]
        for inner, c2 in image.terms.items():
            new_key = head + inner + tail
            total = out.get(new_key, 0) + coeff * c2
            if total:
                out[new_key] = total
            else:
                out.pop(new_key, None)
    return Tensor(slots, out)
