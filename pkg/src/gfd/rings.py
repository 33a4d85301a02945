"""Ring catalog: exact arithmetic, matrices, and diagonal normal forms.

The catalog covers the integers, residue rings Z/n, truncated polynomial
rings F_p[x]/(x^n), and finite products of these.  Every ring carries a
Gorenstein profile (self-injective dimension, coherence, GF-closedness)
consumed by the homological oracles downstream.

Elements are plain Python values in canonical form:

* ``Z``         -- int
* ``Zmod(n)``   -- int in ``[0, n)``
* ``TruncPoly`` -- tuple of ``n`` coefficients in ``[0, p)``
* ``Product``   -- tuple of factor elements

Normal forms over the chain quotients are computed by lifting to the
covering principal ideal domain (Z or F_p[x]), diagonalizing there, and
reducing; products dispatch factor-wise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import BadModulus, NonPrimeBase, ParseError, RingMismatch


# ---------------------------------------------------------------------------
# profiles and handles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GorensteinProfile:
    self_injective_dim: int
    is_quasi_frobenius: bool
    is_coherent: bool
    is_gf_closed: bool
    is_finite: bool

    def __post_init__(self):
        if self.is_quasi_frobenius and self.self_injective_dim != 0:
            raise ValueError("quasi-Frobenius profile must have self-injective dimension 0")


def _factorize(n: int) -> List[Tuple[int, int]]:
    """Prime factorization as (p, k) pairs, ascending p."""
    out = []
    d, m = 2, n
    while d * d <= m:
        if m % d == 0:
            k = 0
            while m % d == 0:
                m //= d
                k += 1
            out.append((d, k))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return _factorize(p) == [(p, 1)]


class RingHandle:
    """A catalog ring with arithmetic and a Gorenstein profile.

    Instances are immutable; all arithmetic is pure.  ``kind`` is one of
    ``"Z"``, ``"Zmod"``, ``"TruncPoly"``, ``"Product"``.
    """

    def __init__(self, kind: str, *, n: int = 0, p: int = 0,
                 factors: Tuple["RingHandle", ...] = ()):
        self.kind = kind
        self.n = n
        self.p = p
        self.factors = factors
        if kind == "Z":
            prof = GorensteinProfile(1, False, True, True, False)
            self.chain_factors: Tuple[Tuple[int, int], ...] = ()
        elif kind == "Zmod":
            if n < 2:
                raise BadModulus(f"Zmod modulus must be >= 2, got {n}")
            prof = GorensteinProfile(0, True, True, True, True)
            self.chain_factors = tuple(_factorize(n))
        elif kind == "TruncPoly":
            if not _is_prime(p):
                raise NonPrimeBase(f"TruncPoly base must be prime, got {p}")
            if n < 1:
                raise BadModulus(f"TruncPoly truncation order must be >= 1, got {n}")
            prof = GorensteinProfile(0, True, True, True, True)
            self.chain_factors = ()
        elif kind == "Product":
            if not factors:
                raise ParseError("Product ring needs at least one factor")
            prof = GorensteinProfile(
                max(f.profile.self_injective_dim for f in factors),
                all(f.profile.is_quasi_frobenius for f in factors),
                True,
                True,
                all(f.profile.is_finite for f in factors),
            )
            self.chain_factors = ()
        else:
            raise ParseError(f"unknown ring kind {kind!r}")
        self.profile = prof

    # -- identity ----------------------------------------------------------

    def _key(self):
        if self.kind == "Product":
            return ("Product", tuple(f._key() for f in self.factors))
        return (self.kind, self.n, self.p)

    def __eq__(self, other):
        return isinstance(other, RingHandle) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "Zmod":
            return f"Zmod({self.n})"
        if self.kind == "TruncPoly":
            return f"TruncPoly({self.p},{self.n})"
        return "Product(" + ", ".join(map(repr, self.factors)) + ")"

    # -- element arithmetic --------------------------------------------------

    def zero(self):
        if self.kind in ("Z", "Zmod"):
            return 0
        if self.kind == "TruncPoly":
            return (0,) * self.n
        return tuple(f.zero() for f in self.factors)

    def one(self):
        if self.kind in ("Z", "Zmod"):
            return 1
        if self.kind == "TruncPoly":
            return ((1,) + (0,) * (self.n - 1))
        return tuple(f.one() for f in self.factors)

    def canon(self, a):
        """Reduce an element-shaped value to canonical residue form."""
        if self.kind == "Z":
            return int(a)
        if self.kind == "Zmod":
            return int(a) % self.n
        if self.kind == "TruncPoly":
            coeffs = tuple(int(c) % self.p for c in a)
            if len(coeffs) < self.n:
                coeffs = coeffs + (0,) * (self.n - len(coeffs))
            return coeffs[: self.n]
        return tuple(f.canon(x) for f, x in zip(self.factors, a))

    def add(self, a, b):
        if self.kind == "Z":
            return a + b
        if self.kind == "Zmod":
            return (a + b) % self.n
        if self.kind == "TruncPoly":
            return tuple((x + y) % self.p for x, y in zip(a, b))
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def neg(self, a):
        if self.kind == "Z":
            return -a
        if self.kind == "Zmod":
            return (-a) % self.n
        if self.kind == "TruncPoly":
            return tuple((-x) % self.p for x in a)
        return tuple(f.neg(x) for f, x in zip(self.factors, a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind == "Z":
            return a * b
        if self.kind == "Zmod":
            return (a * b) % self.n
        if self.kind == "TruncPoly":
            out = [0] * self.n
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    if i + j >= self.n:
                        break
                    out[i + j] = (out[i + j] + x * y) % self.p
            return tuple(out)
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def is_zero(self, a) -> bool:
        if self.kind in ("Z", "Zmod"):
            return a == 0
        if self.kind == "TruncPoly":
            return all(c == 0 for c in a)
        return all(f.is_zero(x) for f, x in zip(self.factors, a))

    def is_unit(self, a) -> bool:
        if self.kind == "Z":
            return a in (1, -1)
        if self.kind == "Zmod":
            return math.gcd(a, self.n) == 1
        if self.kind == "TruncPoly":
            return a[0] != 0
        return all(f.is_unit(x) for f, x in zip(self.factors, a))

    def unit_inverse(self, u):
        if self.kind == "Z":
            return u  # +-1
        if self.kind == "Zmod":
            return pow(u, -1, self.n)
        if self.kind == "TruncPoly":
            # power series inversion mod x^n
            inv0 = pow(u[0], -1, self.p)
            out = [inv0] + [0] * (self.n - 1)
            for k in range(1, self.n):
                s = 0
                for i in range(1, k + 1):
                    s += u[i] * out[k - i]
                out[k] = (-inv0 * s) % self.p
            return tuple(out)
        return tuple(f.unit_inverse(x) for f, x in zip(self.factors, u))

    def _val(self, a) -> int:
        """x-adic valuation of a TruncPoly element (n for zero)."""
        for i, c in enumerate(a):
            if c != 0:
                return i
        return self.n

    def assoc_decompose(self, a):
        """Write a = u * d with d the canonical divisor representative, u a unit."""
        if self.kind == "Z":
            if a == 0:
                return 0, 1
            return (abs(a), 1 if a > 0 else -1)
        if self.kind == "Zmod":
            if a == 0:
                return 0, 1
            g = math.gcd(a, self.n)
            ap = a // g
            step = self.n // g
            for k in range(self.n):
                u = (ap + k * step) % self.n
                if math.gcd(u, self.n) == 1:
                    return g % self.n, u
            raise AssertionError("no unit completion found")
        if self.kind == "TruncPoly":
            v = self._val(a)
            if v >= self.n:
                return self.zero(), self.one()
            d = tuple(1 if i == v else 0 for i in range(self.n))
            u = self.canon(a[v:])
            return d, u
        parts = [f.assoc_decompose(x) for f, x in zip(self.factors, a)]
        return tuple(p[0] for p in parts), tuple(p[1] for p in parts)

    def divide(self, a, b):
        """Some q with q*b = a, or None when b does not divide a."""
        if self.kind == "Z":
            if b == 0:
                return 0 if a == 0 else None
            return a // b if a % b == 0 else None
        if self.kind == "Zmod":
            if b == 0:
                return 0 if a == 0 else None
            g = math.gcd(b, self.n)
            if a % g:
                return None
            m = self.n // g
            return ((a // g) * pow(b // g, -1, m)) % m if m > 1 else 0
        if self.kind == "TruncPoly":
            if self.is_zero(b):
                return self.zero() if self.is_zero(a) else None
            d, u = self.assoc_decompose(b)
            v = self._val(d)
            c = self.mul(a, self.unit_inverse(u))
            if self._val(c) < v:
                return None
            return self.canon(c[v:])
        out = []
        for f, x, y in zip(self.factors, a, b):
            q = f.divide(x, y)
            if q is None:
                return None
            out.append(q)
        return tuple(out)

    def ann_generator(self, d):
        """Generator of the annihilator ideal of d, or None when ann(d) = 0."""
        if self.kind == "Z":
            return 1 if d == 0 else None
        if self.kind == "Zmod":
            g = math.gcd(d, self.n)
            a = (self.n // g) % self.n
            return a if a != 0 else None
        if self.kind == "TruncPoly":
            v = self._val(d)
            if v == 0:
                return None  # unit: trivial annihilator
            return tuple(1 if i == self.n - v else 0 for i in range(self.n))
        gens = []
        trivial = True
        for f, x in zip(self.factors, d):
            a = f.ann_generator(x)
            if a is None:
                gens.append(f.zero())
            else:
                gens.append(a)
                trivial = False
        return None if trivial else tuple(gens)

    # -- finiteness helpers ---------------------------------------------------

    def cardinality(self) -> Optional[int]:
        if self.kind == "Z":
            return None
        if self.kind == "Zmod":
            return self.n
        if self.kind == "TruncPoly":
            return self.p ** self.n
        cards = [f.cardinality() for f in self.factors]
        if any(c is None for c in cards):
            return None
        return math.prod(cards)

    def cyclic_cardinality(self, d) -> Optional[int]:
        """|R/(d)| for a canonical divisor d (None when infinite)."""
        if self.kind == "Z":
            return None if d == 0 else abs(d)
        if self.kind == "Zmod":
            return self.n if d == 0 else math.gcd(d, self.n)
        if self.kind == "TruncPoly":
            return self.p ** self._val(d)
        parts = [f.cyclic_cardinality(x) for f, x in zip(self.factors, d)]
        if any(c is None for c in parts):
            return None
        return math.prod(parts)

    def elements(self) -> Iterator:
        if self.kind == "Zmod":
            yield from range(self.n)
        elif self.kind == "TruncPoly":
            for coeffs in itertools.product(range(self.p), repeat=self.n):
                yield coeffs
        elif self.kind == "Product":
            for combo in itertools.product(*[list(f.elements()) for f in self.factors]):
                yield combo
        else:
            raise InfiniteRingIteration()

    def random_element(self, rng):
        if self.kind == "Z":
            return rng.randint(-4, 4)
        if self.kind == "Zmod":
            return rng.randrange(self.n)
        if self.kind == "TruncPoly":
            return tuple(rng.randrange(self.p) for _ in range(self.n))
        return tuple(f.random_element(rng) for f in self.factors)

    # -- chain-factor metadata -------------------------------------------------

    def factor_count(self) -> int:
        """Number of chain-ring factors (for Hom(-,Proj) certification)."""
        if self.kind == "Zmod":
            return len(self.chain_factors)
        if self.kind == "Product":
            return sum(f.factor_count() for f in self.factors)
        return 1

    def complement_selectors(self) -> List:
        """Per chain factor i, the element that is 0 on factor i and 1 elsewhere.

        R/(w_i) is then the i-th indecomposable projective.
        """
        if self.kind == "Zmod":
            out = []
            for p, k in self.chain_factors:
                q = p ** k
                m = self.n // q
                # w = 0 mod q, 1 mod m
                if m == 1:
                    out.append(0)
                else:
                    w = (q * pow(q, -1, m)) % self.n
                    out.append(w)
            return out
        if self.kind == "Product":
            out = []
            for i, f in enumerate(self.factors):
                for w in f.complement_selectors():
                    tup = tuple(
                        (w if j == i else g.one()) for j, g in enumerate(self.factors)
                    )
                    out.append(tup)
            return out
        return [self.zero()]

    def project_to_factor(self, a, index: int):
        """Project an element to the chain factor with the given position."""
        if self.kind == "Zmod":
            p, k = self.chain_factors[index]
            return a % (p ** k)
        if self.kind == "Product":
            for i, f in enumerate(self.factors):
                c = f.factor_count()
                if index < c:
                    return f.project_to_factor(a[i], index)
                index -= c
            raise IndexError(index)
        if index != 0:
            raise IndexError(index)
        return a

    # -- element serialization ---------------------------------------------------

    def element_to_json(self, a):
        if self.kind in ("Z", "Zmod"):
            return a
        if self.kind == "TruncPoly":
            return list(a)
        return [f.element_to_json(x) for f, x in zip(self.factors, a)]

    def element_from_json(self, doc):
        if self.kind in ("Z", "Zmod"):
            if not isinstance(doc, int) or isinstance(doc, bool):
                raise ParseError(f"expected integer entry, got {doc!r}")
            return self.canon(doc)
        if self.kind == "TruncPoly":
            if not isinstance(doc, (list, tuple)) or len(doc) > self.n:
                raise ParseError(f"expected coefficient list of length <= {self.n}")
            return self.canon(tuple(doc))
        if not isinstance(doc, (list, tuple)) or len(doc) != len(self.factors):
            raise ParseError("product entry arity mismatch")
        return tuple(f.element_from_json(x) for f, x in zip(self.factors, doc))

    def element_str(self, a) -> str:
        if self.kind in ("Z", "Zmod"):
            return str(a)
        if self.kind == "TruncPoly":
            terms = []
            for i, c in enumerate(a):
                if c == 0:
                    continue
                if i == 0:
                    terms.append(str(c))
                else:
                    xs = "x" if i == 1 else f"x^{i}"
                    terms.append(xs if c == 1 else f"{c}{xs}")
            return "+".join(terms) if terms else "0"
        return "(" + ",".join(f.element_str(x) for f, x in zip(self.factors, a)) + ")"


class InfiniteRingIteration(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# ring constructors
# ---------------------------------------------------------------------------

def integers() -> RingHandle:
    return RingHandle("Z")


def zmod(n: int) -> RingHandle:
    return RingHandle("Zmod", n=n)


def trunc_poly(p: int, n: int) -> RingHandle:
    return RingHandle("TruncPoly", p=p, n=n)


def product(*factors: RingHandle) -> RingHandle:
    flat: List[RingHandle] = []
    for f in factors:
        if f.kind == "Product":
            flat.extend(f.factors)  # flattening is idempotent
        else:
            flat.append(f)
    if len(flat) == 1:
        return flat[0]
    return RingHandle("Product", factors=tuple(flat))


def make_ring(spec) -> RingHandle:
    """Build a catalog ring from a description dict or pass a handle through."""
    if isinstance(spec, RingHandle):
        return spec
    if not isinstance(spec, dict):
        raise ParseError(f"ring description must be an object, got {spec!r}")
    kind = spec.get("kind")
    if kind == "Z":
        return integers()
    if kind == "Zmod":
        return zmod(spec.get("n", 0))
    if kind == "TruncPoly":
        return trunc_poly(spec.get("p", 0), spec.get("n", 0))
    if kind == "Product":
        facs = spec.get("factors")
        if not isinstance(facs, list) or not facs:
            raise ParseError("Product ring needs a nonempty factor list")
        return product(*[make_ring(f) for f in facs])
    raise ParseError(f"unknown ring kind {kind!r}")


def ring_profile(ring: RingHandle) -> GorensteinProfile:
    return ring.profile


def ring_to_json(ring: RingHandle):
    if ring.kind == "Z":
        return {"kind": "Z"}
    if ring.kind == "Zmod":
        return {"kind": "Zmod", "n": ring.n}
    if ring.kind == "TruncPoly":
        return {"kind": "TruncPoly", "p": ring.p, "n": ring.n}
    return {"kind": "Product", "factors": [ring_to_json(f) for f in ring.factors]}


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

class Matrix:
    """Immutable dense matrix over a catalog ring, row-major entries."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: RingHandle, rows: int, cols: int, entries: Sequence):
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ValueError("entry count must equal rows*cols")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = tuple(ring.canon(e) for e in entries)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_rows(ring: RingHandle, rows_data: Sequence[Sequence]) -> "Matrix":
        r = len(rows_data)
        c = len(rows_data[0]) if r else 0
        flat = [e for row in rows_data for e in row]
        return Matrix(ring, r, c, flat)

    @staticmethod
    def zero(ring: RingHandle, rows: int, cols: int) -> "Matrix":
        z = ring.zero()
        return Matrix(ring, rows, cols, [z] * (rows * cols))

    @staticmethod
    def identity(ring: RingHandle, n: int) -> "Matrix":
        z, o = ring.zero(), ring.one()
        return Matrix(ring, n, n, [o if i == j else z for i in range(n) for j in range(n)])

    @staticmethod
    def from_int_rows(ring: RingHandle, rows_data: Sequence[Sequence[int]]) -> "Matrix":
        """Convenience: integer entries mapped via n -> n*1 in the ring."""
        def conv(k):
            out = ring.zero()
            one = ring.one()
            step = one if k >= 0 else ring.neg(one)
            for _ in range(abs(k)):
                out = ring.add(out, step)
            return out
        r = len(rows_data)
        c = len(rows_data[0]) if r else 0
        return Matrix(ring, r, c, [conv(e) for row in rows_data for e in row])

    # -- access ---------------------------------------------------------------

    def at(self, i: int, j: int):
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> List:
        return list(self.entries[i * self.cols: (i + 1) * self.cols])

    def col(self, j: int) -> List:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> List[List]:
        return [self.row(i) for i in range(self.rows)]

    def is_zero_matrix(self) -> bool:
        return all(self.ring.is_zero(e) for e in self.entries)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: "Matrix"):
        if self.ring != other.ring:
            raise RingMismatch("matrices over different rings")

    def add(self, other: "Matrix") -> "Matrix":
        self._check(other)
        R = self.ring
        return Matrix(R, self.rows, self.cols,
                      [R.add(a, b) for a, b in zip(self.entries, other.entries)])

    def sub(self, other: "Matrix") -> "Matrix":
        self._check(other)
        R = self.ring
        return Matrix(R, self.rows, self.cols,
                      [R.sub(a, b) for a, b in zip(self.entries, other.entries)])

    def neg(self) -> "Matrix":
        R = self.ring
        return Matrix(R, self.rows, self.cols, [R.neg(a) for a in self.entries])

    def scale(self, c) -> "Matrix":
        R = self.ring
        return Matrix(R, self.rows, self.cols, [R.mul(c, a) for a in self.entries])

    def mul(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        R = self.ring
        out = []
        orows = other.to_rows()
        for i in range(self.rows):
            srow = self.row(i)
            acc = [R.zero()] * other.cols
            for k, a in enumerate(srow):
                if R.is_zero(a):
                    continue
                orow = orows[k]
                for j in range(other.cols):
                    b = orow[j]
                    if not R.is_zero(b):
                        acc[j] = R.add(acc[j], R.mul(a, b))
            out.extend(acc)
        return Matrix(R, self.rows, other.cols, out)

    def mul_vec(self, vec: Sequence) -> List:
        R = self.ring
        out = []
        for i in range(self.rows):
            acc = R.zero()
            for j, x in enumerate(vec):
                a = self.at(i, j)
                if not (R.is_zero(a) or R.is_zero(x)):
                    acc = R.add(acc, R.mul(a, x))
            out.append(acc)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows,
                      [self.at(i, j) for j in range(self.cols) for i in range(self.rows)])

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("hstack row mismatch")
        rows = [self.row(i) + other.row(i) for i in range(self.rows)]
        return Matrix(self.ring, self.rows, self.cols + other.cols,
                      [e for row in rows for e in row])

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("vstack col mismatch")
        return Matrix(self.ring, self.rows + other.rows, self.cols,
                      list(self.entries) + list(other.entries))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product matching row-major vec: vec(A S B) = (A kron B^T) vec(S)."""
        self._check(other)
        R = self.ring
        rows = self.rows * other.rows
        cols = self.cols * other.cols
        ents = [R.zero()] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.at(i, j)
                if R.is_zero(a):
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        b = other.at(k, l)
                        if not R.is_zero(b):
                            ents[(i * other.rows + k) * cols + (j * other.cols + l)] = R.mul(a, b)
        return Matrix(R, rows, cols, ents)

    @staticmethod
    def block_diag(ring: RingHandle, blocks: Sequence["Matrix"]) -> "Matrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = Matrix.zero(ring, rows, cols).to_rows()
        ro = co = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[ro + i][co + j] = b.at(i, j)
            ro += b.rows
            co += b.cols
        return Matrix.from_rows(ring, out) if rows else Matrix(ring, 0, cols, [])

    @staticmethod
    def from_columns(ring: RingHandle, rows: int, columns: Sequence[Sequence]) -> "Matrix":
        cols = len(columns)
        ents = [ring.zero()] * (rows * cols)
        for j, colv in enumerate(columns):
            for i in range(rows):
                ents[i * cols + j] = colv[i]
        return Matrix(ring, rows, cols, ents)

    def columns(self) -> List[List]:
        return [self.col(j) for j in range(self.cols)]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ring == other.ring
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, self.entries))

    def __repr__(self):
        R = self.ring
        body = "; ".join(",".join(R.element_str(e) for e in self.row(i))
                         for i in range(self.rows))
        return f"Matrix[{self.rows}x{self.cols}: {body}]"

    def to_json(self):
        return {"rows": self.rows, "cols": self.cols,
                "entries": [self.ring.element_to_json(e) for e in self.entries]}


def matrix_from_json(ring: RingHandle, doc) -> Matrix:
    if not isinstance(doc, dict) or not {"rows", "cols", "entries"} <= set(doc):
        raise ParseError("matrix document needs rows, cols, entries")
    rows, cols, ents = doc["rows"], doc["cols"], doc["entries"]
    if not isinstance(ents, list) or len(ents) != rows * cols:
        raise ParseError("matrix entry count must equal rows*cols")
    return Matrix(ring, rows, cols, [ring.element_from_json(e) for e in ents])


# ---------------------------------------------------------------------------
# diagonal normal form
# ---------------------------------------------------------------------------

class _PidOps:
    """Arithmetic hooks for the two covering PIDs used by the lift."""

    def __init__(self, kind: str, p: int = 0):
        self.kind = kind  # "int" or "poly"
        self.p = p

    def zero(self):
        return 0 if self.kind == "int" else ()

    def one(self):
        return 1 if self.kind == "int" else (1,)

    def is_zero(self, a):
        return a == 0 if self.kind == "int" else len(a) == 0

    def canon_poly(self, coeffs):
        out = [c % self.p for c in coeffs]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def add(self, a, b):
        if self.kind == "int":
            return a + b
        la, lb = len(a), len(b)
        out = [0] * max(la, lb)
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += c
        return self.canon_poly(out)

    def neg(self, a):
        if self.kind == "int":
            return -a
        return self.canon_poly([-c for c in a])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind == "int":
            return a * b
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return self.canon_poly(out)

    def size(self, a):
        """Euclidean size for pivot selection (nonzero inputs)."""
        return abs(a) if self.kind == "int" else len(a)

    def divmod_(self, a, b):
        if self.kind == "int":
            return divmod(a, b)
        # polynomial long division over F_p
        q = [0] * max(1, len(a) - len(b) + 1)
        inv_lead = pow(b[-1], -1, self.p)
        rr = self.canon_poly(a)
        while len(rr) >= len(b):
            shift = len(rr) - len(b)
            coeff = (rr[-1] * inv_lead) % self.p
            q[shift] = (q[shift] + coeff) % self.p
            r = list(rr)
            for i, cc in enumerate(b):
                r[shift + i] = (r[shift + i] - coeff * cc) % self.p
            rr = self.canon_poly(r)
        return self.canon_poly(q), rr

    def divides(self, a, b):
        """a | b."""
        if self.is_zero(a):
            return self.is_zero(b)
        _, r = self.divmod_(b, a)
        return self.is_zero(r)

    def xgcd(self, a, b):
        """g, s, t with s*a + t*b = g."""
        r0, r1 = a, b
        s0, s1 = self.one(), self.zero()
        t0, t1 = self.zero(), self.one()
        while not self.is_zero(r1):
            q, r = self.divmod_(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.sub(s0, self.mul(q, s1))
            t0, t1 = t1, self.sub(t0, self.mul(q, t1))
        return r0, s0, t0

    def quo(self, a, b):
        q, r = self.divmod_(a, b)
        assert self.is_zero(r)
        return q


def _pid_snf(ops: _PidOps, data: List[List], r: int, c: int):
    """Diagonalize over a PID with invertible transforms.

    Returns (diag_entries, U, Uinv, V, Vinv) as row-lists with U*A*V diagonal,
    consecutive entries dividing, entries canonical (nonnegative / monic).
    """
    A = [row[:] for row in data]

    def eye(n):
        return [[ops.one() if i == j else ops.zero() for j in range(n)] for i in range(n)]

    U, Uinv = eye(r), eye(r)
    V, Vinv = eye(c), eye(c)

    # row ops: A' = E*A, U' = E*U, Uinv' = Uinv*E^{-1}
    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def row_addmul(i, j, q):
        # row_i += q*row_j
        A[i] = [ops.add(x, ops.mul(q, y)) for x, y in zip(A[i], A[j])]
        U[i] = [ops.add(x, ops.mul(q, y)) for x, y in zip(U[i], U[j])]
        for row in Uinv:
            row[j] = ops.sub(row[j], ops.mul(q, row[i]))

    def row_gcd(i, j, jcol):
        # rows (i,j) <- [[s,t],[-b/g,a/g]] with s*A[i][jcol]+t*A[j][jcol]=g
        a, b = A[i][jcol], A[j][jcol]
        g, s, t = ops.xgcd(a, b)
        ag, bg = ops.quo(a, g), ops.quo(b, g)
        for M in (A, U):
            ri = [ops.add(ops.mul(s, x), ops.mul(t, y)) for x, y in zip(M[i], M[j])]
            rj = [ops.sub(ops.mul(ag, y), ops.mul(bg, x)) for x, y in zip(M[i], M[j])]
            M[i], M[j] = ri, rj
        # E^{-1} block [[ag, -t], [bg, s]]: cols of Uinv updated
        for row in Uinv:
            x, y = row[i], row[j]
            row[i] = ops.add(ops.mul(x, ag), ops.mul(y, bg))
            row[j] = ops.add(ops.mul(ops.neg(t), x), ops.mul(s, y))

    def row_scale(i, u, u_inv):
        A[i] = [ops.mul(u, x) for x in A[i]]
        U[i] = [ops.mul(u, x) for x in U[i]]
        for row in Uinv:
            row[i] = ops.mul(row[i], u_inv)

    # col ops: A' = A*W, V' = V*W, Vinv' = W^{-1}*Vinv
    def col_swap(j, k):
        for M in (A, V):
            for row in M:
                row[j], row[k] = row[k], row[j]
        Vinv[j], Vinv[k] = Vinv[k], Vinv[j]

    def col_addmul(j, k, q):
        # col_j += q*col_k
        for M in (A, V):
            for row in M:
                row[j] = ops.add(row[j], ops.mul(q, row[k]))
        Vinv[k] = [ops.sub(x, ops.mul(q, y)) for x, y in zip(Vinv[k], Vinv[j])]

    def col_gcd(irow, j, k):
        # cols (j,k): col_j <- s*col_j + t*col_k, col_k <- -b/g*col_j + a/g*col_k
        a, b = A[irow][j], A[irow][k]
        g, s, t = ops.xgcd(a, b)
        ag, bg = ops.quo(a, g), ops.quo(b, g)
        for M in (A, V):
            for row in M:
                x, y = row[j], row[k]
                row[j] = ops.add(ops.mul(s, x), ops.mul(t, y))
                row[k] = ops.sub(ops.mul(ag, y), ops.mul(bg, x))
        # W block [[s,-bg],[t,ag]], W^{-1} block [[ag,bg],[-t,s]]: rows of Vinv
        rj = [ops.add(ops.mul(ag, x), ops.mul(bg, y)) for x, y in zip(Vinv[j], Vinv[k])]
        rk = [ops.add(ops.mul(ops.neg(t), x), ops.mul(s, y)) for x, y in zip(Vinv[j], Vinv[k])]
        Vinv[j], Vinv[k] = rj, rk

    m = min(r, c)
    for t in range(m):
        while True:
            # smallest nonzero entry of the trailing block becomes the pivot
            piv = None
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    e = A[i][j]
                    if not ops.is_zero(e):
                        s = ops.size(e)
                        if best is None or s < best:
                            best, piv = s, (i, j)
            if piv is None:
                break
            if piv[0] != t:
                row_swap(t, piv[0])
            if piv[1] != t:
                col_swap(t, piv[1])
            for i in range(t + 1, r):
                b = A[i][t]
                if ops.is_zero(b):
                    continue
                a = A[t][t]
                if ops.divides(a, b):
                    row_addmul(i, t, ops.neg(ops.quo(b, a)))
                else:
                    row_gcd(t, i, t)
            for j in range(t + 1, c):
                b = A[t][j]
                if ops.is_zero(b):
                    continue
                a = A[t][t]
                if ops.divides(a, b):
                    col_addmul(j, t, ops.neg(ops.quo(b, a)))
                else:
                    col_gcd(t, t, j)
            if any(not ops.is_zero(A[i][t]) for i in range(t + 1, r)) or \
               any(not ops.is_zero(A[t][j]) for j in range(t + 1, c)):
                continue
            # enforce pivot | trailing block so the diagonal chains
            offender = None
            for i in range(t + 1, r):
                if any(not ops.divides(A[t][t], A[i][j]) for j in range(t + 1, c)):
                    offender = i
                    break
            if offender is None:
                break
            row_addmul(t, offender, ops.one())
    # canonical pivots: nonnegative integers / monic polynomials
    for t in range(m):
        a = A[t][t]
        if ops.is_zero(a):
            continue
        if ops.kind == "int":
            if a < 0:
                row_scale(t, -1, -1)
        else:
            lead = a[-1]
            if lead != 1:
                row_scale(t, (pow(lead, -1, ops.p),), (lead,))
    diag = [A[t][t] for t in range(m)]
    return diag, U, Uinv, V, Vinv


@dataclass
class DiagonalReport:
    """U * A * V = diag with certified invertible transforms."""
    matrix: Matrix
    diagonal: List
    U: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    def diag_matrix(self) -> Matrix:
        ring = self.matrix.ring
        out = Matrix.zero(ring, self.matrix.rows, self.matrix.cols).to_rows()
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        if self.matrix.rows == 0:
            return Matrix(ring, 0, self.matrix.cols, [])
        return Matrix.from_rows(ring, out)

    def verify(self):
        ring = self.matrix.ring
        assert self.U.mul(self.matrix).mul(self.V) == self.diag_matrix()
        assert self.U.mul(self.U_inv) == Matrix.identity(ring, self.U.rows)
        assert self.U_inv.mul(self.U) == Matrix.identity(ring, self.U.rows)
        assert self.V.mul(self.V_inv) == Matrix.identity(ring, self.V.rows)
        assert self.V_inv.mul(self.V) == Matrix.identity(ring, self.V.rows)


def _lift_entry(ring: RingHandle, e):
    if ring.kind == "Z":
        return e
    if ring.kind == "Zmod":
        return e
    # TruncPoly: strip trailing zeros into covering-poly form
    out = list(e)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _reduce_entry(ring: RingHandle, e):
    if ring.kind == "Z":
        return e
    if ring.kind == "Zmod":
        return e % ring.n
    return ring.canon(tuple(e) + (0,) * ring.n)


def matrix_normal_form(A: Matrix) -> DiagonalReport:
    """Diagonalize with invertible U, V; diagonal entries canonical, each
    dividing the next (componentwise over products)."""
    ring = A.ring
    if ring.kind == "Product":
        sub = []
        for i, f in enumerate(ring.factors):
            fm = Matrix(f, A.rows, A.cols, [e[i] for e in A.entries])
            sub.append(matrix_normal_form(fm))
        def comb(mats: List[Matrix], rows, cols) -> Matrix:
            ents = []
            for k in range(rows * cols):
                ents.append(tuple(m.entries[k] for m in mats))
            return Matrix(ring, rows, cols, ents)
        m = min(A.rows, A.cols)
        diag = [tuple(s.diagonal[i] for s in sub) for i in range(m)]
        rep = DiagonalReport(
            A, diag,
            comb([s.U for s in sub], A.rows, A.rows),
            comb([s.V for s in sub], A.cols, A.cols),
            comb([s.U_inv for s in sub], A.rows, A.rows),
            comb([s.V_inv for s in sub], A.cols, A.cols),
        )
        rep.verify()
        return rep

    ops = _PidOps("int") if ring.kind in ("Z", "Zmod") else _PidOps("poly", ring.p)
    data = [[_lift_entry(ring, A.at(i, j)) for j in range(A.cols)] for i in range(A.rows)]
    diag, U, Uinv, V, Vinv = _pid_snf(ops, data, A.rows, A.cols)

    def red_mat(rows_data, r, c):
        return Matrix(ring, r, c, [_reduce_entry(ring, e) for row in rows_data for e in row])

    Um = red_mat(U, A.rows, A.rows)
    Uim = red_mat(Uinv, A.rows, A.rows)
    Vm = red_mat(V, A.cols, A.cols)
    Vim = red_mat(Vinv, A.cols, A.cols)
    dred = [_reduce_entry(ring, d) for d in diag]

    if ring.kind != "Z":
        # scale pivot rows so diagonal entries are canonical divisor reps
        urows = Um.to_rows()
        uirows = Uim.to_rows()
        for t, d in enumerate(dred):
            if ring.is_zero(d):
                continue
            can, unit = ring.assoc_decompose(d)
            if unit == ring.one():
                dred[t] = can
                continue
            uinv = ring.unit_inverse(unit)
            urows[t] = [ring.mul(uinv, x) for x in urows[t]]
            for row in uirows:
                row[t] = ring.mul(row[t], unit)
            dred[t] = can
        Um = Matrix.from_rows(ring, urows) if urows else Um
        Uim = Matrix.from_rows(ring, uirows) if uirows else Uim

    rep = DiagonalReport(A, dred, Um, Vm, Uim, Vim)
    rep.verify()
    return rep


# ---------------------------------------------------------------------------
# linear algebra on top of the normal form
# ---------------------------------------------------------------------------

def solve_matrix(A: Matrix, B: Matrix, nf: Optional[DiagonalReport] = None) -> Optional[Matrix]:
    """X with A*X = B, or None when the system is unsolvable."""
    if A.rows != B.rows:
        raise ValueError("solve shape mismatch")
    ring = A.ring
    if nf is None:
        nf = matrix_normal_form(A)
    Y = nf.U.mul(B)
    m = len(nf.diagonal)
    cols_out = []
    for j in range(B.cols):
        y = Y.col(j)
        x = [ring.zero()] * A.cols
        ok = True
        for i in range(A.rows):
            if i < m:
                q = ring.divide(y[i], nf.diagonal[i])
                if q is None:
                    ok = False
                    break
                if i < A.cols:
                    x[i] = q
            elif not ring.is_zero(y[i]):
                ok = False
                break
        if not ok:
            return None
        cols_out.append(x)
    Xc = Matrix.from_columns(ring, A.cols, cols_out)
    return nf.V.mul(Xc)


def kernel_columns(A: Matrix, nf: Optional[DiagonalReport] = None) -> List[List]:
    """Generators (as column vectors) of {x : A*x = 0}."""
    ring = A.ring
    if nf is None:
        nf = matrix_normal_form(A)
    m = len(nf.diagonal)
    gens = []
    for i in range(A.cols):
        if i < m:
            a = ring.ann_generator(nf.diagonal[i])
            if a is None or ring.is_zero(a):
                continue
            gens.append([ring.mul(a, v) for v in nf.V.col(i)])
        else:
            gens.append(nf.V.col(i))
    return gens
