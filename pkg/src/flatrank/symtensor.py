"""Homogeneous polynomials with exact coefficients: generators for the
structured families under study, partial derivatives, and the classical
flattening / shifted-partial matrix builders.

Monomials are exponent tuples of fixed length ``n_vars``.  All monomial
bases are enumerated in graded-lex order with x1 heaviest, so matrix
layouts are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import factorial

from .exactla import SparseMatrix

ExponentVector = tuple[int, ...]


class ParseError(ValueError):
    """Syntax or range error in polynomial text, with a 0-based position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InhomogeneityError(ValueError):
    pass


def monomial_basis(n_vars: int, degree: int) -> list[ExponentVector]:
    """All degree-``degree`` exponent vectors in graded-lex order."""
    if n_vars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        return []

    def rec(k: int, rem: int):
        if k == 1:
            yield (rem,)
            return
        for e in range(rem, -1, -1):
            for tail in rec(k - 1, rem - e):
                yield (e,) + tail

    return list(rec(n_vars, degree))


def multinomial(parts: tuple[int, ...]) -> int:
    total = factorial(sum(parts))
    for part in parts:
        total //= factorial(part)
    return total


class Poly:
    """Homogeneous polynomial: sparse map from exponent vector to Fraction.

    The degree is stored explicitly so the zero polynomial of a given
    degree is representable; every stored term has exactly that degree.
    """

    __slots__ = ("n_vars", "degree", "terms")

    def __init__(self, n_vars: int, degree: int, terms: dict):
        if n_vars < 1:
            raise ValueError("need at least one variable")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.n_vars = n_vars
        self.degree = degree
        clean: dict[ExponentVector, Fraction] = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != n_vars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps}")
            if sum(exps) != degree:
                raise ValueError(f"term {exps} has degree {sum(exps)}, expected {degree}")
            coeff = Fraction(coeff)
            if coeff:
                clean[exps] = coeff
        self.terms = clean

    @classmethod
    def zero(cls, n_vars: int, degree: int) -> "Poly":
        return cls(n_vars, degree, {})

    @classmethod
    def monomial(cls, exps: ExponentVector, coeff=1) -> "Poly":
        return cls(len(exps), sum(exps), {tuple(exps): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.n_vars, self.degree, self.terms) == (other.n_vars, other.degree, other.terms)

    def __add__(self, other: "Poly") -> "Poly":
        if self.n_vars != other.n_vars or self.degree != other.degree:
            raise ValueError("can only add forms of equal degree in the same variables")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Poly(self.n_vars, self.degree, terms)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scale(-1)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self.n_vars, self.degree, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        if self.n_vars != other.n_vars:
            raise ValueError("variable counts differ")
        terms: dict[ExponentVector, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return Poly(self.n_vars, self.degree + other.degree, terms)

    def to_text(self) -> str:
        """Render in the input grammar (graded-lex term order)."""
        if not self.terms:
            return "0"
        chunks = []
        for exps in sorted(self.terms, reverse=True):
            coeff = self.terms[exps]
            factors = [
                f"x{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            ]
            mag = abs(coeff)
            body = "*".join(([] if mag == 1 and factors else [str(mag)]) + factors)
            chunks.append(("- " if coeff < 0 else "+ ") + body)
        first = chunks[0][2:] if chunks[0][0] == "+" else "-" + chunks[0][2:]
        return " ".join([first] + chunks[1:])

    def __repr__(self) -> str:
        return f"Poly({self.n_vars} vars, degree {self.degree}, {len(self.terms)} terms)"


def parse_poly(text: str, n_vars: int) -> Poly:
    """Parse ``coeff*x1^2*x3 + ...`` into a homogeneous Poly.

    Grammar: terms joined by '+'/'-'; a term is an optional integer or
    fraction coefficient followed by '*' and one or more variable factors
    ``xI`` or ``xI^E``.  Whitespace is insignificant; variables are
    1-indexed.  Inhomogeneous input is rejected.
    """
    if n_vars < 1:
        raise ValueError("need at least one variable")
    pos = 0
    length = len(text)

    def skip():
        nonlocal pos
        while pos < length and text[pos].isspace():
            pos += 1

    def read_int(what: str) -> int:
        nonlocal pos
        start = pos
        while pos < length and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise ParseError(f"expected {what}", start)
        return int(text[start:pos])

    def read_term() -> tuple[Fraction, ExponentVector]:
        nonlocal pos
        skip()
        sign = 1
        if pos < length and text[pos] in "+-":
            if text[pos] == "-":
                sign = -1
            pos += 1
            skip()
        coeff = Fraction(sign)
        if pos < length and text[pos].isdigit():
            num = read_int("a coefficient")
            if pos < length and text[pos] == "/":
                pos += 1
                den_at = pos
                den = read_int("a denominator")
                if den == 0:
                    raise ParseError("zero denominator", den_at)
                coeff = Fraction(sign * num, den)
            else:
                coeff = Fraction(sign * num)
            skip()
            if pos < length and text[pos] == "*":
                pos += 1
            else:
                raise ParseError("expected '*' between coefficient and variables", pos)
        exps = [0] * n_vars
        while True:
            skip()
            if pos >= length or text[pos] != "x":
                raise ParseError("expected a variable factor like 'x1'", pos)
            pos += 1
            idx_at = pos
            idx = read_int("a variable index")
            if not 1 <= idx <= n_vars:
                raise ParseError(f"variable x{idx} out of range [1, {n_vars}]", idx_at)
            exp = 1
            skip()
            if pos < length and text[pos] == "^":
                pos += 1
                skip()
                exp = read_int("an exponent")
            exps[idx - 1] += exp
            skip()
            if pos < length and text[pos] == "*":
                pos += 1
                continue
            break
        return coeff, tuple(exps)

    skip()
    if pos == length:
        raise ParseError("empty polynomial", pos)
    raw: list[tuple[Fraction, ExponentVector]] = [read_term()]
    while True:
        skip()
        if pos == length:
            break
        if text[pos] not in "+-":
            raise ParseError("expected '+' or '-' between terms", pos)
        raw.append(read_term())

    degree = sum(raw[0][1])
    acc: dict[ExponentVector, Fraction] = {}
    for coeff, exps in raw:
        if sum(exps) != degree:
            raise InhomogeneityError(
                f"term of degree {sum(exps)} mixed with degree {degree}"
            )
        acc[exps] = acc.get(exps, Fraction(0)) + coeff
    return Poly(n_vars, degree, acc)


def gen_product(d: int) -> Poly:
    """x1*x2*...*xd in d variables."""
    if d < 1:
        raise ValueError("d must be at least 1")
    return Poly.monomial((1,) * d)


def gen_sum_of_products(r: int, d: int) -> Poly:
    """Sum of r disjoint degree-d products in r*d variables."""
    if r < 1 or d < 1:
        raise ValueError("r and d must be at least 1")
    terms = {}
    for i in range(r):
        exps = [0] * (r * d)
        exps[i * d:(i + 1) * d] = [1] * d
        terms[tuple(exps)] = 1
    return Poly(r * d, d, terms)


def gen_power_sum_power(r: int, delta1: int, delta2: int) -> Poly:
    """(x1^delta2 + ... + xr^delta2)^delta1, expanded multinomially."""
    if r < 1 or delta1 < 1 or delta2 < 1:
        raise ValueError("r, delta1, delta2 must be at least 1")
    terms = {}
    for split in monomial_basis(r, delta1):
        exps = tuple(t * delta2 for t in split)
        terms[exps] = multinomial(split)
    return Poly(r, delta1 * delta2, terms)


def gen_permanent(n: int) -> Poly:
    """Permanent of the generic n x n matrix, in n^2 variables x_{ij}.

    Variable x_{ij} sits at index (i-1)*n + j.  Supported for n up to 5
    (the term count is n!).
    """
    if not 1 <= n <= 5:
        raise ValueError("permanent generator supports 1 <= n <= 5")
    terms = {}
    for sigma in itertools.permutations(range(n)):
        exps = [0] * (n * n)
        for i, j in enumerate(sigma):
            exps[i * n + j] = 1
        terms[tuple(exps)] = 1
    return Poly(n * n, n, terms)


def gen_kyfl11_witness(n: int, d: int) -> Poly:
    """x1^d + ... + xn^d + x1^(d-1)*(x2 + ... + xn), the 2n-1 term witness."""
    if n < 2 or d < 3:
        raise ValueError("need n >= 2 and d >= 3")
    terms: dict[ExponentVector, int] = {}
    for i in range(n):
        exps = [0] * n
        exps[i] = d
        terms[tuple(exps)] = 1
    for j in range(1, n):
        exps = [0] * n
        exps[0] = d - 1
        exps[j] = 1
        terms[tuple(exps)] = 1
    return Poly(n, d, terms)


def gen_random(n_vars: int, d: int, seed: int, coeff_bound: int) -> Poly:
    """Dense degree-d form with coefficients uniform in [1, coeff_bound]."""
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be at least 1")
    rng = random.Random(seed)
    return Poly(
        n_vars, d,
        {exps: rng.randint(1, coeff_bound) for exps in monomial_basis(n_vars, d)},
    )


def _falling(e: int, a: int) -> int:
    out = 1
    for step in range(a):
        out *= e - step
    return out


def partial_derivative(P: Poly, alpha: ExponentVector) -> Poly:
    """Iterated partial derivative, with falling-factorial coefficients."""
    alpha = tuple(alpha)
    if len(alpha) != P.n_vars or any(a < 0 for a in alpha):
        raise ValueError(f"bad derivative order {alpha}")
    order = sum(alpha)
    if order > P.degree:
        raise ValueError("derivative order exceeds the degree")
    terms: dict[ExponentVector, Fraction] = {}
    for exps, coeff in P.terms.items():
        if any(e < a for e, a in zip(exps, alpha)):
            continue
        scale = 1
        for e, a in zip(exps, alpha):
            scale *= _falling(e, a)
        key = tuple(e - a for e, a in zip(exps, alpha))
        terms[key] = terms.get(key, Fraction(0)) + coeff * scale
    return Poly(P.n_vars, P.degree - order, terms)


def catalecticant(P: Poly, k: int) -> SparseMatrix:
    """Matrix of the k-th flattening: column alpha is the coefficient vector
    of the alpha-th partial derivative in the degree-(d-k) monomial basis.

    Columns carry the raw derivatives (no multinomial renormalization),
    which rescales columns only and leaves the rank unchanged.
    """
    d = P.degree
    if not 1 <= k < d:
        raise ValueError(f"derivative order k={k} outside [1, {d - 1}]")
    cols = monomial_basis(P.n_vars, k)
    rows = monomial_basis(P.n_vars, d - k)
    row_index = {m: i for i, m in enumerate(rows)}
    entries = []
    for j, alpha in enumerate(cols):
        deriv = partial_derivative(P, alpha)
        for m, c in deriv.terms.items():
            entries.append((row_index[m], j, c))
    return SparseMatrix(len(rows), len(cols), entries, row_labels=rows, col_labels=cols)


def shifted_partials(P: Poly, k: int, ell: int) -> SparseMatrix:
    """Matrix of the shifted-partials map: column (alpha, m) holds the
    coefficients of m * (alpha-th derivative) in the degree-(d-k+ell) basis.
    """
    d = P.degree
    if P.is_zero() or d < 2:
        raise ValueError("need a nonzero form of degree at least 2")
    if not 1 <= k < d:
        raise ValueError(f"derivative order k={k} outside [1, {d - 1}]")
    if ell < 1:
        raise ValueError("shift degree must be at least 1")
    alphas = monomial_basis(P.n_vars, k)
    shifts = monomial_basis(P.n_vars, ell)
    rows = monomial_basis(P.n_vars, d - k + ell)
    row_index = {m: i for i, m in enumerate(rows)}
    cols = [(alpha, m) for alpha in alphas for m in shifts]
    entries = []
    for ai, alpha in enumerate(alphas):
        deriv = partial_derivative(P, alpha)
        for si, shift in enumerate(shifts):
            j = ai * len(shifts) + si
            for m, c in deriv.terms.items():
                key = tuple(a + b for a, b in zip(m, shift))
                entries.append((row_index[key], j, c))
    return SparseMatrix(len(rows), len(cols), entries, row_labels=rows, col_labels=cols)


def apply_linear_map(P: Poly, g) -> Poly:
    """Substitute x_i -> sum_j g[i][j] * x_j."""
    n = P.n_vars
    g = [list(row) for row in g]
    if len(g) != n or any(len(row) != n for row in g):
        raise ValueError(f"substitution matrix must be {n}x{n}")
    basis = []
    for i in range(n):
        terms = {}
        for j, c in enumerate(g[i]):
            if c:
                exps = [0] * n
                exps[j] = 1
                terms[tuple(exps)] = c
        basis.append(Poly(n, 1, terms))
    out = Poly.zero(n, P.degree)
    one = Poly(n, 0, {(0,) * n: 1})
    for exps, coeff in P.terms.items():
        term = one
        for i, e in enumerate(exps):
            for _ in range(e):
                term = term * basis[i]
        out = out + term.scale(coeff)
    return out


def set_variables_to_zero(P: Poly, indices) -> Poly:
    """Kill every term touching the given 1-based variables."""
    dead = set(indices)
    if any(not 1 <= i <= P.n_vars for i in dead):
        raise ValueError("variable index out of range")
    terms = {
        exps: c
        for exps, c in P.terms.items()
        if all(exps[i - 1] == 0 for i in dead)
    }
    return Poly(P.n_vars, P.degree, terms)
