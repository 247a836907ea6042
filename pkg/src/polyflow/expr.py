"""Immutable complex expression trees with vectorized evaluation.

Nodes close over n coordinate slots and support exact symbolic
differentiation, coordinate substitution, and fractional-linear pre/post
composition.  Evaluation broadcasts over numpy arrays, so a whole grid of
points is one tree walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr", "Coord", "Const", "Add", "Sub", "Mul", "Div", "Pow", "Exp",
    "FracLin", "EvaluationError", "ExprParseError", "subst", "shift_coords",
    "linear_combination", "parse_expr",
]


class EvaluationError(ArithmeticError):
    """Raised when evaluation hits a pole; carries the offending subexpression."""

    def __init__(self, message, subexpr):
        super().__init__(f"{message}: {subexpr}")
        self.subexpr = subexpr


class Expr:
    """Base node. Subclasses are frozen dataclasses; trees are shared freely."""

    __slots__ = ()

    def ev(self, coords):
        """Evaluate with ``coords`` a sequence of complex scalars/ndarrays."""
        raise NotImplementedError

    def diff(self, j):
        """Exact derivative with respect to coordinate ``j``, as a new tree."""
        raise NotImplementedError

    def subst(self, repl):
        """Replace ``Coord(j)`` by ``repl[j]`` throughout."""
        raise NotImplementedError

    def has_division(self):
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, _as_expr(other))

    def __sub__(self, other):
        return Sub(self, _as_expr(other))

    def __mul__(self, other):
        return Mul(self, _as_expr(other))

    def __truediv__(self, other):
        return Div(self, _as_expr(other))

    def __radd__(self, other):
        return Add(_as_expr(other), self)

    def __rsub__(self, other):
        return Sub(_as_expr(other), self)

    def __rmul__(self, other):
        return Mul(_as_expr(other), self)

    def __rtruediv__(self, other):
        return Div(_as_expr(other), self)

    def __neg__(self):
        return Mul(Const(-1.0), self)


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex)):
        return Const(complex(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


@dataclass(frozen=True)
class Coord(Expr):
    j: int

    def ev(self, coords):
        return coords[self.j]

    def diff(self, j):
        return Const(1.0 + 0.0j) if j == self.j else Const(0.0j)

    def subst(self, repl):
        return repl[self.j]

    def has_division(self):
        return False

    def __str__(self):
        return f"z{self.j + 1}"


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def ev(self, coords):
        return self.value

    def diff(self, j):
        return Const(0.0j)

    def subst(self, repl):
        return self

    def has_division(self):
        return False

    def __str__(self):
        v = self.value
        if v.imag == 0.0:
            return repr(v.real)
        return f"({v.real!r}{v.imag:+}i)"


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def ev(self, coords):
        return self.left.ev(coords) + self.right.ev(coords)

    def diff(self, j):
        return Add(self.left.diff(j), self.right.diff(j))

    def subst(self, repl):
        return Add(self.left.subst(repl), self.right.subst(repl))

    def has_division(self):
        return self.left.has_division() or self.right.has_division()

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def ev(self, coords):
        return self.left.ev(coords) - self.right.ev(coords)

    def diff(self, j):
        return Sub(self.left.diff(j), self.right.diff(j))

    def subst(self, repl):
        return Sub(self.left.subst(repl), self.right.subst(repl))

    def has_division(self):
        return self.left.has_division() or self.right.has_division()

    def __str__(self):
        return f"({self.left} - {self.right})"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def ev(self, coords):
        return self.left.ev(coords) * self.right.ev(coords)

    def diff(self, j):
        return Add(Mul(self.left.diff(j), self.right),
                   Mul(self.left, self.right.diff(j)))

    def subst(self, repl):
        return Mul(self.left.subst(repl), self.right.subst(repl))

    def has_division(self):
        return self.left.has_division() or self.right.has_division()

    def __str__(self):
        return f"({self.left} * {self.right})"


def _check_nonzero(den, node):
    if np.any(den == 0):
        raise EvaluationError("division by zero", node)


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr

    def ev(self, coords):
        d = self.den.ev(coords)
        _check_nonzero(d, self)
        return self.num.ev(coords) / d

    def diff(self, j):
        # (u/v)' = (u'v - uv') / v^2
        return Div(Sub(Mul(self.num.diff(j), self.den),
                       Mul(self.num, self.den.diff(j))),
                   Pow(self.den, 2))

    def subst(self, repl):
        return Div(self.num.subst(repl), self.den.subst(repl))

    def has_division(self):
        return True

    def __str__(self):
        return f"({self.num} / {self.den})"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("only integer powers k >= 1 are supported")

    def ev(self, coords):
        b = self.base.ev(coords)
        return b if self.k == 1 else b ** self.k

    def diff(self, j):
        if self.k == 1:
            return self.base.diff(j)
        inner = self.base if self.k == 2 else Pow(self.base, self.k - 1)
        return Mul(Mul(Const(complex(self.k)), inner), self.base.diff(j))

    def subst(self, repl):
        return Pow(self.base.subst(repl), self.k)

    def has_division(self):
        return self.base.has_division()

    def __str__(self):
        return f"({self.base})^{self.k}"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def ev(self, coords):
        return np.exp(self.arg.ev(coords))

    def diff(self, j):
        return Mul(self, self.arg.diff(j))

    def subst(self, repl):
        return Exp(self.arg.subst(repl))

    def has_division(self):
        return self.arg.has_division()

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True)
class FracLin(Expr):
    """Fractional-linear transform (a*u + b)/(c*u + d) of a subexpression.

    Coefficients may be complex (the Cayley transform needs them); c = 0
    degrades gracefully to an affine node.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    child: Expr

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate fractional-linear coefficients")

    def ev(self, coords):
        u = self.child.ev(coords)
        if self.c == 0:
            return (self.a / self.d) * u + (self.b / self.d)
        den = self.c * u + self.d
        _check_nonzero(den, self)
        return (self.a * u + self.b) / den

    def diff(self, j):
        det = self.a * self.d - self.b * self.c
        if self.c == 0:
            return Mul(Const(self.a / self.d), self.child.diff(j))
        den = Add(Mul(Const(self.c), self.child), Const(self.d))
        return Mul(Div(Const(det), Pow(den, 2)), self.child.diff(j))

    def subst(self, repl):
        return FracLin(self.a, self.b, self.c, self.d, self.child.subst(repl))

    def has_division(self):
        return self.c != 0 or self.child.has_division()

    def compose(self, other):
        """FracLin with matrix self @ other acting on the same child."""
        if not isinstance(other, FracLin) or other.child is not self.child:
            raise ValueError("compose expects a FracLin over the same child")
        return FracLin(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.child,
        )

    def __str__(self):
        num = f"({self.a} * {self.child} + {self.b})"
        if self.c == 0 and self.d == 1:
            return num
        return f"{num} / ({self.c} * {self.child} + {self.d})"


def subst(tree, repl):
    """Substitute ``repl[j]`` for coordinate j in ``tree``."""
    return tree.subst(tuple(repl))


def shift_coords(tree, arity, t):
    """``tree`` with every coordinate replaced by z_j - t."""
    tc = Const(complex(t))
    return tree.subst(tuple(Sub(Coord(j), tc) for j in range(arity)))


def linear_combination(coeffs):
    """Sum of coeffs[j] * z_j, built left to right."""
    terms = [Mul(Const(complex(c)), Coord(j)) for j, c in enumerate(coeffs)]
    out = terms[0]
    for term in terms[1:]:
        out = Add(out, term)
    return out


# --- tiny text grammar for Schur-parameter / entire-function expressions ---
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := ('-')* power
#   power  := atom ('^' integer)?
#   atom   := number | 'i' | ident | 'exp' '(' expr ')' | '(' expr ')'
#
# Identifiers are z1..zn; z and w alias z1 and z2.  A number followed by
# 'i' is an imaginary literal, so 1+2i parses via the '+' rule.

class ExprParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (column {pos + 1})")
        self.pos = pos


_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            start = i
            while i < n and (text[i].isdigit() or text[i] == "."):
                i += 1
            num = text[start:i]
            try:
                value = float(num)
            except ValueError:
                raise ExprParseError(f"bad number {num!r}", start) from None
            if i < n and text[i] == "i":
                i += 1
                tokens.append(("num", complex(0.0, value), start))
            else:
                tokens.append(("num", complex(value), start))
            continue
        if ch.isalpha():
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(("ident", text[start:i], start))
            continue
        raise ExprParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, arity):
        self.tokens = tokens
        self.arity = arity
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self, kind=None):
        tok = self.tokens[self.k]
        if kind is not None and tok[0] != kind:
            raise ExprParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.k += 1
        return tok

    def parse(self):
        tree = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprParseError(f"trailing input {tok[1]!r}", tok[2])
        return tree

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        neg = False
        while self.peek()[0] == "-":
            self.take()
            neg = not neg
        node = self.power()
        return Mul(Const(-1.0 + 0.0j), node) if neg else node

    def power(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.take()
            kind, value, pos = self.take()
            if kind != "num" or value.imag != 0 or value.real != int(value.real):
                raise ExprParseError("exponent must be a positive integer", pos)
            k = int(value.real)
            if k < 1:
                raise ExprParseError("exponent must be a positive integer", pos)
            node = Pow(node, k)
        return node

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Const(value)
        if kind == "(":
            node = self.expr()
            self.take(")")
            return node
        if kind == "ident":
            return self.ident(value, pos)
        raise ExprParseError(f"unexpected token {value!r}", pos)

    def ident(self, name, pos):
        if name == "i":
            return Const(1j)
        if name == "exp":
            self.take("(")
            node = self.expr()
            self.take(")")
            return Exp(node)
        if name == "z" and self.arity >= 1:
            return Coord(0)
        if name == "w" and self.arity >= 2:
            return Coord(1)
        if name.startswith("z") and name[1:].isdigit():
            j = int(name[1:])
            if 1 <= j <= self.arity:
                return Coord(j - 1)
            raise ExprParseError(f"coordinate {name} out of range (arity {self.arity})", pos)
        raise ExprParseError(f"unknown identifier {name!r}", pos)


def parse_expr(text, arity):
    """Parse the mini expression grammar into a tree over ``arity`` coordinates."""
    return _Parser(_tokenize(text), arity).parse()
