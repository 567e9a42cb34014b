"""Exact integer expressions in one variable ``n``.

Grammar: integer literals, ``n``, parentheses, unary minus and the binary
operators ``+``, ``-``, ``*`` and ``^`` (``**`` is accepted as a synonym).
Exponents must evaluate to nonnegative integers.
"""

from __future__ import annotations

import ast
import operator

from .errors import ExpressionError

MAX_BITS = 1 << 26

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


class IntExpr:
    """A parsed expression; call it with an integer value of ``n``."""

    def __init__(self, text: str, path: str = ""):
        self.text = text
        self.path = path
        source = text.replace("^", "**").replace("×", "*").replace("−", "-")
        try:
            tree = ast.parse(source, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {text!r}: {exc.msg}", path) from None
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if type(node.value) is not int:
                raise ExpressionError(f"only integer literals allowed, got {node.value!r}", self.path)
        elif isinstance(node, ast.Name):
            if node.id != "n":
                raise ExpressionError(f"unknown variable {node.id!r}", self.path)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            self._check(node.operand)
        elif isinstance(node, ast.BinOp) and (type(node.op) in _BINOPS or isinstance(node.op, ast.Pow)):
            self._check(node.left)
            self._check(node.right)
        else:
            raise ExpressionError(f"unsupported syntax {ast.dump(node)[:40]!r}", self.path)

    def _eval(self, node, n: int) -> int:
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return n
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, n)
            return -v if isinstance(node.op, ast.USub) else v
        left, right = self._eval(node.left, n), self._eval(node.right, n)
        if isinstance(node.op, ast.Pow):
            if right < 0:
                raise ExpressionError(f"negative exponent {right} at n={n}", self.path)
            if abs(left) > 1 and right * abs(left).bit_length() > MAX_BITS:
                raise ExpressionError(f"value too large at n={n}", self.path)
            return left**right
        return _BINOPS[type(node.op)](left, right)

    def __call__(self, n: int) -> int:
        return self._eval(self._tree, n)

    def __eq__(self, other):
        return isinstance(other, IntExpr) and other.text == self.text

    def __hash__(self):
        return hash(self.text)

    def __repr__(self):
        return f"IntExpr({self.text!r})"
