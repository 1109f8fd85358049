"""Reference tables shipped with the package, expanded into concrete rows.

The YAML file keeps family-wide formulas as small arithmetic expressions;
they are evaluated here with exact rationals by a restricted AST walker.
"""

import ast
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb, gcd

import yaml

_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: lambda a, b: Fraction(a) / Fraction(b), ast.Pow: operator.pow,
    ast.Mod: operator.mod,
}
_CALLS = {"comb": comb, "gcd": gcd}


def evaluate(expr, **env):
    """Evaluate an arithmetic expression from the tables with exact integers."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, bool)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError(f"unknown name {node.id!r} in {expr!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Compare) and len(node.ops) == 1
                and isinstance(node.ops[0], ast.Eq)):
            return ev(node.left) == ev(node.comparators[0])
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _CALLS and not node.keywords):
            return _CALLS[node.func.id](*(int(ev(a)) for a in node.args))
        raise ValueError(f"unsupported syntax in {expr!r}")

    value = ev(ast.parse(str(expr).strip(), mode="eval"))
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


def _weights(spec, n):
    spec = str(spec)
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(evaluate(lo, n=n), evaluate(hi, n=n) + 1))
    return [evaluate(w, n=n) for w in spec.split(",")]


@dataclass(frozen=True)
class GoldenRow:
    family: str
    rank: int
    weight: int
    norm: Fraction
    d: int
    dim_V: int
    q: int
    deg_K: int
    table: str  # "fixed" or "family"

    @property
    def key(self):
        return (self.family, self.rank, self.weight)


@dataclass(frozen=True)
class TypeRow:
    family: str
    rank: int
    weight: int
    q: int
    m: int
    group: str
    group_arg: int

    @property
    def key(self):
        return (self.family, self.rank, self.weight)


@dataclass(frozen=True)
class QDiffRow:
    family: str
    rank: int
    weight: int
    dynkin: int
    q: int


@lru_cache(maxsize=None)
def load_raw():
    text = resources.files("prymweyl").joinpath("data/reference_tables.yaml").read_text()
    return yaml.safe_load(text)


def invariant_rows():
    """Fixed rows first, then every instance of the family formulas."""
    raw = load_raw()
    rows = []
    for r in raw["fixed_rows"]:
        for w in r["weights"]:
            rows.append(GoldenRow(r["family"], r["rank"], w, Fraction(r["norm"]), r["d"],
                                  r["dim_V"], r["q"], r["deg_K"], "fixed"))
    for r in raw["family_rows"]:
        lo, hi = r["rank_range"]
        for n in range(lo, hi + 1):
            for i in _weights(r["weights"], n):
                vals = {k: evaluate(r[k], n=n, i=i) for k in ("d", "dim_V", "q", "deg_K")}
                rows.append(GoldenRow(r["family"], n, i, Fraction(evaluate(r["norm"], n=n, i=i)),
                                      table="family", **vals))
    return rows


def _parse_group(spec, n):
    if "(" in spec:
        name, arg = spec.split("(", 1)
        return name, evaluate(arg.rstrip(")"), n=n)
    return spec, None


def type_rows():
    rows = []
    for r in load_raw()["type_rows"]:
        lo, hi = r["rank_range"]
        for n in range(lo, hi + 1):
            for i in _weights(r["weights"], n):
                if not evaluate(r["condition"], n=n, i=i):
                    continue
                name, arg = _parse_group(r["group"], n)
                rows.append(TypeRow(r["family"], n, i, evaluate(r["q"], n=n, i=i),
                                    evaluate(r["m"], n=n, i=i), name, arg))
    return rows


def verlinde(group, arg, g):
    """Level-one Verlinde number of the named group at genus g."""
    expr = load_raw()["verlinde"][group]
    return evaluate(expr, m=arg, g=g)


def q_differs_rows():
    return [QDiffRow(**r) for r in load_raw()["q_differs_from_dynkin"]]


def genera():
    return list(load_raw()["genera"])
