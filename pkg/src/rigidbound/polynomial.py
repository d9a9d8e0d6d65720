"""Exact sparse multivariate polynomials over the rationals in distance variables."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Number = Union[int, Fraction]


class VarKind(str, enum.Enum):
    # value doubles as the printed prefix; "c" < "x" fixes the global order
    PARAMETER = "c"
    UNKNOWN = "x"


@dataclass(frozen=True, order=True)
class Variable:
    """Squared distance between points ``i < j``; unknown ``x_ij`` or parameter ``c_ij``."""

    kind: VarKind
    i: int
    j: int

    def __post_init__(self):
        if not self.i < self.j:
            raise ValueError("variable pair must satisfy i < j")

    @classmethod
    def unknown(cls, i: int, j: int) -> "Variable":
        return cls(VarKind.UNKNOWN, min(i, j), max(i, j))

    @classmethod
    def parameter(cls, i: int, j: int) -> "Variable":
        return cls(VarKind.PARAMETER, min(i, j), max(i, j))

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)

    @property
    def is_unknown(self) -> bool:
        return self.kind == VarKind.UNKNOWN

    def __str__(self) -> str:
        return f"{self.kind.value}_{self.i}_{self.j}"

    def __repr__(self) -> str:
        return str(self)


_VAR_RE = re.compile(r"^([cx])_(\d+)_(\d+)$")


def parse_variable(token: str) -> Variable:
    m = _VAR_RE.match(token)
    if not m:
        raise ValueError(f"bad variable token {token!r}")
    return Variable(VarKind(m.group(1)), int(m.group(2)), int(m.group(3)))


class Polynomial:
    """Immutable sparse polynomial: exponent vector over ``variables`` -> rational coefficient.

    ``variables`` is sorted and every exponent tuple has that arity.  Zero
    coefficients are never stored.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[Variable], terms: Mapping[tuple[int, ...], Number]):
        vs = tuple(variables)
        if list(vs) != sorted(set(vs)):
            raise ValueError("variables must be sorted and distinct")
        clean = {}
        for exp, coeff in terms.items():
            if len(exp) != len(vs):
                raise ValueError("exponent arity does not match variables")
            if coeff:
                clean[tuple(exp)] = Fraction(coeff)
        self.variables = vs
        self.terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: Number) -> "Polynomial":
        return cls((), {(): value})

    @classmethod
    def var(cls, v: Variable) -> "Polynomial":
        return cls((v,), {(1,): 1})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls((), {})

    def embed(self, variables: Sequence[Variable]) -> dict[tuple[int, ...], Fraction]:
        """Terms re-expressed over a sorted superset of ``self.variables``."""
        pos = [variables.index(v) for v in self.variables]
        out = {}
        for exp, c in self.terms.items():
            full = [0] * len(variables)
            for p, e in zip(pos, exp):
                full[p] = e
            out[tuple(full)] = c
        return out

    def _aligned(self, other: "Polynomial"):
        vs = tuple(sorted(set(self.variables) | set(other.variables)))
        return vs, self.embed(vs), other.embed(vs)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        vs, a, b = self._aligned(other)
        out = dict(a)
        for exp, c in b.items():
            out[exp] = out.get(exp, 0) + c
        return Polynomial(vs, out).trim()

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        vs, a, b = self._aligned(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial(vs, out).trim()

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        a, b = self.trim(), other.trim()
        return a.variables == b.variables and a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            t = self.trim()
            self._hash = hash((t.variables, frozenset(t.terms.items())))
        return self._hash

    # inspection ------------------------------------------------------------

    def trim(self) -> "Polynomial":
        """Drop variables that no term uses."""
        used = [k for k in range(len(self.variables)) if any(e[k] for e in self.terms)]
        if len(used) == len(self.variables):
            return self
        vs = tuple(self.variables[k] for k in used)
        terms = {tuple(e[k] for k in used): c for e, c in self.terms.items()}
        return Polynomial(vs, terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def unknowns(self) -> frozenset[Variable]:
        t = self.trim()
        return frozenset(v for v in t.variables if v.is_unknown)

    @property
    def parameters(self) -> frozenset[Variable]:
        t = self.trim()
        return frozenset(v for v in t.variables if not v.is_unknown)

    def total_degree(self, among: Iterable[Variable] | None = None) -> int:
        """Max total degree; restricted to the variables in ``among`` if given."""
        if not self.terms:
            return 0
        if among is None:
            return max(sum(e) for e in self.terms)
        keep = set(among)
        idx = [k for k, v in enumerate(self.variables) if v in keep]
        return max(sum(e[k] for k in idx) for e in self.terms)

    def support(self, variables: Sequence[Variable]) -> set[tuple[int, ...]]:
        """Exponent vectors projected onto ``variables`` (others dropped).

        Coefficients that are polynomials in the dropped variables are
        collected first, so a monomial survives iff its collected coefficient
        is nonzero as a polynomial.
        """
        proj: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
        pos = {v: k for k, v in enumerate(self.variables)}
        keep_idx = [pos.get(v) for v in variables]
        kept = set(variables)
        rest_idx = [k for k, v in enumerate(self.variables) if v not in kept]
        for exp, c in self.terms.items():
            key = tuple(exp[k] if k is not None else 0 for k in keep_idx)
            rest = tuple(exp[k] for k in rest_idx)
            bucket = proj.setdefault(key, {})
            bucket[rest] = bucket.get(rest, 0) + c
        return {key for key, bucket in proj.items() if any(bucket.values())}

    # substitution and evaluation -------------------------------------------

    def substitute(self, values: Mapping[Variable, Number]) -> "Polynomial":
        """Exact partial evaluation at the given variables."""
        keep = [k for k, v in enumerate(self.variables) if v not in values]
        fixed = [(k, Fraction(values[v])) for k, v in enumerate(self.variables) if v in values]
        vs = tuple(self.variables[k] for k in keep)
        out: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.terms.items():
            val = c
            for k, x in fixed:
                if exp[k]:
                    val *= x ** exp[k]
            key = tuple(exp[k] for k in keep)
            out[key] = out.get(key, 0) + val
        return Polynomial(vs, out).trim()

    def evaluate(self, values: Mapping[Variable, Number]) -> Fraction:
        p = self.substitute(values)
        if p.variables:
            raise ValueError(f"no value for {', '.join(map(str, p.variables))}")
        return p.terms.get((), Fraction(0))

    def diff(self, v: Variable) -> "Polynomial":
        if v not in self.variables:
            return Polynomial.zero()
        k = self.variables.index(v)
        out = {}
        for exp, c in self.terms.items():
            if exp[k]:
                e = list(exp)
                e[k] -= 1
                out[tuple(e)] = c * exp[k]
        return Polynomial(self.variables, out).trim()

    def rename(self, mapping: Mapping[Variable, Variable]) -> "Polynomial":
        """Injective renaming of variables."""
        new = [mapping.get(v, v) for v in self.variables]
        if len(set(new)) != len(new):
            raise ValueError("renaming must be injective")
        order = sorted(range(len(new)), key=lambda k: new[k])
        vs = tuple(new[k] for k in order)
        return Polynomial(vs, {tuple(e[k] for k in order): c for e, c in self.terms.items()})

    def compile(self, variables: Sequence[Variable]) -> tuple[np.ndarray, np.ndarray]:
        """(exponents[terms, len(variables)], coefficients[terms]) for numeric evaluation.

        Every variable of the polynomial must appear in ``variables``.
        """
        t = self.trim()
        missing = set(t.variables) - set(variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} not in evaluation order")
        pos = [list(variables).index(v) for v in t.variables]
        emb = {}
        for exp, c in t.terms.items():
            full = [0] * len(variables)
            for p, e in zip(pos, exp):
                full[p] = e
            emb[tuple(full)] = c
        items = sorted(emb.items())
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), len(variables))
        coeffs = np.array([float(c) for _, c in items])
        return exps, coeffs

    # text form ---------------------------------------------------------------

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Polynomial({to_text(self)!r})"


def to_text(p: Polynomial) -> str:
    """Canonical text: ``coeff * x_i_j^e * c_k_l + ...``, terms in ascending exponent order."""
    t = p.trim()
    if not t.terms:
        return "0"
    parts = []
    for exp in sorted(t.terms):
        factors = [str(t.terms[exp])]
        for v, e in zip(t.variables, exp):
            if e == 1:
                factors.append(str(v))
            elif e > 1:
                factors.append(f"{v}^{e}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


def from_text(text: str) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial.zero()
    total = Polynomial.zero()
    for part in text.split(" + "):
        toks = [s.strip() for s in part.split("*")]
        term = Polynomial.constant(Fraction(toks[0]))
        for tok in toks[1:]:
            name, _, power = tok.partition("^")
            term = term * Polynomial.var(parse_variable(name)) ** (int(power) if power else 1)
        total = total + term
    return total
