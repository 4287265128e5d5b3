"""Finite extensional constraints, CSPs over them, and brute-force semantics.

Values are plain string tokens.  A domain is a tuple of tokens whose order is
the declaration order; every iteration in the package follows that order so
all outputs are deterministic.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Value = str
Domain = tuple[str, ...]
Tuple = tuple[str, ...]
VarSeq = tuple[str, ...]

TOKEN_RE = re.compile(r"^[^\s,{}()\[\]#=!|]+$")


def _check_token(kind: str, tok: str) -> None:
    if not isinstance(tok, str) or not TOKEN_RE.match(tok):
        raise ValueError(f"illegal {kind} token {tok!r}")


def _positions(names: Sequence[str], sub: Sequence[str]) -> list[int]:
    index = {v: i for i, v in enumerate(names)}
    try:
        return [index[v] for v in sub]
    except KeyError as exc:
        raise KeyError(f"unknown variable {exc.args[0]!r}") from None


def to_mask(domain: Sequence[str], values: Iterable[str]) -> int:
    """Bitset of `values` relative to the order of `domain`."""
    index = {v: i for i, v in enumerate(domain)}
    m = 0
    for v in values:
        m |= 1 << index[v]
    return m


def from_mask(domain: Sequence[str], mask: int) -> Domain:
    return tuple(v for i, v in enumerate(domain) if mask >> i & 1)


@dataclass(frozen=True)
class AtomicFormula:
    """``var = value``, ``var != value`` or ``var in {values}``."""

    var: str
    op: str
    payload: str | tuple[str, ...]

    def __post_init__(self):
        if self.op not in ("=", "!=", "in"):
            raise ValueError(f"unknown operator {self.op!r}")
        if self.op == "in":
            object.__setattr__(self, "payload", tuple(self.payload))
            if not self.payload:
                raise ValueError("membership atom with an empty set")

    def holds(self, value: str) -> bool:
        if self.op == "=":
            return value == self.payload
        if self.op == "!=":
            return value != self.payload
        return value in self.payload


@dataclass(frozen=True, eq=False)
class ConstraintTable:
    """A named relation given by its allowed tuples.

    Equality and hashing are structural (name excluded), so a permuted or
    restricted copy compares equal to the original when the relation is the
    same.
    """

    name: str
    vars: VarSeq
    domains: tuple[Domain, ...]
    tuples: tuple[Tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "domains", tuple(tuple(d) for d in self.domains))
        object.__setattr__(self, "tuples", tuple(tuple(t) for t in self.tuples))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"{self.name}: repeated variable")
        if len(self.domains) != len(self.vars):
            raise ValueError(f"{self.name}: one domain per variable required")
        for v in self.vars:
            _check_token("variable", v)
        for x, dom in zip(self.vars, self.domains):
            if len(set(dom)) != len(dom):
                raise ValueError(f"{self.name}: duplicate value in domain of {x}")
            for a in dom:
                _check_token("value", a)
        seen = set()
        for t in self.tuples:
            if len(t) != len(self.vars):
                raise ValueError(f"{self.name}: tuple {t} has wrong arity")
            for x, a, dom in zip(self.vars, t, self.domains):
                if a not in dom:
                    raise ValueError(f"{self.name}: value {a!r} not in domain of {x}")
            if t in seen:
                raise ValueError(f"{self.name}: duplicate tuple {t}")
            seen.add(t)

    @property
    def arity(self) -> int:
        return len(self.vars)

    def __len__(self) -> int:
        return len(self.tuples)

    def _key(self):
        return (self.vars, self.domains, frozenset(self.tuples))

    def __eq__(self, other):
        if not isinstance(other, ConstraintTable):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"ConstraintTable({self.name!r}, vars={self.vars}, |C|={len(self.tuples)})"

    def position(self, var: str) -> int:
        return _positions(self.vars, [var])[0]

    def domain(self, var: str) -> Domain:
        return self.domains[self.position(var)]

    def column(self, var: str) -> Domain:
        """Values of `var` that occur in some tuple, in domain order."""
        i = self.position(var)
        used = {t[i] for t in self.tuples}
        return tuple(a for a in self.domains[i] if a in used)

    @cached_property
    def value_index(self) -> tuple[dict[str, int], ...]:
        return tuple({a: k for k, a in enumerate(d)} for d in self.domains)

    @cached_property
    def encoded(self) -> np.ndarray:
        """Tuples as an ``(|C|, arity)`` array of domain indices."""
        arr = np.array(
            [[idx[a] for idx, a in zip(self.value_index, t)] for t in self.tuples],
            dtype=np.int64,
        )
        return arr.reshape(len(self.tuples), self.arity)

    @cached_property
    def column_masks(self) -> tuple[int, ...]:
        masks = [0] * self.arity
        for row in self.encoded:
            for i, k in enumerate(row):
                masks[i] |= 1 << int(k)
        return tuple(masks)

    def rename(self, name: str) -> ConstraintTable:
        return ConstraintTable(name, self.vars, self.domains, self.tuples)


def project(tuple_: Sequence[str], table_vars: Sequence[str], sub: Sequence[str]) -> Tuple:
    """Components of `tuple_` at the positions of `sub`, in `sub`'s order."""
    if len(tuple_) != len(table_vars):
        raise ValueError("tuple arity does not match the variable sequence")
    return tuple(tuple_[i] for i in _positions(table_vars, sub))


def _check_permutation(pi: Sequence[int], n: int) -> None:
    if sorted(pi) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(pi)} is not a permutation of 1..{n}")


def permute(table: ConstraintTable, pi: Sequence[int]) -> ConstraintTable:
    """The permuted relation: ``a in C^pi  iff  (a[pi(1)], ..., a[pi(n)]) in C``.

    `pi` is 1-based.  Position ``pi(i)`` of the result carries what position
    ``i`` of `table` carried, for variable names and domains alike.
    """
    n = table.arity
    _check_permutation(pi, n)
    inv = [0] * n
    for i, p in enumerate(pi):
        inv[p - 1] = i
    vars_ = tuple(table.vars[inv[j]] for j in range(n))
    doms = tuple(table.domains[inv[j]] for j in range(n))
    tuples = tuple(tuple(t[inv[j]] for j in range(n)) for t in table.tuples)
    return ConstraintTable(table.name, vars_, doms, tuples)


def compose_permutations(rho: Sequence[int], pi: Sequence[int]) -> tuple[int, ...]:
    """The permutation equivalent to applying `pi` first, then `rho`."""
    return tuple(rho[p - 1] for p in pi)


def restrict(table: ConstraintTable, new_domains: Sequence[Sequence[str]]) -> ConstraintTable:
    if len(new_domains) != table.arity:
        raise ValueError("one domain per variable required")
    doms = []
    for x, old, new in zip(table.vars, table.domains, new_domains):
        extra = [a for a in new if a not in old]
        if extra:
            raise ValueError(f"values {extra} are outside the domain of {x}")
        keep = set(new)
        doms.append(tuple(a for a in old if a in keep))
    sets = [set(d) for d in doms]
    tuples = tuple(t for t in table.tuples if all(a in s for a, s in zip(t, sets)))
    return ConstraintTable(table.name, table.vars, doms, tuples)


def is_based_on(c: ConstraintTable, e: ConstraintTable) -> bool:
    if c.arity != e.arity:
        raise ValueError("arity mismatch")
    for dc, de in zip(c.domains, e.domains):
        if not set(dc) <= set(de):
            return False
    return set(c.tuples) == set(restrict(e, c.domains).tuples)


def satisfies(tuple_: Sequence[str], vars_: Sequence[str], atom: AtomicFormula) -> bool:
    (i,) = _positions(vars_, [atom.var])
    return atom.holds(tuple_[i])


@dataclass(frozen=True)
class ConstraintInstance:
    """A base table used on CSP variables; ``binding[i]`` plays role ``i``."""

    base: ConstraintTable
    binding: VarSeq

    def __post_init__(self):
        object.__setattr__(self, "binding", tuple(self.binding))
        if len(self.binding) != self.base.arity:
            raise ValueError(
                f"{self.base.name}: binding of {len(self.binding)} variables "
                f"for arity {self.base.arity}"
            )
        if len(set(self.binding)) != len(self.binding):
            raise ValueError(f"{self.base.name}: a variable is bound twice")

    def role_of(self, csp_var: str) -> str:
        return self.base.vars[self.binding.index(csp_var)]

    def __str__(self):
        return f"{self.base.name}({','.join(self.binding)})"


@dataclass(frozen=True)
class Csp:
    """Variables with declared (universe) and current domains plus instances.

    `universe` fixes the value order of each variable; `domains` are the
    current domains, always subsets of the universe in universe order.
    """

    vars: VarSeq
    universe: tuple[Domain, ...]
    instances: tuple[ConstraintInstance, ...] = ()
    domains: tuple[Domain, ...] | None = None
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "universe", tuple(tuple(d) for d in self.universe))
        object.__setattr__(self, "instances", tuple(self.instances))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("repeated CSP variable")
        if len(self.universe) != len(self.vars):
            raise ValueError("one domain per variable required")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vars)})
        if self.domains is None:
            object.__setattr__(self, "domains", self.universe)
        else:
            doms = []
            for x, uni, cur in zip(self.vars, self.universe, self.domains):
                keep = set(cur)
                if not keep <= set(uni):
                    raise ValueError(f"current domain of {x} leaves its universe")
                doms.append(tuple(a for a in uni if a in keep))
            object.__setattr__(self, "domains", tuple(doms))
        for inst in self.instances:
            for role, v in enumerate(inst.binding):
                if v not in self._index:
                    raise ValueError(f"{inst}: unknown variable {v!r}")
                base_dom = set(inst.base.domains[role])
                extra = [a for a in self.universe[self._index[v]] if a not in base_dom]
                if extra:
                    raise ValueError(
                        f"{inst}: values {extra} of {v} are outside the base domain "
                        f"of role {inst.base.vars[role]}"
                    )

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r}") from None

    def domain(self, var: str) -> Domain:
        return self.domains[self.index(var)]

    @property
    def failed(self) -> bool:
        return any(len(d) == 0 for d in self.domains)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(u, d) for u, d in zip(self.universe, self.domains))

    def with_domains(self, domains: Sequence[Sequence[str]]) -> Csp:
        return Csp(self.vars, self.universe, self.instances, tuple(tuple(d) for d in domains))

    def with_masks(self, masks: Sequence[int]) -> Csp:
        return self.with_domains([from_mask(u, m) for u, m in zip(self.universe, masks)])

    def restrict(self, **domains: Sequence[str]) -> Csp:
        """Copy with the named current domains replaced."""
        doms = list(self.domains)
        for name, vals in domains.items():
            doms[self.index(name)] = tuple(vals)
        return self.with_domains(doms)

    def instance_relation(self, inst: ConstraintInstance) -> list[Tuple]:
        """Base tuples that survive the current domains of the bound variables."""
        sets = [set(self.domains[self.index(v)]) for v in inst.binding]
        return [t for t in inst.base.tuples if all(a in s for a, s in zip(t, sets))]

    def domain_map(self) -> dict[str, Domain]:
        return dict(zip(self.vars, self.domains))


def _instance_checks(csp: Csp):
    checks = []
    for inst in csp.instances:
        pos = [csp.index(v) for v in inst.binding]
        checks.append((pos, set(inst.base.tuples)))
    return checks


def iter_solutions(csp: Csp) -> Iterator[Tuple]:
    """Brute force: every point of the product of current domains, filtered."""
    checks = _instance_checks(csp)
    for point in itertools.product(*csp.domains):
        if all(tuple(point[i] for i in pos) in allowed for pos, allowed in checks):
            yield point


def solutions(csp: Csp) -> list[Tuple]:
    return list(iter_solutions(csp))


def search_space(csp: Csp) -> int:
    n = 1
    for d in csp.domains:
        n *= len(d)
    return n


def csp_equivalent(p1: Csp, p2: Csp) -> bool:
    if p1.vars != p2.vars:
        raise ValueError("CSPs are over different variable sequences")
    return set(solutions(p1)) == set(solutions(p2))


def materialize(csp: Csp, interface: Sequence[str], name: str) -> ConstraintTable:
    """Explicit table of the solutions of `csp` projected on `interface`."""
    interface = tuple(interface)
    if not interface:
        raise ValueError("empty interface")
    pos = [csp.index(v) for v in interface]
    seen: dict[Tuple, None] = {}
    for s in iter_solutions(csp):
        seen.setdefault(tuple(s[i] for i in pos), None)
    doms = tuple(csp.universe[i] for i in pos)
    return ConstraintTable(name, interface, doms, tuple(seen))


def single_instance_csp(table: ConstraintTable, domains: Sequence[Sequence[str]] | None = None) -> Csp:
    """The CSP with one identity-bound instance of `table`."""
    csp = Csp(table.vars, table.domains, (ConstraintInstance(table, table.vars),))
    return csp if domains is None else csp.with_domains(domains)
