"""Built-in tables, CSP fixtures and reference rule counts.

Every table has a programmatic definition here and a rendered copy under
``data/corpus``; `load` reads the shipped files, and the test suite checks
they agree with the definitions.  Fixtures live under ``data/fixtures``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

from ..model import ConstraintInstance, ConstraintTable, Csp, materialize
from ..rules import Rule, RuleSet, format_rule

DESK = "desk"
BENCH = "bench"

# where a table's rows come from
PRINTED = "printed"          # rows given verbatim in the source material
DERIVED = "derived"          # defined by an operator named in the source material
EXTERNAL = "external"        # not printed; reconstructed from its standard definition
COMPOSED = "composed"        # materialized from a CSP


@dataclass(frozen=True)
class Expected:
    equality: int | None
    membership: int | None


@dataclass
class CorpusEntry:
    name: str
    table: ConstraintTable
    provenance: str
    expected: Expected | None = None
    tier: str = DESK
    note: str = ""
    fixtures: tuple[str, ...] = field(default_factory=tuple)


# -- definitions ---------------------------------------------------------------

BOOL = ("0", "1")
WALTZ = ("+", "-", "l", "r")
ALLEN = ("b", "d", "o", "m", "s", "f", "b-", "d-", "o-", "m-", "s-", "f-", "e")


def _binary(name: str, values, op) -> ConstraintTable:
    values = tuple(values)
    return ConstraintTable(name, ("x", "y", "z"), (values,) * 3,
                           tuple((a, b, op(a, b)) for a in values for b in values))


def and_table() -> ConstraintTable:
    return _binary("and", BOOL, lambda a, b: str(int(a) & int(b)))


def or_table() -> ConstraintTable:
    return _binary("or", BOOL, lambda a, b: str(int(a) | int(b)))


def xor_table() -> ConstraintTable:
    return _binary("xor", BOOL, lambda a, b: str(int(a) ^ int(b)))


def not_table(k: int = 2) -> ConstraintTable:
    """Complement on the digits ``0 .. k-1``: ``i`` maps to ``k-1-i``."""
    vals = tuple(str(i) for i in range(k))
    name = "not" if k == 2 else f"not{k}"
    return ConstraintTable(name, ("x", "y"), (vals, vals), tuple((vals[i], vals[k - 1 - i]) for i in range(k)))


def and3_table() -> ConstraintTable:
    """Strong Kleene conjunction; ``u`` is the unknown value."""
    rank = {"0": 0, "u": 1, "1": 2}
    return _binary("and3", ("0", "1", "u"), lambda a, b: min(a, b, key=rank.__getitem__))


def lattice_and_table(name: str, sides: tuple[int, ...]) -> ConstraintTable:
    """Meet on a product of chains; a value is the string of its coordinates."""
    vals = tuple("".join(map(str, p)) for p in itertools.product(*(range(s) for s in sides)))
    return _binary(name, vals, lambda a, b: "".join(min(p, q) for p, q in zip(a, b)))


def and6_table() -> ConstraintTable:
    vals = ("0", "1", "d", "dnot", "e", "enot")
    # row: first argument; columns follow `vals`; None marks a missing entry
    rows = {
        "0": ("0", "0", None, None, "0", "0"),
        "1": ("0", "1", "d", "dnot", "e", "enot"),
        "d": (None, "d", None, None, "d", None),
        "dnot": (None, "dnot", None, None, None, "dnot"),
        "e": ("0", "e", "d", None, "e", "0"),
        "enot": ("0", "enot", None, "dnot", "0", "enot"),
    }
    tuples = tuple((a, b, rows[a][j]) for a in vals for j, b in enumerate(vals) if rows[a][j] is not None)
    return ConstraintTable("and6", ("x", "y", "z"), (vals,) * 3, tuples)


def equiv_table() -> ConstraintTable:
    def eq(a, b):
        if "u" in (a, b):
            return "u"
        return "t" if a == b else "f"
    return _binary("equiv", ("t", "f", "u"), eq)


def msign_table() -> ConstraintTable:
    """Sign of a product: ``z`` is the sign of ``x * y``; ``unk`` is unknown."""
    def sign(a, b):
        if "zero" in (a, b):
            return "zero"
        if "unk" in (a, b):
            return "unk"
        return "pos" if a == b else "neg"
    return _binary("msign", ("neg", "pos", "zero", "unk"), sign)


def fork_table() -> ConstraintTable:
    rows = ("+++", "---", "lr-", "-lr", "r-l")
    return ConstraintTable("fork", ("x", "y", "z"), (WALTZ,) * 3, tuple(tuple(r) for r in rows))


def t_table() -> ConstraintTable:
    return ConstraintTable("t", ("x", "y", "z"), (WALTZ,) * 3, tuple(("r", "l", z) for z in ("+", "-", "r", "l")))


def line_table() -> ConstraintTable:
    return ConstraintTable("line", ("x", "y"), (WALTZ,) * 2, (("+", "+"), ("-", "-"), ("l", "r"), ("r", "l")))


def l_table() -> ConstraintTable:
    """L junction, edges in clockwise order."""
    rows = (("r", "l"), ("l", "r"), ("l", "+"), ("+", "r"), ("r", "-"), ("-", "l"))
    return ConstraintTable("l", ("x", "y"), (WALTZ,) * 2, rows)


def arrow_table() -> ConstraintTable:
    """Arrow junction: the two barbs, then the shaft."""
    rows = (("l", "r", "+"), ("-", "-", "+"), ("+", "+", "-"))
    return ConstraintTable("arrow", ("x", "y", "z"), (WALTZ,) * 3, rows)


def _interval_relation(a, b) -> str:
    (a1, a2), (b1, b2) = a, b
    if a2 < b1:
        return "b"
    if b2 < a1:
        return "b-"
    if a2 == b1:
        return "m"
    if b2 == a1:
        return "m-"
    if (a1, a2) == (b1, b2):
        return "e"
    if a1 == b1:
        return "s" if a2 < b2 else "s-"
    if a2 == b2:
        return "f" if a1 > b1 else "f-"
    if b1 < a1 and a2 < b2:
        return "d"
    if a1 < b1 and b2 < a2:
        return "d-"
    return "o" if a1 < b1 else "o-"


def allen_table() -> ConstraintTable:
    """Composition of interval relations, computed from endpoint orderings.

    Six endpoints on integer positions ``0..5`` realize every consistent
    configuration of three intervals, so the triples seen there are the
    whole composition table.
    """
    ivs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    seen = set()
    for a, b, c in itertools.product(ivs, repeat=3):
        seen.add((_interval_relation(a, b), _interval_relation(b, c), _interval_relation(a, c)))
    rank = {r: i for i, r in enumerate(ALLEN)}
    rows = tuple(sorted(seen, key=lambda t: tuple(rank[v] for v in t)))
    return ConstraintTable("allen", ("r1", "r2", "r3"), (ALLEN,) * 3, rows)


def b10m_table() -> ConstraintTable:
    """``x * y = z + 10 * c`` over digits."""
    d = tuple(str(i) for i in range(10))
    rows = tuple((str(x), str(y), str(x * y // 10), str(x * y % 10)) for x in range(10) for y in range(10))
    return ConstraintTable("b10m", ("x", "y", "c", "z"), (d,) * 4, rows)


def nonarc_table() -> ConstraintTable:
    d = ("0", "1", "2")
    return ConstraintTable("nonarc", ("x", "y"), (d, d), (("0", "1"), ("1", "0"), ("2", "2")))


def adder_circuit() -> Csp:
    """Two half adders and an or gate; outputs are carry ``o1`` and sum ``o2``."""
    AND, XOR, OR = and_table(), xor_table(), or_table()
    names = ("i1", "i2", "i3", "o1", "o2", "a1", "a2", "x1")
    I = ConstraintInstance
    return Csp(names, (BOOL,) * len(names), (
        I(XOR, ("i1", "i2", "x1")),
        I(AND, ("i1", "i2", "a1")),
        I(XOR, ("x1", "i3", "o2")),
        I(AND, ("i3", "x1", "a2")),
        I(OR, ("a1", "a2", "o1")),
    ))


def full_adder_table() -> ConstraintTable:
    return materialize(adder_circuit(), ("i1", "i2", "i3", "o1", "o2"), "full_adder")


PUZZLE_ROOMS = ("den", "dining", "living")
PUZZLE_ITEMS = ("book", "frame", "rug")
PUZZLE_PEOPLE = ("B", "D", "F")


def puzzle_table() -> ConstraintTable:
    """The universal constraint over the six room and item variables."""
    vars_ = tuple(f"room_{p}" for p in PUZZLE_PEOPLE) + tuple(f"item_{p}" for p in PUZZLE_PEOPLE)
    doms = (PUZZLE_ROOMS,) * 3 + (PUZZLE_ITEMS,) * 3
    return ConstraintTable("puzzle", vars_, doms, tuple(itertools.product(*doms)))


def _all_different_grouped(vars_, domain) -> list[Rule]:
    return [
        Rule.equality({x: a}, *((y, a) for y in vars_ if y != x))
        for x in vars_ for a in domain
    ]


def puzzle_rules() -> list[tuple[str, list[Rule]]]:
    """The clue rules, in named groups (grouped by premise within a group)."""
    rooms = [f"room_{p}" for p in PUZZLE_PEOPLE]
    items = [f"item_{p}" for p in PUZZLE_PEOPLE]
    clue1 = [Rule.equality({}, ("item_B", "book")), Rule.equality({}, ("room_B", "den"))]
    for p in PUZZLE_PEOPLE:
        clue1.append(Rule.equality({f"item_{p}": "book"}, (f"room_{p}", "den")))
        clue1.append(Rule.equality({f"room_{p}": "den"}, (f"item_{p}", "book")))
    clue2 = []
    for p in PUZZLE_PEOPLE:
        clue2.append(Rule.equality({f"item_{p}": "rug"}, (f"room_{p}", "den"), (f"room_{p}", "living")))
        clue2.append(Rule.equality({f"room_{p}": "dining"}, (f"item_{p}", "book"), (f"item_{p}", "frame")))
    clue3 = [Rule.equality({}, ("item_F", "rug")), Rule.equality({}, ("item_F", "book"))]
    return [
        ("all different rooms", _all_different_grouped(rooms, PUZZLE_ROOMS)),
        ("all different items", _all_different_grouped(items, PUZZLE_ITEMS)),
        ("clue 1: Byron, the book's owner and the den's occupant are three people", clue1),
        ("clue 2: the rug is in the dining room", clue2),
        ("clue 3: Felicia selected the frame", clue3),
    ]


def puzzle_rules_text() -> str:
    lines = ["rules puzzle equality"]
    for title, rules in puzzle_rules():
        lines.append(f"# {title}")
        lines += [format_rule(r) for r in rules]
    return "\n".join(lines) + "\n"


def puzzle_solution() -> dict[str, str]:
    return {
        "child1": "Byron", "child2": "Denise", "child3": "Felicia",
        "room_B": "dining", "room_D": "living", "room_F": "den",
        "item_B": "rug", "item_D": "book", "item_F": "frame",
    }


# name -> (builder, provenance, expected counts, tier, note)
_DEFS: dict[str, tuple[Callable[[], ConstraintTable], str, Expected | None, str, str]] = {
    "fork": (fork_table, PRINTED, Expected(12, 24), DESK, ""),
    "t": (t_table, PRINTED, Expected(1, 1), DESK, ""),
    "not": (lambda: not_table(2), DERIVED, Expected(4, 4), DESK, ""),
    "not3": (lambda: not_table(3), DERIVED, Expected(6, 6), DESK, ""),
    "not4": (lambda: not_table(4), DERIVED, Expected(8, 8), DESK, ""),
    "not6": (lambda: not_table(6), DERIVED, Expected(12, 12), DESK, ""),
    "not8": (lambda: not_table(8), DERIVED, Expected(16, 16), DESK, ""),
    "not9": (lambda: not_table(9), DERIVED, Expected(18, 18), DESK, ""),
    "and": (and_table, PRINTED, Expected(6, 6), DESK, ""),
    "and3": (and3_table, PRINTED, Expected(16, 18), DESK, "strong Kleene conjunction"),
    "and4": (lambda: lattice_and_table("and4", (2, 2)), DERIVED, Expected(26, 43), DESK,
             "meet on the 2x2 product lattice"),
    "and6": (and6_table, PRINTED, Expected(41, 155), DESK, "missing entries contribute no row"),
    "and8": (lambda: lattice_and_table("and8", (2, 2, 2)), DERIVED, Expected(96, 622), BENCH,
             "meet on the 2x2x2 product lattice"),
    "and9": (lambda: lattice_and_table("and9", (3, 3)), DERIVED, Expected(134, 1294), BENCH,
             "meet on the 3x3 product lattice"),
    "msign": (msign_table, DERIVED, Expected(34, 54), DESK, ""),
    "full_adder": (full_adder_table, COMPOSED, Expected(52, 52), DESK, "materialized from the adder circuit"),
    "equiv": (equiv_table, PRINTED, Expected(20, 26), DESK, ""),
    "b10m": (b10m_table, DERIVED, Expected(362, None), BENCH, "x * y = z + 10 * c"),
    "allen": (allen_table, EXTERNAL, Expected(498, None), BENCH, "computed from interval endpoints"),
    "or": (or_table, DERIVED, None, DESK, ""),
    "xor": (xor_table, DERIVED, None, DESK, ""),
    "line": (line_table, PRINTED, None, DESK, ""),
    "l": (l_table, EXTERNAL, None, DESK, "L junction"),
    "arrow": (arrow_table, EXTERNAL, None, DESK, "arrow junction"),
    "nonarc": (nonarc_table, PRINTED, None, DESK, ""),
    "puzzle": (puzzle_table, DERIVED, None, DESK, "universal constraint"),
}

ALIASES = {"fulladder": "full_adder", "not_2": "not"}
ALIASES.update({f"not_{k}": f"not{k}" for k in (3, 4, 6, 8, 9)})
ALIASES.update({f"and_{k}": f"and{k}" for k in (3, 4, 6, 8, 9)})

# rows of the rule-count table, in display order
COUNT_TABLE = (
    "fork", "t", "not", "not3", "not4", "not6", "not8", "not9",
    "and", "and3", "and4", "and6", "and8", "and9",
    "msign", "full_adder", "b10m", "allen", "equiv",
)

# fixture -> tables it uses
FIXTURES = {
    "nonarc": ("nonarc",),
    "puzzle": ("puzzle",),
    "and3_query": ("and3",),
    "full_adder_query": ("full_adder",),
    "add_query": ("and", "or", "xor"),
    "adder": ("and", "or", "xor"),
    "allen_query": ("allen",),
    "allen_query_osd": ("allen",),
    "impossible": ("arrow", "fork", "l", "line"),
}


def canonical_name(name: str) -> str:
    return ALIASES.get(name, name)


def names() -> list[str]:
    return list(_DEFS)


def build_table(name: str) -> ConstraintTable:
    """Construct a table from its definition (no file access)."""
    name = canonical_name(name)
    if name not in _DEFS:
        raise KeyError(f"unknown corpus table {name!r}")
    return _DEFS[name][0]()


def data_root() -> Path:
    return Path(str(resources.files(__package__) / "data"))


@lru_cache(maxsize=None)
def load_table(name: str) -> ConstraintTable:
    from ..formats import read_table

    name = canonical_name(name)
    if name not in _DEFS:
        raise KeyError(f"unknown corpus table {name!r}")
    return read_table(data_root() / "corpus" / f"{name}.ct")


def load(name: str) -> CorpusEntry:
    name = canonical_name(name)
    if name not in _DEFS:
        raise KeyError(f"unknown corpus entry {name!r}")
    _, prov, expected, tier, note = _DEFS[name]
    fixtures = tuple(f for f, used in FIXTURES.items() if name in used)
    return CorpusEntry(name, load_table(name), prov, expected, tier, note, fixtures)


def resolve(name: str) -> ConstraintTable:
    """Table lookup used by CSP files that name corpus tables."""
    try:
        return load_table(name)
    except KeyError:
        raise KeyError(name) from None


def fixture_path(name: str) -> Path:
    return data_root() / "fixtures" / f"{name}.csp"


def load_fixture(name: str):
    from ..formats import read_csp

    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}")
    return read_csp(fixture_path(name), resolve)


def load_rules(path: Path | str, tables: dict[str, ConstraintTable] | None = None) -> RuleSet:
    from ..rules import parse_rules

    text = Path(path).read_text()
    header = next(l.split() for l in text.splitlines() if l.split("#", 1)[0].strip())
    pool = dict(tables or {})
    if len(header) >= 2 and header[1] not in pool:
        try:
            pool[header[1]] = load_table(header[1])
        except KeyError:
            pass
    return parse_rules(text, tables=pool)


# -- fixture texts ---------------------------------------------------------------

def _impossible_scene() -> str:
    junctions = [
        ("arrow", "AF AB AI"), ("l", "BC BA"), ("arrow", "CB CD CG"), ("l", "DE DC"),
        ("arrow", "ED EG EF"), ("l", "FA FE"), ("fork", "GH GC GE"), ("arrow", "HG HI HJ"),
        ("fork", "IA IJ IH"), ("l", "JH JI"),
    ]
    lines_ = ["AF FA", "AB BA", "AI IA", "IJ JI", "IH HI", "JH HJ", "GH HG",
              "FE EF", "GE EG", "GC CG", "DC CD", "ED DE", "BC CB"]
    first = "AF AI AB IJ IH JH GH GC GE EF ED CD CB".split()
    second = "FA IA BA JI HI HJ HG CG EG FE DE DC BC".split()
    out = ["# impossible polyhedral scene: ten junctions joined by thirteen edges",
           "# each edge has one variable per end; `line` ties the two ends together"]
    out += [f"var {v} " + " ".join(WALTZ) for v in first + second]
    out += [f"use {t}({','.join(vs.split())})" for t, vs in junctions]
    out += [f"use line({','.join(p.split())})" for p in lines_]
    return "\n".join(out) + "\n"


def fixture_texts() -> dict[str, str]:
    sol = puzzle_solution()
    puzzle = ["# logic puzzle: three children, their rooms and their items", "rules puzzle.rules"]
    for k in (1, 2, 3):
        puzzle.append(f"var child{k} {sol[f'child{k}']}")
    for p in PUZZLE_PEOPLE:
        puzzle.append(f"var room_{p} " + " ".join(PUZZLE_ROOMS))
    for p in PUZZLE_PEOPLE:
        puzzle.append(f"var item_{p} " + " ".join(PUZZLE_ITEMS))
    puzzle.append("use puzzle(room_B,room_D,room_F,item_B,item_D,item_F)")
    return {
        "nonarc": "# restriction of a base table that is rule consistent but not arc consistent\n"
                  "var x 0 1\nvar y 0 1 2\nuse nonarc(x,y)\n",
        "puzzle": "\n".join(puzzle) + "\n",
        "and3_query": "# two three-valued conjunctions sharing their output\n"
                      "var X 0 1\nvar Y 0 1\nvar Z 1 u\nvar T 0 1 u\nvar U 0 1 u\n"
                      "use and3(X,Y,Z)\nuse and3(T,U,Z)\n",
        "full_adder_query": "# first input 1, sum 0\n"
                            "var I1 1\nvar X 0 1\nvar Y 0 1\nvar Z 0 1\nvar O2 0\n"
                            "use full_adder(I1,X,Y,Z,O2)\n",
        "add_query": "# the same query on the gate-level circuit\n"
                     "var I1 1\nvar X 0 1\nvar Y 0 1\nvar Z 0 1\nvar O2 0\n"
                     "var A1 0 1\nvar A2 0 1\nvar X1 0 1\n"
                     "use xor(I1,X,X1)\nuse and(I1,X,A1)\nuse xor(X1,Y,O2)\n"
                     "use and(Y,X1,A2)\nuse or(A1,A2,Z)\n",
        "adder": "# gate-level full adder, unrestricted\n"
                 + "".join(f"var {v} 0 1\n" for v in ("i1", "i2", "i3", "o1", "o2", "a1", "a2", "x1"))
                 + "use xor(i1,i2,x1)\nuse and(i1,i2,a1)\nuse xor(x1,i3,o2)\n"
                   "use and(i3,x1,a2)\nuse or(a1,a2,o1)\n",
        "allen_query": "# light (L), switch (S), John (J): R1 relates L to S, R2 relates S to J\n"
                       "var R1 o- m-\nvar R2 b m b- m-\nvar R3 " + " ".join(ALLEN) + "\n"
                       "use allen(R1,R2,R3)\n",
        "allen_query_osd": "# as allen_query, with L overlapping, starting or during J\n"
                           "var R1 o- m-\nvar R2 b m b- m-\nvar R3 o s d\nuse allen(R1,R2,R3)\n",
        "impossible": _impossible_scene(),
    }


def write_data(root: Path | None = None) -> None:
    """Render every table, fixture and the puzzle rules below `root`."""
    from ..formats import format_table

    root = root or data_root()
    (root / "corpus").mkdir(parents=True, exist_ok=True)
    (root / "fixtures").mkdir(parents=True, exist_ok=True)
    for name in _DEFS:
        (root / "corpus" / f"{name}.ct").write_text(format_table(build_table(name)))
    for name, text in fixture_texts().items():
        (root / "fixtures" / f"{name}.csp").write_text(text)
    (root / "fixtures" / "puzzle.rules").write_text(puzzle_rules_text())


__all__ = [
    "CorpusEntry", "Expected", "load", "load_table", "load_fixture", "load_rules", "build_table",
    "names", "resolve", "fixture_path", "data_root", "write_data", "COUNT_TABLE", "FIXTURES",
    "puzzle_rules", "puzzle_solution", "adder_circuit",
]
