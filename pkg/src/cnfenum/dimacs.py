"""DIMACS CNF and model-stream text formats.

Projection is declared with a ``c p show v1 v2 ... 0`` comment listing the
important variables; every variable is named by a ``c var <id> atom <name>``
or ``c var <id> label <pos|neg> <node>`` comment.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence

from cnfenum.formula import FormulaStore
from cnfenum.transform import CnfEncoding, Encoding


class DimacsError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def write_dimacs(cnf: CnfEncoding) -> str:
    out = []
    if cnf.encoding is not None:
        out.append(f"c encoding {cnf.encoding.value}")
    for v in range(1, cnf.num_vars + 1):
        if v in cnf.var_names:
            out.append(f"c var {v} {cnf.var_names[v]}")
    out.append("c p show " + " ".join(map(str, cnf.important)) + (" 0" if cnf.important else "0"))
    out.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    out.extend(" ".join(map(str, c)) + (" 0" if c else "0") for c in cnf.clauses)
    return "\n".join(out) + "\n"


def read_dimacs(text: str, store: FormulaStore | None = None) -> CnfEncoding:
    """Parse DIMACS CNF, honouring the projection and naming comments.

    Without a ``c p show`` line every variable is important.  Important
    variables become atoms of ``store`` (a fresh one by default), named after
    their ``c var`` comment or ``x<id>``.
    """
    store = store or FormulaStore()
    header = None
    show: list[int] | None = None
    names: dict[int, str] = {}
    encoding = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "%":
            continue
        if line.startswith("c"):
            parts = line.split()
            if parts[1:3] == ["p", "show"]:
                try:
                    vals = [int(x) for x in parts[3:]]
                except ValueError:
                    raise DimacsError("bad projection line", lineno) from None
                if not vals or vals[-1] != 0:
                    raise DimacsError("projection line must end with 0", lineno)
                show = (show or []) + vals[:-1]
            elif parts[1:2] == ["var"] and len(parts) >= 4 and parts[2].isdigit():
                names[int(parts[2])] = " ".join(parts[3:])
            elif parts[1:2] == ["encoding"] and len(parts) == 3:
                try:
                    encoding = Encoding(parts[2])
                except ValueError:
                    pass
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf" or not parts[2].isdigit() or not parts[3].isdigit():
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing problem line", 0)
    if current:
        clauses.append(tuple(current))
    n_vars, n_clauses = header
    if len(clauses) != n_clauses:
        raise DimacsError(f"expected {n_clauses} clauses, found {len(clauses)}", 0)
    important = tuple(sorted(set(show))) if show is not None else tuple(range(1, n_vars + 1))
    for v in important:
        if not 1 <= v <= n_vars:
            raise DimacsError(f"projected variable {v} out of range", 0)
    atom_var = {}
    for v in important:
        label = names.get(v, "")
        name = label.split(" ", 1)[1] if label.startswith("atom ") else f"x{v}"
        atom_var[store.atom(name)] = v
    return CnfEncoding(
        encoding=encoding,
        num_vars=n_vars,
        clauses=clauses,
        important=important,
        atom_var=atom_var,
        var_names=names,
        store=store,
    )


def format_cube(cube: Iterable[int]) -> str:
    lits = " ".join(map(str, cube))
    return f"{lits} 0" if lits else "0"


def parse_models(text: str) -> list[tuple[int, ...]]:
    """Read model lines (``<lit> ... 0``); comment, JSON and blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("c", "{", "#")):
            continue
        try:
            lits = [int(x) for x in line.split()]
        except ValueError:
            raise DimacsError(f"bad model line {line!r}", lineno) from None
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise DimacsError("model line must end with a single 0", lineno)
        out.append(tuple(lits[:-1]))
    return out


def cubes_to_assignments(cubes: Sequence[Sequence[int]], atom_of_var: dict[int, int]) -> list[dict[int, bool]]:
    out = []
    for cube in cubes:
        mu = {}
        for lit in cube:
            if abs(lit) not in atom_of_var:
                raise KeyError(f"variable {abs(lit)} is not an important atom")
            mu[atom_of_var[abs(lit)]] = lit > 0
        out.append(mu)
    return out
