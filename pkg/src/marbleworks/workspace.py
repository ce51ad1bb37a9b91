"""Loading and saving of morphisms, machines, series, and probes as JSON.

A workspace file holds named objects:

    {"morphisms": {"mu": {"elements": [...], "identity": "1",
                          "table": [[...]], "letters": {"a": "-1"}}},
     "machines":  {"m": {"kind": "marble", "k": 2, "morphism": "mu",
                         "selector": [[[...]]], "externals": [...]}},
     "series":    {"s": {"op": "hadamard", "args": [...]}},
     "probes":    {"p": {"alpha": "", "alpha_parts": ["b", "b"],
                         "us": ["a"], "beta": "", "omega": 1}}}

Output tables are indexed ``[element][letter][element]`` with elements in
``elements`` order and letters in the key order of ``letters``; level-1
machines carry ``lambda`` instead of ``selector``/``externals``.  Machines
of pebble kind index the letter axis of nested levels over the doubled
alphabet (plain letters first, then their marked copies).  Morphisms whose
letter images do not generate the whole monoid are restricted to the
generated submonoid; tables written against the original element order are
reindexed on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra import FiniteMonoid, Morphism, mark
from .decide import RepetitivenessProbe
from .errors import ValidationError
from .machines import Bimachine, NestedMachine, level1, nested
from .series import Cauchy, Hadamard, Reg, Star, Sum


@dataclass
class LoadedMorphism:
    morphism: Morphism
    original_names: tuple[str, ...]  # element order used by machine tables

    def element_index(self, where: str):
        """Maps an index in the original element order to the (possibly
        restricted) monoid, rejecting elements that were dropped."""
        name_to_new = {n: i for i, n in enumerate(self.morphism.monoid.names)}
        out = []
        for name in self.original_names:
            out.append(name_to_new.get(name))
        return out


@dataclass
class Workspace:
    morphisms: dict[str, LoadedMorphism] = field(default_factory=dict)
    machines: dict[str, NestedMachine] = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    probes: dict[str, RepetitivenessProbe] = field(default_factory=dict)


def _need(doc, key, where, kind=None):
    if key not in doc:
        raise ValidationError(where, f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ValidationError(f"{where}.{key}", f"expected {kind.__name__}")
    return value


def load_morphism(doc, where="morphism") -> LoadedMorphism:
    elements = _need(doc, "elements", where, list)
    if len(set(elements)) != len(elements):
        raise ValidationError(f"{where}.elements", "duplicate element names")
    index = {name: i for i, name in enumerate(elements)}

    def elem(name, at):
        if name not in index:
            raise ValidationError(at, f"unknown element {name!r}")
        return index[name]

    identity = elem(_need(doc, "identity", where, str), f"{where}.identity")
    rows = _need(doc, "table", where, list)
    if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
        raise ValidationError(f"{where}.table", "table must be square over the elements")
    table = tuple(
        tuple(elem(v, f"{where}.table[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(rows)
    )
    monoid = FiniteMonoid.validate(table, identity, tuple(elements))
    letters = _need(doc, "letters", where, dict)
    if not letters:
        raise ValidationError(f"{where}.letters", "empty alphabet")
    images = {
        a: elem(name, f"{where}.letters.{a}") for a, name in letters.items()
    }
    morphism = Morphism(tuple(letters), monoid, images)
    restricted, _ = morphism.restrict_to_image()
    return LoadedMorphism(restricted, tuple(elements))


def _resolve_morphism(doc, where, workspace: Workspace | None) -> LoadedMorphism:
    ref = _need(doc, "morphism", where)
    if isinstance(ref, str):
        if workspace is None or ref not in workspace.morphisms:
            raise ValidationError(f"{where}.morphism", f"unknown morphism {ref!r}")
        return workspace.morphisms[ref]
    return load_morphism(ref, f"{where}.morphism")


def _load_table(rows, loaded: LoadedMorphism, alphabet, where, entry):
    """Reindex a [element][letter][element] array onto the restricted monoid."""
    new_to_old_name = loaded.morphism.monoid.names
    old_index = {n: i for i, n in enumerate(loaded.original_names)}
    n = loaded.morphism.monoid.size
    if len(rows) != len(loaded.original_names):
        raise ValidationError(where, "first axis must cover the declared elements")
    out = []
    for m in range(n):
        old_m = old_index[new_to_old_name[m]]
        row = rows[old_m]
        if len(row) != len(alphabet):
            raise ValidationError(f"{where}[{old_m}]", f"need {len(alphabet)} letter rows")
        cells = []
        for ai in range(len(alphabet)):
            cell = row[ai]
            if len(cell) != len(loaded.original_names):
                raise ValidationError(f"{where}[{old_m}][{ai}]", "bad inner arity")
            cells.append(
                tuple(entry(cell[old_index[new_to_old_name[m2]]]) for m2 in range(n))
            )
        out.append(tuple(cells))
    return tuple(out)


def load_machine(doc, where="machine", workspace: Workspace | None = None) -> NestedMachine:
    kind = _need(doc, "kind", where, str)
    level = _need(doc, "k", where, int)
    loaded = _resolve_morphism(doc, where, workspace)
    mu = loaded.morphism
    if kind == "pebble":
        mu = mu.extend_marked()
        loaded = LoadedMorphism(mu, loaded.original_names)
    return _load_level(doc, where, loaded, kind, level, top=True)


def _load_level(doc, where, loaded, kind, level, top=False):
    mu = loaded.morphism
    alphabet = mu.alphabet
    if kind == "pebble" and top and level >= 2:
        # top level never sees a mark; accept tables over the plain letters
        alphabet = tuple(a for a in mu.alphabet if not a.startswith("^"))
    if level == 1:
        rows = _need(doc, "lambda", where, list)
        lam = _load_table(rows, loaded, _level1_alphabet(mu, kind, top), where + ".lambda", int)
        lam = _pad_letters(lam, mu, kind, top)
        return level1(kind, Bimachine(mu, lam))
    externals = _need(doc, "externals", where, list)
    exts = tuple(
        _load_level(e, f"{where}.externals[{i}]", loaded, kind, level - 1)
        for i, e in enumerate(externals)
    )
    rows = _need(doc, "selector", where, list)

    def ext_index(v):
        if not isinstance(v, int) or not 0 <= v < len(exts):
            raise ValidationError(where + ".selector", f"external index {v!r} out of range")
        return v

    sel = _load_table(rows, loaded, alphabet, where + ".selector", ext_index)
    sel = _pad_letters(sel, mu, kind, top)
    return nested(kind, mu, sel, exts)


def _level1_alphabet(mu, kind, top):
    if kind == "pebble" and top:
        return tuple(a for a in mu.alphabet if not a.startswith("^"))
    return mu.alphabet


def _pad_letters(table, mu, kind, top):
    """Top-level pebble tables only describe plain letters; pad the marked
    rows (never consulted) with the plain values."""
    if not (kind == "pebble" and top):
        return table
    plain = sum(1 for a in mu.alphabet if not a.startswith("^"))
    if plain == len(mu.alphabet):
        return table
    return tuple(
        tuple(row[ai % plain] for ai in range(len(mu.alphabet)))
        for row in (tuple(r) for r in table)
    )


def load_series(doc, where="series", workspace: Workspace | None = None):
    op = _need(doc, "op", where, str)
    if op == "reg":
        ref = _need(doc, "machine", where)
        if isinstance(ref, str):
            if workspace is None or ref not in workspace.machines:
                raise ValidationError(f"{where}.machine", f"unknown machine {ref!r}")
            machine = workspace.machines[ref]
        else:
            machine = load_machine(ref, f"{where}.machine", workspace)
        if machine.level != 1:
            raise ValidationError(f"{where}.machine", "series leaves must be level-1 machines")
        return Reg(machine.base)
    if op == "star":
        args = _need(doc, "args", where, list)
        if len(args) != 1:
            raise ValidationError(f"{where}.args", "star takes one argument")
        return Star(load_series(args[0], f"{where}.args[0]", workspace))
    ctor = {"sum": Sum, "cauchy": Cauchy, "hadamard": Hadamard}.get(op)
    if ctor is None:
        raise ValidationError(f"{where}.op", f"unknown operation {op!r}")
    args = _need(doc, "args", where, list)
    if len(args) < 2:
        raise ValidationError(f"{where}.args", f"{op} takes at least two arguments")
    expr = load_series(args[0], f"{where}.args[0]", workspace)
    for i, a in enumerate(args[1:], 1):
        expr = ctor(expr, load_series(a, f"{where}.args[{i}]", workspace))
    return expr


def load_probe(doc, where="probe") -> RepetitivenessProbe:
    try:
        return RepetitivenessProbe(
            alpha=_need(doc, "alpha", where, str),
            alpha_parts=tuple(_need(doc, "alpha_parts", where, list)),
            us=tuple(_need(doc, "us", where, list)),
            beta=_need(doc, "beta", where, str),
            omega=_need(doc, "omega", where, int),
            lo=doc.get("lo", 3),
            hi=doc.get("hi", 8),
        )
    except ValueError as exc:
        raise ValidationError(where, str(exc)) from None


def load_workspace(path) -> Workspace:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(str(path), f"cannot read: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(str(path), f"not valid JSON: {exc}") from None
    ws = Workspace()
    for name, m in doc.get("morphisms", {}).items():
        ws.morphisms[name] = load_morphism(m, f"morphisms.{name}")
    for name, m in doc.get("machines", {}).items():
        ws.machines[name] = load_machine(m, f"machines.{name}", ws)
    for name, s in doc.get("series", {}).items():
        ws.series[name] = load_series(s, f"series.{name}", ws)
    for name, p in doc.get("probes", {}).items():
        ws.probes[name] = load_probe(p, f"probes.{name}")
    return ws


# -- writing back -------------------------------------------------------------


def morphism_to_json(mu: Morphism) -> dict:
    names = mu.monoid.names
    return {
        "elements": list(names),
        "identity": names[mu.monoid.identity],
        "table": [[names[v] for v in row] for row in mu.monoid.table],
        "letters": {a: names[mu.letter_image[a]] for a in mu.alphabet},
    }


def machine_to_json(machine: NestedMachine, with_morphism=True) -> dict:
    doc = {"kind": machine.kind, "k": machine.level}
    if with_morphism:
        doc["morphism"] = morphism_to_json(machine.morphism)
    if machine.level == 1:
        doc["lambda"] = [[list(cell) for cell in row] for row in machine.base.table]
    else:
        doc["selector"] = [[list(cell) for cell in row] for row in machine.selector]
        doc["externals"] = [machine_to_json(e, with_morphism=False) for e in machine.externals]
    return doc


def series_to_json(expr) -> dict:
    if isinstance(expr, Reg):
        return {"op": "reg", "machine": machine_to_json(level1("marble", expr.machine))}
    if isinstance(expr, Star):
        return {"op": "star", "args": [series_to_json(expr.child)]}
    op = {Sum: "sum", Cauchy: "cauchy", Hadamard: "hadamard"}[type(expr)]
    return {"op": op, "args": [series_to_json(expr.left), series_to_json(expr.right)]}


def arch_to_json(arch, mu: Morphism):
    name = mu.monoid.name_of
    kind = arch[0]
    if kind == "eps":
        return ["eps"]
    if kind == "elem":
        return ["elem", name(arch[1])]
    items = []
    for item in arch[1]:
        if item[0] == "box":
            items.append(["box", arch_to_json(item[1], mu)])
        elif item[0] == "boxm":
            items.append(["boxm", name(item[1])])
        else:
            items.append(
                ["types", [[[name(m), u, name(m2)], d] for (m, u, m2), d in item[1]]]
            )
    return ["seq", items]


def arch_from_json(doc, mu: Morphism, where="arch"):
    elem = mu.monoid.element_by_name
    try:
        kind = doc[0]
        if kind == "eps":
            return ("eps",)
        if kind == "elem":
            return ("elem", elem(doc[1]))
        if kind != "seq":
            raise ValidationError(where, f"unknown architecture node {kind!r}")
        items = []
        for item in doc[1]:
            if item[0] == "box":
                items.append(("box", arch_from_json(item[1], mu, where)))
            elif item[0] == "boxm":
                items.append(("boxm", elem(item[1])))
            elif item[0] == "types":
                ms = tuple(
                    sorted(((elem(m), u, elem(m2)), int(d)) for (m, u, m2), d in item[1])
                )
                items.append(("types", ms))
            else:
                raise ValidationError(where, f"unknown item {item[0]!r}")
        return ("seq", tuple(items))
    except (KeyError, IndexError, TypeError) as exc:
        raise ValidationError(where, f"malformed architecture: {exc}") from None
