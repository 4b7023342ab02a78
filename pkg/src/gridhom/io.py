"""JSON forms for chains, complexes, homomorphisms, set systems and colorful
instances.

Chains:      {"n": 4, "m": 2, "dim": 1, "cells": [[[1, 1], [2, 3]], ...]}
Complexes:   {"facets": [[v, ...], ...]}                       simplicial
             {"grid": {"n": 4, "m": 2, "top": 1}}              skeleton of G[n]^m
             {"n": 4, "m": 2, "cells": [...], "closed": false} cubical, closed downward
                                                               unless "closed" is true
Gf2Hom:      {"n", "m", "k", "b", "values": {"1,1;2,3": "01", ...}}
             A cell key lists one interval "a,b" per axis, separated by ";".
             Bitstrings have exactly b characters, first character = coordinate 0.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import ContractViolation, MalformedInput
from .gf2 import Gf2Vector
from .grid import Chain, GridSpec, cell_key, check_cell, parse_cell_key
from .helly import ColorfulInstance, MODE_ALL
from .homology import (
    CUBICAL,
    FiniteComplex,
    closure,
    cubical_complex,
    grid_complex,
    induced_subcomplex,
    simplicial_complex,
)
from .nerve import Member, SetSystem
from .subgrid import Gf2Hom

SCHEMA_VERSION = 1


def dumps(obj: Any) -> str:
    """Stable UTF-8 JSON text with sorted keys and a trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInput(f"{path}: {exc.strerror}") from exc
    return loads(text, str(path))


def _require(obj: Any, *keys: str) -> None:
    if not isinstance(obj, dict):
        raise MalformedInput(f"expected a JSON object, got {type(obj).__name__}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise MalformedInput(f"missing field(s): {', '.join(missing)}")


def _cell(raw) -> tuple:
    try:
        return tuple((int(a), int(b)) for a, b in raw)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad cell {raw!r}") from exc


def cell_to_json(cell) -> list:
    return [list(iv) for iv in cell]


# Chains -----------------------------------------------------------------------

def chain_to_json(c: Chain) -> dict:
    return {"n": c.spec.n, "m": c.spec.m, "dim": c.dim,
            "cells": [cell_to_json(x) for x in c.sorted_cells()]}


def chain_from_json(obj: dict) -> Chain:
    _require(obj, "n", "m", "dim", "cells")
    return Chain.of(GridSpec(int(obj["n"]), int(obj["m"])), int(obj["dim"]),
                    [_cell(x) for x in obj["cells"]])


# Complexes ----------------------------------------------------------------------

def _label(v):
    return tuple(v) if isinstance(v, list) else v


def complex_from_json(obj: dict) -> FiniteComplex:
    if isinstance(obj, dict) and "facets" in obj:
        return simplicial_complex([[_label(v) for v in f] for f in obj["facets"]])
    if isinstance(obj, dict) and "grid" in obj:
        g = obj["grid"]
        _require(g, "n", "m")
        return grid_complex(int(g["n"]), int(g["m"]), g.get("top"))
    _require(obj, "cells")
    cells = [_cell(x) for x in obj["cells"]]
    if "n" in obj and "m" in obj:
        spec = GridSpec(int(obj["n"]), int(obj["m"]))
        for c in cells:
            check_cell(c, spec)
    return cubical_complex(cells, close=not obj.get("closed", False))


def complex_to_json(X: FiniteComplex) -> dict:
    if X.kind == CUBICAL:
        return {"cells": [cell_to_json(c) for c in sorted(X.cellset, key=lambda c: (X.cell_dim(c), c))],
                "closed": True}
    faced = {f for c in X.cellset for f in X.faces(c)}
    top = X.cellset - faced
    return {"facets": [[_json_label(v) for v in f] for f in sorted(top, key=lambda c: (len(c), c))]}


def _json_label(v):
    return list(v) if isinstance(v, tuple) else v


# Homomorphisms ----------------------------------------------------------------

def hom_from_json(obj: dict) -> Gf2Hom:
    _require(obj, "n", "m", "k", "b", "values")
    b = int(obj["b"])
    values = {}
    for key, bits in obj["values"].items():
        if not isinstance(bits, str) or len(bits) != b:
            raise MalformedInput(f"value of {key!r} must be a bitstring of length {b}")
        v = Gf2Vector.from_bitstring(bits).bits
        cell = parse_cell_key(key)
        if v:
            values[cell] = v
    h = Gf2Hom(int(obj["n"]), int(obj["m"]), int(obj["k"]), b, values)
    for cell in values:
        Chain.of(h.spec, h.k, [cell])
    return h


def hom_to_json(h: Gf2Hom) -> dict:
    return {"n": h.n, "m": h.m, "k": h.k, "b": h.b,
            "values": {cell_key(c): Gf2Vector(v, h.b).to_bitstring()
                       for c, v in sorted(h.values.items()) if v}}


# Set systems and colorful instances -------------------------------------------

def system_from_json(obj: dict) -> SetSystem:
    _require(obj, "ambient", "members")
    ambient = complex_from_json(obj["ambient"])
    members = []
    for raw in obj["members"]:
        _require(raw, "name")
        name = str(raw["name"])
        if "vertices" in raw:
            vs = frozenset(_label(v) for v in raw["vertices"])
            missing = vs - ambient.vertex_set()
            if missing:
                raise ContractViolation(f"member {name} uses vertices outside the ambient complex")
            members.append(Member(name, induced_subcomplex(ambient, vs).cellset, vs))
        elif "cells" in raw:
            if ambient.kind == CUBICAL:
                cells = [_cell(x) for x in raw["cells"]]
            else:
                cells = [tuple(sorted(_label(v) for v in x)) for x in raw["cells"]]
            members.append(Member(name, frozenset(closure(ambient.kind, cells))))
        else:
            raise MalformedInput(f"member {name} needs \"vertices\" or \"cells\"")
    return SetSystem(ambient, members)


def system_to_json(F: SetSystem) -> dict:
    members = []
    for mb in F.members:
        if mb.vertices is not None:
            members.append({"name": mb.name, "vertices": sorted(_json_label(v) for v in mb.vertices)})
        else:
            cells = sorted(mb.cells, key=lambda c: (F.ambient.cell_dim(c), c))
            conv = cell_to_json if F.ambient.kind == CUBICAL else list
            members.append({"name": mb.name, "cells": [conv(c) for c in cells]})
    return {"ambient": complex_to_json(F.ambient), "members": members}


def instance_from_json(obj: dict) -> tuple[ColorfulInstance, list[int] | None]:
    """A colorful instance and the grid sizes stored with it, if any."""
    _require(obj, "d", "system", "classes")
    system = system_from_json(obj["system"])
    inst = ColorfulInstance(system, int(obj["d"]), obj["classes"], obj.get("mode", MODE_ALL))
    grids = obj.get("grids")
    return inst, [int(x) for x in grids] if grids is not None else None


def instance_to_json(inst: ColorfulInstance, grids=None) -> dict:
    out = {"d": inst.d, "system": system_to_json(inst.system),
           "classes": [list(c) for c in inst.classes], "mode": inst.mode}
    if grids is not None:
        out["grids"] = list(grids)
    return out
