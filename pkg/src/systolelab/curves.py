"""Curve catalogs, intersection tables and filling checks by face tracing.

A catalog stores curve words, the pairs of curves that cross (each pair at
most once), and the rotation system of the union of the curves: for every
crossing the cyclic order of the four strand ends meeting there.  Strand
tokens name the arcs of a curve between consecutive crossings, e.g. ``c1.a``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CatalogError, CatalogIncomplete, EmptySystem, NotFilling
from .fenchel import parse_word

GENUS = 2

_SECTIONS = ("CURVES", "INTERSECT", "ROTATION")


@dataclass(frozen=True)
class CurveClass:
    id: str
    word: tuple[str, ...]
    is_cuff: bool = False
    cuff_index: int | None = None

    def __post_init__(self):
        if not self.word:
            raise CatalogError(f"curve {self.id} has an empty word")
        w = self.word
        for u, v in zip(w, w[1:] + w[:1]):
            if u != v and u.lower() == v.lower():
                raise CatalogError(f"word of {self.id} is not cyclically reduced: {' '.join(w)}")

    @property
    def word_str(self) -> str:
        return " ".join(self.word)


@dataclass(frozen=True)
class FillingReport:
    V: int
    E: int
    F: int
    euler: int
    fills: bool
    minimal: bool | None = None
    connected: bool = True
    isolated: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"V": self.V, "E": self.E, "F": self.F, "euler": self.euler,
                "fills": self.fills, "minimal": self.minimal}


@dataclass(frozen=True)
class CurveSystem:
    curves: tuple[CurveClass, ...]
    crossings: frozenset = frozenset()
    rotation: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [c.id for c in self.curves]
        if len(set(ids)) != len(ids):
            raise CatalogError("duplicate curve ids")
        for pair in self.crossings:
            if len(pair) != 2 or not pair <= set(ids):
                raise CatalogError(f"bad intersection entry {sorted(pair)}")
        self._check_rotation()

    # -- lookup -----------------------------------------------------------
    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves)

    def __getitem__(self, cid: str) -> CurveClass:
        for c in self.curves:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def __len__(self) -> int:
        return len(self.curves)

    def intersection(self, i: str, j: str) -> int:
        if i == j:
            return 0
        return 1 if frozenset((i, j)) in self.crossings else 0

    def cuffs(self) -> dict[int, CurveClass]:
        return {c.cuff_index: c for c in self.curves if c.is_cuff}

    def resolve(self, sub: Iterable[str | CurveClass]) -> tuple[str, ...]:
        out = []
        for s in sub:
            cid = s.id if isinstance(s, CurveClass) else s
            if cid not in self.ids:
                raise KeyError(f"unknown curve {cid!r}")
            if cid not in out:
                out.append(cid)
        return tuple(sorted(out, key=self.ids.index))

    # -- rotation system --------------------------------------------------
    def _check_rotation(self):
        tokens: dict[str, list[tuple[str, int]]] = {}
        for v, cyc in self.rotation.items():
            if len(cyc) != 4:
                raise CatalogError(f"vertex {v} is not 4-valent")
            owners = [_strand_curve(t) for t in cyc]
            if owners[0] != owners[2] or owners[1] != owners[3] or owners[0] == owners[1]:
                raise CatalogError(f"vertex {v} is not a transverse crossing of two curves")
            if frozenset(owners[:2]) not in self.crossings:
                raise CatalogError(f"vertex {v} crosses {owners[:2]} but the table says they are disjoint")
            for k, t in enumerate(cyc):
                tokens.setdefault(t, []).append((v, k))
        for t, ends in tokens.items():
            if len(ends) != 2:
                raise CatalogError(f"strand {t} has {len(ends)} ends, expected 2")
        seen = [frozenset(_strand_curve(t) for t in cyc[:2]) for cyc in self.rotation.values()]
        if self.rotation and sorted(map(sorted, seen)) != sorted(map(sorted, self.crossings)):
            raise CatalogError("rotation vertices do not match the intersection table")

    def _partner(self):
        ends: dict[str, list[tuple[str, int]]] = {}
        for v, cyc in self.rotation.items():
            for k, t in enumerate(cyc):
                ends.setdefault(t, []).append((v, k))
        partner = {}
        for t, (h1, h2) in ends.items():
            partner[h1] = h2
            partner[h2] = h1
        return partner

    def vertex_curves(self, v: str) -> frozenset:
        return frozenset(_strand_curve(t) for t in self.rotation[v])


def _strand_curve(token: str) -> str:
    return token.split(".", 1)[0]


# -- catalog file ---------------------------------------------------------

def parse_catalog(text: str) -> CurveSystem:
    section = None
    curves: list[CurveClass] = []
    crossings: set[frozenset] = set()
    rotation: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[(\w+)\]", line)
        if m:
            section = m.group(1).upper()
            if section not in _SECTIONS:
                raise CatalogError(f"line {lineno}: unknown section [{m.group(1)}]")
            continue
        if section is None:
            raise CatalogError(f"line {lineno}: content before any section")
        try:
            if section == "CURVES":
                curves.append(_parse_curve_line(line))
            elif section == "INTERSECT":
                parts = line.split()
                if len(parts) != 2 or parts[0] == parts[1]:
                    raise CatalogError(f"expected two distinct curve ids, got {line!r}")
                pair = frozenset(parts)
                if pair in crossings:
                    raise CatalogError(f"duplicate intersection {line!r}")
                crossings.add(pair)
            else:
                vertex, _, rest = line.partition(":")
                if not rest.strip():
                    raise CatalogError(f"expected 'vertex: strands', got {line!r}")
                rotation[vertex.strip()] = tuple(rest.split())
        except CatalogError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
    return CurveSystem(tuple(curves), frozenset(crossings), rotation)


def _parse_curve_line(line: str) -> CurveClass:
    body, _, flags = line.partition("|")
    cid, eq, word = body.partition("=")
    cid = cid.strip()
    if not eq or not cid or not word.strip():
        raise CatalogError(f"expected 'id = word', got {line!r}")
    cuff = None
    for flag in flags.split():
        key, _, val = flag.partition("=")
        if key != "cuff":
            raise CatalogError(f"unknown curve flag {flag!r}")
        cuff = int(val)
    return CurveClass(cid, parse_word(word), cuff is not None, cuff)


def load_catalog(path: str | Path | None = None) -> CurveSystem:
    """Load a catalog file; with no path, the bundled six-curve system."""
    if path is None:
        text = resources.files("systolelab.data").joinpath("schmutz.cat").read_text()
    else:
        text = Path(path).read_text()
    return parse_catalog(text)


_DEFAULT: CurveSystem | None = None


def default_catalog() -> CurveSystem:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_catalog()
    return _DEFAULT


# -- face tracing ---------------------------------------------------------

def _induced_faces(system: CurveSystem, keep: set[str]):
    """Trace faces of the ribbon graph induced by the curves ``keep``.

    Returns (kept vertices, number of faces, number of connected components).
    """
    partner = system._partner()
    kept = [v for v in system.rotation if system.vertex_curves(v) <= keep]
    kept_set = set(kept)

    def merged(h):
        p = partner[h]
        while p[0] not in kept_set:
            # pass straight through a crossing whose other curve was removed
            p = partner[(p[0], (p[1] + 2) % 4)]
        return p

    half_edges = [(v, k) for v in kept for k in range(4)]
    succ = {h: merged((h[0], (h[1] + 1) % 4)) for h in half_edges}
    faces, seen = 0, set()
    for h in half_edges:
        if h in seen:
            continue
        faces += 1
        while h not in seen:
            seen.add(h)
            h = succ[h]
    # connectivity of the union graph
    parent = {v: v for v in kept}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for h in half_edges:
        a, b = find(h[0]), find(merged(h)[0])
        parent[a] = b
    components = len({find(v) for v in kept})
    return kept, faces, components


def fills(system: CurveSystem, sub: Iterable[str | CurveClass], *, check_minimal: bool = False,
          genus: int = GENUS) -> FillingReport:
    """Decide whether the curves ``sub`` fill the surface."""
    ids = system.resolve(sub)
    if not ids:
        raise EmptySystem("cannot test an empty set of curves")
    keep = set(ids)
    isolated = tuple(c for c in ids if not any(system.intersection(c, o) for o in ids))
    kept, faces, components = _induced_faces(system, keep)
    V = len(kept)
    E = 2 * V
    euler = V - E + faces
    ok = not isolated and components == 1 and euler == 2 - 2 * genus
    minimal = None
    if check_minimal and ok:
        minimal = not any(fills(system, s).fills for s in _proper_subsets(ids))
    return FillingReport(V, E, faces, euler, ok, minimal, components <= 1, isolated)


def _proper_subsets(ids: Sequence[str]):
    for r in range(1, len(ids)):
        yield from itertools.combinations(ids, r)


def minimal_filling(system: CurveSystem, sub: Iterable[str | CurveClass]) -> bool:
    """True iff ``sub`` fills and no proper subset of it fills."""
    ids = system.resolve(sub)
    if not fills(system, ids).fills:
        raise NotFilling(f"{list(ids)} does not fill")
    return not any(fills(system, s).fills for s in _proper_subsets(ids))


def filling_subsets(system: CurveSystem, ids: Sequence[str] | None = None) -> list[tuple[str, ...]]:
    ids = system.ids if ids is None else system.resolve(ids)
    out = []
    for r in range(1, len(ids) + 1):
        out.extend(s for s in itertools.combinations(ids, r) if fills(system, s).fills)
    return out


def minimal_filling_subsets(system: CurveSystem, ids: Sequence[str] | None = None) -> list[tuple[str, ...]]:
    filling = filling_subsets(system, ids)
    fs = [set(s) for s in filling]
    return [s for s, a in zip(filling, fs) if not any(b < a for b in fs)]


def dual_curve(system: CurveSystem, c: str | CurveClass, within: Iterable[str | CurveClass]) -> CurveClass:
    """A catalog curve meeting ``c`` but none of the other curves of ``within``."""
    cid = c.id if isinstance(c, CurveClass) else c
    within_ids = set(system.resolve(within)) | {cid}
    others = within_ids - {cid}
    for cand in system.curves:
        if cand.id in within_ids:
            continue
        if system.intersection(cand.id, cid) >= 1 and not any(system.intersection(cand.id, o) for o in others):
            return cand
    raise CatalogIncomplete(f"no catalog curve meets {cid} while avoiding {sorted(others)}")
