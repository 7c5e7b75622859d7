"""Combinatorial area-weighted maps on closed orientable surfaces.

A map is given by its face boundary words.  A word is a cyclic sequence of
signed edge labels, read clockwise around the face; ``("a", -1)`` is the edge
``a`` traversed backwards and is written ``a'`` in text form.  A closed
orientable map uses every edge exactly twice, once in each direction.

Holonomies follow the path convention ``h_{e_1 ... e_k} = h_{e_k} ... h_{e_1}``
with ``h_{e^-1} = h_e^{-1}``, so that the discrete Yang-Mills density of a
configuration is ``prod_f p_{a_f}(h_{df})``.  The heat kernel is central and
invariant under inversion, so this density does not depend on the starting
point or the direction in which a face word is read.

Vertices are not stored.  They are recovered from the corners of the faces:
the end of each letter is identified with the start of the next letter of the
same face.  A user supplied vertex count is checked against this.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .charcalc import ConjugacyClass, heat_kernel_eval
from .weights import GroupDescriptor

__all__ = [
    "MapError", "AreaWeightedMap", "LoopWord", "EdgeConfiguration", "DiscExtraction",
    "parse_letter", "parse_word", "format_word", "validate_and_genus", "vertex_classes",
    "extract_disc", "ds_weight", "example_torus_map",
]

Letter = tuple  # (label, +1 or -1)


class MapError(ValueError):
    """Invalid map or disc request.

    ``reason`` names the failed condition: ``"edge-occurrence"``,
    ``"orientation"``, ``"area"``, ``"vertex-count"``, ``"disconnected"``,
    ``"euler"``, ``"not-a-disc"``, ``"loop"`` or ``"format"``.
    """

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


# ---------------------------------------------------------------------------
# words

def parse_letter(token) -> Letter:
    """Read ``"a"``, ``"a'"``, ``("a", -1)`` or ``"-a"`` as a signed letter."""
    if isinstance(token, tuple):
        label, sign = token
        if sign not in (1, -1):
            raise MapError("format", f"letter sign must be +1 or -1, got {sign!r}")
        return str(label), int(sign)
    s = str(token).strip()
    sign = 1
    if s.endswith("'"):
        s, sign = s[:-1], -1
    elif s.startswith("-"):
        s, sign = s[1:], -1
    if not s or "'" in s:
        raise MapError("format", f"bad edge label {token!r}")
    return s, sign


def parse_word(word) -> tuple:
    """Parse a word given as a sequence of tokens or a whitespace separated string.

    Examples
    --------
    >>> parse_word("b' a' b a")
    (('b', -1), ('a', -1), ('b', 1), ('a', 1))
    """
    if isinstance(word, str):
        word = word.split()
    return tuple(parse_letter(t) for t in word)


def format_word(word: Sequence[Letter]) -> str:
    """Inverse of :func:`parse_word`."""
    return " ".join(label + ("'" if sign < 0 else "") for label, sign in word)


def _inverse(word):
    return tuple((label, -sign) for label, sign in reversed(word))


def _reduce_cyclic(word):
    out = []
    for x in word:
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == (out[-1][0], -out[-1][1]):
        out = out[1:-1]
    return tuple(out)


@dataclass(frozen=True)
class LoopWord:
    """A loop as a word in the signed edge labels of a map."""

    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", parse_word(self.word))
        if not self.word:
            raise MapError("loop", "a loop needs at least one edge")

    def reduced(self) -> "LoopWord":
        """Cyclically reduced form, without adjacent ``e e^-1`` pairs.

        Raises if the loop reduces to the constant loop.
        """
        return LoopWord(_reduce_cyclic(self.word))

    def inverse(self) -> "LoopWord":
        return LoopWord(_inverse(self.word))

    def power(self, k: int) -> "LoopWord":
        if k == 0:
            raise ValueError("k must be nonzero")
        w = self.word if k > 0 else _inverse(self.word)
        return LoopWord(w * abs(k))

    def __str__(self):
        return format_word(self.word)


# ---------------------------------------------------------------------------
# maps

@dataclass(frozen=True)
class AreaWeightedMap:
    """Faces given by boundary words, each with a positive area.

    Parameters
    ----------
    faces : sequence of words
        Face boundaries.  Each word may be a string such as ``"f' e d'"`` or
        a sequence of signed letters.
    areas : sequence of float
        One positive area per face.  The area of the marked face is ignored
        and stored as ``inf``.
    vertex_count : int, optional
        Checked against the vertex count implied by the words.
    names : sequence of str, optional
        Face names; default ``F1, F2, ...``.
    outer : int, optional
        Index of a marked (unbounded) face, for planar maps.
    """

    faces: tuple
    areas: tuple
    vertex_count: int | None = None
    names: tuple = ()
    outer: int | None = None
    edges: tuple = field(init=False)

    def __post_init__(self):
        faces = tuple(parse_word(w) for w in self.faces)
        if any(len(w) == 0 for w in faces):
            raise MapError("format", "empty face word")
        areas = tuple(float(a) for a in self.areas)
        if len(areas) != len(faces):
            raise MapError("format", f"{len(faces)} faces but {len(areas)} areas")
        outer = self.outer
        if outer is not None:
            outer = int(outer)
            if not 0 <= outer < len(faces):
                raise MapError("format", f"marked face index {outer} out of range")
            areas = tuple(math.inf if i == outer else a for i, a in enumerate(areas))
        names = tuple(self.names) or tuple(f"F{i + 1}" for i in range(len(faces)))
        if len(names) != len(faces) or len(set(names)) != len(names):
            raise MapError("format", "face names must be distinct, one per face")
        labels = []
        for w in faces:
            for label, _ in w:
                if label not in labels:
                    labels.append(label)
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "edges", tuple(labels))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def bounded_faces(self) -> tuple:
        return tuple(i for i in range(self.face_count) if i != self.outer)

    @property
    def total_area(self) -> float:
        """``|a|``, the sum of the areas of the bounded faces."""
        return math.fsum(self.areas[i] for i in self.bounded_faces)

    def face_index(self, face) -> int:
        if isinstance(face, str):
            try:
                return self.names.index(face)
            except ValueError:
                raise MapError("format", f"no face named {face!r}") from None
        i = int(face)
        if not 0 <= i < self.face_count:
            raise MapError("format", f"face index {i} out of range")
        return i

    @classmethod
    def from_dict(cls, data: Mapping) -> "AreaWeightedMap":
        """Build a map from the JSON schema used by the command line.

        ``{"edges": [...], "vertices": int, "faces": [{"word": [...], "area": x, "name": s}]}``,
        plus ``"outer": i`` and a null area on face ``i`` for a planar map with
        a marked outer face.
        """
        try:
            faces = data["faces"]
            words = [f["word"] for f in faces]
            areas = [f["area"] for f in faces]
        except (KeyError, TypeError) as exc:
            raise MapError("format", f"missing field {exc}") from None
        names = tuple(f.get("name", f"F{i + 1}") for i, f in enumerate(faces))
        outer = data.get("outer")
        # the marked outer face of a planar map is stored with a null area
        for i, a in enumerate(areas):
            if a is None and i != outer:
                raise MapError("area", f"face {names[i]} has no area")
        areas = [math.inf if a is None else a for a in areas]
        m = cls(words, areas, data.get("vertices"), names, outer)
        if "edges" in data and set(map(str, data["edges"])) != set(m.edges):
            raise MapError("edge-occurrence", "the edge list does not match the labels used by the faces")
        return m

    def to_dict(self) -> dict:
        out = {
            "edges": list(self.edges),
            "vertices": self.vertex_count if self.vertex_count is not None else len(vertex_classes(self)[1]),
            "faces": [{"name": n, "word": format_word(w).split(), "area": None if i == self.outer else a}
                      for i, (n, w, a) in enumerate(zip(self.names, self.faces, self.areas))],
        }
        if self.outer is not None:
            out["outer"] = self.outer
        return out


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def _start(letter):
    label, sign = letter
    return (label, 0 if sign > 0 else 1)


def _end(letter):
    label, sign = letter
    return (label, 1 if sign > 0 else 0)


def _corner_vertices(faces):
    uf = _UnionFind()
    for w in faces:
        for i, x in enumerate(w):
            y = w[(i + 1) % len(w)]
            uf.union(_end(x), _start(y))
    return uf


def vertex_classes(m: AreaWeightedMap):
    """Vertices implied by the face words.

    Returns ``(vertex_of, classes)``: ``vertex_of[(label, 0)]`` is the index of
    the tail of an edge, ``(label, 1)`` of its head; ``classes`` lists the
    endpoint sets.
    """
    uf = _corner_vertices(m.faces)
    roots = {}
    vertex_of = {}
    for label in m.edges:
        for end in (0, 1):
            r = uf.find((label, end))
            vertex_of[(label, end)] = roots.setdefault(r, len(roots))
    classes = [[] for _ in roots]
    for key, v in vertex_of.items():
        classes[v].append(key)
    return vertex_of, classes


def _check_occurrences(faces):
    seen = {}
    for fi, w in enumerate(faces):
        for label, sign in w:
            seen.setdefault(label, []).append(sign)
    for label, signs in seen.items():
        if len(signs) != 2:
            raise MapError("edge-occurrence", f"edge {label!r} occurs {len(signs)} times, expected 2")
        if sorted(signs) != [-1, 1]:
            raise MapError("orientation", f"edge {label!r} is traversed twice in the same direction")


def _connected(faces):
    uf = _UnionFind()
    for fi, w in enumerate(faces):
        uf.find(("face", fi))
        for label, _ in w:
            uf.union(("face", fi), ("edge", label))
    return len({uf.find(("face", fi)) for fi in range(len(faces))}) == 1


def validate_and_genus(m: AreaWeightedMap) -> int:
    """Check that ``m`` is a closed orientable map and return its genus.

    The genus is ``(2 - V + E - F) / 2``.

    Raises
    ------
    MapError
        With ``reason`` naming the failed condition.

    Examples
    --------
    >>> validate_and_genus(AreaWeightedMap(["b' a' b a"], [1.0], vertex_count=1))
    1
    """
    bad = [(n, a) for i, (n, a) in enumerate(zip(m.names, m.areas)) if i != m.outer and not a > 0]
    if bad:
        raise MapError("area", f"face {bad[0][0]} has non-positive area {bad[0][1]!r}")
    _check_occurrences(m.faces)
    if not _connected(m.faces):
        raise MapError("disconnected", "the faces do not form a connected surface")
    V = len(vertex_classes(m)[1])
    if m.vertex_count is not None:
        chi = m.vertex_count - m.edge_count + m.face_count
        if chi % 2 or chi > 2:
            raise MapError("euler", f"V - E + F = {chi} gives no integer genus >= 0")
        if m.vertex_count != V:
            raise MapError("vertex-count", f"{m.vertex_count} vertices supplied, the face words imply {V}")
    # corner gluing always yields a closed orientable surface, so chi is even and <= 2
    chi = V - m.edge_count + m.face_count
    return (2 - chi) // 2


def example_torus_map(a1: float = 1.0, a2: float = 1.0, a3: float = 1.0) -> AreaWeightedMap:
    """Three-face map on the torus with edges ``a, ..., f``.

    Faces ``b'a'bacdfc'``, ``f'ed'`` and ``e'``.
    """
    return AreaWeightedMap(["b' a' b a c d f c'", "f' e d'", "e'"], [a1, a2, a3], vertex_count=3)


# ---------------------------------------------------------------------------
# discs

@dataclass(frozen=True)
class DiscExtraction:
    """A planar map cut out of a surface, with the loop it carries."""

    map: AreaWeightedMap
    loop: LoopWord | None
    source_faces: tuple


def extract_disc(m: AreaWeightedMap, disc_faces: Sequence, loop=None) -> DiscExtraction:
    """Replace the complement of a disc by a single marked face.

    Parameters
    ----------
    m : AreaWeightedMap
        A valid closed map.
    disc_faces : sequence of face names or indices
        Faces whose closure must be a topological disc.
    loop : LoopWord or word, optional
        A closed path using only edges of the disc faces.

    Returns
    -------
    DiscExtraction
        The planar map keeps the disc faces with their areas and adds the
        marked outer face last.  Edge labels are unchanged, so the loop word
        carries over as is.
    """
    validate_and_genus(m)
    idx = sorted({m.face_index(f) for f in disc_faces})
    if not idx:
        raise MapError("not-a-disc", "no faces given")
    if m.outer is not None and m.outer in idx:
        raise MapError("not-a-disc", "the marked face cannot be part of a disc")
    faces = [m.faces[i] for i in idx]
    if not _connected(faces):
        raise MapError("not-a-disc", "the faces are not connected through shared edges")

    # sides are (face, position); an edge is interior if both its sides are in the disc
    sides = {}
    for fi, w in enumerate(faces):
        for pos, (label, _) in enumerate(w):
            sides.setdefault(label, []).append((fi, pos))
    boundary = [s[0] for s in sides.values() if len(s) == 1]
    if not boundary:
        raise MapError("not-a-disc", "the faces cover a closed surface, there is no boundary")

    def twin(side):
        a, b = sides[faces[side[0]][side[1]][0]]
        return b if side == a else a

    def prev(side):
        fi, pos = side
        return fi, (pos - 1) % len(faces[fi])

    def next_boundary(side):
        # turn around the start vertex of this side through interior edges
        s = prev(side)
        while len(sides[faces[s[0]][s[1]][0]]) == 2:
            s = prev(twin(s))
        return s

    cycle = [boundary[0]]
    while True:
        s = next_boundary(cycle[-1])
        if s == cycle[0]:
            break
        if s in cycle:
            raise MapError("not-a-disc", "the boundary walk does not close up")
        cycle.append(s)
    if len(cycle) != len(boundary):
        raise MapError("not-a-disc", f"the boundary has {len(boundary) - len(cycle) + 1} or more components")
    outer_word = tuple((faces[fi][pos][0], -faces[fi][pos][1]) for fi, pos in cycle)

    planar = AreaWeightedMap(faces + [outer_word], [m.areas[i] for i in idx] + [math.inf],
                             names=tuple(m.names[i] for i in idx) + ("outer",), outer=len(faces))
    genus = validate_and_genus(planar)
    if genus != 0:
        raise MapError("not-a-disc", f"the faces span a surface of genus {genus} with one boundary")

    lw = None
    if loop is not None:
        lw = loop if isinstance(loop, LoopWord) else LoopWord(loop)
        missing = sorted({label for label, _ in lw.word} - set(planar.edges))
        if missing:
            raise MapError("loop", f"the loop uses edges {missing} outside the disc")
        vertex_of, _ = vertex_classes(planar)
        w = lw.word
        for x, y in zip(w, w[1:] + w[:1]):
            if vertex_of[_end(x)] != vertex_of[_start(y)]:
                raise MapError("loop", f"{format_word([x])} does not end where {format_word([y])} starts")
    return DiscExtraction(planar, lw, tuple(m.names[i] for i in idx))


# ---------------------------------------------------------------------------
# configurations and the discrete Yang-Mills weight

@dataclass(frozen=True)
class EdgeConfiguration:
    """Group elements attached to the positively oriented edges.

    Values are ``n x n`` matrices.  For the circle group plain complex
    numbers or angles (real numbers) are accepted and stored as ``1 x 1``
    matrices.
    """

    values: Mapping

    def __post_init__(self):
        vals = {}
        for label, x in dict(self.values).items():
            a = np.asarray(x)
            if a.ndim == 0:
                a = np.array([[np.exp(1j * a) if np.isrealobj(a) else a]], dtype=complex)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError(f"edge {label!r}: expected a square matrix, got shape {a.shape}")
            vals[str(label)] = a
        object.__setattr__(self, "values", vals)

    def element(self, letter: Letter) -> np.ndarray:
        label, sign = letter
        try:
            x = self.values[label]
        except KeyError:
            raise KeyError(f"no value for edge {label!r}") from None
        return x if sign > 0 else x.conj().T

    def holonomy(self, word) -> np.ndarray:
        """``h_{x_1 ... x_k} = h_{x_k} ... h_{x_1}``."""
        word = word.word if isinstance(word, LoopWord) else parse_word(word)
        h = None
        for x in word:
            e = self.element(x)
            h = e if h is None else e @ h
        return h

    def gauge(self, m: AreaWeightedMap, vertex: int, k: np.ndarray) -> "EdgeConfiguration":
        """Apply a gauge transformation ``k`` at one vertex.

        Each edge ``e`` from ``u`` to ``v`` becomes ``k_v h_e k_u^-1``.
        """
        vertex_of, _ = vertex_classes(m)
        out = {}
        for label, h in self.values.items():
            if vertex_of[(label, 1)] == vertex:
                h = k @ h
            if vertex_of[(label, 0)] == vertex:
                h = h @ k.conj().T
            out[label] = h
        return EdgeConfiguration(out)


def ds_weight(m: AreaWeightedMap, group: GroupDescriptor, config: EdgeConfiguration,
              tol: float = 1e-10) -> float:
    """Discrete Yang-Mills density ``prod_f p_{a_f}(h_{df})`` against Haar measure.

    The marked face of a planar map carries no heat kernel.  The heat kernel
    is positive, but far from the identity its truncated sum can round to a
    value in ``[-tol, 0)``; such values are clipped to 0, which stays within
    the truncation error.

    Examples
    --------
    >>> from ymsurf.weights import make_group
    >>> m = AreaWeightedMap(["b' a' b a"], [2.0], vertex_count=1)
    >>> round(ds_weight(m, make_group("Atilde", 1), EdgeConfiguration({"a": 0.4, "b": 1.1})), 10)
    1.7726372048
    """
    n = group.matrix_size
    w = 1.0
    for i in m.bounded_faces:
        h = config.holonomy(m.faces[i])
        if h.shape != (n, n):
            raise ValueError(f"{group} acts on {n}x{n} matrices, got {h.shape}")
        cls = ConjugacyClass.from_matrix(group, h)
        w *= max(heat_kernel_eval(group, m.areas[i], cls, tol), 0.0)
    return w
