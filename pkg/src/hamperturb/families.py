"""Generators for the extremal constructions and their predicted invariants.

Labels are canonical: blocks occupy consecutive labels with the smallest
block first (ties keep construction order), so outputs are diffable.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

from .graph import Graph, GraphInputError, complete_bipartite

KINDS = (
    "TwoCliques",
    "BalancedCliques",
    "CliqueForest",
    "ToughnessCliques",
    "IAB",
    "UnbalancedBipartite",
    "MCliques",
    "DiracBipartite",
)

# parameters each kind needs besides n
_REQUIRED = {
    "TwoCliques": (),
    "BalancedCliques": ("delta",),
    "CliqueForest": ("d", "k"),
    "ToughnessCliques": ("k", "c"),
    "IAB": ("k",),
    "UnbalancedBipartite": (),
    "MCliques": ("m",),
    "DiracBipartite": (),
}


class InfeasibleSpec(GraphInputError):
    """Parameters violate a construction constraint."""


@dataclasses.dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int
    delta: float | None = None
    d: int | None = None
    k: int | None = None
    c: float | None = None
    m: int | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "n": self.n}
        for name in _REQUIRED.get(self.kind, ()):
            out[name] = getattr(self, name)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FamilySpec:
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise InfeasibleSpec(f"unknown family parameters: {sorted(extra)}")
        if "kind" not in data or "n" not in data:
            raise InfeasibleSpec("family spec needs 'kind' and 'n'")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> FamilySpec:
        return cls.from_dict(json.loads(text))

    def with_(self, **changes) -> FamilySpec:
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class PredictedProperties:
    min_degree: int
    independence_number: int
    component_count: int
    notes: str = ""


@dataclasses.dataclass(frozen=True)
class Layout:
    """Block structure of a construction, in label order."""

    blocks: tuple[tuple[str, int], ...]  # (role, size)

    def ranges(self) -> dict[str, range]:
        out, start = {}, 0
        for role, size in self.blocks:
            out[role] = range(start, start + size)
            start += size
        return out

    def sizes(self) -> list[int]:
        return [s for _, s in self.blocks]


def _need(spec: FamilySpec) -> None:
    if spec.kind not in _REQUIRED:
        raise InfeasibleSpec(f"unknown family kind {spec.kind!r}; expected one of {', '.join(KINDS)}")
    if not isinstance(spec.n, int) or spec.n < 1:
        raise InfeasibleSpec("n must be a positive integer")
    for name in _REQUIRED[spec.kind]:
        if getattr(spec, name) is None:
            raise InfeasibleSpec(f"{spec.kind} requires parameter {name}")


def _sorted_blocks(named: list[tuple[str, int]]) -> Layout:
    # stable sort keeps construction order on ties
    return Layout(tuple(sorted(named, key=lambda b: b[1])))


def balanced_sizes(n: int, parts: int) -> list[int]:
    q, r = divmod(n, parts)
    return [q] * (parts - r) + [q + 1] * r


def toughness_clique_count(n: int, k: int, c: float) -> int:
    return min(math.floor(c * k), n // (k + 1)) - 1


def layout(spec: FamilySpec) -> Layout:
    """Validate ``spec`` and return its block layout."""
    _need(spec)
    n, kind = spec.n, spec.kind
    if kind == "TwoCliques":
        if n < 2:
            raise InfeasibleSpec("TwoCliques needs n >= 2")
        return _sorted_blocks([("Q1", n // 2), ("Q2", n - n // 2)])
    if kind == "BalancedCliques":
        delta = float(spec.delta)
        if not 0 < delta < 1:
            raise InfeasibleSpec("BalancedCliques needs 0 < delta < 1")
        # largest k whose balanced split keeps every clique at >= delta*n + 1
        smallest = math.ceil(delta * n + 1 - 1e-9)
        k = n // smallest
        if k < 1:
            raise InfeasibleSpec(f"delta*n + 1 = {delta * n + 1:g} exceeds n = {n}")
        sizes = balanced_sizes(n, k)
        return Layout(tuple((f"Q{i + 1}", s) for i, s in enumerate(sizes)))
    if kind == "CliqueForest":
        d, k = spec.d, spec.k
        if d < 1 or k < 1:
            raise InfeasibleSpec("CliqueForest needs d >= 1 and k >= 1")
        if k * (d + 1) > n:
            raise InfeasibleSpec(f"CliqueForest needs k(d+1) <= n, got {k * (d + 1)} > {n}")
        named = [(f"Q{i + 1}", d + 1) for i in range(k - 1)]
        named.append((f"Q{k}", n - (k - 1) * (d + 1)))
        return _sorted_blocks(named)
    if kind == "ToughnessCliques":
        k, c = spec.k, float(spec.c)
        if k < 1 or c <= 0:
            raise InfeasibleSpec("ToughnessCliques needs k >= 1 and c > 0")
        r = toughness_clique_count(n, k, c)
        if r < 1:
            raise InfeasibleSpec(
                f"min(floor(ck), floor(n/(k+1))) - 1 = {r} leaves no clique of size k+1"
            )
        named = [(f"Q{i + 1}", k + 1) for i in range(r)]
        named.append(("rest", n - r * (k + 1)))
        return _sorted_blocks(named)
    if kind == "IAB":
        k = spec.k
        if k < 1:
            raise InfeasibleSpec("IAB needs k >= 1")
        i_size, a_size = k - 1, math.ceil(k / 2)
        b_size = n - i_size - a_size
        if b_size < 1:
            raise InfeasibleSpec(f"IAB needs n >= k + ceil(k/2) = {i_size + a_size + 1}")
        return _sorted_blocks([("I", i_size), ("A", a_size), ("B", b_size)])
    if kind == "UnbalancedBipartite":
        if n < 3:
            raise InfeasibleSpec("UnbalancedBipartite needs n >= 3")
        return Layout((("left", n // 3), ("right", n - n // 3)))
    if kind == "MCliques":
        m = spec.m
        if not 1 <= m <= n:
            raise InfeasibleSpec("MCliques needs 1 <= m <= n")
        return Layout(tuple((f"Q{i + 1}", s) for i, s in enumerate(balanced_sizes(n, m))))
    if kind == "DiracBipartite":
        if n < 2 or n % 2:
            raise InfeasibleSpec("DiracBipartite needs an even n >= 2")
        return Layout((("left", n // 2), ("right", n // 2)))
    raise AssertionError(kind)


def _cliques(sizes: list[int]) -> Graph:
    adj: list[tuple[int, ...]] = []
    start = 0
    for s in sizes:
        block = range(start, start + s)
        adj.extend(tuple(u for u in block if u != v) for v in block)
        start += s
    return Graph(len(adj), tuple(adj))


def build_family(spec: FamilySpec) -> Graph:
    lay = layout(spec)
    if spec.kind in ("UnbalancedBipartite", "DiracBipartite"):
        a, b = lay.sizes()
        return complete_bipartite(a, b)
    if spec.kind == "IAB":
        rng = lay.ranges()
        ab = list(rng["A"]) + list(rng["B"])
        edges = [(x, y) for x in rng["I"] for y in rng["A"]]
        edges += [(x, y) for i, x in enumerate(ab) for y in ab[i + 1 :]]
        return Graph.from_edges(spec.n, edges)
    return _cliques(lay.sizes())


def predicted_properties(spec: FamilySpec) -> PredictedProperties:
    lay = layout(spec)
    sizes = lay.sizes()
    kind = spec.kind
    if kind == "IAB":
        k = spec.k
        notes = f"|I|={k - 1} |A|={math.ceil(k / 2)}; deleting A leaves {k} components"
        return PredictedProperties(math.ceil(k / 2), k, 1, notes)
    if kind in ("UnbalancedBipartite", "DiracBipartite"):
        a, b = sizes
        return PredictedProperties(min(a, b), max(a, b), 1, f"K_{{{a},{b}}}")
    # disjoint cliques
    notes = "clique sizes " + ",".join(map(str, sizes))
    if kind == "BalancedCliques":
        notes += f"; k={len(sizes)}, 1/delta={1 / spec.delta:g}"
    if kind == "ToughnessCliques":
        notes += f"; alpha <= c*k = {spec.c * spec.k:g}"
    return PredictedProperties(min(sizes) - 1, len(sizes), len(sizes), notes)


def blocks(spec: FamilySpec) -> dict[str, range]:
    """Role name to label range, e.g. ``{"I": range(2, 5), ...}`` for IAB."""
    return layout(spec).ranges()
