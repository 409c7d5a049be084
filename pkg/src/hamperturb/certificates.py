"""Three-valued decisions and verifiable witnesses."""

from __future__ import annotations

import dataclasses
import enum
from typing import Any

from .graph import Digraph, Graph


class Status(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "indeterminate"

    @property
    def exit_code(self) -> int:
        return {Status.YES: 0, Status.NO: 1, Status.UNKNOWN: 2}[self]


class CapacityError(RuntimeError):
    """Instance is beyond the configured exact-solver cap."""


@dataclasses.dataclass(frozen=True)
class CycleCertificate:
    vertices: tuple[int, ...]
    directed: bool = False

    def __len__(self) -> int:
        return len(self.vertices)


@dataclasses.dataclass(frozen=True)
class PathCertificate:
    vertices: tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class PathSystem:
    paths: tuple[tuple[int, ...], ...]
    endpoint_pairs: tuple[tuple[int, int], ...]

    def covered(self) -> set[int]:
        return {v for p in self.paths for v in p}


@dataclasses.dataclass(frozen=True)
class Decision:
    """Outcome of an exact search: a witness on YES, a reason otherwise.

    ``NO`` means the search space was exhausted (a refutation); ``UNKNOWN``
    means a budget or cap stopped the search first.
    """

    status: Status
    witness: Any = None
    reason: str = ""
    detail: dict = dataclasses.field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.status is Status.YES

    @property
    def no(self) -> bool:
        return self.status is Status.NO


def yes(witness=None, **detail) -> Decision:
    return Decision(Status.YES, witness, "", detail)


def no(reason: str = "exhausted", **detail) -> Decision:
    return Decision(Status.NO, None, reason, detail)


def unknown(reason: str = "budget", witness=None, **detail) -> Decision:
    return Decision(Status.UNKNOWN, witness, reason, detail)


@dataclasses.dataclass(frozen=True)
class Verification:
    ok: bool
    violation: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _adjacent(host: Graph | Digraph, u: int, v: int) -> bool:
    if isinstance(host, Digraph):
        return v in host.out_adj[u]
    return v in host.adj[u]


def _check_walk(host, seq, closed: bool) -> Verification:
    n = host.n
    for v in seq:
        if not (isinstance(v, int) and 0 <= v < n):
            return Verification(False, f"vertex {v!r} not in host")
    if len(set(seq)) != len(seq):
        seen = set()
        for v in seq:
            if v in seen:
                return Verification(False, f"vertex {v} repeated")
            seen.add(v)
    steps = list(zip(seq, seq[1:]))
    if closed:
        steps.append((seq[-1], seq[0]))
    for u, v in steps:
        if not _adjacent(host, u, v):
            return Verification(False, f"({u}, {v}) is not an edge")
    return Verification(True)


def verify_certificate(host: Graph | Digraph, cert, *, spanning: bool = False) -> Verification:
    """Re-check a witness against ``host`` adjacency alone.

    ``spanning`` additionally demands that a cycle or path visits every
    vertex, or that a path system covers the vertex set.
    """
    if isinstance(cert, CycleCertificate):
        seq = tuple(cert.vertices)
        min_len = 2 if cert.directed else 3
        if len(seq) < min_len:
            return Verification(False, f"cycle of length {len(seq)} < {min_len}")
        if cert.directed != isinstance(host, Digraph):
            return Verification(False, "directedness of certificate and host differ")
        res = _check_walk(host, seq, closed=True)
        if res and spanning and len(seq) != host.n:
            return Verification(False, f"cycle misses {host.n - len(seq)} vertices")
        return res
    if isinstance(cert, PathCertificate):
        seq = tuple(cert.vertices)
        if not seq:
            return Verification(False, "empty path")
        res = _check_walk(host, seq, closed=False)
        if res and spanning and len(seq) != host.n:
            return Verification(False, f"path misses {host.n - len(seq)} vertices")
        return res
    if isinstance(cert, PathSystem):
        if len(cert.paths) != len(cert.endpoint_pairs):
            return Verification(False, "path count differs from pair count")
        used: set[int] = set()
        for i, (path, (x, y)) in enumerate(zip(cert.paths, cert.endpoint_pairs)):
            path = tuple(path)
            if not path:
                return Verification(False, f"path {i} is empty")
            if {path[0], path[-1]} != {x, y} or (x != y and len(path) < 2):
                return Verification(False, f"path {i} has endpoints {path[0]}, {path[-1]}, wanted {x}, {y}")
            res = _check_walk(host, path, closed=False)
            if not res:
                return Verification(False, f"path {i}: {res.violation}")
            overlap = used.intersection(path)
            if overlap:
                return Verification(False, f"vertex {min(overlap)} shared by two paths")
            used.update(path)
        if spanning and len(used) != host.n:
            missing = min(set(range(host.n)) - used)
            return Verification(False, f"vertex {missing} not covered")
        return Verification(True)
    return Verification(False, f"unsupported certificate type {type(cert).__name__}")
