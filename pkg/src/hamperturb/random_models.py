"""Seeded samplers for G(n,p), D(n,p) and perturbations.

Every pair gets its own uniform in [0, 1) computed by hashing
``(seed, u, v)``; a pair is present iff its uniform is below ``p``. The
value of a pair never depends on which other pairs were queried, so
subsets of pairs can be sampled on their own and agree with the full
sample, and raising ``p`` under a fixed seed only ever adds edges.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import Digraph, Graph, union

MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_DIRECTED_TAG = np.uint64(1 << 63)
_INV_2_53 = 1.0 / (1 << 53)


def parse_seed(text: str | int) -> int:
    """Accept decimal or ``0x``-prefixed hex; reduce to 64 bits."""
    if isinstance(text, int):
        value = text
    else:
        text = text.strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text)
    if value < 0:
        raise ValueError("seed must be non-negative")
    return value & MASK64


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def mix_seed(*parts: int) -> int:
    """Deterministically fold integers into one 64-bit seed."""
    with np.errstate(over="ignore"):
        acc = np.array([0x243F6A8885A308D3], dtype=np.uint64)
        for part in parts:
            acc = _mix(acc ^ _mix(np.array([part & MASK64], dtype=np.uint64) + _GOLDEN))
    return int(acc[0])


def pair_uniforms(seeds, us, vs, directed: bool = False) -> np.ndarray:
    """Uniforms for pairs ``(us[j], vs[j])`` under each seed.

    ``seeds`` may be a scalar (result shape ``(P,)``) or a 1-d array of
    seeds (result shape ``(S, P)``). Undirected pairs are canonicalised to
    ``u < v`` so ``(u, v)`` and ``(v, u)`` share a uniform.
    """
    us = np.asarray(us, dtype=np.uint64)
    vs = np.asarray(vs, dtype=np.uint64)
    if not directed:
        us, vs = np.minimum(us, vs), np.maximum(us, vs)
    key = (us << np.uint64(32)) | vs
    if directed:
        key = key | _DIRECTED_TAG
    scalar = np.ndim(seeds) == 0
    seed_arr = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    with np.errstate(over="ignore"):
        hk = _mix(key + _GOLDEN)
        hs = _mix(seed_arr ^ _GOLDEN)
        h = _mix(hs[:, None] ^ hk[None, :])
    out = (h >> np.uint64(11)).astype(np.float64) * _INV_2_53
    return out[0] if scalar else out


def check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"edge probability {p} outside [0, 1]")
    return p


def all_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    us, vs = np.triu_indices(n, k=1)
    return us, vs


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    p = check_probability(p)
    if n < 1:
        raise ValueError("n must be at least 1")
    us, vs = all_pairs(n)
    keep = pair_uniforms(seed, us, vs) < p
    return Graph.from_edges(n, zip(us[keep].tolist(), vs[keep].tolist()))


def sample_dnp(n: int, p: float, seed: int) -> Digraph:
    p = check_probability(p)
    if n < 1:
        raise ValueError("n must be at least 1")
    us, vs = np.nonzero(~np.eye(n, dtype=bool))
    keep = pair_uniforms(seed, us, vs, directed=True) < p
    return Digraph.from_arcs(n, zip(us[keep].tolist(), vs[keep].tolist()))


def perturb(g: Graph, p: float, seed: int) -> Graph:
    return union(g, sample_gnp(g.n, p, seed))


def split_two_rounds(p: float) -> tuple[float, float]:
    """Per-round probability ``q`` with ``(1-q)^2 = 1-p``."""
    p = check_probability(p)
    q = -math.expm1(0.5 * math.log1p(-p)) if p < 1 else 1.0
    return q, q
