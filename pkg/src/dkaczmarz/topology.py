"""Processing architectures: daisy chain and two-level sub-array tree.

Leaf (antenna) indices are 0-based throughout. A :class:`Schedule` lists the
sequential dispersion groups of one cycle and the weights used to pool the
group outputs at the root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .numerics import InvalidArgumentError

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Topology:
    kind: str  # "chain" or "subarray_tree"
    M: int
    subarrays: tuple[tuple[int, ...], ...] | None = None
    weights: tuple[float, ...] | None = None

    def describe(self) -> str:
        if self.kind == "chain":
            return "chain"
        sizes = {len(s) for s in self.subarrays}
        if len(sizes) == 1 and all(
                s == tuple(range(i * len(s), (i + 1) * len(s)))
                for i, s in enumerate(self.subarrays)):
            return f"tree:{len(self.subarrays)}x{sizes.pop()}"
        return f"tree:custom{len(self.subarrays)}"


@dataclass(frozen=True)
class Schedule:
    """One cycle of dispersion followed by pooling.

    ``groups`` holds ``(leaf_order, weight)`` pairs. Each group is swept
    sequentially from the shared initial guess; pooling returns the
    weighted sum of the group outputs, accumulated in group order.
    """

    groups: tuple[tuple[tuple[int, ...], float], ...]

    @property
    def dispersion_order(self) -> tuple[int, ...]:
        return tuple(m for order, _ in self.groups for m in order)

    @property
    def is_chain(self) -> bool:
        return len(self.groups) == 1 and self.groups[0][1] == 1.0

    def pool(self, outputs: Sequence[np.ndarray]) -> np.ndarray:
        if len(outputs) != len(self.groups):
            raise InvalidArgumentError("one output per group expected")
        if self.is_chain:
            # backpropagated unchanged
            return outputs[0]
        pooled = self.groups[0][1] * outputs[0]
        for (_, w), out in zip(self.groups[1:], outputs[1:]):
            pooled = pooled + w * out
        return pooled


def build_chain(M: int) -> Topology:
    if M < 1:
        raise InvalidArgumentError(f"M must be >= 1, got {M}")
    return Topology(kind="chain", M=M)


def build_subarray_tree(partition: Sequence[Sequence[int]],
                        weights: Sequence[float] | None = None) -> Topology:
    """Two-level tree: one bus per sub-array, buses joined at the root.

    ``weights`` are the bus-to-root pooling weights; they must be positive
    and sum to one. Missing weights default to uniform.
    """
    subarrays = tuple(tuple(int(m) for m in group) for group in partition)
    if not subarrays or any(len(g) == 0 for g in subarrays):
        raise InvalidArgumentError("partition must contain non-empty groups")
    leaves = sorted(m for g in subarrays for m in g)
    M = len(leaves)
    if leaves != list(range(M)):
        raise InvalidArgumentError("partition must be a disjoint cover of 0..M-1")
    if weights is None:
        weights = [1.0 / len(subarrays)] * len(subarrays)
    weights = tuple(float(w) for w in weights)
    if len(weights) != len(subarrays):
        raise InvalidArgumentError("one weight per sub-array expected")
    if any(w <= 0 for w in weights):
        raise InvalidArgumentError("weights must be positive")
    if abs(sum(weights) - 1.0) > WEIGHT_TOL:
        raise InvalidArgumentError(f"weights sum to {sum(weights)}, expected 1")
    return Topology(kind="subarray_tree", M=M, subarrays=subarrays, weights=weights)


def select_random_root(H, rng: np.random.Generator) -> int:
    """Pick a root with probability proportional to ``||h_m||^2``."""
    H = getattr(H, "H", H)
    energy = np.sum(np.abs(np.asarray(H)) ** 2, axis=-1)
    total = energy.sum()
    if not total > 0:
        raise InvalidArgumentError("all-zero channel has no admissible root")
    return int(rng.choice(len(energy), p=energy / total))


def rotated_order(M: int, root: int) -> tuple[int, ...]:
    return tuple((root + i) % M for i in range(M))


def make_schedule(topology: Topology, root: int = 0) -> Schedule:
    """Build the per-cycle schedule.

    For a chain the sweep starts at ``root`` and wraps around. Trees are
    always rooted at their sub-array bus, so only ``root=0`` is accepted.
    """
    if topology.kind == "chain":
        if not 0 <= root < topology.M:
            raise InvalidArgumentError(f"root {root} outside 0..{topology.M - 1}")
        return Schedule(groups=((rotated_order(topology.M, root), 1.0),))
    if root != 0:
        raise InvalidArgumentError("sub-array trees do not support root rotation")
    return Schedule(groups=tuple(
        (tuple(sorted(g)), w) for g, w in zip(topology.subarrays, topology.weights)))


def parse_topology(spec: str, M: int) -> Topology:
    """Parse ``chain``, ``tree:SxN`` or a JSON partition file path."""
    if spec == "chain":
        return build_chain(M)
    if spec.startswith("tree:"):
        try:
            S, size = (int(v) for v in spec[5:].lower().split("x"))
        except ValueError:
            raise InvalidArgumentError(f"bad tree spec {spec!r}, expected tree:SxN") from None
        if S * size != M:
            raise InvalidArgumentError(f"{spec} covers {S * size} leaves, M={M}")
        return build_subarray_tree([range(i * size, (i + 1) * size) for i in range(S)])
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text())
        topo = build_subarray_tree(data["subarrays"], data.get("weights"))
        if topo.M != M:
            raise InvalidArgumentError(f"partition covers {topo.M} leaves, M={M}")
        return topo
    raise InvalidArgumentError(f"unknown topology {spec!r}")
