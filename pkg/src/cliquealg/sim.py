"""Synchronous congested-clique engine: node stores, routing, and the cost ledger.

Cost convention: a routing phase on an active subset of size n_act, in which the
most loaded node sends or receives S message units, is charged

    rounds = 2 * ceil(S / n_act)        (0 if nothing moves)

which reduces to exactly 2 rounds whenever every node's load is at most n_act.
Message units: one field element = 1 unit; a payload of b bits is charged
ceil(b / ceil(2*log2(n))) units per value (the wide-value rule used by the
min-plus routines).  Node-local computation is free.
"""

from __future__ import annotations

import hashlib
import math
import random
from contextlib import contextmanager
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .ff import PrimeField


class RoutingViolation(Exception):
    pass


class DisjointnessError(Exception):
    pass


class IsolationViolation(Exception):
    pass


def wide_value_units(bits: int, n: int) -> int:
    """Message units charged for one value of the given bit width."""
    per_message = max(1, math.ceil(2 * math.log2(max(2, n))))
    return max(1, math.ceil(bits / per_message))


class PhaseRecord:
    __slots__ = ("name", "subset_size", "rounds", "messages")

    def __init__(self, name: str, subset_size: int, rounds: int, messages: int):
        self.name = name
        self.subset_size = subset_size
        self.rounds = rounds
        self.messages = messages


class GroupRecord:
    __slots__ = ("name", "parallel", "children")

    def __init__(self, name: str, parallel: bool):
        self.name = name
        self.parallel = parallel
        self.children: list = []

    @property
    def rounds(self) -> int:
        if self.parallel:
            return max((child.rounds for child in self.children), default=0)
        return sum(child.rounds for child in self.children)

    @property
    def messages(self) -> int:
        return sum(child.messages for child in self.children)


class CostLedger:
    """Tree of phases; parallel groups charge the max of their branches."""

    def __init__(self):
        self.root = GroupRecord("", parallel=False)
        self._stack = [self.root]

    @property
    def total_rounds(self) -> int:
        return self.root.rounds

    @property
    def total_messages(self) -> int:
        return self.root.messages

    def phase(self, name: str, subset_size: int, rounds: int, messages: int) -> PhaseRecord:
        rec = PhaseRecord(name, subset_size, rounds, messages)
        self._stack[-1].children.append(rec)
        return rec

    @contextmanager
    def group(self, name: str, parallel: bool = False):
        grp = GroupRecord(name, parallel)
        self._stack[-1].children.append(grp)
        self._stack.append(grp)
        try:
            yield grp
        finally:
            self._stack.pop()

    def leaves(self) -> list[tuple[str, PhaseRecord]]:
        out: list[tuple[str, PhaseRecord]] = []

        def walk(node: GroupRecord, prefix: str):
            for child in node.children:
                if isinstance(child, PhaseRecord):
                    path = f"{prefix}/{child.name}" if prefix else child.name
                    out.append((path, child))
                else:
                    sub = f"{prefix}/{child.name}" if prefix else child.name
                    walk(child, sub)

        walk(self.root, "")
        return out

    def find(self, path: str):
        """Locate a group or phase by slash-separated path (first match)."""
        parts = path.split("/")

        def walk(node: GroupRecord, idx: int):
            for child in node.children:
                if child.name == parts[idx]:
                    if idx == len(parts) - 1:
                        return child
                    if isinstance(child, GroupRecord):
                        found = walk(child, idx + 1)
                        if found is not None:
                            return found
            return None

        return walk(self.root, 0)

    def to_text(self) -> str:
        lines = ["# congested-clique cost ledger",
                 "# unit rule: one field element = 1 unit; b-bit values cost ceil(b/ceil(2*log2(n))) units"]
        for path, rec in self.leaves():
            lines.append(
                f"phase={path} subset={rec.subset_size} rounds={rec.rounds} messages={rec.messages}"
            )
        lines.append(f"total rounds={self.total_rounds} messages={self.total_messages}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["phase,rounds,messages"]
        for path, rec in self.leaves():
            lines.append(f"{path},{rec.rounds},{rec.messages}")
        lines.append(f"total,{self.total_rounds},{self.total_messages}")
        return "\n".join(lines) + "\n"


class NodeView:
    """Access handle for one node's local store; the only state a compute sees."""

    __slots__ = ("node", "_store", "_world")

    def __init__(self, node: int, store: dict, world: "CliqueWorld"):
        self.node = node
        self._store = store
        self._world = world

    def get(self, key, default=None):
        return self._store.get(key, default)

    def __getitem__(self, key):
        return self._store[key]

    def put(self, key, value) -> None:
        self._store[key] = value

    def pop(self, key, default=None):
        return self._store.pop(key, default)

    def has(self, key) -> bool:
        return key in self._store

    def rng(self, phase: str) -> random.Random:
        return self._world.node_rng(phase, self.node)


class CliqueWorld:
    """n fully connected nodes, per-node key-value stores, one cost ledger.

    The world is owned by a single driver; node-local steps run in subset
    order, which is observationally identical to any parallel execution
    because computes only touch their own store.
    """

    def __init__(self, n: int, seed: int = 0, field: Optional[PrimeField] = None):
        if n < 1:
            raise ValueError("need at least one node")
        self.n = n
        self.seed = seed
        self.field = field
        self.stores: list[dict] = [dict() for _ in range(n + 1)]  # 1-based
        self.ledger = CostLedger()
        self._name_counter = 0

    def all_nodes(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def fresh_name(self, prefix: str) -> str:
        self._name_counter += 1
        return f"{prefix}{self._name_counter}"

    def view(self, node: int) -> NodeView:
        return NodeView(node, self.stores[node], self)

    def node_rng(self, phase: str, node: int) -> random.Random:
        digest = hashlib.sha256(f"{self.seed}|{phase}|{node}".encode()).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def run_local(self, subset: Sequence[int], phase: str,
                  fn: Callable[[NodeView], None]) -> None:
        """Node-local computation on every node of the subset; zero rounds."""
        for node in subset:
            fn(self.view(node))
        self.ledger.phase(phase, len(subset), 0, 0)

    def route(self, subset: Sequence[int], phase: str,
              build: Callable[[NodeView], Iterable[tuple]],
              width: int = 1) -> PhaseRecord:
        """One routed phase.  build(view) yields (dst, key, payload) messages.

        Payloads are ints or numpy arrays of field values; each element counts
        `width` units.  Sources and destinations must lie in the subset.
        """
        members = set(subset)
        n_act = len(subset)
        sent: dict[int, int] = {}
        recv: dict[int, int] = {}
        staged: list[tuple[int, object, object]] = []
        seen_keys: set = set()
        for node in subset:
            view = self.view(node)
            for dst, key, payload in build(view):
                if dst not in members:
                    raise RoutingViolation(
                        f"phase {phase}: destination {dst} outside active subset")
                size = payload.size if isinstance(payload, np.ndarray) else 1
                if size == 0:
                    continue
                if dst != node:  # self-addressed data stays local and is free
                    units = size * width
                    sent[node] = sent.get(node, 0) + units
                    recv[dst] = recv.get(dst, 0) + units
                if (dst, key) in seen_keys:
                    raise RoutingViolation(
                        f"phase {phase}: duplicate delivery key {key!r} at node {dst}")
                seen_keys.add((dst, key))
                staged.append((dst, key, payload))
        total_sent = sum(sent.values())
        total_recv = sum(recv.values())
        assert total_sent == total_recv  # conservation, by construction
        load = max(max(sent.values(), default=0), max(recv.values(), default=0))
        rounds = 0 if load == 0 else 2 * math.ceil(load / n_act)
        for dst, key, payload in staged:
            if isinstance(payload, np.ndarray):
                payload = payload.copy()
            self.stores[dst][key] = payload
        return self.ledger.phase(phase, n_act, rounds, total_sent)

    def parallel_phases(self, name: str,
                        branches: Sequence[tuple[Sequence[int], Callable[[], None]]]) -> None:
        """Run sub-programs on pairwise disjoint subsets; charge max rounds."""
        taken: set[int] = set()
        for subset, _ in branches:
            sub = set(subset)
            if sub & taken:
                raise DisjointnessError(f"parallel phases of {name} overlap on {sub & taken}")
            taken |= sub
        with self.ledger.group(name, parallel=True):
            for idx, (_, prog) in enumerate(branches):
                with self.ledger.group(f"branch{idx}"):
                    prog()
