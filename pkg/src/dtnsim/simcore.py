"""The discrete-time engine: links, transfers, buffers, traffic, events.

Time advances in fixed ticks. Every tick runs the same phase order:

1. movement            -- every node's mover steps
2. connectivity        -- links come up/down by range; broken transfers abort
3. contact hooks       -- the router sees each new link once
4. transfer progress   -- active transfers consume bandwidth * dt bytes
5. forwarding          -- idle links may start at most one new transfer
6. traffic generation  -- new messages appear at their sources
7. sampling            -- report collectors observe the world

All iteration orders are fixed (node order, then sorted link pairs), and all
randomness comes from named substreams of the master seed, so a run is a
pure function of (config, seed): identical inputs give byte-identical event
logs and reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np


class SimulationError(RuntimeError):
    """An internal invariant broke mid-run; the run is not salvageable."""


# ---------------------------------------------------------------------------
# Messages and buffers


@dataclass(frozen=True)
class Message:
    """One unit of store-carry-forward traffic.

    ``hops`` is the trail of this particular copy, starting at the source;
    every relay extends it by the receiving node.
    """

    id: str
    source: str
    destination: str
    size: int
    created_at: float
    hops: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.hops:
            object.__setattr__(self, "hops", (self.source,))
        if self.hops[0] != self.source:
            raise SimulationError(f"{self.id}: hop trail must start at the source")

    def extended_to(self, node_id: str) -> "Message":
        if self.hops[-1] == node_id:
            raise SimulationError(f"{self.id}: consecutive duplicate hop {node_id}")
        return replace(self, hops=self.hops + (node_id,))


@dataclass
class _BufferEntry:
    message: Message
    received_at: float


class Buffer:
    """Byte-capacity message store with drop-oldest eviction."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError(f"buffer capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        self.used = 0
        self.high_water_entries = 0
        self._entries: dict[str, _BufferEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, message_id: str) -> bool:
        return message_id in self._entries

    def ids(self) -> set[str]:
        return set(self._entries)

    def messages(self) -> list[Message]:
        return [e.message for e in self._entries.values()]

    def entries(self) -> list[tuple[Message, float]]:
        return [(e.message, e.received_at) for e in self._entries.values()]

    def get(self, message_id: str) -> Message:
        return self._entries[message_id].message

    def enqueue(self, message: Message, now: float) -> tuple[bool, list[Message]]:
        """Insert, evicting oldest-received entries until the message fits.

        Oversize messages are rejected outright; a message never evicts a
        copy of itself (duplicates are rejected instead).
        """
        if message.size > self.capacity:
            return False, []
        if message.id in self._entries:
            return False, []
        dropped: list[Message] = []
        while self.used + message.size > self.capacity:
            victim_id = next(iter(self._entries))
            dropped.append(self.remove(victim_id))
        self._entries[message.id] = _BufferEntry(message, now)
        self.used += message.size
        self.high_water_entries = max(self.high_water_entries, len(self._entries))
        return True, dropped

    def remove(self, message_id: str) -> Message:
        entry = self._entries.pop(message_id)
        self.used -= entry.message.size
        return entry.message

    def occupancy(self) -> float:
        return self.used / self.capacity


# ---------------------------------------------------------------------------
# Radio and links


@dataclass(frozen=True)
class RadioConfig:
    range: float          # meters
    bandwidth: float      # bytes per second

    def __post_init__(self):
        if self.range <= 0 or self.bandwidth <= 0:
            raise ValueError("radio range and bandwidth must be positive")


@dataclass
class Transfer:
    message: Message      # the sender's copy
    sender: int           # node indices
    receiver: int
    tokens: int
    bytes_remaining: float
    started_at: float


@dataclass
class Link:
    a: int
    b: int
    up_since: float
    transfer: Transfer | None = None
    next_sender: int = -1  # fairness: who may start the next non-direct transfer


def update_connectivity(positions: Sequence[tuple[float, float]], radio: RadioConfig,
                        links: set[tuple[int, int]]) -> tuple[set[tuple[int, int]], list[tuple[int, int]], list[tuple[int, int]]]:
    """Pure range check: which index pairs are connected now.

    Returns (current pair set, new pairs, vanished pairs); the boundary is
    closed, so distance exactly equal to the range still connects.
    """
    n = len(positions)
    if n < 2:
        gone = sorted(links)
        return set(), [], gone
    pos = np.asarray(positions, dtype=float)
    diff = pos[:, None, :] - pos[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    within = d2 <= radio.range * radio.range
    iu, ju = np.triu_indices(n, k=1)
    mask = within[iu, ju]
    current = {(int(i), int(j)) for i, j in zip(iu[mask], ju[mask])}
    ups = sorted(current - links)
    downs = sorted(links - current)
    return current, ups, downs


# ---------------------------------------------------------------------------
# Event log

EV_CREATED = "created"
EV_STARTED = "started"
EV_RELAYED = "relayed"
EV_ABORTED = "aborted"
EV_DROPPED = "dropped"
EV_DELIVERED = "delivered"
EV_LINK_UP = "link_up"
EV_LINK_DOWN = "link_down"


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    fields: tuple

    def line(self) -> str:
        return " ".join([repr(self.time), self.kind, *map(str, self.fields)])


class EventLog:
    """Append-only, time-ordered record of everything that happened."""

    def __init__(self):
        self.records: list[Event] = []
        self._last_time = -math.inf

    def append(self, time: float, kind: str, *fields) -> Event:
        if time < self._last_time:
            raise SimulationError(f"event time went backwards: {time} after {self._last_time}")
        self._last_time = time
        ev = Event(time, kind, tuple(fields))
        self.records.append(ev)
        return ev

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for ev in self.records:
            out[ev.kind] = out.get(ev.kind, 0) + 1
        return out

    def lines(self) -> Iterable[str]:
        for ev in self.records:
            yield ev.line()


# ---------------------------------------------------------------------------
# Traffic generation


@dataclass(frozen=True)
class TrafficConfig:
    interval_min: float = 25.0
    interval_max: float = 35.0
    size_min: int = 512_000
    size_max: int = 1_000_000
    start: float = 0.0
    end: float = math.inf

    def __post_init__(self):
        if not (0 < self.interval_min <= self.interval_max):
            raise ValueError("bad message interval range")
        if not (0 < self.size_min <= self.size_max):
            raise ValueError("bad message size range")
        if self.start < 0 or self.end < self.start:
            raise ValueError("bad generation window")


class MessageGenerator:
    """Emits messages with uniform inter-creation gaps and uniform endpoints."""

    def __init__(self, config: TrafficConfig, node_ids: Sequence[str], rng: np.random.Generator):
        if len(node_ids) < 2:
            raise ValueError("traffic needs at least 2 nodes")
        self.config = config
        self.node_ids = list(node_ids)
        self.rng = rng
        self.count = 0
        self._next_time = config.start + rng.uniform(config.interval_min, config.interval_max)

    def poll(self, now: float) -> list[Message]:
        """All messages whose scheduled creation falls at or before ``now``."""
        out = []
        horizon = min(now, self.config.end)
        while self._next_time <= horizon:
            src_idx = int(self.rng.integers(0, len(self.node_ids)))
            dst_idx = int(self.rng.integers(0, len(self.node_ids) - 1))
            if dst_idx >= src_idx:
                dst_idx += 1
            size = int(self.rng.integers(self.config.size_min, self.config.size_max + 1))
            self.count += 1
            out.append(Message(
                id=f"M{self.count}",
                source=self.node_ids[src_idx],
                destination=self.node_ids[dst_idx],
                size=size,
                created_at=now,
            ))
            self._next_time += self.rng.uniform(self.config.interval_min, self.config.interval_max)
        return out


# ---------------------------------------------------------------------------
# Nodes and the world


class SimNode:
    """Engine-side node: identity, mover, buffer, and protocol state."""

    def __init__(self, index: int, node_id: str, mover, buffer: Buffer):
        self.index = index
        self.id = node_id
        self.mover = mover
        self.buffer = buffer
        self.router_state = None
        self.incoming: set[str] = set()    # ids currently being received
        self.delivered: set[str] = set()   # ids consumed here as destination
        self._outgoing: dict[str, int] = {}  # id -> active outgoing transfer count

    @property
    def position(self):
        return self.mover.position

    def outgoing_ids(self) -> set[str]:
        return set(self._outgoing)

    def note_outgoing(self, message_id: str, delta: int) -> None:
        n = self._outgoing.get(message_id, 0) + delta
        if n < 0:
            raise SimulationError(f"outgoing count underflow for {message_id}")
        if n == 0:
            self._outgoing.pop(message_id, None)
        else:
            self._outgoing[message_id] = n


class World:
    """A complete simulation state plus the tick loop."""

    def __init__(self, nodes: Sequence[SimNode], radio: RadioConfig, router,
                 traffic: MessageGenerator | None, dt: float,
                 collectors: Sequence[object] = ()):
        if dt <= 0:
            raise ValueError(f"tick must be positive, got {dt}")
        self.nodes = list(nodes)
        self.radio = radio
        self.router = router
        self.traffic = traffic
        self.dt = dt
        self.tick_index = 0
        self.now = 0.0
        self.links: dict[tuple[int, int], Link] = {}
        self.log = EventLog()
        self.collectors = list(collectors)
        for node in self.nodes:
            node.router_state = router.new_state(0.0)
        for c in self.collectors:
            attach = getattr(c, "attach", None)
            if attach:
                attach(self)

    # -- event plumbing ----------------------------------------------------

    def _emit(self, kind: str, *fields) -> None:
        ev = self.log.append(self.now, kind, *fields)
        for c in self.collectors:
            c.on_event(ev)

    # -- tick phases -------------------------------------------------------

    def step(self) -> None:
        self.tick_index += 1
        self.now = self.tick_index * self.dt

        for node in self.nodes:                      # 1. movement
            node.mover.step(self.now, self.dt)

        self._update_links()                         # 2 + 3. links and contacts
        self._progress_transfers()                   # 4. bytes move
        self._start_transfers()                      # 5. new transfers
        self._generate_traffic()                     # 6. new messages

        for c in self.collectors:                    # 7. sampling
            sample = getattr(c, "sample", None)
            if sample:
                sample(self, self.now)

    def run(self, duration: float) -> None:
        n_ticks = int(round(duration / self.dt))
        for _ in range(n_ticks):
            self.step()

    def finalize(self) -> None:
        for c in self.collectors:
            fin = getattr(c, "finalize", None)
            if fin:
                fin(self, self.now)

    # -- phase 2/3: connectivity -------------------------------------------

    def _update_links(self) -> None:
        positions = [n.position for n in self.nodes]
        _, ups, downs = update_connectivity(positions, self.radio, set(self.links))
        for pair in downs:
            link = self.links.pop(pair)
            if link.transfer is not None:
                self._abort(link)
            self._emit(EV_LINK_DOWN, self.nodes[pair[0]].id, self.nodes[pair[1]].id,
                       self.now - link.up_since)
        new_links = []
        for pair in ups:
            link = Link(pair[0], pair[1], up_since=self.now)
            self.links[pair] = link
            self._emit(EV_LINK_UP, self.nodes[pair[0]].id, self.nodes[pair[1]].id)
            new_links.append(link)
        for link in new_links:
            self.router.on_contact(self.nodes[link.a], self.nodes[link.b], self.now)

    def _abort(self, link: Link) -> None:
        tr = link.transfer
        link.transfer = None
        sender, receiver = self.nodes[tr.sender], self.nodes[tr.receiver]
        receiver.incoming.discard(tr.message.id)
        sender.note_outgoing(tr.message.id, -1)
        self._emit(EV_ABORTED, tr.message.id, sender.id, receiver.id)

    # -- phase 4: transfer progress ------------------------------------------

    def _progress_transfers(self) -> None:
        budget = self.radio.bandwidth * self.dt
        for pair in sorted(self.links):
            link = self.links[pair]
            tr = link.transfer
            if tr is None:
                continue
            tr.bytes_remaining -= budget
            if tr.bytes_remaining <= 0:
                link.transfer = None
                self._complete(tr)

    def _complete(self, tr: Transfer) -> None:
        sender, receiver = self.nodes[tr.sender], self.nodes[tr.receiver]
        receiver.incoming.discard(tr.message.id)
        sender.note_outgoing(tr.message.id, -1)
        if tr.message.id not in sender.buffer:
            raise SimulationError(f"completed transfer of {tr.message.id} not in sender buffer")
        copy = tr.message.extended_to(receiver.id)
        delivered = tr.message.destination == receiver.id
        self._emit(EV_RELAYED, tr.message.id, sender.id, receiver.id)
        if delivered:
            receiver.delivered.add(tr.message.id)
            self._emit(EV_DELIVERED, tr.message.id, sender.id, receiver.id, len(copy.hops) - 1)
            self.router.on_complete(sender, receiver, tr.message, tr.tokens, True, self.now)
            self._remove_from_buffer(sender, tr.message.id)
        else:
            accepted, evicted = receiver.buffer.enqueue(copy, self.now)
            if not accepted:
                raise SimulationError(
                    f"receiver {receiver.id} rejected {tr.message.id} after a completed transfer")
            for victim in evicted:
                self._note_drop(receiver, victim.id)
            self.router.on_complete(sender, receiver, tr.message, tr.tokens, False, self.now)

    def _remove_from_buffer(self, node: SimNode, message_id: str) -> None:
        node.buffer.remove(message_id)
        self._abort_outgoing_of(node, message_id)

    def _note_drop(self, node: SimNode, message_id: str) -> None:
        self._emit(EV_DROPPED, message_id, node.id)
        on_dropped = getattr(self.router, "on_dropped", None)
        if on_dropped:
            on_dropped(node, message_id)
        self._abort_outgoing_of(node, message_id)

    def _abort_outgoing_of(self, node: SimNode, message_id: str) -> None:
        """A node that no longer holds a message cannot finish sending it."""
        if message_id not in node.outgoing_ids():
            return
        for pair in sorted(self.links):
            tr = self.links[pair].transfer
            if tr is not None and tr.sender == node.index and tr.message.id == message_id:
                self._abort(self.links[pair])

    # -- phase 5: forwarding ---------------------------------------------------

    def _start_transfers(self) -> None:
        for pair in sorted(self.links):
            link = self.links[pair]
            if link.transfer is not None:
                continue
            a, b = self.nodes[link.a], self.nodes[link.b]
            if link.next_sender < 0:
                link.next_sender = link.a
            first, second = (a, b) if link.next_sender == a.index else (b, a)
            # final-hop deliveries preempt either direction; everything else
            # alternates so one chatty side cannot monopolize the link
            (self._try_start(link, a, b, only_direct=True)
             or self._try_start(link, b, a, only_direct=True)
             or self._try_start(link, first, second)
             or self._try_start(link, second, first))

    def _try_start(self, link: Link, carrier: SimNode, peer: SimNode,
                   only_direct: bool = False) -> bool:
        decision = self.router.select(carrier, peer, self.now)
        for message, tokens in decision:
            if only_direct and message.destination != peer.id:
                continue
            if message.id not in carrier.buffer:
                continue
            if message.id in peer.incoming or message.id in peer.buffer or message.id in peer.delivered:
                continue
            if message.destination != peer.id and message.size > peer.buffer.capacity:
                continue  # the peer could never store it
            if tokens < 1:
                raise SimulationError(f"router selected {message.id} with {tokens} tokens")
            link.transfer = Transfer(message=message, sender=carrier.index,
                                     receiver=peer.index, tokens=tokens,
                                     bytes_remaining=float(message.size),
                                     started_at=self.now)
            peer.incoming.add(message.id)
            carrier.note_outgoing(message.id, +1)
            link.next_sender = peer.index
            self._emit(EV_STARTED, message.id, carrier.id, peer.id)
            return True
        return False

    # -- phase 6: traffic ---------------------------------------------------

    def _generate_traffic(self) -> None:
        if self.traffic is None:
            return
        by_id = {n.id: n for n in self.nodes}
        for message in self.traffic.poll(self.now):
            source = by_id[message.source]
            self._emit(EV_CREATED, message.id, message.source, message.destination,
                       message.size)
            accepted, evicted = source.buffer.enqueue(message, self.now)
            if accepted:
                for victim in evicted:
                    self._note_drop(source, victim.id)
                self.router.on_created(source, message)
            # an oversize message exists but can never be carried

    # -- helpers -------------------------------------------------------------

    def node_by_id(self, node_id: str) -> SimNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)
