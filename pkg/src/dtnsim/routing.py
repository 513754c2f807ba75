"""Router behaviors: predictability tables, copy tokens, and flooding.

Three routers are provided.

* ``prophet``: every node keeps a per-peer delivery predictability P in
  [0, 1]. Meeting a peer raises P directly and propagates the peer's own
  table transitively; elapsed time decays every entry exponentially. A
  message is handed to a peer only when the peer's predictability for the
  destination is strictly higher, and the carrier keeps its copy.
* ``saw``: spray-and-wait. Each message starts with a budget of copy
  tokens. While a node holds more than one token it may spray (all
  spraying from the source in ``source`` mode; half the tokens from any
  holder in ``binary`` mode); with one token left it waits for the
  destination itself.
* ``epidemic``: hand every message to every peer that lacks it. Useful as
  an upper-bound oracle in tests and calibration.

Selection functions return an ordered list of ``(message, tokens)`` pairs;
the engine starts transfers in that order. Messages addressed to the peer
itself always sort first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .simcore import Message, SimulationError


# ---------------------------------------------------------------------------
# PROPHET


@dataclass(frozen=True)
class ProphetParams:
    p_init: float = 0.75
    beta: float = 0.25
    k: float = 0.0202          # one time unit decays P by e**-k (~0.98)
    time_unit: float = 1.0     # seconds per aging unit
    prune_floor: float = 1e-6  # entries below this are forgotten

    def __post_init__(self) -> None:
        if not (0 < self.p_init <= 1):
            raise ValueError(f"p_init must be in (0, 1], got {self.p_init}")
        if not (0 <= self.beta <= 1):
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.k < 0 or self.time_unit <= 0:
            raise ValueError("k must be >= 0 and time_unit > 0")


@dataclass
class ProphetState:
    """One node's predictability table."""

    params: ProphetParams
    table: dict[str, float] = field(default_factory=dict)
    last_aged: float = 0.0


def prophet_age(state: ProphetState, now: float) -> ProphetState:
    """Decay every entry by e**(-k * elapsed/time_unit); prune tiny ones."""
    if now < state.last_aged:
        raise ValueError(f"time went backwards: {now} < {state.last_aged}")
    t = (now - state.last_aged) / state.params.time_unit
    if t > 0 and state.table:
        factor = math.exp(-state.params.k * t)
        floor = state.params.prune_floor
        table = state.table
        for peer in list(table):
            p = table[peer] * factor
            if p < floor:
                del table[peer]
            else:
                table[peer] = p
    state.last_aged = now
    return state


def _bump(table: dict[str, float], peer: str, amount: float) -> None:
    old = table.get(peer, 0.0)
    table[peer] = old + (1.0 - old) * amount


def prophet_encounter(a: ProphetState, b: ProphetState, a_id: str, b_id: str,
                      now: float) -> tuple[ProphetState, ProphetState]:
    """Apply the contact update to both sides: age, direct bump, transitive.

    The transitive pass uses the freshly bumped direct value, and never
    lowers an existing entry.
    """
    if a_id == b_id:
        raise ValueError("a node cannot encounter itself")
    prophet_age(a, now)
    prophet_age(b, now)
    _bump(a.table, b_id, a.params.p_init)
    _bump(b.table, a_id, b.params.p_init)
    p_ab = a.table[b_id]
    p_ba = b.table[a_id]
    for c, p_bc in list(b.table.items()):
        if c == a_id:
            continue
        old = a.table.get(c, 0.0)
        a.table[c] = max(old, old + (1.0 - old) * p_ab * p_bc * a.params.beta)
    for c, p_ac in list(a.table.items()):
        if c == b_id:
            continue
        old = b.table.get(c, 0.0)
        b.table[c] = max(old, old + (1.0 - old) * p_ba * p_ac * b.params.beta)
    return a, b


def prophet_select(messages: Iterable[Message], carrier: ProphetState,
                   peer: ProphetState, peer_id: str,
                   peer_has: frozenset[str] | set[str] = frozenset()) -> list[tuple[Message, int]]:
    """Pick messages the peer should receive, best predictability first.

    Messages addressed to the peer always go (first); anything else goes
    only when the peer's predictability for its destination is strictly
    higher than the carrier's. The carrier keeps its copy either way.
    """
    direct: list[tuple[Message, int]] = []
    scored: list[tuple[float, Message]] = []
    for msg in messages:
        if msg.id in peer_has:
            continue
        if msg.destination == peer_id:
            direct.append((msg, 1))
            continue
        if peer.table.get(msg.destination, 0.0) > carrier.table.get(msg.destination, 0.0):
            scored.append((peer.table[msg.destination], msg))
    scored.sort(key=lambda item: -item[0])  # stable: buffer order breaks ties
    return direct + [(msg, 1) for _, msg in scored]


# ---------------------------------------------------------------------------
# Spray and wait


@dataclass(frozen=True)
class SawParams:
    copies: int = 6
    mode: str = "source"  # "source" | "binary"

    def __post_init__(self) -> None:
        if self.copies < 1:
            raise ValueError(f"copies must be >= 1, got {self.copies}")
        if self.mode not in ("source", "binary"):
            raise ValueError(f"mode must be source or binary, got {self.mode!r}")


@dataclass
class SawState:
    """Copy tokens remaining per buffered message."""

    params: SawParams
    tokens: dict[str, int] = field(default_factory=dict)


def saw_select(messages: Iterable[Message], state: SawState, carrier_id: str,
               peer_id: str, peer_has: frozenset[str] | set[str] = frozenset(),
               in_transit: frozenset[str] | set[str] = frozenset()) -> list[tuple[Message, int]]:
    """Pick (message, token) pairs for this contact.

    Direct hits hand over every remaining token. Spraying requires more
    than one token, a peer that lacks the message, and (in source mode)
    that the carrier is the message's origin. ``in_transit`` excludes
    messages this carrier is already pushing on another link, keeping the
    token ledger race-free.
    """
    direct: list[tuple[Message, int]] = []
    sprays: list[tuple[Message, int]] = []
    for msg in messages:
        if msg.id in in_transit:
            continue
        n = state.tokens.get(msg.id, 1)
        if msg.destination == peer_id:
            direct.append((msg, n))
            continue
        if msg.id in peer_has or n <= 1:
            continue
        if state.params.mode == "source":
            if msg.source == carrier_id:
                sprays.append((msg, 1))
        else:
            sprays.append((msg, n // 2))
    return direct + sprays


def saw_on_complete(sender: SawState, receiver: SawState | None, message_id: str,
                    tokens_moved: int, delivered: bool) -> None:
    """Settle the token ledger after a finished transfer.

    Delivery consumes the sender's entry entirely; a spray moves
    ``tokens_moved`` tokens across, which must leave the sender at least one.
    """
    if delivered:
        sender.tokens.pop(message_id, None)
        return
    n = sender.tokens.get(message_id, 0)
    if n - tokens_moved < 1:
        raise SimulationError(
            f"token underflow on {message_id}: had {n}, moved {tokens_moved}")
    sender.tokens[message_id] = n - tokens_moved
    if receiver is not None:
        receiver.tokens[message_id] = tokens_moved


# ---------------------------------------------------------------------------
# Epidemic


def epidemic_select(messages: Iterable[Message], peer_id: str,
                    peer_has: frozenset[str] | set[str] = frozenset()) -> list[tuple[Message, int]]:
    """Offer everything the peer lacks: destination hits first, then newest
    messages before old ones.

    Spreading newest-first keeps fresh traffic moving when contacts are too
    short to drain the whole queue; a FIFO queue would spend every contact
    re-pushing ancient messages and starve recent ones.
    """
    direct: list[tuple[Message, int]] = []
    rest: list[tuple[Message, int]] = []
    for msg in messages:
        if msg.id in peer_has:
            continue
        (direct if msg.destination == peer_id else rest).append((msg, 1))
    rest.sort(key=lambda pair: -pair[0].created_at)  # stable: ties keep buffer order
    return direct + rest


# ---------------------------------------------------------------------------
# Engine-facing drivers


class Router:
    """Base driver; per-node protocol state lives on the node itself."""

    kind = "?"

    def new_state(self, now: float):
        return None

    def on_contact(self, node_a, node_b, now: float) -> None:
        pass

    def on_created(self, node, message: Message) -> None:
        pass

    def select(self, carrier, peer, now: float) -> list[tuple[Message, int]]:
        raise NotImplementedError

    def on_complete(self, sender, receiver, message: Message, tokens: int,
                    delivered: bool, now: float) -> None:
        pass

    def on_dropped(self, node, message_id: str) -> None:
        pass


def _peer_known_ids(peer) -> set[str]:
    """Everything a peer effectively has: buffered, arriving, or consumed."""
    return peer.buffer.ids() | peer.incoming | peer.delivered


class EpidemicRouter(Router):
    kind = "epidemic"

    def select(self, carrier, peer, now):
        return epidemic_select(carrier.buffer.messages(), peer.id, _peer_known_ids(peer))


class ProphetRouter(Router):
    kind = "prophet"

    def __init__(self, params: ProphetParams | None = None):
        self.params = params or ProphetParams()

    def new_state(self, now: float) -> ProphetState:
        return ProphetState(params=self.params, last_aged=now)

    def on_contact(self, node_a, node_b, now):
        prophet_encounter(node_a.router_state, node_b.router_state,
                          node_a.id, node_b.id, now)

    def select(self, carrier, peer, now):
        prophet_age(carrier.router_state, now)
        prophet_age(peer.router_state, now)
        return prophet_select(carrier.buffer.messages(), carrier.router_state,
                              peer.router_state, peer.id, _peer_known_ids(peer))


class SawRouter(Router):
    kind = "saw"

    def __init__(self, params: SawParams | None = None):
        self.params = params or SawParams()

    def new_state(self, now: float) -> SawState:
        return SawState(params=self.params)

    def on_created(self, node, message):
        node.router_state.tokens[message.id] = self.params.copies

    def select(self, carrier, peer, now):
        return saw_select(carrier.buffer.messages(), carrier.router_state, carrier.id,
                          peer.id, _peer_known_ids(peer), carrier.outgoing_ids())

    def on_complete(self, sender, receiver, message, tokens, delivered, now):
        saw_on_complete(sender.router_state,
                        None if delivered else receiver.router_state,
                        message.id, tokens, delivered)

    def on_dropped(self, node, message_id: str) -> None:
        node.router_state.tokens.pop(message_id, None)


def make_router(kind: str, *, prophet: ProphetParams | None = None,
                saw: SawParams | None = None) -> Router:
    if kind == "epidemic":
        return EpidemicRouter()
    if kind == "prophet":
        return ProphetRouter(prophet)
    if kind == "saw":
        return SawRouter(saw)
    raise ValueError(f"unknown router {kind!r}")
