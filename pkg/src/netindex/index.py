"""Instances I(X, R) of the index coding problem and the mu lower bound."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import UnknownMessageId, UsageError, WantsInHas

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Client:
    wants: int
    has: tuple[int, ...]

    def to_json(self) -> dict:
        return {"wants": self.wants, "has": list(self.has)}


@dataclass(frozen=True)
class IndexInstance:
    k: int
    clients: tuple[Client, ...]
    names: tuple[str, ...] | None = None

    def name(self, msg: int) -> str:
        return self.names[msg - 1] if self.names else f"x{msg}"

    def to_json(self) -> dict:
        out: dict[str, Any] = {"k": self.k, "clients": [c.to_json() for c in self.clients]}
        if self.names:
            out["names"] = list(self.names)
        return out


@dataclass(frozen=True)
class RateReport:
    n: int
    q: int
    l: int
    rate: Fraction
    mu: int
    achieves_bound: bool
    linear: bool = True

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "q": self.q,
            "l": self.l,
            "rate": str(self.rate),
            "mu": self.mu,
            "achieves_bound": self.achieves_bound,
        }
        # the linear optimum is only claimed for linear codes
        out["lambda_star" if self.linear else "lambda"] = str(self.rate)
        return out


def validate_index_instance(raw: Mapping[str, Any] | IndexInstance, *, warn_duplicates: bool = True) -> IndexInstance:
    """Parse and check an index instance; clients come back sorted by (wants, has).

    A client asking for several messages becomes one client per message.
    Repeated clients are kept, with a warning, so that positional client
    labels stay meaningful.
    """
    if isinstance(raw, IndexInstance):
        raw = raw.to_json()
    try:
        k = int(raw["k"])
        objs = raw["clients"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"index instance needs 'k' and 'clients': {exc}") from None
    names = raw.get("names")
    if names is not None:
        names = tuple(str(s) for s in names)
        if len(names) != k:
            raise UsageError(f"{len(names)} names for {k} messages")
    clients = []
    for pos, obj in enumerate(objs):
        wants = obj["wants"]
        wants = [int(w) for w in wants] if isinstance(wants, (list, tuple)) else [int(wants)]
        has = tuple(sorted({int(h) for h in obj.get("has", [])}))
        for h in has:
            if not 1 <= h <= k:
                raise UnknownMessageId(f"client {pos} has unknown message {h}")
        for w in wants:
            if not 1 <= w <= k:
                raise UnknownMessageId(f"client {pos} wants unknown message {w}")
            if w in has:
                raise WantsInHas(f"client {pos} wants x{w}, which it already has")
            clients.append(Client(w, has))
    dupes = [c for c, n in Counter(clients).items() if n > 1]
    if dupes and warn_duplicates:
        log.warning("index instance repeats %d client(s), e.g. %s", len(dupes), dupes[0])
    return IndexInstance(k, tuple(sorted(clients)), names)


def compute_mu(instance: IndexInstance) -> int:
    """Largest number of distinct messages wanted by clients sharing one has-set."""
    groups: dict[tuple[int, ...], set[int]] = defaultdict(set)
    for c in instance.clients:
        groups[c.has].add(c.wants)
    return max((len(s) for s in groups.values()), default=0)


def relabel(instance: IndexInstance, perm: Sequence[int]) -> IndexInstance:
    """Rename message i to perm[i-1]."""
    clients = [Client(perm[c.wants - 1], tuple(sorted(perm[h - 1] for h in c.has))) for c in instance.clients]
    return IndexInstance(instance.k, tuple(sorted(clients)))
