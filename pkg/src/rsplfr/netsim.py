"""Message-level simulation of one protocol round.

Servers and users exchange discrete messages; per-user server
unavailability is injected as erasure at the user (signals are broadcast
but not received), matching the robust-correctness formulation where a
user observes only the signals of its available subset.  The transcript
records a canonically ordered message log with logical (phase, step)
timestamps, per-link symbol totals, decode outcomes, and the adversary
views used by the verification oracle.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .pda import STAR
from .scheme import (SchemeConfig, SchemeRun, Library, SchemeError,
                     make_query, measured_tradeoff, placement,
                     robust_decode, server_delivery)


class UnknownAdversary(Exception):
    pass


class ScenarioInvalid(Exception):
    pass


@dataclass
class Scenario:
    """A simulation input: who demands what, and who can hear whom."""

    config: SchemeConfig
    demands: dict               # 1-based user -> demand vector
    availability: dict          # 1-based user -> iterable of server ids
    wiretap: bool = False
    colluding_users: tuple = ()
    colluding_servers: bool = False
    library: Library | None = None

    def __post_init__(self):
        K, H = self.config.K, self.config.H
        if not isinstance(self.demands, dict):
            self.demands = {k: d for k, d in enumerate(self.demands, start=1)}
        if sorted(self.demands) != list(range(1, K + 1)):
            raise ScenarioInvalid(f"need one demand per user 1..{K}")
        avail = {}
        for k in range(1, K + 1):
            subset = tuple(sorted(set(self.availability.get(k, range(1, H + 1)))))
            if any(not 1 <= h <= H for h in subset):
                raise ScenarioInvalid(f"user {k} lists servers outside [1,{H}]")
            avail[k] = subset
        self.availability = avail
        self.colluding_users = tuple(sorted(set(self.colluding_users)))
        if any(not 1 <= k <= K for k in self.colluding_users):
            raise ScenarioInvalid("colluding_users outside [1,K]")


@dataclass
class Message:
    phase: str
    step: int
    sender: str
    receiver: str
    symbols: int


@dataclass
class Transcript:
    """Everything observable about one simulated round."""

    scenario: Scenario
    run: SchemeRun = dc_field(repr=False)
    messages: list
    link_totals: dict
    decode_outcomes: dict
    tradeoff: object

    def downlink_payload_symbols(self) -> int:
        return sum(sig.symbol_count for sig in self.run.signals.values())


def simulate(scenario: Scenario) -> Transcript:
    """Run one full round and log it.

    Per-user decode errors are recorded in the outcomes, never raised, so
    one starved user does not abort the round.
    """
    config = scenario.config
    K, H, N = config.K, config.H, config.N
    rng = random.Random(config.seed)
    pl = placement(config, library=scenario.library, rng=rng)

    messages = []
    step = 0
    b = config.packet_size
    for h in range(1, H + 1):
        messages.append(Message("placement", step, "library", f"server{h}",
                                N * config.F * b))
        step += 1
    if config.variant.uses_security_keys:
        messages.append(Message("placement", step, "keysource", "servers",
                                config.L * config.S * b))
        step += 1
    for k in range(1, K + 1):
        messages.append(Message("placement", step, "library", f"user{k}",
                                pl.user_states[k].cache_symbols))
        step += 1

    queries = {k: make_query(pl.user_states[k], scenario.demands[k])
               for k in range(1, K + 1)}
    for h in range(1, H + 1):
        for k in range(1, K + 1):
            messages.append(Message("query", step, f"user{k}", f"server{h}", N))
            step += 1

    signals = {h: server_delivery(h, queries, pl.server_stores[h], pl.keys, config)
               for h in range(1, H + 1)}
    for h in range(1, H + 1):
        sig = signals[h]
        messages.append(Message("delivery", step, f"server{h}", "broadcast",
                                sig.symbol_count + sig.overhead_count))
        step += 1

    outcomes = {}
    decoded = {}
    for k in range(1, K + 1):
        received = {h: signals[h] for h in scenario.availability[k]}
        expected = pl.library.function_value(config.field, scenario.demands[k])
        try:
            value = robust_decode(pl.user_states[k], scenario.demands[k],
                                  received, queries)
        except SchemeError as exc:
            outcomes[k] = {"ok": False, "correct": False,
                           "error": type(exc).__name__}
            continue
        decoded[k] = value
        outcomes[k] = {"ok": True, "correct": value == expected, "error": None}

    link_totals = {}
    for m in messages:
        key = f"{m.sender}->{m.receiver}"
        link_totals[key] = link_totals.get(key, 0) + m.symbols

    run = SchemeRun(config=config, placement=pl, demands=scenario.demands,
                    queries=queries, signals=signals, decoded=decoded or None)
    return Transcript(scenario=scenario, run=run, messages=messages,
                      link_totals=link_totals, decode_outcomes=outcomes,
                      tradeoff=measured_tradeoff(run))


def extract_adversary_view(transcript: Transcript, kind: str):
    """The exact conditioning tuple of the matching privacy condition.

    kind: "wiretapper" (all signals), "colluding-servers" (queries, coded
    library, shared keys) or "colluding-users" (caches and demands of the
    colluding set plus all signals).
    """
    run = transcript.run
    config = run.config
    if kind == "wiretapper":
        return {"X": {h: _signal_dict(run.signals[h]) for h in run.signals}}
    if kind == "colluding-servers":
        pl = run.placement
        coded = {f"{n},{h},{i}": _hex(pl.server_stores[h].coded[(n, i)])
                 for h in pl.server_stores
                 for n in range(1, config.N + 1)
                 for i in range(1, config.F + 1)}
        keys = {} if pl.keys is None else \
            {f"{l},{s}": _hex(v) for (l, s), v in sorted(pl.keys.V.items())}
        return {"queries": {k: list(v) for k, v in sorted(run.queries.items())},
                "coded_library": coded, "keys": keys}
    if kind == "colluding-users":
        S = transcript.scenario.colluding_users
        pl = run.placement
        caches = {}
        for k in S:
            u = pl.user_states[k]
            caches[k] = {
                "p": list(u.p),
                "star": {f"{n},{l},{i}": _hex(v)
                         for (n, l, i), v in sorted(u.star.items())},
                "masked": {f"{l},{i}": _hex(v)
                           for (l, i), v in sorted(u.masked.items())},
            }
        return {"S": list(S), "caches": caches,
                "demands": {k: list(run.demands[k]) for k in S},
                "X": {h: _signal_dict(run.signals[h]) for h in run.signals}}
    raise UnknownAdversary(f"unknown adversary kind {kind!r}")


def _hex(block) -> str:
    return "".join(f"{v:04x}" for v in block)


def _signal_dict(sig) -> dict:
    return {"queries": {k: list(v) for k, v in sig.queries},
            "blocks": {str(s): _hex(block) for s, block in sorted(sig.payload.items())},
            "symbol_count": sig.symbol_count,
            "overhead_count": sig.overhead_count}


def _frac(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def transcript_to_json(transcript: Transcript) -> str:
    """Canonical JSON: deterministic bytes for a given (config, scenario)."""
    run = transcript.run
    config = run.config
    trade = transcript.tradeoff
    views = {}
    if transcript.scenario.wiretap:
        views["wiretapper"] = extract_adversary_view(transcript, "wiretapper")
    if transcript.scenario.colluding_servers:
        views["colluding-servers"] = extract_adversary_view(transcript,
                                                            "colluding-servers")
    if transcript.scenario.colluding_users:
        views["colluding-users"] = extract_adversary_view(transcript,
                                                          "colluding-users")
    doc = {
        "config": {"N": config.N, "K": config.K, "L": config.L, "H": config.H,
                   "q": config.q, "B": config.B, "seed": config.seed,
                   "variant": config.variant.value,
                   "pda": _pda_rows(config),
                   "G": [list(row) for row in config.code.G]},
        "demands": {str(k): list(v) for k, v in sorted(run.demands.items())},
        "availability": {str(k): list(v) for k, v in
                         sorted(transcript.scenario.availability.items())},
        "queries": {str(k): list(v) for k, v in sorted(run.queries.items())},
        "signals": {str(h): _signal_dict(run.signals[h])
                    for h in sorted(run.signals)},
        "decode": {str(k): transcript.decode_outcomes[k]
                   for k in sorted(transcript.decode_outcomes)},
        "messages": [[m.phase, m.step, m.sender, m.receiver, m.symbols]
                     for m in transcript.messages],
        "link_totals": transcript.link_totals,
        "tradeoff": {"M_measured": _frac(trade.M_measured),
                     "M_payload_only": _frac(trade.M_payload_only),
                     "R_measured": _frac(trade.R_measured),
                     "R_payload_only": _frac(trade.R_payload_only),
                     "R_payload_worst_case": _frac(trade.R_payload_worst_case),
                     "blocks_per_server": trade.blocks_per_server,
                     "realized_rank": trade.realized_rank},
        "adversary_views": views,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _pda_rows(config: SchemeConfig):
    return [["*" if a is STAR else a for a in row]
            for row in config.pda.entries]
