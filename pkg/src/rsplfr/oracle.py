"""Exhaustive information-theoretic verification on micro instances.

Every check here enumerates the full probability space of a configuration
(all file realizations, key blocks, user randomness and demands, each
combination occurring exactly once) and tests the claimed independences by
exact integer counting.  A verdict of "holds" therefore means the mutual
information is the rational number zero, not a tolerance pass.

The probability spaces explode quickly; instances above the enumeration
budget are rejected with guidance instead of silently sampled.  Only the
correctness check falls back to randomized sampling, since its space
(demand tuples times per-user server subsets) is often the one worth
testing at larger scale.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product

from .scheme import (Library, Randomness, SchemeConfig, Variant,
                     make_query, placement, placement_with, robust_decode,
                     server_delivery)

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(Exception):
    """The instance's world count exceeds the enumeration budget."""


def enumeration_budget() -> int:
    """Default budget, overridable through RSPLFR_BUDGET."""
    raw = os.environ.get("RSPLFR_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def demand_space(config: SchemeConfig) -> list:
    """All demand vectors one user may issue, in a fixed order."""
    if config.variant.file_retrieval_only:
        return [tuple(1 if m == n else 0 for m in range(config.N))
                for n in range(config.N)]
    return [tuple(v) for v in product(range(config.q), repeat=config.N)]


def world_count(config: SchemeConfig) -> int:
    """Exact size of the enumerated probability space."""
    q, N, K, B = config.q, config.N, config.K, config.B
    n_files = q ** (N * B)
    variant = config.variant
    n_keys = q ** (config.L * config.S * config.packet_size) \
        if variant.uses_security_keys else 1
    if not variant.uses_privacy_keys:
        n_p = 1
    elif variant.file_retrieval_only:
        n_p = q ** (K * (N - 1))
    else:
        n_p = q ** (K * N)
    n_d = len(demand_space(config)) ** K
    return n_files * n_keys * n_p * n_d


def _iter_libraries(config: SchemeConfig):
    q, N, B = config.q, config.N, config.B
    for symbols in product(range(q), repeat=N * B):
        files = tuple(symbols[n * B:(n + 1) * B] for n in range(N))
        yield Library(files=files, L=config.L, F=config.F)


def _iter_keys(config: SchemeConfig):
    q, L, S, b = config.q, config.L, config.S, config.packet_size
    if config.variant.uses_security_keys:
        pairs = [(l, s) for l in range(1, L + 1) for s in range(1, S + 1)]
        for symbols in product(range(q), repeat=len(pairs) * b):
            yield {ls: tuple(symbols[j * b:(j + 1) * b])
                   for j, ls in enumerate(pairs)}
    elif config.variant is not Variant.L:
        yield {(l, s): (0,) * b
               for l in range(1, L + 1) for s in range(1, S + 1)}
    else:
        yield None


def _iter_user_randomness(config: SchemeConfig):
    q, K, N = config.q, config.K, config.N
    variant = config.variant
    if not variant.uses_privacy_keys:
        yield None
        return
    if variant.file_retrieval_only:
        space = [tuple(list(head) + [(q - 1 - sum(head)) % q])
                 for head in product(range(q), repeat=N - 1)]
    else:
        space = [tuple(v) for v in product(range(q), repeat=N)]
    for combo in product(space, repeat=K):
        yield {k: combo[k - 1] for k in range(1, K + 1)}


@dataclass
class WorldRecord:
    """One realization with every view the conditions refer to."""

    files: tuple
    demands: tuple      # per user, ascending k
    queries: tuple      # per user, ascending k
    x_view: tuple       # (query echo, per-server payload blocks)
    z_views: tuple      # per user: (p_k, star packets, masked packets)
    wbar_view: tuple    # all coded packets, sorted by (n, h, i)
    v_view: tuple       # key blocks by (l, s); empty when absent


@dataclass
class WorldEnumeration:
    """The fully enumerated probability space of a micro instance."""

    config: SchemeConfig
    records: list = dc_field(repr=False, default_factory=list)

    @property
    def world_count(self) -> int:
        return len(self.records)


def enumerate_worlds(config: SchemeConfig, budget: int | None = None) -> WorldEnumeration:
    """Materialize every world; raises BudgetExceeded above the budget."""
    budget = enumeration_budget() if budget is None else budget
    total = world_count(config)
    if total > budget:
        raise BudgetExceeded(
            f"{total} worlds exceed the budget {budget}; shrink B, q, K, N "
            f"or the PDA (each file symbol multiplies the space by q)")
    K, H = config.K, config.H
    dspace = demand_space(config)
    records = []
    for library in _iter_libraries(config):
        for V in _iter_keys(config):
            for p in _iter_user_randomness(config):
                pl = placement_with(config, library, Randomness(V=V, p=p))
                wbar = tuple(pl.server_stores[h].coded[(n, i)]
                             for n in range(1, config.N + 1)
                             for h in range(1, H + 1)
                             for i in range(1, config.F + 1))
                v_view = tuple(V[ls] for ls in sorted(V)) if V else ()
                z_views = tuple(
                    (pl.user_states[k].p,
                     tuple(sorted(pl.user_states[k].star.items())),
                     tuple(sorted(pl.user_states[k].masked.items())))
                    for k in range(1, K + 1))
                for demands in product(dspace, repeat=K):
                    queries = tuple(
                        make_query(pl.user_states[k], demands[k - 1])
                        for k in range(1, K + 1))
                    qmap = {k: queries[k - 1] for k in range(1, K + 1)}
                    payloads = []
                    for h in range(1, H + 1):
                        sig = server_delivery(h, qmap, pl.server_stores[h],
                                              pl.keys, config)
                        payloads.append(tuple(sorted(sig.payload.items())))
                    x_view = (queries, tuple(payloads))
                    records.append(WorldRecord(
                        files=library.files, demands=demands, queries=queries,
                        x_view=x_view, z_views=z_views, wbar_view=wbar,
                        v_view=v_view))
    return WorldEnumeration(config=config, records=records)


@dataclass
class IndependenceReport:
    """Exact independence test outcome for one condition."""

    condition: str
    variant: Variant
    world_count: int
    max_deviation: Fraction
    subset: tuple | None = None

    @property
    def verdict(self) -> bool:
        """True iff the tested mutual information is exactly zero."""
        return self.max_deviation == 0

    def to_json_dict(self) -> dict:
        d = {"condition": self.condition, "variant": self.variant.value,
             "world_count": self.world_count,
             "max_deviation_num": self.max_deviation.numerator,
             "max_deviation_den": self.max_deviation.denominator,
             "verdict": "holds" if self.verdict else "violated"}
        if self.subset is not None:
            d["subset"] = list(self.subset)
        return d


def _pairwise_deviation(pairs) -> Fraction:
    """max |P(a,b) - P(a)P(b)| over the full product of observed values."""
    joint, ca, cb = {}, {}, {}
    total = 0
    for a, b in pairs:
        joint[(a, b)] = joint.get((a, b), 0) + 1
        ca[a] = ca.get(a, 0) + 1
        cb[b] = cb.get(b, 0) + 1
        total += 1
    worst = 0
    for a, na in ca.items():
        for b, nb in cb.items():
            diff = abs(joint.get((a, b), 0) * total - na * nb)
            if diff > worst:
                worst = diff
    return Fraction(worst, total * total)


def _conditional_deviation(triples) -> Fraction:
    """max over w of the pairwise deviation inside the W = w slice."""
    slices = {}
    for w, a, b in triples:
        slices.setdefault(w, []).append((a, b))
    worst = Fraction(0)
    for pairs in slices.values():
        dev = _pairwise_deviation(pairs)
        if dev > worst:
            worst = dev
    return worst


def _ensure_enum(config_or_enum, budget=None) -> WorldEnumeration:
    if isinstance(config_or_enum, WorldEnumeration):
        return config_or_enum
    return enumerate_worlds(config_or_enum, budget=budget)


def check_security(config_or_enum, budget: int | None = None) -> IndependenceReport:
    """Library contents vs everything a wiretapper sees (all signals)."""
    enum = _ensure_enum(config_or_enum, budget)
    dev = _pairwise_deviation((r.files, r.x_view) for r in enum.records)
    return IndependenceReport("security", enum.config.variant,
                              enum.world_count, dev)


def check_security_joint(config_or_enum, budget: int | None = None) -> IndependenceReport:
    """The stronger form: (files, demands) jointly vs the signals."""
    enum = _ensure_enum(config_or_enum, budget)
    dev = _pairwise_deviation(((r.files, r.demands), r.x_view)
                              for r in enum.records)
    return IndependenceReport("security-joint", enum.config.variant,
                              enum.world_count, dev)


def check_user_privacy(config_or_enum, budget: int | None = None) -> dict:
    """Colluding users: for each nonempty proper subset of users, the
    other users' demands vs (their caches, all signals, their demands),
    conditioned on the library."""
    enum = _ensure_enum(config_or_enum, budget)
    K = enum.config.K
    reports = {}
    for size in range(1, K):
        for S in combinations(range(1, K + 1), size):
            others = [k for k in range(1, K + 1) if k not in S]
            triples = []
            for r in enum.records:
                a = tuple(r.demands[k - 1] for k in others)
                b = (tuple(r.z_views[k - 1] for k in S),
                     r.x_view,
                     tuple(r.demands[k - 1] for k in S))
                triples.append((r.files, a, b))
            dev = _conditional_deviation(triples)
            reports[S] = IndependenceReport("user-privacy", enum.config.variant,
                                            enum.world_count, dev, subset=S)
    return reports


def check_server_privacy(config_or_enum, budget: int | None = None) -> IndependenceReport:
    """All demands vs the colluding servers' view (queries, coded library,
    shared keys)."""
    enum = _ensure_enum(config_or_enum, budget)
    dev = _pairwise_deviation(
        (r.demands, (r.queries, r.wbar_view, r.v_view)) for r in enum.records)
    return IndependenceReport("server-privacy", enum.config.variant,
                              enum.world_count, dev)


@dataclass
class CorrectnessReport:
    """Outcome of the robust-correctness sweep."""

    variant: Variant
    attempted: int
    failures: list
    exhaustive: bool
    coverage: Fraction

    @property
    def verdict(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {"condition": "robust-correctness", "variant": self.variant.value,
                "attempted": self.attempted, "failures": len(self.failures),
                "exhaustive": self.exhaustive,
                "coverage": float(self.coverage),
                "verdict": "holds" if self.verdict else "violated"}


def check_robust_correctness(config: SchemeConfig, budget: int | None = None,
                             sample_size: int = 1000,
                             rng: random.Random | None = None) -> CorrectnessReport:
    """Every user decodes its demand from every L-subset of servers.

    Exhausts demand tuples crossed with per-user server subsets when that
    space fits the budget; decodes are checked per user, which covers all
    joint subset assignments since users decode independently.  Above the
    budget, `sample_size` random (demand tuple, subsets) draws are tested
    and the coverage fraction reported.  The library, keys and user
    randomness are drawn once from the config seed; decoding is algebraic,
    so correctness cannot depend on their realization.
    """
    budget = enumeration_budget() if budget is None else budget
    rng = rng or random.Random(config.seed)
    pl = placement(config, rng=random.Random(config.seed))
    dspace = demand_space(config)
    K, H, L = config.K, config.H, config.L
    subsets = list(combinations(range(1, H + 1), L))
    total = len(dspace) ** K * len(subsets) ** K
    exhaustive = total <= budget

    def attempt(demand_tuple, subset_per_user):
        errors = []
        qmap = {k: make_query(pl.user_states[k], demand_tuple[k - 1])
                for k in range(1, K + 1)}
        signals = {h: server_delivery(h, qmap, pl.server_stores[h], pl.keys, config)
                   for h in range(1, H + 1)}
        for k in range(1, K + 1):
            expected = pl.library.function_value(config.field, demand_tuple[k - 1])
            for subset in subset_per_user[k - 1]:
                sub_signals = {h: signals[h] for h in subset}
                try:
                    got = robust_decode(pl.user_states[k], demand_tuple[k - 1],
                                        sub_signals, qmap)
                except Exception as exc:  # recorded, not raised
                    errors.append((demand_tuple, k, subset, repr(exc)))
                    continue
                if got != expected:
                    errors.append((demand_tuple, k, subset, "wrong value"))
        return errors

    failures = []
    attempted = 0
    if exhaustive:
        all_subsets = [tuple(subsets)] * K
        for demand_tuple in product(dspace, repeat=K):
            failures.extend(attempt(demand_tuple, all_subsets))
            attempted += len(subsets) * K
        coverage = Fraction(1)
    else:
        for _ in range(sample_size):
            demand_tuple = tuple(rng.choice(dspace) for _ in range(K))
            per_user = [(rng.choice(subsets),) for _ in range(K)]
            failures.extend(attempt(demand_tuple, per_user))
            attempted += K
        coverage = Fraction(sample_size, total)
    return CorrectnessReport(variant=config.variant, attempted=attempted,
                             failures=failures[:100], exhaustive=exhaustive,
                             coverage=coverage)
