"""End-to-end protocol engine: placement, queries, delivery, robust decode.

Four variants of the cache-aided retrieval protocol run over H servers
that store an (H, L) MDS-coded library:

* ``LSP`` -- scalar linear function demands, content security against a
  wiretapper, and demand privacy against both colluding users and
  colluding servers.  Multicast blocks are masked with shared security
  keys; caches superpose the security keys onto privacy-key-masked
  packets.
* ``LP``  -- both privacy guarantees, no security: keys are zero blocks
  and redundant multicast blocks are pruned from delivery.
* ``FP``  -- like LP but demands are restricted to single files (unit
  vectors); user randomness lives on the hyperplane with coordinate sum
  q-1 so queries always sum to zero.
* ``L``   -- robust correctness only: no keys, no user randomness.

Users decode from any L of the H server signals.  All indices exposed by
this module (users k, servers h, rows i, symbols s, files n) are 1-based;
vectors over the file index are plain tuples read 0-based.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .gf import FieldSpec
from .mds import MdsCode, encode_blocks, decode_blocks
from .pda import Pda, STAR, comb0
from . import linalg


class SchemeError(Exception):
    pass


class ConfigInvalid(SchemeError):
    pass


class DemandInvalid(SchemeError):
    pass


class MissingQuery(SchemeError):
    pass


class InsufficientServers(SchemeError):
    pass


class DecodeInconsistency(SchemeError):
    """Signals are mutually inconsistent: transcript corruption."""


class Variant(enum.Enum):
    """Which guarantees the run provides (see module docstring)."""

    LSP = "LSP"
    LP = "LP"
    FP = "FP"
    L = "L"

    @property
    def uses_security_keys(self):
        return self is Variant.LSP

    @property
    def uses_privacy_keys(self):
        return self is not Variant.L

    @property
    def file_retrieval_only(self):
        return self is Variant.FP

    @property
    def prunes_signals(self):
        return self is not Variant.LSP

    @property
    def claimed_conditions(self):
        """Conditions this variant is built to satisfy."""
        if self is Variant.LSP:
            return ("correctness", "security", "user-privacy", "server-privacy")
        if self in (Variant.LP, Variant.FP):
            return ("correctness", "user-privacy", "server-privacy")
        return ("correctness",)


@dataclass
class SchemeConfig:
    """Bound run configuration.

    B defaults to the minimal L*F (one symbol per packet); larger B only
    scales packet size and must stay divisible by L*F.
    """

    N: int
    K: int
    L: int
    H: int
    field: FieldSpec
    pda: Pda
    code: MdsCode
    variant: Variant
    B: int | None = None
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.variant, str):
            self.variant = Variant(self.variant)
        if self.N < 2:
            raise ConfigInvalid("N >= 2 required (demand privacy is vacuous for N=1)")
        if not 1 <= self.L <= self.H:
            raise ConfigInvalid(f"need 1 <= L <= H, got L={self.L}, H={self.H}")
        if self.code.L != self.L or self.code.H != self.H:
            raise ConfigInvalid(f"code is ({self.code.H},{self.code.L}), "
                                f"config wants ({self.H},{self.L})")
        if self.code.field != self.field:
            raise ConfigInvalid("code and config disagree on the field")
        if self.pda.K != self.K:
            raise ConfigInvalid(f"PDA has K={self.pda.K}, config wants K={self.K}")
        if self.B is None:
            self.B = self.L * self.pda.F
        if self.B % (self.L * self.pda.F) != 0:
            raise ConfigInvalid(f"B={self.B} not divisible by L*F="
                                f"{self.L * self.pda.F}")

    @property
    def F(self):
        return self.pda.F

    @property
    def Z(self):
        return self.pda.Z

    @property
    def S(self):
        return self.pda.S

    @property
    def q(self):
        return self.field.q

    @property
    def packet_size(self):
        """Symbols per packet: B / (L*F)."""
        return self.B // (self.L * self.pda.F)

    @property
    def subpacketization(self):
        return self.L * self.pda.F


@dataclass
class Library:
    """N files of B symbols with their packet view.

    File n splits into L subfiles of B/L symbols; subfile l splits into F
    packets of B/(L*F).  ``packets[(n, l, i)]`` is the packet tuple.
    """

    files: tuple
    L: int
    F: int
    packets: dict = dc_field(init=False, repr=False)

    def __post_init__(self):
        B = len(self.files[0])
        if B % (self.L * self.F) != 0:
            raise ConfigInvalid(f"file length {B} not divisible by L*F="
                                f"{self.L * self.F}")
        sub = B // self.L
        b = sub // self.F
        packets = {}
        for n, w in enumerate(self.files, start=1):
            if len(w) != B:
                raise ConfigInvalid("files must share one length")
            for l in range(1, self.L + 1):
                base = (l - 1) * sub
                for i in range(1, self.F + 1):
                    lo = base + (i - 1) * b
                    packets[(n, l, i)] = tuple(w[lo:lo + b])
        self.packets = packets

    @property
    def N(self):
        return len(self.files)

    @property
    def B(self):
        return len(self.files[0])

    def combo(self, field: FieldSpec, a, l: int, i: int):
        """Packet of the linear combination sum_n a[n] W_n at (l, i)."""
        return linalg.vec_lincomb(
            field, a, [self.packets[(n, l, i)] for n in range(1, len(self.files) + 1)],
            length=len(self.packets[(1, l, i)]))

    def function_value(self, field: FieldSpec, a):
        """The demanded output sum_n a[n] W_n over full files."""
        return linalg.vec_lincomb(field, a, self.files, length=self.B)


def random_library(config: SchemeConfig, rng: random.Random) -> Library:
    q = config.q
    files = tuple(tuple(rng.randrange(q) for _ in range(config.B))
                  for _ in range(config.N))
    return Library(files=files, L=config.L, F=config.F)


@dataclass
class Randomness:
    """Shared server keys V and per-user privacy vectors p.

    V maps (l, s) to a packet-sized block; it holds zero blocks when
    security is dropped (LP/FP) and is None for variant L.  p maps user k
    to a length-N vector; None for variant L.
    """

    V: dict | None
    p: dict | None


def draw_randomness(config: SchemeConfig, rng: random.Random) -> Randomness:
    """Draw in the fixed order: V blocks by (l, s) lex, then p_1..p_K."""
    q, b = config.q, config.packet_size
    variant = config.variant
    V = None
    if variant.uses_security_keys:
        V = {(l, s): tuple(rng.randrange(q) for _ in range(b))
             for l in range(1, config.L + 1) for s in range(1, config.S + 1)}
    elif variant is not Variant.L:
        V = {(l, s): (0,) * b
             for l in range(1, config.L + 1) for s in range(1, config.S + 1)}
    p = None
    if variant.uses_privacy_keys:
        p = {}
        for k in range(1, config.K + 1):
            if variant.file_retrieval_only:
                head = [rng.randrange(q) for _ in range(config.N - 1)]
                last = (q - 1 - sum(head)) % q
                p[k] = tuple(head + [last])
            else:
                p[k] = tuple(rng.randrange(q) for _ in range(config.N))
    return Randomness(V=V, p=p)


@dataclass
class SecurityKeys:
    """The shared key blocks and their MDS-coded per-server view."""

    V: dict

    def coded_block(self, code: MdsCode, h: int, s: int):
        L = code.L
        return linalg.vec_lincomb(
            code.field, [code.G[l][h - 1] for l in range(L)],
            [self.V[(l, s)] for l in range(1, L + 1)],
            length=len(self.V[(1, s)]))


@dataclass
class UserState:
    """User k's cache: privacy vector, star packets, and masked packets."""

    k: int
    p: tuple
    star: dict       # (n, l, i) -> packet, for rows with a star in column k
    masked: dict     # (l, i) -> W_{p,l,i} + V_{l, a_{i,k}}, non-star rows
    config: SchemeConfig

    @property
    def cache_symbols(self) -> int:
        b = self.config.packet_size
        n_vec = self.config.N if self.config.variant.uses_privacy_keys else 0
        return (len(self.star) + len(self.masked)) * b + n_vec

    @property
    def cache_payload_symbols(self) -> int:
        return (len(self.star) + len(self.masked)) * self.config.packet_size


@dataclass
class ServerStore:
    """Coded packets held by one server: (n, i) -> coded packet."""

    h: int
    coded: dict

    def combo(self, field: FieldSpec, a, i: int, N: int):
        """Coded packet of the combination sum_n a[n] W_n at row i."""
        return linalg.vec_lincomb(
            field, a, [self.coded[(n, i)] for n in range(1, N + 1)],
            length=len(self.coded[(1, i)]))


@dataclass
class Placement:
    config: SchemeConfig
    library: Library
    randomness: Randomness
    keys: SecurityKeys | None
    server_stores: dict
    user_states: dict


def placement_with(config: SchemeConfig, library: Library,
                   randomness: Randomness) -> Placement:
    """Build server stores and user caches from explicit randomness."""
    if library.N != config.N or library.B != config.B:
        raise ConfigInvalid("library shape disagrees with config")
    pda, code, field = config.pda, config.code, config.field
    L, F, N, H = config.L, config.F, config.N, config.H

    stores = {h: ServerStore(h=h, coded={}) for h in range(1, H + 1)}
    for n in range(1, N + 1):
        for i in range(1, F + 1):
            blocks = [library.packets[(n, l, i)] for l in range(1, L + 1)]
            for h, cb in enumerate(encode_blocks(code, blocks), start=1):
                stores[h].coded[(n, i)] = cb

    V, p = randomness.V, randomness.p
    zero_p = (0,) * N
    users = {}
    for k in range(1, config.K + 1):
        star = {}
        masked = {}
        for i in range(1, F + 1):
            a = pda.entry(i, k)
            if a is STAR:
                for n in range(1, N + 1):
                    for l in range(1, L + 1):
                        star[(n, l, i)] = library.packets[(n, l, i)]
            elif config.variant is not Variant.L:
                for l in range(1, L + 1):
                    masked[(l, i)] = linalg.vec_add(
                        field, library.combo(field, p[k], l, i), V[(l, a)])
        users[k] = UserState(k=k, p=p[k] if p is not None else zero_p,
                             star=star, masked=masked, config=config)

    keys = SecurityKeys(V=V) if V is not None else None
    return Placement(config=config, library=library, randomness=randomness,
                     keys=keys, server_stores=stores, user_states=users)


def placement(config: SchemeConfig, library: Library | None = None,
              rng: random.Random | None = None) -> Placement:
    """Draw randomness (and the library when absent) and place.

    Draw order is fixed: V by (l, s) lex, then p_1..p_K, then the library.
    """
    if rng is None:
        rng = random.Random(config.seed)
    randomness = draw_randomness(config, rng)
    if library is None:
        library = random_library(config, rng)
    return placement_with(config, library, randomness)


def validate_demand(config: SchemeConfig, demand) -> tuple:
    d = tuple(int(v) for v in demand)
    if len(d) != config.N:
        raise DemandInvalid(f"demand length {len(d)} != N={config.N}")
    if any(not 0 <= v < config.q for v in d):
        raise DemandInvalid(f"demand {d} has entries outside GF({config.q})")
    if config.variant.file_retrieval_only:
        if sum(d) != 1 or d.count(1) != 1:
            raise DemandInvalid(f"FP demand must be a unit vector, got {d}")
    return d


def make_query(user_state: UserState, demand) -> tuple:
    """q_k = d_k + p_k elementwise; the same query goes to every server."""
    config = user_state.config
    d = validate_demand(config, demand)
    add = config.field.add
    return tuple(add(a, b) for a, b in zip(d, user_state.p))


def select_independent_set(field: FieldSpec, queries: dict) -> tuple:
    """Users whose queries form a basis of the span, smallest index first.

    Gaussian elimination scans users in increasing k, keeping each query
    that enlarges the span.  Returns 1-based user ids; empty when every
    query is zero.
    """
    ks = sorted(queries)
    rows = [queries[k] for k in ks]
    return tuple(ks[i] for i in linalg.independent_rows(field, rows))


@lru_cache(maxsize=128)
def _symbol_occurrences(pda: Pda):
    occ = {s: [] for s in range(1, pda.S + 1)}
    for i in range(1, pda.F + 1):
        for j in range(1, pda.K + 1):
            a = pda.entry(i, j)
            if a is not STAR:
                occ[a].append((i, j))
    return {s: tuple(v) for s, v in occ.items()}


def _block_signs(config: SchemeConfig):
    """Per-term signs of the pruned-delivery blocks, or None when unsigned.

    Pruning drops the blocks whose subset misses the independent query
    set; the dropped ones are then reconstructed as linear combinations of
    the kept ones.  That reconstruction identity holds over every field
    only when each user's term enters its block with a sign alternating by
    position in the sorted subset, so the pruned variants use
    sign-weighted blocks.  Over characteristic 2 (and for the unpruned
    LSP delivery) the signs are all one and this returns None.
    """
    if not (config.variant.prunes_signals
            and config.pda.symbol_subsets is not None):
        return None
    if config.field.characteristic == 2:
        return None
    neg_one = config.field.neg(1)
    signs = {}
    for s, J in config.pda.symbol_subsets.items():
        for pos, v in enumerate(sorted(J)):
            signs[(s, v)] = 1 if pos % 2 == 0 else neg_one
    return signs


def transmitted_symbols(config: SchemeConfig, queries: dict) -> list:
    """Ordinary symbols actually sent, ascending.

    LSP sends every s.  The other variants, on a MAN-built PDA, drop the
    blocks whose (t+1)-subset misses the independent query set; on a
    generic PDA nothing can be dropped.
    """
    if not config.variant.prunes_signals or config.pda.symbol_subsets is None:
        return list(range(1, config.S + 1))
    ind = set(select_independent_set(config.field, queries))
    subsets = config.pda.symbol_subsets
    return [s for s in range(1, config.S + 1) if ind.intersection(subsets[s])]


@dataclass
class ServerSignal:
    """One server's broadcast: query echo plus its payload blocks."""

    server_id: int
    queries: tuple    # ((k, vector), ...) for k = 1..K
    payload: dict     # s -> coded block, ascending s
    symbol_count: int
    overhead_count: int


def server_delivery(h: int, queries: dict, server_store: ServerStore,
                    keys: SecurityKeys | None, config: SchemeConfig) -> ServerSignal:
    """Compute X_h from the server's own coded packets and the queries."""
    if sorted(queries) != list(range(1, config.K + 1)):
        missing = sorted(set(range(1, config.K + 1)) - set(queries))
        raise MissingQuery(f"server {h} lacks queries from users {missing}")
    field, code, N = config.field, config.code, config.N
    b = config.packet_size
    occ = _symbol_occurrences(config.pda)
    signs = _block_signs(config)
    payload = {}
    for s in transmitted_symbols(config, queries):
        if config.variant.uses_security_keys:
            block = keys.coded_block(code, h, s)
        else:
            block = (0,) * b
        for (u, v) in occ[s]:
            term = server_store.combo(field, queries[v], u, N)
            if signs is not None and signs[(s, v)] != 1:
                term = linalg.vec_scale(field, signs[(s, v)], term)
            block = linalg.vec_add(field, block, term)
        payload[s] = block
    echo = tuple((k, tuple(queries[k])) for k in sorted(queries))
    return ServerSignal(server_id=h, queries=echo, payload=payload,
                        symbol_count=len(payload) * b,
                        overhead_count=config.K * config.N)


def _reconstruct_pruned(config: SchemeConfig, queries: dict, Y: dict,
                        transmitted: list, omitted: list):
    """Recover the dropped multicast blocks from the transmitted ones.

    Every block with subset J is, as a functional of the library packets,
    sum over j in J of the q_j-combination at row J minus {j}.  The
    functionals of the transmitted blocks span those of the omitted ones,
    so expressing the omitted functional as a combination of transmitted
    functionals (Gaussian elimination over coefficient vectors, which
    depend only on the public queries) recovers the block values for any
    library realization.
    """
    pda, field = config.pda, config.field
    subsets = pda.symbol_subsets
    row_rank = {T: r for r, T in enumerate(pda.row_subsets)}
    N = config.N
    dim = len(row_rank) * N
    signs = _block_signs(config)

    def functional(s):
        vec = [0] * dim
        J = subsets[s]
        for j in J:
            T = tuple(x for x in J if x != j)
            base = row_rank[T] * N
            qj = queries[j]
            sgn = 1 if signs is None else signs[(s, j)]
            for n in range(N):
                coeff = qj[n] if sgn == 1 else field.mul(sgn, qj[n])
                vec[base + n] = field.add(vec[base + n], coeff)
        return vec

    solver = linalg.SpanSolver(field, dim)
    for s in transmitted:
        solver.add(functional(s))
    b = config.packet_size
    for s in omitted:
        coeffs = solver.express(functional(s))
        if coeffs is None:
            raise DecodeInconsistency(
                f"pruned block {s} is outside the transmitted span")
        for l in range(1, config.L + 1):
            Y[(l, s)] = linalg.vec_lincomb(
                field, coeffs, [Y[(l, sj)] for sj in transmitted], length=b)


def robust_decode(user_state: UserState, demand, signals: dict,
                  queries: dict | None = None) -> tuple:
    """Decode W_d for this user from signals of at least L servers.

    Per delivered symbol the L blocks are MDS-inverted to the information
    blocks Y_{l,s}; pruned blocks are reconstructed; then each non-star
    row is recovered by cancelling the cached masked packet and the
    interference terms, which all sit in this user's star rows.  Signals
    beyond the first L are cross-checked against the decoded values and a
    mismatch raises DecodeInconsistency.
    """
    config = user_state.config
    field, code, pda = config.field, config.code, config.pda
    L, b = config.L, config.packet_size
    d = validate_demand(config, demand)

    servers = sorted(signals)
    if len(servers) < L:
        raise InsufficientServers(f"{len(servers)} signals < L={L}")
    chosen, extras = servers[:L], servers[L:]

    transmitted = sorted(signals[servers[0]].payload)
    for h in servers[1:]:
        if sorted(signals[h].payload) != transmitted:
            raise DecodeInconsistency("servers disagree on transmitted symbols")
    if queries is None:
        queries = {k: vec for k, vec in signals[servers[0]].queries}
    for h in servers:
        if {k: vec for k, vec in signals[h].queries} != queries:
            raise DecodeInconsistency(f"server {h} echoes different queries")

    Y = {}
    for s in transmitted:
        blocks = [signals[h].payload[s] for h in chosen]
        info = decode_blocks(code, chosen, blocks)
        for l in range(1, L + 1):
            Y[(l, s)] = info[l - 1]
    for h in extras:
        for s in transmitted:
            expected = linalg.vec_lincomb(
                field, [code.G[l][h - 1] for l in range(L)],
                [Y[(l, s)] for l in range(1, L + 1)], length=b)
            if expected != signals[h].payload[s]:
                raise DecodeInconsistency(
                    f"server {h} block {s} fails the MDS cross-check")

    omitted = [s for s in range(1, config.S + 1) if s not in set(transmitted)]
    if omitted:
        _reconstruct_pruned(config, queries, Y, transmitted, omitted)

    occ = _symbol_occurrences(pda)
    signs = _block_signs(config)
    k = user_state.k
    zero_block = (0,) * b
    subfiles = []
    for l in range(1, L + 1):
        parts = []
        for i in range(1, config.F + 1):
            a = pda.entry(i, k)
            if a is STAR:
                pkt = linalg.vec_lincomb(
                    field, d,
                    [user_state.star[(n, l, i)] for n in range(1, config.N + 1)],
                    length=b)
            else:
                acc = Y[(l, a)]
                for (u, v) in occ[a]:
                    if (u, v) == (i, k):
                        continue
                    interference = linalg.vec_lincomb(
                        field, queries[v],
                        [user_state.star[(n, l, u)] for n in range(1, config.N + 1)],
                        length=b)
                    if signs is not None and signs[(a, v)] != 1:
                        interference = linalg.vec_scale(field, signs[(a, v)],
                                                        interference)
                    acc = linalg.vec_sub(field, acc, interference)
                if signs is not None and signs[(a, k)] != 1:
                    acc = linalg.vec_scale(field, signs[(a, k)], acc)
                pkt = linalg.vec_sub(field, acc,
                                     user_state.masked.get((l, i), zero_block))
            parts.append(pkt)
        subfiles.append(parts)
    out = []
    for l_parts in subfiles:
        for pkt in l_parts:
            out.extend(pkt)
    return tuple(out)


@dataclass
class SchemeRun:
    """A complete placement + delivery (+ decode) pass."""

    config: SchemeConfig
    placement: Placement
    demands: dict
    queries: dict
    signals: dict
    decoded: dict | None = None


def run_scheme(config: SchemeConfig, demands, library: Library | None = None,
               rng: random.Random | None = None, decode: bool = True) -> SchemeRun:
    """Run the protocol once for a demand per user.

    `demands` is a sequence (user order) or a dict keyed by 1-based user
    id.  When `decode` is set every user decodes from all H signals.
    """
    if not isinstance(demands, dict):
        demands = {k: d for k, d in enumerate(demands, start=1)}
    if sorted(demands) != list(range(1, config.K + 1)):
        raise DemandInvalid(f"need one demand per user 1..{config.K}")
    pl = placement(config, library=library, rng=rng)
    queries = {k: make_query(pl.user_states[k], demands[k])
               for k in range(1, config.K + 1)}
    signals = {h: server_delivery(h, queries, pl.server_stores[h], pl.keys, config)
               for h in range(1, config.H + 1)}
    decoded = None
    if decode:
        decoded = {k: robust_decode(pl.user_states[k], demands[k], signals, queries)
                   for k in range(1, config.K + 1)}
    return SchemeRun(config=config, placement=pl, demands=demands,
                     queries=queries, signals=signals, decoded=decoded)


@dataclass
class MeasuredTradeoff:
    """Exact byte accounting of a run, in units of files (length B)."""

    M_measured: Fraction        # cache symbols / B, including the p_k vector
    M_payload_only: Fraction    # cached packet symbols / B
    R_measured: Fraction        # all transmitted symbols / B, incl. query echo
    R_payload_only: Fraction    # payload blocks only / B
    R_payload_worst_case: Fraction  # formula value at worst-case query rank
    blocks_per_server: int
    realized_rank: int | None   # rank of the queries (pruned variants)


def worst_case_payload_load(config: SchemeConfig) -> Fraction:
    """Per-run payload load formula at the worst-case query rank."""
    F, S, L, H = config.F, config.S, config.L, config.H
    variant = config.variant
    if not variant.prunes_signals or config.pda.symbol_subsets is None:
        return Fraction(H * S, L * F)
    t = config.pda.t
    K, N = config.K, config.N
    r = min(K, N - 1) if variant.file_retrieval_only else min(K, N)
    blocks = comb0(K, t + 1) - comb0(K - r, t + 1)
    return Fraction(H * blocks, L * F)


def measured_tradeoff(run: SchemeRun) -> MeasuredTradeoff:
    config = run.config
    B = config.B
    any_user = run.placement.user_states[1]
    signals = run.signals.values()
    payload_symbols = sum(sig.symbol_count for sig in signals)
    total_symbols = sum(sig.symbol_count + sig.overhead_count for sig in signals)
    counts = {len(sig.payload) for sig in signals}
    assert len(counts) == 1, "servers must transmit equal block counts"
    realized_rank = None
    if config.variant.prunes_signals and config.pda.symbol_subsets is not None:
        realized_rank = len(select_independent_set(config.field, run.queries))
    return MeasuredTradeoff(
        M_measured=Fraction(any_user.cache_symbols, B),
        M_payload_only=Fraction(any_user.cache_payload_symbols, B),
        R_measured=Fraction(total_symbols, B),
        R_payload_only=Fraction(payload_symbols, B),
        R_payload_worst_case=worst_case_payload_load(config),
        blocks_per_server=counts.pop(),
        realized_rank=realized_rank,
    )
