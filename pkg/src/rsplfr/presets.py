"""Named configurations and JSON config loading.

Presets:

* ``toy``       -- the (N,K,L,H)=(4,3,2,3) binary system over the 3x3
                   placement array with one star per column, an explicit
                   non-Vandermonde (3,2) generator matrix, B=6.
* ``micro-*``   -- the smallest instances whose probability space the
                   verification oracle can exhaust: N=K=2, L=1, H=2, t=1,
                   repetition code.  ``micro-lsp``/``micro-lp``/``micro-l``
                   use q=2; ``micro-fp`` uses q=3 so the sum-(q-1)
                   hyperplane is non-trivial.
* ``fig2a/b/c`` -- tradeoff parameter sets (30,10,15,20), (25,20,15,20),
                   (10,30,15,20); these name curve families, not runnable
                   scheme instances.
"""

from __future__ import annotations

import json
from math import comb

from .gf import field_new, UnsupportedCardinality
from .mds import custom_code, vandermonde_code
from .pda import man_pda, parse_pda
from .scheme import ConfigInvalid, SchemeConfig, Variant
from .tradeoff import FIG2_SETS

TRADEOFF_PRESETS = {name: params for name, params in FIG2_SETS}

SCHEME_PRESETS = ("toy", "micro-lsp", "micro-lp", "micro-fp", "micro-l")


def smallest_field_at_least(n: int) -> int:
    """Smallest supported cardinality q >= n (prime or power of two)."""
    q = max(2, n)
    while True:
        try:
            field_new(q)
            return q
        except UnsupportedCardinality:
            q += 1


def toy_config(variant="LSP", B: int = 6, seed: int = 0) -> SchemeConfig:
    field = field_new(2)
    return SchemeConfig(N=4, K=3, L=2, H=3, field=field, pda=man_pda(3, 1),
                        code=custom_code([[1, 0, 1], [0, 1, 1]], field),
                        variant=Variant(variant), B=B, seed=seed)


def micro_config(variant="LSP", seed: int = 0) -> SchemeConfig:
    variant = Variant(variant)
    q = 3 if variant is Variant.FP else 2
    field = field_new(q)
    return SchemeConfig(N=2, K=2, L=1, H=2, field=field, pda=man_pda(2, 1),
                        code=custom_code([[1, 1]], field),
                        variant=variant, seed=seed)


def preset_config(name: str, seed: int = 0) -> SchemeConfig:
    if name == "toy":
        return toy_config(seed=seed)
    if name.startswith("micro-"):
        variant = name.split("-", 1)[1].upper()
        return micro_config(variant=variant, seed=seed)
    raise KeyError(f"unknown scheme preset {name!r} "
                   f"(available: {', '.join(SCHEME_PRESETS)})")


MINOR_VALIDATION_LIMIT = 10 ** 6


def config_from_dict(d: dict, skip_validation: bool = False) -> tuple:
    """Build (SchemeConfig, demands-or-None) from a run-config mapping.

    Expected keys: N, K, L, H, q, variant, and either "t" (builds the
    MAN array) or "pda_file"/"pda_text"; either "G" (explicit generator
    rows) or "vandermonde": true.  Optional: B, seed, demands,
    skip_validation (explicit codes with more than 10^6 minors are
    refused unless it is set).
    """
    try:
        N, K, L, H = (int(d[k]) for k in ("N", "K", "L", "H"))
        q = int(d["q"])
        variant = Variant(d.get("variant", "LSP"))
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"bad run config: {exc}") from exc
    field = field_new(q)

    if "t" in d:
        pda = man_pda(K, int(d["t"]))
    elif "pda_file" in d:
        with open(d["pda_file"]) as fh:
            pda = parse_pda(fh.read())
    elif "pda_text" in d:
        pda = parse_pda(d["pda_text"])
    else:
        raise ConfigInvalid('run config needs "t", "pda_file" or "pda_text"')

    if "G" in d:
        skip = skip_validation or bool(d.get("skip_validation"))
        if not skip and comb(H, L) > MINOR_VALIDATION_LIMIT:
            raise ConfigInvalid(
                f"validating this code means inverting C({H},{L}) = "
                f"{comb(H, L)} minors; pass --skip-validation to accept "
                f"it unchecked")
        code = custom_code(d["G"], field, skip_validation=skip)
    elif d.get("vandermonde"):
        code = vandermonde_code(L, H, field)
    else:
        raise ConfigInvalid('run config needs "G" or "vandermonde": true')

    config = SchemeConfig(N=N, K=K, L=L, H=H, field=field, pda=pda, code=code,
                          variant=variant, B=d.get("B"), seed=int(d.get("seed", 0)))
    demands = d.get("demands")
    if demands is not None:
        demands = [tuple(int(v) for v in row) for row in demands]
    return config, demands


def config_from_json(text: str) -> tuple:
    return config_from_dict(json.loads(text))


def scenario_from_dict(d: dict, skip_validation: bool = False):
    """Scenario mapping: a run config plus availability and adversaries."""
    from .netsim import Scenario

    config, demands = config_from_dict(d, skip_validation=skip_validation)
    if demands is None:
        raise ConfigInvalid('scenario needs "demands"')
    availability = {int(k): [int(h) for h in v]
                    for k, v in d.get("availability", {}).items()}
    adversary = d.get("adversary", {})
    return Scenario(config=config, demands=demands, availability=availability,
                    wiretap=bool(adversary.get("wiretap", False)),
                    colluding_users=tuple(adversary.get("colluding_users", ())),
                    colluding_servers=bool(adversary.get("colluding_servers", False)))
