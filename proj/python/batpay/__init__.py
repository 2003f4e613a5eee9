"""Batched payments protocol: ledger, codecs, cost model and simulator."""

import json as _json

from ._batpay import (
    Identity,
    Ledger,
    Params,
    ProtocolError,
    amortized_per_payment,
    collect_gas,
    decode_pay_data,
    encode_pay_data,
    format_usd,
    merkle_prove,
    merkle_root,
    parse_scenario_config,
    register_payment_gas,
    locking_key_hash,
    replay_chain_log,
    usd_cost,
    verify_merkle_proof,
)
from ._batpay import _run_scenario


def run_scenario(config, seed=None):
    """Run a scenario from config text and return the report as a dict."""
    return _json.loads(_run_scenario(config, seed, "json"))


def emit_report(config, seed=None, fmt="json"):
    """Run a scenario and return the serialized report text."""
    return _run_scenario(config, seed, fmt)


__all__ = [
    "Identity",
    "Ledger",
    "Params",
    "ProtocolError",
    "amortized_per_payment",
    "collect_gas",
    "decode_pay_data",
    "emit_report",
    "encode_pay_data",
    "format_usd",
    "locking_key_hash",
    "merkle_prove",
    "merkle_root",
    "parse_scenario_config",
    "register_payment_gas",
    "replay_chain_log",
    "run_scenario",
    "usd_cost",
    "verify_merkle_proof",
]
