"""Command-line front end.

Exit codes: 0 success, 1 a checked inequality or residual failed, 2 usage or
input error.  Options may also come from ``--config file.json``; flags given
on the command line take precedence over the file.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys

import numpy as np

from . import __version__, campaigns, certify, coupling, gelfand, groups, orthopoly
from .errors import ApcertError

SCHEMA_VERSION = 1

# defaults applied after config and flags are merged
DEFAULTS = {
    "seed": 0,
    "format": "json",
    "output": None,
    "no_timestamp": False,
    "tol": groups.DEFAULT_TOL,
    "c_hat": None,
    "jobs": None,
    "quick": False,
    "grid": None,
    "degree": 10,
    "l1": 1.0,
    "pair": "U2_U1",
    "p": 0,
    "q": 0,
    "n": 0,
    "theta_points": 0,
}


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser):
    g = p.add_argument_group("common")
    g.add_argument("--config", help="JSON file of option values; flags override it")
    g.add_argument("--seed", type=int, help="PRNG seed (default 0), echoed into every report")
    g.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    g.add_argument("--output", "-o", help="write the report here instead of stdout")
    g.add_argument("--no-timestamp", action="store_true", default=None, help="omit timestamp and timing fields")
    g.add_argument("--tol", type=float, help=f"membership tolerance (default {groups.DEFAULT_TOL:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apcert", description="Decay-chain verification for Sp(2,R) and SL(3,R).")
    parser.add_argument("--version", action="version", version=f"apcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kak", help="chamber point of a matrix in Sp(2,R) or SL(3,R)")
    p.add_argument("--matrix", help="JSON file: {dim, group_tag, entries} or a nested list")
    p.add_argument("--entries", help="rows separated by ';', entries by ','")
    _add_common(p)

    p = sub.add_parser("spherical", help="evaluate a spherical function")
    p.add_argument("--pair", choices=orthopoly.PAIR_IDS)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--z", help="disc point as 're,im' (U2_U1)")
    p.add_argument("--r", type=float, help="coset coordinate in [-1,1] (SU2_SO2, SO3_SO2)")
    _add_common(p)

    p = sub.add_parser("multiplier", help="synthesize, evaluate or certify compact multipliers")
    msub = p.add_subparsers(dest="action", required=True)
    m = msub.add_parser("synth", help="random coefficients with a given l1 norm")
    m.add_argument("--pair", choices=orthopoly.PAIR_IDS)
    m.add_argument("--degree", type=int)
    m.add_argument("--l1", type=float)
    _add_common(m)
    m = msub.add_parser("eval", help="evaluate a stored multiplier")
    m.add_argument("--model", required=True, help="CompactMultiplier JSON file")
    m.add_argument("--point", required=True, help="'re,im' for U2_U1, a real otherwise")
    _add_common(m)
    m = msub.add_parser("holder", help="Hoelder certificate for a stored multiplier")
    m.add_argument("--model", required=True)
    m.add_argument("--theta1", type=float)
    m.add_argument("--theta2", type=float)
    m.add_argument("--r1", type=float)
    m.add_argument("--r2", type=float)
    m.add_argument("--theta-points", type=int, help="check all pairs of a uniform grid instead")
    m.add_argument("--c-hat", type=float, help="empirical constant (default: computed)")
    _add_common(m)

    p = sub.add_parser("witness", help="construct and verify a witness matrix")
    wsub = p.add_subparsers(dest="kind", required=True)
    for kind in ("circle", "hyperbola"):
        w = wsub.add_parser(kind)
        w.add_argument("--beta", type=float, required=True)
        w.add_argument("--gamma", type=float, required=True)
        _add_common(w)
    w = wsub.add_parser("sl3")
    w.add_argument("--r", type=float, required=True)
    w.add_argument("--theta", type=float, required=True)
    _add_common(w)

    p = sub.add_parser("certify", help="decay certificate at a chamber point")
    csub = p.add_subparsers(dest="group", required=True)
    c = csub.add_parser("sp2")
    c.add_argument("--beta", type=float)
    c.add_argument("--gamma", type=float)
    c.add_argument("--norm", type=float, help="assumed multiplier norm (required)")
    c.add_argument("--c-hat", type=float)
    _add_common(c)
    c = csub.add_parser("sl3")
    c.add_argument("--s", type=float)
    c.add_argument("--t", type=float)
    c.add_argument("--norm", type=float, help="assumed multiplier norm (required)")
    _add_common(c)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("lemma_id", help="one of: " + ", ".join(campaigns.LEMMA_IDS + ("all",)))
    p.add_argument("--quick", action="store_true", default=None, help="reduced grids")
    p.add_argument("--grid", action="append", help="override a grid entry, key=value (repeatable)")
    p.add_argument("--jobs", type=int, help="worker processes (default: APCERT_JOBS or 1)")
    p.add_argument("--c-hat", type=float)
    _add_common(p)

    p = sub.add_parser("constants", help="print the constants ledger")
    p.add_argument("--c-hat", type=float)
    _add_common(p)
    return parser


def _merge(args: argparse.Namespace) -> dict:
    opts = {k: v for k, v in vars(args).items()}
    if opts.get("config"):
        try:
            with open(opts["config"]) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for k, v in cfg.items():
            key = k.replace("-", "_")
            if opts.get(key) is None:
                opts[key] = v
    for k, v in DEFAULTS.items():
        if opts.get(k) is None:
            opts[k] = v
    return opts


def _need(opts: dict, *names):
    missing = [n for n in names if opts.get(n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _parse_matrix(opts) -> groups.GroupMatrix:
    if opts.get("matrix"):
        try:
            with open(opts["matrix"]) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read matrix: {exc}") from exc
        if isinstance(data, dict):
            entries = data.get("entries")
        else:
            entries = data
    elif opts.get("entries"):
        try:
            entries = [[float(x) for x in row.split(",")] for row in opts["entries"].split(";")]
        except ValueError as exc:
            raise UsageError(f"malformed --entries: {exc}") from exc
    else:
        raise UsageError("give --matrix or --entries")
    a = np.array(entries, dtype=float)
    if a.ndim == 1 and a.size in (9, 16):
        a = a.reshape(int(round(math.sqrt(a.size))), -1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (3, 4):
        raise UsageError(f"expected a 3x3 or 4x4 matrix, got shape {a.shape}")
    return groups.GroupMatrix(a, "Sp2" if a.shape[0] == 4 else "SL3")


def _complex(text: str) -> complex:
    try:
        parts = [float(x) for x in str(text).split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed complex number {text!r}") from exc
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) != 2:
        raise UsageError(f"malformed complex number {text!r}")
    return complex(parts[0], parts[1])


def _cx(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _load_model(path: str) -> gelfand.CompactMultiplier:
    try:
        with open(path) as fh:
            return gelfand.CompactMultiplier.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read model: {exc}") from exc


def _c_hat(opts) -> float:
    return opts["c_hat"] if opts.get("c_hat") is not None else certify.default_c_hat()[0]


# -- commands -----------------------------------------------------------------


def cmd_kak(opts):
    g = _parse_matrix(opts)
    tol = opts["tol"]
    if g.dim == 4:
        inv = groups.hs_invariants(g, tol)
        ch = groups.chamber_from_invariants(inv, tol)
        res = groups.membership_residual(groups.GroupMatrix(g.entries, "Sp2"))
        return {"group": "Sp2", "chamber": ch.to_dict(), "invariants": {"c1": inv.c1, "c2": inv.c2},
                "membership_residual": res}, 0
    ch = groups.sl3_chamber(g, tol)
    res = groups.membership_residual(groups.GroupMatrix(g.entries, "SL3"))
    return {"group": "SL3", "chamber": ch.to_dict(), "membership_residual": res}, 0


def cmd_spherical(opts):
    pair = opts["pair"]
    if pair == "U2_U1":
        _need(opts, "z")
        z = _complex(opts["z"])
        val = orthopoly.spherical_u2u1(opts["p"], opts["q"], z)
        return {"pair": pair, "p": opts["p"], "q": opts["q"], "z": _cx(z), "value": _cx(val)}, 0
    _need(opts, "r")
    val = orthopoly.legendre(opts["n"], opts["r"])
    return {"pair": pair, "n": opts["n"], "r": opts["r"], "value": val}, 0


def cmd_multiplier(opts):
    action = opts["action"]
    if action == "synth":
        m = gelfand.random_multiplier(opts["pair"], opts["degree"], opts["seed"], opts["l1"])
        return {"multiplier": m.to_dict()}, 0
    m = _load_model(opts["model"])
    if action == "eval":
        if m.pair_id == "U2_U1":
            point = _complex(opts["point"])
            return {"pair_id": m.pair_id, "point": _cx(point), "value": _cx(gelfand.eval_multiplier(m, point)),
                    "l1_norm": m.l1_norm}, 0
        try:
            r = float(opts["point"])
        except ValueError as exc:
            raise UsageError(f"malformed point {opts['point']!r}") from exc
        return {"pair_id": m.pair_id, "point": r, "value": _cx(gelfand.eval_multiplier(m, r)), "l1_norm": m.l1_norm}, 0
    # holder
    if m.pair_id == "U2_U1":
        c_tilde = 2.0**0.75 * _c_hat(opts)
        if opts["theta_points"]:
            k = opts["theta_points"]
            thetas = 2.0 * math.pi * np.arange(k) / k
            worst, where = gelfand.holder_grid_u2u1(m, thetas, c_tilde)
            out = {"grid_points": k, "worst_margin": worst, "argmin": {"theta1": where[0], "theta2": where[1]},
                   "c_tilde": c_tilde}
            return out, 0 if worst >= 0 else 1
        _need(opts, "theta1", "theta2")
        line = gelfand.holder_certify_u2u1(m, opts["theta1"], opts["theta2"], c_tilde)
    else:
        if opts["theta_points"]:
            rs = np.linspace(-0.5, 0.5, opts["theta_points"])
            worst, where = gelfand.holder_grid_su2so2(m, rs)
            return {"grid_points": len(rs), "worst_margin": worst, "argmin": {"r1": where[0], "r2": where[1]}}, (
                0 if worst >= 0 else 1)
        _need(opts, "r1", "r2")
        line = gelfand.holder_certify_su2so2(m, opts["r1"], opts["r2"])
    return {"cert_line": line.to_dict()}, 0 if line.margin >= 0 else 1


def cmd_witness(opts):
    kind = opts["kind"]
    if kind == "circle":
        w = coupling.circle_witness(opts["beta"], opts["gamma"], opts["tol"])
    elif kind == "hyperbola":
        w = coupling.hyperbola_witness(opts["beta"], opts["gamma"], opts["tol"])
    else:
        w = coupling.sl3_witness(opts["r"], opts["theta"], opts["tol"])
    out = w.to_dict()
    out["verified"] = w.verified
    return {"witness": out}, 0 if w.verified else 1


def cmd_certify(opts):
    if opts["group"] == "sp2":
        _need(opts, "beta", "gamma", "norm")
        ledger = certify.default_ledger(opts.get("c_hat"))
        cert = certify.sp2_decay_bound(opts["beta"], opts["gamma"], opts["norm"], ledger, opts["seed"])
    else:
        _need(opts, "s", "t", "norm")
        cert = certify.sl3_decay_bound(opts["s"], opts["t"], opts["norm"], opts["seed"])
    return {"certificate": cert.to_dict()}, 0


def _grid_overrides(items):
    if not items:
        return None
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--grid expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def cmd_verify(opts):
    lid = opts["lemma_id"]
    timing = not opts["no_timestamp"]
    overrides = _grid_overrides(opts["grid"]) if isinstance(opts["grid"], list) else opts["grid"]
    if opts.get("c_hat") is not None:
        overrides = {**(overrides or {}), "c_hat": opts["c_hat"]}
    ids = campaigns.LEMMA_IDS if lid == "all" else (lid,)
    if lid != "all" and lid not in campaigns.LEMMA_IDS:
        raise UsageError(f"unknown lemma id {lid!r}; known: {', '.join(campaigns.LEMMA_IDS)}, all")
    reports = []
    for one in ids:
        ov = None
        if overrides:
            spec_keys = set(campaigns.FULL_GRIDS[one]) | {"c_hat"}
            ov = {k: v for k, v in overrides.items() if k in spec_keys}
            if lid != "all" and set(overrides) - spec_keys:
                raise UsageError(f"unknown grid keys: {sorted(set(overrides) - spec_keys)}")
        reports.append(campaigns.run_campaign(one, ov, opts["seed"], bool(opts["quick"]), opts["jobs"]))
    failed = [r.lemma_id for r in reports if not r.passed]
    out = {"lemma_id": lid, "quick": bool(opts["quick"]), "passed": not failed, "failed": failed,
           "reports": [r.to_dict(timing) for r in reports]}
    return out, 1 if failed else 0


def cmd_constants(opts):
    ledger = certify.default_ledger(opts.get("c_hat"))
    return {"ledger": ledger.to_dict(), "discrepancies": ledger.discrepancies()}, 0


COMMANDS = {
    "kak": cmd_kak,
    "spherical": cmd_spherical,
    "multiplier": cmd_multiplier,
    "witness": cmd_witness,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "constants": cmd_constants,
}


# -- output -------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _to_csv(payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if payload.get("command") == "verify":
        w.writerow(["lemma_id", "check", "checks", "worst_margin", "violations"])
        for rep in payload["result"]["reports"]:
            for name, det in sorted(rep["details"].items()):
                if "checks" in det:
                    viol = sum(1 for v in rep["violations"] if v["check"] == name)
                    w.writerow([rep["lemma_id"], name, det["checks"], repr(det["worst_margin"]), viol])
        return buf.getvalue()
    w.writerow(["key", "value"])
    for k, v in _flatten(payload):
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return _cx(o)
    raise TypeError(f"not serializable: {type(o)}")


def emit(payload: dict, opts: dict) -> None:
    if opts["format"] == "csv":
        text = _to_csv(payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if opts.get("output"):
        with open(opts["output"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        opts = _merge(args)
        result, code = COMMANDS[opts["command"]](opts)
    except (UsageError, ApcertError, ValueError) as exc:
        sys.stderr.write(f"apcert: error: {type(exc).__name__}: {exc}\n")
        return 2
    payload = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "command": opts["command"],
        "seed": opts["seed"],
        "prng": groups.PRNG_ALGORITHM,
        "result": result,
    }
    if not opts["no_timestamp"]:
        payload["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    try:
        emit(payload, opts)
    except OSError as exc:
        sys.stderr.write(f"apcert: error: cannot write output: {exc}\n")
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
