"""Command line front end.

Every subcommand reads one JSON config file, computes, and writes
either CSV (curve-like results) or JSON (structured results) to stdout
or --out.  Unknown config keys are rejected rather than ignored so a
typo cannot silently fall back to defaults.

Exit codes: 0 success, 2 bad config or parameters, 3 statistical
check failed (simulate with a flag/expectation mismatch), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, fields, replace

from . import attack as _attack
from . import solver as _solver
from .channel import ChannelParams
from .errors import ConfigError, EstimationError, ValidationError
from .montecarlo import (
    AttackKind,
    SimConfig,
    compare_to_analytic,
    run_simulation,
)
from .protocol import ProtocolKind
from .rates import SourceMode

_QBER_CURVE_DEFAULTS = {
    "protocols": ["TS2", "TS3"],
    "v_a_list": [1.0, 0.95, 0.9],
    "q_min": 0.0,
    "q_max": 0.25,
    "q_step": 0.005,
}
_DISTANCE_DEFAULTS = {
    "protocols": ["TS2", "TS3"],
    "v_a_list": [1.0, 0.95, 0.9],
}
_RATE_CURVE_DEFAULTS = {
    "sources": [s.value for s in SourceMode],
    "protocol": "TS2",
    "l_min": 0.0,
    "l_max": 300.0,
    "l_step": 5.0,
    "mu": 0.5,
}
_SIMULATION_DEFAULTS = {
    "protocol": "TS2",
    "n_pulses": 1_000_000,
    "seed": 12345,
    "attack": "none",
    "measure_coherence_prob": 0.5,
    "phases": [0.0, math.pi],
    "coherence_fraction": None,
}
_ATTACK_OPTIMIZE_DEFAULTS = {
    "protocol": "TS2",
    "q": 0.05,
    "v_target": 0.9,
    "grid_resolution": 200,
}
_SECTIONS = {
    "channel": None,
    "qber_curve": _QBER_CURVE_DEFAULTS,
    "distance": _DISTANCE_DEFAULTS,
    "rate_curve": _RATE_CURVE_DEFAULTS,
    "simulation": _SIMULATION_DEFAULTS,
    "attack_optimize": _ATTACK_OPTIMIZE_DEFAULTS,
}


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = sorted(set(cfg) - set(_SECTIONS))
    if unknown:
        raise ConfigError(
            f"unknown config section(s) {unknown}; "
            f"known: {sorted(_SECTIONS)}")
    return cfg


def _section(cfg: dict, name: str) -> dict:
    defaults = _SECTIONS[name]
    raw = cfg.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise ConfigError(
            f"unknown key(s) {unknown} in section {name!r}; "
            f"known: {sorted(defaults)}")
    return {**defaults, **raw}


def _channel_from(cfg: dict) -> ChannelParams:
    raw = cfg.get("channel", {})
    if not isinstance(raw, dict):
        raise ConfigError("config section 'channel' must be an object")
    known = {f.name for f in fields(ChannelParams)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(
            f"unknown key(s) {unknown} in section 'channel'; "
            f"known: {sorted(known)}")
    return ChannelParams(**raw)


def _protocol(name) -> ProtocolKind:
    try:
        return ProtocolKind(str(name).upper())
    except ValueError:
        raise ConfigError(
            f"unknown protocol {name!r}; "
            f"known: {[p.value for p in ProtocolKind]}") from None


def _source(name) -> SourceMode:
    try:
        return SourceMode(str(name))
    except ValueError:
        raise ConfigError(
            f"unknown source {name!r}; "
            f"known: {[s.value for s in SourceMode]}") from None


def _fmt(x) -> str:
    # repr picks the shortest string that parses back to the same double,
    # so CSV cells round-trip losslessly.
    return repr(float(x))


def _config_echo(payload: dict) -> str:
    return "# config: " + json.dumps(payload, sort_keys=True,
                                     separators=(",", ":"))


def _json_safe(x):
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def _dump_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"


def _grid(lo: float, hi: float, step: float, what: str) -> list[float]:
    if not step > 0.0:
        raise ConfigError(f"{what} step={step!r} must be > 0")
    if not lo <= hi:
        raise ConfigError(f"empty {what} grid: [{lo!r}, {hi!r}]")
    out = []
    k = 0
    while True:
        x = lo + k * step
        if x > hi + 0.5 * step:
            break
        out.append(min(x, hi))
        k += 1
    return out


def _cmd_qber_curve(cfg: dict, args) -> tuple[str, int]:
    sec = _section(cfg, "qber_curve")
    q_grid = _grid(float(sec["q_min"]), float(sec["q_max"]),
                   float(sec["q_step"]), "qber")
    lines = [_config_echo(sec),
             "protocol,v_a,qber,s_rho_e,chi_ae,i_ab,delta_i"]
    for name in sec["protocols"]:
        protocol = _protocol(name)
        points = _solver.qber_sweep(protocol,
                                    [float(v) for v in sec["v_a_list"]],
                                    q_grid)
        for pt in points:
            lines.append(",".join([
                protocol.value, _fmt(pt.visibility_va), _fmt(pt.qber),
                _fmt(pt.s_rho_e), _fmt(pt.chi_ae), _fmt(pt.i_ab),
                _fmt(pt.delta_i)]))
    return "\n".join(lines) + "\n", 0


def _cmd_distance(cfg: dict, args) -> tuple[str, int]:
    sec = _section(cfg, "distance")
    channel = _channel_from(cfg)
    results = []
    for name in sec["protocols"]:
        protocol = _protocol(name)
        for v_a in sec["v_a_list"]:
            c = replace(channel, v_a=float(v_a))
            threshold = _attack.max_qber(protocol, float(v_a))
            cut = _solver.secure_distance(protocol, c)
            results.append({
                "protocol": protocol.value,
                "v_a": float(v_a),
                "max_qber": threshold,
                "secure_distance_km":
                    "unbounded" if cut.unbounded else cut.length_km,
                "bracket_width_km":
                    None if cut.unbounded else cut.bracket_width_km,
            })
    payload = {
        "config": {**sec, "channel": asdict(channel)},
        "results": results,
    }
    return _dump_json(payload), 0


def _cmd_rate_curve(cfg: dict, args) -> tuple[str, int]:
    sec = _section(cfg, "rate_curve")
    channel = _channel_from(cfg)
    protocol = _protocol(sec["protocol"])
    sources = [_source(s) for s in sec["sources"]]
    lines = [_config_echo({**sec, "channel": asdict(channel)}),
             "source,protocol,length_km,rate,rate_db"]
    footers = []
    for source in sources:
        curve = _solver.sweep(source, protocol, channel,
                              float(sec["l_min"]), float(sec["l_max"]),
                              float(sec["l_step"]), mu=float(sec["mu"]))
        for length, rate, db in zip(curve.lengths_km, curve.rates,
                                    curve.rates_db):
            lines.append(",".join([
                source.value, protocol.value, _fmt(length), _fmt(rate),
                _fmt(db)]))
        cut = _solver.rate_cutoff(source, protocol, channel,
                                  mu=float(sec["mu"]))
        footers.append("# cutoff,{},{},{},{}".format(
            source.value, protocol.value, _fmt(cut.length_km),
            _fmt(cut.bracket_width_km)))
    return "\n".join(lines + footers) + "\n", 0


def _cmd_simulate(cfg: dict, args) -> tuple[str, int]:
    sec = _section(cfg, "simulation")
    channel = _channel_from(cfg)
    if args.seed is not None:
        sec["seed"] = args.seed
    try:
        kind = AttackKind(str(sec["attack"]))
    except ValueError:
        raise ConfigError(
            f"unknown attack {sec['attack']!r}; "
            f"known: {[a.value for a in AttackKind]}") from None
    fraction = sec["coherence_fraction"]
    sim_cfg = SimConfig(
        protocol=_protocol(sec["protocol"]),
        channel=channel,
        n_pulses=int(sec["n_pulses"]),
        seed=int(sec["seed"]),
        attack=kind,
        measure_coherence_prob=float(sec["measure_coherence_prob"]),
        phases=tuple(float(p) for p in sec["phases"]),
        coherence_fraction=None if fraction is None else float(fraction),
    )
    result = run_simulation(sim_cfg)
    rows = compare_to_analytic(result, sim_cfg)
    alarm = any(r.flagged for r in rows)
    ok = alarm == bool(args.expect_attack)
    payload = {
        "config": {
            "protocol": sim_cfg.protocol.value,
            "channel": asdict(channel),
            "n_pulses": sim_cfg.n_pulses,
            "seed": sim_cfg.seed,
            "attack": kind.value,
            "measure_coherence_prob": sim_cfg.measure_coherence_prob,
            "phases": list(sim_cfg.phases),
            "coherence_fraction": sim_cfg.coherence_fraction,
        },
        "result": asdict(result),
        "comparison": [asdict(r) for r in rows],
        "alarm": alarm,
        "expected_attack": bool(args.expect_attack),
        "ok": ok,
    }
    return _dump_json(payload), 0 if ok else 3


def _cmd_attack_optimize(cfg: dict, args) -> tuple[str, int]:
    sec = _section(cfg, "attack_optimize")
    protocol = _protocol(sec["protocol"])
    q = float(sec["q"])
    v_target = float(sec["v_target"])
    opt = _attack.optimize_attack_bruteforce(protocol, q, v_target,
                                             int(sec["grid_resolution"]))
    payload = {
        "config": {
            "protocol": protocol.value,
            "q": q,
            "v_target": v_target,
            "grid_resolution": int(sec["grid_resolution"]),
        },
        "params": asdict(opt.params),
        "s_max": opt.s_max,
        "geometry": None if opt.geometry is None else asdict(opt.geometry),
    }
    if protocol is not ProtocolKind.TS3:
        payload["s_symmetric"] = _attack.s_rho_e_max(q, v_target)
    return _dump_json(payload), 0


_COMMANDS = {
    "qber-curve": _cmd_qber_curve,
    "distance": _cmd_distance,
    "rate-curve": _cmd_rate_curve,
    "simulate": _cmd_simulate,
    "attack-optimize": _cmd_attack_optimize,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempokey",
        description="Security analysis and simulation of time-coded "
                    "quantum key distribution")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "qber-curve": "entropies and key rate over a QBER grid (CSV)",
        "distance": "security threshold and secure fiber length (JSON)",
        "rate-curve": "key rate vs fiber length per source model (CSV)",
        "simulate": "pulse-level simulation with analytic cross-check (JSON)",
        "attack-optimize": "brute-force search over attack parameters (JSON)",
    }
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", required=True,
                        help="JSON config file; {} uses all defaults")
        sp.add_argument("--out", default=None,
                        help="output path (default: stdout)")
        if name == "simulate":
            sp.add_argument("--seed", type=int, default=None,
                            help="override the configured seed")
            sp.add_argument("--expect-attack", action="store_true",
                            help="succeed only if the comparison flags")
        sp.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        text, code = args.fn(cfg, args)
        if args.out is None:
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
