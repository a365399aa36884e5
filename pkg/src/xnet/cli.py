"""Command-line driver: ``xnet <command> [flags]``.

Every command validates its configuration before computing, writes CSV (the
default) or a flat ``key=value`` record to ``--output`` or standard output,
and stamps the output with the config hash and seed. Exit status is 0 on
success, 1 when a plan or the acceptance suite fails verification, 2 on an
invalid configuration.
"""

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .channel import DEFAULT_H_MAX, DEFAULT_H_MIN, extend, sample_channel
from .delay import DESIRED, DelaySchedule, simulate, throughput, validate_delays
from .exceptions import ConfigError, RankFailureError, StateError, XNetError
from .link import general_builder, perfect_builder, rate_curve
from .outerbound import DofRegionSpec, region_constraints, solve_lp, total_dof_bound
from .records import config_hash, format_csv, format_record, plan_record
from .relay import compose_two_hop, relay_dof, sample_topology
from .schemes import BASES, perturb_plan, verify_plan
from .suite import CRITERIA, run_suite, summary_line

COMMANDS = ("outerbound", "build", "verify", "slope", "delay", "relay", "suite")
FORMATS = ("csv", "record")
KINDS = ("perfect", "general")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class ExperimentConfig:
    command: str
    M: int = 2
    N: int = 2
    K: int = 2
    n: int = 1
    seed: int = 0
    trials: int = 200
    rho_db: tuple = (40.0, 60.0)
    tol: float = 1e-9
    kind: str = None
    basis: str = "svd"
    kappa: int = 0
    h_min: float = DEFAULT_H_MIN
    h_max: float = DEFAULT_H_MAX
    at: tuple = None
    ar: tuple = None
    null: tuple = ()
    weights: dict = None
    delays: tuple = (0, 1, 0, 2)
    horizon: int = 300
    phase2: str = "reciprocal"
    perturb: float = 0.0
    only: tuple = None
    output: str = field(default=None, metadata={"hashed": False})
    format: str = "csv"

    def hash(self):
        return config_hash({f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                            if f.metadata.get("hashed", True)})


# -- parsing ----------------------------------------------------------------------

def _int_list(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _float_list(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _pairs(text):
    """``"1-1,2-2"`` -> ``((1, 1), (2, 2))``."""
    out = []
    for tok in str(text).split(","):
        if tok.strip():
            j, i = tok.split("-")
            out.append((int(j), int(i)))
    return tuple(out)


def _weights(text):
    """``"1-2:3,2-1:1"`` -> ``{(1, 2): 3, (2, 1): 1}``."""
    out = {}
    for tok in str(text).split(","):
        if tok.strip():
            key, w = tok.split(":")
            j, i = key.split("-")
            out[(int(j), int(i))] = Fraction(w)
    return out


_CONVERTERS = {"rho_db": _float_list, "at": _int_list, "ar": _int_list, "null": _pairs,
               "weights": _weights, "delays": _int_list, "only": _int_list}


def build_parser():
    parser = argparse.ArgumentParser(prog="xnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of config fields; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--output", "-o", help="output path (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    net = argparse.ArgumentParser(add_help=False)
    net.add_argument("--m", dest="M", type=int, help="transmitters")
    net.add_argument("--n", dest="N", type=int, help="receivers")
    plan = argparse.ArgumentParser(add_help=False)
    plan.add_argument("--kind", choices=KINDS)
    plan.add_argument("--order", dest="n", type=int, help="alignment order of general plans")
    plan.add_argument("--basis", choices=BASES)
    plan.add_argument("--kappa", type=int, help="extension block index")
    plan.add_argument("--tol", type=float)
    plan.add_argument("--h-min", dest="h_min", type=float)
    plan.add_argument("--h-max", dest="h_max", type=float)

    p = sub.add_parser("outerbound", parents=[common, net], help="solve the DoF outerbound LP")
    p.add_argument("--at", help="transmit antennas, comma separated")
    p.add_argument("--ar", help="receive antennas, comma separated")
    p.add_argument("--null", help="absent messages as j-i pairs, e.g. 1-1,2-2")
    p.add_argument("--weights", help="objective weights as j-i:w pairs (default all ones)")
    sub.add_parser("build", parents=[common, net, plan], help="build a plan and dump it")
    p = sub.add_parser("verify", parents=[common, net, plan], help="build and verify a plan")
    p.add_argument("--perturb", type=float, help="nudge one beamformer by this relative scale")
    p = sub.add_parser("slope", parents=[common, net, plan], help="sum rate versus SNR")
    p.add_argument("--trials", type=int, help="extension blocks averaged per SNR point")
    p.add_argument("--rho-db", dest="rho_db", help="SNR points in dB, comma separated")
    p = sub.add_parser("delay", parents=[common], help="propagation-delay slot simulation")
    p.add_argument("--delays", help="T11,T12,T21,T22")
    p.add_argument("--horizon", type=int)
    p = sub.add_parser("relay", parents=[common], help="two-hop relay composition")
    p.add_argument("--m", dest="M", type=int, help="sources (= destinations)")
    p.add_argument("--k", dest="K", type=int, help="relays")
    p.add_argument("--order", dest="n", type=int)
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--phase2", choices=("reciprocal", "direct"))
    p = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    p.add_argument("--trials", type=int)
    p.add_argument("--only", help="criterion numbers, comma separated")
    return parser


def load_config(argv):
    """Merge defaults, an optional JSON config file and flags, in that order."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    values = {}
    path = args.pop("config", None)
    if path:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError("config", "file must hold a JSON object")
        values.pop("command", None)
    values.update({k: v for k, v in args.items() if v is not None})
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key in list(values):
        if key not in known:
            raise ConfigError(key, "unknown config field")
        conv = _CONVERTERS.get(key)
        raw = values[key]
        if conv and raw is not None:
            # a JSON file may give lists, [j, i] pairs or {"j-i": w} objects
            if key == "null" and isinstance(raw, list):
                raw = ",".join(f"{j}-{i}" for j, i in raw)
            elif key == "weights" and isinstance(raw, dict):
                raw = ",".join(f"{k}:{w}" for k, w in raw.items())
            elif isinstance(raw, list):
                raw = ",".join(map(str, raw))
            try:
                values[key] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(key, f"cannot parse {raw!r}: {exc}") from None
    cfg = ExperimentConfig(command, **values)
    if cfg.kind is None:
        # perfect schemes wherever one exists, partial alignment otherwise
        other = cfg.K if command == "relay" else cfg.N
        cfg.kind = "perfect" if 2 in (cfg.M, other) and command != "relay" else "general"
    validate(cfg)
    return cfg


def _positive(cfg, name, minimum=1):
    value = getattr(cfg, name)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(name, f"must be an integer >= {minimum}, got {value!r}")


def validate(cfg):
    """Check every field a command uses; raises :class:`ConfigError` naming the field."""
    if cfg.format not in FORMATS:
        raise ConfigError("format", f"must be one of {FORMATS}")
    _positive(cfg, "seed", 0)
    c = cfg.command
    if c in ("outerbound", "build", "verify", "slope"):
        _positive(cfg, "M")
        _positive(cfg, "N")
    if c in ("build", "verify", "slope"):
        if cfg.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}")
        if cfg.kind == "perfect" and 2 not in (cfg.M, cfg.N):
            raise ConfigError("kind", "perfect alignment needs M = 2 or N = 2")
        if cfg.basis not in BASES:
            raise ConfigError("basis", f"must be one of {BASES}")
        _positive(cfg, "n")
        _positive(cfg, "kappa", 0)
        if not 0 < cfg.tol < 1:
            raise ConfigError("tol", "must lie in (0, 1)")
        if not 0 < cfg.h_min < cfg.h_max < float("inf"):
            raise ConfigError("h_min", "need 0 < h_min < h_max < inf")
    if c == "outerbound":
        for name, count in (("at", cfg.M), ("ar", cfg.N)):
            ants = getattr(cfg, name)
            if ants is not None and (len(ants) != count or min(ants) < 1):
                raise ConfigError(name, f"need {count} antenna counts >= 1")
        for j, i in cfg.null:
            if not (1 <= j <= cfg.N and 1 <= i <= cfg.M):
                raise ConfigError("null", f"pair {j}-{i} outside the network")
        for j, i in (cfg.weights or {}):
            if not (1 <= j <= cfg.N and 1 <= i <= cfg.M):
                raise ConfigError("weights", f"pair {j}-{i} outside the network")
    if c in ("slope", "suite"):
        _positive(cfg, "trials")
    if c == "slope":
        if len(cfg.rho_db) < 2 or list(cfg.rho_db) != sorted(set(cfg.rho_db)):
            raise ConfigError("rho_db", "need at least two increasing SNR points")
    if c == "verify" and cfg.perturb < 0:
        raise ConfigError("perturb", "must be nonnegative")
    if c == "delay":
        if len(cfg.delays) != 4 or min(cfg.delays) < 0:
            raise ConfigError("delays", "need four nonnegative integers T11,T12,T21,T22")
        _positive(cfg, "horizon")
        if cfg.horizon % 3:
            raise ConfigError("horizon", "must be a multiple of 3")
    if c == "relay":
        _positive(cfg, "M")
        _positive(cfg, "K")
        _positive(cfg, "n")
        if cfg.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}")
        if cfg.kind == "perfect" and 2 not in (cfg.M, cfg.K):
            raise ConfigError("kind", "perfect composition needs M = 2 or K = 2")
        if cfg.phase2 not in ("reciprocal", "direct"):
            raise ConfigError("phase2", "must be reciprocal or direct")
    if c == "suite" and cfg.only is not None:
        bad = [k for k in cfg.only if k not in CRITERIA]
        if bad:
            raise ConfigError("only", f"unknown criteria {bad}")


# -- commands -----------------------------------------------------------------------

def _stamp(cfg):
    return {"config_hash": cfg.hash(), "seed": cfg.seed}


def _emit(cfg, fields, columns=None, rows=None):
    """Render ``fields`` (and an optional table) in the configured format."""
    fields = {"command": cfg.command, **fields, **_stamp(cfg)}
    if cfg.format == "record":
        text = format_record(fields)
        if rows:
            text += "".join(format_record({f"row{r}.{c}": v for c, v in zip(columns, row)})
                            for r, row in enumerate(rows))
        return text
    if columns is None:
        return format_csv(list(fields), [list(fields.values())])
    return format_csv(columns, rows, fields)


def _builder(cfg):
    if cfg.kind == "perfect":
        return perfect_builder(cfg.M, cfg.N)
    return general_builder(cfg.M, cfg.N, cfg.n, cfg.basis)


def _plan(cfg):
    b = _builder(cfg)
    proc = sample_channel(cfg.M, cfg.N, (cfg.kappa + 1) * b.mu, cfg.seed, cfg.h_min, cfg.h_max)
    ext = extend(proc, cfg.kappa, b.mu)
    return b(ext, cfg.seed), ext


def cmd_outerbound(cfg):
    spec = DofRegionSpec(cfg.M, cfg.N, cfg.at, cfg.ar, frozenset(cfg.null))
    sol = solve_lp(region_constraints(spec, cfg.weights))
    fields = {"M": cfg.M, "N": cfg.N, "value": sol.value, "exact": sol.exact,
              "optimizer": list(sol.x),
              "binding": [f"{m}-{n}" for m, n in
                          (region_constraints(spec).labels[k] for k in sol.binding)],
              "total_dof_bound": total_dof_bound(cfg.M, cfg.N)}
    return _emit(cfg, fields), EXIT_OK


def _report_fields(plan, rep):
    return {"kind": plan.kind, "M": plan.M, "N": plan.N, "mu": plan.mu, "n": plan.n,
            "total_streams": plan.total_streams, "achieved_dof": rep.achieved_dof,
            "passed": rep.passed, "max_alignment_residual": rep.max_alignment_residual,
            "max_cross_gain": rep.max_cross_gain,
            "interference_dim": [rep.interference_dim[j] for j in sorted(rep.interference_dim)],
            "lambda_ratio": [rep.lambda_ratio[j] for j in sorted(rep.lambda_ratio)],
            "failures": " | ".join(rep.failures)}


def cmd_build(cfg):
    plan, ext = _plan(cfg)
    rep = verify_plan(plan, ext, cfg.tol)
    if cfg.format == "record":
        head = format_record({"command": cfg.command, **_stamp(cfg), "passed": rep.passed})
        return head + plan_record(plan), EXIT_OK if rep.passed else EXIT_FAIL
    rows = [(j, i, plan.streams[(j, i)]) for (j, i) in plan.messages()]
    summary = {"kind": plan.kind, "mu": plan.mu, "achieved_dof": rep.achieved_dof,
               "passed": rep.passed}
    return (_emit(cfg, summary, ["receiver", "transmitter", "streams"], rows),
            EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_verify(cfg):
    plan, ext = _plan(cfg)
    if cfg.perturb > 0:
        key = next(k for k in plan.messages() if plan.streams[k] and k[1] >= 2)
        plan = perturb_plan(plan, key, 0, cfg.perturb, cfg.seed)
    rep = verify_plan(plan, ext, cfg.tol)
    return _emit(cfg, _report_fields(plan, rep)), EXIT_OK if rep.passed else EXIT_FAIL


def cmd_slope(cfg):
    b = _builder(cfg)
    proc = sample_channel(cfg.M, cfg.N, cfg.trials * b.mu, cfg.seed, cfg.h_min, cfg.h_max)
    curve = rate_curve(b, proc, cfg.rho_db, cfg.trials, cfg.seed)
    rows = [(float(r), float(m), float(s)) for r, m, s in zip(curve.rho_db, curve.mean, curve.stderr)]
    summary = {"label": b.label, "slope": curve.slope(0, -1), "achieved_dof": b.dof,
               "slope_from_db": float(cfg.rho_db[0]), "slope_to_db": float(cfg.rho_db[-1]),
               "gap_variation_bits": curve.gap_variation(b.dof),
               "trials": cfg.trials, "rank_failures": curve.rank_failures}
    return _emit(cfg, summary, ["rho_db", "sum_rate_bits", "stderr"], rows), EXIT_OK


def cmd_delay(cfg):
    if not validate_delays(cfg.delays):
        raise ConfigError("delays", f"{cfg.delays} violate the residue conditions mod 3")
    sim = simulate(DelaySchedule.from_tuple(cfg.delays, cfg.horizon))
    rows = []
    for j in sorted(sim.slots):
        for t, arrivals in sim.slots[j].items():
            for role in sorted({a.role for a in arrivals}):
                labels = sorted(f"W{a.message[0]}{a.message[1]}" for a in arrivals if a.role == role)
                rows.append((t, j, ";".join(labels), role))
    rows.sort(key=lambda r: (r[0], r[1], r[3] != DESIRED))
    per = throughput(sim, per_message=True)
    summary = {"delays": list(cfg.delays), "horizon": cfg.horizon, "throughput": throughput(sim),
               **{f"throughput_W{j}{i}": per[(j, i)] for (j, i) in sorted(per)},
               "collisions": len(sim.collisions())}
    return _emit(cfg, summary, ["slot", "receiver", "arrivals", "role"], rows), EXIT_OK


def cmd_relay(cfg):
    from .schemes import general_extension_length
    if cfg.kind == "perfect":
        T = max(cfg.M, cfg.K) + 1
    else:
        T = max(general_extension_length(cfg.M, cfg.K, cfg.n),
                general_extension_length(cfg.K, cfg.M, cfg.n))
    top = sample_topology(cfg.M, cfg.K, T, cfg.seed)
    tp = compose_two_hop(top, cfg.n, cfg.kind, seed=cfg.seed, phase2=cfg.phase2)
    d1, d2 = tp.hop_dof()
    fields = {"M": cfg.M, "K": cfg.K, "n": cfg.n, "scheme": cfg.kind, "phase2": cfg.phase2,
              "hop1_dof": d1, "hop2_dof": d2, "mu1": tp.mu1, "mu2": tp.mu2,
              "paired_streams": tp.paired_streams, "unpaired_streams": tp.unpaired,
              "end_to_end_dof": tp.dof, "bound": relay_dof(cfg.M, cfg.K)}
    return _emit(cfg, fields), EXIT_OK


def cmd_suite(cfg):
    results = run_suite(cfg.seed, cfg.trials, cfg.only)
    for r in results:
        print(summary_line(r), file=sys.stderr)
    rows = [(r.number, r.title, "pass" if r.passed else "fail", r.within_budget,
             " | ".join(f"{c.name}: {c.detail}" for c in r.checks if not c.passed))
            for r in results]
    ok = all(r.passed for r in results)
    summary = {"criteria": len(results), "passed": sum(r.passed for r in results),
               "trials": cfg.trials}
    return (_emit(cfg, summary, ["criterion", "title", "status", "within_budget", "failed_checks"],
                  rows), EXIT_OK if ok else EXIT_FAIL)


COMMAND_FUNCS = {"outerbound": cmd_outerbound, "build": cmd_build, "verify": cmd_verify,
                 "slope": cmd_slope, "delay": cmd_delay, "relay": cmd_relay, "suite": cmd_suite}


def run(cfg):
    """Execute a validated config; returns ``(text, exit_status)``."""
    try:
        return COMMAND_FUNCS[cfg.command](cfg)
    except ConfigError:
        raise
    except RankFailureError as exc:
        return _emit(cfg, {"status": "fail", "error": "rank_failure", "receiver": exc.receiver,
                           "ratio": exc.ratio, "message": str(exc)}), EXIT_FAIL
    except (StateError, XNetError) as exc:
        return _emit(cfg, {"status": "fail", "error": type(exc).__name__,
                           "message": str(exc)}), EXIT_FAIL


def _write(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    try:
        cfg = load_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        sys.stdout.write(format_record({"status": "config_error", "field": exc.field,
                                        "message": str(exc)}))
        return EXIT_CONFIG
    try:
        text, status = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        sys.stdout.write(format_record({"status": "config_error", "field": exc.field,
                                        "message": str(exc), **_stamp(cfg)}))
        return EXIT_CONFIG
    _write(text, cfg.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
