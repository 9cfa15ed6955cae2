"""Command-line interface.

Exit codes: 0 success, 2 usage or validation error, 3 inconclusive result,
4 I/O error, 5 inconsistent oracle.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional

from . import bench
from .cache import CacheGeometry
from .errors import (
    BackendError,
    InconsistentOracle,
    NotPermutation,
    OracleError,
    ParseError,
    ProbeUndistinguishing,
    ReplSimError,
    ValidationError,
)
from .inference import SimOracle, age_graph, detect_dueling, identify_policy, infer_permutation_policy
from .inference.identify import equivalence_classes
from .policies import (
    AdaptiveSpec,
    Basic,
    format_policy_name,
    parse_policy_name,
    parse_set_list,
    validate_policy,
    zoo,
)
from .policies.presets import load_presets
from .seqlang import AccessSeq, eval_sequence, parse_sequence

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_IO, EXIT_INCONSISTENT = 0, 2, 3, 4, 5
SEED_ENV = "REPLSIM_SEED"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunManifest:
    """Everything needed to re-run one command with identical output."""

    subcommand: str
    options: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        if not isinstance(data, dict) or "subcommand" not in data:
            raise ValueError("manifest must be an object with a 'subcommand' key")
        return cls(data["subcommand"], dict(data.get("options", {})))


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".replsim-", suffix=".tmp")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{SEED_ENV} must be an integer, got {raw!r}", EXIT_USAGE) from None


def _resolve_cache(args, policy_attr: str = "policy"):
    """Policy and geometry from ``--preset`` and/or explicit flags."""
    policy_text = getattr(args, policy_attr, None)
    num_sets, assoc = args.num_sets, args.assoc
    if args.preset:
        presets = load_presets()
        if args.preset not in presets:
            raise CliError(f"unknown preset {args.preset!r}; see list-policies", EXIT_USAGE)
        preset = presets[args.preset]
        policy_text = policy_text or preset.policy_text
        num_sets = num_sets or preset.num_sets
        assoc = assoc or preset.assoc
    if not policy_text:
        raise CliError(f"--{policy_attr.replace('_', '-')} or --preset is required", EXIT_USAGE)
    policy = parse_policy_name(policy_text)
    assoc = assoc or 8
    if num_sets is None:
        num_sets = max(policy.leaders_a + policy.leaders_b, default=0) + 1 if isinstance(policy, AdaptiveSpec) else 1
    geometry = CacheGeometry(num_sets, assoc)
    if not isinstance(policy, AdaptiveSpec):
        validate_policy(policy, assoc)
    return policy, geometry


def _parse_sets(text: Optional[str], geometry: CacheGeometry):
    if text is None:
        return None
    sets = parse_set_list(text)
    for s in sets:
        if not 0 <= s < geometry.num_sets:
            raise ValidationError(f"set {s} outside 0..{geometry.num_sets - 1}")
    return sets


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_seq(args) -> int:
    policy, geometry = _resolve_cache(args)
    if args.num_sets is None and args.sets:
        # without an explicit geometry the cache grows to hold the requested sets
        requested = parse_set_list(args.sets)
        if requested and max(requested) >= geometry.num_sets:
            geometry = CacheGeometry(max(requested) + 1, geometry.assoc)
    sets = _parse_sets(args.sets, geometry) or (0,)
    seq = AccessSeq(
        main=tuple(parse_sequence(args.sequence)),
        init=tuple(parse_sequence(args.init)) if args.init else (),
        loop_count=args.loop,
        target_sets=tuple(sets),
    )
    counts = eval_sequence(seq, policy, geometry, seed=args.seed)
    lines = []
    if len(sets) > 1:
        lines += [f"set {s}: hits: {h}, misses: {m}" for s, (h, m) in counts.per_set.items()]
    lines.append(f"hits: {counts.hits}, misses: {counts.misses}")
    print("\n".join(lines))
    return EXIT_OK


def _load_candidates(spec: str, assoc: int):
    if spec == "all":
        return zoo(assoc)
    candidates = []
    for lineno, raw in enumerate(_read_text(spec).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                candidates.append(parse_policy_name(line))
            except ParseError as exc:
                raise ParseError(f"{spec}: {exc}", position=f"line {lineno}") from None
    if not candidates:
        raise ValidationError(f"{spec}: no candidate policies")
    return candidates


def cmd_identify(args) -> int:
    policy, geometry = _resolve_cache(args, "oracle_policy")
    candidates = _load_candidates(args.candidates, geometry.assoc)
    oracle = SimOracle(policy, geometry, seed=args.seed)
    report = identify_policy(oracle, candidates, n_seq=args.nseq, length=args.len,
                             trials_per_seq=args.trials, tolerance=args.tolerance, seed=args.seed)
    survivors = report.survivors
    classes = equivalence_classes(survivors, geometry.assoc, seed=args.seed + 1) if survivors else []
    text = report.to_text() + f"\nequivalence classes among survivors: {len(classes)}\n"
    if args.json:
        write_atomic(args.json, json.dumps(report.to_dict(), indent=2) + "\n")
    sys.stdout.write(text)
    return EXIT_OK if len(classes) == 1 else EXIT_INCONCLUSIVE


def cmd_infer_perm(args) -> int:
    policy, geometry = _resolve_cache(args)
    oracle = SimOracle(policy, geometry, seed=args.seed)
    spec = infer_permutation_policy(oracle, repetitions=args.repetitions)
    lines = [f"Pi_{i} = ({', '.join(map(str, v))})" for i, v in enumerate(spec.hits)]
    lines.append(f"miss = ({', '.join(map(str, spec.miss))})")
    lines.append(f"policy: {format_policy_name(spec)}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_age_graph(args) -> int:
    policy, geometry = _resolve_cache(args)
    oracle = SimOracle(policy, geometry, seed=args.seed)
    graph = age_graph(oracle, args.seq, args.nmax, args.trials)
    _emit(args, graph.to_csv())
    return EXIT_OK


def cmd_duel_scan(args) -> int:
    policy, geometry = _resolve_cache(args)
    if isinstance(policy, AdaptiveSpec):
        policy_a, policy_b = policy.policy_a, policy.policy_b
    else:
        policy_a = policy_b = policy
    if args.policy_a:
        policy_a = parse_policy_name(args.policy_a)
    if args.policy_b:
        policy_b = parse_policy_name(args.policy_b)
    if policy_a == policy_b:
        raise ValidationError("duel-scan needs two different policies; pass --policy-a and --policy-b")
    oracle = SimOracle(policy, geometry, seed=args.seed)
    sets = _parse_sets(args.sets, geometry)
    result = detect_dueling(oracle, policy_a, policy_b, sets=sets, seed=args.seed)
    print(result.summary())
    if args.out:
        write_atomic(args.out, result.to_csv())
    return EXIT_OK


def cmd_bench(args) -> int:
    events = bench.parse_event_config(_read_text(args.events)) if args.events else bench.EventConfig.of("cost")
    if not events.events:
        raise ValidationError("event configuration defines no events")
    cfg = bench.BenchConfig(
        warm_up_count=args.warm_up,
        n_measurements=args.n_measurements,
        loop_count=args.loop_count,
        unroll_count=args.unroll_count,
        agg=bench.Agg(args.agg),
        mode=bench.Mode(args.mode),
    )
    backend = bench.SyntheticBackend(args.base, args.per_unit, noise_scale=args.noise_scale,
                                     seed=args.seed, capacity=args.capacity)
    result = bench.run_benchmark(backend, cfg, events)
    _emit(args, result.to_text())
    return EXIT_OK


def cmd_list_policies(args) -> int:
    lines = ["basic policies: " + ", ".join(b.value for b in Basic),
             "QLRU variants: QLRU_H<x><y>_M<m>_R<r>_U<u>[_UMO] or QLRU_H<x><y>_MR<p>-<m>_R<r>_U<u>[_UMO]",
             "presets:"]
    presets = load_presets()
    width = max(len(n) for n in presets)
    for name in sorted(presets):
        p = presets[name]
        lines.append(f"  {name:<{width}}  {p.num_sets:>5} sets x {p.assoc:>2} ways  {p.policy_text}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        manifest = RunManifest.from_json(_read_text(args.manifest))
    except ValueError as exc:
        raise CliError(f"invalid manifest {args.manifest}: {exc}", EXIT_USAGE) from None
    if manifest.subcommand not in _COMMANDS or manifest.subcommand == "replay":
        raise CliError(f"manifest names unknown subcommand {manifest.subcommand!r}", EXIT_USAGE)
    # manifests hold the parsed namespace; absent optional flags take their defaults
    options: Dict[str, object] = {}
    for action in _subparser(manifest.subcommand)._actions:
        if action.dest in ("help", "manifest_out"):
            continue
        if action.dest in manifest.options:
            options[action.dest] = manifest.options[action.dest]
        elif action.required or not action.option_strings:
            raise CliError(f"manifest {args.manifest} lacks required option {action.dest!r}", EXIT_USAGE)
        else:
            options[action.dest] = action.default
    return _dispatch(argparse.Namespace(command=manifest.subcommand, manifest_out=None, **options))


def _subparser(name: str) -> argparse.ArgumentParser:
    for action in build_parser()._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


_COMMANDS: Dict[str, Callable] = {
    "seq": cmd_seq,
    "identify": cmd_identify,
    "infer-perm": cmd_infer_perm,
    "age-graph": cmd_age_graph,
    "duel-scan": cmd_duel_scan,
    "bench": cmd_bench,
    "list-policies": cmd_list_policies,
    "replay": cmd_replay,
}


def _add_cache_flags(p: argparse.ArgumentParser, policy_flag: str = "--policy") -> None:
    p.add_argument(policy_flag, help="policy name, e.g. LRU, PLRU, QLRU_H11_M1_R0_U0")
    p.add_argument("--preset", help="bundled preset supplying policy and geometry (see list-policies)")
    p.add_argument("--assoc", type=int, help="associativity (default 8 or the preset's)")
    p.add_argument("--num-sets", type=int, help="number of simulated sets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replsim", description="Cache replacement-policy simulation and inference.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
        p.add_argument("--manifest-out", help="write a manifest that replays this run")
        return p

    p = add("seq", "evaluate an access sequence and count measured hits")
    _add_cache_flags(p)
    p.add_argument("--sets", help="target sets, e.g. 0,3,8-11 (default 0)")
    p.add_argument("--loop", type=int, default=1, help="times the sequence is executed (default 1)")
    p.add_argument("--init", help="sequence executed once before the loop")
    p.add_argument("--cbox", type=int, help="accepted for compatibility; a simulated cache has a single slice")
    p.add_argument("sequence", help='access sequence, e.g. "<wbinvd> A B C A?"')

    p = add("identify", "identify a policy by comparing random-sequence hit counts")
    _add_cache_flags(p, "--oracle-policy")
    p.add_argument("--candidates", default="all", help='"all" or a file with one policy name per line')
    p.add_argument("--nseq", type=int, default=250, help="number of random sequences (default 250)")
    p.add_argument("--len", type=int, default=50, help="length of each sequence (default 50)")
    p.add_argument("--trials", type=int, default=64, help="simulation trials per sequence for random candidates")
    p.add_argument("--tolerance", type=float, default=0.5, help="accepted mean-hit gap for random candidates")
    p.add_argument("--json", help="also write the report as JSON to this path")

    p = add("infer-perm", "recover the permutation vectors of a permutation policy")
    _add_cache_flags(p)
    p.add_argument("--repetitions", type=int, default=2, help="identical probes that must agree (default 2)")
    p.add_argument("--out", help="output path (default stdout)")

    p = add("age-graph", "survival of each block as fresh blocks are accessed (CSV)")
    _add_cache_flags(p)
    p.add_argument("--seq", required=True, help="access sequence")
    p.add_argument("--nmax", type=int, default=200, help="largest number of fresh blocks (default 200)")
    p.add_argument("--trials", type=int, default=100, help="repetitions per cell (default 100)")
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = add("duel-scan", "find the fixed-policy sets of a set-dueling cache")
    _add_cache_flags(p)
    p.add_argument("--policy-a", help="first dueling policy (default from an adaptive --policy)")
    p.add_argument("--policy-b", help="second dueling policy (default from an adaptive --policy)")
    p.add_argument("--sets", help="sets to classify (default all)")
    p.add_argument("--cbox", type=int, help="accepted for compatibility; a simulated cache has a single slice")
    p.add_argument("--out", help="per-set CSV output path")

    p = add("bench", "run a benchmark on the synthetic counter backend")
    p.add_argument("--base", type=float, default=0.0, help="constant overhead per run")
    p.add_argument("--per-unit", type=float, default=1.0, help="cost of one benchmark body")
    p.add_argument("--noise-scale", type=float, default=0.0, help="upper bound of uniform per-run noise")
    p.add_argument("--capacity", type=int, default=4, help="counters readable in one pass")
    p.add_argument("--events", help="event configuration file (default: one event named cost)")
    p.add_argument("--warm-up", type=int, default=0, help="discarded warm-up measurements")
    p.add_argument("--n-measurements", type=int, default=10)
    p.add_argument("--loop-count", type=int, default=0)
    p.add_argument("--unroll-count", type=int, default=1)
    p.add_argument("--agg", choices=[a.value for a in bench.Agg], default=bench.Agg.MEDIAN.value)
    p.add_argument("--mode", choices=[m.value for m in bench.Mode], default=bench.Mode.TWO_UNROLL.value)
    p.add_argument("--out", help="output path (default stdout)")

    add("list-policies", "list policy names and bundled presets")

    p = add("replay", "re-run a command from a manifest")
    p.add_argument("manifest", help="manifest written with --manifest-out")
    return parser


def _dispatch(args) -> int:
    if args.seed is None:
        args.seed = _default_seed()
    code = _COMMANDS[args.command](args)
    if code == EXIT_OK and getattr(args, "manifest_out", None):
        options = {k: v for k, v in vars(args).items() if k not in ("command", "manifest_out")}
        write_atomic(args.manifest_out, RunManifest(args.command, options).to_json())
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except CliError as exc:
        print(f"replsim: error: {exc}", file=sys.stderr)
        return exc.code
    except InconsistentOracle as exc:
        print(f"replsim: inconsistent oracle: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (NotPermutation, ProbeUndistinguishing, OracleError, BackendError) as exc:
        print(f"replsim: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ReplSimError, ValueError) as exc:
        print(f"replsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
