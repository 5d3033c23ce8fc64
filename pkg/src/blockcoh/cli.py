"""Command-line front end.

Usage examples:

  # classify a Kraus-set file against every free-operation class
  blockcoh classify channel.json

  # generate a strict-class channel and pipe it straight back into classify
  blockcoh gen --class sbio --partition 2,3 --seed 7 | blockcoh classify -

  # operator-count bounds, with big integers as decimal strings
  blockcoh bound --class bio --partition 2,3

  # dilate a POVM file to a projective measurement
  blockcoh dilate povm.json -o dilation.json

  # evaluate a coherence measure on a state file
  blockcoh measure --state plus.json --partition 1,1

  # run a named verification suite
  blockcoh verify inclusion --trials 50 --seed 3

All randomness is seeded (default seed 42) and outputs are byte-stable for
identical invocations.  The default classifier tolerance is 1e-10 and can be
overridden with --tol or the BLOCKCOH_TOL environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import channels, counting, measures, naimark, serialize
from .blockcore import BlockPartition, is_block_incoherent, validate_density_matrix
from .sampling import random_block_incoherent_state, random_density_matrix, random_povm

DEFAULT_SEED = 42
DEFAULT_TRIALS = 200
SUITES = ("appendix-a", "appendix-b", "lemmas", "inclusion", "naimark", "measures")


def _default_tol() -> float:
    return float(os.environ.get("BLOCKCOH_TOL", "1e-10"))


def _emit(text: str, output: str | None):
    if output:
        directory = os.path.dirname(os.path.abspath(output)) or "."
        import tempfile

        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".blockcoh-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, output)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def cmd_classify(args) -> int:
    obj = _read_json(args.kraus_file)
    ks = serialize.kraus_from_json(obj)
    if args.partition is not None:
        ks = channels.KrausSet(args.partition, ks.operators)
    report = channels.classifier_report(ks, args.tol)
    _emit(serialize.dumps(report), args.output)
    return 0 if report["cptp"] else 2


def cmd_gen(args) -> int:
    ks = channels.gen_random(args.kind, args.partition, args.seed)
    _emit(serialize.dumps(serialize.kraus_to_json(ks)), args.output)
    return 0


def cmd_bound(args) -> int:
    if args.kind == "bio":
        report = counting.bio_bound(args.partition)
    else:
        report = counting.sbio_bound(args.partition)
    payload = {
        "partition": list(args.partition.dims),
        "class": report.kind,
        "per_level": [str(c) for c in report.per_level],
        "total": str(report.total),
    }
    _emit(serialize.dumps(payload), args.output)
    return 0


def cmd_dilate(args) -> int:
    povm = serialize.povm_from_json(_read_json(args.povm_file))
    ext = naimark.dilate(povm)
    partition, perm = naimark.induced_partition(povm)
    payload = {
        "dim": povm.dim,
        "outcomes": povm.n_outcomes,
        "V": serialize.matrix_to_json(ext.global_unitary),
        "ancilla_index": ext.ancilla_state_index,
        "partition": list(partition.dims),
        "permutation": [int(p) for p in perm],
    }
    _emit(serialize.dumps(payload), args.output)
    return 0


def cmd_measure(args) -> int:
    rho = validate_density_matrix(serialize.state_from_json(_read_json(args.state)))
    if rho.shape[0] != args.partition.total:
        raise serialize.SchemaError(
            f"state dimension {rho.shape[0]} does not match partition {args.partition}"
        )
    fn = {
        "rel-entropy": measures.rel_entropy_block_coherence,
        "l1": measures.l1_block_coherence,
    }[args.measure]
    value = max(0.0, fn(args.partition, rho))
    payload = {
        "measure": args.measure,
        "partition": list(args.partition.dims),
        "value": value,
    }
    _emit(serialize.dumps(payload), args.output)
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

class _Suite:
    def __init__(self):
        self.lines = []
        self.ok = True

    def check(self, name: str, passed: bool, detail: str = ""):
        tag = "PASS" if passed else "FAIL"
        suffix = f" {detail}" if detail else ""
        self.lines.append(f"{tag} {name}{suffix}")
        self.ok = self.ok and passed


def _suite_appendix(partition: BlockPartition, seed: int, trials: int, strict: bool) -> _Suite:
    suite = _Suite()
    kind = "sbio" if strict else "bio"
    structural = channels.is_sbio_structural if strict else channels.is_bio_structural
    semantic = channels.is_sbio_semantic if strict else channels.is_bio_semantic
    deviation = channels.sbio_semantic_deviation if strict else channels.bio_semantic_deviation

    worst = 0.0
    all_ok = True
    for t in range(trials):
        ks = channels.gen_random(kind, partition, seed + t)
        all_ok = all_ok and channels.verify_cptp(ks) and structural(ks) and semantic(ks)
        worst = max(worst, deviation(ks))
    suite.check(
        f"{kind}-structural-implies-semantic",
        all_ok and worst <= 1e-9,
        f"sets={trials} worst_dev={worst:.3e}",
    )

    rejected = 0
    for t in range(trials):
        bad = channels.gen_pattern_violating(kind, partition, seed + 10_000 + t)
        if not semantic(bad):
            rejected += 1
    suite.check(
        f"{kind}-pattern-violations-rejected",
        rejected == trials,
        f"rejected={rejected}/{trials}",
    )

    if strict:
        worst_comm = 0.0
        for t in range(trials):
            ks = channels.gen_random("sbio", partition, seed + t)
            rhos = np.stack([
                random_density_matrix(partition.total, seed + 20_000 + 10 * t + r)
                for r in range(10)
            ])
            worst_comm = max(worst_comm, channels.sbio_commutation_deviation(ks, rhos))
        suite.check(
            "sbio-commutes-with-dephasing",
            worst_comm <= 1e-9,
            f"states=10x{trials} worst_dev={worst_comm:.3e}",
        )
    return suite


def _suite_lemmas(seed: int, trials: int) -> _Suite:
    suite = _Suite()
    for d in range(2, 6):
        ones = BlockPartition([1] * d)
        bio_total = counting.bio_bound(ones).total
        sbio_total = counting.sbio_bound(ones).total
        suite.check(
            f"rank-one-bounds-d={d}",
            counting.rank_one_reduction_check(d),
            f"bio={bio_total} sbio={sbio_total}",
        )
    return suite


def _suite_inclusion(partition: BlockPartition, seed: int, trials: int) -> _Suite:
    suite = _Suite()
    ok = all(
        channels.is_sbio_structural(channels.gen_random("pbio", partition, seed + t))
        for t in range(trials)
    )
    suite.check("pbio-within-sbio", ok, f"sets={trials}")
    ok = all(
        channels.is_bio_structural(channels.gen_random("sbio", partition, seed + t))
        for t in range(trials)
    )
    suite.check("sbio-within-bio", ok, f"sets={trials}")
    ok = all(
        channels.is_mbio(channels.gen_random("bio", partition, seed + t))
        for t in range(trials)
    )
    suite.check("bio-within-mbio", ok, f"sets={trials}")
    return suite


def _suite_naimark(seed: int, trials: int) -> _Suite:
    suite = _Suite()
    rng = np.random.default_rng(seed)
    worst_prob = 0.0
    worst_unitary = 0.0
    worst_pvm = 0.0
    for t in range(trials):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(1, 5))
        povm = naimark.Povm(random_povm(d, n, rng))
        ext = naimark.dilate(povm)
        big = d * n
        v = ext.global_unitary
        worst_unitary = max(
            worst_unitary,
            float(np.max(np.abs(v.conj().T @ v - np.eye(big)))),
            float(np.max(np.abs(v @ v.conj().T - np.eye(big)))),
        )
        for i in range(n):
            for j in range(n):
                want = ext.pvm[i] if i == j else np.zeros((big, big))
                worst_pvm = max(
                    worst_pvm, float(np.max(np.abs(ext.pvm[i] @ ext.pvm[j] - want)))
                )
        worst_pvm = max(worst_pvm, float(np.max(np.abs(ext.pvm.sum(axis=0) - np.eye(big)))))
        worst_prob = max(worst_prob, naimark.verify_dilation(povm, ext, trials=20, seed=seed + t))
    suite.check("dilation-unitary", worst_unitary <= 1e-9, f"worst_dev={worst_unitary:.3e}")
    suite.check("dilation-pvm-properties", worst_pvm <= 1e-9, f"worst_dev={worst_pvm:.3e}")
    suite.check("dilation-probabilities", worst_prob <= 1e-10, f"worst_dev={worst_prob:.3e}")
    return suite


def _suite_measures(seed: int, trials: int) -> _Suite:
    suite = _Suite()
    partitions = [BlockPartition(p) for p in ((1, 1), (2, 3), (1, 2, 2))]
    faithful = True
    for p in partitions:
        for t in range(trials):
            rho = random_density_matrix(p.total, seed + t)
            free = random_block_incoherent_state(p, seed + 5_000 + t)
            for state in (rho, free):
                small = measures.rel_entropy_block_coherence(p, state) <= 1e-9
                faithful = faithful and (small == is_block_incoherent(p, state, 1e-8))
                small = measures.l1_block_coherence(p, state) <= 1e-9
                faithful = faithful and (small == is_block_incoherent(p, state, 1e-8))
    suite.check("nonnegativity-and-faithfulness", faithful, f"states={2 * trials}/partition")

    p = BlockPartition((2, 3))
    n_channels = max(1, trials // 10)
    for probe in ("monotonicity", "strong-monotonicity"):
        worst = 0.0
        offending = None
        for t in range(n_channels):
            ch = channels.gen_random("bio", p, seed + t)
            report = measures.probe_report(
                probe, measures.rel_entropy_block_coherence, p, ch, trials=20, seed=seed + t
            )
            if report["worst_violation"] > worst:
                worst = report["worst_violation"]
                offending = report
        detail = f"channels={n_channels} worst_violation={worst:.3e}"
        if worst > 1e-8 and offending is not None:
            # keep the offending state around so the violation can be replayed
            artifact = f"blockcoh-counterexample-{probe}.json"
            serialize.write_json_atomic(artifact, offending)
            detail += f" counterexample={artifact}"
        suite.check(probe, worst <= 1e-8, detail)

    worst_convex = max(
        measures.convexity_probe(measures.rel_entropy_block_coherence, p, trials=trials, seed=seed),
        measures.convexity_probe(measures.l1_block_coherence, p, trials=trials, seed=seed),
    )
    suite.check("convexity", worst_convex <= 1e-8, f"worst_violation={worst_convex:.3e}")
    return suite


def cmd_verify(args) -> int:
    partition = args.partition if args.partition is not None else BlockPartition((2, 3))
    if args.suite == "appendix-a":
        suite = _suite_appendix(partition, args.seed, args.trials, strict=False)
    elif args.suite == "appendix-b":
        suite = _suite_appendix(partition, args.seed, args.trials, strict=True)
    elif args.suite == "lemmas":
        suite = _suite_lemmas(args.seed, args.trials)
    elif args.suite == "inclusion":
        suite = _suite_inclusion(partition, args.seed, args.trials)
    elif args.suite == "naimark":
        suite = _suite_naimark(args.seed, args.trials)
    else:
        suite = _suite_measures(args.seed, args.trials)
    _emit("".join(line + "\n" for line in suite.lines), args.output)
    return 0 if suite.ok else 1


def _partition_arg(text: str) -> BlockPartition:
    return serialize.parse_partition(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockcoh",
        description="Block-coherence toolkit: classify, generate, bound, dilate, measure, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, partition_default=None):
        p.add_argument("--partition", type=_partition_arg, default=partition_default,
                       help="comma-separated block sizes, e.g. 2,3")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--tol", type=float, default=_default_tol())
        p.add_argument("-o", "--output", default=None, help="write to file instead of stdout")

    p = sub.add_parser("classify", help="classify a Kraus-set file")
    p.add_argument("kraus_file", help="Kraus-set JSON file, or - for stdin")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gen", help="generate a random channel of a class")
    p.add_argument("--class", dest="kind", required=True, choices=channels.GEN_KINDS)
    common(p, partition_default=BlockPartition((2, 3)))
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bound", help="operator-count bound for a partition")
    p.add_argument("--class", dest="kind", required=True, choices=("bio", "sbio"))
    common(p, partition_default=BlockPartition((2, 3)))
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("dilate", help="dilate a POVM file to a projective measurement")
    p.add_argument("povm_file", help="POVM JSON file, or - for stdin")
    common(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("measure", help="evaluate a block-coherence measure on a state file")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--measure", choices=("rel-entropy", "l1"), default="rel-entropy")
    common(p, partition_default=BlockPartition((1, 1)))
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common(p)
    p.set_defaults(func=cmd_verify)

    for sp in sub.choices.values():
        if not any(a.dest == "trials" for a in sp._actions):
            sp.add_argument("--trials", type=int, default=DEFAULT_TRIALS)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (serialize.SchemaError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "parse"}) + "\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "runtime"}) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
