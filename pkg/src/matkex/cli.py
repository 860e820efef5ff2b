"""``matkex`` command line: gen, run, attack, bench, verify.

Exit status: 0 success, 1 attack failed, 2 usage error, 3 solver budget
exhausted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import _kernels
from .attacks import AttackFailed, attack_bcfrx_integer, attack_hks_detail, attack_ru_detail, run_bcfrx_mod_p
from .bench import format_table, run_benchmark
from .harness import (
    PROTOCOLS,
    ExperimentConfig,
    UsageError,
    instance_from_json,
    instance_to_json,
    make_instance,
    run_experiment,
    trial_seeds,
    verify_document,
    verify_transcript_file,
)
from .polysys import Budget

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _add_common(sp):
    sp.add_argument("--protocol", choices=PROTOCOLS, default="bcfrx_p")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--prime-bits", type=int, default=32)
    sp.add_argument("--word-len", type=int, default=12)
    sp.add_argument("--dim", type=int, default=6, help="m for HKS, n for RU")
    sp.add_argument("--exp-n", type=int, default=5, help="HKS exponent bound n")
    sp.add_argument("--deg", type=int, default=3, help="secret polynomial degree (HKS, RU)")
    sp.add_argument("--samples", type=int, default=8, help="HKS sample count s")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--transcripts", type=int, default=2)
    sp.add_argument("--sampler", choices=("word", "uniform"), default="word")
    sp.add_argument("--budget-pairs", type=int, default=None)
    sp.add_argument("--engine", choices=("kernel", "groebner", "lex"), default="kernel")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", default=None)


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig(
        protocol=args.protocol, trials=args.trials, seed=args.seed, prime_bits=args.prime_bits,
        word_len=args.word_len, dim=args.dim, exp_n=args.exp_n, deg=args.deg, samples=args.samples,
        transcripts=args.transcripts, sampler=args.sampler, budget_pairs=args.budget_pairs,
        engine=args.engine, workers=args.workers, out=args.out,
    )
    cfg.validate()
    return cfg


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    cfg = _config(args)
    docs = [instance_to_json(cfg, make_instance(cfg, s)) for s in trial_seeds(cfg.seed, cfg.trials)]
    _emit(docs[0] if len(docs) == 1 else docs, cfg.out)
    return EXIT_OK


def cmd_run(args) -> int:
    summary = run_experiment(_config(args))
    agg = summary.aggregates
    print(json.dumps(agg, indent=2, sort_keys=True))
    if agg["status"].get("budget-exhausted") and agg["successes"] < agg["trials"]:
        return EXIT_BUDGET
    return EXIT_OK if agg["successes"] == agg["trials"] else EXIT_FAILED


def _attack_doc(d, args) -> tuple:
    budget = Budget(max_pairs=args.budget_pairs) if args.budget_pairs else None
    proto, pub, truth = instance_from_json(d)
    if proto == "bcfrx_p":
        res = run_bcfrx_mod_p(pub[0], pub[1:], budget=budget, engine=args.engine)
        out = res.summary()
        out["protocol"] = proto
        out["recovered_keys"] = [k.to_json() for k in res.keys]
        out["success"] = bool(res.keys)
        if truth:
            out["matches_truth"] = truth["K"][0] in res.keys
        status = "success" if res.keys else (
            "budget-exhausted" if any(o.status == "budget-exhausted" for o in res.outcomes) else "attack-failed")
    elif proto == "bcfrx":
        try:
            rep = attack_bcfrx_integer(pub, args.prime_bits, seed=args.seed, budget=budget, engine=args.engine)
        except AttackFailed as exc:
            rep = exc.report
        out = rep.to_json()
        if truth and rep.recovered_key is not None:
            out["matches_truth"] = rep.recovered_key == truth["K"][0]
        status = rep.status
    elif proto == "hks":
        res = attack_hks_detail(pub, pub.sampler(random.Random(args.seed)), args.samples)
        out = {"protocol": proto, "success": True, "key": [str(x) for x in res.key], "samples": res.samples}
        if truth:
            out["matches_truth"] = res.key == truth["key"]
        status = "success"
    else:
        res = attack_ru_detail(pub)
        out = {"protocol": proto, "success": True, "key": [str(x) for x in res.key]}
        if truth:
            out["matches_truth"] = res.key == truth["key"]
        status = "success"
    return out, status


def cmd_attack(args) -> int:
    with open(args.instance) as fh:
        doc = json.load(fh)
    docs = doc if isinstance(doc, list) else [doc]
    for d in docs:
        errs = verify_document(d)
        if errs:
            raise UsageError("; ".join(errs))
    results = [_attack_doc(d, args) for d in docs]
    _emit([r for r, _ in results] if isinstance(doc, list) else results[0][0], args.out)
    statuses = {s for _, s in results}
    if statuses == {"success"}:
        return EXIT_OK
    return EXIT_BUDGET if "budget-exhausted" in statuses else EXIT_FAILED


def cmd_bench(args) -> int:
    sizes = tuple(int(x) for x in args.sizes.split(","))
    rows = run_benchmark(sizes, args.prime, args.repeats, args.seed)
    print(f"backend in use: {_kernels.BACKEND}")
    print(format_table(rows))
    if args.out:
        _emit(rows, args.out)
    return EXIT_OK if all(r["agree"] in (True, None) for r in rows) else EXIT_FAILED


def cmd_verify(args) -> int:
    errs = verify_transcript_file(args.path)
    for e in errs:
        print(e)
    if not errs:
        print(f"{args.path}: valid")
    return EXIT_OK if not errs else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matkex", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    sp = sub.add_parser("gen", help="generate honest instances with ground truth")
    _add_common(sp)
    sp.set_defaults(func=cmd_gen)
    sp = sub.add_parser("run", help="run seeded trials and report statistics")
    _add_common(sp)
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("attack", help="attack an instance file (public fields only)")
    sp.add_argument("instance")
    sp.add_argument("--prime-bits", type=int, default=32)
    sp.add_argument("--samples", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget-pairs", type=int, default=None)
    sp.add_argument("--engine", choices=("kernel", "groebner", "lex"), default="kernel")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_attack)
    sp = sub.add_parser("bench", help="numba versus numpy kernel timings")
    sp.add_argument("--sizes", default="32,64,128,256")
    sp.add_argument("--prime", type=int, default=2147483647)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_bench)
    sp = sub.add_parser("verify", help="validate a JSON instance or report")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
