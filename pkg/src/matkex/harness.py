"""Experiment driver: instance generation, trial execution, reports."""

from __future__ import annotations

import json
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .arith import gen_prime
from .attacks import (
    AttackFailed,
    attack_bcfrx_integer,
    attack_hks_detail,
    attack_ru_detail,
    run_bcfrx_mod_p,
)
from .matlin import Matrix
from .polysys import Budget
from .protocols import (
    SAMPLERS,
    BcfrxTranscript,
    HksInstance,
    RuInstance,
    alice_recover,
    bcfrx_keygen,
    bcfrx_session,
    hks_setup,
    ru_setup,
)

PROTOCOLS = ("bcfrx", "bcfrx_p", "hks", "ru")
TIMING_KEYS = frozenset({"seconds", "timings", "elapsed", "per_trial_seconds", "solve_seconds"})


class UsageError(ValueError):
    """Invalid experiment configuration or input file."""


@dataclass
class ExperimentConfig:
    protocol: str
    trials: int
    seed: int
    prime_bits: int = 32
    word_len: int = 12
    dim: int = 6
    exp_n: int = 5
    deg: int = 3
    samples: int = 8
    transcripts: int = 2
    sampler: str = "word"
    budget_pairs: Optional[int] = None
    engine: str = "kernel"
    workers: int = 1
    out: Optional[str] = None

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise UsageError(f"protocol must be one of {', '.join(PROTOCOLS)}")
        if self.seed is None:
            raise UsageError("a seed is required")
        for name in ("trials", "dim", "samples", "transcripts", "workers"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.prime_bits < 3:
            raise UsageError("prime_bits must be >= 3")
        if self.word_len < 0:
            raise UsageError("word_len must be >= 0")
        if self.exp_n < 2:
            raise UsageError("exp_n must be >= 2")
        if self.sampler not in SAMPLERS:
            raise UsageError(f"sampler must be one of {', '.join(SAMPLERS)}")
        if self.protocol == "bcfrx" and self.sampler != "word":
            raise UsageError("integer BCFRX needs the word sampler")
        if self.protocol in ("hks", "ru") and self.dim < 2:
            raise UsageError("dim must be >= 2")
        if self.budget_pairs is not None and self.budget_pairs < 1:
            raise UsageError("budget_pairs must be positive")

    def budget(self) -> Optional[Budget]:
        return Budget(max_pairs=self.budget_pairs) if self.budget_pairs else None


def trial_seeds(seed: int, trials: int) -> list:
    """Independent per-trial seeds derived from the experiment seed."""
    return [int(s.generate_state(2, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(trials)]


# --- instance records -------------------------------------------------------

def make_instance(cfg: ExperimentConfig, seed: int):
    """One honest run for the configured protocol, with ground truth kept."""
    rng = random.Random(seed)
    if cfg.protocol in ("bcfrx", "bcfrx_p"):
        ring = int(gen_prime(cfg.prime_bits, rng)) if cfg.protocol == "bcfrx_p" else None
        key = bcfrx_keygen(ring, cfg.word_len, rng, cfg.sampler)
        ts = [bcfrx_session(key, cfg.word_len, rng, cfg.sampler) for _ in range(cfg.transcripts)]
        return {"key": key, "transcripts": ts}
    p = int(gen_prime(cfg.prime_bits, rng))
    if cfg.protocol == "hks":
        return hks_setup(p, cfg.dim, cfg.exp_n, cfg.deg, rng)
    return ru_setup(p, cfg.dim, cfg.deg, rng)


def instance_to_json(cfg: ExperimentConfig, inst) -> dict:
    if cfg.protocol in ("hks", "ru"):
        return inst.to_json()
    ts = inst["transcripts"]
    params = {"word_len": cfg.word_len, "transcripts": len(ts), "sampler": cfg.sampler}
    if cfg.protocol == "bcfrx_p":
        params["p"] = str(ts[0].modulus)
    return {
        "protocol": cfg.protocol,
        "params": params,
        "public": {"transcripts": [t.to_json() for t in ts]},
        "truth": {
            "M": inst["key"].M.to_json(),
            "K": [t.truth["K"].to_json() for t in ts],
            "lambda": [str(t.truth["lambda"]) for t in ts],
        },
    }


def instance_from_json(d: dict):
    """``(protocol, public_object, truth_or_None)`` from an instance record."""
    proto = d["protocol"]
    if proto == "hks":
        inst = HksInstance.from_json(d)
        return proto, inst.public(), inst.truth
    if proto == "ru":
        inst = RuInstance.from_json(d)
        return proto, inst.public(), inst.truth
    if proto in ("bcfrx", "bcfrx_p"):
        ts = [BcfrxTranscript.from_json(t) for t in d["public"]["transcripts"]]
        truth = None
        if d.get("truth"):
            truth = {"K": [Matrix.from_json(k) for k in d["truth"]["K"]]}
        return proto, ts, truth
    raise UsageError(f"unknown protocol {proto!r}")


# --- trials -----------------------------------------------------------------

def _shape_fields(outcome) -> dict:
    if outcome is None or outcome.shape is None:
        return {"eliminant_degree": None, "max_cofactor_degree": None}
    return {"eliminant_degree": outcome.shape.eliminant_degree,
            "max_cofactor_degree": outcome.shape.max_cofactor_degree}


def run_trial(cfg: ExperimentConfig, index: int, seed: int) -> dict:
    """Setup, honest run, attack, comparison with the ground truth."""
    t0 = time.perf_counter()
    inst = make_instance(cfg, seed)
    t_setup = time.perf_counter() - t0
    rec = {"index": index, "seed": seed}
    t1 = time.perf_counter()
    if cfg.protocol == "bcfrx_p":
        ts = inst["transcripts"]
        rec["honest_ok"] = all(alice_recover(t) == t.truth["K"] for t in ts)
        res = run_bcfrx_mod_p(ts[0], ts[1:], budget=cfg.budget(), engine=cfg.engine)
        win = next((o for o in res.outcomes if o.combo == res.combo), None)
        rec.update(
            success=ts[0].truth["K"] in res.keys,
            unique=len(res.keys) == 1 and res.n_candidates == 1,
            candidates=res.n_candidates,
            keys=len(res.keys),
            combos_tried=len(res.outcomes),
            status="success" if res.keys else _failure_status(res.outcomes),
            **_shape_fields(win),
        )
    elif cfg.protocol == "bcfrx":
        ts = inst["transcripts"]
        rec["honest_ok"] = all(alice_recover(t) == t.truth["K"] for t in ts)
        K = ts[0].truth["K"]
        lam = max(t.truth["lambda"] for t in ts)
        try:
            rep = attack_bcfrx_integer(ts, cfg.prime_bits, seed=seed % (1 << 63), budget=cfg.budget(),
                                       engine=cfg.engine)
        except AttackFailed as exc:
            rep = exc.report
        rec.update(
            success=rep.success and rep.recovered_key == K,
            status=rep.status,
            primes=len(rep.primes),
            candidate_counts=rep.candidate_counts,
            log2_lambda=lam.bit_length(),
            det_one=bool(rep.recovered_key is not None and rep.recovered_key.det() == 1),
        )
    elif cfg.protocol == "hks":
        rec["honest_ok"] = inst.truth["key"] == inst.truth["key_B"]
        res = attack_hks_detail(inst.public(), inst.sampler(random.Random(seed ^ 0x5EED)), cfg.samples)
        rec.update(success=res.key == inst.truth["key"], status="success", samples_used=res.samples)
        if not rec["success"]:
            rec["status"] = "attack-failed"
    else:
        rec["honest_ok"] = inst.truth["key"] == inst.truth["key_B"]
        res = attack_ru_detail(inst.public())
        rec.update(success=res.key == inst.truth["key"], status="success")
        if not rec["success"]:
            rec["status"] = "attack-failed"
    rec["timings"] = {"setup": t_setup, "attack": time.perf_counter() - t1}
    return rec


def _failure_status(outcomes) -> str:
    if any(o.status == "budget-exhausted" for o in outcomes):
        return "budget-exhausted"
    return "attack-failed"


@dataclass
class TrialSummary:
    config: dict
    trials: list
    aggregates: dict = field(default_factory=dict)

    @property
    def success_rate(self) -> float:
        return sum(t["success"] for t in self.trials) / len(self.trials) if self.trials else 0.0

    def to_json(self, canonical: bool = False) -> dict:
        d = {"config": self.config, "success_rate": self.success_rate,
             "aggregates": self.aggregates, "trials": self.trials}
        return strip_timings(d) if canonical else d


def strip_timings(obj):
    """Copy of a report without wall-clock fields (for determinism checks)."""
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj


def aggregate(trials: list) -> dict:
    out = {
        "trials": len(trials),
        "successes": sum(t["success"] for t in trials),
        "honest_ok": sum(t.get("honest_ok", False) for t in trials),
        "status": dict(sorted(Counter(t["status"] for t in trials).items())),
        "timings": {"mean_attack_seconds": sum(t["timings"]["attack"] for t in trials) / max(len(trials), 1)},
    }
    for key in ("candidates", "eliminant_degree", "max_cofactor_degree", "primes"):
        vals = [t[key] for t in trials if t.get(key) is not None]
        if vals:
            out[f"{key}_histogram"] = {str(k): v for k, v in sorted(Counter(vals).items())}
    if any("unique" in t for t in trials):
        out["unique"] = sum(t.get("unique", False) for t in trials)
    return out


def _run_one(args):
    cfg, i, s = args
    return run_trial(cfg, i, s)


def run_experiment(cfg: ExperimentConfig) -> TrialSummary:
    """Run all trials (optionally in a process pool) and write the report."""
    cfg.validate()
    seeds = trial_seeds(cfg.seed, cfg.trials)
    jobs = [(cfg, i, s) for i, s in enumerate(seeds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            trials = list(pool.map(_run_one, jobs))
    else:
        trials = [_run_one(j) for j in jobs]
    trials.sort(key=lambda t: t["index"])
    conf = {k: v for k, v in asdict(cfg).items() if k not in ("out", "workers")}
    summary = TrialSummary(conf, trials)
    summary.aggregates = aggregate(trials)
    summary.aggregates["success_rate"] = summary.success_rate
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(summary.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return summary


# --- validation of JSON artifacts -------------------------------------------

def _check_matrix(d, where: str, errs: list, modulus=None, n=None):
    if not isinstance(d, dict) or "rows" not in d or "ring" not in d:
        errs.append(f"{where}: missing field 'rows' or 'ring'")
        return
    rows = d["rows"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        errs.append(f"{where}: rows must be a non-empty list of lists")
        return
    if any(len(r) != len(rows) for r in rows):
        errs.append(f"{where}: matrix is not square")
    if n is not None and len(rows) != n:
        errs.append(f"{where}: expected dimension {n}, found {len(rows)}")
    ring = d["ring"]
    if modulus is not None and ring != str(modulus):
        errs.append(f"{where}: ring {ring} disagrees with modulus {modulus}")
    try:
        vals = [int(x) for r in rows for x in r]
    except (TypeError, ValueError):
        errs.append(f"{where}: entries must be decimal strings")
        return
    if ring != "ZZ":
        try:
            p = int(ring)
        except ValueError:
            errs.append(f"{where}: bad ring descriptor {ring!r}")
            return
        bad = [x for x in vals if not 0 <= x < p]
        if bad:
            errs.append(f"{where}: entry {bad[0]} outside [0, {p})")


def _check_vector(v, where, errs, modulus, n):
    if not isinstance(v, list):
        errs.append(f"{where}: missing or not a list")
        return
    if len(v) != n:
        errs.append(f"{where}: expected length {n}, found {len(v)}")
    try:
        bad = [x for x in map(int, v) if not 0 <= x < modulus]
    except (TypeError, ValueError):
        errs.append(f"{where}: entries must be decimal strings")
        return
    if bad:
        errs.append(f"{where}: entry {bad[0]} outside [0, {modulus})")


def _require(d: dict, keys, where: str, errs: list) -> bool:
    missing = [k for k in keys if k not in d]
    for k in missing:
        errs.append(f"{where}: missing field '{k}'")
    return not missing


def verify_document(d) -> list:
    """Schema and ring-consistency diagnostics for an instance or report."""
    errs: list = []
    if not isinstance(d, dict):
        return ["top level: expected a JSON object"]
    if "trials" in d or "config" in d:
        if _require(d, ("config", "trials", "success_rate"), "report", errs):
            for i, t in enumerate(d["trials"]):
                _require(t, ("index", "seed", "success", "status"), f"trials[{i}]", errs)
        return errs
    if not _require(d, ("protocol", "params", "public"), "instance", errs):
        return errs
    proto, params, pub = d["protocol"], d["params"], d["public"]
    if proto in ("bcfrx", "bcfrx_p"):
        p = None
        if proto == "bcfrx_p":
            if not _require(params, ("p",), "params", errs):
                return errs
            p = int(params["p"])
        if not _require(pub, ("transcripts",), "public", errs):
            return errs
        for i, t in enumerate(pub["transcripts"]):
            if _require(t, ("C", "D", "E"), f"public.transcripts[{i}]", errs):
                for name in "CDE":
                    _check_matrix(t[name], f"public.transcripts[{i}].{name}", errs,
                                  p if p is not None else "ZZ", 4)
    elif proto in ("hks", "ru"):
        mod_key, dim_key = ("p", "m") if proto == "hks" else ("q", "n")
        if not _require(params, (mod_key, dim_key), "params", errs):
            return errs
        p, n = int(params[mod_key]), int(params[dim_key])
        mats = ("Q",) if proto == "hks" else ("C", "D")
        vecs = ("b", "w_A", "w_B") if proto == "hks" else ("d", "w_A", "w_B")
        if not _require(pub, mats + vecs, "public", errs):
            return errs
        for name in mats:
            _check_matrix(pub[name], f"public.{name}", errs, p, n)
        for name in vecs:
            _check_vector(pub[name], f"public.{name}", errs, p, n)
    else:
        errs.append(f"instance: unknown protocol {proto!r}")
    return errs


def verify_transcript_file(path: str) -> list:
    """Diagnostics for a JSON artifact on disk; an empty list means valid."""
    try:
        with open(path) as fh:
            d = json.load(fh)
    except FileNotFoundError:
        return [f"{path}: no such file"]
    except json.JSONDecodeError as exc:
        return [f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})"]
    return verify_document(d)
