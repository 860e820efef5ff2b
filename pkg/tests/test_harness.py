import json
import subprocess
import sys

import pytest

from matkex.cli import main
from matkex.harness import (
    ExperimentConfig,
    UsageError,
    instance_from_json,
    instance_to_json,
    make_instance,
    run_experiment,
    strip_timings,
    trial_seeds,
    verify_document,
    verify_transcript_file,
)


def test_ru_experiment_all_succeed(tmp_path):
    out = tmp_path / "ru.json"
    s = run_experiment(ExperimentConfig("ru", trials=10, seed=1, dim=4, out=str(out)))
    assert s.success_rate == 1.0 and len(s.trials) == 10
    assert verify_transcript_file(str(out)) == []


def test_zero_trials_is_usage_error():
    with pytest.raises(UsageError):
        run_experiment(ExperimentConfig("ru", trials=0, seed=1))


@pytest.mark.parametrize("bad", [dict(protocol="xyz"), dict(prime_bits=2), dict(sampler="other"),
                                 dict(protocol="bcfrx", sampler="uniform"), dict(exp_n=1),
                                 dict(budget_pairs=0), dict(word_len=-1)])
def test_config_validation(bad):
    kw = dict(protocol="ru", trials=1, seed=0)
    kw.update(bad)
    with pytest.raises(UsageError):
        ExperimentConfig(**kw).validate()


def test_bcfrx_p_experiment_unique_candidates():
    s = run_experiment(ExperimentConfig("bcfrx_p", trials=5, seed=2, prime_bits=32, transcripts=2))
    assert s.success_rate == 1.0
    assert all(t["candidates"] == 1 and t["unique"] for t in s.trials)


def test_integer_and_hks_experiments():
    s = run_experiment(ExperimentConfig("bcfrx", trials=2, seed=3))
    assert s.success_rate == 1.0 and all(t["det_one"] for t in s.trials)
    s = run_experiment(ExperimentConfig("hks", trials=5, seed=3, prime_bits=31))
    assert s.success_rate == 1.0


def test_determinism_modulo_timings():
    cfg = ExperimentConfig("bcfrx_p", trials=3, seed=9, transcripts=1, sampler="uniform")
    a = run_experiment(cfg).to_json(canonical=True)
    b = run_experiment(cfg).to_json(canonical=True)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert "timings" not in json.dumps(a)


def test_worker_pool_matches_sequential():
    cfg = ExperimentConfig("ru", trials=6, seed=4, dim=3)
    seq = run_experiment(cfg).to_json(canonical=True)
    cfg.workers = 2
    par = run_experiment(cfg).to_json(canonical=True)
    assert seq == par


def test_aggregate_consistency():
    s = run_experiment(ExperimentConfig("ru", trials=4, seed=5, dim=3))
    assert s.aggregates["successes"] == sum(t["success"] for t in s.trials)
    assert s.aggregates["success_rate"] == pytest.approx(s.aggregates["successes"] / 4)


def test_trial_seeds_independent_and_stable():
    a = trial_seeds(7, 5)
    assert a == trial_seeds(7, 5) and len(set(a)) == 5
    assert trial_seeds(7, 6)[:5] == a


def test_strip_timings_nested():
    d = {"a": 1, "timings": {"x": 1}, "trials": [{"seconds": 2, "b": 3}]}
    assert strip_timings(d) == {"a": 1, "trials": [{"b": 3}]}


@pytest.mark.parametrize("proto", ["bcfrx", "bcfrx_p", "hks", "ru"])
def test_instance_round_trip(proto):
    cfg = ExperimentConfig(proto, trials=1, seed=1, dim=3)
    doc = instance_to_json(cfg, make_instance(cfg, 11))
    assert verify_document(doc) == []
    name, pub, truth = instance_from_json(json.loads(json.dumps(doc)))
    assert name == proto and truth is not None


def test_verify_diagnostics(tmp_path):
    cfg = ExperimentConfig("bcfrx_p", trials=1, seed=1)
    doc = instance_to_json(cfg, make_instance(cfg, 1))
    path = tmp_path / "i.json"
    path.write_text(json.dumps(doc))
    assert verify_transcript_file(str(path)) == []
    # truncated file
    path.write_text(json.dumps(doc)[:200])
    assert "malformed JSON" in verify_transcript_file(str(path))[0]
    # missing field
    broken = json.loads(json.dumps(doc))
    del broken["public"]["transcripts"][0]["D"]
    assert any("'D'" in e for e in verify_document(broken))
    del broken["params"]
    assert any("'params'" in e for e in verify_document(broken))
    # entry outside [0, p)
    bad = json.loads(json.dumps(doc))
    p = int(bad["params"]["p"])
    bad["public"]["transcripts"][0]["C"]["rows"][0][0] = str(p)
    assert any("outside" in e for e in verify_document(bad))
    assert verify_transcript_file(str(tmp_path / "none.json"))[0].endswith("no such file")


def test_verify_vectors():
    cfg = ExperimentConfig("hks", trials=1, seed=1, dim=3)
    doc = instance_to_json(cfg, make_instance(cfg, 1))
    doc["public"]["w_A"] = doc["public"]["w_A"][:-1]
    assert any("length" in e for e in verify_document(doc))


# --- CLI --------------------------------------------------------------------

def test_cli_run_gen_attack_verify(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["gen", "--protocol", "bcfrx_p", "--seed", "3", "--out", str(inst)]) == 0
    assert main(["verify", str(inst)]) == 0
    out = tmp_path / "att.json"
    assert main(["attack", str(inst), "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["success"] and res["matches_truth"]
    assert main(["run", "--protocol", "ru", "--trials", "3", "--dim", "3", "--seed", "1"]) == 0


@pytest.mark.parametrize("proto", ["bcfrx", "hks", "ru"])
def test_cli_attack_other_protocols(tmp_path, proto):
    inst = tmp_path / "inst.json"
    assert main(["gen", "--protocol", proto, "--seed", "4", "--dim", "4", "--out", str(inst)]) == 0
    out = tmp_path / "att.json"
    assert main(["attack", str(inst), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["matches_truth"]


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--protocol", "ru", "--trials", "0", "--seed", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--protocol", "ru"])  # seed is mandatory
    assert exc.value.code == 2
    assert main(["attack", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"protocol": "ru"}')
    assert main(["attack", str(bad)]) == 2
    assert main(["verify", str(bad)]) == 1


def test_cli_budget_exit_code():
    code = main(["run", "--protocol", "bcfrx_p", "--trials", "1", "--seed", "1", "--budget-pairs", "1",
                 "--transcripts", "1", "--sampler", "uniform"])
    assert code == 3


def test_cli_bench(capsys):
    assert main(["bench", "--sizes", "8,16", "--repeats", "1"]) == 0
    assert "rref numpy" in capsys.readouterr().out


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "matkex.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "gen" in out.stdout
