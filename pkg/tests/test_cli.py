import csv
import io
import json
import os

import pytest

from replsim.cli import EXIT_INCONCLUSIVE, EXIT_INCONSISTENT, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSeq:
    def test_lru_hit(self, capsys):
        code, out, _ = run(capsys, "seq", "--policy", "LRU", "--assoc", "4", "<wbinvd> A B C D A?")
        assert (code, out) == (EXIT_OK, "hits: 1, misses: 0\n")

    def test_empty_sequence(self, capsys):
        code, out, _ = run(capsys, "seq", "--policy", "LRU", "--assoc", "4", "")
        assert (code, out) == (EXIT_OK, "hits: 0, misses: 0\n")

    def test_invalid_combination(self, capsys):
        code, out, err = run(capsys, "seq", "--policy", "QLRU_H00_M1_R0_U2", "--assoc", "4", "A?")
        assert code == EXIT_USAGE
        assert out == ""
        assert "R0" in err

    def test_bad_sequence(self, capsys):
        code, _, err = run(capsys, "seq", "--policy", "LRU", "A?? B")
        assert code == EXIT_USAGE and err

    def test_per_set_lines(self, capsys):
        code, out, _ = run(capsys, "seq", "--policy", "LRU", "--assoc", "2", "--sets", "0-1",
                           "--loop", "3", "<wbinvd> A B A? B?")
        assert code == EXIT_OK
        assert out.splitlines() == ["set 0: hits: 6, misses: 0", "set 1: hits: 6, misses: 0", "hits: 12, misses: 0"]

    def test_init_runs_once(self, capsys):
        code, out, _ = run(capsys, "seq", "--policy", "LRU", "--assoc", "2", "--init", "<wbinvd> A", "--loop", "2", "A? B")
        assert out == "hits: 2, misses: 0\n"

    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["seq", "--bogus", "A"])
        assert exc.value.code == EXIT_USAGE


class TestIdentify:
    def test_plru_survives_alone(self, capsys):
        code, out, _ = run(capsys, "identify", "--oracle-policy", "PLRU", "--assoc", "8", "--candidates", "all")
        assert code == EXIT_OK
        assert "equivalence classes among survivors: 1" in out

    def test_oracle_only_candidate(self, capsys, tmp_path):
        path = tmp_path / "cands.txt"
        path.write_text("# one candidate\nQLRU_H11_M1_R0_U0\n")
        code, _, _ = run(capsys, "identify", "--oracle-policy", "QLRU_H11_M1_R0_U0", "--assoc", "8",
                         "--candidates", str(path), "--nseq", "20")
        assert code == EXIT_OK

    def test_no_sequences_inconclusive(self, capsys):
        code, _, _ = run(capsys, "identify", "--oracle-policy", "LRU", "--assoc", "4", "--nseq", "0")
        assert code == EXIT_INCONCLUSIVE

    def test_json_report(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        run(capsys, "identify", "--oracle-policy", "FIFO", "--assoc", "4", "--nseq", "30", "--json", str(path))
        assert isinstance(json.loads(path.read_text()), dict)

    def test_missing_candidates_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "identify", "--oracle-policy", "LRU", "--candidates", str(tmp_path / "none"))
        assert code == EXIT_IO


class TestAgeGraph:
    def test_lru_step_columns(self, capsys):
        code, out, _ = run(capsys, "age-graph", "--policy", "LRU", "--assoc", "4",
                           "--seq", "<wbinvd> A B C D", "--nmax", "5", "--trials", "1")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["n", "A", "B", "C", "D"]
        col_a = [float(r[1]) for r in rows[1:]]
        assert col_a == [1, 0, 0, 0, 0, 0]

    def test_nmax_zero_single_row(self, capsys):
        _, out, _ = run(capsys, "age-graph", "--policy", "LRU", "--assoc", "4",
                        "--seq", "<wbinvd> A B", "--nmax", "0", "--trials", "1")
        rows = out.splitlines()
        assert len(rows) == 2 and rows[1].startswith("0,")

    def test_writes_csv_file(self, capsys, tmp_path):
        path = tmp_path / "g.csv"
        code, out, _ = run(capsys, "age-graph", "--policy", "FIFO", "--assoc", "2",
                           "--seq", "<wbinvd> A B", "--nmax", "3", "--trials", "1", "--out", str(path))
        assert code == EXIT_OK and out == ""
        assert path.read_text().startswith("n,A,B\n")

    def test_write_failure_leaves_nothing(self, capsys, tmp_path):
        target = tmp_path / "missing-dir" / "g.csv"
        code, _, err = run(capsys, "age-graph", "--policy", "LRU", "--assoc", "2",
                           "--seq", "<wbinvd> A", "--nmax", "1", "--out", str(target))
        assert code == EXIT_IO and "cannot write" in err
        assert not target.exists()

    def test_error_does_not_touch_output(self, capsys, tmp_path):
        target = tmp_path / "g.csv"
        target.write_text("previous\n")
        code, _, _ = run(capsys, "age-graph", "--policy", "NOPE", "--seq", "A", "--out", str(target))
        assert code == EXIT_USAGE
        assert target.read_text() == "previous\n"


class TestInferPerm:
    def test_icelake_l1_vectors(self, capsys):
        code, out, _ = run(capsys, "infer-perm", "--preset", "icelake.l1")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "Pi_0 = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11)"
        assert lines[11] == "Pi_11 = (11, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10)"
        assert lines[-1].startswith("policy: PERM(")

    def test_random_policy_inconsistent(self, capsys):
        code, _, _ = run(capsys, "infer-perm", "--policy", "QLRU_H11_MR16-1_R1_U2", "--assoc", "12")
        assert code == EXIT_INCONSISTENT

    def test_non_permutation_inconclusive(self, capsys):
        code, _, _ = run(capsys, "infer-perm", "--policy", "NRU", "--assoc", "4")
        assert code == EXIT_INCONCLUSIVE


class TestDuelScan:
    def test_small_adaptive_cache(self, capsys, tmp_path):
        path = tmp_path / "d.csv"
        code, out, _ = run(capsys, "duel-scan", "--policy", "DUEL(QLRU_H11_M1_R1_U2@1;QLRU_H11_MR16-1_R1_U2@2;PSEL4)",
                           "--assoc", "8", "--num-sets", "4", "--out", str(path))
        assert code == EXIT_OK
        assert "FixedPolicyA: 1 sets [1]" in out and "FixedPolicyB: 1 sets [2]" in out
        assert path.read_text().splitlines()[0] == "set,classification,hits_when_a_favored,hits_when_b_favored"

    def test_same_policies_rejected(self, capsys):
        code, _, _ = run(capsys, "duel-scan", "--policy", "LRU", "--num-sets", "2")
        assert code == EXIT_USAGE

    @pytest.mark.slow
    def test_ivybridge_preset(self, capsys):
        code, out, _ = run(capsys, "duel-scan", "--preset", "ivybridge-sim")
        assert code == EXIT_OK
        assert "FixedPolicyA: 64 sets [512-575]" in out
        assert "FixedPolicyB: 64 sets [768-831]" in out


class TestBench:
    def test_linear_cost(self, capsys):
        code, out, _ = run(capsys, "bench", "--base", "100", "--per-unit", "4", "--unroll-count", "100")
        assert (code, out) == (EXIT_OK, "cost: 4.00\n")

    def test_event_file(self, capsys, tmp_path):
        path = tmp_path / "ev.txt"
        path.write_text("# counters\nCYCLES 0x3C\nUOPS\n")
        code, out, _ = run(capsys, "bench", "--per-unit", "2", "--events", str(path), "--capacity", "1")
        assert out == "CYCLES: 2.00\nUOPS: 2.00\n"

    def test_bad_event_file(self, capsys, tmp_path):
        path = tmp_path / "ev.txt"
        path.write_text("A\nA\n")
        code, _, err = run(capsys, "bench", "--events", str(path))
        assert code == EXIT_USAGE and "line 2" in err

    def test_invalid_config(self, capsys):
        code, _, _ = run(capsys, "bench", "--n-measurements", "0")
        assert code == EXIT_USAGE

    def test_noise_deterministic_under_seed(self, capsys):
        argv = ["bench", "--base", "10", "--noise-scale", "3", "--agg", "Min", "--seed", "5"]
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first


class TestManifest:
    def test_replay_identical_bytes(self, capsys, tmp_path):
        manifest, csv1, csv2 = tmp_path / "m.json", tmp_path / "a.csv", tmp_path / "b.csv"
        code, _, _ = run(capsys, "age-graph", "--policy", "QLRU_H11_MR16-1_R1_U2", "--assoc", "12",
                         "--seq", "<wbinvd> B0 B1 B2 B3", "--nmax", "20", "--trials", "16", "--seed", "9",
                         "--out", str(csv1), "--manifest-out", str(manifest))
        assert code == EXIT_OK
        data = json.loads(manifest.read_text())
        data["options"]["out"] = str(csv2)
        manifest.write_text(json.dumps(data))
        assert run(capsys, "replay", str(manifest))[0] == EXIT_OK
        assert csv1.read_bytes() == csv2.read_bytes()

    def test_replay_stdout(self, capsys, tmp_path):
        manifest = tmp_path / "m.json"
        _, first, _ = run(capsys, "seq", "--policy", "PLRU", "--assoc", "4", "--manifest-out", str(manifest),
                          "<wbinvd> A B C D E A?")
        _, again, _ = run(capsys, "replay", str(manifest))
        assert again == first

    def test_failed_run_writes_no_manifest(self, capsys, tmp_path):
        manifest = tmp_path / "m.json"
        run(capsys, "seq", "--policy", "NOPE", "--manifest-out", str(manifest), "A")
        assert not manifest.exists()

    def test_bad_manifest(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[]")
        assert run(capsys, "replay", str(path))[0] == EXIT_USAGE


class TestSeedAndListing:
    def test_seed_from_environment(self, capsys, tmp_path, monkeypatch):
        argv = ["age-graph", "--policy", "QLRU_H11_MR16-1_R1_U2", "--assoc", "12", "--seq", "<wbinvd> B0 B1",
                "--nmax", "16", "--trials", "8"]
        monkeypatch.setenv("REPLSIM_SEED", "3")
        from_env = run(capsys, *argv)[1]
        monkeypatch.delenv("REPLSIM_SEED")
        assert run(capsys, *argv, "--seed", "3")[1] == from_env

    def test_bad_seed_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("REPLSIM_SEED", "x")
        assert run(capsys, "seq", "--policy", "LRU", "A")[0] == EXIT_USAGE

    def test_list_policies(self, capsys):
        code, out, _ = run(capsys, "list-policies")
        assert code == EXIT_OK
        assert "skylake.l2" in out and "QLRU_H00_M1_R2_U1" in out


def test_console_script_entry_point():
    from importlib.metadata import entry_points

    scripts = {ep.name: ep.value for ep in entry_points(group="console_scripts")}
    assert scripts.get("replsim") == "replsim.cli:main"
    assert os.path.basename(__file__)
