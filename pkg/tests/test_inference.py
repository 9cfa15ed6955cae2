import random

import pytest

from replsim.cache import CacheGeometry
from replsim.errors import InconsistentOracle, NotPermutation, ProbeUndistinguishing
from replsim.inference import (
    SimOracle,
    age_graph,
    curve_offset,
    detect_dueling,
    gen_random_sequence,
    identify_policy,
    infer_permutation_policy,
    pooled_offset,
)
from replsim.inference.dueling import FIXED_A, FIXED_B, FOLLOWER
from replsim.inference.identify import equivalence_classes, predict_hits
from replsim.policies import (
    LRU3PLRU4,
    Basic,
    PermutationSet,
    fifo_vectors,
    lru_vectors,
    make_set,
    parse_policy_name,
    zoo,
)
from replsim.seqlang import WBINVD, Access, AccessSeq


def oracle(policy, assoc, sets=1, seed=0):
    if isinstance(policy, str):
        policy = parse_policy_name(policy)
    return SimOracle(policy, CacheGeometry(sets, assoc), seed)


class TestRandomSequences:
    def test_shape(self):
        seq = gen_random_sequence(50, 0.5, random.Random(0))
        assert seq[0] == WBINVD
        assert len(seq) == 51
        assert all(isinstance(t, Access) and t.measured for t in seq[1:])

    def test_first_element_fresh_and_reuse_from_prior(self):
        rng = random.Random(3)
        for _ in range(50):
            seq = gen_random_sequence(30, 0.5, rng)
            seen = set()
            for i, tok in enumerate(seq[1:]):
                if tok.name not in seen:
                    assert tok.name == f"B{len(seen)}"
                seen.add(tok.name)

    def test_length_one(self):
        assert gen_random_sequence(1, 0.0, random.Random(0))[1:] == (Access("B0", True),)

    def test_p_fresh_one_is_distinct(self):
        seq = gen_random_sequence(40, 1.0, random.Random(0))
        names = [t.name for t in seq[1:]]
        assert len(set(names)) == 40

    @pytest.mark.parametrize("args", [(0, 0.5), (5, -0.1), (5, 1.5)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            gen_random_sequence(*args, random.Random(0))


class TestIdentify:
    def test_self_test(self):
        rep = identify_policy(oracle("QLRU_H00_M1_R2_U1", 4), [parse_policy_name("QLRU_H00_M1_R2_U1")], n_seq=50)
        assert rep.results[0].counterexamples == 0

    def test_r0_r1_u0_equivalent(self):
        rep = identify_policy(oracle("QLRU_H11_M1_R0_U0", 8), [parse_policy_name("QLRU_H11_M1_R1_U0")], n_seq=100)
        assert rep.results[0].counterexamples == 0

    def test_plru_distinguished(self):
        cands = [Basic.PLRU, Basic.LRU, Basic.FIFO, Basic.MRU, parse_policy_name("QLRU_H11_M1_R0_U0")]
        rep = identify_policy(oracle(Basic.PLRU, 8), cands, n_seq=250)
        by = rep.by_name()
        assert by["PLRU"].counterexamples == 0
        assert all(by[n].counterexamples >= 2 for n in ("LRU", "FIFO", "MRU", "QLRU_H11_M1_R0_U0"))
        assert by["LRU"].first is not None
        assert rep.survivors == [Basic.PLRU]

    @pytest.mark.parametrize("name", ["PLRU", "MRU", "MRU*", "QLRU_H00_M1_R2_U1", "QLRU_H00_M1_R0_U1",
                                      "QLRU_H11_M1_R1_U2", "QLRU_H11_M1_R0_U0"])
    def test_hardware_policies_against_zoo(self, name):
        truth = parse_policy_name(name)
        z = zoo(8)
        rep = identify_policy(oracle(truth, 8), z, n_seq=250)
        survivors = rep.survivors
        assert truth in survivors
        assert len(equivalence_classes(survivors, 8, n_seq=500)) == 1
        assert all(r.counterexamples >= 2 for r in rep.results if r.policy not in survivors)

    def test_zero_sequences_everything_survives(self):
        rep = identify_policy(oracle(Basic.LRU, 4), [Basic.LRU, Basic.FIFO], n_seq=0)
        assert len(rep.survivors) == 2

    def test_probabilistic_candidate_tolerance(self):
        policy = parse_policy_name("QLRU_H11_MR16-1_R1_U2")
        rep = identify_policy(oracle(policy, 12), [policy, parse_policy_name("QLRU_H11_M1_R1_U2")],
                              n_seq=40, trials_per_seq=64, tolerance=4.0)
        by = rep.by_name()
        assert by["QLRU_H11_MR16-1_R1_U2"].counterexamples <= 2
        assert by["QLRU_H11_M1_R1_U2"].counterexamples > 10

    def test_undefined_candidate_gets_counterexample(self):
        seq = (WBINVD, Access("A", True), Access("B", True))
        assert predict_hits(parse_policy_name("QLRU_H00_M1_R0_U1"), 1, seq) is None

    def test_report_serializations(self):
        rep = identify_policy(oracle(Basic.LRU, 4), [Basic.LRU, Basic.FIFO], n_seq=30)
        d = rep.to_dict()
        assert d["survivors"] == ["LRU"]
        assert {c["policy"] for c in d["candidates"]} == {"LRU", "FIFO"}
        assert "survivors: LRU" in rep.to_text()

    def test_empty_candidates(self):
        with pytest.raises(ValueError):
            identify_policy(oracle(Basic.LRU, 4), [])

    def test_equivalence_classes_merge_r0_r1_u0(self):
        a, b = parse_policy_name("QLRU_H11_M1_R0_U0"), parse_policy_name("QLRU_H11_M1_R1_U0")
        classes = equivalence_classes([a, b, Basic.LRU], 8)
        assert sorted(len(c) for c in classes) == [1, 2]


def _equivalent(spec_a, spec_b, assoc, traces=300, length=60, seed=0):
    rng = random.Random(seed)
    for _ in range(traces):
        a, b = make_set(spec_a, assoc), make_set(spec_b, assoc)
        for _ in range(length):
            t = rng.randrange(assoc + 4)
            if a.access(t, rng) != b.access(t, rng):
                return False
    return True


class TestPermutationInference:
    def test_lru_encoding(self):
        assert infer_permutation_policy(oracle(Basic.LRU, 4)) == lru_vectors(4)

    def test_lru3plru4_recovers_known_vectors(self):
        spec = infer_permutation_policy(oracle(Basic.LRU3PLRU4, 12))
        assert spec.hits == LRU3PLRU4.hits
        assert spec.miss == (11, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10)

    @pytest.mark.parametrize("policy,assoc", [(Basic.FIFO, 4), (Basic.PLRU, 8), (Basic.PLRU, 4)])
    def test_round_trip(self, policy, assoc):
        spec = infer_permutation_policy(oracle(policy, assoc))
        assert _equivalent(spec, policy, assoc)

    def test_fifo_vectors(self):
        assert infer_permutation_policy(oracle(Basic.FIFO, 4)).hits == fifo_vectors(4).hits

    def test_probabilistic_is_inconsistent(self):
        with pytest.raises(InconsistentOracle):
            infer_permutation_policy(oracle("QLRU_H11_MR16-1_R1_U2", 12))

    @pytest.mark.parametrize("name", ["MRU", "NRU", "QLRU_H00_M1_R0_U1"])
    def test_not_permutation(self, name):
        with pytest.raises(NotPermutation):
            infer_permutation_policy(oracle(name, 4))

    def test_other_set_index(self):
        assert infer_permutation_policy(oracle(Basic.LRU, 4, sets=4), set_index=3) == lru_vectors(4)


class TestAgeGraph:
    def test_lru_step_functions(self):
        g = age_graph(oracle(Basic.LRU, 4), "<wbinvd> A B C D", 6, 1)
        assert g.curve("D") == [1, 1, 1, 1, 0, 0, 0]
        assert g.curve("A") == [1, 0, 0, 0, 0, 0, 0]

    def test_slow_path_matches_fast_path(self):
        o = oracle(Basic.PLRU, 4)
        fast = age_graph(o, "<wbinvd> A B C D B", 6, 2)
        slow = age_graph(o, "<wbinvd> A B C D B", 6, 2, use_fast_path=False)
        assert fast.hits == slow.hits

    def test_deterministic_cells_are_zero_or_one(self):
        g = age_graph(oracle("QLRU_H00_M1_R2_U1", 4), "<wbinvd> A B C A D E", 10, 7)
        assert all(r in (0.0, 1.0) for b in g.blocks for r in g.curve(b))

    def test_nmax_zero_and_csv(self):
        g = age_graph(oracle(Basic.LRU, 4), "<wbinvd> A B", 0, 3)
        assert g.to_csv() == "n,A,B\n0,1.0000,1.0000\n"

    def test_fresh_names_avoid_sequence_names(self):
        g = age_graph(oracle(Basic.LRU, 2), "<wbinvd> N0 N1", 2, 1)
        assert g.curve("N1") == [1, 1, 0]

    def test_random_policy_probabilistic_cells(self):
        seq = "<wbinvd> " + " ".join(f"B{i}" for i in range(12)) + " B4"
        g = age_graph(oracle("QLRU_H11_MR16-1_R1_U2", 12, seed=5), seq, 40, 1024)
        assert abs(g.rate("B0", 1) - 1 / 16) < 0.03
        assert g.rate("B4", 0) == 1.0

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            age_graph(oracle(Basic.LRU, 4), "A", -1, 1)
        with pytest.raises(ValueError):
            age_graph(oracle(Basic.LRU, 4), "A", 3, 0)

    def test_offsets(self):
        step = [1.0] * 5 + [0.0] * 15
        shifted = [1.0] * 9 + [0.0] * 11
        assert curve_offset(step, shifted) == 4
        g = age_graph(oracle(Basic.LRU, 8), "<wbinvd> " + " ".join(f"B{i}" for i in range(8)), 16, 1)
        assert pooled_offset(g, [("B0", "B1"), ("B1", "B2"), ("B5", "B6")]) == 1


class TestDueling:
    def _scan(self, text, sets, assoc=8, seed=0):
        spec = parse_policy_name(text)
        o = SimOracle(spec, CacheGeometry(sets, assoc), seed)
        return spec, detect_dueling(o, spec.policy_a, spec.policy_b, seed=seed)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_arbitrary_leader_lists(self, seed):
        rng = random.Random(seed)
        picks = rng.sample(range(64), 8)
        a, b = sorted(picks[:4]), sorted(picks[4:])
        text = (f"DUEL(QLRU_H11_M1_R1_U2@{','.join(map(str, a))};"
                f"QLRU_H11_MR16-1_R1_U2@{','.join(map(str, b))};PSEL6)")
        spec, res = self._scan(text, 64, seed=seed)
        assert res.sets_with(FIXED_A) == a
        assert res.sets_with(FIXED_B) == b
        assert len(res.sets_with(FOLLOWER)) == 56

    def test_single_sided_reports_no_b_sets(self):
        spec, res = self._scan("DUEL(QLRU_H11_M1_R0_U0@3,17;QLRU_H11_MR16-1_R0_U0@;PSEL6)", 32)
        assert res.sets_with(FIXED_A) == [3, 17]
        assert res.sets_with(FIXED_B) == []
        assert len(res.sets_with(FOLLOWER)) == 30

    def test_leaders_in_every_batch(self):
        # no batch is free of leaders, so only the individual pass can classify
        spec, res = self._scan("DUEL(QLRU_H11_M1_R0_U0@8,11,15,19,29;QLRU_H11_MR16-1_R0_U0@;PSEL6)", 32, 16)
        assert res.sets_with(FIXED_A) == [8, 11, 15, 19, 29]
        assert len(res.sets_with(FOLLOWER)) == 27

    def test_non_adaptive_cache_all_fixed(self):
        a = parse_policy_name("QLRU_H11_M1_R1_U2")
        b = parse_policy_name("QLRU_H11_MR16-1_R1_U2")
        o = SimOracle(a, CacheGeometry(16, 8), 0)
        res = detect_dueling(o, a, b)
        assert res.sets_with(FIXED_A) == list(range(16))

    def test_identical_policies_undistinguishable(self):
        a = parse_policy_name("QLRU_H11_M1_R0_U0")
        o = SimOracle(a, CacheGeometry(4, 8), 0)
        with pytest.raises(ProbeUndistinguishing):
            detect_dueling(o, a, parse_policy_name("QLRU_H11_M1_R1_U0"))

    def test_csv(self):
        _, res = self._scan("DUEL(QLRU_H11_M1_R1_U2@1;QLRU_H11_MR16-1_R1_U2@2;PSEL4)", 4)
        lines = res.to_csv().splitlines()
        assert lines[0] == "set,classification,hits_when_a_favored,hits_when_b_favored"
        assert [l.split(",")[1] for l in lines[1:]] == [FOLLOWER, FIXED_A, FIXED_B, FOLLOWER]
