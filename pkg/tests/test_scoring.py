import io
import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from cohortminer.groupdef import GroupDefinition, build_definition
from cohortminer.scoring import (
    PatientScore,
    classify,
    dump_scores,
    score_patient,
    score_population,
)

from conftest import make_log, proj, TABLE1_CSV


def mk_def(pattern, dbcs=()):
    return GroupDefinition(
        frozenset(pattern), frozenset(dbcs), Fraction(4, 5), Fraction(4, 5)
    )


class TestScorePatient:
    def test_missing_one_activity(self):
        d = mk_def({"a", "b", "c"})
        s = score_patient(proj("p1", {"a", "c", "x"}), d)
        assert s.activity_score == 1

    def test_empty_dbc_set(self):
        d = mk_def({"a"})
        assert score_patient(proj("p1", {"z"}, {"q"}), d).dbc_score == 0

    def test_perfect_member(self):
        d = mk_def({"a", "b"}, {"d"})
        s = score_patient(proj("p1", {"a", "b", "x"}, {"d", "e"}), d)
        assert (s.activity_score, s.dbc_score) == (0, 0)

    def test_dbc_score_uses_plain_presence(self):
        # code present but never co-occurring with the pattern still counts
        d = mk_def({"a"}, {"d"})
        p = proj("p1", {"a", "z"}, {"d"}, {("z", "d")})
        assert score_patient(p, d).dbc_score == 0


class TestClassify:
    SCORES = [
        PatientScore("p1", 0, 1),
        PatientScore("p2", 1, 0),
        PatientScore("p3", 2, 2),
    ]

    def test_vacuous_cutoffs_take_everyone(self):
        assert classify(self.SCORES, 2, 2) == ["p1", "p2", "p3"]

    def test_strict_cut(self):
        assert classify(self.SCORES, 0, 0) == []

    def test_hand_evaluated_conjunction(self):
        assert classify(self.SCORES, 1, 1) == ["p1", "p2"]

    def test_idempotent_and_order_independent(self):
        shuffled = [self.SCORES[2], self.SCORES[0], self.SCORES[1]]
        assert classify(shuffled, 1, 1) == classify(self.SCORES, 1, 1)

    def test_monotone_in_cutoffs(self):
        rng = random.Random(17)
        scores = [PatientScore(f"p{i}", rng.randint(0, 3), rng.randint(0, 3)) for i in range(50)]
        for _ in range(20):
            af, ad = rng.randint(0, 3), rng.randint(0, 3)
            g1 = set(classify(scores, af, ad))
            g2 = set(classify(scores, af + 1, ad + 1))
            assert g1 <= g2


class TestScorePopulation:
    def test_table1_hand_trace(self):
        log = make_log(TABLE1_CSV)
        d = mk_def({"Action1"}, {"DBC1"})
        scores = score_population(log, d)
        assert [(s.patient_id, s.activity_score, s.dbc_score) for s in scores] == [
            ("Patient1", 0, 0),
            ("Patient2", 1, 1),
            ("Patient3", 0, 0),
        ]

    def test_one_score_per_patient(self):
        log = make_log(TABLE1_CSV)
        assert len(score_population(log, mk_def({"Action1"}))) == len(log)

    def test_invariant_under_event_duplication(self):
        base = (
            "patient_id,activity,dbc,timestamp\n"
            "p1,a,d,2017-01-01T00:00:00\n"
        )
        dup = base + "p1,a,d,2017-01-01T00:00:00\n"
        d = mk_def({"a", "b"}, {"d"})
        assert score_population(make_log(base), d) == score_population(make_log(dup), d)

    def test_sample_scores_zero_at_phi_one(self):
        sample = [proj("p1", {"a", "b", "x"}), proj("p2", {"a", "b", "y"})]
        d = build_definition(sample, 1.0, 1.0)
        for p in sample:
            assert score_patient(p, d).activity_score == 0


def test_dump_scores_format():
    buf = io.StringIO()
    dump_scores([PatientScore("p1", 0, 1), PatientScore("p2", 2, 0)], 1, 1, buf)
    assert buf.getvalue() == (
        "patient_id,activity_score,dbc_score,member\n"
        "p1,0,1,1\n"
        "p2,2,0,0\n"
    )


@settings(max_examples=50, deadline=None)
@given(
    st.sets(st.sampled_from("abcdef"), min_size=1, max_size=6),
    st.sets(st.sampled_from("abcdefgh"), max_size=8),
    st.sets(st.sampled_from("pqrs"), max_size=4),
    st.sets(st.sampled_from("pqrstu"), max_size=6),
)
def test_score_bounds(pattern, acts, dbcs, patient_dbcs):
    d = mk_def(pattern, dbcs)
    s = score_patient(proj("p1", acts, patient_dbcs), d)
    assert 0 <= s.activity_score <= len(d.pattern)
    assert 0 <= s.dbc_score <= len(d.dbcs)
