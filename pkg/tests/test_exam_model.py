"""Exam model: ids, grading, compliance, novelty, interchange format."""

import json
from collections import Counter

import numpy as np
import pytest

from examforge.errors import FormatError, SchemaError
from examforge.exam_model import (
    CognitiveLevel,
    Exam,
    ExamItem,
    McqResponse,
    MultipleChoice,
    Provenance,
    QuestionId,
    ScoringScheme,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    SpecificationMatrix,
    TrueFalseGroup,
    TrueFalseResponse,
    default_matrix,
    grade_item,
    make_question_id,
    ngram_jaccard,
    novelty_overlap,
    parse_exam,
    score_exam,
    serialize_exam,
    validate_exam,
)
from examforge.harness import (
    correct_responses,
    fixture_corpus,
    fixture_exam,
    perturb_remove_item,
    perturb_unknown_topic,
    wrong_responses,
)


class TestQuestionId:
    def test_published_id_renderings(self):
        assert make_question_id(8, Section.III, CognitiveLevel.APPLICATION).render() == "8_III_3"
        assert make_question_id(11, Section.III, CognitiveLevel.APPLICATION).render() == "11_III_3"

    def test_seq_suffix_only_when_needed(self):
        base = make_question_id(8, Section.III, CognitiveLevel.APPLICATION, 0)
        assert base.render() == "8_III_3"
        assert make_question_id(8, Section.III, CognitiveLevel.APPLICATION, 1).render() == "8_III_3_1"

    def test_parse_render_roundtrip_random(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            qid = QuestionId(
                topic_code=int(rng.integers(1, 40)),
                section=list(Section)[int(rng.integers(3))],
                level=CognitiveLevel(int(rng.integers(1, 4))),
                seq=int(rng.integers(0, 5)),
            )
            assert QuestionId.parse(qid.render()) == qid

    def test_topic_code_must_be_positive(self):
        with pytest.raises(ValueError):
            make_question_id(0, Section.I, CognitiveLevel.RECOGNITION)

    def test_parse_rejects_garbage(self):
        for text in ("", "8", "8_IV_3", "8_III_9", "x_III_3"):
            with pytest.raises(FormatError):
                QuestionId.parse(text)


class TestItemInvariants:
    def test_body_variant_must_match_section(self):
        with pytest.raises(ValueError):
            ExamItem(
                id=QuestionId(1, Section.II, CognitiveLevel.RECOGNITION),
                topic="t",
                level=CognitiveLevel.RECOGNITION,
                stem="stem",
                body=MultipleChoice(("a", "b", "c", "d"), 0),
            )

    def test_choice_count_enforced(self):
        with pytest.raises(ValueError):
            MultipleChoice(("a", "b", "c"), 0)  # type: ignore[arg-type]

    def test_exam_rejects_duplicate_ids(self, exam):
        with pytest.raises(ValueError, match="duplicate"):
            Exam("dup", (exam.items[0], exam.items[0]), Provenance.FIXTURE)

    def test_exam_requires_section_grouping(self, exam):
        shuffled = (exam.items[-1],) + exam.items[:-1]
        with pytest.raises(ValueError, match="grouped"):
            Exam("bad-order", shuffled, Provenance.FIXTURE)


class TestGrading:
    def test_published_mcq_key_a(self, grading_items, scheme):
        stddev = grading_items[0]
        score = grade_item(stddev, McqResponse(0), scheme)
        assert score.points == scheme.mcq_points
        assert score.full_credit
        assert grade_item(stddev, McqResponse(1), scheme).points == 0.0

    def test_published_mcq_key_b(self, grading_items, scheme):
        asymptote = grading_items[1]
        assert grade_item(asymptote, McqResponse(1), scheme).full_credit
        assert not grade_item(asymptote, McqResponse(0), scheme).full_credit

    def test_published_truefalse_pattern(self, grading_items, scheme):
        tracking = grading_items[2]
        score = grade_item(tracking, TrueFalseResponse((True, False, True, True)), scheme)
        assert score.correct_parts == 4
        assert score.points == scheme.tf_staircase[-1]

    def test_published_short_answer_3200(self, grading_items, scheme):
        playground = grading_items[3]
        score = grade_item(playground, ShortAnswerResponse(3200), scheme)
        assert score.full_credit
        # Rounding to hundredths tolerates sub-cent noise only.
        assert grade_item(playground, ShortAnswerResponse(3200.004), scheme).full_credit
        assert not grade_item(playground, ShortAnswerResponse(3200.01), scheme).full_credit

    def test_tf_staircase_values(self, grading_items, scheme):
        tracking = grading_items[2]
        by_parts = {}
        key = tracking.body.key
        for flips in range(5):
            response = tuple(
                bit if i >= flips else not bit for i, bit in enumerate(key)
            )
            score = grade_item(tracking, TrueFalseResponse(response), scheme)
            by_parts[score.correct_parts] = score.points
        assert by_parts == {4: 1.0, 3: 0.5, 2: 0.25, 1: 0.1, 0: 0.0}

    def test_variant_mismatch_is_format_error(self, grading_items, scheme):
        with pytest.raises(FormatError):
            grade_item(grading_items[0], ShortAnswerResponse(1.0), scheme)

    def test_non_finite_short_answer_rejected(self, grading_items, scheme):
        with pytest.raises(FormatError):
            grade_item(grading_items[3], ShortAnswerResponse(float("nan")), scheme)

    def test_staircase_monotone_property(self, scheme):
        points = [scheme.tf_points(k) for k in range(5)]
        assert points == sorted(points)


class TestScoreExam:
    def test_all_correct_hits_maximum(self, exam, scheme):
        score = score_exam(exam, correct_responses(exam), scheme)
        assert score.total == pytest.approx(scheme.max_total(exam))
        assert score.total == pytest.approx(10.0)
        assert score.set_perfect

    def test_all_wrong_scores_zero(self, exam, scheme):
        score = score_exam(exam, wrong_responses(exam), scheme)
        assert score.total == 0.0
        assert not score.set_perfect

    def test_mixed_sheet_matches_spreadsheet_recount(self, exam, scheme):
        # Alternate right/wrong; recount with an independent tally that never
        # calls the grading module.
        responses = []
        for i, (good, bad) in enumerate(zip(correct_responses(exam), wrong_responses(exam))):
            responses.append(good if i % 2 == 0 else bad)

        expected = 0.0
        for i, item in enumerate(exam.items):
            if i % 2 == 1:
                continue
            if item.section is Section.I:
                expected += 0.25
            elif item.section is Section.II:
                expected += 1.0
            else:
                expected += 0.5
        score = score_exam(exam, responses, scheme)
        assert score.total == pytest.approx(expected, abs=1e-12)

    def test_unanswered_scores_zero_but_counts(self, exam, scheme):
        responses = list(correct_responses(exam))
        responses[3] = None
        score = score_exam(exam, responses, scheme)
        assert score.item_scores[3].points == 0.0
        assert not score.set_perfect

    def test_length_mismatch_rejected(self, exam, scheme):
        with pytest.raises(FormatError):
            score_exam(exam, [], scheme)

    def test_grading_permutation_covariant(self, exam, scheme):
        responses = correct_responses(exam)
        responses[0] = wrong_responses(exam)[0]
        base = score_exam(exam, responses, scheme)
        # Permute within Section I to keep the exam's section grouping legal.
        order = [3, 0, 1, 2] + list(range(4, len(exam.items)))
        permuted_exam = Exam(
            "permuted", tuple(exam.items[i] for i in order), exam.provenance
        )
        permuted = score_exam(
            permuted_exam, [responses[i] for i in order], scheme
        )
        for src, dst in enumerate(order):
            assert permuted.item_scores[src] == base.item_scores[dst]


class TestCompliance:
    def test_fixture_is_fully_compliant(self, exam, matrix):
        report = validate_exam(exam, matrix)
        assert report.compliant
        assert report.rate == 1.0
        assert report.violations == ()

    def test_single_removal_yields_exactly_one_violation(self, exam, matrix):
        for index in (0, 12, 16, 21):
            report = validate_exam(perturb_remove_item(exam, index), matrix)
            assert not report.compliant
            assert len(report.violations) == 1
            violation = report.violations[0]
            assert violation.found == violation.required - 1

    def test_unknown_topic_reported_not_fatal(self, exam, matrix):
        report = validate_exam(perturb_unknown_topic(exam, 0), matrix)
        assert not report.compliant
        topics = {violation.topic for violation in report.violations}
        assert "uncharted territory" in topics

    def test_rate_bounds_and_equivalence(self, exam, matrix):
        for index in range(0, 22, 5):
            report = validate_exam(perturb_remove_item(exam, index), matrix)
            assert 0.0 <= report.rate <= 1.0
            assert (report.rate == 1.0) == (not report.violations)

    def test_batch_mean_rate_matches_recount_script(self, matrix):
        exams = fixture_corpus(30, base_seed=300)
        exams[7] = perturb_remove_item(exams[7], 4)
        rates = [validate_exam(e, matrix).rate for e in exams]

        # Independent recount: tally items per cell straight off the exam.
        required = {k: v for k, v in matrix.cells.items() if v > 0}
        recounted = []
        for e in exams:
            found = Counter((i.topic, i.section, i.level) for i in e.items)
            matched = sum(1 for key, need in required.items() if found.get(key, 0) == need)
            recounted.append(matched / len(required))
        assert abs(float(np.mean(rates)) - float(np.mean(recounted))) < 1e-12

    def test_empty_matrix_rejected(self, exam):
        empty = SpecificationMatrix(
            topics=("t",), cells={}, section_totals={Section.I: 0, Section.II: 0, Section.III: 0}
        )
        with pytest.raises(ValueError):
            validate_exam(exam, empty)


class TestNovelty:
    def test_identical_stem_scores_100(self, exam):
        assert novelty_overlap(exam.items[0], [exam.items[0]]) == 100.0

    def test_disjoint_stems_score_zero(self, exam):
        assert novelty_overlap(exam.items[0], ["zq wx yv uk tj si rh qg pf oe"]) == 0.0

    def test_empty_bank_scores_zero(self, exam):
        assert novelty_overlap(exam.items[0], []) == 0.0

    def test_pairwise_core_symmetric(self, exam):
        a, b = exam.items[0], exam.items[5]
        assert novelty_overlap(a, [b]) == pytest.approx(novelty_overlap(b, [a]), abs=1e-12)

    def test_matches_bruteforce_jaccard_oracle(self, exam):
        bank = [item.stem for item in fixture_exam(321).items[:20]]

        def oracle(a: str, b: str, n: int) -> float:
            ta = a.lower().split()
            tb = b.lower().split()
            ga = sorted(tuple(ta[i : i + n]) for i in range(len(ta) - n + 1))
            gb = sorted(tuple(tb[i : i + n]) for i in range(len(tb) - n + 1))
            inter = 0
            remaining = list(gb)
            for gram in ga:
                if gram in remaining:
                    remaining.remove(gram)
                    inter += 1
            union = len(ga) + len(gb) - inter
            return inter / union if union else 1.0

        for item in exam.items[:8]:
            expected = 100.0 * max(oracle(item.stem, stem, 3) for stem in bank)
            assert novelty_overlap(item, bank, 3) == pytest.approx(expected, abs=1e-9)

    def test_ngram_jaccard_rejects_bad_n(self):
        with pytest.raises(ValueError):
            ngram_jaccard("a b c", "a b c", 0)


class TestInterchange:
    def test_roundtrip_is_byte_identical_on_shipped_fixtures(self, data_dir):
        fixture_paths = sorted(data_dir.glob("fixture_exam_*.json"))
        assert len(fixture_paths) == 3
        for path in fixture_paths:
            raw = path.read_bytes()
            assert serialize_exam(parse_exam(raw)) == raw

    def test_parse_serialize_identity_for_generated(self, exam):
        assert parse_exam(serialize_exam(exam)) == exam

    def test_fixture_corpus_parse_count_matches_directory_scan(self, data_dir):
        paths = sorted(data_dir.glob("fixture_exam_*.json"))
        parsed = [parse_exam(path.read_bytes()) for path in paths]
        assert len(parsed) == len(paths)

    def test_three_choice_item_names_offending_path(self, exam):
        doc = json.loads(serialize_exam(exam))
        doc["items"][2]["body"]["choices"] = doc["items"][2]["body"]["choices"][:3]
        with pytest.raises(SchemaError) as excinfo:
            parse_exam(json.dumps(doc))
        assert "items[2].body.choices" in str(excinfo.value)

    def test_missing_field_names_path(self, exam):
        doc = json.loads(serialize_exam(exam))
        del doc["items"][0]["stem"]
        with pytest.raises(SchemaError) as excinfo:
            parse_exam(json.dumps(doc))
        assert "items[0].stem" in str(excinfo.value)

    def test_unknown_section_tag_rejected(self, exam):
        doc = json.loads(serialize_exam(exam))
        doc["items"][0]["section"] = "IV"
        with pytest.raises(SchemaError) as excinfo:
            parse_exam(json.dumps(doc))
        assert "items[0].section" in str(excinfo.value)

    def test_short_key_roundtrip_preserves_value(self, grading_items):
        playground = grading_items[3]
        exam = Exam("short-only", (playground,), Provenance.FIXTURE)
        parsed = parse_exam(serialize_exam(exam))
        assert isinstance(parsed.items[0].body, ShortAnswer)
        assert parsed.items[0].body.key == 3200.0


class TestDefaultMatrix:
    def test_section_totals_are_12_4_6(self, matrix):
        for section, expected in ((Section.I, 12), (Section.II, 4), (Section.III, 6)):
            total = sum(
                count for (_, sec, _), count in matrix.cells.items() if sec is section
            )
            assert total == expected

    def test_published_topic_codes_exist(self, matrix):
        # Codes 8 and 11 must carry Section III application slots.
        for code in (8, 11):
            topic = matrix.topic_for_code(code)
            assert matrix.cells.get((topic, Section.III, CognitiveLevel.APPLICATION), 0) > 0

    def test_topic_code_roundtrip(self, matrix):
        for topic in matrix.topics:
            assert matrix.topic_for_code(matrix.topic_code(topic)) == topic
