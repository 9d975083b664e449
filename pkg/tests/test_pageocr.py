import numpy as np
import pytest

from ctcocr import (
    Box,
    DetectionSet,
    FormatError,
    GrayImage,
    InvalidInputError,
    Manifest,
    generate_corpus,
    parse_detections,
    recognize_page,
    score_page,
)
from ctcocr import CnnConfig, ModelConfig, RnnConfig, TrainPlan, train
from ctcocr.pageocr import PageResult, _join
from ctcocr.trainer import model_from_checkpoint, predict
from ctcocr.imaging import normalize_height


@pytest.fixture(scope="module")
def word_model(tmp_path_factory):
    """A small word model trained well enough to read its own lexicon."""
    root = tmp_path_factory.mktemp("pagecorpus")
    lexicon = ["ab", "ba", "aba"]
    parts = [
        generate_corpus(lexicon, root, total=220, seed=4, split="train", name_prefix="tr"),
        generate_corpus(lexicon, root, total=40, seed=5, split="val", name_prefix="va"),
    ]
    man = Manifest(entries=[e for p in parts for e in p.entries], unit="word", root=root)
    cfg = ModelConfig("crnn", 3, rnn=RnnConfig(1, 12), cnn=CnnConfig("tiny", (6, 12)))
    plan = TrainPlan(epochs=18, batch_size=16, learning_rate=1e-3, config=cfg)
    return train(plan, man, seed=1).checkpoint


def make_page_with_boxes(words, renderer_seed=0):
    """Compose word crops side by side on one white page."""
    from ctcocr.synthgen import render, RenderSpec

    crops = [
        render(RenderSpec(text=w, font_id="mono5x7", font_size=21, bold=False, italic=False,
                          fg_intensity=0.0, bg_intensity=1.0, kerning=0, skew_degrees=0.0,
                          blur_sigma=0.0, seed=renderer_seed))
        for w in words
    ]
    gap = 8
    height = max(c.height for c in crops) + 16
    width = sum(c.width for c in crops) + gap * (len(crops) + 1)
    page = np.ones((height, width))
    boxes = []
    x = gap
    for i, c in enumerate(crops):
        page[8 : 8 + c.height, x : x + c.width] = c.pixels
        boxes.append(Box(x, 8, c.width, c.height, order_index=i, unit="word"))
        x += c.width + gap
    return GrayImage(page), boxes


class TestParseDetections:
    def test_basic_parse(self):
        det = parse_detections("0 1 10 12 0 word\n# comment\n10 1 9 12 1 word L2\n")
        assert len(det.boxes) == 2
        assert det.boxes[1].line_id == "L2"

    def test_bad_field_count(self):
        with pytest.raises(FormatError):
            parse_detections("1 2 3\n")

    def test_duplicate_order_rejected(self):
        with pytest.raises(InvalidInputError):
            parse_detections("0 0 5 5 0 word\n6 0 5 5 0 word\n")


class TestJoinRules:
    def test_line_unit_joined_by_newline(self):
        boxes = [Box(0, 0, 5, 5, i, "line") for i in range(3)]
        assert _join(boxes, ["aa", "bb", "cc"], "line") == "aa\nbb\ncc"

    def test_words_without_line_ids_one_line(self):
        boxes = [Box(0, 0, 5, 5, i, "word") for i in range(3)]
        assert _join(boxes, ["a", "b", "c"], "word") == "a b c"

    def test_words_grouped_by_line_id(self):
        boxes = [
            Box(0, 0, 5, 5, 0, "word", "l1"),
            Box(6, 0, 5, 5, 1, "word", "l1"),
            Box(0, 6, 5, 5, 2, "word", "l2"),
        ]
        assert _join(boxes, ["a", "b", "c"], "word") == "a b\nc"

    def test_join_is_lossless(self):
        boxes = [
            Box(0, 0, 5, 5, 0, "word", "l1"),
            Box(6, 0, 5, 5, 1, "word", "l1"),
            Box(0, 6, 5, 5, 2, "word", "l2"),
        ]
        texts = ["ab", "ba", "aba"]
        joined = _join(boxes, texts, "word")
        assert [w for line in joined.split("\n") for w in line.split(" ")] == texts


class TestRecognizePage:
    def test_empty_detection_set(self, word_model):
        page = GrayImage(np.ones((40, 60)))
        result = recognize_page(page, DetectionSet(None, ()), word_model)
        assert result.text == ""
        assert result.per_box == []

    def test_single_box_equals_direct_recognition(self, word_model):
        page, boxes = make_page_with_boxes(["ab"])
        det = DetectionSet(None, (boxes[0],))
        result = recognize_page(page, det, word_model)
        model, alphabet = model_from_checkpoint(word_model)
        crop = GrayImage(
            page.pixels[boxes[0].y : boxes[0].y + boxes[0].h,
                        boxes[0].x : boxes[0].x + boxes[0].w]
        )
        direct = predict(model, alphabet, [normalize_height(crop)])[0]
        assert result.text == direct

    def test_box_order_follows_order_index(self, word_model):
        page, boxes = make_page_with_boxes(["ab", "ba"])
        det_fwd = DetectionSet(None, tuple(boxes))
        shuffled = (boxes[1], boxes[0])
        det_rev = DetectionSet(None, shuffled)
        assert recognize_page(page, det_fwd, word_model).text == \
            recognize_page(page, det_rev, word_model).text

    def test_out_of_bounds_box_recorded_and_skipped(self, word_model):
        page, boxes = make_page_with_boxes(["ab"])
        bad = Box(page.width - 2, 0, 10, 10, order_index=99, unit="word")
        det = DetectionSet(None, (boxes[0], bad))
        result = recognize_page(page, det, word_model)
        assert len(result.errors) == 1
        assert result.errors[0][0].order_index == 99
        assert len(result.per_box) == 1

    def test_unit_mismatch_is_config_error(self, word_model):
        from ctcocr import ConfigError

        page, _ = make_page_with_boxes(["ab"])
        det = DetectionSet(None, (Box(0, 0, 10, 10, 0, "line"),))
        with pytest.raises(ConfigError):
            recognize_page(page, det, word_model)

    def test_trained_model_reads_page_back(self, word_model):
        page, boxes = make_page_with_boxes(["ab", "aba", "ba"])
        det = DetectionSet(None, tuple(boxes))
        result = recognize_page(page, det, word_model)
        assert result.text == "ab aba ba"
        report = score_page(result, "ab aba ba")
        assert report.char_accuracy == 100.0
        assert report.word_accuracy == 100.0


class TestScorePage:
    def test_identical_texts(self):
        result = PageResult(text="the fox", per_box=[], errors=[])
        report = score_page(result, "the fox")
        assert report.char_accuracy == 100.0
        assert report.word_accuracy == 100.0

    def test_empty_prediction(self):
        report = score_page(PageResult("", [], []), "abc def")
        assert report.char_accuracy == 0.0
        assert report.word_accuracy == 0.0

    def test_one_wrong_word(self):
        # N=3 words, one wrong of equal length: WA = 2/3; CA from levenshtein
        gt = "aa bb cc"
        pred = "aa bx cc"
        report = score_page(PageResult(pred, [], []), gt)
        assert report.word_accuracy == pytest.approx(200.0 / 3.0)
        assert report.char_accuracy == pytest.approx((8 - 1) / 8 * 100)

    def test_empty_gt_rejected(self):
        with pytest.raises(InvalidInputError):
            score_page(PageResult("x", [], []), "")
