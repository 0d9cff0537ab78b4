import random
from types import SimpleNamespace

import numpy as np
import pytest

from courtcal.calibrate import CandidateDetection
from courtcal.court import CourtSegment, standard_template
from courtcal.scoring import (
    RenderedCourt,
    bright_white_mask,
    is_bright_white,
    render_court,
    score_detection,
    select_best,
)


def one_segment_template(p0, p1):
    axis = "transverse" if p0[1] == p1[1] else "longitudinal"
    return SimpleNamespace(segments=(CourtSegment("seg", p0, p1, axis),))


def pixel_set(rendered):
    return {(int(x), int(y)) for x, y in rendered.pixels}


def test_render_horizontal_segment_width_1():
    tpl = one_segment_template((10.0, 50.0), (20.0, 50.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=1)
    assert pixel_set(rendered) == {(x, 50) for x in range(10, 21)}
    assert rendered.count == 11


def test_render_horizontal_segment_width_3():
    tpl = one_segment_template((10.0, 50.0), (20.0, 50.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=3)
    want = {(x, y) for x in range(10, 21) for y in (49, 50, 51)}
    assert pixel_set(rendered) == want
    assert rendered.count == 33


def test_render_vertical_segment_width_3():
    tpl = one_segment_template((50.0, 10.0), (50.0, 20.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=3)
    want = {(x, y) for y in range(10, 21) for x in (49, 50, 51)}
    assert pixel_set(rendered) == want


def test_render_fully_outside_frame_is_empty():
    h = np.array([[1.0, 0, 5000.0], [0, 1.0, 5000.0], [0, 0, 1.0]])
    rendered = render_court(h, standard_template(), (100, 100))
    assert rendered.count == 0


def test_render_clips_to_frame():
    tpl = one_segment_template((-10.0, 5.0), (200.0, 5.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=1)
    assert pixel_set(rendered) == {(x, 5) for x in range(0, 100)}


def test_render_no_duplicate_pixels():
    rendered = render_court(np.eye(3) * 12, standard_template(), (400, 400))
    flat = rendered.pixels[:, 1] * 400 + rendered.pixels[:, 0]
    assert len(np.unique(flat)) == len(flat)


def test_is_bright_white_cases():
    assert is_bright_white((255, 255, 255), 200)
    assert not is_bright_white((210, 210, 190), 200)
    assert is_bright_white((200, 200, 200), 200)


def test_score_black_frame_is_zero():
    tpl = one_segment_template((10.0, 50.0), (20.0, 50.0))
    rendered = render_court(np.eye(3), tpl, (100, 100))
    frame = np.zeros((100, 100, 3), np.uint8)
    assert score_detection(rendered, frame) == 0


def test_score_white_frame_equals_pixel_count():
    tpl = one_segment_template((0.0, 50.0), (99.0, 50.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=1)
    assert rendered.count == 100
    frame = np.full((100, 100, 3), 255, np.uint8)
    assert score_detection(rendered, frame) == 100


def test_score_never_exceeds_rendered_count():
    rng = np.random.default_rng(21)
    frame = rng.integers(0, 256, size=(120, 120, 3), dtype=np.uint8)
    tpl = standard_template()
    h = np.diag([8.0, 8.0, 1.0])
    h[0, 2], h[1, 2] = 60.0, 60.0
    rendered = render_court(h, tpl, (120, 120))
    score = score_detection(rendered, frame, white_threshold=120)
    assert 0 <= score <= rendered.count


def test_score_matches_double_loop_oracle():
    rng = np.random.default_rng(31)
    frame = rng.integers(150, 256, size=(80, 80, 3), dtype=np.uint8)
    tpl = one_segment_template((5.0, 10.0), (70.0, 60.0))
    rendered = render_court(np.eye(3), tpl, (80, 80))
    got = score_detection(rendered, frame, white_threshold=200)
    want = 0
    for x, y in pixel_set(rendered):
        p = frame[y, x]
        if min(int(p[0]), int(p[1]), int(p[2])) >= 200:
            want += 1
    assert got == want


def test_score_accepts_precomputed_mask():
    tpl = one_segment_template((0.0, 50.0), (99.0, 50.0))
    rendered = render_court(np.eye(3), tpl, (100, 100), stroke_width=1)
    frame = np.full((100, 100, 3), 255, np.uint8)
    mask = bright_white_mask(frame, 200)
    assert score_detection(rendered, mask) == 100


def det(score, frame_id="f001"):
    return CandidateDetection(h=np.eye(3), score=score, frame_id=frame_id)


def test_select_best_figure_scores():
    best = select_best([det(356), det(812), det(844)])
    assert best.score == 844


def test_select_best_single():
    d = det(100)
    assert select_best([d]) is d


def test_select_best_empty():
    assert select_best([]) is None


def test_select_best_tie_breaks_on_frame_id():
    a = det(500, "f002")
    b = det(500, "f001")
    assert select_best([a, b]) is b


def test_select_best_permutation_invariant():
    rng = random.Random(4)
    dets = [det(s, f"f{i:03d}") for i, s in enumerate([10, 99, 99, 3, 42])]
    want = select_best(dets)
    for _ in range(10):
        shuffled = dets[:]
        rng.shuffle(shuffled)
        got = select_best(shuffled)
        assert got.score == want.score and got.frame_id == want.frame_id
