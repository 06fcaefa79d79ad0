import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from checksynth.geometry import Rect
from checksynth.sheets import (ManifestError, SignatureSample, binarize, crop_signature,
                               extract_sample, load_manifest, to_luminance, validate_collection)

from oracles import window_sum

HEADER = "sheet_file,person_id,forged,pen,x,y,w,h\n"


def write(tmp_path, text, name="manifest.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_manifest(tmp_path):
    assert load_manifest(write(tmp_path, "")) == []
    assert load_manifest(write(tmp_path, HEADER)) == []


def test_manifest_one_sheet_eight_boxes(tmp_path):
    rows = "".join(f"s1.png,P07,{i % 2},{'bp' if i < 4 else 'pc'},{10 + 50 * i},5,40,20\n"
                   for i in range(8))
    anns = load_manifest(write(tmp_path, HEADER + rows))
    assert len(anns) == 1
    ann = anns[0]
    assert (ann.sheet_id, ann.person_id) == ("s1.png", "P07")
    assert [b.rect.x for b in ann.boxes] == [10 + 50 * i for i in range(8)]
    assert [b.forged for b in ann.boxes] == [False, True] * 4
    assert [b.pen for b in ann.boxes] == ["ballpoint"] * 4 + ["pencil"] * 4


def test_manifest_negative_x(tmp_path):
    with pytest.raises(ManifestError, match="rect outside bounds"):
        load_manifest(write(tmp_path, HEADER + "s1.png,P1,0,bp,-1,0,5,5\n"))


def test_manifest_rect_past_sheet_edge(tmp_path):
    Image.new("L", (100, 50), 255).save(tmp_path / "s1.png")
    p = write(tmp_path, HEADER + "s1.png,P1,0,bp,90,0,20,5\n")
    load_manifest(p)  # without sheets, only the origin is checked
    with pytest.raises(ManifestError, match="rect outside bounds"):
        load_manifest(p, tmp_path)


@pytest.mark.parametrize("row, line", [
    ("s1.png,P1,2,bp,0,0,5,5", 3),
    ("s1.png,P1,0,ink,0,0,5,5", 3),
    ("s1.png,P1,0,bp,0,zero,5,5", 3),
    ("s1.png,P1,0,bp,0,0,5", 3),
])
def test_malformed_record_reports_line(tmp_path, row, line):
    text = HEADER + "s1.png,P1,0,bp,0,0,5,5\n" + row + "\n"
    with pytest.raises(ManifestError, match=f":{line}:"):
        load_manifest(write(tmp_path, text))


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_manifest(tmp_path / "nope.csv")


def test_threshold_column(tmp_path):
    text = "sheet_file,person_id,forged,pen,x,y,w,h,threshold\ns1.png,P1,0,pc,0,0,5,5,190\n"
    assert load_manifest(write(tmp_path, text))[0].threshold == 190


def gradient(w=64, h=32):
    ys, xs = np.mgrid[0:h, 0:w]
    return ((xs * 3 + ys * 5) % 256).astype(np.uint8)


def test_crop_identity_and_point():
    sheet = gradient()
    np.testing.assert_array_equal(crop_signature(sheet, Rect(0, 0, 64, 32)), sheet)
    assert crop_signature(sheet, Rect(5, 5, 1, 1)).tolist() == [[sheet[5, 5]]]


def test_crop_window_sum_matches_scan():
    sheet = gradient()
    out = crop_signature(sheet, Rect(7, 3, 10, 4))
    assert out.shape == (4, 10)
    assert int(out.sum()) == window_sum(sheet.tolist(), 7, 3, 10, 4)


@pytest.mark.parametrize("box", [Rect(0, 0, 0, 4), Rect(60, 0, 10, 4), Rect(-1, 0, 3, 3)])
def test_crop_rejects_bad_boxes(box):
    with pytest.raises(ValueError):
        crop_signature(gradient(), box)


def test_binarize_examples():
    assert not binarize(np.full((4, 4), 255, np.uint8), 128).any()
    assert binarize(np.zeros((4, 4), np.uint8), 128).all()
    ramp = np.tile(np.arange(256, dtype=np.uint8), (3, 1))
    mask = binarize(ramp, 100)
    assert int(mask.any(axis=0).sum()) == 100
    assert mask[:, :100].all() and not mask[:, 100:].any()


def test_luminance_matches_pillow():
    rng = np.random.default_rng(0)
    rgb = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    expected = np.asarray(Image.fromarray(rgb).convert("L"))
    np.testing.assert_array_equal(to_luminance(rgb), expected)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 2 ** 32 - 1))
def test_binarize_monotone_in_threshold(t1, t2, seed):
    lo, hi = sorted((t1, t2))
    img = np.random.default_rng(seed).integers(0, 256, size=(12, 12), dtype=np.uint8)
    a, b = binarize(img, lo), binarize(img, hi)
    assert not (a & ~b.astype(bool)).any()


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_crop_composes(data):
    sheet = gradient(40, 30)
    x = data.draw(st.integers(0, 39))
    y = data.draw(st.integers(0, 29))
    w = data.draw(st.integers(1, 40 - x))
    h = data.draw(st.integers(1, 30 - y))
    x2 = data.draw(st.integers(0, w - 1))
    y2 = data.draw(st.integers(0, h - 1))
    w2 = data.draw(st.integers(1, w - x2))
    h2 = data.draw(st.integers(1, h - y2))
    nested = crop_signature(crop_signature(sheet, Rect(x, y, w, h)), Rect(x2, y2, w2, h2))
    np.testing.assert_array_equal(nested, crop_signature(sheet, Rect(x + x2, y + y2, w2, h2)))


def test_extract_tightens_and_is_deterministic():
    from checksynth.sheets import SheetBox

    sheet = np.full((50, 80), 250, np.uint8)
    sheet[20:30, 15:60] = 40
    box = SheetBox(Rect(5, 10, 70, 35), False, "ballpoint")
    a = extract_sample(sheet, box, "P1")
    b = extract_sample(sheet, box, "P1")
    assert a == b
    assert a.mask.shape == (10, 45) and a.mask.all()
    m = a.mask
    assert m[0].any() and m[-1].any() and m[:, 0].any() and m[:, -1].any()


def test_extract_blank_box_raises():
    from checksynth.sheets import SheetBox

    with pytest.raises(ValueError, match="no ink"):
        extract_sample(np.full((20, 20), 255, np.uint8), SheetBox(Rect(0, 0, 10, 10), False, "pencil"), "P1")


def _samples(pid, genuine, forged_bp, forged_pc):
    one = np.ones((2, 2), np.uint8)
    out = [SignatureSample(pid, False, "ballpoint" if i % 2 else "pencil", one * 0, one)
           for i in range(genuine)]
    out += [SignatureSample(pid, True, "ballpoint", one * 0, one) for _ in range(forged_bp)]
    out += [SignatureSample(pid, True, "pencil", one * 0, one) for _ in range(forged_pc)]
    return out


def test_validate_protocol_person_has_no_flags():
    rep = validate_collection(_samples("P1", 16, 4, 4))
    assert rep["P1"].flags == []


def test_validate_flags_missing_person():
    rep = validate_collection([], expected_persons=["P9"])
    assert rep["P9"].flags == ["no samples"]


def test_validate_flags_pen_split():
    rep = validate_collection(_samples("P1", 16, 8, 0))
    assert "pen split 8/0 ≠ 4/4" in rep["P1"].flags


def test_validate_flags_counts_without_raising():
    flags = validate_collection(_samples("P1", 12, 2, 1))["P1"].flags
    assert "genuine count 12 ≠ 16" in flags
    assert "forged count 3 ≠ 8" in flags


def test_sample_store_round_trip(samples_dir, collection_dir):
    from checksynth.sheets import load_samples

    loaded = load_samples(samples_dir)
    assert len(loaded) == 48
    again = load_samples(samples_dir / "samples.json")
    assert all(a == b for a, b in zip(loaded, again))
    rep = validate_collection(loaded)
    assert set(rep) == {"P01", "P02"}
    assert all(r.flags == [] for r in rep.values())
