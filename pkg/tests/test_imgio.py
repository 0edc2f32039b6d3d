"""File IO round trips and the fixed-palette / scaled-gray renderings."""

import numpy as np
import pytest

from geoscout.imgio import (
    CLASS_PALETTE,
    read_image,
    read_png,
    read_pnm,
    write_class_png,
    write_png,
    write_pnm,
    write_scaled_gray_png,
)
from geoscout.raster import RasterImage


def random_image(seed, h, w, ch):
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, (h, w, ch)).astype(np.uint8))


def test_png_round_trip_rgb(tmp_path):
    img = random_image(1, 13, 17, 3)
    path = tmp_path / "a.png"
    write_png(path, img)
    assert read_png(path) == img


def test_png_round_trip_gray(tmp_path):
    img = random_image(2, 9, 5, 1)
    path = tmp_path / "g.png"
    write_png(path, img)
    assert read_png(path) == img


def test_ppm_round_trip(tmp_path):
    img = random_image(3, 7, 11, 3)
    path = tmp_path / "a.ppm"
    write_pnm(path, img)
    assert read_pnm(path) == img


def test_pgm_round_trip(tmp_path):
    img = random_image(4, 6, 4, 1)
    path = tmp_path / "a.pgm"
    write_pnm(path, img)
    assert read_pnm(path) == img


def test_pnm_header_comments_are_skipped(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment line\n2 1\n# another\n255\n\x07\x09")
    img = read_pnm(path)
    assert img.pixels[:, :, 0].tolist() == [[7, 9]]


def test_pnm_rejects_wrong_depth(tmp_path):
    path = tmp_path / "x.pgm"
    path.write_bytes(b"P5\n2 1\n65535\n\x00\x00\x00\x00")
    with pytest.raises(ValueError):
        read_pnm(path)


def test_pnm_rejects_truncated_pixels(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(ValueError):
        read_pnm(path)


def test_read_image_dispatches_on_suffix(tmp_path):
    img = random_image(5, 3, 3, 3)
    write_pnm(tmp_path / "a.ppm", img)
    write_png(tmp_path / "a.png", img)
    assert read_image(tmp_path / "a.ppm") == img
    assert read_image(tmp_path / "a.png") == img


def test_class_png_uses_fixed_palette(tmp_path):
    ids = np.arange(9, dtype=np.uint8).reshape(3, 3)
    path = tmp_path / "seg.png"
    write_class_png(path, ids)
    out = read_png(path)
    for cid in range(9):
        y, x = divmod(cid, 3)
        assert tuple(out.pixels[y, x]) == CLASS_PALETTE[cid]


def test_class_png_rejects_out_of_palette_ids(tmp_path):
    with pytest.raises(ValueError):
        write_class_png(tmp_path / "bad.png", np.full((2, 2), 9, np.uint8))


def test_scaled_gray_maps_max_to_255(tmp_path):
    vals = np.array([[0.0, 1.5], [3.0, 6.0]])
    path = tmp_path / "s.png"
    scale = write_scaled_gray_png(path, vals)
    assert scale == 255.0 / 6.0
    out = read_png(path).pixels[:, :, 0]
    assert out[1, 1] == 255
    assert out[0, 0] == 0
    assert out[0, 1] == 64  # round(1.5 * 42.5) = round(63.75)


def test_scaled_gray_all_zero_uses_unit_scale(tmp_path):
    path = tmp_path / "z.png"
    scale = write_scaled_gray_png(path, np.zeros((4, 4)))
    assert scale == 1.0
    assert not read_png(path).pixels.any()
