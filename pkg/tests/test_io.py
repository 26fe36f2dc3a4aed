import json

import numpy as np
import pytest

from closurebisim.errors import InvalidPartitionError, ModelError
from closurebisim.io import (class_color, decode_image, export_dot, fixture_path, image_to_model,
                             load_fixture, load_model, load_palette, load_partition,
                             palette_from_dict, read_netpbm, render_classes, save_model,
                             save_partition, write_netpbm)
from closurebisim.maze import PALETTE, generate_maze
from closurebisim.model import Partition, ap_partition

RB = {"adjacency": "chebyshev8", "colors": {"#ff0000": "r", "#0000ff": "b"}}


def test_round_trip(fig):
    m = fig("fig2")
    text = save_model(m)
    again = load_model(text)
    assert again.names == m.names and again.edges() == m.edges() and again.labels == m.labels
    assert save_model(again) == text
    with open(fixture_path("fig2.json")) as fh:
        assert fh.read() == text


@pytest.mark.parametrize("doc,msg", [
    ({"points": [{"id": "a"}, {"id": "a"}]}, "duplicate"),
    ({"points": [{"id": "a", "colour": 1}]}, "unknown field"),
    ({"points": [{"id": "a"}], "extra": []}, "unknown field"),
    ({"points": [{"id": "a"}], "edges": [["a", "b"]]}, "edges[0][1]"),
    ({"points": []}, "at least one point"),
    ({"edges": []}, "missing field"),
])
def test_schema_errors(doc, msg):
    with pytest.raises(ModelError, match=msg.replace("[", r"\[").replace("]", r"\]")):
        load_model(json.dumps(doc))


def test_partition_files(fig):
    m = fig("fig6")
    p = Partition([0, 1, 0, 0, 1])
    assert load_partition(save_partition(m, p), m) == p
    with pytest.raises(InvalidPartitionError):
        load_partition('{"classes": [["x11"]]}', m)
    with pytest.raises(ModelError):
        load_partition('{"classes": [["x11", "nope"]]}', m)


def test_palette_errors():
    with pytest.raises(ModelError):
        palette_from_dict({"colors": {}})
    with pytest.raises(ModelError):
        palette_from_dict({"colors": {"#ffffff": "w", "255": "w2"}})
    with pytest.raises(ModelError):
        palette_from_dict({"colors": {"#fff": "w"}})
    with pytest.raises(ModelError):
        palette_from_dict({"colors": {"0": "k"}, "adjacency": "hex6"})


def test_two_pixel_image():
    img = np.array([[[255, 0, 0], [0, 0, 255]]], dtype=np.uint8)
    g = image_to_model(write_netpbm(img), palette_from_dict(RB))
    m = g.base
    assert m.n == 2 and set(m.edges()) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert m.labels == (frozenset({"r"}), frozenset({"b"}))
    assert g.pixel_of(1) == (0, 1)


def test_orthogonal_corner_degree():
    img = np.full((3, 3), 255, dtype=np.uint8)
    g = image_to_model(write_netpbm(img), load_palette('{"adjacency":"orthogonal4","colors":{"255":"w"}}'))
    corner = g.base.successors(0).tolist()
    assert sorted(corner) == [0, 1, 3]
    assert sorted(g.base.successors(4).tolist()) == [1, 3, 4, 5, 7]


def test_adjacency_symmetric_with_self_loops():
    g = image_to_model(write_netpbm(generate_maze()), palette_from_dict(PALETTE))
    e = set(g.base.edges())
    assert all((b, a) in e for a, b in e)
    assert all((x, x) in e for x in range(g.base.n))
    assert g.base.n == 1024


def test_unknown_colour_reports_coordinates():
    img = np.array([[[255, 0, 0], [1, 2, 3]]], dtype=np.uint8)
    with pytest.raises(ModelError, match=r"#010203 at \(row,col\) \(0,1\)"):
        image_to_model(write_netpbm(img), palette_from_dict(RB))


def test_netpbm_variants():
    rgb = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3) * 7
    gray = np.arange(6, dtype=np.uint8).reshape(2, 3) * 40
    for arr in (rgb, gray):
        for plain in (False, True):
            back, maxval = read_netpbm(write_netpbm(arr, plain=plain))
            assert maxval == 255 and np.array_equal(back, arr)
    text = b"P2\n# comment\n2 1\n# another\n15\n0 15\n"
    assert decode_image(text)[0, 1].tolist() == [255, 255, 255]
    wide = b"P5 1 1 65535\n" + (1000).to_bytes(2, "big")
    assert read_netpbm(wide)[0].tolist() == [[1000]]
    assert bytes(write_netpbm(gray)[:2]) == b"P5"
    for bad in (b"P7\n", b"P5\n2 2\n255\n\x00", b"P2\n2 x\n", b"P2\n1 1\n3\n9\n"):
        with pytest.raises(ModelError):
            read_netpbm(bad)


def test_png_when_pillow_present(tmp_path):
    pytest.importorskip("PIL")
    from closurebisim.io import encode_image
    img = generate_maze()
    assert np.array_equal(decode_image(encode_image(img, "png")), img)


def test_render(fig):
    g = image_to_model(write_netpbm(generate_maze()), palette_from_dict(PALETTE))
    out, _ = read_netpbm(render_classes(g, ap_partition(g.base)))
    colours = {tuple(c) for c in out.reshape(-1, 3)}
    assert len(colours) == 4
    ident, _ = read_netpbm(render_classes(g, Partition.identity(g.base.n)))
    assert len({tuple(c) for c in ident.reshape(-1, 3)}) == g.base.n
    assert render_classes(g, ap_partition(g.base)) == render_classes(g, ap_partition(g.base))
    with pytest.raises(InvalidPartitionError):
        render_classes(g, Partition([0, 1]))


def test_ap_render_same_class_iff_same_colour():
    img = generate_maze()
    g = image_to_model(write_netpbm(img), palette_from_dict(PALETTE))
    out, _ = read_netpbm(render_classes(g, ap_partition(g.base)))
    a = img.reshape(-1, 3)
    b = out.reshape(-1, 3)
    _, ia = np.unique(a, axis=0, return_inverse=True)
    _, ib = np.unique(b, axis=0, return_inverse=True)
    assert Partition(ia.ravel()) == Partition(ib.ravel())


def test_class_colours_distinct():
    cols = {class_color(k) for k in range(1 << 16)}
    assert len(cols) == 1 << 16


def test_dot(fig):
    m = fig("fig10")
    text = export_dot(m)
    assert text.count("->") == 2 and text.count("[label=") == 4
    coloured = export_dot(m, Partition([0, 1, 2, 1]))
    assert coloured.count(export_dot.__globals__["class_color"](1) and "fillcolor=\"#") >= 4
    q = load_fixture("fig6")
    assert export_dot(q).startswith("digraph")
