"""Tests for the result CSV, ground truth and matrix files."""

import numpy as np
import pytest

from affine_tracker.core.bag import ModelBag
from affine_tracker.core.models import BoxState, GroundTruthBox, TrackRecord
from affine_tracker.errors import FormatError, ParseError
from affine_tracker.io.records import (
    load_ground_truth,
    load_records,
    read_matrix,
    save_bag_snapshot,
    save_ground_truth,
    save_records,
    write_matrix,
)
from tests.conftest import random_affine


class TestRecords:
    """The per-frame result CSV."""

    def test_csv_layout(self, tmp_path):
        """Header and rows use fixed six-decimal formatting."""
        state = BoxState(x=10.25, y=20.5, s=1.1, base_w=40.0, base_h=30.0)
        save_records(tmp_path / "r.csv", [TrackRecord(frame_index=1, state=state, score=0.5)])
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines == [
            "frame,x,y,s,w,h,score",
            "1,10.250000,20.500000,1.100000,44,33,0.500000",
        ]

    def test_loaded_records_keep_box_geometry(self, tmp_path):
        """Loaded records keep their centers and sizes."""
        records = [
            TrackRecord(frame_index=i, state=BoxState.from_box(3 * i, 2 * i, 40, 40), score=0.1)
            for i in range(1, 4)
        ]
        save_records(tmp_path / "r.csv", records)
        loaded = load_records(tmp_path / "r.csv")
        assert [r.frame_index for r in loaded] == [1, 2, 3]
        assert [r.center for r in loaded] == [r.center for r in records]
        assert [(r.width, r.height) for r in loaded] == [(40, 40)] * 3

    def test_wrong_header_rejected(self, tmp_path):
        """An unexpected header is a parse error on line 1."""
        (tmp_path / "r.csv").write_text("frame,x,y\n1,2,3\n")
        with pytest.raises(ParseError) as exc_info:
            load_records(tmp_path / "r.csv")
        assert exc_info.value.line == 1

    def test_malformed_row_reports_line(self, tmp_path):
        """A bad row reports its line number."""
        (tmp_path / "r.csv").write_text(
            "frame,x,y,s,w,h,score\n1,0,0,1,4,4,0\n2,zero,0,1,4,4,0\n"
        )
        with pytest.raises(ParseError) as exc_info:
            load_records(tmp_path / "r.csv")
        assert exc_info.value.line == 3
        assert "line 3" in str(exc_info.value)


class TestGroundTruth:
    """Ground-truth box files."""

    def test_round_trip(self, tmp_path):
        """Boxes written as comma lines read back unchanged."""
        boxes = [GroundTruthBox(1, 2, 40, 40), GroundTruthBox(3, 4, 40, 40)]
        save_ground_truth(tmp_path / "gt.txt", boxes)
        assert (tmp_path / "gt.txt").read_text() == "1,2,40,40\n3,4,40,40\n"
        assert load_ground_truth(tmp_path / "gt.txt") == boxes

    def test_whitespace_separated_and_blank_lines(self, tmp_path):
        """Whitespace separators and blank lines are accepted."""
        (tmp_path / "gt.txt").write_text("5 6 7 8\n\n9\t10\t11\t12\n")
        assert load_ground_truth(tmp_path / "gt.txt") == [
            GroundTruthBox(5, 6, 7, 8), GroundTruthBox(9, 10, 11, 12)
        ]

    @pytest.mark.parametrize("line", ["1,2,3", "1,2,a,4", "1,2,0,4"])
    def test_malformed_line_rejected(self, tmp_path, line):
        """Short, non-numeric or empty boxes report their line."""
        (tmp_path / "gt.txt").write_text(f"0,0,4,4\n{line}\n")
        with pytest.raises(ParseError) as exc_info:
            load_ground_truth(tmp_path / "gt.txt")
        assert exc_info.value.line == 2


class TestMatrices:
    """Plain-text matrix dumps."""

    def test_values_survive_exactly(self, tmp_path, np_rng):
        """Matrices round-trip bit for bit with a shape header."""
        matrix = np_rng.standard_normal((5, 3))
        write_matrix(tmp_path / "m.txt", matrix)
        assert (tmp_path / "m.txt").read_text().splitlines()[0] == "5 3"
        np.testing.assert_array_equal(read_matrix(tmp_path / "m.txt"), matrix)

    @pytest.mark.parametrize("content", ["", "2 2\n1 2\n", "2 2\n1 2\n3\n", "x y\n"])
    def test_malformed_matrix_rejected(self, tmp_path, content):
        """Empty, short or non-numeric files are a format error."""
        (tmp_path / "m.txt").write_text(content)
        with pytest.raises(FormatError):
            read_matrix(tmp_path / "m.txt")

    def test_bag_snapshot(self, tmp_path, np_rng):
        """Each bag model is dumped as origin then basis columns."""
        bag = ModelBag(capacity=3, update_period=1)
        models = [random_affine(np_rng, 6, 2), random_affine(np_rng, 6, 1)]
        for frame, model in enumerate(models, start=1):
            bag = bag.maybe_update(model, frame)
        written = save_bag_snapshot(tmp_path / "bag", bag)
        assert [p.name for p in written] == ["model_00.txt", "model_01.txt"]
        first = read_matrix(written[0])
        np.testing.assert_array_equal(first[:, 0], models[0].origin)
        np.testing.assert_array_equal(first[:, 1:], models[0].basis)
        assert read_matrix(written[1]).shape == (6, 2)
