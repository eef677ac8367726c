import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import synthetic_records
from newsshare.data import (
    MAX_TRUTH_SCORE,
    TRUTH_RANGES,
    DomainRecord,
    belief_center,
    build_observations,
    load_observations,
    read_justifications,
    read_records,
    truthfulness_category,
    truthfulness_score,
    write_records,
)
from newsshare.errors import DataError, ValidationError
from newsshare.model import BELIEF_CENTERS, GROUPS, ModelParams


@pytest.mark.parametrize(
    "items,expected",
    [
        ([("black", 0.0)], 0.0),
        ([("green", 0.5)], 0.7),
        ([("red", 0.5), ("yellow", 0.5)], 0.30),
        (["orange"], 0.25),
        ([("green", 1.0)], 0.8),
    ],
)
def test_truthfulness_score(items, expected):
    assert truthfulness_score(items) == pytest.approx(expected, abs=1e-15)


def test_truthfulness_score_errors():
    with pytest.raises(ValidationError):
        truthfulness_score([])
    with pytest.raises(ValidationError):
        truthfulness_score([("purple", 0.5)])
    with pytest.raises(ValidationError):
        truthfulness_score([("red", 1.5)])


def test_color_ranges_exact():
    assert TRUTH_RANGES == {
        "black": (0.0, 0.1),
        "red": (0.1, 0.2),
        "orange": (0.2, 0.3),
        "yellow": (0.3, 0.6),
        "green": (0.6, 0.8),
    }


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from(sorted(TRUTH_RANGES)), st.floats(0, 1)), min_size=1, max_size=20))
def test_score_never_above_cap(items):
    assert 0.0 <= truthfulness_score(items) <= MAX_TRUTH_SCORE


@pytest.mark.parametrize(
    "t,cat",
    [(0.55, "high"), (0.05, "very_low"), (0.30, "mixed"), (0.1, "low"), (0.1 + 0.2, "mixed"), (0.8, "very_high"), (0.0, "very_low")],
)
def test_truthfulness_category(t, cat):
    assert truthfulness_category(t) == cat


def test_category_monotone_and_total():
    order = ["very_low", "low", "mixed", "high", "very_high"]
    ranks = [order.index(truthfulness_category(t)) for t in np.linspace(0, 0.8, 801)]
    assert all(b >= a for a, b in zip(ranks, ranks[1:]))
    with pytest.raises(ValidationError):
        truthfulness_category(0.85)


@pytest.mark.parametrize("group,center", [("extreme_left", -0.857), ("center", 0.0), ("lean_right", 0.286)])
def test_belief_center(group, center):
    assert belief_center(group) == center


def test_belief_center_table():
    assert tuple(belief_center(g) for g in GROUPS) == BELIEF_CENTERS
    with pytest.raises(ValidationError):
        belief_center("moderate")


def test_single_cell_rate():
    obs = build_observations([DomainRecord("a", 0.2, 0.5, {"center": (10, 2)})])
    assert len(obs) == 1
    assert obs[0].rate == 0.2
    assert (obs[0].bias, obs[0].truth, obs[0].belief) == (0.2, 0.5, 0.0)


def test_zero_exposure_skipped():
    obs = build_observations([DomainRecord("a", 0.2, 0.5, {"center": (0, 0), "right": (5, 1)})])
    assert [o.belief for o in obs] == [0.571]


def test_cardinality_two_domains():
    counts = {g: (100, 3) for g in GROUPS}
    obs = build_observations([DomainRecord("a", 0.1, 0.4, counts), DomainRecord("b", -0.3, 0.6, counts)])
    assert len(obs) == 14


def test_record_validation():
    with pytest.raises(ValidationError):
        DomainRecord("a", 0.2, 0.5, {"center": (3, 4)})
    with pytest.raises(ValidationError):
        DomainRecord("a", 1.2, 0.5, {})
    with pytest.raises(ValidationError):
        DomainRecord("a", 0.2, 0.5, {"somewhere": (3, 1)})


def test_share_counts_preserved():
    recs = synthetic_records(n_domains=25, seed=9)
    recs[0].counts["center"] = (0, 0)
    obs = build_observations(recs)
    expected = sum(sh for r in recs for exp, sh in r.counts.values() if exp > 0)
    assert sum(o.shares for o in obs) == expected


def test_csv_round_trip(tmp_path):
    recs = synthetic_records(n_domains=12, seed=4)
    recs += synthetic_records(n_domains=3, seed=5, extreme=True, extreme_params=ModelParams(0.2, 4.0, 0.2, 4.0))
    path = tmp_path / "cells.csv"
    write_records(path, recs)
    back = read_records(path)
    assert back == recs
    assert build_observations(back) == build_observations(recs)
    path2 = tmp_path / "again.csv"
    write_records(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_extreme_records_kept_apart(tmp_path):
    path = tmp_path / "cells.csv"
    path.write_text(
        "domain_id,bias,truth,group,exposures,shares,extreme\n"
        "x,0.5,0.2,right,100,3,0\n"
        "x,0.5,0.2,right,10,4,1\n"
    )
    recs = read_records(path)
    assert [r.extreme for r in recs] == [False, True]
    assert [o.extreme_flag for o in build_observations(recs)] == [False, True]


@pytest.mark.parametrize(
    "body,line,fragment",
    [
        ("x,0.5,0.2,right,100,3\nx,0.5,0.2,left,abc,3\n", 3, "exposures"),
        ("x,0.5,0.2,right,100,300\n", 2, "invalid counts"),
        ("x,1.5,0.2,right,100,3\n", 2, "bias"),
        ("x,0.5,0.2,middle,100,3\n", 2, "unknown group"),
        ("x,0.5,0.2,right,100,3\nx,0.4,0.2,left,100,3\n", 3, "inconsistent"),
        ("x,0.5,0.2,right,100,3\nx,0.5,0.2,right,100,3\n", 3, "duplicate"),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, body, line, fragment):
    path = tmp_path / "bad.csv"
    path.write_text("domain_id,bias,truth,group,exposures,shares\n" + body)
    with pytest.raises(DataError, match=fragment) as exc:
        read_records(path)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"{path}:{line}:")


def test_empty_and_headerless_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(DataError, match="empty"):
        read_records(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text("domain_id,bias,truth,group,exposures,shares\n")
    with pytest.raises(DataError, match="no data rows"):
        read_records(header_only)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("domain,bias\nx,0.1\n")
    with pytest.raises(DataError, match="missing column"):
        read_records(wrong)


def test_justifications_supply_truth(tmp_path):
    just = tmp_path / "just.csv"
    just.write_text("domain_id,color,fraction\nx,red,0.5\nx,yellow,0.5\ny,green,\n")
    assert read_justifications(just) == pytest.approx({"x": 0.30, "y": 0.7}, abs=1e-15)
    cells = tmp_path / "cells.csv"
    cells.write_text("domain_id,bias,truth,group,exposures,shares\nx,0.5,,right,100,3\ny,-0.2,,left,50,1\n")
    obs = load_observations(cells, just)
    assert [o.truth for o in obs] == pytest.approx([0.30, 0.7], abs=1e-15)
    bad = tmp_path / "bad.csv"
    bad.write_text("domain_id,color,fraction\nx,blue,0.5\n")
    with pytest.raises(DataError) as exc:
        read_justifications(bad)
    assert exc.value.line == 2
