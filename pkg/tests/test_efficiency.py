"""Activity-log parsing and the five judging-efficiency criteria."""

import pytest

from poolbench.efficiency import (
    ActivityEvent,
    efficiency_stats,
    efficiency_table,
    event_from_json,
    event_to_json,
    parse_activity_log,
)
from poolbench.model import DataError


def ev(ts_s, action, doc=None, label=None, assessor="a1", topic="t1"):
    return ActivityEvent(ts=int(ts_s * 1000), assessor=assessor, topic=topic,
                         action=action, doc=doc, label=label)


def timeline(*events):
    return [ev(0, "open_topic"), *events]


# -- event records -------------------------------------------------------------

def test_event_validation():
    with pytest.raises(DataError, match="action"):
        ev(0, "sneeze")
    with pytest.raises(DataError, match="without a doc"):
        ev(0, "judge", label="REL")
    with pytest.raises(DataError, match="label"):
        ev(0, "judge", doc="d", label="GOOD")
    with pytest.raises(DataError, match="without a doc"):
        ev(0, "view_doc")


def test_event_json_round_trip_and_field_order():
    e = ev(1.5, "judge", doc="d9", label="H.REL")
    line = event_to_json(e)
    assert line.index('"ts"') < line.index('"assessor"') < line.index('"topic"')
    assert event_from_json(line) == e
    # open_topic omits doc and label entirely
    assert '"doc"' not in event_to_json(ev(0, "open_topic"))


# -- log parsing ----------------------------------------------------------------

def write_log(tmp_path, events):
    path = tmp_path / "log.jsonl"
    path.write_text("".join(event_to_json(e) + "\n" for e in events))
    return path


def test_parse_log_groups_by_assessor_topic(tmp_path):
    events = [ev(0, "open_topic"), ev(0, "open_topic", topic="t2"),
              ev(1, "judge", doc="d", label="REL"),
              ev(2, "judge", doc="e", label="NONREL", topic="t2")]
    path = write_log(tmp_path, events)
    timelines = parse_activity_log(path)
    assert set(timelines) == {("a1", "t1"), ("a1", "t2")}
    assert [e.action for e in timelines[("a1", "t1")]] == ["open_topic", "judge"]


def test_parse_log_requires_open_topic_first(tmp_path):
    path = write_log(tmp_path, [ev(1, "judge", doc="d", label="REL")])
    with pytest.raises(DataError, match="open_topic"):
        parse_activity_log(path)


def test_parse_log_sorts_nonmonotone_with_warning(tmp_path):
    events = [ev(0, "open_topic"), ev(5, "judge", doc="d", label="REL"),
              ev(3, "judge", doc="e", label="REL")]
    path = write_log(tmp_path, events)
    with pytest.warns(UserWarning, match="non-monotone"):
        timelines = parse_activity_log(path)
    ts = [e.ts for e in timelines[("a1", "t1")]]
    assert ts == sorted(ts)


def test_parse_log_bad_line_reports_lineno(tmp_path):
    path = tmp_path / "log.jsonl"
    path.write_text(event_to_json(ev(0, "open_topic")) + "\n{not json\n")
    with pytest.raises(DataError, match=":2"):
        parse_activity_log(path)


# -- per-timeline criteria ---------------------------------------------------------

def test_tj1d_time_to_first_judgment():
    t = timeline(ev(4, "view_doc", doc="d"), ev(12.5, "judge", doc="d", label="NONREL"))
    assert efficiency_stats(t).tj1d == pytest.approx(12.5)


def test_tj1d_outlier_is_na():
    t = timeline(ev(181, "judge", doc="d", label="REL"))
    assert efficiency_stats(t).tj1d is None
    t = timeline(ev(180, "judge", doc="d", label="REL"))
    assert efficiency_stats(t).tj1d == pytest.approx(180.0)


def test_no_judgments_all_na():
    stats = efficiency_stats(timeline(ev(1, "view_doc", doc="d")))
    assert stats.tj1d is None and stats.tf1rh is None
    assert stats.tf1h is None and stats.atbj is None
    assert stats.nrej == 0


def test_tf1rh_first_relevant_or_higher():
    t = timeline(ev(10, "judge", doc="a", label="NONREL"),
                 ev(20, "judge", doc="b", label="REL"),
                 ev(30, "judge", doc="c", label="H.REL"))
    stats = efficiency_stats(t)
    assert stats.tf1rh == pytest.approx(20.0)
    assert stats.tf1h == pytest.approx(30.0)


def test_tf1h_error_labels_do_not_count():
    t = timeline(ev(10, "judge", doc="a", label="ERROR"),
                 ev(20, "judge", doc="b", label="NONREL"))
    stats = efficiency_stats(t)
    assert stats.tf1rh is None
    assert stats.tf1h is None


def test_tf1_outlier_bound_is_thirty_minutes():
    t = timeline(ev(1801, "judge", doc="a", label="H.REL"))
    stats = efficiency_stats(t)
    assert stats.tf1rh is None and stats.tf1h is None
    t = timeline(ev(1800, "judge", doc="a", label="H.REL"))
    stats = efficiency_stats(t)
    assert stats.tf1rh == pytest.approx(1800.0)
    assert stats.tj1d is None  # over the 3-minute first-judgment bound


def test_atbj_mean_gap_excluding_interruptions():
    t = timeline(ev(10, "judge", doc="a", label="REL"),
                 ev(20, "judge", doc="b", label="REL"),
                 ev(300, "judge", doc="c", label="REL"),  # 280 s gap excluded
                 ev(320, "judge", doc="d", label="REL"))
    assert efficiency_stats(t).atbj == pytest.approx((10.0 + 20.0) / 2.0)


def test_atbj_single_judgment_is_na():
    t = timeline(ev(10, "judge", doc="a", label="REL"))
    assert efficiency_stats(t).atbj is None


def test_nrej_counts_only_label_changes():
    t = timeline(ev(1, "judge", doc="a", label="REL"),
                 ev(2, "judge", doc="a", label="REL"),  # same label: no change
                 ev(3, "judge", doc="a", label="H.REL"),  # change 1
                 ev(4, "judge", doc="b", label="NONREL"),
                 ev(5, "judge", doc="b", label="REL"),  # change 2
                 ev(6, "judge", doc="c", label="REL"))
    assert efficiency_stats(t).nrej == 2


def test_efficiency_stats_requires_open_topic():
    with pytest.raises(DataError, match="open_topic"):
        efficiency_stats([ev(1, "judge", doc="d", label="REL")])


# -- topic x version tables -----------------------------------------------------------

def make_stats(topic, version_value_pairs):
    """stats_by_cell fragment: {(topic, version): stats with tj1d=value}."""
    out = {}
    for version, value in version_value_pairs:
        out[(topic, version)] = EfficiencyStatsStub(topic, value)
    return out


class EfficiencyStatsStub:
    def __init__(self, topic, tj1d):
        self.topic = topic
        self.tj1d = tj1d

    def value(self, criterion):
        assert criterion == "tj1d"
        return self.tj1d


def test_efficiency_table_listwise_deletion():
    cells = {}
    cells.update(make_stats("t1", [("V1", 10.0), ("V2", 12.0)]))
    cells.update(make_stats("t2", [("V1", 9.0), ("V2", None)]))  # NA under V2
    cells.update(make_stats("t3", [("V1", 7.0)]))  # missing V2 cell
    kept, rows = efficiency_table(cells, "tj1d", ["V1", "V2"])
    assert kept == ["t1"]
    assert rows == [[10.0, 12.0]]


def test_efficiency_table_column_order_follows_versions():
    cells = make_stats("t1", [("V1", 1.0), ("V2", 2.0)])
    _, rows = efficiency_table(cells, "tj1d", ["V2", "V1"])
    assert rows == [[2.0, 1.0]]


def test_efficiency_table_unknown_criterion():
    with pytest.raises(DataError, match="criterion"):
        efficiency_table({}, "speed", ["V1"])
