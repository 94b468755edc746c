import json

import numpy as np
import pytest

from rulelab import evaluate as E
from rulelab import measures as M
from rulelab.measures import ContingencyCounts
from rulelab.mine import Rule
from rulelab.questgen import Pattern, PatternLog


def _rule(i, j, cx, cy, cxy, m=1000):
    return Rule((i,), (j,), ContingencyCounts(cx, cy, cxy, m))


RULES = [
    _rule(0, 1, 100, 100, 10),  # E = 10, lift 1
    _rule(1, 2, 100, 100, 30),  # strong positive
    _rule(2, 3, 100, 100, 2),   # negative
    _rule(3, 4, 0, 100, 0),     # undefined lift
    _rule(4, 5, 50, 40, 6),
]


def test_accept_mask_rules():
    v = np.array([0.5, 1.0, np.nan, 2.0])
    assert E.accept_mask(v, 1.0, "lift").tolist() == [False, False, False, True]
    assert E.accept_mask(v, 1.0, "lift", inclusive=True).tolist() == [False, True, False, True]
    assert E.accept_mask(v, 1.0, "hyper_confidence").tolist() == [False, True, False, True]
    # smaller p-values are stronger
    assert E.accept_mask(v, 1.0, "fisher").tolist() == [True, False, False, False]


def test_filter_matches_measure_values():
    for name in ("lift", "confidence", "hyper_lift", "hyper_confidence", "fisher_p_value"):
        t = {"lift": 1.0, "confidence": 0.05, "hyper_lift": 1.0,
             "hyper_confidence": 0.99, "fisher_p_value": 0.01}[name]
        kept = E.filter(RULES, name, t)
        for r in RULES:
            v = M.measure(name, r.counts)
            if v is None:
                assert r not in kept
            elif name == "fisher_p_value":
                assert (r in kept) == (v < t)
            elif name == "hyper_confidence":
                assert (r in kept) == (v >= t)
            else:
                assert (r in kept) == (v > t)


def test_chi_square_screens_positive_direction():
    neg = RULES[2]
    assert M.chi_square(neg.counts) > 3.84
    assert neg not in E.filter(RULES, "chi2", 3.84)
    assert neg in E.filter(RULES, "chi2", 3.84, two_sided_chi=True)
    assert RULES[1] in E.filter(RULES, "chi2", 3.84)


def test_filter_empty():
    assert E.filter([], "lift", 1.0) == []


def test_bonferroni():
    assert E.bonferroni_gamma(0.05, 28561) == pytest.approx(1 - 0.05 / 28561, rel=1e-15)
    assert E.bonferroni_gamma(0.05, 1) == 0.95
    with pytest.raises(ValueError):
        E.bonferroni_gamma(0.05, 0)
    with pytest.raises(ValueError):
        E.bonferroni_gamma(1.5, 10)


def test_spurious_estimate():
    assert E.spurious_estimate(28561, 0.99, 1000) == pytest.approx(0.28561)
    with pytest.raises(ValueError):
        E.spurious_estimate(10, 0.99, 0)


def test_sweep_counts():
    null = [_rule(0, 1, 100, 100, 11), _rule(1, 0, 100, 100, 9)]
    curve = E.sweep(RULES, null, "lift", thresholds=[0.0, 1.0, 2.0])
    assert curve.points == ((0.0, 4, 2), (1.0, 2, 1), (2.0, 2, 0))
    text = curve.to_csv()
    assert text.splitlines() == ["threshold,acceptedReal,acceptedNull", "0,4,2", "1,2,1", "2,2,0"]
    doc = curve.to_json()
    assert doc["measure"] == "lift" and doc["points"][1] == {"threshold": 1.0, "acceptedReal": 2,
                                                              "acceptedNull": 1}


def test_sweep_is_monotone_in_threshold():
    for name in ("lift", "hyper_lift", "confidence", "hyper_confidence", "chi_square"):
        curve = E.sweep(RULES, RULES, name)
        reals = [p[1] for p in curve.points]
        assert reals == sorted(reals, reverse=True)


def test_pn_graph():
    log = PatternLog((Pattern((1, 2), 0.5, 0.5), Pattern((4, 5), 0.5, 0.5)))
    pts = E.pn_graph(RULES, log, "lift", thresholds=[0.0, 1.5])
    assert [(p.P, p.N) for p in pts] == [(2, 2), (2, 0)]
    assert E.pn_to_csv(pts).splitlines()[1] == "0,2,2"
    assert json.loads(E.pn_to_json(pts, "lift"))["points"][1] == {"threshold": 1.5, "P": 2, "N": 0}


def test_average_pn():
    a = [E.PNPoint(1.0, 2, 4), E.PNPoint(2.0, 1, 0)]
    b = [E.PNPoint(1.0, 4, 2), E.PNPoint(2.0, 1, 2)]
    avg = E.average_pn([a, b])
    assert avg == [E.PNPoint(1.0, 3.0, 3.0), E.PNPoint(2.0, 1.0, 1.0)]
    with pytest.raises(ValueError):
        E.average_pn([a, b[:1]])
    with pytest.raises(ValueError):
        E.average_pn([])


def test_interpolation_and_dominance():
    upper = [E.PNPoint(0, 10, 10), E.PNPoint(1, 5, 0)]
    assert E.interpolate_p(upper, 5) == pytest.approx(7.5)
    assert E.interpolate_p(upper, 11) is None
    lower_ok = [E.PNPoint(0, 7, 5), E.PNPoint(1, 5, 0)]
    assert E.dominance_violations(upper, lower_ok) == []
    lower_bad = [E.PNPoint(0, 8, 5)]
    assert E.dominance_violations(upper, lower_bad) == [(5, 8, 7.5)]


def test_grids():
    for name in M.MEASURES:
        g = E.default_grid(name)
        d = E.pn_grid(name)
        assert g.size > 5 and d.size > g.size
    assert E.pn_grid("lift")[0] == 1.0 and E.pn_grid("lift")[-1] == 3.0
    hc = E.pn_grid("hyper_confidence")
    assert hc[0] == 0.5 and np.all(np.diff(hc) > 0) and hc[-1] < 1.0


def test_pn_extreme_logs():
    universal = PatternLog((Pattern(tuple(range(10)), 1.0, 0.5),))
    assert all(p.N == 0 for p in E.pn_graph(RULES, universal, "lift", thresholds=[0.0, 1.0, 2.0]))
    empty = PatternLog(())
    assert all(p.P == 0 for p in E.pn_graph(RULES, empty, "lift", thresholds=[0.0, 1.0, 2.0]))


def test_sweep_extreme_thresholds():
    defined = [r for r in RULES if M.lift(r.counts) is not None]
    curve = E.sweep(RULES, RULES, "lift", thresholds=[-1.0, 1e9])
    assert curve.points == ((-1.0, len(defined), len(defined)), (1e9, 0, 0))


def test_spurious_estimate_identities():
    assert E.spurious_estimate(1000, 0.99, 10) == pytest.approx(1.0)
    assert E.spurious_estimate(1000, 1.0, 10) == 0.0
    assert E.spurious_estimate(19272, 0.99, 3732) == pytest.approx(0.052, abs=1e-3)


def test_hyper_confidence_and_hyper_lift_filters_agree():
    rng = np.random.default_rng(2)
    rules = []
    for _ in range(400):
        m = int(rng.integers(20, 2000))
        cx, cy = (int(v) for v in rng.integers(1, m, size=2))
        cxy = int(rng.integers(max(0, cx + cy - m), min(cx, cy) + 1))
        rules.append(_rule(0, 1, cx, cy, cxy, m))
    for g in (0.9, 0.99):
        a = E.filter(rules, "hyper_confidence", g)
        b = E.filter(rules, "hyper_lift", 1.0, delta=g)
        assert a == b
