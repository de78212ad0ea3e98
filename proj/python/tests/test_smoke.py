import math

import pytest

import fraclab


def test_sharp_bound():
    value, x_star = fraclab.thm1_bound(2, 1, 1, 0, 2)
    assert value == 1.5
    assert x_star == 0.5


def test_corollaries():
    assert fraclab.corollary_bound("cor2", 2, 1, 1, 0, 2) == pytest.approx(1.5)
    assert fraclab.corollary_bound("cor3", 2, 0, 0, 0, 3) == pytest.approx(1.0)
    assert fraclab.corollary_bound("cor4", 2, 0, 0, 0, 3) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fraclab.corollary_bound("cor2", 2, 1, 1, 0.5, 2)


def test_classification():
    assert fraclab.classify("x^2-2") == "garsia_reciprocal"
    assert fraclab.classify("x^2-x-1") == "pisot_reciprocal"
    assert fraclab.classify_value(0.625) == "unclassified"
    with pytest.raises(ValueError):
        fraclab.classify_value(1.5)


def test_comb_dimension_band():
    slope = fraclab.comb_dimension(math.sqrt(0.5), 6, 11)
    assert abs(slope - 1.5) < 0.15


def test_counts_csv_header():
    csv = fraclab.comb_counts_csv(0.5, 4, 8)
    assert csv.startswith("m,delta,count,log2count\n")
    assert len(csv.strip().splitlines()) == 6


def test_separation_csv_header():
    csv = fraclab.separation_csv(0.5, 8)
    assert csv.startswith("n,count_A,min_gap,scaled_gap,well_separated\n")


def test_golden_collision():
    assert fraclab.exact_collision("x^2-x-1", 3) == ("100", "011")
    assert fraclab.exact_collision("x^2-2", 3) is None


def test_scaled_gap_positive():
    assert fraclab.scaled_gap(math.sqrt(0.5), 10) > 0.2


def test_wsp_overall_positive():
    assert fraclab.wsp_overall("x-2", 4) > 0.4


def test_orbit_eps():
    assert fraclab.orbit_eps(6, 5) > 0.2


def test_scan_csv_deterministic():
    a = fraclab.scan_csv(0.5, 0.668, 3, 6, 42)
    b = fraclab.scan_csv(0.5, 0.668, 3, 6, 42)
    assert a == b
    assert a.startswith("lambda,target,pass_fraction,dim_est\n")


def test_domain_errors_become_value_errors():
    with pytest.raises(ValueError):
        fraclab.thm1_bound(2, 3, 0, 0, 2)
    with pytest.raises(ValueError):
        fraclab.scaled_gap(1.5, 4)
