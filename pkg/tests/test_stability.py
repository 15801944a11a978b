import pytest

from compactloc import ptoral
from compactloc.catalog import torus_by_c2, torus_rank2
from compactloc.fusion import fusion_from_group, saturation_report
from compactloc.stability import cross_level_report


@pytest.mark.parametrize("m", [2, 3, 4])
def test_torus_by_c2_levels_agree(m):
    rep = cross_level_report(torus_by_c2(m), m)
    assert rep.status == "pass", rep.to_text()
    assert rep.get("torus extension at level %d" % m).status == "pass"
    assert rep.get("torus extension at level %d" % (m + 1)).status == "pass"


def test_rank_two_levels_agree():
    assert cross_level_report(torus_rank2(1), 1).ok


def test_family_grows_with_the_truncation():
    sizes = [len(ptoral.subgroups(torus_by_c2(m))) for m in (2, 3, 4, 5)]
    assert sizes == sorted(sizes)
    assert sizes[0] < sizes[-1]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_saturation_status_is_level_independent(m):
    statuses = []
    for k in (m, m + 1):
        W = torus_by_c2(k).working
        statuses.append([c.status for c in saturation_report(fusion_from_group(W, W.whole, 2)).checks])
    assert statuses[0] == statuses[1]
