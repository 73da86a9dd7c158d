import numpy as np
import pytest
from pytest_mock import MockerFixture

from weylrat.cyclic_family import SubsetIndex, c_element, family_elements
from weylrat.oracle import (
    EnumerationReport,
    brute_force_verify,
    enumerate_group,
    group_order,
    run_verification,
    scan_permutation,
    scan_span,
    verify_certificates,
    verify_descent,
    verify_family_closure,
)
from weylrat.rationality import is_rational
from weylrat.root_system import InvalidRankError, root_table
from weylrat.signed_perm import SignedPerm, format_one_line
from weylrat.util import even_sign_masks, next_permutation


def test_group_order() -> None:
    assert group_order(5) == 1920
    assert group_order(7) == 322560


def test_enumerate_group_visits_every_element() -> None:
    seen = []
    enumerate_group(4, seen.append)
    assert len(seen) == 192
    assert len(set(seen)) == 192


def test_scan_permutation_matches_graph_test() -> None:
    r = 5
    table = root_table(r)
    masks = np.array(even_sign_masks(r), dtype=np.int64)
    perm = tuple(range(1, r + 1))
    while perm is not None:
        verdicts = scan_permutation(perm, table, masks)
        for mask, verdict in zip(masks, verdicts):
            u = SignedPerm(r, bytes(perm), int(mask))
            assert bool(verdict) == is_rational(u), format_one_line(u)
        perm = next_permutation(perm)


def test_scan_span_of_identity_permutation() -> None:
    result = scan_span((5, 0, 1))
    assert result.visited == 16
    assert result.found == 1
    assert result.rational == [("(-1,-2,-3,-4,5)", 20)]
    assert result.mismatches == []


def test_brute_force_verify_rank_five() -> None:
    report = brute_force_verify(5)
    assert report.ok
    assert report.visited == 1920
    assert report.rational_count == 31
    assert report.expected_count == 31
    assert report.defect_histogram == [1, 2, 2, 4, 6, 8, 6, 2]
    assert report.mismatches == []
    assert report.worker_count == 1


def test_brute_force_verify_is_deterministic_across_workers() -> None:
    single = brute_force_verify(5, workers=1, chunks_per_worker=3)
    pooled = brute_force_verify(5, workers=2, chunks_per_worker=4)
    assert pooled.worker_count == 2
    assert single.deterministic_view() == pooled.deterministic_view()


def test_brute_force_verify_logs_progress(mocker: MockerFixture) -> None:
    logger = mocker.patch("weylrat.oracle.logger")
    brute_force_verify(5, progress_interval=256)
    messages = [call.args[0] for call in logger.debug.call_args_list]
    assert any(message.startswith("visited 1,920 elements") for message in messages)


def test_brute_force_verify_rejects_bad_arguments() -> None:
    with pytest.raises(InvalidRankError):
        brute_force_verify(4)
    with pytest.raises(ValueError):
        brute_force_verify(5, workers=0)


def test_report_flags_mismatches() -> None:
    report = brute_force_verify(5)
    broken = report.model_copy(update={"mismatches": ["(1,2,3,4,5)"]})
    assert not broken.ok
    short = report.model_copy(update={"rational_count": 30})
    assert not short.ok


def test_family_closure() -> None:
    report = brute_force_verify(5)
    assert verify_family_closure(report)
    partial = EnumerationReport(
        rank=5,
        group_order=1920,
        rational_elements=report.rational_elements[1:],
    )
    assert not verify_family_closure(partial)


def test_verify_descent() -> None:
    check = verify_descent(5)
    assert check.name == "descent"
    assert check.checked == 30
    assert check.ok
    single = verify_descent(5, [c_element(SubsetIndex.from_members([4], 5))])
    assert single.checked == 1
    assert single.ok


def test_verify_certificates() -> None:
    check = verify_certificates(5)
    assert check.checked == 75
    assert check.ok


def test_run_verification() -> None:
    summary = run_verification(5)
    assert summary.ok
    assert summary.descent.checked == 30
    assert summary.family_closure
    assert len(summary.report.rational_elements) == len(family_elements(5))


@pytest.mark.slow
def test_brute_force_verify_rank_seven() -> None:
    report = brute_force_verify(7, workers=2)
    assert report.ok
    assert report.visited == 322560
    assert report.rational_count == 127
    assert report.defect_histogram[0] == 1
    assert sum(report.defect_histogram) == 127


@pytest.mark.slow
def test_descent_and_certificates_at_seven() -> None:
    descent = verify_descent(7)
    assert descent.checked == 126
    assert descent.ok
    certificates = verify_certificates(7)
    assert certificates.ok
