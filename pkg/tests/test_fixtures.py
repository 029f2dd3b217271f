"""Reference-fixture consistency suite and the synthetic model family."""

import numpy as np
import pytest

from hybrid_orbit.fixtures import (
    CATALOG,
    CHECK_FIELDS,
    K1_EXCLUDED_ENTRY,
    build_synthetic,
    corrupt,
    from_catalog,
    paper_fixture,
    synthetic_from_obj,
    synthetic_to_obj,
    verify_paper,
)
from hybrid_orbit.integrator import IntegratorConfig
from hybrid_orbit.numerics import spectral_radius
from hybrid_orbit.poincare import compose_jacobians, phase_jacobians, return_map


# ------------------------------------------------------------- fixture checks


def test_stock_fixture_all_checks_pass():
    report = verify_paper()
    assert report.passed
    assert {c.name for c in report.checks} == set(CHECK_FIELDS)
    table = report.format_table()
    for name in CHECK_FIELDS:
        assert name in table


def test_corrupted_entry_fails_the_corresponding_check():
    report = verify_paper(corrupt(paper_fixture(), "K1", (0, 0)))
    failed = {c.name for c in report.failed()}
    assert failed == {"gain_reproduction_1"}
    (check,) = report.failed()
    assert "entry (1, 1)" in check.detail


@pytest.mark.parametrize(
    "field_name,index",
    [
        ("A", (0, 0)),
        ("A1", (0, 0)),
        ("A2", (1, 2)),
        ("F1", (2, 3)),
        ("F2", (0, 5)),
        ("K1", (2, 1)),
        ("K2", (4, 0)),
        ("A1d", (0, 0)),
        ("A2d", (2, 2)),
        ("Ad", (1, 1)),
        ("eigenvalues", 0),
        ("rho_A", None),
        ("rho_Ad", None),
        ("remark1_A1d", (0, 1)),
        ("remark1_A2d", (1, 0)),
        ("remark1_rho", None),
    ],
)
def test_fault_injection_flips_only_dependent_checks(field_name, index):
    report = verify_paper(corrupt(paper_fixture(), field_name, index))
    dependent = {name for name, deps in CHECK_FIELDS.items() if field_name in deps}
    failed = {c.name for c in report.failed()}
    assert failed, f"corrupting {field_name} flipped nothing"
    assert failed <= dependent, f"{failed - dependent} do not read {field_name}"


def test_fault_injection_full_red_sets():
    # for direct-transcription fields the whole dependent set goes red
    for field_name, index, expected in [
        ("A", (0, 0), {"compose_return_jacobian", "eigenvalue_reproduction", "open_loop_radius"}),
        ("Ad", (1, 1), {"designed_product"}),
        ("K2", (4, 0), {"gain_reproduction_2"}),
        ("remark1_A1d", (0, 1), {"remark1_product_radius"}),
    ]:
        report = verify_paper(corrupt(paper_fixture(), field_name, index))
        assert {c.name for c in report.failed()} == expected, field_name


def test_excluded_gain_entry_is_documented_not_checked():
    # the one inconsistent entry of the printed gain table is excluded from
    # the comparison, so corrupting it flips nothing; its measured value is
    # surfaced in the check detail instead
    report = verify_paper(corrupt(paper_fixture(), "K1", K1_EXCLUDED_ENTRY))
    assert report.passed
    (gain_check,) = [c for c in report.checks if c.name == "gain_reproduction_1"]
    assert "excluded entry (4, 3)" in gain_check.detail
    assert "-5.8548" in gain_check.detail


def test_tightened_tolerances_expose_print_precision_floor():
    report = verify_paper(tolerance_scale=0.01)
    failed = {c.name for c in report.failed()}
    assert "compose_return_jacobian" in failed


def test_fixture_loads_are_independent_copies():
    first = paper_fixture()
    first.A1[0, 0] = 99.0
    assert paper_fixture().A1[0, 0] != 99.0


def test_corrupt_rejects_unknown_field():
    with pytest.raises(ValueError):
        corrupt(paper_fixture(), "nope")


# ------------------------------------------------------------ synthetic family


def test_catalog_profiles_hit_their_radius_targets():
    targets = {"stable-2": 0.6, "stable-3": 0.6, "unstable-2": 4.0,
               "boundary-2": 1.0, "uncoupled-2": 0.6}
    for name in CATALOG:
        model = from_catalog(name)
        rho = spectral_radius(compose_jacobians(model.jacobians))
        assert rho == pytest.approx(targets[name], abs=1e-9), name


def test_build_is_deterministic():
    first = build_synthetic(3, "stable")
    second = build_synthetic(3, "stable")
    for a, b in zip(first.phases, second.phases):
        assert np.array_equal(a.drift, b.drift)
        assert np.array_equal(a.reset, b.reset)
        assert a.duration == b.duration
    for a, b in zip(first.jacobians, second.jacobians):
        assert np.array_equal(a.A, b.A)
        assert np.array_equal(a.F, b.F)


def test_build_rejects_bad_arguments():
    with pytest.raises(ValueError, match="profile"):
        build_synthetic(2, "wobbly")
    with pytest.raises(ValueError, match="two domains"):
        build_synthetic(1, "stable")
    with pytest.raises(ValueError):
        from_catalog("stable")


def test_zero_coupling_profile_has_zero_parameter_jacobians(uncoupled2, cfg_fast):
    for jac in uncoupled2.jacobians:
        assert np.array_equal(jac.F, np.zeros((2, 3)))
    fd = phase_jacobians(uncoupled2.system, uncoupled2.orbit, cfg_fast)
    for jac in fd:
        assert np.max(np.abs(jac.F)) < 1e-9


def test_engineered_orbit_is_a_return_map_fixed_point(stable3):
    cfg = IntegratorConfig(base_step=1e-3, guard_tol=1e-12)
    x_star = stable3.orbit.fixed_points[-1]
    residual = return_map(stable3.system, x_star, cfg) - x_star
    assert np.max(np.abs(residual)) < 1e-9


def test_guard_normals_not_orthogonal_to_flow(stable3):
    # transversality margin by construction: flow and normal within ~80 deg
    for i, phase in enumerate(stable3.phases):
        x_end = stable3.system.chart(i).embed(stable3.orbit.fixed_points[i])
        f_end = phase.drift @ x_end
        cosine = (phase.guard_normal @ f_end) / np.linalg.norm(f_end)
        assert cosine > np.cos(np.deg2rad(80.0))


def test_unstable_profile_open_loop_radius(unstable2):
    rho = spectral_radius(compose_jacobians(unstable2.jacobians))
    assert rho > 1.0


def test_descriptor_round_trip(stable2):
    doc = synthetic_to_obj(stable2)
    rebuilt = synthetic_from_obj(doc)
    for a, b in zip(stable2.phases, rebuilt.phases):
        assert np.array_equal(a.drift, b.drift)
        assert np.array_equal(a.guard_normal, b.guard_normal)
        assert a.guard_offset == b.guard_offset
    for a, b in zip(stable2.jacobians, rebuilt.jacobians):
        assert np.max(np.abs(a.A - b.A)) < 1e-15
        assert np.max(np.abs(a.F - b.F)) < 1e-15
    for a, b in zip(stable2.orbit.fixed_points, rebuilt.orbit.fixed_points):
        assert np.max(np.abs(a - b)) < 1e-15
