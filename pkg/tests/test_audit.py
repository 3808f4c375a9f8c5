"""Tests for the closed-form vs. oracle audit."""

import math

import pytest
from pydantic import ValidationError

from csqs_lab.core.audit import (
    AuditCheck,
    AuditLattice,
    AuditReport,
    _loss_negativity_check,
    run_audit,
)
from csqs_lab.core.config import ConfigManager, set_config_manager
from csqs_lab.core.config_models import LatticeConfig, OracleConfig, Tolerances
from csqs_lab.core.exceptions import ComparisonFailure


@pytest.fixture
def small_lattice():
    return AuditLattice(
        alphas=(0.5, 1.2 + 0.3j),
        t_values=(1.0, 0.0, -0.6),
        gammas=(0j, 0.4 - 0.2j),
        kappa_ts=(0.3,),
        zetas=(0j, 0.5 + 0.5j),
        max_moment_order=3,
        wln_grid_points=101,
    )


@pytest.fixture
def small_report(small_lattice):
    return run_audit(small_lattice)


class TestLattice:
    def test_degenerate_states_skipped(self):
        lattice = AuditLattice(alphas=(0j, 1.0), t_values=(1.0, 0.0))
        states = lattice.states()
        assert len(states) == 3
        assert all(not (s.alpha == 0 and s.t == 1.0) for s in states)

    def test_as_dict_is_plain(self, small_lattice):
        data = small_lattice.as_dict()
        assert data["kappa_ts"] == [0.3]
        assert data["alphas"][1] == 1.2 + 0.3j

    def test_default_matches_config(self):
        assert AuditLattice.from_config(LatticeConfig()) == AuditLattice()

    def test_from_config_parses_points(self):
        cfg = LatticeConfig(alphas=[0.5, "1+0.5j", [-0.2, 0.3]], kappa_ts=[0.2], max_moment_order=2)
        lattice = AuditLattice.from_config(cfg)
        assert lattice.alphas == (0.5 + 0j, 1 + 0.5j, -0.2 + 0.3j)
        assert lattice.kappa_ts == (0.2,)
        assert lattice.max_moment_order == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t_values": [1.5]},
            {"kappa_ts": [-0.1]},
            {"alphas": []},
            {"wln_grid_points": 100},
            {"max_moment_order": -1},
            {"gammas": [[1.0, 2.0, 3.0]]},
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValidationError):
            LatticeConfig(**kwargs)

    def test_run_audit_reads_configured_lattice(self, monkeypatch):
        captured = {}

        def fake_states(self, tol=None):
            captured["lattice"] = self
            return []

        monkeypatch.setattr(AuditLattice, "states", fake_states)
        monkeypatch.setattr("csqs_lab.core.audit._profile_check", lambda *a, **k: AuditCheck(name="p"))
        monkeypatch.setattr("csqs_lab.core.audit._loss_negativity_check", lambda *a, **k: AuditCheck(name="l"))
        set_config_manager(
            ConfigManager(use_environment=False, overrides={"lattice": {"alphas": [0.7], "max_moment_order": 1}})
        )
        report = run_audit()
        assert captured["lattice"].alphas == (0.7 + 0j,)
        assert report.lattice["max_moment_order"] == 1


class TestRunAudit:
    def test_primary_checks_pass(self, small_report):
        assert small_report.passed
        assert small_report.failures() == []
        small_report.raise_for_failures()

    def test_check_names(self, small_report):
        names = [check.name for check in small_report.checks]
        assert names == [
            "wigner",
            "moments",
            "linear_entropy",
            "skew",
            "covariance",
            "delta_NG",
            "loss",
            "linear_entropy_printed",
            "wln_printed",
            "wln_profile",
            "delta_ng_profile",
            "loss_negativity",
        ]

    def test_counts(self, small_report):
        checks = {check.name: check for check in small_report.checks}
        assert checks["wigner"].count == 6 * 2
        assert checks["moments"].count == 6 * 10
        assert checks["loss"].count == 6 * 2

    def test_printed_linear_entropy_flagged(self, small_report):
        check = next(c for c in small_report.checks if c.name == "linear_entropy_printed")
        assert check.informational
        assert check.failed
        assert check.max_delta > check.tolerance

    def test_profile_has_no_interior_minimum(self, small_report):
        check = next(c for c in small_report.checks if c.name == "delta_ng_profile")
        assert check.informational
        assert check.failed
        assert "no interior minimum" in check.notes

    def test_wln_profile_reported(self, small_report):
        check = next(c for c in small_report.checks if c.name == "wln_profile")
        assert check.informational
        assert check.count == 30
        assert check.notes.startswith("WLN ")

    def test_loss_negativity_survives(self):
        lattice = AuditLattice(kappa_ts=(0.5, 0.1, 0.3), wln_grid_points=401)
        check = _loss_negativity_check(lattice, Tolerances())
        assert check.informational
        assert check.failed
        assert check.count == 3
        assert check.max_delta == pytest.approx(0.0026993, abs=1e-5)
        assert check.notes.index("κt=0.1") < check.notes.index("κt=0.3") < check.notes.index("κt=0.5")

    def test_loss_negativity_before_onset(self):
        check = _loss_negativity_check(AuditLattice(kappa_ts=(0.1,), wln_grid_points=401), Tolerances())
        assert not check.failed
        assert check.max_delta is None

    def test_tight_tolerance_fails(self, small_lattice):
        report = run_audit(small_lattice, oracle_cfg=OracleConfig(wigner=1e-300, moments=1e-300))
        assert not report.passed
        assert {check.name for check in report.failures()} >= {"wigner"}
        with pytest.raises(ComparisonFailure) as excinfo:
            report.raise_for_failures()
        assert excinfo.value.exit_code == 4

    def test_report_serializes(self, small_report):
        data = small_report.model_dump()
        assert data["tolerances"]["oracle"]["wigner_headroom"] == 16
        assert all(math.isfinite(c["max_delta"]) for c in data["checks"] if c["max_delta"] is not None)


class TestAuditReport:
    def test_failures_ignore_informational(self):
        report = AuditReport(
            passed=False,
            checks=[
                AuditCheck(name="wigner", tolerance=1e-8, max_delta=1e-6, failed=True),
                AuditCheck(name="wln_printed", informational=True, failed=True),
            ],
            lattice={},
            tolerances={},
        )
        assert [check.name for check in report.failures()] == ["wigner"]
        with pytest.raises(ComparisonFailure) as excinfo:
            report.raise_for_failures()
        assert excinfo.value.details == {"wigner": 1e-6}


@pytest.mark.slow
def test_default_lattice_passes():
    assert run_audit().passed
