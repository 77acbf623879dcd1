"""Tests for the hsurf command line."""

from __future__ import annotations

import json

import pytest

from hsurf import __version__
from hsurf.cli import EXIT_FAIL, EXIT_NUMERICAL, EXIT_PASS, EXIT_USAGE, build_parser, inline_surface, main
from hsurf.errors import (
    BranchPoint,
    DegenerateTriple,
    NumericalFailure,
    PathThroughPole,
    QuadratureNonConvergence,
    SchemaError,
    SingularPoint,
)

# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class TestParser:
    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_check_collects_checks(self):
        args = build_parser().parse_args(["check", "catenoid", "types", "verdicts"])
        assert args.target == "catenoid"
        assert args.which == ["types", "verdicts"]

    def test_repeatable_options(self):
        args = build_parser().parse_args(["classify", "--form", "1, i, 1/z", "--puncture", "0", "--puncture", "inf"])
        assert args.puncture == ["0", "inf"]


# ---------------------------------------------------------------------------
# Inline surfaces
# ---------------------------------------------------------------------------


class TestInlineSurface:
    def test_sphere_punctures_default_to_poles(self):
        s = inline_surface("1, i, 1/z", None, [])
        assert s.domain.is_sphere
        assert len(s.punctures) == 2

    def test_wrong_number_of_forms(self):
        with pytest.raises(ValueError, match="three"):
            inline_surface("1, i", None, [])

    def test_bad_domain(self):
        with pytest.raises(ValueError, match="w\\^2 = p\\(z\\)"):
            inline_surface("1/w, i/w, z/w", "y^2 = z^3 - z", ["inf"])

    def test_curve_needs_punctures(self):
        with pytest.raises(ValueError, match="--puncture"):
            inline_surface("1/w, i/w, z/w", "w^2 = z^3 - z", [])


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


class TestCommands:
    def test_list(self, capsys):
        assert main(["list"]) == EXIT_PASS
        out = capsys.readouterr().out
        assert "catenoid" in out
        assert "plane" in out

    def test_list_json(self, capsys):
        assert main(["list", "--json"]) == EXIT_PASS
        rows = json.loads(capsys.readouterr().out)
        ids = [r["id"] for r in rows]
        assert "catenoid" in ids
        assert next(r for r in rows if r["id"] == "cusp-k")["params"] == ["k"]

    def test_classify_fixture(self, capsys):
        assert main(["classify", "catenoid"]) == EXIT_PASS
        out = capsys.readouterr().out
        assert "genus 0" in out
        assert "total curvature" in out

    def test_classify_json(self, capsys):
        assert main(["classify", "catenoid", "--json"]) == EXIT_PASS
        data = json.loads(capsys.readouterr().out)
        assert data["degenerate"] is False
        assert data["genus"] == 0
        assert len(data["ends"]) == 2

    def test_classify_inline(self, capsys):
        code = main(["classify", "--form", "1, i, 1/z", "--puncture", "0", "--puncture", "inf", "--json"])
        assert code == EXIT_PASS
        data = json.loads(capsys.readouterr().out)
        assert sorted(e["type"] for e in data["ends"]) == ["(0,0,1)", "(1,2,2)"]

    def test_classify_degenerate_fails(self, capsys):
        assert main(["classify", "plane"]) == EXIT_FAIL
        assert "degenerate" in capsys.readouterr().out

    def test_info_fixture(self, capsys):
        assert main(["info", "cusp-k", "--param", "k=4"]) == EXIT_PASS
        out = capsys.readouterr().out
        assert out.startswith("cusp-k:")
        assert "k=4" in out

    def test_info_reports_residues(self, capsys):
        assert main(["info", "catenoid"]) == EXIT_PASS
        assert "residues real" in capsys.readouterr().out

    def test_info_flags_non_real_residues(self, capsys):
        assert main(["info", "--form", "1/z, i/z, z", "--json"]) == EXIT_PASS
        data = json.loads(capsys.readouterr().out)
        assert {r["form"] for r in data["non_real_residues"]} == {2}

    def test_check_passes(self, capsys):
        assert main(["check", "catenoid", "types"]) == EXIT_PASS
        assert "catenoid" in capsys.readouterr().out

    @pytest.mark.slow
    def test_mesh_writes_obj(self, tmp_path, capsys):
        out = tmp_path / "catenoid.obj"
        assert main(["mesh", "catenoid", "--density", "8", "--out", str(out)]) == EXIT_PASS
        assert out.exists()
        assert out.read_text().startswith("# hsurf")
        assert "wrote" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Usage errors
# ---------------------------------------------------------------------------


class TestUsageErrors:
    def test_unknown_fixture(self, capsys):
        assert main(["classify", "no-such-fixture"]) == EXIT_USAGE
        assert "hsurf:" in capsys.readouterr().err

    def test_bad_density(self, capsys):
        assert main(["classify", "catenoid", "--density", "2"]) == EXIT_USAGE
        assert "--density" in capsys.readouterr().err

    def test_bad_threads(self, capsys):
        assert main(["classify", "catenoid", "--threads", "0"]) == EXIT_USAGE
        assert "--threads" in capsys.readouterr().err

    def test_no_target(self, capsys):
        assert main(["classify"]) == EXIT_USAGE
        assert "No target" in capsys.readouterr().err

    def test_fixture_and_form(self, capsys):
        assert main(["classify", "catenoid", "--form", "1, i, 1/z"]) == EXIT_USAGE
        assert "not both" in capsys.readouterr().err

    def test_malformed_param(self, capsys):
        assert main(["info", "cusp-k", "--param", "k"]) == EXIT_USAGE
        assert "name=value" in capsys.readouterr().err

    def test_unknown_param(self, capsys):
        assert main(["info", "catenoid", "--param", "k=3"]) == EXIT_USAGE
        assert "no parameter" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Error mapping
# ---------------------------------------------------------------------------


def _raising(exc: Exception):
    def command(args):
        raise exc

    return command


class TestErrorMapping:
    @pytest.mark.parametrize(
        "exc, code",
        [
            (PathThroughPole("path crosses a pole at 0"), EXIT_FAIL),
            (DegenerateTriple("forms are dependent"), EXIT_FAIL),
            (BranchPoint("z = 1 is a branch point"), EXIT_FAIL),
            (SingularPoint("f_x × f_y vanishes"), EXIT_NUMERICAL),
            (QuadratureNonConvergence("no convergence"), EXIT_NUMERICAL),
            (SchemaError("bad entry"), EXIT_USAGE),
            (ValueError("bad value"), EXIT_USAGE),
        ],
    )
    def test_exit_codes(self, monkeypatch, capsys, exc, code):
        monkeypatch.setattr("hsurf.cli.cmd_list", _raising(exc))
        assert main(["list"]) == code
        assert str(exc) in capsys.readouterr().err

    def test_geometric_errors_named(self, monkeypatch, capsys):
        monkeypatch.setattr("hsurf.cli.cmd_list", _raising(PathThroughPole("path crosses a pole")))
        main(["list"])
        assert "PathThroughPole" in capsys.readouterr().err

    def test_singular_point_is_numerical(self):
        assert issubclass(SingularPoint, NumericalFailure)
        assert issubclass(SingularPoint, ValueError)
