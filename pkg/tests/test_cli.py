"""
Tests for the command dispatcher and the click CLI
"""

import json

import pytest
from click.testing import CliRunner

from jetlaw.cli import cli
from jetlaw.commands import COMMANDS, CommandOptions, render, run
from jetlaw.core.errors import ShapeMismatch
from jetlaw.problem import parse_problem

HEAT = """\
[vars]
independent = x, t
dependent = u

[ranking]
strategy = lex
independent = t > x

[system]
u_t = u_xx

[claw mass]
F_x = -u_x
F_t = u

[claw bogus]
F_t = u^2

[multiplier]
Q1 = x
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def heat_file(tmp_path):
    path = tmp_path / "heat.clw"
    path.write_text(HEAT)
    return str(path)


class TestRun:
    """Dispatch without the CLI"""

    def test_verify_named_claw(self):
        report = run("verify-cl", parse_problem(HEAT), CommandOptions(names=["mass"]))
        assert report.result == "verified"
        assert report.exit_code == 0
        assert report.witness("mass.divergence") == "0"

    def test_conjunction_over_all_claws(self):
        report = run("verify-cl", parse_problem(HEAT))
        assert report.result == "refuted"
        assert report.exit_code == 1
        assert "bogus: ProvedNonzero" in report.messages

    def test_char_form_witness(self):
        report = run("char-form", parse_problem(HEAT), CommandOptions(names=["mass"]))
        assert report.result == "verified"
        assert report.witness("Q1") == "1"

    def test_report_carries_settings_and_digest(self, settings):
        problem = parse_problem(HEAT)
        report = run("verify-multiplier", problem, settings=settings)
        assert report.inputs_digest == problem.digest
        assert report.seed == settings.seed
        assert report.probes == settings.probes

    def test_unknown_command(self):
        with pytest.raises(ShapeMismatch):
            run("integrate", parse_problem(HEAT))

    def test_missing_section(self):
        with pytest.raises(ShapeMismatch):
            run("hodograph", parse_problem(HEAT))

    def test_render_block(self):
        report = run("reduce", parse_problem(HEAT), CommandOptions(expr_text="D_x(u_x) - u_t"))
        text = render(report)
        lines = text.splitlines()
        assert lines[0].endswith(": verified")
        assert "```jetlaw" in lines
        assert "normal_form: 0" in lines
        assert lines[-1] == "```"

    def test_every_command_has_a_subcommand(self):
        assert set(COMMANDS) <= set(cli.commands)
        assert "corpus" in cli.commands


class TestCli:
    """Exit codes and output of the click entry point"""

    def test_dx_of_expression(self, runner):
        result = runner.invoke(cli, ["dx", "--var", "t", "--expr", "u_x^2"], obj={})
        assert result.exit_code == 0
        assert "result: 2*u_x*u_xt" in result.output

    def test_reduce_first_integral(self, runner, corpus_dir):
        path = str(corpus_dir / "liouville_system.clw")
        result = runner.invoke(cli, ["reduce", path, "--expr", "D_t(lambda1)"], obj={})
        assert result.exit_code == 0
        assert "normal_form: 0" in result.output

    def test_verify_cl_file(self, runner, heat_file):
        result = runner.invoke(cli, ["--seed", "3", "verify-cl", heat_file, "mass"], obj={})
        assert result.exit_code == 0
        assert "seed: 3" in result.output

    def test_normalize_file(self, runner, heat_file):
        result = runner.invoke(cli, ["normalize", heat_file], obj={})
        assert result.exit_code == 0
        assert "equation: u_t = u_xx" in result.output

    def test_refuted_bridge(self, runner, corrupted_file):
        result = runner.invoke(cli, ["bridge", str(corrupted_file), "claw"], obj={})
        assert result.exit_code == 1
        assert "result: refuted" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["verify-cl", str(tmp_path / "absent.clw")], obj={})
        assert result.exit_code == 2
        assert "cannot read" in result.output

    def test_unknown_claw_name(self, runner, heat_file):
        result = runner.invoke(cli, ["char-form", heat_file, "nosuch"], obj={})
        assert result.exit_code == 2
        assert "ShapeMismatch" in result.output

    def test_parse_error_is_reported(self, runner, tmp_path):
        path = tmp_path / "broken.clw"
        path.write_text("[vars]\nindependent = x, t\ndependent = u\n\n[system]\nu_t = u_xx +\n")
        result = runner.invoke(cli, ["normalize", str(path)], obj={})
        assert result.exit_code == 2
        assert "line 6" in result.output

    def test_bad_ranking(self, runner, heat_file):
        result = runner.invoke(cli, ["--ranking", "revlex", "normalize", heat_file], obj={})
        assert result.exit_code == 2

    def test_needs_file_or_expression(self, runner):
        result = runner.invoke(cli, ["dx", "--var", "t"], obj={})
        assert result.exit_code == 2

    def test_invalid_config_file(self, runner, tmp_path, heat_file):
        config = tmp_path / "bad.yaml"
        config.write_text("engine:\n  probes: 0\n")
        result = runner.invoke(cli, ["-c", str(config), "normalize", heat_file], obj={})
        assert result.exit_code == 2
        assert "Configuration error" in result.output


class TestCorpusCommand:
    def test_failing_corpus(self, runner, tmp_path, corrupted_file):
        report_dir = tmp_path / "reports"
        result = runner.invoke(
            cli, ["corpus", str(corrupted_file.parent), "--report-dir", str(report_dir)], obj={}
        )
        assert result.exit_code == 1
        assert "FAIL" in result.output
        summary = json.loads((report_dir / "corpus_summary.json").read_text())
        assert summary["failed"] > 0
        assert (report_dir / "checks.jsonl").exists()

    def test_empty_directory(self, runner, tmp_path):
        result = runner.invoke(cli, ["corpus", str(tmp_path)], obj={})
        assert result.exit_code == 2

    @pytest.mark.slow
    @pytest.mark.integration
    def test_bundled_corpus_passes(self, runner):
        result = runner.invoke(cli, ["corpus"], obj={})
        assert result.exit_code == 0, result.output
        assert "result: verified" in result.output
