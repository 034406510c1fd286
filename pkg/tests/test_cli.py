"""
Command-line interface: outputs and exit codes
"""
import json

import pytest

from qfps.cli import EXIT_FAILURE, EXIT_NOT_EQUAL, EXIT_OK, EXIT_USAGE, main
from qfps.engine.parser import parse
from qfps.engine.qde import parse_qde
from qfps.engine.rep import qtaylor


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCommands:
    def test_qde(self, capsys, assert_proportional):
        code, out, _ = run(capsys, "qde", "sec(z)")
        assert code == EXIT_OK
        assert_proportional(parse_qde(out.strip()), parse_qde("-y^2 - 2*y1^2 + y2*y"))

    def test_qde_with_parameter(self, capsys, assert_proportional):
        code, out, _ = run(capsys, "qde", "sec(z)^k", "--param", "k")
        assert code == EXIT_OK
        expected = parse_qde("-k^2*y^2 + (-k-1)*y1^2 + k*y2*y", ["k"])
        assert_proportional(parse_qde(out.strip(), ["k"]), expected)

    def test_qde_json(self, capsys):
        code, out, _ = run(capsys, "qde", "tan(z)", "--format", "json")
        assert code == EXIT_OK
        document = json.loads(out)
        assert document["leading_index"] == 7
        assert document["order"] == 2

    def test_qre(self, capsys):
        code, out, _ = run(capsys, "qre", "tan(z)")
        assert code == EXIT_OK
        assert "sum(" in out

    def test_fps_latex(self, capsys):
        code, out, _ = run(capsys, "fps", "tan(z)", "--format", "latex")
        assert code == EXIT_OK
        assert r"\sum" in out

    def test_fps_initial_values(self, capsys):
        code, out, _ = run(capsys, "fps", "z/(exp(z)-1)", "--initial-values", "3")
        assert code == EXIT_OK
        assert "a[1] = -1/2" in out
        assert "a[2] = 1/12" in out

    def test_taylor(self, capsys):
        code, out, _ = run(capsys, "taylor", "tan(z)", "--order", "7")
        assert code == EXIT_OK
        first = out.splitlines()[0]
        assert parse(first) == qtaylor(parse("tan(z)"), 7).as_expr()

    def test_taylor_oracle(self, capsys):
        code, out, _ = run(capsys, "taylor", "sec(z)", "--order", "6", "--oracle")
        assert code == EXIT_OK
        assert "oracle agrees" in out

    def test_delta2(self, capsys):
        assert run(capsys, "delta2", "tan(z)", "1")[1].strip() == "1"
        assert run(capsys, "delta2", "tan(z)", "2")[1].strip() == "tan(z)"

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0


class TestProve:
    def test_equal(self, capsys):
        code, out, _ = run(
            capsys, "prove", "log((1+tan(z))/(1-tan(z)))", "2*arctanh(sin(2*z)/(1+cos(2*z)))",
        )
        assert code == EXIT_OK
        assert out.splitlines()[0] == "equal"

    def test_not_equal(self, capsys):
        code, out, _ = run(capsys, "prove", "tan(z)", "sin(z)")
        assert code == EXIT_NOT_EQUAL
        assert out.splitlines()[0] == "not-equal"
        assert "1/3 vs -1/6" in out


class TestExitCodes:
    @pytest.mark.parametrize("argv", [[], ["taylor", "tan(z)"], ["qde"], ["delta2", "tan(z)", "0"]])
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["qde", "tan(z"],
        ["qde", "bessel(z)"],
        ["fps", "sec(z)^k"],
        ["qde", "z^(1/2)"],
    ])
    def test_bad_expressions(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_USAGE
        assert "error" in err

    def test_search_bound(self, capsys):
        code, out, err = run(capsys, "qde", "tan(z)", "--max-index", "4")
        assert code == EXIT_FAILURE
        assert not out

    def test_series_failure(self, capsys):
        code, _, _ = run(capsys, "taylor", "log(z)", "--order", "3")
        assert code == EXIT_FAILURE
