"""
Exact output bytes against the files under tests/golden
"""
from pathlib import Path

import pytest

from qfps.cli import main
from qfps.engine.parser import parse
from qfps.engine.printer import print_expr

GOLDEN = Path(__file__).parent / "golden"

CLI_CASES = {
    "delta2_tan_3": ["delta2", "tan(z)", "3"],
    "delta2_tan_4": ["delta2", "tan(z)", "4"],
    "delta2_tan_5": ["delta2", "tan(z)", "5"],
    "delta2_tan_6": ["delta2", "tan(z)", "6"],
    "delta2_tan_negated_sum": ["delta2", "tan(-(z+z^2))", "2"],
    "taylor_sec_6": ["taylor", "sec(z)", "--order", "6"],
    "taylor_sec_6_oracle": ["taylor", "sec(z)", "--order", "6", "--oracle"],
    "taylor_tan_7": ["taylor", "tan(z)", "--order", "7"],
    "prove_tan_sin": ["prove", "tan(z)", "sin(z)"],
}


def read_golden(name: str) -> str:
    return (GOLDEN / name).read_bytes().decode("utf-8")


def test_every_cli_golden_file_is_exercised():
    assert {p.stem for p in (GOLDEN / "cli").glob("*.txt")} == set(CLI_CASES)


@pytest.mark.parametrize("name", sorted(CLI_CASES))
def test_cli_output(name, capsys):
    main(CLI_CASES[name])
    out, _ = capsys.readouterr()
    assert out == read_golden(f"cli/{name}.txt")


def test_corpus_printed(corpus):
    lines = [
        f"{entry.name}: {print_expr(parse(entry.expr, entry.params))}\n"
        for entry in corpus.entries()
    ]
    assert "".join(lines) == read_golden("corpus_printed.txt")
