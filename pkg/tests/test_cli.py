import json

import pytest
from click.testing import CliRunner

from phonolex.cli import main
from phonolex.store import load_compiled

OU_QUERY_FILE = """\
display: count
root: .*([$V])([$C])#
loanwords: exclude
suffixed: include
phrases: exclude
time-limit: 2 minutes
"""

MINSET_QUERY_FILE = """\
display: word gloss
root: .*([$C]+){[ou]}([$C])#
"""


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def compiled(tmp_path, fixture_source, runner):
    source = tmp_path / "lexicon.sbx"
    source.write_text(fixture_source, encoding="utf-8")
    out = tmp_path / "lexicon.plx"
    result = runner.invoke(main, ["compile", str(source), "-o", str(out)])
    assert result.exit_code == 0, result.output
    return out


class TestCompile:
    def test_fixture_compiles(self, compiled, runner):
        assert compiled.exists()
        lexicon = load_compiled(compiled)
        assert len(lexicon) == 7

    def test_record_count_reported(self, tmp_path, fixture_source, runner):
        source = tmp_path / "lexicon.sbx"
        source.write_text(fixture_source, encoding="utf-8")
        result = runner.invoke(
            main, ["compile", str(source), "-o", str(tmp_path / "o.plx")]
        )
        assert "7 records" in result.output

    def test_duplicate_id_fails_naming_it(self, tmp_path, runner):
        source = tmp_path / "dup.sbx"
        source.write_text("\\id 1612\n\\en dog\n\\id 1612\n\\en cat\n")
        result = runner.invoke(
            main, ["compile", str(source), "-o", str(tmp_path / "o.plx")]
        )
        assert result.exit_code == 1
        assert "1612" in result.output

    def test_empty_source(self, tmp_path, runner):
        source = tmp_path / "empty.sbx"
        source.write_text("")
        out = tmp_path / "o.plx"
        result = runner.invoke(main, ["compile", str(source), "-o", str(out)])
        assert result.exit_code == 0
        assert len(load_compiled(out)) == 0

    def test_missing_source(self, tmp_path, runner):
        result = runner.invoke(
            main,
            ["compile", str(tmp_path / "nope.sbx"), "-o", str(tmp_path / "o")],
        )
        assert result.exit_code == 1


class TestQuery:
    def test_text_output(self, compiled, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text(OU_QUERY_FILE)
        result = runner.invoke(main, ["query", str(compiled), str(qfile)])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].split("|")[1].split() == ["p", "'"]
        assert lines[1].startswith("o")

    def test_latex_contains_both_minimal_groups(self, compiled, tmp_path,
                                                runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text(MINSET_QUERY_FILE)
        result = runner.invoke(
            main, ["query", str(compiled), str(qfile), "--format", "latex"]
        )
        assert result.exit_code == 0
        assert result.output.count("\\fbox{") == 2
        assert "mortar" in result.output
        assert "kitchen woodpile" in result.output
        assert "skin" not in result.output  # the kup record is excluded

    def test_json_output(self, compiled, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text(OU_QUERY_FILE)
        result = runner.invoke(
            main, ["query", str(compiled), str(qfile), "--format", "json"]
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["matched_count"] == 6
        assert payload["table"]["row_labels"] == ["o", "u"]

    def test_html_output(self, compiled, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text(OU_QUERY_FILE)
        result = runner.invoke(
            main, ["query", str(compiled), str(qfile), "--format", "html"]
        )
        assert result.exit_code == 0
        assert result.output.startswith("<table")

    def test_empty_result_exits_zero(self, compiled, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text("root: xyzzy(q)\n")
        result = runner.invoke(main, ["query", str(compiled), str(qfile)])
        assert result.exit_code == 0

    def test_syntax_error_exits_two_with_column(self, compiled, tmp_path,
                                                runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text("root: .*([$V]\n")
        result = runner.invoke(main, ["query", str(compiled), str(qfile)])
        assert result.exit_code == 2
        assert "UnbalancedDelimiter" in result.output
        assert "column" in result.output
        assert "root" in result.output

    def test_missing_lexicon_exits_one(self, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text("display: count\n")
        result = runner.invoke(
            main, ["query", str(tmp_path / "no.plx"), str(qfile)]
        )
        assert result.exit_code == 1

    def test_missing_query_file_exits_one(self, compiled, tmp_path, runner):
        result = runner.invoke(
            main, ["query", str(compiled), str(tmp_path / "no.qry")]
        )
        assert result.exit_code == 1

    def test_bad_filter_value_exits_two(self, compiled, tmp_path, runner):
        qfile = tmp_path / "q.qry"
        qfile.write_text("loanwords: only\n")
        result = runner.invoke(main, ["query", str(compiled), str(qfile)])
        assert result.exit_code == 2
