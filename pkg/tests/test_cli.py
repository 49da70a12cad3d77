import json

import pytest

from cubicrauzy.cli import EXIT_IO, EXIT_OK, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestAutomatonCommand:
    def test_summary_line(self, capsys):
        code, out, _ = run(capsys, "automaton", "--a", "3")
        assert code == EXIT_OK
        assert "states: 15" in out
        assert "true" in out

    def test_json_mode(self, capsys):
        code, out, _ = run(capsys, "automaton", "--a", "4", "--json")
        doc = json.loads(out)
        assert doc["states"] == 15
        assert doc["matches_expected_set"] is True

    def test_dot_output(self, capsys, tmp_path):
        path = tmp_path / "aut.dot"
        code, out, _ = run(capsys, "automaton", "--a", "3", "--format", "dot",
                           "--out", str(path))
        assert code == EXIT_OK
        text = path.read_text()
        assert text.startswith("digraph")
        assert text.count("doublecircle") == 1

    def test_usage_error_small_a(self):
        with pytest.raises(SystemExit) as exc:
            main(["automaton", "--a", "1"])
        assert exc.value.code == 2


class TestRenderCommands:
    def test_render_ppm(self, capsys, tmp_path):
        path = tmp_path / "r.ppm"
        code, out, _ = run(capsys, "render", "--a", "3", "--depth", "8",
                           "--out", str(path))
        assert code == EXIT_OK
        assert path.read_bytes().startswith(b"P6\n")

    def test_render_io_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "render", "--a", "3", "--depth", "4",
                           "--out", str(tmp_path / "missing" / "r.ppm"))
        assert code == EXIT_IO
        assert "I/O error" in err

    def test_boundary_json(self, capsys):
        code, out, _ = run(capsys, "boundary", "--a", "3", "--samples", "40",
                           "--depth", "20", "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["points"] >= 40

    def test_tiling_count(self, capsys):
        code, out, _ = run(capsys, "tiling", "--a", "4", "--K", "1", "--depth", "5")
        assert code == EXIT_OK
        assert "9 translates" in out


class TestCodecCommands:
    def test_expand_one(self, capsys):
        code, out, _ = run(capsys, "expand", "--a", "3", "--t", "1", "--depth", "8")
        assert code == EXIT_OK
        assert "digits: 4,4,2,4,2,4,2,4" in out

    def test_param_zero(self, capsys):
        code, out, _ = run(capsys, "param", "--a", "3", "--t", "0")
        assert code == EXIT_OK
        assert "-1.0000000000" in out

    def test_param_requires_a3(self):
        with pytest.raises(SystemExit) as exc:
            main(["param", "--a", "2", "--t", "0.5"])
        assert exc.value.code == 2

    def test_t_range_validated(self):
        with pytest.raises(SystemExit) as exc:
            main(["expand", "--a", "3", "--t", "1.5"])
        assert exc.value.code == 2

    def test_expand_json_schema(self, capsys):
        code, out, _ = run(capsys, "expand", "--a", "4", "--t", "0.25",
                           "--depth", "6", "--json")
        doc = json.loads(out)
        assert doc["r"] == 7
        assert len(doc["digits"]) == 6
        assert len(doc["psi"]) == 6
        digit, n, m = doc["digits"][0]
        assert n == 1 and m == 0


class TestVerifyCommand:
    def test_quick_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--a", "3")
        assert code == EXIT_OK
        assert "[PASS]" in out
        assert "[FAIL]" not in out

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "verify", "--a", "4", "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["passed"] is True
        assert all(rec["passed"] for rec in doc["checks"])
        names = {rec["name"] for rec in doc["checks"]}
        assert "state-set reconstruction" in names
        assert "carry tail identities" in names
