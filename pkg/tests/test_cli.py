"""Configuration parsing and subcommand dispatch."""

import io as _io

import pytest

from mrtlb import cli
from mrtlb.errors import ParseError, ValidationError


@pytest.fixture(autouse=True)
def _output_root(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "out"))
    return tmp_path / "out"


class TestParse:
    def test_minimal_form(self):
        cfg = cli.parse_config("converge example1 eps=0.1")
        assert cfg.subcommand == "converge"
        assert cfg["example"] == "example1" and cfg["eps"] == 0.1
        assert cfg["s1"] == 1.0 and cfg["strategy"] == "analytic"
        assert cfg["rungs"] == cli.SCHEMA["rungs"][2]
        assert cfg.explicit == {"example", "eps"}

    def test_sections_and_overrides(self):
        text = "# comment\n[problem]\nexample = 2\n[discretization]\ndx = 0.05\n"
        cfg = cli.parse_config(text, ["dx=0.025", "scheme=flfd"], subcommand="run")
        assert cfg["example"] == "example2" and cfg["dx"] == 0.025 and cfg["scheme"] == "flfd"

    def test_range_error_becomes_validation_error(self):
        with pytest.raises(ValidationError, match="eps"):
            cli.parse_config("params eps=0.5 s5=1")

    def test_unknown_key(self):
        with pytest.raises(ParseError) as exc:
            cli.parse_config("converge example1 bogus=3")
        assert exc.value.field == "bogus"
        assert "bogus" in str(exc.value)

    def test_line_diagnostics(self):
        with pytest.raises(ParseError) as exc:
            cli.parse_config("subcommand = run\ndx = 0.1\ndt = abc\n")
        assert exc.value.line == 3 and exc.value.field == "dt"

    def test_all_violations_listed(self):
        with pytest.raises(ValidationError) as exc:
            cli.parse_config("run example=7 dx=-1 dt=nan")
        msg = str(exc.value)
        assert "example" in msg and "dx" in msg and "dt" in msg

    def test_unwritable_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(ValidationError, match="dir"):
            cli.parse_config(f"params dir={blocker}/sub")


class TestDispatch:
    def run(self, *argv):
        return cli.main(list(argv))

    def test_params_sweep_deterministic(self, _output_root):
        path = _output_root / "params" / "params_sweep.csv"
        argv = ("params", "--sweep", "eps=0.001:0.16:0.001", "--s5", "1")
        assert self.run(*argv) == 0
        a = path.read_bytes()
        assert self.run(*argv) == 0
        assert a == path.read_bytes()
        lines = a.decode().splitlines()
        assert lines[0].startswith("# config: ") and "s5=1.0" in lines[0]
        assert lines[1] == "eps,w0,w1,s2,s4"
        rows = [[float(v) for v in line.split(",")] for line in lines[2:]]
        w0 = [r[1] for r in rows]
        assert len(rows) >= 150
        assert all(a > b for a, b in zip(w0, w0[1:]))
        assert all(abs(r[3] - 1.2) < 1e-14 for r in rows)

    def test_params_print(self, capsys):
        assert self.run("params", "eps=0.15") == 0
        out = capsys.readouterr().out
        assert "s4 = 0.571428" in out

    def test_equiv_summary(self, capsys):
        assert self.run("equiv", "--example", "1", "--steps", "200") == 0
        out = capsys.readouterr().out
        assert out.startswith("max |Δφ| = ") and out.rstrip().endswith("< 1e-10")

    def test_converge_artifacts(self, _output_root, capsys):
        assert self.run("converge", "example=1", "scheme=flfd", "rungs=2", "t_final=0.2") == 0
        d = _output_root / "converge"
        assert {p.name for p in d.iterdir()} == {"convergence.csv", "convergence.svg"}
        assert "final-pair CR" in capsys.readouterr().out
        for p in d.iterdir():
            assert "scheme=flfd" in p.read_text()

    def test_run_snapshots(self, _output_root):
        assert self.run("run", "example=1", "scheme=lb", "t_final=0.3",
                        "snapshots=0.1,0.3", "formats=csv,bin") == 0
        names = sorted(p.name for p in (_output_root / "run").iterdir())
        assert names == ["field_n000001.bin", "field_n000001.csv",
                         "field_n000003.bin", "field_n000003.csv"]

    def test_scan_small(self, _output_root, capsys):
        assert self.run("stability-scan", "--box", "default", "--res", "4", "samples=200") == 0
        out = capsys.readouterr().out
        assert out.startswith("no instability found; max |λ| = 1")
        assert (_output_root / "stability-scan" / "scan.csv").exists()
        assert self.run("stability-scan", "--box", "illegal", "--res", "4", "samples=0",
                        "formats=csv") == 0
        assert "instability found at" in capsys.readouterr().out

    def test_error_exit_and_cleanup(self, _output_root, monkeypatch, capsys):
        def boom(*a, **k):
            raise cli.MRTLBError("injected")

        monkeypatch.setattr(cli.io, "loglog_svg", boom)
        assert self.run("converge", "example=1", "scheme=flfd", "rungs=2", "t_final=0.2") == 2
        assert "error: injected" in capsys.readouterr().err
        assert list((_output_root / "converge").iterdir()) == []

    def test_bad_config_exit(self, capsys):
        assert self.run("params", "nonsense=1") == 2
        assert "nonsense" in capsys.readouterr().err

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("[parameters]\neps = 0.15\n")
        assert self.run("params", "--config", str(cfg)) == 0
        assert "w0 = 0.1" in capsys.readouterr().out

    def test_dispatch_returns_status(self):
        cfg = cli.parse_config("params eps=0.1")
        buf = _io.StringIO()
        assert cli.dispatch(cfg, buf) == 0
        assert "s2 = " in buf.getvalue()
