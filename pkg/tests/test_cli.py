import csv
from pathlib import Path

import pytest

from conftest import PUBLISHED_TABLE1
from singularity_pricing.cli import (
    ConfigError,
    TABLE1_HEADER,
    TRANSFERS_HEADER,
    build_run_config,
    main,
    parse_config,
    read_table1_csv,
)
from singularity_pricing.exact import table1_grid
from singularity_pricing.model import BASELINE, round_half_away

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"


def run(*argv):
    assert main([str(a) for a in argv]) == 0


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestTable1:
    def test_default_matches_published(self, tmp_path):
        run("table1", "--out", tmp_path)
        table = rows(tmp_path / "table1.csv")
        assert table[0] == TABLE1_HEADER
        got = {(float(p), float(xi)): (float(a), float(n), float(r)) for p, xi, a, n, r in table[1:]}
        assert got == PUBLISHED_TABLE1

    def test_no_singularity(self, tmp_path):
        run("table1", "--p", "0", "--out", tmp_path)
        table = rows(tmp_path / "table1.csv")
        assert len(table) == 5
        assert all(r[4] == "1.0" and r[2] == r[3] for r in table[1:])

    def test_markdown_golden(self, tmp_path):
        run("table1", "--format", "markdown", "--out", tmp_path)
        assert (tmp_path / "table1.md").read_bytes() == (GOLDEN / "table1.md").read_bytes()

    def test_unrounded_round_trip(self, tmp_path):
        run("table1", "--out", tmp_path)
        parsed = read_table1_csv(tmp_path / "table1_unrounded.csv")
        assert parsed == table1_grid(BASELINE)
        shown = rows(tmp_path / "table1.csv")[1:]
        regenerated = [[f"{round_half_away(x):.1f}" for x in (r.pd_ai, r.pd_n, r.ratio)] for r in parsed]
        assert regenerated == [r[2:] for r in shown]

    def test_deterministic(self, tmp_path):
        run("table1", "--out", tmp_path / "a")
        run("table1", "--out", tmp_path / "b")
        for name in ("table1.csv", "table1_unrounded.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_divergent_marker(self, tmp_path):
        cfg = tmp_path / "large.cfg"
        cfg.write_text("eta = 9\nphi = 0.05\n")
        run("table1", "--config", cfg, "--p", "0.005", "--xi", "0.05", "--out", tmp_path)
        assert rows(tmp_path / "table1.csv")[1][2] == "divergent"
        assert read_table1_csv(tmp_path / "table1_unrounded.csv")[0].pd_ai is None


class TestVeto:
    def test_worked_example(self, tmp_path):
        run("veto", "--gamma-sweep", "2", "10", "--out", tmp_path)
        fields = dict(rows(tmp_path / "veto.csv")[1:])
        assert fields["vetoes_im"] == "true" and fields["vetoes_cm"] == "false"
        assert float(fields["v_veto"]) == pytest.approx(-15.322196363927503, rel=1e-12)
        assert 9.0 < float(fields["gamma_bar"]) <= 10.0
        assert fields["sweep_agrees"] == "true"

    def test_threshold_not_found(self, tmp_path):
        cfg = tmp_path / "v.cfg"
        cfg.write_text("q = 1\n")
        run("veto", "--config", cfg, "--gamma-threshold", "--out", tmp_path)
        assert dict(rows(tmp_path / "veto.csv")[1:])["gamma_bar"] == "not-found"


class TestTransfers:
    def test_panels(self, tmp_path):
        run("transfers", "--out", tmp_path)
        table = rows(tmp_path / "transfers.csv")
        assert table[0] == TRANSFERS_HEADER
        assert len(table) == 1 + 2 * 51
        body = {(s, float(t)): (pd, float(m)) for s, t, pd, m in table[1:]}
        assert body[("large", 0.0)] == ("divergent", pytest.approx(0.5))
        pd_base, mult = body[("baseline", 0.0)]
        assert round_half_away(float(pd_base)) == 15.0 and mult == pytest.approx(0.75)
        frontier = dict(rows(tmp_path / "transfers_frontier.csv")[1:])
        assert float(frontier["baseline"]) == 0.0
        assert 0.0 < float(frontier["large"]) < 0.5

    def test_stress(self, tmp_path):
        run("transfers", "--stress", "--tau-grid", "0.3", "--out", tmp_path)
        body = {s: float(m) for s, _, _, m in rows(tmp_path / "transfers.csv")[1:]}
        assert abs(body["large"] - 3.5) <= 0.05

    def test_tau_grid_range(self, tmp_path):
        run("transfers", "--tau-grid", "0:0.1:0.05", "--out", tmp_path)
        taus = [float(r[1]) for r in rows(tmp_path / "transfers.csv")[1:] if r[0] == "baseline"]
        assert taus == [0.0, 0.05, 0.1]


class TestMcCheck:
    def test_cells(self, tmp_path):
        run("mc-check", "--n-paths", "20000", "--workers", "2", "--seed", "11", "--out", tmp_path)
        table = rows(tmp_path / "mc_check.csv")
        assert table[0] == ["cell", "asset", "closed_form", "recursion", "mc_mean", "mc_se", "tail_bound", "pass"]
        body = {(r[0], r[1]): r for r in table[1:]}
        assert len(body) == 6
        assert all(r[7] == "true" for r in body.values())
        p0 = body[("p0", "AI")]
        assert float(p0[5]) == 0.0 and p0[2] == p0[3]
        small = body[("small_dtheta", "AI")]
        assert abs(float(small[3]) / float(small[2]) - 1) < 1e-4

    def test_deterministic(self, tmp_path):
        for d, w in (("a", "1"), ("b", "3")):
            run("mc-check", "--n-paths", "3000", "--workers", w, "--out", tmp_path / d)
        assert (tmp_path / "a" / "mc_check.csv").read_bytes() == (tmp_path / "b" / "mc_check.csv").read_bytes()


class TestFigure1:
    def fixture_args(self):
        return ["--shiller", FIXTURES / "shiller.csv", "--nasdaq", FIXTURES / "nasdaq.csv",
                "--spx", FIXTURES / "spx.csv"]

    def test_golden(self, tmp_path):
        run("figure1", *self.fixture_args(), "--out", tmp_path)
        for name in ("figure1_pd.csv", "figure1_ratio.csv"):
            assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes()
        assert rows(tmp_path / "figure1_pd.csv")[0] == ["month", "pd"]
        assert rows(tmp_path / "figure1_ratio.csv")[0] == ["month", "ratio_rebased"]

    def test_missing_rebase_month(self, tmp_path, capsys):
        code = main(["figure1", *map(str, self.fixture_args()), "--rebase-month", "2016-01", "--out", str(tmp_path)])
        assert code == 2
        assert "2016-01" in capsys.readouterr().err

    def test_malformed_row(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("month,close\n2014-01,1\n2014-02,oops\n")
        args = self.fixture_args()
        args[3] = bad
        assert main(["figure1", *map(str, args), "--out", str(tmp_path)]) == 2
        assert "bad.csv:3:" in capsys.readouterr().err


class TestConfig:
    def test_parse(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("# baseline with extinction\nxi = 0.05   # five percent\n\ngamma=5\n")
        assert parse_config(path) == {"xi": 0.05, "gamma": 5.0}

    @pytest.mark.parametrize("text,fragment", [("bogus = 1\n", "unknown key"), ("xi 0.05\n", "key = value"),
                                               ("xi = high\n", "not a number")])
    def test_errors(self, tmp_path, text, fragment):
        path = tmp_path / "c.cfg"
        path.write_text("beta = 0.96\n" + text)
        with pytest.raises(ConfigError, match=fragment) as exc:
            parse_config(path)
        assert "c.cfg:2:" in str(exc.value)

    def test_invalid_parameter_exit_code(self, tmp_path, capsys):
        path = tmp_path / "c.cfg"
        path.write_text("phi = 1.5\n")
        assert main(["table1", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert "phi" in capsys.readouterr().err

    def test_command_defaults(self):
        out = Path("o")
        assert build_run_config("veto", {}, out, "csv", None).model.gamma == 10.0
        tr = build_run_config("transfers", {}, out, "csv", None)
        assert (tr.model.p, tr.model.xi, tr.transfer.delta) == (0.005, 0.05, 0.5)
        mc = build_run_config("mc-check", {"n_paths": 10}, out, "csv", 5).mc
        assert (mc.seed, mc.n_paths) == (5, 10)
