import pytest

from semireach.cli import load_config_file, main


class TestConfigFile:
    def test_parse(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# convergence sweep\n"
            "problem=dahlquist\n"
            "x0=5\n"
            "T=2.0   # final time\n"
            "h=0.5,0.25\n"
            "scheme=split\n"
            "rho-rule=h2\n"
        )
        vals = load_config_file(str(cfg))
        assert vals["problem"] == "dahlquist"
        assert vals["T"] == "2.0"
        assert vals["h"] == "0.5,0.25"

    def test_malformed_line(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("problem dahlquist\n")
        with pytest.raises(ValueError, match=":1:"):
            load_config_file(str(cfg))


class TestCommands:
    def test_reach(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["reach", "--problem", "dahlquist", "--x0", "5", "--T", "1",
                   "--h", "0.5", "--scheme", "split", "--out", str(out)])
        assert rc == 0
        assert (out / "reach_split_h0.5" / "tube_0.csv").exists()
        assert (out / "reach_split_h0.5" / "manifest.txt").exists()
        assert "final cells" in capsys.readouterr().out

    def test_convergence(self, tmp_path, capsys):
        out = tmp_path / "conv"
        rc = main(["convergence", "--problem", "dahlquist", "--x0", "5",
                   "--T", "1", "--h", "0.5", "--h", "0.25",
                   "--scheme", "split", "--out", str(out)])
        assert rc == 0
        assert (out / "report.csv").exists()
        text = capsys.readouterr().out
        assert "slope split" in text

    def test_attractor(self, tmp_path, capsys):
        out = tmp_path / "att"
        rc = main(["attractor", "--problem", "dahlquist", "--x0", "3",
                   "--h", "0.25", "--scheme", "split", "--rho-rule", "const:0.01",
                   "--max-steps", "300", "--out", str(out)])
        assert rc == 0
        assert (out / "attractor.csv").exists()
        assert "converged" in capsys.readouterr().out

    def test_cost(self, tmp_path, capsys):
        rc = main(["cost", "--problem", "dahlquist", "--x0", "5", "--h", "0.5",
                   "--state-size", "100", "--out", str(tmp_path)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "predicted" in text and "ratio" in text
        assert "measured" in text
        cost = (tmp_path / "cost.csv").read_text().strip().split("\n")
        assert cost[0].startswith("state_size,image_vol,pred_par")
        assert len(cost) == 2

    def test_affine_problem_via_config(self, tmp_path):
        cfg = tmp_path / "affine.cfg"
        cfg.write_text(
            "problem=affine\n"
            "x0=0,0\n"
            "T=0.5\n"
            "h=0.25\n"
            "scheme=split\n"
            "lam=-1\n"
            "a-matrix=1,0;0,2\n"
            "u-lower=-1,-1\n"
            "u-upper=1,1\n"
            "rho-rule=const:0.05\n"
        )
        out = tmp_path / "aff"
        rc = main(["reach", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        assert (out / "reach_split_h0.25" / "tube_2.csv").exists()

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("problem=dahlquist\nx0=5\nT=1\nh=0.5\nscheme=split\n")
        out = tmp_path / "o"
        rc = main(["reach", "--config", str(cfg), "--h", "0.25", "--out", str(out)])
        assert rc == 0
        # flag overrides the file: h = 0.25 -> 4 steps -> tube_4.csv exists
        assert (out / "reach_split_h0.25" / "tube_4.csv").exists()
        assert not (out / "reach_split_h0.5").exists()

    def test_requires_subcommand(self, capsys):
        with pytest.raises(SystemExit):
            main([])
