import pytest

from twosfgl.cli import main

TINY = """
synth.nodes = 40
synth.relations = 2
synth.intra_p = 0.4
synth.inter_p = 0.05
synth.features = 4
synth.class_sep = 1.0
federation.rounds = 2
report.window_lo = 1
report.window_hi = 2
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(TINY, encoding="utf-8")
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_gen_single_seed_writes_into_out(cfg_path, tmp_path, capsys):
    out = tmp_path / "data"
    assert run_cli("gen", "--config", cfg_path, "--out", out) == 0
    printed = capsys.readouterr().out.splitlines()
    assert [p.rsplit("/", 1)[-1] for p in printed] == \
        ["nodes.csv", "rel0.csv", "rel1.csv"]
    for name in ("nodes.csv", "rel0.csv", "rel1.csv"):
        assert (out / name).is_file()


def test_gen_multiple_seeds_use_subdirectories(cfg_path, tmp_path):
    cfg = tmp_path / "multi.cfg"
    cfg.write_text(TINY + "seeds = 0, 1\n", encoding="utf-8")
    out = tmp_path / "data"
    assert run_cli("gen", "--config", cfg, "--out", out) == 0
    assert (out / "seed0" / "nodes.csv").is_file()
    assert (out / "seed1" / "rel1.csv").is_file()


def test_gen_requires_synth_keys(tmp_path, capsys):
    (tmp_path / "n.csv").write_text("0,0,1.0\n1,1,2.0\n")
    (tmp_path / "r.csv").write_text("0,1\n")
    cfg = tmp_path / "data.cfg"
    cfg.write_text("data.nodes = n.csv\ndata.relation.r = r.csv\n")
    assert run_cli("gen", "--config", cfg) == 1
    assert "twosfgl gen: error:" in capsys.readouterr().err


def test_fuse_dumps_fused_graphs_and_shares(cfg_path, tmp_path, capsys):
    out = tmp_path / "fused"
    assert run_cli("fuse", "--config", cfg_path, "--out", out) == 0
    printed = capsys.readouterr().out.splitlines()
    assert [p.rsplit("/", 1)[-1] for p in printed] == \
        ["fused_rel0.csv", "fused_rel1.csv"]
    names = {p.name for p in out.iterdir() if p.is_file()}
    assert {"fused_rel0.csv", "fused_rel1.csv",
            "shares_rel0_rel1.csv", "shares_rel1_rel0.csv"} <= names


def test_run_full_pipeline_prints_table(cfg_path, tmp_path, capsys):
    out = tmp_path / "runs"
    assert run_cli("run", "--config", cfg_path, "--out", out) == 0
    stdout = capsys.readouterr().out
    assert "arch=gcn" in stdout and "2sfgl" in stdout
    assert (out / "summary.csv").is_file()
    assert (out / "table.txt").is_file()
    assert (out / "history_2sfgl_0.csv").is_file()


def test_train_skips_fusion_and_fused_arm(cfg_path, tmp_path, capsys):
    out = tmp_path / "runs"
    assert run_cli("train", "--config", cfg_path, "--out", out) == 0
    stdout = capsys.readouterr().out
    assert "fedavg_only" in stdout and "2sfgl" not in stdout
    assert not list(out.glob("fusion_seed*"))
    assert not list(out.glob("history_2sfgl_*"))


def test_train_with_only_fused_arm_fails(tmp_path, capsys):
    cfg = tmp_path / "only.cfg"
    cfg.write_text(TINY + "arms = 2sfgl\n", encoding="utf-8")
    assert run_cli("train", "--config", cfg) == 1
    assert "twosfgl train: error:" in capsys.readouterr().err


def test_report_recomputes_from_histories(cfg_path, tmp_path, capsys):
    out = tmp_path / "runs"
    assert run_cli("run", "--config", cfg_path, "--out", out) == 0
    table_before = (out / "table.txt").read_bytes()
    (out / "summary.csv").unlink()
    (out / "table.txt").unlink()
    capsys.readouterr()
    assert run_cli("report", "--config", cfg_path, "--out", out) == 0
    assert (out / "table.txt").read_bytes() == table_before
    assert "arch=gcn" in capsys.readouterr().out


def test_seed_and_arch_overrides(cfg_path, tmp_path, capsys):
    out = tmp_path / "runs"
    assert run_cli("run", "--config", cfg_path, "--out", out,
                   "--seed", 7, "--arch", "sage") == 0
    stdout = capsys.readouterr().out
    assert "arch=sage" in stdout and "seeds=7" in stdout
    assert (out / "history_2sfgl_7.csv").is_file()
    assert not (out / "history_2sfgl_0.csv").exists()


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("synth.nodes = 40\nwho = knows\n", encoding="utf-8")
    assert run_cli("run", "--config", bad) == 1
    err = capsys.readouterr().err
    assert "twosfgl run: error:" in err and "unknown key" in err
    assert run_cli("run", "--config", tmp_path / "ghost.cfg") == 1
    assert "cannot read config" in capsys.readouterr().err


def test_cli_requires_subcommand_and_config(capsys):
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["run"])
    capsys.readouterr()
