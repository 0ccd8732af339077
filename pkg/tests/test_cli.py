from wiretap_tas.cli import main


def write_cfg(tmp_path, extra=""):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("m = 6\nk = 2\nn = 2\ntrials = 4\nlmax_sweep = 2, 6\n"
                   f"methods = stepwise_stc, random\nout = {tmp_path / 'out.csv'}\n" + extra)
    return cfg


def test_run_is_deterministic(tmp_path):
    cfg = write_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(cfg), "--seed", "7", "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_run_default_output(tmp_path):
    cfg = write_cfg(tmp_path)
    assert main(["run", "--config", str(cfg), "--trials", "1"]) == 0
    assert (tmp_path / "out.csv").exists()


def test_run_bad_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "colour = red\n")
    assert main(["run", "--config", str(cfg)]) != 0
    assert "colour" in capsys.readouterr().err


def test_run_missing_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.cfg")]) != 0


def test_single(capsys):
    assert main(["single", "--m", "4", "--k", "2", "--n", "1", "--lmax", "4",
                 "--pmax", "1", "--sigma2", "0.1"]) == 0
    out = capsys.readouterr().out.splitlines()
    steps = [line for line in out[1:] if line.split()[0].isdigit()]
    assert 1 <= len(steps) <= 4
    assert all(len(line.split()) == 5 for line in steps)


def test_single_invalid(capsys):
    assert main(["single", "--m", "4", "--lmax", "9"]) != 0


def test_selftest(capsys):
    assert main(["selftest", "--instances", "30", "--oracle-instances", "3"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_usage_error():
    assert main(["frobnicate"]) != 0
