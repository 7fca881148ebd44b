"""Command-line client: argument handling, config files, end-to-end pipelines."""

import os

import pytest

from specrisk.cli import _build_parser, _parse_config_file, main
from specrisk.experiment import read_trajectories


def _run_args(tmp_path, out_name="results", **extra):
    args = [
        "run", "--synthetic", "gauss2", "--synthetic-n", "80", "--trials", "1",
        "--epochs", "2", "--methods", "off", "--out", str(tmp_path / out_name),
    ]
    for key, value in extra.items():
        args += [f"--{key.replace('_', '-')}", str(value)]
    return args


def test_run_writes_the_csv_set_and_reports_it(tmp_path, capsys):
    assert main(_run_args(tmp_path)) == 0
    out = capsys.readouterr().out
    traj = tmp_path / "results" / "trajectories.csv"
    assert f"wrote {traj} (12 rows)" in out
    assert (tmp_path / "results" / "summary.csv").exists()
    assert (tmp_path / "results" / "runlog.txt").exists()
    assert len(read_trajectories(traj)) == 12  # 1 trial * 3 epochs * 2 splits * 2 metrics


def test_repeated_runs_are_byte_identical(tmp_path):
    assert main(_run_args(tmp_path, out_name="a")) == 0
    assert main(_run_args(tmp_path, out_name="b")) == 0
    a = (tmp_path / "a" / "trajectories.csv").read_bytes()
    assert a == (tmp_path / "b" / "trajectories.csv").read_bytes()
    assert a


def test_summarize_stdout_matches_the_run_summary_bytes(tmp_path, capsys):
    assert main(_run_args(tmp_path)) == 0
    capsys.readouterr()
    traj = str(tmp_path / "results" / "trajectories.csv")
    assert main(["summarize", "--in", traj]) == 0
    stdout = capsys.readouterr().out
    assert stdout == (tmp_path / "results" / "summary.csv").read_text(encoding="utf-8")

    out_file = tmp_path / "again.csv"
    assert main(["summarize", "--in", traj, "--out", str(out_file)]) == 0
    assert out_file.read_text(encoding="utf-8") == stdout


def test_config_file_supplies_defaults_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "# benchmark settings\n"
        "synthetic = gauss2\n"
        "synthetic-n = 80\n"
        "trials = 1\n"
        "epochs = 2\n"
        "methods = off\n"
        f"out = {tmp_path / 'from_file'}\n",
        encoding="utf-8",
    )
    assert main(["run", "--config", str(cfg)]) == 0
    assert "(12 rows)" in capsys.readouterr().out

    assert main(["run", "--config", str(cfg), "--epochs", "0",
                 "--out", str(tmp_path / "override")]) == 0
    assert "(4 rows)" in capsys.readouterr().out  # flag beat the file value


def test_config_file_parse_errors(tmp_path, capsys):
    parsed = _parse_config_file.__name__  # keep the helper import honest
    assert parsed == "_parse_config_file"
    bad = tmp_path / "bad.cfg"

    bad.write_text("turbo = yes\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "unknown option 'turbo'" in err and "line 1" in err

    bad.write_text("epochs = soon\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    assert "cannot parse 'soon'" in capsys.readouterr().err

    bad.write_text("boost = maybe\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    assert "must be true or false" in capsys.readouterr().err

    bad.write_text("no equals sign\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    assert "expected 'key = value'" in capsys.readouterr().err


def test_config_booleans_and_underscore_keys(tmp_path):
    cfg = tmp_path / "flags.cfg"
    cfg.write_text("boost = true\nboost_delta = 0.5\nsmoothing-delta = 0.25\n",
                   encoding="utf-8")
    values = _parse_config_file(str(cfg))
    assert values == {"boost": True, "boost_delta": 0.5, "smoothing_delta": 0.25}


def test_service_side_validation_errors_exit_nonzero(tmp_path, capsys):
    assert main(["run", "--trials", "1", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "data source" in err


def test_convert_then_run_from_the_converted_file(tmp_path, capsys):
    src = tmp_path / "raw.libsvm"
    lines = []
    for i in range(40):
        label = i % 2
        lines.append(f"{label} 1:{0.2 + 0.6 * label + 0.01 * (i % 5)} 2:{0.5}")
    src.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out_csv = tmp_path / "dense.csv"
    assert main(["convert", "--in", str(src), "--out", str(out_csv)]) == 0
    assert f"wrote {out_csv} (40 rows, 2 features)" in capsys.readouterr().out

    schema = tmp_path / "roles.txt"
    schema.write_text("f1 = numeric\nf2 = numeric\nlabel = label\n", encoding="utf-8")
    assert main([
        "run", "--data", str(out_csv), "--schema", str(schema), "--trials", "1",
        "--epochs", "1", "--methods", "off", "--out", str(tmp_path / "res"),
    ]) == 0
    assert os.path.exists(tmp_path / "res" / "trajectories.csv")


def test_convert_reports_missing_input(tmp_path, capsys):
    missing = tmp_path / "nope.libsvm"
    assert main(["convert", "--in", str(missing), "--out", str(tmp_path / "o.csv")]) == 1
    assert "error:" in capsys.readouterr().err


def test_unreachable_server_exits_with_a_message(tmp_path, capsys):
    code = main(["summarize", "--in", "whatever.csv", "--server", "http://127.0.0.1:1"])
    assert code == 1
    assert "cannot reach service" in capsys.readouterr().err


def test_argument_parser_rejections():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["run", "--spectrum", "zipf"])
    with pytest.raises(SystemExit):
        main(["summarize"])  # --in is required


def test_serve_subcommand_wiring_only():
    args = _build_parser().parse_args(["serve"])
    assert args.command == "serve"
    assert args.host == "127.0.0.1"
    assert args.port == 8000
    args = _build_parser().parse_args(["serve", "--host", "0.0.0.0", "--port", "9001"])
    assert (args.host, args.port) == ("0.0.0.0", 9001)
