"""Figure rendering from benchmark summary CSVs."""

import pytest

from plots import build_figure, main, read_summary

HEADER = "method,epoch,split,metric,mean,std"


def _golden_lines():
    lines = [HEADER]
    for method, offset in (("fast", 0.0), ("off", 0.05)):
        for epoch in range(4):
            for split in ("train", "test"):
                for metric, base in (("spectral_risk", 1.0), ("misclass", 0.5)):
                    mean = base / (epoch + 1) + offset
                    std = 0.01 * (1 + epoch)
                    lines.append(f"{method},{epoch},{split},{metric},{mean},{std}")
    return lines


@pytest.fixture
def results_dir(tmp_path):
    out = tmp_path / "results"
    out.mkdir()
    (out / "summary.csv").write_text("\n".join(_golden_lines()) + "\n",
                                     encoding="utf-8")
    return out


def test_render_writes_a_figure_file(results_dir, tmp_path, capsys):
    fig_path = tmp_path / "curves.png"
    assert main(["--in", str(results_dir), "--out", str(fig_path)]) == 0
    assert f"wrote {fig_path}" in capsys.readouterr().out
    data = fig_path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


def test_input_may_be_the_csv_file_itself(results_dir, tmp_path):
    fig_path = tmp_path / "direct.png"
    code = main(["--in", str(results_dir / "summary.csv"), "--out", str(fig_path),
                 "--metric", "misclass"])
    assert code == 0
    assert fig_path.exists()


def test_train_curves_dashed_test_curves_solid_with_bands(results_dir):
    rows = read_summary(results_dir / "summary.csv")
    fig, ax = build_figure(rows, "spectral_risk")
    styles = {line.get_label(): line.get_linestyle() for line in ax.lines}
    assert styles == {
        "fast train": "--",
        "fast test": "-",
        "off train": "--",
        "off test": "-",
    }
    # one +/- std band per method, attached to the test curves only
    assert len(ax.collections) == 2
    assert ax.get_xlabel() == "epoch"
    assert ax.get_ylabel() == "spectral_risk"
    line = next(l for l in ax.lines if l.get_label() == "fast test")
    assert list(line.get_xdata()) == [0, 1, 2, 3]
    assert list(line.get_ydata()) == [1.0, 0.5, 1.0 / 3.0, 0.25]


def test_missing_metric_reports_what_the_file_contains(results_dir):
    rows = [r for r in read_summary(results_dir / "summary.csv")
            if r["metric"] == "spectral_risk"]
    with pytest.raises(ValueError, match=r"misclass.*spectral_risk"):
        build_figure(rows, "misclass")


def test_schema_errors_name_the_columns(tmp_path):
    bad = tmp_path / "summary.csv"

    bad.write_text("method,epoch,split,metric,mean\nfast,0,train,m,1.0\n",
                   encoding="utf-8")
    with pytest.raises(ValueError, match=r"missing column\(s\) \['std'\]"):
        read_summary(bad)

    bad.write_text(HEADER + ",bonus\nfast,0,train,m,1.0,0.0,7\n", encoding="utf-8")
    with pytest.raises(ValueError, match=r"unexpected column\(s\) \['bonus'\]"):
        read_summary(bad)

    bad.write_text(HEADER + "\nfast,0,train,m,1.0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2: expected 6 fields"):
        read_summary(bad)

    bad.write_text(HEADER + "\nfast,zero,train,m,1.0,0.0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2: cannot parse numeric"):
        read_summary(bad)

    bad.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="is empty"):
        read_summary(bad)

    bad.write_text(HEADER + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no data rows"):
        read_summary(bad)


def test_column_order_does_not_matter(tmp_path):
    shuffled = tmp_path / "summary.csv"
    shuffled.write_text(
        "std,mean,metric,split,epoch,method\n0.1,2.0,spectral_risk,test,0,off\n",
        encoding="utf-8",
    )
    rows = read_summary(shuffled)
    assert rows == [{"method": "off", "epoch": 0, "split": "test",
                     "metric": "spectral_risk", "mean": 2.0, "std": 0.1}]


def test_missing_inputs_exit_nonzero(tmp_path, capsys):
    assert main(["--in", str(tmp_path / "nowhere"), "--out",
                 str(tmp_path / "o.png")]) == 1
    assert "no such file" in capsys.readouterr().err

    bad_dir = tmp_path / "results"
    bad_dir.mkdir()
    (bad_dir / "summary.csv").write_text("method,epoch\n", encoding="utf-8")
    assert main(["--in", str(bad_dir), "--out", str(tmp_path / "o.png")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and "missing column" in err


def test_unknown_metric_is_rejected_by_the_parser(results_dir, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["--in", str(results_dir), "--out", str(tmp_path / "o.png"),
              "--metric", "loss"])
    assert exc.value.code == 2
