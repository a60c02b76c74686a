import csv
import hashlib
import io
import json

import numpy as np
import pytest

from lognnet.cli import emit_csv, main, r_grid
from lognnet.mnist_io import TEST_FILES, TRAIN_FILES, Dataset, save_dataset
from lognnet.tpattern import builtin_pattern, load_pattern


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("mnist")
    rng = np.random.default_rng(0)
    for files, n in ((TRAIN_FILES, 200), (TEST_FILES, 50)):
        labels = rng.integers(0, 10, n).astype(np.uint8)
        images = rng.integers(0, 50, (n, 784))
        for k in range(10):
            images[labels == k, k * 70:(k + 1) * 70] += 200
        save_dataset(Dataset(images.clip(0, 255).astype(np.uint8), labels),
                     d / files[0], d / files[1])
    return d


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_memory_prints_bytes(capsys):
    assert main(["memory", "--shape", "784:25:10", "--algorithm", "2"]) == 0
    assert capsys.readouterr().out.strip() == "4180"


def test_memory_breakdown(capsys):
    main(["memory", "--shape", "784:100:60:10", "--breakdown"])
    rows = read_csv(capsys.readouterr().out)
    assert rows[0] == ["array", "elements", "bytes"]
    assert rows[-1] == ["total", "7455", "29820"]


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_usage_errors_exit_two():
    for argv in (["bogus"], ["memory", "--nope"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_bad_r_is_domain_error(capsys, data_dir):
    assert main(["train", "--r", "2.5", "--data-dir", str(data_dir)]) == 1
    assert "outside" in capsys.readouterr().err


def test_missing_data_is_error(capsys, tmp_path):
    assert main(["train", "--data-dir", str(tmp_path)]) == 1


def test_emit_csv_header_only(tmp_path):
    p = tmp_path / "e.csv"
    emit_csv([], ["a", "b"], p)
    assert p.read_bytes() == b"a,b\r\n"


def test_emit_csv_round_trip(tmp_path):
    rows = [(0.1, 1 / 3, 7), (1e-300, -2.5e10, 0)]
    p = tmp_path / "r.csv"
    emit_csv(rows, ["x", "y", "n"], p)
    parsed = read_csv(p.read_text())
    assert parsed[0] == ["x", "y", "n"]
    assert [(float(a), float(b), int(c)) for a, b, c in parsed[1:]] == rows


def test_emit_csv_io_error(tmp_path):
    with pytest.raises(OSError, match="cannot write"):
        emit_csv([], ["a"], tmp_path / "missing" / "x.csv")


def test_r_grid():
    assert r_grid(1.4, 2.0, 0.01)[-1] == 2.0
    assert len(r_grid(1.4, 2.0, 0.01)) == 61


def test_lyapunov_and_bifurcation(capsys, tmp_path):
    out = tmp_path / "lyap.csv"
    assert main(["lyapunov", "--r-from", "0.5", "--r-to", "2.0", "--step", "0.5",
                 "--samples", "20000", "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    assert rows[0] == ["r", "lyapunov"] and len(rows) == 5
    assert float(rows[1][1]) < 0 and abs(float(rows[-1][1]) - np.log(2)) < 0.02
    manifest = json.loads((tmp_path / "lyap.csv.manifest.json").read_text())
    assert manifest["command"] == "lyapunov"
    main(["bifurcation", "--r-from", "0.5", "--r-to", "1.0", "--step", "0.5", "--samples", "4"])
    rows = read_csv(capsys.readouterr().out)
    assert rows[0] == ["r", "x"] and len(rows) == 9


def test_pattern_export(tmp_path):
    out = tmp_path / "p3.txt"
    assert main(["pattern", "export", "--id", "3", "--out", str(out)]) == 0
    assert load_pattern(out) == builtin_pattern(3)


def digest(d):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in d.iterdir()}


def test_train_eval_sweep_bench(tmp_path, capsys, data_dir):
    before = digest(data_dir)
    model = tmp_path / "m.bin"
    hist = tmp_path / "hist.csv"
    args = ["--data-dir", str(data_dir), "--shape", "784:8:10", "--epochs", "2"]
    assert main(["train", *args, "--model", str(model), "--out", str(hist)]) == 0
    rows = read_csv(hist.read_text())
    assert rows[0] == ["epoch", "accuracy"] and len(rows) == 3
    manifest = json.loads((tmp_path / "m.bin.manifest.json").read_text())
    assert manifest["config"]["params"]["P"] == 8 and manifest["seed"] == 1

    for alg in ("1", "3"):
        assert main(["eval", "--model", str(model), "--algorithm", alg,
                     "--data-dir", str(data_dir)]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[1].split(",")[2] == out[3].split(",")[2] == rows[-1][1]

    sweep = tmp_path / "sweep.csv"
    assert main(["sweep-r", *args, "--r-grid", "1.0,1.885", "--lyapunov-samples", "1000",
                 "--out", str(sweep)]) == 0
    rows = read_csv(sweep.read_text())
    assert rows[0] == ["r", "accuracy", "lyapunov"] and len(rows) == 3

    assert main(["bench", "--data-dir", str(data_dir), "--p-grid", "5,10",
                 "--samples", "3", "--repetitions", "1"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert rows[0] == ["metric", "5", "10"] and len(rows) == 6

    assert main(["model-text", "--model", str(model)]) == 0
    assert capsys.readouterr().out.startswith("# LogNNet-784:8:10")
    assert digest(data_dir) == before
