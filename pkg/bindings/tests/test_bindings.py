import subprocess
import sys
from contextlib import contextmanager

import numpy as np
import pytest

import volio
import maskmetrics
from maskmetrics_bindings import write_metrics, __version__


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE  {name}: FAIL")
        raise
    print(f"ACCEPTANCE  {name}: PASS")


def _write_fixture(path, rng, shape=(6, 6, 6), labels=2):
    arr = rng.integers(0, labels + 1, size=shape).astype(np.uint8)
    if str(path).endswith((".mhd", ".mha")):
        return volio.write_metaimage(path, arr, (1, 1, 1))
    return volio.write_nifti(path, arr, (1, 1, 1))


@pytest.fixture
def pair_dirs(tmp_path):
    rng = np.random.default_rng(11)
    gdth_dir = tmp_path / "gdth"
    pred_dir = tmp_path / "pred"
    gdth_dir.mkdir()
    pred_dir.mkdir()
    for i in range(3):
        name = f"case{i}.mha"
        _write_fixture(gdth_dir / name, rng)
        _write_fixture(pred_dir / name, rng)
    return gdth_dir, pred_dir


def _run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "maskmetrics.cli", *args],
        capture_output=True, text=True,
    )


# ---------------------------------------------------------------------------
# call shapes
# ---------------------------------------------------------------------------

def test_folder_batch_call_shape(pair_dirs, tmp_path):
    gdth_dir, pred_dir = pair_dirs
    rows = write_metrics(labels=[1, 2], gdth_path=gdth_dir, pred_path=pred_dir,
                         csv_file=tmp_path / "metrics.csv")
    assert len(rows) == 6
    assert all(isinstance(row, dict) for row in rows)
    assert (tmp_path / "metrics.csv").exists()


def test_single_pair_call_shape(tmp_path):
    rng = np.random.default_rng(12)
    g = _write_fixture(tmp_path / "gdth.mhd", rng)
    p = _write_fixture(tmp_path / "pred.mhd", rng)
    rows = write_metrics(labels=[1, 2], gdth_path=g, pred_path=p,
                         csv_file=tmp_path / "metrics.csv")
    assert [row["label"] for row in rows] == [1, 2]


def test_metric_subset_and_single_string(tmp_path):
    rng = np.random.default_rng(13)
    g = _write_fixture(tmp_path / "gdth.mhd", rng)
    p = _write_fixture(tmp_path / "pred.mhd", rng)
    subset = write_metrics(labels=[1], gdth_path=g, pred_path=p,
                           metrics=["dice", "hd"])
    assert set(subset[0]) == {"filename", "label", "dice", "hd"}
    single = write_metrics(labels=[1], gdth_path=g, pred_path=p, metrics="msd")
    assert set(single[0]) == {"filename", "label", "msd"}


def test_in_memory_arrays_three_distance_metrics(tmp_path):
    rng = np.random.default_rng(14)
    gdth = rng.integers(0, 2, size=(8, 8, 8)).astype(np.uint8)
    pred = rng.integers(0, 2, size=(8, 8, 8)).astype(np.uint8)
    rows = write_metrics(labels=[1], gdth_img=gdth, pred_img=pred,
                         spacing=(1.0, 0.8, 1.2), metrics=["hd", "hd95", "msd"])
    assert set(rows[0]) == {"filename", "label", "hd", "hd95", "msd"}
    assert rows[0]["filename"] == "<memory>"


def test_identical_arrays_score_perfectly():
    arr = np.zeros((6, 6, 6), dtype=np.uint8)
    arr[2:5, 2:5, 2:5] = 1
    rows = write_metrics(labels=[1], gdth_img=arr, pred_img=arr)
    assert rows[0]["dice"] == 1.0
    assert rows[0]["hd"] == 0.0


def test_paths_and_arrays_are_mutually_exclusive(tmp_path):
    arr = np.ones((2, 2, 2), dtype=np.uint8)
    with pytest.raises(ValueError):
        write_metrics(labels=[1], gdth_path="x.mhd", pred_path="y.mhd",
                      gdth_img=arr, pred_img=arr)
    with pytest.raises(ValueError):
        write_metrics(labels=[1])


def test_counts_included_when_requested():
    arr = np.zeros((4, 4, 4), dtype=np.uint8)
    arr[1:3, 1:3, 1:3] = 1
    rows = write_metrics(labels=[1], gdth_img=arr, pred_img=arr,
                         metrics=["dice"], TPTNFPFN=True)
    row = rows[0]
    assert row["tp"] == 8 and row["fn"] == 0 and row["fp"] == 0
    assert row["tn"] == 64 - 8


def test_errors_carry_core_messages():
    arr = np.ones((2, 2, 2), dtype=np.uint8)
    with pytest.raises(maskmetrics.UnknownMetric, match="unknown metric: dsc"):
        write_metrics(labels=[1], gdth_img=arr, pred_img=arr, metrics=["dsc"])


def test_version_matches_core():
    assert __version__ == maskmetrics.__version__


# ---------------------------------------------------------------------------
# acceptance: parity with the CLI over 50 random fixtures
# ---------------------------------------------------------------------------

def test_parity_with_cli_50_fixtures(tmp_path):
    with criterion("bindings equal CLI CSV on 50 random fixtures"):
        rng = np.random.default_rng(15)
        gdth_dir = tmp_path / "gdth"
        pred_dir = tmp_path / "pred"
        gdth_dir.mkdir()
        pred_dir.mkdir()
        suffixes = [".mhd", ".mha", ".nii", ".nii.gz"]
        for i in range(50):
            name = f"fixture{i:02d}{suffixes[i % 4]}"
            shape = tuple(int(n) for n in rng.integers(4, 9, size=3))
            _write_fixture(gdth_dir / name, rng, shape=shape, labels=2)
            _write_fixture(pred_dir / name, rng, shape=shape, labels=2)

        cli_csv = tmp_path / "cli.csv"
        proc = _run_cli(["--gdth", str(gdth_dir), "--pred", str(pred_dir),
                         "--labels", "1,2", "--csv", str(cli_csv)])
        assert proc.returncode == 0, proc.stderr

        bindings_csv = tmp_path / "bindings.csv"
        rows = write_metrics(labels=[1, 2], gdth_path=gdth_dir, pred_path=pred_dir,
                             csv_file=bindings_csv)
        assert len(rows) == 100
        assert bindings_csv.read_bytes() == cli_csv.read_bytes()


def test_all_call_shapes_execute(tmp_path):
    with criterion("all documented call shapes execute"):
        rng = np.random.default_rng(16)
        gdth_dir = tmp_path / "gdth"
        pred_dir = tmp_path / "pred"
        gdth_dir.mkdir()
        pred_dir.mkdir()
        _write_fixture(gdth_dir / "a.mha", rng)
        _write_fixture(pred_dir / "a.mha", rng)
        g = _write_fixture(tmp_path / "gdth.mhd", rng)
        p = _write_fixture(tmp_path / "pred.mhd", rng)

        batch = write_metrics(labels=[1, 2], gdth_path=gdth_dir, pred_path=pred_dir,
                              csv_file=tmp_path / "m1.csv")
        single = write_metrics(labels=[1, 2], gdth_path=g, pred_path=p,
                               csv_file=tmp_path / "m2.csv")
        subset = write_metrics(labels=[1], gdth_path=g, pred_path=p,
                               csv_file=tmp_path / "m3.csv", metrics=["dice", "hd"])
        lone = write_metrics(labels=[1], gdth_path=g, pred_path=p,
                             csv_file=tmp_path / "m4.csv", metrics="msd")
        for result in (batch, single, subset, lone):
            assert isinstance(result, list) and all(isinstance(r, dict) for r in result)
