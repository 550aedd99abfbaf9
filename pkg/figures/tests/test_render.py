"""Figure rendering against CSVs produced by the simulator CLI.

The renderer only ever sees the CLI's CSV artifacts; these tests generate
small ones through the installed ``nishimori`` command and check that each
figure id produces a PNG deterministically.
"""

import hashlib
import subprocess
import sys

import pytest

from nishimori_figures import read_table
from nishimori_figures.cli import main


def run_cli(*args):
    proc = subprocess.run(
        ["nishimori", *args], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("csv")
    sweep = root / "sweep.csv"
    hist = root / "hist.csv"
    run_cli("sweep", "--kind", "brickwall", "--sizes", "2,3",
            "--t-a-grid", "0.05pi:0.25pi:5", "--p-s-grid", "0.02",
            "--shots", "200", "--seed", "3",
            "--output", str(sweep), "--hist-out", str(hist))
    chain = root / "chain.csv"
    run_cli("sweep", "--kind", "chain", "--sizes", "8,12",
            "--t-a-grid", "0.05pi:0.25pi:5", "--p-s-grid", "0",
            "--shots", "200", "--seed", "3", "--output", str(chain))
    grid = root / "grid.csv"
    run_cli("phase-diagram", "--kind", "brickwall", "--sizes", "2",
            "--t-a-grid", "0.05pi:0.25pi:8", "--p-s-grid", "0:0.14:8",
            "--shots", "150", "--seed", "3", "--output", str(grid))
    fid = root / "fid.csv"
    run_cli("fidelity", "--sizes", "2", "--shots", "20", "--output", str(fid))
    sitemap = root / "sitemap.csv"
    run_cli("fit-noise", "--size", "2", "--shots", "500",
            "--t-a-grid", "0.1:0.25pi:4", "--sitemap-out", str(sitemap))
    return root


CASES = [
    ("transition-curves", "sweep.csv", []),
    ("peak-scaling", "sweep.csv", []),
    ("magnetization-histograms", "hist.csv", []),
    ("chain-comparison", "chain.csv", []),
    ("phase-heatmap", "grid.csv", []),
    ("fidelity-decay", "fid.csv", []),
    ("observable-curves", "sitemap.csv", []),
]


@pytest.mark.parametrize("figure, csv_name, extra", CASES)
def test_each_figure_renders_png(artifacts, tmp_path, figure, csv_name, extra):
    out = tmp_path / f"{figure}.png"
    code = main([figure, "--input", str(artifacts / csv_name),
                 "--output", str(out), *extra])
    assert code == 0
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


@pytest.mark.parametrize("figure, csv_name, extra", CASES[:3])
def test_rendering_is_deterministic(artifacts, tmp_path, figure, csv_name, extra):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    for out in (a, b):
        assert main([figure, "--input", str(artifacts / csv_name),
                     "--output", str(out), *extra]) == 0
    assert hashlib.sha256(a.read_bytes()).hexdigest() == \
        hashlib.sha256(b.read_bytes()).hexdigest()


def test_rendering_does_not_modify_input(artifacts, tmp_path):
    path = artifacts / "sweep.csv"
    before = hashlib.sha256(path.read_bytes()).hexdigest()
    main(["transition-curves", "--input", str(path),
          "--output", str(tmp_path / "x.png")])
    assert hashlib.sha256(path.read_bytes()).hexdigest() == before


def test_empty_csv_is_an_error(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text("# schema=nishimori-sweep-v1\nkind,size,t_A,g,g_err\n")
    out = tmp_path / "no.png"
    code = main(["transition-curves", "--input", str(bad), "--output", str(out)])
    assert code == 1
    assert not out.exists()


def test_schema_mismatch_is_an_error(artifacts, tmp_path):
    code = main(["phase-heatmap", "--input", str(artifacts / "sweep.csv"),
                 "--output", str(tmp_path / "no.png")])
    assert code == 1


def test_missing_columns_is_an_error(tmp_path):
    bad = tmp_path / "cols.csv"
    bad.write_text("# schema=nishimori-sweep-v1\nkind,size\nchain,4\n")
    code = main(["transition-curves", "--input", str(bad),
                 "--output", str(tmp_path / "no.png")])
    assert code == 1


def test_read_table_rejects_unknown_schema(tmp_path):
    bad = tmp_path / "unk.csv"
    bad.write_text("# schema=mystery-v9\na,b\n1,2\n")
    with pytest.raises(ValueError):
        read_table(bad)


def test_statistic_flag_switches_column(artifacts, tmp_path):
    out_f = tmp_path / "f.png"
    out_g = tmp_path / "g.png"
    main(["transition-curves", "--input", str(artifacts / "sweep.csv"),
          "--output", str(out_f), "--statistic", "f"])
    main(["transition-curves", "--input", str(artifacts / "sweep.csv"),
          "--output", str(out_g), "--statistic", "g"])
    assert out_f.read_bytes() != out_g.read_bytes()
