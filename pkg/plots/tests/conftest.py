"""The fixtures drive the producer package solely through its command line,
the only interface the plots package is allowed to assume."""

import subprocess
import sys

import pytest


def run_producer(args, out_dir):
    cmd = [sys.executable, "-m", "pseudomix.cli", *args, "--out", str(out_dir)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


@pytest.fixture(scope="session")
def experiment_csvs(tmp_path_factory):
    out = tmp_path_factory.mktemp("producer")
    run_producer(
        [
            "run", "--lmax", "4", "--k", "1:16", "--q", "0.15", "--f", "0.03",
            "--reps", "40", "--master-seed", "5",
        ],
        out,
    )
    run_producer(
        [
            "sweep-lmax", "--lmax", "1:4", "--k", "3", "--q", "0.15",
            "--reps", "25", "--master-seed", "5",
        ],
        out,
    )
    return out
