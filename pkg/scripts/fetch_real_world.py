#!/usr/bin/env python3
"""Fetch real-world graphs by collection ID and run the estimator on them.

Downloads Matrix Market files from the SuiteSparse Matrix Collection by
numeric ID, caches them under ``--dest``, then runs the full pipeline on
each graph: preprocess, seeded right-hand side, a few Gauss-Seidel
iterations for the approximate solution, flow estimate with 3 sweeps, and
the true energy error from a reference solve.  Results print as the usual
CSV report.

Graphs that cannot be downloaded (no network) or solved are reported and
skipped; cached files are reused without touching the network.

Usage:
    python scripts/fetch_real_world.py [--ids 8,22] [--dest data/realworld]
                                       [--no-true-error] [--seed 11]
"""

import argparse
import csv
import io
import pathlib
import shutil
import sys
import tarfile
import tempfile
import time
import urllib.error
import urllib.request

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from lapbound.baseline import gauss_seidel, random_initial_guess, reference_solution
from lapbound.errors import LapboundError
from lapbound.estimator import EstimateConfig, error_estimate
from lapbound.graph import energy_seminorm
from lapbound.ingest import preprocess, read_matrix_market
from lapbound.report import ExperimentReport, ReportRow, report_to_csv

INDEX_URL = "https://sparse.tamu.edu/files/ssstats.csv"
TARBALL_URL = "https://sparse.tamu.edu/MM/{group}/{name}.tar.gz"
DEFAULT_IDS = "8,1196,22,1614,33,791,2777,1533"
TIMEOUT = 60


def load_index():
    """Collection index as {id: (group, name)}; line k describes matrix k."""
    with urllib.request.urlopen(INDEX_URL, timeout=TIMEOUT) as resp:
        text = resp.read().decode("utf-8", errors="replace")
    table = {}
    rows = list(csv.reader(io.StringIO(text)))
    # first two lines are matrix count and generation date
    for offset, row in enumerate(rows[2:], start=1):
        if len(row) >= 2:
            table[offset] = (row[0].strip(), row[1].strip())
    return table


def fetch_one(matrix_id, group, name, dest):
    target = dest / f"{matrix_id}_{name}.mtx"
    if target.exists():
        return target, "cached"
    url = TARBALL_URL.format(group=group, name=name)
    with tempfile.TemporaryDirectory() as tmp:
        archive = pathlib.Path(tmp) / "m.tar.gz"
        with urllib.request.urlopen(url, timeout=TIMEOUT) as resp, open(
            archive, "wb"
        ) as out:
            shutil.copyfileobj(resp, out)
        with tarfile.open(archive) as tf:
            member = next(
                m for m in tf.getmembers() if m.name.endswith(f"{name}.mtx")
            )
            with tf.extractfile(member) as src, open(target, "wb") as out:
                shutil.copyfileobj(src, out)
    return target, "downloaded"


def estimate_file(path, label, args):
    entries, n = read_matrix_market(path)
    g = preprocess(entries, n)
    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal(g.n)
    f -= f.mean()
    v = gauss_seidel(
        g, f, random_initial_guess(g, seed=args.seed + 1), args.smoother_iterations
    )
    t0 = time.perf_counter()
    est = error_estimate(g, v, f, EstimateConfig(sweeps=args.sweeps))
    seconds = time.perf_counter() - t0
    true = None
    if not args.no_true_error:
        u = reference_solution(g, f, tolerance=1e-10)
        true = energy_seminorm(g, u - v)
    return ReportRow(
        label=label, n=g.n, m=g.m, psi=est.psi, sweeps=est.sweeps,
        seconds=seconds, true_error=true,
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ids", default=DEFAULT_IDS)
    parser.add_argument("--dest", type=pathlib.Path,
                        default=pathlib.Path("data/realworld"))
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--sweeps", type=int, default=3)
    parser.add_argument("--smoother-iterations", type=int, default=3)
    parser.add_argument("--no-true-error", action="store_true")
    args = parser.parse_args(argv)

    ids = [int(s) for s in args.ids.split(",")]
    args.dest.mkdir(parents=True, exist_ok=True)

    cached = {p: p.name for p in args.dest.glob("*.mtx")}
    need_index = any(
        not any(name.startswith(f"{mid}_") for name in cached.values())
        for mid in ids
    )
    index = {}
    if need_index:
        try:
            index = load_index()
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            print(f"could not load collection index ({exc}); "
                  "only cached files will be used", file=sys.stderr)

    report = ExperimentReport(seed=args.seed)
    for mid in ids:
        hit = next(
            (p for p in args.dest.glob(f"{mid}_*.mtx")), None
        )
        if hit is None:
            if mid not in index:
                print(f"id {mid}: not cached and no index entry; skipped",
                      file=sys.stderr)
                continue
            group, name = index[mid]
            try:
                hit, how = fetch_one(mid, group, name, args.dest)
                print(f"id {mid}: {how} {hit.name}", file=sys.stderr)
            except (urllib.error.URLError, OSError, TimeoutError) as exc:
                print(f"id {mid}: download failed ({exc}); skipped",
                      file=sys.stderr)
                continue
        try:
            report.add(estimate_file(hit, hit.stem, args))
        except LapboundError as exc:
            print(f"id {mid}: estimate failed ({exc}); skipped", file=sys.stderr)

    if not report.rows:
        print("no graphs processed", file=sys.stderr)
        return 1
    sys.stdout.write(report_to_csv(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
