"""Regenerate the synthetic .mtx fixtures bundled with the test suite.

Deterministic; run from the repository root:

    python3 scripts/make_fixtures.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lapbound.ingest import random_connected_graph, uniform_grid, write_matrix_market

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    # sparse cycle structure: m/n near 1.5 keeps most flow on the tree
    write_matrix_market(
        OUT / "tree_dominated.mtx",
        random_connected_graph(400, 200, seed=7),
        comment="random spanning tree plus 200 chords, n=400",
    )
    # dense cycle structure stresses the overlapping subspaces
    write_matrix_market(
        OUT / "expander_like.mtx",
        random_connected_graph(300, 900, seed=3),
        comment="random spanning tree plus 900 chords, n=300",
    )
    # structured mesh with unit weights
    write_matrix_market(
        OUT / "mesh_like.mtx",
        uniform_grid(3).graph,
        comment="triangulated lattice, level 3",
    )
    print("fixtures written to", OUT)


if __name__ == "__main__":
    main()
