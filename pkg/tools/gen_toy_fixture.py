#!/usr/bin/env python3
"""Regenerate the bundled toy corpus (src/ktmap/data/toy/).

40 documents: a 20-document basic block, a 19-document clinical block, and
one mixed-terms bridge citing 8 documents on each side. The pipeline on this
fixture finds exactly 2 level-2 fronts with a mean-score spread near 1 and
the bridge as the only hub; the acceptance suite relies on those properties,
so regenerate only with good reason and re-run the tests after.
"""

from pathlib import Path

import numpy as np

from ktmap.corpus import CitationNetwork, Document, write_corpus

SEED = 0
OUT = Path(__file__).resolve().parent.parent / "src" / "ktmap" / "data" / "toy"

CONFIG = """\
# pipeline config for the bundled toy corpus
nodes = nodes.jsonl
edges = edges.csv
fraction = 1.0
min_front_size = 25
"""


def build_toy(seed: int = SEED) -> CitationNetwork:
    rng = np.random.default_rng(seed)
    docs, edges = [], []
    for i in range(20):
        docs.append(Document(id=f"a{i:02d}", year=2000 + i,
                             basic_terms=int(rng.integers(5, 15)),
                             clinical_terms=0))
    for i in range(19):
        docs.append(Document(id=f"b{i:02d}", year=2020 + i,
                             basic_terms=0,
                             clinical_terms=int(rng.integers(5, 15))))
    docs.append(Document(id="m00", year=2039, basic_terms=6, clinical_terms=6))
    ids = [d.id for d in docs]
    years = {d.id: d.year for d in docs}

    for group in (list(range(0, 20)), list(range(20, 39))):
        for x in range(len(group)):
            for y in range(x + 1, len(group)):
                if rng.random() < 0.45:
                    u, v = ids[group[x]], ids[group[y]]
                    edges.append((u, v) if years[u] > years[v] else (v, u))
    for pick in sorted(rng.choice(np.arange(0, 20), size=8, replace=False)):
        edges.append(("m00", ids[int(pick)]))
    for pick in sorted(rng.choice(np.arange(20, 39), size=8, replace=False)):
        edges.append(("m00", ids[int(pick)]))
    return CitationNetwork(docs, sorted(set(edges)))


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    net = build_toy()
    write_corpus(net, OUT / "nodes.jsonl", OUT / "edges.csv")
    (OUT / "config.cfg").write_text(CONFIG, encoding="utf-8")
    print(f"wrote toy corpus ({net.n_docs} docs, {net.n_edges} edges) to {OUT}")


if __name__ == "__main__":
    main()
