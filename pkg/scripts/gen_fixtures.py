"""Regenerate the two backbone fixtures: seeded core-and-leaves graphs with
published node and link counts, capacities assigned by the degree rule.

The core is a ring plus chords with every node at degree >= 3, so core links
get the big capacity. Leaf nodes hang off adjacent ring pairs with exactly
two links each; those links get the small capacity and never carry transit,
because the direct core hop is always shorter than the detour through a leaf.
"""

import pathlib

import numpy as np

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "src" / "heate" / "fixtures"

POP1, POP2, DEG_THRESHOLD = 2.5, 10, 3


def core_and_leaves(n, n_links, n_leaf, seed):
    rng = np.random.default_rng(seed)
    n_core = n - n_leaf
    edges = [(i, (i + 1) % n_core) for i in range(n_core)]
    have = {(min(a, b), max(a, b)) for a, b in edges}
    deg = np.full(n, 0, dtype=int)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1

    anchors = rng.choice(n_core, size=n_leaf, replace=False)
    for j, p in enumerate(sorted(int(a) for a in anchors)):
        leaf = n_core + j
        for c in (p, (p + 1) % n_core):
            edges.append((c, leaf))
            deg[c] += 1
            deg[leaf] += 1

    n_chords = n_links - len(edges)
    while n_chords > 0:
        low = deg[:n_core].min()
        pool = np.flatnonzero(deg[:n_core] == low)
        a = int(pool[rng.integers(len(pool))])
        b = int(rng.integers(n_core))
        key = (min(a, b), max(a, b))
        if a == b or key in have:
            continue
        have.add(key)
        edges.append((a, b))
        deg[a] += 1
        deg[b] += 1
        n_chords -= 1

    assert deg[:n_core].min() >= DEG_THRESHOLD, "core node below degree three"
    return edges, deg


def write_fixture(name, n, n_links, n_leaf, seed):
    edges, deg = core_and_leaves(n, n_links, n_leaf, seed)
    lines = [f"# synthesized {name} backbone: {n} nodes, {n_links} physical links"]
    lines += [f"node {v} ip" for v in range(n)]
    for a, b in edges:
        cap = POP1 if deg[a] < DEG_THRESHOLD or deg[b] < DEG_THRESHOLD else POP2
        lines.append(f"link {a} {b} {cap:g}")
    (FIXTURES / f"{name}.topo").write_text("\n".join(lines) + "\n")
    small = sum(1 for a, b in edges
                if deg[a] < DEG_THRESHOLD or deg[b] < DEG_THRESHOLD)
    print(f"{name}: {n} nodes, {n_links} links, degrees {deg.min()}..{deg.max()}, "
          f"{small} small-capacity links")


if __name__ == "__main__":
    write_fixture("geant", 23, 37, n_leaf=5, seed=7)
    write_fixture("sprintlink", 30, 69, n_leaf=6, seed=11)
