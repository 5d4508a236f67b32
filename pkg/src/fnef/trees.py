"""Trivalent leaf-labeled trees and the boundary strata they span.

A zero-dimensional boundary stratum of the moduli space corresponds to a tree
with n labeled leaves in which every internal vertex has degree three. Each
internal edge cuts the leaf set in two; collecting the cuts gives a pairwise
compatible family of subsets that determines the tree. Deeper (positive
dimensional) strata correspond to subfamilies.

Subsets are normalized to their small side: |I| <= n/2, and at |I| = n/2 the
lexicographically smaller of I and its complement is kept.

Tree shapes are identified by a canonical code: root the tree at its center
(midpoint vertex or edge of a longest path) and write the classic sorted
nested-parenthesis encoding. The code is an opaque string, stable across runs
and insensitive to labeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial


def normalize_subset(n: int, elems) -> frozenset[int]:
    s = frozenset(int(x) for x in elems)
    if not all(1 <= x <= n for x in s):
        raise ValueError(f"subset {sorted(s)} out of range for n={n}")
    comp = frozenset(range(1, n + 1)) - s
    if len(s) > n - len(s):
        return comp
    if len(s) == n - len(s) and tuple(sorted(comp)) < tuple(sorted(s)):
        return comp
    return s


def _compatible(n: int, i: frozenset, j: frozenset) -> bool:
    # two boundary subsets are compatible when they are nested or can be made
    # disjoint after replacing one by its complement
    if i <= j or j <= i or not (i & j):
        return True
    return len(i | j) == n


@dataclass(frozen=True)
class Stratum:
    """Nonempty pairwise-compatible family of normalized subsets of {1..n}."""

    n: int
    members: frozenset[frozenset[int]]

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need n >= 4, got {self.n}")
        mem = frozenset(normalize_subset(self.n, m) for m in self.members)
        if not mem:
            raise ValueError("stratum family must be nonempty")
        for m in mem:
            if not 2 <= len(m) <= self.n // 2:
                raise ValueError(f"member {sorted(m)} has invalid size for n={self.n}")
        for i in mem:
            for j in mem:
                if i is not j and not _compatible(self.n, i, j):
                    raise ValueError(f"incompatible members {sorted(i)} and {sorted(j)}")
        object.__setattr__(self, "members", mem)

    def sorted_members(self) -> list[tuple[int, ...]]:
        return sorted((tuple(sorted(m)) for m in self.members), key=lambda t: (len(t), t))

    def to_json_dict(self) -> dict:
        return {"n": self.n, "T": [list(m) for m in self.sorted_members()]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Stratum":
        return cls(int(obj["n"]), frozenset(frozenset(m) for m in obj["T"]))


def stratum_closure_order(s1: Stratum, s2: Stratum) -> bool:
    """True when s1 lies in the closure of s2, i.e. s2's family refines into s1's."""
    if s1.n != s2.n:
        raise ValueError(f"mismatched n: {s1.n} vs {s2.n}")
    return s2.members <= s1.members


def apply_permutation(s: Stratum, sigma: dict) -> Stratum:
    """Image of a stratum under a permutation given as a 1-based mapping."""
    return Stratum(s.n, frozenset(frozenset(sigma[x] for x in m) for m in s.members))


def set_stabilizer_generators(s: Stratum) -> list[tuple]:
    """Generators of the permutations preserving every stored member set.

    The stored members form a laminar family (sizes are at most n/2, so the
    covering branch of compatibility forces disjointness); its symmetries are
    generated by transpositions inside each forest region plus swaps of
    structurally equal sibling subtrees. Permutations are returned as tuples
    p with p[i] the image of i (p[0] unused). This can be a proper subgroup
    of the full stratum stabilizer when a half-size member maps onto the
    complement of another, which is fine for averaging arguments.
    """
    n = s.n
    sets = [frozenset(range(1, n + 1))]
    sets += sorted(s.members, key=lambda m: (-len(m), tuple(sorted(m))))
    parent = [0] * len(sets)
    for i in range(1, len(sets)):
        best = 0
        for j in range(1, i):
            if sets[i] < sets[j] and (best == 0 or len(sets[j]) < len(sets[best])):
                best = j
        parent[i] = best
    children: dict = {i: [] for i in range(len(sets))}
    for i in range(1, len(sets)):
        children[parent[i]].append(i)
    own = {}
    for i in range(len(sets)):
        covered = set()
        for c in children[i]:
            covered |= sets[c]
        own[i] = sorted(sets[i] - covered)

    codes: dict = {}

    def code(i):
        if i not in codes:
            codes[i] = (len(own[i]), tuple(sorted(code(c) for c in children[i])))
        return codes[i]

    def aligned_points(i) -> list:
        pts = list(own[i])
        for c in sorted(children[i], key=lambda c: (code(c), min(sets[c]))):
            pts.extend(aligned_points(c))
        return pts

    gens = []

    def add_involution(mapping: dict):
        p = list(range(n + 1))
        for a, b in mapping.items():
            p[a] = b
        gens.append(tuple(p))

    for i in range(len(sets)):
        pts = own[i]
        for a, b in zip(pts, pts[1:]):
            add_involution({a: b, b: a})
        by_code: dict = {}
        for c in children[i]:
            by_code.setdefault(code(c), []).append(c)
        for group in by_code.values():
            group.sort(key=lambda c: min(sets[c]))
            for c1, c2 in zip(group, group[1:]):
                mapping = {}
                for a, b in zip(aligned_points(c1), aligned_points(c2)):
                    mapping[a] = b
                    mapping[b] = a
                add_involution(mapping)

    for p in gens:
        moved = Stratum(n, frozenset(frozenset(p[x] for x in m) for m in s.members))
        assert moved.members == s.members, "generator does not preserve the member family"
    return gens


# --- trees -----------------------------------------------------------------


@dataclass(frozen=True)
class StableTree:
    """Tree with leaves 1..n of degree one and internal vertices of degree three."""

    n: int
    adj: tuple  # tuple of (vertex, sorted tuple of neighbors) pairs

    @classmethod
    def from_edges(cls, n: int, edges) -> "StableTree":
        nbrs: dict[int, set[int]] = {}
        for u, v in edges:
            nbrs.setdefault(u, set()).add(v)
            nbrs.setdefault(v, set()).add(u)
        adj = tuple(sorted((v, tuple(sorted(ns))) for v, ns in nbrs.items()))
        return cls(n, adj)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need n >= 3 leaves, got {self.n}")
        nbrs = dict(self.adj)
        verts = set(nbrs)
        if set(range(1, self.n + 1)) - verts:
            raise ValueError("missing leaf vertices")
        nedges = sum(len(ns) for ns in nbrs.values()) // 2
        if nedges != len(verts) - 1:
            raise ValueError("edge count does not match a tree")
        for v, ns in nbrs.items():
            want = 1 if v <= self.n else 3
            if len(ns) != want:
                raise ValueError(f"vertex {v} has degree {len(ns)}, expected {want}")
        # connectivity: walk from leaf 1
        seen = {1}
        stack = [1]
        while stack:
            for w in nbrs[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != verts:
            raise ValueError("tree is not connected")

    def neighbors(self) -> dict[int, tuple[int, ...]]:
        return dict(self.adj)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v, ns in self.adj:
            for w in ns:
                if v < w:
                    out.append((v, w))
        return out


def _side_leaves(t: StableTree, u: int, v: int) -> frozenset[int]:
    """Leaves on u's side of the edge (u, v)."""
    nbrs = t.neighbors()
    seen = {u}
    stack = [u]
    while stack:
        for w in nbrs[stack.pop()]:
            if w != v and w not in seen:
                seen.add(w)
                stack.append(w)
        if v in seen:
            raise ValueError(f"({u},{v}) is not an edge")
    return frozenset(x for x in seen if x <= t.n)


def tree_to_stratum(t: StableTree) -> Stratum:
    """Family of internal-edge leaf cuts; the zero-dimensional stratum of t."""
    if t.n < 4:
        raise ValueError("trees with fewer than four leaves cut out no family")
    members = []
    for u, v in t.edges():
        if u > t.n and v > t.n:
            members.append(normalize_subset(t.n, _side_leaves(t, u, v)))
    return Stratum(t.n, frozenset(members))


def _center(t: StableTree):
    """Midpoint of a longest path: ('V', v) or ('E', (u, v))."""
    nbrs = t.neighbors()

    def farthest(src):
        dist = {src: 0}
        par = {src: None}
        order = [src]
        for v in order:
            for w in nbrs[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    par[w] = v
                    order.append(w)
        far = max(order, key=lambda v: (dist[v], v))
        return far, dist, par

    u, _, _ = farthest(1)
    v, _, par = farthest(u)
    path = [v]
    while par[path[-1]] is not None:
        path.append(par[path[-1]])
    # path runs v .. u with len(path)-1 edges
    L = len(path) - 1
    if L % 2 == 0:
        return ("V", path[L // 2])
    return ("E", (path[(L - 1) // 2], path[(L + 1) // 2]))


def _dir_code(t: StableTree, cache: dict, u: int, parent) -> str:
    key = (u, parent)
    if key not in cache:
        nbrs = t.neighbors()
        kids = sorted(_dir_code(t, cache, w, u) for w in nbrs[u] if w != parent)
        cache[key] = "(" + "".join(kids) + ")"
    return cache[key]


def canonical_shape_code(t: StableTree) -> str:
    kind, at = _center(t)
    cache: dict = {}
    if kind == "V":
        return "V" + _dir_code(t, cache, at, None)
    x, y = at
    return "E" + "".join(sorted((_dir_code(t, cache, x, y), _dir_code(t, cache, y, x))))


def shape_aut_order(t: StableTree) -> int:
    """Order of the shape automorphism group, read off the canonical code."""
    cache: dict = {}

    def aut(u, parent):
        nbrs = t.neighbors()
        kids = [w for w in nbrs[u] if w != parent]
        total = 1
        codes = []
        for w in kids:
            total *= aut(w, u)
            codes.append(_dir_code(t, cache, w, u))
        for code in set(codes):
            total *= factorial(codes.count(code))
        return total

    kind, at = _center(t)
    if kind == "V":
        return aut(at, None)
    x, y = at
    total = aut(x, y) * aut(y, x)
    if _dir_code(t, cache, x, y) == _dir_code(t, cache, y, x):
        total *= 2
    return total


def canonical_relabel(t: StableTree) -> StableTree:
    """Deterministic representative of the shape: relabel by canonical traversal."""
    cache: dict = {}
    nbrs = t.neighbors()
    new_label: dict[int, int] = {}
    counters = {"leaf": 0, "internal": t.n}

    def assign(u):
        if u <= t.n:
            counters["leaf"] += 1
            new_label[u] = counters["leaf"]
        else:
            counters["internal"] += 1
            new_label[u] = counters["internal"]

    def walk(u, parent):
        assign(u)
        kids = [w for w in nbrs[u] if w != parent]
        for w in sorted(kids, key=lambda w: (_dir_code(t, cache, w, u), w)):
            walk(w, u)

    kind, at = _center(t)
    if kind == "V":
        walk(at, None)
    else:
        x, y = at
        if _dir_code(t, cache, y, x) < _dir_code(t, cache, x, y):
            x, y = y, x
        assign(x)
        kids = [w for w in nbrs[x] if w != y]
        for w in sorted(kids, key=lambda w: (_dir_code(t, cache, w, x), w)):
            walk(w, x)
        walk(y, x)
    edges = [(new_label[u], new_label[v]) for u, v in t.edges()]
    return StableTree.from_edges(t.n, edges)


def enumerate_tree_shapes(n: int) -> list[StableTree]:
    """Canonical representatives of all shapes with n leaves, sorted by code."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    reps = {canonical_shape_code(t := StableTree.from_edges(3, [(1, 4), (2, 4), (3, 4)])): t}
    for k in range(3, n):
        nxt: dict[str, StableTree] = {}
        for t in reps.values():
            # shift internal labels up one slot so k+1 is free for the new leaf
            shift = {v: (v if v <= k else v + 1) for v, _ in t.adj}
            base = [(shift[u], shift[v]) for u, v in t.edges()]
            for su, sv in base:
                # subdivide (su, sv) and hang leaf k+1 off the new vertex
                w = 2 * k  # first free internal label for a (k+1)-leaf tree
                edges = [e for e in base if e != (su, sv)]
                edges += [(su, w), (w, sv), (w, k + 1)]
                grown = StableTree.from_edges(k + 1, edges)
                code = canonical_shape_code(grown)
                if code not in nxt:
                    nxt[code] = canonical_relabel(grown)
        reps = nxt
    return [reps[code] for code in sorted(reps)]


# --- symmetry: stabilizers, orbits, isomorphism ----------------------------


def _half_flip_targets(n: int, size: int) -> bool:
    return 2 * size == n


def _assignment_consistent(n, src_members, dst_members, phi) -> bool:
    """Check that some point permutation realizes the partial member map phi.

    phi maps indices into src_members to (dst_index, flipped). Realizability of
    the partial map is tested by comparing the cell sizes of the two sub-
    arrangements: each incidence signature must cut out regions of equal size.
    """
    assigned = sorted(phi)
    src_sig: dict[tuple, int] = {}
    dst_sig: dict[tuple, int] = {}
    for x in range(1, n + 1):
        sig = tuple(x in src_members[i] for i in assigned)
        src_sig[sig] = src_sig.get(sig, 0) + 1
    for y in range(1, n + 1):
        sig = []
        for i in assigned:
            j, flip = phi[i]
            sig.append((y in dst_members[j]) != flip)
        sig = tuple(sig)
        dst_sig[sig] = dst_sig.get(sig, 0) + 1
    return src_sig == dst_sig


def _member_maps(s1: Stratum, s2: Stratum, count_points: bool):
    """Backtracking over structure-preserving member bijections s1 -> s2.

    In counting mode, sums over realizable bijections the number of point
    permutations inducing each one (product of factorials of cell sizes).
    Otherwise returns 1 as soon as any realizable bijection exists, else 0.
    """
    n = s1.n
    # large members first: they constrain the point map most, so wrong branches die early
    src = sorted((frozenset(t) for t in s1.sorted_members()), key=lambda m: (-len(m), tuple(sorted(m))))
    dst = sorted((frozenset(t) for t in s2.sorted_members()), key=lambda m: (-len(m), tuple(sorted(m))))
    if len(src) != len(dst):
        return 0
    if sorted(map(len, src)) != sorted(map(len, dst)):
        return 0
    total = 0
    used = [False] * len(dst)
    phi: dict[int, tuple[int, bool]] = {}

    def cell_product() -> int:
        sig_count: dict[tuple, int] = {}
        for x in range(1, n + 1):
            sig = tuple(x in m for m in src)
            sig_count[sig] = sig_count.get(sig, 0) + 1
        out = 1
        for cnt in sig_count.values():
            out *= factorial(cnt)
        return out

    def rec(i) -> int:
        nonlocal total
        if i == len(src):
            total += cell_product()
            return 1
        for j, d in enumerate(dst):
            if used[j] or len(d) != len(src[i]):
                continue
            flips = (False, True) if _half_flip_targets(n, len(d)) else (False,)
            for flip in flips:
                phi[i] = (j, flip)
                used[j] = True
                if _assignment_consistent(n, src, dst, phi):
                    hit = rec(i + 1)
                    if hit and not count_points:
                        used[j] = False
                        del phi[i]
                        return 1
                used[j] = False
                del phi[i]
        return 0

    found = rec(0)
    return total if count_points else found


def stabilizer_order(s: Stratum) -> int:
    """Number of permutations of {1..n} fixing the family (up to normalization)."""
    return _member_maps(s, s, count_points=True)


def orbit_size(s: Stratum) -> int:
    """Size of the symmetric-group orbit of the family."""
    return factorial(s.n) // stabilizer_order(s)


def strata_isomorphic(s1: Stratum, s2: Stratum) -> bool:
    """Whether some permutation of {1..n} carries one family onto the other."""
    if s1.n != s2.n:
        return False
    return bool(_member_maps(s1, s2, count_points=False))


# --- orbit enumeration -----------------------------------------------------


@dataclass(frozen=True)
class FPointOrbit:
    """Symmetric-group orbit of a zero-dimensional boundary stratum."""

    representative: Stratum
    orbit_size: int
    shape: str


def enumerate_fpoint_orbits(n: int) -> list[FPointOrbit]:
    """One orbit per tree shape, with exact orbit sizes; sorted by shape code."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    out = []
    for t in enumerate_tree_shapes(n):
        s = tree_to_stratum(t)
        aut = shape_aut_order(t)
        size = factorial(n) // aut
        if stabilizer_order(s) != aut:
            raise AssertionError(
                f"family stabilizer disagrees with shape automorphisms for {canonical_shape_code(t)}")
        out.append(FPointOrbit(s, size, canonical_shape_code(t)))
    return out
