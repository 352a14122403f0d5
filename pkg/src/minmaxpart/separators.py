"""Randomized rounding primitives.

Three samplers and a decomposition:

* ``OrthogonalSeparatorSampler`` draws random vertex subsets from an ℓ₂²
  vector solution (a Gram matrix).  Each draw hashes every vertex to a short
  word built from sign patterns of random Gaussian projections of the
  normalized vector together with a randomly shifted log-scale cell of the
  squared norm; the separator keeps the vertices whose word matches a
  uniformly chosen word and whose squared norm passes a uniform threshold.
  With L word bits the probability scale is exactly alpha = 2^-L, inclusion
  probability is exactly alpha·‖ū‖², and pairs that are beta-far in the
  min-norm sense match words with probability at most (3/4)^L <= 1/m.
  Boundary distortion is measured, never asserted.

* ``DecompositionSampler`` draws diameter-bounded random partitions of a
  shortest-path metric: a few rounds of randomly shifted annulus chopping
  followed by ball carving of any cluster still wider than the bound.  The
  diameter bound is enforced deterministically.

* ``probabilistic_partitioning`` runs the decomposition on the lengths
  y(u,v) = min(1, z(u,v)/x(u), z(u,v)/x(v)) at diameter beta/3, which always
  separates pairs with z(u,v) >= beta·x(u).

* ``LpSeparatorSampler`` turns one decomposition draw into an LP separator:
  pick cluster C with probability max_x(C)/n, then keep the vertices above a
  uniform threshold.  Inclusion probability is exactly x(u)/n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .graphs import Graph, InputError

PSD_INPUT_FLOOR = 1e-7
_DIAM_SLACK = 1e-9

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_PAT = np.uint64(0xC2B2AE3D27D4EB4F)


def _splitmix(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= _MIX1
    x ^= x >> np.uint64(27)
    x *= _MIX2
    x ^= x >> np.uint64(31)
    return x


@dataclass(frozen=True)
class SeparatorSample:
    """One sampled subset with the scale and parameters that produced it."""

    set: np.ndarray
    alpha: float
    params: tuple


@dataclass
class Decomposition:
    """A diameter-bounded partition of V into clusters."""

    labels: np.ndarray
    delta: float
    clusters: list = field(default_factory=list)
    enforced_splits: int = 0

    def __post_init__(self):
        if not self.clusters:
            ids = sorted(set(self.labels.tolist()))
            self.clusters = [np.flatnonzero(self.labels == i) for i in ids]


class OrthogonalSeparatorSampler:
    """Batched m-orthogonal separator draws from a PSD gram matrix."""

    def __init__(self, gram: np.ndarray, m: float, beta: float,
                 zeroed: np.ndarray | None = None):
        if not (0 < beta < 1):
            raise InputError(f"beta must be in (0,1), got {beta}")
        gram = (np.asarray(gram, dtype=float) + np.asarray(gram).T) / 2
        eigs, vecs = np.linalg.eigh(gram)
        if eigs.min() < -PSD_INPUT_FLOOR:
            raise InputError(f"gram matrix fails PSD floor: min eig {eigs.min():g}")
        self.n = len(gram)
        norms = np.clip(np.diag(gram), 0.0, 1.0)
        if zeroed is not None:
            norms = np.where(zeroed, 0.0, norms)
        self.norms = norms
        keep = eigs > 1e-12
        V = vecs[:, keep] * np.sqrt(np.clip(eigs[keep], 0.0, None))
        lens = np.linalg.norm(V, axis=1)
        safe = np.where(lens > 0, lens, 1.0)
        self.unit = V / safe[:, None]
        self.rdim = max(1, V.shape[1])
        if V.shape[1] == 0:
            self.unit = np.zeros((self.n, 1))
        self.m = float(m)
        self.beta = float(beta)
        # far pairs with comparable norms have normalized angle at least
        # arccos(1 - beta/4); a length-t sign pattern differs for them w.p.
        # q(t) = 1-(1-p_dir)^t, so a hashed word bit matches w.p. <= 1-q/2
        # and L bits drive far-pair co-occurrence below 1/m.  t trades per-
        # draw work (L·t gaussians) against the scale alpha = 2^-L; pick the
        # cheapest combination for the expected work per accepted draw.
        p_dir = np.arccos(1 - beta / 4) / np.pi
        lm = np.log(max(self.m, 2.0))
        best = None
        for t in range(1, 257):
            q = -np.expm1(t * np.log1p(-p_dir))
            L = max(1, int(np.ceil(lm / -np.log(1 - q / 2))))
            if L > 60:
                continue
            cost = (2.0 ** L) * (L * t + 32)
            if best is None or cost < best[0]:
                best = (cost, t, L)
        self.t, self.L = best[1], best[2]
        self.alpha = 2.0 ** -self.L
        # log-scale cells: norm ratios >= 1 + beta/4 always land in
        # different cells, whatever the shift
        logb = np.log1p(beta / 4)
        with np.errstate(divide="ignore"):
            ll = np.log(np.clip(self.norms, 1e-300, None)) / logb
        self.logcell = np.where(self.norms > 0, ll, 0.0)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Boolean membership matrix of ``count`` independent draws."""
        B, L, t, n = count, self.L, self.t, self.n
        gauss = rng.standard_normal((B, L, t, self.unit.shape[1]))
        signs = np.einsum("bltr,nr->bltn", gauss, self.unit) >= 0
        weights = (np.uint64(1) << np.arange(t, dtype=np.uint64))
        patterns = np.einsum("bltn,t->bln", signs.astype(np.uint64), weights,
                             dtype=np.uint64)
        shifts = rng.random((B, L))
        cells = np.floor(self.logcell[None, None, :] + shifts[:, :, None])
        cells = cells.astype(np.int64).astype(np.uint64)
        keys = rng.integers(0, 2 ** 63, size=(B, L), dtype=np.uint64)
        h = _splitmix((cells * _GOLD) ^ (patterns * _PAT) ^ keys[:, :, None])
        bits = (h >> np.uint64(63)).astype(np.uint8)
        words = rng.integers(0, 2, size=(B, L), dtype=np.uint8)
        match = (bits == words[:, :, None]).all(axis=1)
        thresh = rng.random(B)
        return match & (self.norms[None, :] >= thresh[:, None]) \
            & (self.norms[None, :] > 0)


def sample_orthogonal_separator(solution, m: float, beta: float,
                                rng: np.random.Generator) -> SeparatorSample:
    """One m-orthogonal separator draw from an SDP solution or gram matrix."""
    gram = getattr(solution, "gram", solution)
    zeroed = getattr(solution, "zeroed", None)
    sampler = OrthogonalSeparatorSampler(gram, m, beta, zeroed=zeroed)
    row = sampler.draw(rng, 1)[0]
    return SeparatorSample(set=np.flatnonzero(row), alpha=sampler.alpha,
                           params=(m, beta))


# ---------------------------------------------------------------------------
# separating decompositions


class DecompositionSampler:
    """Random Δ-bounded partitions of g's shortest-path metric."""

    def __init__(self, g: Graph, lengths, delta: float, rounds: int = 2):
        if delta <= 0:
            raise InputError(f"delta must be positive, got {delta}")
        lengths = np.asarray(lengths, dtype=float)
        if len(lengths) != g.m:
            raise InputError("one length per edge required")
        if (lengths < 0).any():
            raise InputError("edge lengths must be nonnegative")
        self.g = g
        self.delta = float(delta)
        self.delta_eff = float(delta) * (1 - _DIAM_SLACK)
        self.rounds = max(1, int(rounds))
        n = g.n
        mat = coo_matrix(
            (np.concatenate([lengths, lengths]),
             (np.concatenate([g.edge_u, g.edge_v]),
              np.concatenate([g.edge_v, g.edge_u]))), shape=(n, n))
        self.dist = dijkstra(mat.tocsr(), directed=False) if n else \
            np.zeros((0, 0))
        self._len = lengths
        # adjacency for connectivity splits
        self._nbr = [g.neighbors(v)[0] for v in range(n)]

    def _diam(self, cluster: np.ndarray) -> float:
        if len(cluster) <= 1:
            return 0.0
        return float(self.dist[np.ix_(cluster, cluster)].max())

    def _connected_pieces(self, vertices: np.ndarray):
        vset = set(vertices.tolist())
        pieces = []
        while vset:
            seed = min(vset)
            comp = {seed}
            frontier = [seed]
            while frontier:
                v = frontier.pop()
                for u in self._nbr[v]:
                    u = int(u)
                    if u in vset and u not in comp:
                        comp.add(u)
                        frontier.append(u)
            vset -= comp
            pieces.append(np.array(sorted(comp), dtype=np.int64))
        return pieces

    def _carve(self, c: np.ndarray, rng) -> list[np.ndarray]:
        """Random-permutation ball carving: each vertex joins the first
        center (in a uniform order) within a random radius <= Δ/2, so every
        cluster has diameter at most Δ deterministically."""
        radius = rng.uniform(self.delta / 4, self.delta_eff / 2)
        perm = c[rng.permutation(len(c))]
        eligible = self.dist[np.ix_(perm, c)] <= radius
        owner = perm[np.argmax(eligible, axis=0)]
        return [c[owner == ctr] for ctr in perm if (owner == ctr).any()]

    def draw(self, rng: np.random.Generator) -> Decomposition:
        n = self.g.n
        labels = -np.ones(n, dtype=np.int64)
        clusters = self._connected_pieces(np.arange(n, dtype=np.int64))
        width = self.delta / (2 * self.rounds)
        for _ in range(self.rounds):
            chopped = []
            for c in clusters:
                if self._diam(c) <= self.delta_eff:
                    chopped.append(c)
                    continue
                # annulus chopping is counterproductive once the band width
                # reaches the edge-length scale; the carving pass below owns
                # the diameter bound in that regime
                inside = np.zeros(n, dtype=bool)
                inside[c] = True
                emask = inside[self.g.edge_u] & inside[self.g.edge_v]
                maxlen = self._len[emask].max(initial=0.0)
                if width <= 2 * maxlen:
                    chopped.append(c)
                    continue
                root = int(c[rng.integers(len(c))])
                shift = rng.random() * width
                band = np.floor((self.dist[root, c] + shift) / width)
                for b in np.unique(band):
                    piece = c[band == b]
                    chopped.extend(self._connected_pieces(piece))
            clusters = chopped
        final = []
        for c in clusters:
            if self._diam(c) <= self.delta_eff:
                final.append(c)
            else:
                final.extend(self._carve(c, rng))
        for i, c in enumerate(final):
            labels[c] = i
        return Decomposition(labels=labels, delta=self.delta, clusters=final)


def separating_decomposition(g: Graph, lengths, delta: float,
                             rng: np.random.Generator,
                             rounds: int = 2) -> Decomposition:
    """One Δ-bounded decomposition draw of g under the given edge lengths."""
    return DecompositionSampler(g, lengths, delta, rounds=rounds).draw(rng)


# ---------------------------------------------------------------------------
# LP separators


def _check_lp_point(g: Graph, x: np.ndarray, z: np.ndarray, tol=1e-7):
    n = g.n
    if z.shape != (n, n) or len(x) != n:
        raise InputError("x must have length n and z must be n x n")
    if np.abs(z - z.T).max(initial=0.0) > tol:
        raise InputError("z must be symmetric")
    if n > 1 and (np.abs(x[:, None] - x[None, :]) - z).max() > tol:
        raise InputError("|x(u)-x(v)| <= z(u,v) violated beyond tolerance")
    for v in range(n):
        viol = z - z[:, v][:, None] - z[v][None, :]
        viol[v, :] = 0
        viol[:, v] = 0
        np.fill_diagonal(viol, 0)
        if n >= 3 and viol.max() > tol:
            raise InputError("z triangle inequality violated beyond tolerance")


def lp_lengths(g: Graph, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Edge lengths y(u,v) = min(1, z/x(u), z/x(v)); 0 if either x is 0."""
    xu, xv = x[g.edge_u], x[g.edge_v]
    ze = z[g.edge_u, g.edge_v]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_u = np.where(xu > 0, ze / np.where(xu > 0, xu, 1.0), np.inf)
        ratio_v = np.where(xv > 0, ze / np.where(xv > 0, xv, 1.0), np.inf)
    y = np.minimum(1.0, np.minimum(ratio_u, ratio_v))
    return np.where((xu > 0) & (xv > 0), y, 0.0)


class LpPartitionSampler:
    """Probabilistic partitionings for a fixed LP point (x, z)."""

    def __init__(self, g: Graph, x, z, beta: float, rounds: int = 2,
                 validate: bool = True):
        if not (0 < beta <= 1):
            raise InputError(f"beta must be in (0,1], got {beta}")
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if validate:
            _check_lp_point(g, x, z)
        self.g = g
        self.x = x
        self.z = z
        self.beta = float(beta)
        self.base = DecompositionSampler(g, lp_lengths(g, x, z), beta / 3,
                                         rounds=rounds)
        # pairs that must always be separated: z >= beta * min(x), min(x) > 0
        minx = np.minimum(x[:, None], x[None, :])
        far = (z >= self.beta * minx - 1e-15) & (minx > 0)
        np.fill_diagonal(far, False)
        self.far_pairs = np.argwhere(np.triu(far, 1))

    def draw(self, rng: np.random.Generator) -> Decomposition:
        dec = self.base.draw(rng)
        labels = dec.labels.copy()
        splits = 0
        # the metric argument already separates every far pair; this pass
        # enforces the guarantee exactly even under float boundary effects
        for u, v in self.far_pairs:
            if labels[u] == labels[v]:
                mover = u if self.x[u] <= self.x[v] else v
                labels[mover] = labels.max() + 1
                splits += 1
        if splits:
            return Decomposition(labels=labels, delta=dec.delta, clusters=[],
                                 enforced_splits=splits)
        dec.enforced_splits = 0
        return dec


def probabilistic_partitioning(g: Graph, x, z, beta: float,
                               rng: np.random.Generator,
                               rounds: int = 2) -> Decomposition:
    """One probabilistic-partitioning draw with threshold beta."""
    return LpPartitionSampler(g, x, z, beta, rounds=rounds).draw(rng)


class LpSeparatorSampler:
    """LP separator with scale alpha = 1/n: cluster pick plus threshold."""

    def __init__(self, g: Graph, x, z, beta: float, rounds: int = 2,
                 validate: bool = True):
        self.part = LpPartitionSampler(g, x, z, beta, rounds=rounds,
                                       validate=validate)
        self.n = g.n
        self.x = self.part.x
        self.alpha = 1.0 / g.n if g.n else 0.0

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        dec = self.part.draw(rng)
        xinf = np.array([self.x[c].max() for c in dec.clusters])
        probs = xinf / self.n
        r = rng.random()
        acc = 0.0
        chosen = None
        for i, p in enumerate(probs):
            acc += p
            if r < acc:
                chosen = i
                break
        out = np.zeros(self.n, dtype=bool)
        if chosen is None:
            return out
        t = rng.random()
        c = dec.clusters[chosen]
        out[c[self.x[c] >= t * xinf[chosen]]] = True
        return out


def sample_lp_separator(g: Graph, x, z, beta: float,
                        rng: np.random.Generator) -> SeparatorSample:
    sampler = LpSeparatorSampler(g, x, z, beta)
    row = sampler.draw(rng)
    return SeparatorSample(set=np.flatnonzero(row), alpha=sampler.alpha,
                           params=(None, beta))


# ---------------------------------------------------------------------------
# measured statistics (diagnostics; big-O constants are never asserted)


def orthogonal_separator_stats(gram, m, beta, draws: int,
                               rng: np.random.Generator, zeroed=None,
                               batch: int = 8192) -> dict:
    sampler = OrthogonalSeparatorSampler(gram, m, beta, zeroed=zeroed)
    n = sampler.n
    inc = np.zeros(n)
    co = np.zeros((n, n))
    sep = np.zeros((n, n))
    done = 0
    while done < draws:
        b = min(batch, draws - done)
        mem = sampler.draw(rng, b)
        inc += mem.sum(axis=0)
        memf = mem.astype(float)
        both = memf.T @ memf
        co += both
        s = memf.sum(axis=0)
        sep += s[:, None] + s[None, :] - 2 * both
        done += b
    gram = (np.asarray(gram, dtype=float) + np.asarray(gram).T) / 2
    d = np.diag(gram)
    dist = d[:, None] + d[None, :] - 2 * gram
    norms = sampler.norms
    minn = np.minimum(norms[:, None], norms[None, :])
    far = dist >= beta * minn - 1e-12
    np.fill_diagonal(far, False)
    with np.errstate(divide="ignore", invalid="ignore"):
        dmeas = np.where(dist > 1e-9, (sep / draws) / (sampler.alpha * dist), 0.0)
    worst_cooc = 0.0
    for u, v in np.argwhere(np.triu(far, 1)):
        bound = min(inc[u], inc[v]) / draws / sampler.m
        worst_cooc = max(worst_cooc, co[u, v] / draws - bound)
    return {
        "draws": draws,
        "alpha": sampler.alpha,
        "word_bits": sampler.L,
        "pattern_len": sampler.t,
        "inclusion_rate": (inc / draws).tolist(),
        "expected_rate": (sampler.alpha * norms).tolist(),
        "cooccurrence_excess": worst_cooc,
        "measured_distortion": float(dmeas.max(initial=0.0)),
    }


def decomposition_stats(g: Graph, lengths, delta, draws: int,
                        rng: np.random.Generator, rounds: int = 2) -> dict:
    sampler = DecompositionSampler(g, lengths, delta, rounds=rounds)
    lengths = np.asarray(lengths, dtype=float)
    cut = np.zeros(g.m)
    diam_ok = 0
    total_clusters = 0
    for _ in range(draws):
        dec = sampler.draw(rng)
        cut += dec.labels[g.edge_u] != dec.labels[g.edge_v]
        for c in dec.clusters:
            total_clusters += 1
            diam_ok += sampler._diam(c) <= delta
    freq = cut / draws
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lengths > 1e-12, freq * delta / lengths, 0.0)
    return {
        "draws": draws,
        "delta": delta,
        "edge_separation_freq": freq.tolist(),
        "measured_D": float(ratio.max(initial=0.0)),
        "clusters_checked": total_clusters,
        "diameter_compliant": diam_ok,
    }


def lp_separator_stats(g: Graph, x, z, beta, draws: int,
                       rng: np.random.Generator) -> dict:
    sampler = LpSeparatorSampler(g, x, z, beta)
    n = g.n
    x = sampler.x
    inc = np.zeros(n)
    sep = np.zeros(g.m)
    far_viol = 0
    minx = np.minimum(x[:, None], x[None, :])
    far = (np.asarray(z) >= beta * minx - 1e-15)
    np.fill_diagonal(far, False)
    far_pairs = np.argwhere(np.triu(far, 1))
    for _ in range(draws):
        mem = sampler.draw(rng)
        inc += mem
        sep += mem[g.edge_u] != mem[g.edge_v]
        for u, v in far_pairs:
            if mem[u] and mem[v]:
                far_viol += 1
    ze = np.asarray(z)[g.edge_u, g.edge_v]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ze > 1e-12, (sep / draws) / (sampler.alpha * ze), 0.0)
    return {
        "draws": draws,
        "alpha": sampler.alpha,
        "inclusion_rate": (inc / draws).tolist(),
        "expected_rate": (x / n).tolist(),
        "far_pair_violations": int(far_viol),
        "measured_D": float(ratio.max(initial=0.0)),
    }
