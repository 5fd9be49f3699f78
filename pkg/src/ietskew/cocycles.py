"""Floor and tail cocycles on the diagram, and the aperiodicity certificate.

The floor cocycle f attaches to an edge (j, l) minus the partial sum of the
skewing cocycle up the first l floors of tower j, so it has memory one:
its value on a path is its value on the first edge.  The tail cocycle
telescopes the f-discrepancy between a path and its adic successor; in the
periodic-type setting it reproduces the skewing cocycle itself, which is
what lets the shift-with-f skew-product renormalise the adic skew-product.

Aperiodicity of f is certified through the subgroup of differences of
equal-length Birkhoff sums of f over shift-periodic paths: once the tower
words share a long enough common prefix whose letters cover the alphabet,
that subgroup visibly contains every value of the skewing cocycle and
hence, by the generation assumption, the whole lattice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import in_row_lattice, invariant_factors, vec_add, vec_sub, zero_vector
from .bratteli import BratteliDiagram, Edge, FinitePath, MaximalPathError, MinimalPathError
from .iet import RauzyLoop, compose_loop
from .skew import SkewCocycle, check_periodic_type


class CertificateInconclusive(RuntimeError):
    """Amplification cap hit before the common-prefix conditions held."""


class FloorCocycle:
    """Precomputed f-values of every edge of a diagram, plus path sums."""

    def __init__(self, diagram: BratteliDiagram, phi: SkewCocycle):
        if phi.d != diagram.d:
            raise ValueError("cocycle length does not match diagram")
        self.diagram = diagram
        self.phi = phi
        self.m = phi.m
        values: dict[tuple[int, int], tuple[int, ...]] = {}
        for j in range(1, diagram.d + 1):
            acc = zero_vector(phi.m)
            word = diagram.words[j - 1]
            for l in range(len(word)):
                values[(j, l)] = acc
                acc = vec_sub(acc, phi.of_label(word[l]))
        self.values = values

    def of_edge(self, e: Edge) -> tuple[int, ...]:
        return self.values[(e.tower, e.floor)]

    def of_path(self, p: FinitePath) -> tuple[int, ...]:
        """f has memory one: the value on a path is the value on edge one."""
        return self.of_edge(p.edges[0])

    def path_sum(self, p: FinitePath, k: int | None = None) -> tuple[int, ...]:
        """Birkhoff sum of f along the first k shifts of the path."""
        k = len(p) if k is None else k
        acc = zero_vector(self.m)
        for e in p.edges[:k]:
            acc = vec_add(acc, self.of_edge(e))
        return acc


def floor_cocycle_f(diagram: BratteliDiagram, e: Edge, phi: SkewCocycle) -> tuple[int, ...]:
    return FloorCocycle(diagram, phi).of_edge(e)


def tail_cocycle(diagram: BratteliDiagram, p: FinitePath, phi: SkewCocycle) -> tuple[int, ...]:
    """Telescoped f-discrepancy between p and its adic successor.

    Only the shifts up to the first non-maximal edge contribute, because f
    has memory one and the successor agrees with p beyond that edge.
    Undefined (MaximalPathError) when every edge is maximal.
    """
    succ = diagram.adic_successor(p)  # raises MaximalPathError on the boundary
    fl = FloorCocycle(diagram, phi)
    n = next(i for i, e in enumerate(p.edges) if not diagram.is_max_edge(e))
    acc = zero_vector(phi.m)
    for i in range(n + 1):
        acc = vec_add(acc, vec_sub(fl.of_edge(p.edges[i]), fl.of_edge(succ.edges[i])))
    return acc


@dataclass(frozen=True)
class SkewedPathState:
    """A path together with a fiber coordinate in Z^m."""

    path: FinitePath
    fiber: tuple[int, ...]


def skewed_adic_step(
    diagram: BratteliDiagram, state: SkewedPathState, phi: SkewCocycle
) -> SkewedPathState:
    """(p, a) -> (successor of p, a + phi at the source of edge one)."""
    return SkewedPathState(
        diagram.adic_successor(state.path),
        vec_add(state.fiber, phi.of_label(state.path.source)),
    )


def skewed_adic_step_back(
    diagram: BratteliDiagram, state: SkewedPathState, phi: SkewCocycle
) -> SkewedPathState:
    prev = diagram.adic_predecessor(state.path)
    return SkewedPathState(prev, vec_sub(state.fiber, phi.of_label(prev.source)))


def skewed_shift_step(
    diagram: BratteliDiagram, state: SkewedPathState, phi: SkewCocycle
) -> SkewedPathState:
    """(p, a) -> (shifted p, a + f(p)): one level of tower-base projection."""
    fl = FloorCocycle(diagram, phi)
    return SkewedPathState(
        diagram.left_shift(state.path),
        vec_add(state.fiber, fl.of_path(state.path)),
    )


def shift_image(
    fl: FloorCocycle, state: SkewedPathState, depth: int
) -> tuple[tuple[Edge, ...], tuple[int, ...]]:
    """Remaining edges and fiber after ``depth`` skewed shift steps."""
    p = state.path
    if len(p) < depth:
        raise ValueError("depth exceeds path length")
    return p.edges[depth:], vec_add(state.fiber, fl.path_sum(p, depth))


def tail_orbit_witness(
    diagram: BratteliDiagram,
    s1: SkewedPathState,
    s2: SkewedPathState,
    phi: SkewCocycle,
    depth: int,
) -> int | None:
    """Orbit witness for two states with the same depth-k shift image.

    Returns n with the n-th skewed adic image of s1 equal to s2 (n may be
    negative), or None when the shift images differ.  The search stays
    inside one level-``depth`` skew tower, so |n| is bounded by that
    tower's height.
    """
    fl = FloorCocycle(diagram, phi)
    if shift_image(fl, s1, depth) != shift_image(fl, s2, depth):
        return None
    bound = diagram.heights(depth)[s1.path.truncate(depth).target - 1]
    state = s1
    for n in range(bound + 1):
        if state == s2:
            return n
        if diagram.is_maximal(state.path.truncate(depth)):
            break
        state = skewed_adic_step(diagram, state, phi)
    state = s1
    for n in range(1, bound + 1):
        if diagram.is_minimal(state.path.truncate(depth)):
            break
        state = skewed_adic_step_back(diagram, state, phi)
        if state == s2:
            return -n
    return None


@dataclass(frozen=True)
class AperiodicityCertificate:
    """Witness data for the full-lattice test on Birkhoff-sum differences.

    ``exponent`` counts traversals of the raw loop (amplification included);
    ``repetition`` counts traversals of the positivity-amplified period.
    ``prefix_letters`` is the covering witness n -> i(n) for 1 <= n <= M-1.
    """

    exponent: int
    repetition: int
    prefix_length: int  # M
    prefix_letters: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]
    factors: tuple[int, ...]
    verdict: bool
    q_min: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "repetition": self.repetition,
            "M": self.prefix_length,
            "prefix_letters": list(self.prefix_letters),
            "generators": [list(g) for g in self.generators],
            "invariant_factors": list(self.factors),
            "verdict": self.verdict,
            "q_min": self.q_min,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AperiodicityCertificate":
        return cls(
            exponent=data["exponent"],
            repetition=data["repetition"],
            prefix_length=data["M"],
            prefix_letters=tuple(data["prefix_letters"]),
            generators=tuple(tuple(g) for g in data["generators"]),
            factors=tuple(data["invariant_factors"]),
            verdict=data["verdict"],
            q_min=data["q_min"],
        )


def _common_prefix_length(words) -> int:
    shortest = min(len(w) for w in words)
    for n in range(shortest):
        letter = words[0][n]
        if any(w[n] != letter for w in words):
            return n
    return shortest


MAX_REPETITION_EXPONENT = 10
MAX_TOTAL_WORD_LENGTH = 10_000_000


def amplify_for_common_prefix(
    loop: RauzyLoop, phi: SkewCocycle
) -> AperiodicityCertificate:
    """Repeat the loop until all tower words share a covering prefix.

    Doubling schedule on the repetition count.  At a qualifying repetition,
    the covering prefix supplies shift-fixed self-loop paths whose f-sum
    differences recover every value of the skewing cocycle; the Smith
    invariant factors of those generators decide the verdict.
    """
    base = compose_loop(loop, 1)
    if not check_periodic_type(base.matrix, phi):
        raise ValueError("cocycle is not fixed by the loop (not periodic type)")
    d = loop.d
    last_diag = ""
    for exp in range(MAX_REPETITION_EXPONENT + 1):
        rep = 2 ** exp
        tower = compose_loop(loop, rep)
        if sum(tower.q) > MAX_TOTAL_WORD_LENGTH:
            raise CertificateInconclusive(
                f"word length cap exceeded at repetition {rep}; last state: {last_diag}"
            )
        prefix_len = _common_prefix_length(tower.words)
        m_len = prefix_len - 1
        letters = {tower.words[0][n] for n in range(1, max(m_len, 1))}
        q_min = min(tower.q)
        covers = letters == set(range(1, d + 1))
        tall_enough = q_min > m_len + 1
        last_diag = f"rep={rep} M={m_len} q_min={q_min} covers={covers}"
        if not (covers and tall_enough):
            continue
        diagram = BratteliDiagram(tower)
        fl = FloorCocycle(diagram, phi)
        fixed_edges = []
        for n in range(1, m_len + 1):
            i_n = tower.words[0][n]
            e = diagram.edge(i_n, n)
            if e.source != i_n or diagram.is_max_edge(e):
                raise AssertionError("covering prefix produced a bad self-loop edge")
            fixed_edges.append(e)
        generators = []
        for n in range(1, m_len):
            g = vec_sub(fl.of_edge(fixed_edges[n - 1]), fl.of_edge(fixed_edges[n]))
            if g != phi.of_label(fixed_edges[n - 1].tower):
                raise AssertionError("generator differs from the cocycle value")
            generators.append(g)
        factors = invariant_factors(generators)
        verdict = factors == (1,) * phi.m
        return AperiodicityCertificate(
            exponent=loop.amplification * rep,
            repetition=rep,
            prefix_length=m_len,
            prefix_letters=tuple(e.tower for e in fixed_edges[:-1]),
            generators=tuple(generators),
            factors=factors,
            verdict=verdict,
            q_min=q_min,
        )
    raise CertificateInconclusive(
        f"repetition cap 2^{MAX_REPETITION_EXPONENT} exceeded; last state: {last_diag}"
    )


def recheck_certificate(
    loop: RauzyLoop, phi: SkewCocycle, cert: AperiodicityCertificate
) -> bool:
    """Re-derive every certificate field from the stored witness data."""
    tower = compose_loop(loop, cert.repetition)
    m_len = _common_prefix_length(tower.words) - 1
    if m_len != cert.prefix_length or min(tower.q) != cert.q_min:
        return False
    if not min(tower.q) > m_len + 1:
        return False
    letters = tuple(tower.words[0][n] for n in range(1, m_len))
    if letters != cert.prefix_letters:
        return False
    if set(letters) != set(range(1, loop.d + 1)):
        return False
    expected = tuple(phi.of_label(i) for i in letters)
    if expected != cert.generators:
        return False
    factors = invariant_factors(cert.generators)
    return factors == cert.factors and cert.verdict == (factors == (1,) * phi.m)


def sample_cycle(
    diagram: BratteliDiagram, rng: random.Random, max_len: int = 12
) -> tuple[Edge, ...] | None:
    """One random shift-periodic block: an edge cycle in the source graph."""
    v = rng.randrange(1, diagram.d + 1)
    edges = []
    current = v
    for _ in range(max_len):
        e = rng.choice(diagram.edges_by_source[current])
        edges.append(e)
        current = e.tower
        if current == v:
            return tuple(edges)
    return None


def delta_closure_probe(
    diagram: BratteliDiagram,
    phi: SkewCocycle,
    generators,
    samples: int = 100,
    seed: int = 0,
) -> bool:
    """Sampled closure check of the Birkhoff-difference subgroup.

    Draws pairs of equal-length shift-periodic blocks and verifies that the
    difference of their f-sums lies in the lattice spanned by the
    certificate generators.
    """
    rng = random.Random(seed)
    fl = FloorCocycle(diagram, phi)
    by_length: dict[int, list[tuple[Edge, ...]]] = {}
    checked = 0
    attempts = 0
    while checked < samples and attempts < 200 * samples:
        attempts += 1
        cycle = sample_cycle(diagram, rng)
        if cycle is None:
            continue
        bucket = by_length.setdefault(len(cycle), [])
        for other in bucket:
            s1 = zero_vector(phi.m)
            for e in cycle:
                s1 = vec_add(s1, fl.of_edge(e))
            s2 = zero_vector(phi.m)
            for e in other:
                s2 = vec_add(s2, fl.of_edge(e))
            if not in_row_lattice(generators, vec_sub(s1, s2)):
                return False
            checked += 1
            if checked >= samples:
                break
        bucket.append(cycle)
    if checked < samples:
        raise RuntimeError("could not draw enough equal-length cycle pairs")
    return True
