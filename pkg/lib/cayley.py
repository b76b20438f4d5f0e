# lib/cayley.py
"""
Métrica da palavra por BFS no grafo de Cayley.

A ``BallTable`` stores B_R in deterministic BFS order (sphere by sphere; within
a sphere parents are expanded in canonical-key order, then by generator index)
together with parent pointers and a right-multiplication step table
``step[i, j] = index of elements[i]·s_j`` (-1 when the product leaves B_R).
Tables are memoized per (marking digest, R) and optionally cached on disk.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from tqdm import tqdm

import db
from config import Config
from groups.base import GroupElement, MarkedGroup, Word
from lib.fitting import fit_polynomial
from lib.errors import BudgetExceededError, OutOfTableError, UnknownLengthError, UsageError
from lib.reports import form_text, parse_form

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class BallTable:
    group: MarkedGroup
    radius: int
    elements: List[GroupElement]
    index: Dict[GroupElement, int]
    lengths: np.ndarray
    parent: np.ndarray
    parent_gen: np.ndarray
    offsets: List[int]
    step: np.ndarray
    _deep: Dict[GroupElement, Optional[int]] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: GroupElement) -> bool:
        return x in self.index

    def sphere(self, n: int) -> List[GroupElement]:
        if n < 0 or n > self.radius:
            return []
        return self.elements[self.offsets[n]: self.offsets[n + 1]]

    def sphere_slice(self, n: int) -> slice:
        return slice(self.offsets[n], self.offsets[n + 1])

    @property
    def spheres(self) -> List[List[GroupElement]]:
        return [self.sphere(n) for n in range(self.radius + 1)]

    def ball_size(self, n: int) -> int:
        return self.offsets[min(n, self.radius) + 1]

    def ball(self, n: int) -> List[GroupElement]:
        return self.elements[: self.ball_size(n)]

    def length_of(self, x: GroupElement) -> Optional[int]:
        i = self.index.get(x)
        return None if i is None else int(self.lengths[i])

    def truncate(self, R: int) -> "BallTable":
        """Sub-tabela B_R (R ≤ radius), idêntica a um build direto de raio R."""
        if R >= self.radius:
            return self
        n = self.offsets[R + 1]
        step = self.step[:n].copy()
        step[step >= n] = -1
        elements = self.elements[:n]
        return BallTable(
            group=self.group,
            radius=R,
            elements=elements,
            index={x: i for i, x in enumerate(elements)},
            lengths=self.lengths[:n].copy(),
            parent=self.parent[:n].copy(),
            parent_gen=self.parent_gen[:n].copy(),
            offsets=self.offsets[: R + 2],
            step=step,
        )


class GrowthSequence(BaseModel):
    sizes: List[int] = Field(..., description="|B_0|, ..., |B_R|")
    sphere_sizes: List[int]

    def rows(self) -> Iterator[Tuple[int, int, int]]:
        for n, (b, s) in enumerate(zip(self.sizes, self.sphere_sizes)):
            yield n, b, s


# --------------------- construção ---------------------
_MEMO: Dict[str, BallTable] = {}


def clear_memo() -> None:
    _MEMO.clear()


def _bfs(g: MarkedGroup, R: int, max_elements: int, progress: bool) -> BallTable:
    gens = g.generators
    k = len(gens)
    mul = g.group.mul
    ident = g.identity()

    elements: List[GroupElement] = [ident]
    index: Dict[GroupElement, int] = {ident: 0}
    lengths: List[int] = [0]
    parent: List[int] = [-1]
    parent_gen: List[int] = [-1]
    steps: List[List[int]] = []
    offsets = [0, 1]

    bar = tqdm(total=R, unit="sphere", desc=f"ball {g.label}", disable=not progress, leave=False)
    for n in range(1, R + 1):
        lo, hi = offsets[n - 1], offsets[n]
        order = sorted(range(lo, hi), key=lambda i: elements[i].form)
        rows: Dict[int, List[int]] = {}
        for i in order:
            x = elements[i]
            row = []
            for j in range(k):
                y = mul(x, gens[j])
                t = index.get(y)
                if t is None:
                    t = len(elements)
                    if t >= max_elements:
                        bar.close()
                        partial = _assemble(g, n - 1, elements[:lo] + elements[lo:hi], index, lengths, parent, parent_gen, offsets[:n + 1], steps, partial=True)
                        raise BudgetExceededError(
                            f"element budget {max_elements} exceeded at radius {n} for {g.label}",
                            completed_radius=n - 1,
                            partial=partial,
                        )
                    elements.append(y)
                    index[y] = t
                    lengths.append(n)
                    parent.append(i)
                    parent_gen.append(j)
                row.append(t)
            rows[i] = row
        steps.extend(rows[i] for i in range(lo, hi))
        offsets.append(len(elements))
        logger.debug("ball %s: |S_%d| = %d", g.label, n, offsets[-1] - offsets[-2])
        bar.update(1)
    bar.close()

    # esfera externa: só consulta
    lo, hi = offsets[R], offsets[R + 1]
    for i in range(lo, hi):
        x = elements[i]
        steps.append([index.get(mul(x, s), -1) for s in gens])
    return _assemble(g, R, elements, index, lengths, parent, parent_gen, offsets, steps)


def _assemble(g, R, elements, index, lengths, parent, parent_gen, offsets, steps, partial=False) -> BallTable:
    n = offsets[R + 1]
    elements = elements[:n]
    k = len(g.generators)
    step = np.full((n, k), -1, dtype=np.int64)
    if steps:
        arr = np.asarray(steps[:n], dtype=np.int64).reshape(-1, k) if k else np.zeros((min(len(steps), n), 0), np.int64)
        step[: arr.shape[0]] = arr
    if partial:
        # esfera R (a última completa) não teve vizinhos consultados
        step[step >= n] = -1
    return BallTable(
        group=g,
        radius=R,
        elements=list(elements),
        index={x: i for i, x in enumerate(elements)} if partial else index,
        lengths=np.asarray(lengths[:n], dtype=np.int64),
        parent=np.asarray(parent[:n], dtype=np.int64),
        parent_gen=np.asarray(parent_gen[:n], dtype=np.int64),
        offsets=list(offsets[: R + 2]),
        step=step,
    )


def _from_cache(g: MarkedGroup, R: int, cache_dir: Path) -> Optional[BallTable]:
    digest = g.marking_digest()
    payload = db.load_ball_record(cache_dir, digest, R)
    if payload is None:
        return None
    try:
        k = len(g.generators)
        if payload["generator_count"] != k:
            raise ValueError("generator count mismatch")
        spheres = sorted(payload["spheres"])
        if [n for n, _, _ in spheres] != list(range(R + 1)):
            raise ValueError("missing spheres")
        elements: List[GroupElement] = []
        lengths: List[int] = []
        offsets = [0]
        for n, size, text in spheres:
            forms = text.split("\n") if size else []
            if len(forms) != size:
                raise ValueError(f"sphere {n} size mismatch")
            elements.extend(g.group.element(parse_form(f)) for f in forms)
            lengths.extend([n] * size)
            offsets.append(len(elements))
        N = len(elements)
        parent = np.frombuffer(payload["parents"], dtype=np.int64).copy()
        parent_gen = np.frombuffer(payload["parent_generators"], dtype=np.int64).copy()
        step = np.frombuffer(payload["steps"], dtype=np.int64).copy().reshape(N, k)
        if parent.shape != (N,) or parent_gen.shape != (N,) or elements[0] != g.identity():
            raise ValueError("array shape mismatch")
    except Exception as e:
        logger.warning("corrupt ball cache for %s R=%d (%s); rebuilding", g.label, R, e)
        return None
    return BallTable(
        group=g,
        radius=R,
        elements=elements,
        index={x: i for i, x in enumerate(elements)},
        lengths=np.asarray(lengths, dtype=np.int64),
        parent=parent,
        parent_gen=parent_gen,
        offsets=offsets,
        step=step,
    )


def _to_cache(t: BallTable, cache_dir: Path) -> None:
    db.store_ball_record(
        cache_dir,
        t.group.marking_digest(),
        t.radius,
        descriptor_text=t.group.descriptor.to_text(),
        generator_count=len(t.group.generators),
        parents=t.parent.astype(np.int64).tobytes(),
        parent_generators=t.parent_gen.astype(np.int64).tobytes(),
        steps=t.step.astype(np.int64).tobytes(),
        spheres=[[form_text(x.form) for x in t.sphere(n)] for n in range(t.radius + 1)],
    )


def build_ball(
    g: MarkedGroup,
    R: int,
    *,
    max_elements: Optional[int] = None,
    cache: bool = True,
    cache_dir: Optional[Path] = None,
    progress: Optional[bool] = None,
) -> BallTable:
    """
    Bola B_R exata de ``g``.
    Raises BudgetExceededError (with the largest completed radius and the
    partial table) when the element budget is hit.
    """
    if R < 0:
        raise UsageError(f"radius must be >= 0 (got {R})")
    budget = Config.MAX_ELEMENTS if max_elements is None else max_elements
    key = g.marking_digest()

    if cache:
        hit = _MEMO.get(key)
        if hit is not None and hit.radius >= R:
            return hit.truncate(R)
        cache_dir = cache_dir if cache_dir is not None else Config.CACHE_DIR
        if cache_dir is not None:
            loaded = _from_cache(g, R, Path(cache_dir))
            if loaded is not None:
                logger.debug("ball %s R=%d loaded from cache", g.label, R)
                _MEMO[key] = loaded
                return loaded

    table = _bfs(g, R, budget, Config.PROGRESS if progress is None else progress)
    logger.info("built ball %s R=%d (%d elements)", g.label, R, table.size)
    if cache:
        _MEMO[key] = table
        if cache_dir is not None:
            _to_cache(table, Path(cache_dir))
    return table


# --------------------- consultas ---------------------
def word_length(t: BallTable, x: GroupElement) -> Optional[int]:
    """
    ℓ(x): tabela, forma fechada (marcação padrão) ou meet-in-the-middle até 2R.
    ``None`` means unknown beyond 2R.
    """
    i = t.index.get(x)
    if i is not None:
        return int(t.lengths[i])
    exact = t.group.exact_length(x)
    if exact is not None:
        return exact
    if x in t._deep:
        return t._deep[x]
    g = t.group.group
    found: Optional[int] = None
    for j in range(1, t.radius + 1):
        for u in t.sphere(j):
            if g.mul(g.inv(u), x) in t.index:
                found = j + t.radius
                break
        if found is not None:
            break
    t._deep[x] = found
    return found


def resolve_length(t: BallTable, x: GroupElement) -> int:
    value = word_length(t, x)
    if value is None:
        raise UnknownLengthError(x, 2 * t.radius)
    return value


def geodesic_word(t: BallTable, x: GroupElement) -> Word:
    i = t.index.get(x)
    if i is None:
        raise OutOfTableError(f"{x!r} is outside the ball of radius {t.radius}")
    word: List[int] = []
    while i > 0:
        word.append(int(t.parent_gen[i]))
        i = int(t.parent[i])
    return tuple(reversed(word))


def growth(t: BallTable) -> GrowthSequence:
    sphere_sizes = [t.offsets[n + 1] - t.offsets[n] for n in range(t.radius + 1)]
    return GrowthSequence(sizes=list(np.cumsum(sphere_sizes).tolist()), sphere_sizes=sphere_sizes)


# --------------------- propriedades / dominação ---------------------
class MetricCheck(BaseModel):
    symmetric: bool
    triangle: bool
    pairs_checked: int
    witness: Optional[str] = None


def check_metric(t: BallTable, max_pairs: Optional[int] = None) -> MetricCheck:
    """ℓ(x⁻¹) = ℓ(x) on the table and ℓ(xy) ≤ ℓ(x)+ℓ(y) over B_⌊R/2⌋ pairs."""
    g = t.group.group
    for x in t.elements:
        if t.length_of(g.inv(x)) != t.length_of(x):
            return MetricCheck(symmetric=False, triangle=True, pairs_checked=0, witness=repr(x))
    half = t.ball(t.radius // 2)
    count = 0
    for x in half:
        lx = t.length_of(x)
        for y in half:
            if max_pairs is not None and count >= max_pairs:
                return MetricCheck(symmetric=True, triangle=True, pairs_checked=count)
            count += 1
            lxy = t.length_of(g.mul(x, y))
            if lxy is None or lxy > lx + t.length_of(y):
                return MetricCheck(symmetric=True, triangle=False, pairs_checked=count, witness=f"{x!r}, {y!r}")
    return MetricCheck(symmetric=True, triangle=True, pairs_checked=count)


class DominationProfile(BaseModel):
    """
    ℓ₂(x) ≤ C(1+ℓ₁(x))^r sobre a bola comum, nas duas direções.
    ``exponent`` is fitted on the per-sphere maxima; ``constant`` is the least C
    making the inequality exact on the table for that exponent.
    """
    exponent: float
    constant: float
    reverse_exponent: float
    reverse_constant: float
    equivalent: bool
    radius: int


def _dominating(pairs: Sequence[Tuple[int, int]], min_radius: int) -> Tuple[float, float]:
    maxima: Dict[int, int] = {}
    for a, b in pairs:
        maxima[a] = max(maxima.get(a, 0), b)
    radii = sorted(maxima)
    kept = [n for n in radii if n >= min_radius]
    if len(kept) >= 3:
        radii = kept
    fit = fit_polynomial(radii, [maxima[n] for n in radii], shift=1.0)
    r = max(fit.slope, 0.0)
    constant = max((b / (1.0 + a) ** r for a, b in pairs), default=0.0)
    return r, constant


def domination_profile(t1: BallTable, t2: BallTable, min_radius: int = 1, tolerance: float = 0.25) -> DominationProfile:
    """Compara duas marcações do mesmo grupo; equivalentes quando ambos os expoentes ≈ 1."""
    if t1.group.label != t2.group.label:
        raise UsageError("domination needs two markings of the same group")
    R = min(t1.radius, t2.radius)
    pairs: List[Tuple[int, int]] = []
    for x in t1.ball(R):
        l2 = word_length(t2, x)
        if l2 is not None:
            pairs.append((t1.length_of(x), l2))
    r, c = _dominating(pairs, min_radius)
    rr, rc = _dominating([(b, a) for a, b in pairs], min_radius)
    return DominationProfile(
        exponent=r,
        constant=c,
        reverse_exponent=rr,
        reverse_constant=rc,
        equivalent=r <= 1.0 + tolerance and rr <= 1.0 + tolerance,
        radius=R,
    )
