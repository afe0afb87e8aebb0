"""Greedy coordinate-wise coupling and exact sampling from its disagreement law.

Couple each coordinate pair (P_i, Q_i) optimally and independently. Under
that coupling the chance that the two joint samples agree factorizes, so

    pr_diff = Pr[X != Y] = 1 - prod_i (1 - d_i),      d_i = tv(P_i, Q_i),

is computable exactly. This module also draws exact samples from the
conditional law ``pi(omega) = Pr[X = omega | X != Y]`` one coordinate at a
time: after fixing a prefix, the chance that the pair still agrees is the
prefix's product of ``min(P_i, Q_i)/P_i`` ratios times a suffix product of
``(1 - d_i)`` factors, which gives closed-form conditional weights

    w_k(c) = P_k(c) * (1 - A_{k-1} * r_k(c) * B_k),
    sum_c w_k(c) = 1 - A_{k-1} * B_{k-1}.

All products over coordinates are held as sums of logs with explicit zero
flags, and ``1 - x`` quantities go through ``log1p``/``expm1``, because the
interesting regime is exponentially small per-coordinate distances where
naive products lose everything to rounding.

Randomness: a run is identified by a 64-bit ``seed``; work unit ``b``
(a block of up to :data:`SAMPLE_BLOCK` consecutive draws) uses the
counter-based generator ``Philox(SeedSequence([seed, b]))`` and consumes
one uniform per draw per coordinate, coordinate-major within the block.
The mapping from draw index to block is fixed by the block size alone, so
results never depend on how blocks are distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .distributions import (
    Assignment,
    CategoricalMarginal,
    ProductDistribution,
    coordinate_tv,
    require_same_shape,
)
from .errors import (
    DegenerateConditional,
    DomainMismatch,
    EstimatorOutOfRange,
    IdenticalDistributions,
    InvalidParameter,
    ZeroDenominator,
)

#: Draws per RNG work unit; fixed so that results are worker-count invariant.
SAMPLE_BLOCK = 4096

#: Allowed |sum of weights - normalizer| in the diagnostic identity check.
WEIGHT_SUM_TOL = 1e-12

#: Rounding excursions of the per-sample estimate beyond [0, 1] up to this
#: size are clamped; anything larger aborts.
F_RANGE_TOL = 1e-12

_MAX_SEED = 2**64


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed and return it as a plain int."""
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise InvalidParameter(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed < _MAX_SEED:
        raise InvalidParameter(f"seed must be in [0, 2**64), got {seed}")
    return int(seed)


def block_rng(seed: int, block: int) -> Generator:
    """Counter-based generator for work unit ``block`` of a run seeded ``seed``."""
    return Generator(Philox(SeedSequence([check_seed(seed), int(block)])))


def block_sizes(count: int, block: int = SAMPLE_BLOCK) -> list[int]:
    """Split ``count`` draws into fixed-size blocks (last one may be short)."""
    full, rest = divmod(count, block)
    return [block] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class GreedyCouplingStats:
    """Aggregate quantities of the greedy coupling for one (P, Q) pair.

    ``suffix[k]`` is ``B_k = prod_{i>k} (1 - d_i)`` for ``k = 0..n`` (so
    ``suffix[n] = 1`` and ``pr_diff = 1 - suffix[0]``). ``suffix_log`` and
    ``suffix_zero`` carry the same products in log space: the log sums run
    over the factors with ``d_i < 1`` and the flag records whether any
    ``d_i = 1`` coordinate lies in the suffix (making ``B_k`` exactly 0).
    """

    d: tuple[float, ...]
    suffix: tuple[float, ...]
    pr_diff: float
    suffix_log: tuple[float, ...]
    suffix_zero: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.d)


def build_stats(p: ProductDistribution, q: ProductDistribution) -> GreedyCouplingStats:
    """Per-coordinate TV distances, suffix products, and Pr[X != Y].

    ``pr_diff`` is computed as ``-expm1(sum_i log1p(-d_i))`` so it stays
    accurate when every ``d_i`` is tiny; coordinates with ``d_i = 1`` are
    carried by the zero flags.
    """
    require_same_shape(p, q)
    d = tuple(coordinate_tv(pm, qm) for pm, qm in zip(p.marginals, q.marginals))
    n = len(d)
    suffix_log = [0.0] * (n + 1)
    suffix_zero = [False] * (n + 1)
    for k in range(n - 1, -1, -1):
        d_next = d[k]
        if d_next >= 1.0:
            suffix_zero[k] = True
            suffix_log[k] = suffix_log[k + 1]
        else:
            suffix_zero[k] = suffix_zero[k + 1]
            suffix_log[k] = suffix_log[k + 1] + math.log1p(-d_next)
    suffix = tuple(
        0.0 if z else math.exp(s) for z, s in zip(suffix_zero, suffix_log)
    )
    pr_diff = 1.0 if suffix_zero[0] else -math.expm1(suffix_log[0]) + 0.0
    return GreedyCouplingStats(
        d=d,
        suffix=suffix,
        pr_diff=pr_diff,
        suffix_log=tuple(suffix_log),
        suffix_zero=tuple(suffix_zero),
    )


@dataclass(frozen=True)
class PrefixRatio:
    """Running product of ``min(P_i, Q_i)/P_i`` ratios along a sampled prefix.

    Held as the log sum of the nonzero factors plus an explicit zero flag;
    a ratio of zero (Q puts no mass where P does) sets the flag rather than
    producing a log sentinel.
    """

    is_zero: bool = False
    log: float = 0.0

    @classmethod
    def from_value(cls, a: float) -> "PrefixRatio":
        if not 0.0 <= a <= 1.0:
            raise InvalidParameter(f"prefix ratio must be in [0, 1], got {a!r}")
        if a == 0.0:
            return cls(is_zero=True)
        return cls(log=math.log(a))

    @property
    def value(self) -> float:
        return 0.0 if self.is_zero else math.exp(self.log)


UNIT_PREFIX = PrefixRatio()


def _log_ratio(p_c: float, q_c: float) -> tuple[bool, float]:
    """Zero flag and log of ``min(p_c, q_c)/p_c`` (defined as 1 when p_c = 0)."""
    if p_c == 0.0 or q_c >= p_c:
        return False, 0.0
    if q_c == 0.0:
        return True, 0.0
    return False, math.log1p((q_c - p_c) / p_c)


def extend_prefix(
    a_prev: PrefixRatio,
    p_k: CategoricalMarginal,
    q_k: CategoricalMarginal,
    category: int,
) -> PrefixRatio:
    """Prefix ratio after fixing coordinate ``k`` to ``category`` (1-based)."""
    if not 1 <= category <= p_k.domain_size:
        raise InvalidParameter(f"category {category} outside 1..{p_k.domain_size}")
    zero, log = _log_ratio(p_k.probs[category - 1], q_k.probs[category - 1])
    if a_prev.is_zero or zero:
        return PrefixRatio(is_zero=True, log=a_prev.log)
    return PrefixRatio(log=a_prev.log + log)


class _PairTables:
    """Per-coordinate lookup tables shared by the sampling and estimate kernels.

    For coordinate ``k`` and category ``c`` (0-based arrays):
      - ``log_r``/``r_zero``: log-space ``min(P, Q)/P`` ratio with zero flag,
      - ``log_qp``/``qp_zero``: log-space ``Q/P`` ratio with zero flag.
    Both ratios are built from ``log1p((Q - P)/P)`` so near-identical
    marginals keep full relative accuracy.
    """

    __slots__ = ("p", "log_r", "r_zero", "log_qp", "qp_zero")

    def __init__(self, p: ProductDistribution, q: ProductDistribution) -> None:
        self.p: list[np.ndarray] = []
        self.log_r: list[np.ndarray] = []
        self.r_zero: list[np.ndarray] = []
        self.log_qp: list[np.ndarray] = []
        self.qp_zero: list[np.ndarray] = []
        for pm, qm in zip(p.marginals, q.marginals):
            pv = np.asarray(pm.probs, dtype=np.float64)
            qv = np.asarray(qm.probs, dtype=np.float64)
            pos = pv > 0.0
            safe_p = np.where(pos, pv, 1.0)
            q_zero = qv == 0.0
            r_zero = pos & q_zero
            rel = (qv - pv) / safe_p
            log_r = np.log1p(np.where(pos & ~r_zero, np.minimum(rel, 0.0), 0.0))
            log_qp = np.log1p(np.where(pos & ~q_zero, rel, 0.0))
            self.p.append(pv)
            self.log_r.append(log_r)
            self.r_zero.append(r_zero)
            self.log_qp.append(log_qp)
            self.qp_zero.append(q_zero)


def _sample_block(
    tables: _PairTables,
    stats: GreedyCouplingStats,
    rng: Generator,
    size: int,
    *,
    want_assignments: bool,
    want_f: bool,
    check_invariants: bool,
) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Draw ``size`` outcomes from the conditional disagreement law.

    Returns ``(assignments, f)`` where ``assignments`` is a 0-based
    ``(size, n)`` selection matrix and ``f`` the per-sample estimate values,
    each only when requested. One uniform is consumed per draw per
    coordinate; inverse-CDF selection scans categories in ascending order
    and the last positive-weight category absorbs residual rounding mass.
    """
    n = stats.n
    log_a = np.zeros(size)
    a_zero = np.zeros(size, dtype=bool)
    t_qp = np.zeros(size) if want_f else None
    qp_any = np.zeros(size, dtype=bool) if want_f else None
    selections = np.empty((size, n), dtype=np.int64) if want_assignments else None

    for k in range(1, n + 1):
        p_k = tables.p[k - 1]
        log_r_k = tables.log_r[k - 1]
        r_zero_k = tables.r_zero[k - 1]
        # 1 - A_{k-1} * r_k(c) * B_k, with any zero factor forcing the value 1
        exponent = log_a[:, None] + log_r_k[None, :] + stats.suffix_log[k]
        gone = a_zero[:, None] | r_zero_k[None, :] | stats.suffix_zero[k]
        disagree = np.where(gone, 1.0, -np.expm1(exponent))
        weights = p_k[None, :] * disagree

        cum = np.cumsum(weights, axis=1)
        total = cum[:, -1]
        if not np.all(total > 0.0):
            raise DegenerateConditional(
                f"step {k}: conditional weights sum to a non-positive value"
            )
        if check_invariants:
            norm_zero = a_zero | stats.suffix_zero[k - 1]
            normalizer = np.where(
                norm_zero, 1.0, -np.expm1(log_a + stats.suffix_log[k - 1])
            )
            gap = float(np.abs(total - normalizer).max())
            if gap > WEIGHT_SUM_TOL or not np.all(normalizer > 0.0):
                raise DegenerateConditional(
                    f"step {k}: weight sum deviates from its normalizer by {gap:g}"
                )

        threshold = rng.random(size) * total
        chosen = (cum <= threshold[:, None]).sum(axis=1)
        last_positive = p_k.size - 1 - np.argmax((weights > 0.0)[:, ::-1], axis=1)
        chosen = np.minimum(chosen, last_positive)

        if want_assignments:
            selections[:, k - 1] = chosen
        a_zero |= r_zero_k[chosen]
        log_a = log_a + log_r_k[chosen]
        if want_f:
            qp_any |= tables.qp_zero[k - 1][chosen]
            t_qp += tables.log_qp[k - 1][chosen]

    f = None
    if want_f:
        numer = np.where(qp_any, 1.0, -np.expm1(t_qp))
        denom = np.where(a_zero, 1.0, -np.expm1(log_a))
        f = np.zeros(size)
        live = numer > 0.0
        if live.any():
            if not np.all(denom[live] > 0.0):
                raise ZeroDenominator(
                    "drew an outcome whose disagreement mass is zero"
                )
            f[live] = numer[live] / denom[live]
        excess = float(f.max(initial=0.0)) - 1.0
        if excess > F_RANGE_TOL:
            raise EstimatorOutOfRange(f"estimate exceeded 1 by {excess:g}")
        np.clip(f, 0.0, 1.0, out=f)
    return selections, f


def step_normalizer(
    k: int, a_prev: PrefixRatio | float, stats: GreedyCouplingStats
) -> float:
    """Total conditional weight ``1 - A_{k-1} * B_{k-1}`` at step ``k`` (1-based).

    Raises :class:`DegenerateConditional` when the value is not positive,
    which can only happen on a prefix the conditional law never reaches.
    """
    if not 1 <= k <= stats.n:
        raise InvalidParameter(f"step {k} outside 1..{stats.n}")
    a = a_prev if isinstance(a_prev, PrefixRatio) else PrefixRatio.from_value(a_prev)
    if a.is_zero or stats.suffix_zero[k - 1]:
        return 1.0
    normalizer = -math.expm1(a.log + stats.suffix_log[k - 1])
    if normalizer <= 0.0:
        raise DegenerateConditional(
            f"step {k}: normalizer {normalizer!r} is not positive "
            "(prefix carries no conditional mass)"
        )
    return normalizer


def conditional_weights(
    k: int,
    a_prev: PrefixRatio | float,
    stats: GreedyCouplingStats,
    p_k: CategoricalMarginal,
    q_k: CategoricalMarginal,
) -> np.ndarray:
    """Unnormalized conditional weights over the categories of coordinate ``k``.

    Entry ``c - 1`` holds ``w_k(c) = P_k(c) * (1 - A_{k-1} r_k(c) B_k)``;
    the weights sum to :func:`step_normalizer`. Categories with
    ``P_k(c) = 0`` get weight 0 and are never sampled.
    """
    if p_k.domain_size != q_k.domain_size:
        raise DomainMismatch(
            f"coordinate {k}: domain sizes differ "
            f"({p_k.domain_size} vs {q_k.domain_size})",
            coordinate=k,
        )
    a = a_prev if isinstance(a_prev, PrefixRatio) else PrefixRatio.from_value(a_prev)
    step_normalizer(k, a, stats)
    weights = np.empty(p_k.domain_size)
    for idx, (pc, qc) in enumerate(zip(p_k.probs, q_k.probs)):
        zero, log = _log_ratio(pc, qc)
        if a.is_zero or zero or stats.suffix_zero[k]:
            disagree = 1.0
        else:
            disagree = -math.expm1(a.log + log + stats.suffix_log[k])
        weights[idx] = pc * disagree
    return weights


def sample_pi(
    p: ProductDistribution,
    q: ProductDistribution,
    stats: GreedyCouplingStats,
    seed: int,
) -> Assignment:
    """Draw one outcome distributed as ``Pr[X = . | X != Y]``.

    Deterministic given ``(p, q, seed)``; runs in time linear in the total
    number of categories using the precomputed suffix products and a
    running prefix ratio.
    """
    batch = sample_pi_batch(p, q, stats, seed, 1)
    return Assignment(tuple(int(v) for v in batch[0]))


def sample_pi_batch(
    p: ProductDistribution,
    q: ProductDistribution,
    stats: GreedyCouplingStats,
    seed: int,
    count: int,
    *,
    check_invariants: bool = False,
) -> np.ndarray:
    """Draw ``count`` independent conditional outcomes as a ``(count, n)`` array.

    Rows are draws; entries are 1-based categories, matching
    :class:`~tvdist.distributions.Assignment`. With ``check_invariants``
    every sampling step verifies that its weights sum to the analytic
    normalizer within :data:`WEIGHT_SUM_TOL`.
    """
    require_same_shape(p, q)
    check_seed(seed)
    if count < 1:
        raise InvalidParameter(f"count must be positive, got {count}")
    if stats.pr_diff == 0.0:
        raise IdenticalDistributions(
            "the distributions are identical; the conditional law is undefined"
        )
    tables = _PairTables(p, q)
    out = np.empty((count, p.n), dtype=np.int64)
    offset = 0
    for block, size in enumerate(block_sizes(count)):
        selections, _ = _sample_block(
            tables,
            stats,
            block_rng(seed, block),
            size,
            want_assignments=True,
            want_f=False,
            check_invariants=check_invariants,
        )
        out[offset : offset + size] = selections + 1
        offset += size
    return out
