"""Existence gate and constructive m-th root builders.

The decision follows the canonical-form conditions: positive, nonreal, and
(for odd m) negative spectra are unconditional; negative eigenvalues with m
even must pair identical blocks with opposite signs; zero eigenvalues must
admit a grouping of the per-copy Segre parts into m-tuples of sizes a+1/a
whose signs obey the half-and-half rule.  Builders construct one root per
class and the block-assembly permutation glues them into a single member of
Omega_2n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .canonical import (CanonicalBlock, CanonicalSpec, Tolerances, DEFAULT_TOL,
                        block_permutation, canonicalize_nilpotent_copy,
                        canonicalize_pair, interleave_permutation,
                        jordan_block, materialize_pair, sip_matrix)
from .errors import (ClassMismatch, DegenerateCoefficient, DimensionMismatch,
                     NearSingularH, NoRealSolution, NotPartitionable,
                     NotSelfadjoint, OracleDisagreement, RankAmbiguous,
                     SignPatternViolation, Singular, SpecInvalid)
from .omega import (OmegaMatrix, omega_embed, omega_extract, omega_membership,
                    selfadjoint_residual)
from .quaternion import QuatMatrix

ZERO_CLASS_FACTOR = 1e-8  # |lambda| below this (relative) counts as zero


# ---------------------------------------------------------------------------
# decision types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MTuple:
    """One m-tuple of the zero-eigenvalue grouping.

    Represents r blocks of size a+1 and m-r blocks of size a (size-0 blocks
    absent); epsilons lists the m signs, eta-majority first in each group.
    """

    a: int
    r: int
    eta: int
    epsilons: tuple[int, ...]
    m: int

    def __post_init__(self):
        if not (0 < self.r <= self.m) or self.a < 0:
            raise SpecInvalid("m-tuple needs 0 < r <= m and a >= 0")
        if len(self.epsilons) != self.m:
            raise SpecInvalid("m-tuple carries m signs")

    @property
    def total(self) -> int:
        return self.a * self.m + self.r

    def sizes_and_signs(self) -> list[tuple[int, int]]:
        out = [(self.a + 1, e) for e in self.epsilons[:self.r]]
        if self.a > 0:
            out += [(self.a, e) for e in self.epsilons[self.r:]]
        return out


@dataclass(frozen=True)
class Certificate:
    kind: str
    lam: complex
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "lambda": [self.lam.real, self.lam.imag],
                "detail": self.detail}


@dataclass(frozen=True)
class RootDecision:
    exists: bool
    certificate: Certificate | None = None

    def __post_init__(self):
        if self.exists == (self.certificate is not None):
            raise SpecInvalid("certificate present iff exists is false")

    def to_json(self) -> dict:
        return {"exists": self.exists,
                "certificate": self.certificate.to_json() if self.certificate else None}


@dataclass(frozen=True)
class RootResult:
    root: QuatMatrix
    similarity: OmegaMatrix
    residual_power: float
    residual_selfadjoint: float
    omega_residual: float
    cond_similarity: float

    def to_json(self) -> dict:
        return {"exists": True,
                "root": self.root.to_json(),
                "similarity": self.similarity.to_json(),
                "residual_power": self.residual_power,
                "residual_selfadjoint": self.residual_selfadjoint,
                "omega_residual": self.omega_residual,
                "cond_similarity": self.cond_similarity}


# ---------------------------------------------------------------------------
# the zero-eigenvalue combinatorics
# ---------------------------------------------------------------------------

def _iter_partitions(sizes: tuple[int, ...], m: int):
    """All groupings of the size multiset into m-tuples {a+1 (x r), a (x m-r)}.

    Deterministic order: largest remaining size first, larger r first, so the
    first emitted partition is the greedy largest-first grouping.
    """
    if not sizes:
        yield []
        return
    counts: dict[int, int] = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1

    def rec(counts):
        live = {s: c for s, c in counts.items() if c > 0}
        if not live:
            yield []
            return
        s = max(live)
        for r in range(min(m, live[s]), 0, -1):
            small_needed = m - r
            if small_needed and s - 1 >= 1 and live.get(s - 1, 0) < small_needed:
                continue
            nxt = dict(live)
            nxt[s] -= r
            if small_needed and s - 1 >= 1:
                nxt[s - 1] -= small_needed
            for rest in rec(nxt):
                yield [(s - 1, r)] + rest

    yield from rec(counts)


def m_tuple_partition(segre, m: int) -> list[tuple[int, int]]:
    """Greedy largest-first grouping of one copy's zero Segre into m-tuples."""
    parts = tuple(segre.parts) if hasattr(segre, "parts") else tuple(segre)
    if m < 1:
        raise SpecInvalid("m must be positive")
    for partition in _iter_partitions(parts, m):
        return partition
    raise NotPartitionable(
        f"Segre parts {parts} admit no grouping into {m}-tuples differing by at most one")


def _group_plus_demand(count: int, eta: int) -> int:
    """How many +1 signs the rule assigns to a group of `count` blocks."""
    if count % 2 == 0:
        return count // 2
    return (count + 1) // 2 if eta == 1 else count // 2


def sign_pattern_check(tuples) -> tuple[bool, list[dict]]:
    """Validate the eta half-and-half rule per tuple; diagnosis lists eta."""
    diagnosis = []
    for t in tuples:
        entry = {"a": t.a, "r": t.r, "ok": False, "eta": None}
        for eta in (1, -1):
            big = t.epsilons[:t.r]
            ok = sum(1 for e in big if e == 1) == _group_plus_demand(t.r, eta)
            if ok and t.a > 0:
                small = t.epsilons[t.r:]
                ok = sum(1 for e in small if e == 1) == _group_plus_demand(t.m - t.r, eta)
            if ok:
                entry.update(ok=True, eta=eta)
                break
        diagnosis.append(entry)
    return all(d["ok"] for d in diagnosis), diagnosis


def _tuple_epsilons(a: int, r: int, m: int, eta: int) -> tuple[int, ...]:
    """Deterministic sign placement: eta signs first within each size group."""
    def group(count: int) -> list[int]:
        n_eta = (count + 1) // 2
        return [eta] * n_eta + [-eta] * (count - n_eta)

    return tuple(group(r) + group(m - r))


def _zero_plan(zero_blocks: list[CanonicalBlock], m: int):
    """m-tuple plan for the zero part, or a refusal Certificate."""
    sizes = tuple(sorted((b.size for b in zero_blocks), reverse=True))
    plus_avail: dict[int, int] = {}
    for b in zero_blocks:
        if b.sign == 1:
            plus_avail[b.size] = plus_avail.get(b.size, 0) + 1
    found_partition = False
    for partition in _iter_partitions(sizes, m):
        found_partition = True
        t = len(partition)
        for etas in itertools.product((1, -1), repeat=t):
            demand: dict[int, int] = {}
            for (a, r), eta in zip(partition, etas):
                demand[a + 1] = demand.get(a + 1, 0) + _group_plus_demand(r, eta)
                if a > 0:
                    demand[a] = demand.get(a, 0) + _group_plus_demand(m - r, eta)
            if all(demand.get(s, 0) == plus_avail.get(s, 0)
                   for s in set(demand) | set(plus_avail)):
                return [MTuple(a, r, eta, _tuple_epsilons(a, r, m, eta), m)
                        for (a, r), eta in zip(partition, etas)]
    if not found_partition:
        return Certificate("SegreTupleMismatch", 0.0,
                           f"zero Segre {sizes} admits no {m}-tuple grouping")
    return Certificate("SignPatternViolation", 0.0,
                       f"no sign assignment satisfies the half-and-half rule for {sizes}")


# ---------------------------------------------------------------------------
# classification and the gate
# ---------------------------------------------------------------------------

@dataclass
class _Plan:
    positive: list[int] = field(default_factory=list)
    negative: list[int] = field(default_factory=list)
    nonreal: list[int] = field(default_factory=list)
    zero: list[int] = field(default_factory=list)
    neg_pairs: list[tuple[int, int]] = field(default_factory=list)
    zero_tuples: list[MTuple] = field(default_factory=list)
    certificate: Certificate | None = None


def _classify_and_plan(spec: CanonicalSpec, m: int) -> _Plan:
    blocks = spec.blocks
    plan = _Plan()
    scale = max([1.0] + [abs(b.lam) for b in blocks])
    zero_tol = ZERO_CLASS_FACTOR * scale
    for i, b in enumerate(blocks):
        if not b.is_real:
            plan.nonreal.append(i)
        elif abs(b.lam) <= zero_tol:
            plan.zero.append(i)
        elif b.lam.real > 0:
            plan.positive.append(i)
        else:
            plan.negative.append(i)

    if m == 1:
        return plan

    if plan.negative and m % 2 == 0:
        # group by (lambda, k); needs equal counts of each sign
        groups: dict[tuple[int, int], dict[int, list[int]]] = {}
        keys: list[complex] = []
        for i in plan.negative:
            b = blocks[i]
            ki = None
            for idx, lam in enumerate(keys):
                if abs(lam - b.lam) <= zero_tol:
                    ki = idx
                    break
            if ki is None:
                keys.append(b.lam)
                ki = len(keys) - 1
            groups.setdefault((ki, b.size), {1: [], -1: []})[b.sign].append(i)
        for (ki, k), d in sorted(groups.items()):
            if len(d[1]) != len(d[-1]):
                plan.certificate = Certificate(
                    "NegativeSignPairing", keys[ki],
                    f"blocks J_{k}({keys[ki].real:g}) carry {len(d[1])} plus and "
                    f"{len(d[-1])} minus signs; they must pair with opposite signs")
                return plan
            plan.neg_pairs.extend(zip(d[1], d[-1]))

    if plan.zero:
        outcome = _zero_plan([blocks[i] for i in plan.zero], m)
        if isinstance(outcome, Certificate):
            plan.certificate = outcome
            return plan
        plan.zero_tuples = outcome
    return plan


def root_exists(spec: CanonicalSpec, m: int) -> RootDecision:
    """Gate of the main theorem: decide existence from the canonical form."""
    if m < 1:
        raise SpecInvalid("m must be a positive integer")
    plan = _classify_and_plan(spec, m)
    if plan.certificate is not None:
        return RootDecision(False, plan.certificate)
    return RootDecision(True)


# ---------------------------------------------------------------------------
# Hankel normalization and per-class builders
# ---------------------------------------------------------------------------

def _hankel_value(y: np.ndarray, q: np.ndarray, t_pow: np.ndarray) -> complex:
    return complex(y @ (q @ (t_pow @ y)))


def _solve_hankel(t_mat: np.ndarray, n: int):
    """Solve y^T Q_n T^(n-j) y = delta_{j1} sequentially (bilinear, no conj).

    T must be nilpotent upper triangular with nonzero superdiagonal.  The
    leading equation fixes y_n; each later equation is linear in one new
    component.  Real T yields real y.
    """
    q = sip_matrix(n).astype(t_mat.dtype)
    powers = [np.eye(n, dtype=t_mat.dtype)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ t_mat)
    y = np.zeros(n, dtype=t_mat.dtype)
    lead = (q @ powers[n - 1])[n - 1, n - 1]
    if abs(lead) < 1e-14:
        raise DegenerateCoefficient("leading Hankel coefficient vanishes")
    if np.isrealobj(t_mat) and lead.real < 0:
        # unreachable for the positive / negative-odd classes (the leading
        # coefficient is m*mu^(m-1) to an even power); kept as a guard
        raise NoRealSolution("leading Hankel equation has negative coefficient")
    y[n - 1] = complex(lead) ** (-0.5) if np.iscomplexobj(t_mat) else float(lead) ** (-0.5)
    for j in range(2, n + 1):
        idx = n - j
        y[idx] = 0.0
        e0 = _hankel_value(y, q, powers[n - j])
        y[idx] = 1.0
        e1 = _hankel_value(y, q, powers[n - j])
        lin = e1 - e0
        if abs(lin) < 1e-12 * max(1.0, abs(e0)):
            raise DegenerateCoefficient(f"Hankel equation {j} has vanishing linear term")
        val = -e0 / lin
        y[idx] = val.real if np.isrealobj(t_mat) else val
    return y


def solve_hankel_normalization(mu: float, lam: float, m: int, n: int) -> np.ndarray:
    """Real vector y normalizing P1 = [T^(n-1)y ... Ty y] to P1^T Q_n P1 = Q_n,

    where T = (J_n(mu))^m - lam*I and mu is the real m-th root of lam."""
    if abs(mu ** m - lam) > 1e-10 * max(1.0, abs(lam)):
        raise SpecInvalid("mu must be an m-th root of lam")
    t_mat = np.linalg.matrix_power(jordan_block(mu, n).real, m) - lam * np.eye(n)
    return _solve_hankel(t_mat, n).real


def _chain_matrix(t_mat: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = len(y)
    cols = [y]
    for _ in range(n - 1):
        cols.append(t_mat @ cols[-1])
    return np.column_stack(cols[::-1])


def root_block_real(lam: float, k: int, eta: int, m: int) -> np.ndarray:
    """Per-copy k x k root of (J_k(lam), eta*Q_k); lam > 0, or lam < 0 with m odd."""
    if lam == 0 or (lam < 0 and m % 2 == 0):
        raise ClassMismatch("real builder handles lam > 0, or lam < 0 with m odd")
    if eta not in (-1, 1):
        raise SpecInvalid("eta must be +-1")
    mu = lam ** (1.0 / m) if lam > 0 else -((-lam) ** (1.0 / m))
    jk = jordan_block(mu, k).real
    t_mat = np.linalg.matrix_power(jk, m) - lam * np.eye(k)
    p1 = _chain_matrix(t_mat, _solve_hankel(t_mat, k).real)
    return np.linalg.solve(p1, jk @ p1)


def _root_branch(lam: complex, m: int, branch: int) -> complex:
    """Deterministic branch: principal root times exp(2*pi*i*branch/m)."""
    mu = complex(lam) ** (1.0 / m)
    if branch % m:
        mu *= np.exp(2j * np.pi * (branch % m) / m)
    return mu


def root_block_nonreal(lam: complex, k: int, m: int, branch: int = 0) -> np.ndarray:
    """4k x 4k root block for a nonreal block (lam, k), selfadjoint for Q_2k + Q_2k.

    P1 solves the bilinear normalization P1^T Q_k P1 = Q_k (transpose, not
    conjugate transpose), so P = P1 + conj(P1) + conj(P1) + P1 fixes the sips.
    """
    lam = complex(lam)
    if lam.imag <= 0:
        raise ClassMismatch("nonreal builder needs Im(lam) > 0")
    mu = _root_branch(lam, m, branch)
    jk = jordan_block(mu, k)
    t_mat = np.linalg.matrix_power(jk, m) - lam * np.eye(k, dtype=complex)
    p1 = _chain_matrix(t_mat, _solve_hankel(t_mat, k))
    a1 = np.linalg.solve(p1, jk @ p1)
    return scipy.linalg.block_diag(a1, np.conj(a1), np.conj(a1), a1)


def root_block_negative_even(lam: float, k: int, m: int, branch: int = 0,
                             tol: Tolerances | None = None) -> np.ndarray:
    """4k x 4k root block for paired blocks (lam, k, +1), (lam, k, -1), m even.

    The quadruple J(mu)+J(conj mu)+J(conj mu)+J(mu) with nonreal mu is
    (Q_2k + Q_2k)-selfadjoint; canonicalizing its m-th power realizes the
    Toeplitz-lemma similarity onto (J_k(lam)^4, Q_k + -Q_k + Q_k + -Q_k).
    """
    if lam >= 0 or m % 2:
        raise ClassMismatch("negative-even builder needs lam < 0 and m even")
    mu = _root_branch(complex(lam), m, branch)
    jmat = scipy.linalg.block_diag(*[jordan_block(v, k) for v in (mu, np.conj(mu), np.conj(mu), mu)])
    qhat = scipy.linalg.block_diag(sip_matrix(2 * k), sip_matrix(2 * k)).astype(complex)
    s, spec_out = canonicalize_pair(np.linalg.matrix_power(jmat, m), qhat, tol)
    want = [(k, 1), (k, -1)]
    got = [(b.size, b.sign) for b in spec_out.blocks]
    if got != want or any(abs(b.lam - lam) > 1e-6 * max(1.0, abs(lam)) for b in spec_out.blocks):
        raise OracleDisagreement(
            f"negative-even power canonicalized to {got}, expected {want}")
    return np.linalg.solve(s.array, jmat @ s.array)


def root_block_nilpotent(tuples: list[MTuple], m: int,
                         tol: Tolerances | None = None) -> np.ndarray:
    """Per-copy root block for the zero part: J = sum of J_{t_j}(0).

    P1 realizes the similarity of (J^m, sum of eta_j Q_{t_j}) onto the
    canonical form carrying exactly the tuples' sizes and signs.
    """
    ok, _ = sign_pattern_check(tuples)
    if not ok:
        raise SignPatternViolation("tuples fail the sign rule")
    order = sorted(tuples, key=lambda t: (-t.total, -t.eta))
    j0 = scipy.linalg.block_diag(*[jordan_block(0.0, t.total) for t in order]).astype(complex)
    if m == 1:
        return j0
    g = scipy.linalg.block_diag(*[t.eta * sip_matrix(t.total) for t in order]).astype(complex)
    x = np.linalg.matrix_power(j0, m)
    p1, blocks = canonicalize_nilpotent_copy(x, g, tol)
    want = sorted((pair for t in tuples for pair in t.sizes_and_signs()),
                  key=lambda p: (-p[0], -p[1]))
    got = [(b.size, b.sign) for b in blocks]
    if got != want:
        raise OracleDisagreement(
            f"nilpotent power canonicalized to {got}, expected {want}")
    return np.linalg.solve(p1, j0 @ p1)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble_root(parts) -> OmegaMatrix:
    """Interleave per-class doubled blocks into one member of Omega.

    Each part is (blocks, matrix) with matrix the 2w x 2w Omega-level root of
    the part's doubled sub-pair; the result is the root of the concatenated
    sub-pairs' materialization.
    """
    parts = list(parts)
    if not parts:
        raise DimensionMismatch("assemble_root needs at least one part")
    widths = []
    for blocks, mat in parts:
        w = sum(b.copy_width() for b in blocks)
        if mat.shape != (2 * w, 2 * w):
            raise DimensionMismatch(f"part matrix must be {2 * w} x {2 * w}")
        widths.append(w)
    if len(parts) == 1:
        return OmegaMatrix(parts[0][1], check=False)
    stacked = scipy.linalg.block_diag(*[mat for _, mat in parts])
    p = interleave_permutation(len(parts), widths)
    return OmegaMatrix(p @ stacked @ p.T, check=False)


def _doubled(a1: np.ndarray) -> np.ndarray:
    return scipy.linalg.block_diag(a1, np.conj(a1))


def _build_canonical_root(spec: CanonicalSpec, plan: _Plan, m: int,
                          branch: int, tol: Tolerances) -> np.ndarray:
    """Root of materialize_pair(spec) assembled from per-class builders."""
    blocks = spec.blocks
    parts = []  # (canonical indices, blocks, matrix)
    for i in plan.positive:
        b = blocks[i]
        parts.append(([i], [b], _doubled(root_block_real(b.lam.real, b.size, b.sign, m))))
    for i in plan.negative:
        if m % 2 == 1:
            b = blocks[i]
            parts.append(([i], [b], _doubled(root_block_real(b.lam.real, b.size, b.sign, m))))
    if m % 2 == 0:
        for ip, im_ in plan.neg_pairs:
            b = blocks[ip]
            mat = root_block_negative_even(b.lam.real, b.size, m, branch, tol)
            parts.append(([ip, im_], [blocks[ip], blocks[im_]], mat))
    for i in plan.nonreal:
        b = blocks[i]
        parts.append(([i], [b], root_block_nonreal(b.lam, b.size, m, branch)))
    if plan.zero:
        a1 = root_block_nilpotent(plan.zero_tuples, m, tol)
        zero_sorted = sorted(plan.zero, key=lambda i: blocks[i].sort_key())
        parts.append((zero_sorted, [blocks[i] for i in zero_sorted], _doubled(a1)))

    parts.sort(key=lambda p: p[0][0])
    assembled = assemble_root([(blks, mat) for _, blks, mat in parts]).array
    build_order = [i for idxs, _, _ in parts for i in idxs]
    if build_order != list(range(len(blocks))):
        widths = [b.copy_width() for b in blocks]
        p0 = block_permutation(build_order, widths)
        phat = scipy.linalg.block_diag(p0, p0)
        assembled = phat @ assembled @ phat.T
    return assembled


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------

def _result_from_omega(a_omega: np.ndarray, b: QuatMatrix, h: QuatMatrix, m: int,
                       similarity: np.ndarray, tol: Tolerances) -> RootResult:
    omega_res = omega_membership(a_omega)
    a_quat = omega_extract(a_omega, tol=max(tol.membership_factor *
                                            max(1.0, float(np.max(np.abs(a_omega)))),
                                            omega_res * 1.001))
    power = a_quat.power(m)
    res_power = (power - b).norm() / max(1.0, b.norm())
    hb = h @ a_quat
    bh = a_quat.adjoint() @ h
    res_self = (hb - bh).norm() / max(1.0, h.norm() * a_quat.norm())
    limit = tol.residual_factor
    if res_power > limit or res_self > limit:
        raise RankAmbiguous(
            f"constructed root failed verification: power {res_power:.3e}, "
            f"selfadjoint {res_self:.3e} (limit {limit:.1e})")
    return RootResult(
        root=a_quat,
        similarity=OmegaMatrix(similarity, check=False),
        residual_power=float(res_power),
        residual_selfadjoint=float(res_self),
        omega_residual=float(omega_res),
        cond_similarity=float(np.linalg.cond(similarity)),
    )


def mth_root(b: QuatMatrix, h: QuatMatrix, m: int, tol: Tolerances | None = None,
             branch: int = 0):
    """H-selfadjoint m-th root of an H-selfadjoint quaternion matrix B.

    Returns a RootResult on success and a RootDecision carrying the refusal
    certificate when no root exists.
    """
    if m < 1:
        raise SpecInvalid("m must be a positive integer")
    tol = tol or DEFAULT_TOL
    b_om = omega_embed(b).array
    h_om = omega_embed(h).array
    try:
        res = selfadjoint_residual(h_om, b_om)  # validates H as well
    except Singular as exc:
        raise NearSingularH(str(exc)) from exc
    if res > tol.selfadjoint_factor:
        raise NotSelfadjoint(f"HB - B*H residual {res:.3e} exceeds tolerance")
    eye = np.eye(b_om.shape[0], dtype=complex)
    if m == 1:
        return _result_from_omega(b_om, b, h, 1, eye, tol)
    s, spec = canonicalize_pair(b_om, h_om, tol)
    plan = _classify_and_plan(spec, m)
    if plan.certificate is not None:
        return RootDecision(False, plan.certificate)
    a_canon = _build_canonical_root(spec, plan, m, branch, tol)
    sa = s.array @ a_canon
    a_omega = np.linalg.solve(s.array.T, sa.T).T
    return _result_from_omega(a_omega, b, h, m, s.array, tol)
