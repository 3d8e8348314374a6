"""Canonical pairs (B, H) for H-selfadjoint members of Omega_2n.

A canonical spec lists Jordan blocks per copy: a real eigenvalue block
(lambda, k, eta) materializes as J_k(lambda) against eta*Q_k, a nonreal
block (lambda, k) as J_k(lambda) + J_k(conj lambda) against Q_2k; the
Omega-level pair is always the copy doubled, with the nonreal pair order
swapped in the second copy.

canonicalize_pair reduces an arbitrary selfadjoint pair to this form with a
similarity that stays inside Omega_2n.  The similarity is assembled from
quaternionic Jordan chains: a chain of complex columns c_1..c_k together
with the partner columns chi(c_i) spans a quaternionic invariant subspace,
so S = [C | -chi(C)] is automatically a member of Omega_2n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (ClusterOverlap, NotHermitian, NotSelfadjoint, ParseError,
                     RankAmbiguous, SizeMismatch, SpecInvalid, NearSingular)
from .omega import (OmegaMatrix, chi, qs_abs, qs_conj, selfadjoint_residual,
                    structure_matrix)

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# tolerances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tolerances:
    """Tolerance factors; absolute thresholds are scaled by matrix norms."""

    cluster_factor: float = 1e-6
    rank_factor: float = 1e-8
    residual_factor: float = 1e-8
    selfadjoint_factor: float = 1e-8
    membership_factor: float = 1e-10

    def cluster_radius(self, b: np.ndarray) -> float:
        # Computed eigenvalues of a defective block scatter like
        # (eps*||B||)^(1/k); the linkage radius must cover that blob for any
        # block size the matrix can hold.
        bnorm = float(np.linalg.norm(b, 2)) if b.size else 0.0
        kbound = max(1, min(b.shape[0], 16))
        blob = 2.0 * (max(_EPS * max(1.0, bnorm), 1e-300)) ** (1.0 / kbound)
        blob = min(blob, 0.25)
        return max(self.cluster_factor * max(1.0, float(np.linalg.norm(b))), blob)

    def rank_threshold(self, m: np.ndarray) -> float:
        return self.rank_factor * max(1.0, float(np.linalg.norm(m)))

    def residual(self, b: np.ndarray) -> float:
        return self.residual_factor * max(1.0, float(np.linalg.norm(b)))


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# blocks, specs, Segre sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalBlock:
    """One Jordan block of a per-copy canonical form."""

    lam: complex
    size: int
    sign: int | None = None

    def __post_init__(self):
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.size < 1:
            raise SpecInvalid("block size must be positive")
        if lam.imag < 0:
            raise SpecInvalid("nonreal block eigenvalues are stored with Im >= 0")
        if lam.imag == 0 and self.sign not in (-1, 1):
            raise SpecInvalid("real blocks carry a sign +-1")
        if lam.imag != 0 and self.sign is not None:
            raise SpecInvalid("nonreal blocks carry no sign")

    @property
    def is_real(self) -> bool:
        return self.lam.imag == 0

    def copy_width(self) -> int:
        return self.size if self.is_real else 2 * self.size

    def sort_key(self):
        return (self.lam.real, self.lam.imag, -self.size,
                -(self.sign if self.sign is not None else 0))

    def to_json(self) -> dict:
        return {"lambda": [self.lam.real, self.lam.imag],
                "size": self.size,
                "sign": self.sign}

    @staticmethod
    def from_json(obj: dict) -> "CanonicalBlock":
        try:
            re, im = obj["lambda"]
            size = int(obj["size"])
            sign = obj["sign"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad canonical block JSON: {exc}") from exc
        if sign is not None:
            sign = int(sign)
        return CanonicalBlock(complex(re, im), size, sign)


@dataclass(frozen=True)
class CanonicalSpec:
    """Ordered block list of ONE copy; the Omega pair is the copy doubled."""

    blocks: tuple[CanonicalBlock, ...]
    doubled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.doubled:
            raise SpecInvalid("Omega-level specs are always doubled")

    def sorted(self) -> "CanonicalSpec":
        return CanonicalSpec(tuple(sorted(self.blocks, key=CanonicalBlock.sort_key)))

    def copy_size(self) -> int:
        return sum(b.copy_width() for b in self.blocks)

    def matches(self, other: "CanonicalSpec", lam_tol: float = 1e-6) -> bool:
        """Structural equality up to block permutation; eigenvalues within lam_tol."""
        a, b = list(self.blocks), list(other.blocks)
        if len(a) != len(b):
            return False
        for x in a:
            cands = [i for i, y in enumerate(b)
                     if y.size == x.size and y.sign == x.sign
                     and abs(y.lam - x.lam) <= lam_tol]
            if not cands:
                return False
            b.pop(min(cands, key=lambda i: abs(b[i].lam - x.lam)))
        return True

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks], "doubled": True}

    @staticmethod
    def from_json(obj: dict) -> "CanonicalSpec":
        try:
            blocks = [CanonicalBlock.from_json(b) for b in obj["blocks"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad canonical spec JSON: {exc}") from exc
        return CanonicalSpec(tuple(blocks), bool(obj.get("doubled", True)))


@dataclass(frozen=True)
class SegreSequence:
    """Non-increasing Jordan block sizes at one eigenvalue."""

    eigenvalue: complex
    parts: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise SpecInvalid("Segre parts must be positive")
        if list(parts) != sorted(parts, reverse=True):
            raise SpecInvalid("Segre parts must be non-increasing")
        object.__setattr__(self, "parts", parts)


# ---------------------------------------------------------------------------
# elementary builders
# ---------------------------------------------------------------------------

def jordan_block(lam: complex, k: int) -> np.ndarray:
    if k < 1:
        raise SpecInvalid("jordan_block needs k >= 1")
    return np.eye(k, dtype=complex) * lam + np.eye(k, k, 1, dtype=complex)


def sip_matrix(k: int) -> np.ndarray:
    if k < 1:
        raise SpecInvalid("sip_matrix needs k >= 1")
    return np.fliplr(np.eye(k))


def _copy_pair(blocks, swap: bool) -> tuple[np.ndarray, np.ndarray]:
    """One copy of the materialized pair; swap=True conjugates nonreal pairs."""
    bparts, hparts = [], []
    for blk in blocks:
        if blk.is_real:
            bparts.append(jordan_block(blk.lam.real, blk.size))
            hparts.append(blk.sign * sip_matrix(blk.size))
        else:
            lam = blk.lam
            first, second = (np.conj(lam), lam) if swap else (lam, np.conj(lam))
            bparts.append(jordan_block(first, blk.size))
            bparts.append(jordan_block(second, blk.size))
            hparts.append(sip_matrix(2 * blk.size))
    b = scipy.linalg.block_diag(*bparts) if bparts else np.zeros((0, 0), dtype=complex)
    h = scipy.linalg.block_diag(*hparts) if hparts else np.zeros((0, 0))
    return b.astype(complex), h.astype(complex)


def materialize_pair(spec: CanonicalSpec) -> tuple[OmegaMatrix, OmegaMatrix]:
    """Doubled Omega-level pair for a spec; exact member of Omega_2n."""
    blocks = spec.blocks
    if not blocks:
        raise SpecInvalid("cannot materialize an empty spec")
    b1, h1 = _copy_pair(blocks, swap=False)
    b2, _ = _copy_pair(blocks, swap=True)
    b = scipy.linalg.block_diag(b1, b2)
    h = scipy.linalg.block_diag(h1, h1)
    return OmegaMatrix(b, check=False), OmegaMatrix(h.astype(complex), check=False)


def interleave_permutation(t: int, sizes) -> np.ndarray:
    """Permutation P with P (X1 + Y1 + ... ) P^-1 = (all X) + (all Y).

    sizes[j] is the common width of the j-th pair (X_j, Y_j); P is the 2t x 2t
    block matrix with identities at (i, 2i-1) for i <= t and (i, 2(i-t)) above.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) != t:
        raise SizeMismatch(f"expected {t} sizes, got {len(sizes)}")
    if any(s <= 0 for s in sizes):
        raise SizeMismatch("sizes must be positive")
    total = 2 * sum(sizes)
    p = np.zeros((total, total))
    # offsets of the interleaved source blocks (X1 Y1 X2 Y2 ...)
    src_off = np.cumsum([0] + [s for s in sizes for _ in range(2)])
    row = 0
    for i in range(t):          # rows 0..t-1 pick the X_j (odd source blocks)
        s = sizes[i]
        p[row:row + s, src_off[2 * i]:src_off[2 * i] + s] = np.eye(s)
        row += s
    for i in range(t):          # rows t..2t-1 pick the Y_j
        s = sizes[i]
        p[row:row + s, src_off[2 * i + 1]:src_off[2 * i + 1] + s] = np.eye(s)
        row += s
    return p


def block_permutation(order_from: list[int], widths: list[int]) -> np.ndarray:
    """Per-copy permutation gathering blocks listed in order_from into 0..t-1.

    order_from[p] = target index of the block sitting at source position p.
    Conjugation by the result moves diagonal blocks accordingly.
    """
    t = len(order_from)
    if sorted(order_from) != list(range(t)):
        raise SizeMismatch("order_from must be a permutation")
    src_off = np.cumsum([0] + [widths[b] for b in order_from])
    dst_off = np.cumsum([0] + list(widths))
    total = int(dst_off[-1])
    p = np.zeros((total, total))
    for pos, b in enumerate(order_from):
        w = widths[b]
        p[dst_off[b]:dst_off[b] + w, src_off[pos]:src_off[pos] + w] = np.eye(w)
    return p


def inertia(h: np.ndarray, rank_tol: float | None = None) -> tuple[int, int]:
    """(n_plus, n_minus) of a Hermitian matrix; congruence invariant."""
    h = h.array if isinstance(h, OmegaMatrix) else np.asarray(h, dtype=complex)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * max(1.0, np.linalg.norm(h)):
        raise NotHermitian("inertia expects a Hermitian matrix")
    if rank_tol is None:
        rank_tol = DEFAULT_TOL.rank_threshold(h)
    w = np.linalg.eigvalsh(h)
    if np.any(np.abs(w) <= rank_tol):
        raise NearSingular("eigenvalue within rank tolerance of zero")
    return int(np.sum(w > 0)), int(np.sum(w < 0))


# ---------------------------------------------------------------------------
# rank staircase / Segre characteristic
# ---------------------------------------------------------------------------

def _rank_with_guard(m: np.ndarray, tol: Tolerances) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    thr = tol.rank_threshold(m)
    ambiguous = (s > thr / 10.0) & (s < thr * 10.0)
    if np.any(ambiguous):
        raise RankAmbiguous(
            f"singular value {s[ambiguous][0]:.3e} within a factor 10 of {thr:.3e}")
    return int(np.sum(s > thr))


def _staircase_parts(n_mat: np.ndarray, expected_dim: int, tol: Tolerances) -> list[int]:
    """Jordan part sizes of a (numerically) nilpotent matrix via rank drops."""
    n = n_mat.shape[0]
    dims = [0]
    power = np.eye(n, dtype=complex)
    for _ in range(n):
        power = power @ n_mat
        d = n - _rank_with_guard(power, tol)
        if d == dims[-1]:
            break
        dims.append(d)
        if d == n:
            break
    if dims[-1] != expected_dim:
        raise ClusterOverlap(
            f"staircase dimension {dims[-1]} does not match cluster size {expected_dim}")
    counts = [dims[p] - dims[p - 1] for p in range(1, len(dims))]  # chains >= p
    parts: list[int] = []
    for p, c in enumerate(counts, start=1):
        nxt = counts[p] if p < len(counts) else 0
        parts.extend([p] * (c - nxt))
    parts.sort(reverse=True)
    return parts


def _deflate_cluster(b: np.ndarray, centroid: complex, radius: float,
                     expected: int) -> tuple[np.ndarray, np.ndarray]:
    """Schur-deflate the invariant subspace of the eigenvalue cluster.

    Returns (Q1, N) with B Q1 = Q1 (N + centroid I) up to backward error;
    rank decisions on powers of the full matrix would drown in the growth of
    the other eigenvalues, so all staircase work happens on N.
    """
    _, z, sdim = scipy.linalg.schur(
        b, output="complex", sort=lambda x: abs(x - centroid) <= radius)
    if sdim != expected:
        raise ClusterOverlap(
            f"Schur selection found {sdim} eigenvalues, expected {expected}")
    q1 = z[:, :sdim]
    t11 = q1.conj().T @ b @ q1
    return q1, t11 - centroid * np.eye(sdim, dtype=complex)


def segre_characteristic(m: np.ndarray, lam: complex, rank_tol: float | None = None) -> SegreSequence:
    """Segre characteristic of m at lam from the rank staircase of (m - lam I)."""
    m = m.array if isinstance(m, OmegaMatrix) else np.asarray(m, dtype=complex)
    tol = DEFAULT_TOL if rank_tol is None else Tolerances(rank_factor=rank_tol)
    radius = tol.cluster_radius(m)
    eigs = np.linalg.eigvals(m)
    mult = int(np.sum(np.abs(eigs - lam) <= radius))
    if mult == 0:
        return SegreSequence(lam, ())
    centroid = complex(np.mean(eigs[np.abs(eigs - lam) <= radius]))
    if abs(centroid.imag) <= radius:
        centroid = complex(centroid.real, 0.0)
    _, n_defl = _deflate_cluster(m, centroid, radius, mult)
    parts = _staircase_parts(n_defl, mult, tol)
    return SegreSequence(lam, tuple(parts))


# ---------------------------------------------------------------------------
# eigenvalue clustering
# ---------------------------------------------------------------------------

@dataclass
class _Cluster:
    centroid: complex
    mult: int


def _cluster_eigenvalues(eigs: np.ndarray, radius: float) -> list[_Cluster]:
    """Single-linkage clustering with the given merge radius."""
    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]
    parent = list(range(len(eigs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(eigs)):
        for j in range(i + 1, len(eigs)):
            if abs(eigs[j] - eigs[i]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(len(eigs)):
        groups.setdefault(find(i), []).append(eigs[i])
    clusters = [_Cluster(complex(np.mean(g)), len(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (c.centroid.real, c.centroid.imag))
    return clusters


# ---------------------------------------------------------------------------
# Jordan chain extraction (on the deflated nilpotent block)
# ---------------------------------------------------------------------------

def _kernel_basis(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    u, s, vh = np.linalg.svd(m)
    del u
    rank = _rank_with_guard(m, tol)
    return vh[rank:].conj().T


def _append_orth(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Append v to the orthonormal column family q (Gram-Schmidt, twice)."""
    for _ in range(2):
        if q.shape[1]:
            v = v - q @ (q.conj().T @ v)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise RankAmbiguous("degenerate direction while building chains")
    return np.hstack([q, (v / nv)[:, None]])


def _nilpotent_chains(n_mat: np.ndarray, expected_dim: int, tol: Tolerances,
                      partner=None) -> list[list[np.ndarray]]:
    """Jordan chains [c_1, ..., c_k] of nilpotent N with N c_i = c_{i-1}.

    With a partner map (antilinear, quaternionic mode) the returned chains
    are one representative per quaternionic block; the partner images span
    the remaining half of each kernel level.
    """
    n = n_mat.shape[0]
    parts = _staircase_parts(n_mat, expected_dim, tol)
    kappa = parts[0] if parts else 0
    counts = [sum(1 for p in parts if p >= q) for q in range(1, kappa + 2)]
    kernels = {0: np.zeros((n, 0), dtype=complex)}
    power = np.eye(n, dtype=complex)
    for p in range(1, kappa + 1):
        power = power @ n_mat
        kernels[p] = _kernel_basis(power, tol)

    gens: list[tuple[int, np.ndarray]] = []
    for p in range(kappa, 0, -1):
        need = counts[p - 1] - counts[p]
        if partner is not None:
            if need % 2:
                raise ClusterOverlap("quaternionic level counts must be even")
            need //= 2
        if need == 0:
            continue
        # span to avoid: lower kernel level plus descents of longer chains
        avoid = [kernels[p - 1]]
        for length, g in gens:
            v = g.copy()
            for _ in range(length - p):
                v = n_mat @ v
            avoid.append(v[:, None])
            if partner is not None:
                avoid.append(partner(v)[:, None])
        stack = np.hstack(avoid)
        q = scipy.linalg.orth(stack) if stack.shape[1] else stack
        cand = kernels[p]
        for _ in range(need):
            resid = cand - q @ (q.conj().T @ cand) if q.shape[1] else cand
            norms = np.linalg.norm(resid, axis=0)
            best = int(np.argmax(norms))
            if norms[best] < 1e-10:
                raise RankAmbiguous("could not complete chain generators")
            g = resid[:, best] / norms[best]
            gens.append((p, g))
            q = _append_orth(q, g)
            if partner is not None:
                q = _append_orth(q, partner(g))

    chains = []
    for length, g in gens:
        chain = [g]
        for _ in range(length - 1):
            chain.append(n_mat @ chain[-1])
        chain.reverse()  # chain[0] is the eigenvector
        chains.append(chain)
    chains.sort(key=lambda c: -len(c))
    return chains


# ---------------------------------------------------------------------------
# indefinite Gram normalization of chains
# ---------------------------------------------------------------------------

class _ComplexHermOps:
    """Moments [x, y] = y^* G x for a Hermitian form G; scalars complex."""

    def __init__(self, g: np.ndarray):
        self.g = g

    def form(self, x, y):
        return complex(np.vdot(y, self.g @ x))

    def rmul(self, v, s):
        return v * s

    def conj(self, s):
        return np.conj(s)

    def absval(self, s):
        return abs(s)

    def real(self, s):
        return s.real

    def nonreal_part(self, s):
        return abs(s.imag)

    def from_real(self, r):
        return complex(r)

    def unit_from(self, s):
        return np.conj(s) / abs(s)

    def div_real(self, s, r):
        return s / r


class _QuatHermOps:
    """Quaternion-valued moments; scalars are pairs (q1, q2) = q1 + j q2."""

    def __init__(self, g: np.ndarray, partner):
        self.g = g
        self.partner = partner

    def form(self, x, y):
        gx = self.g @ x
        return (complex(np.vdot(y, gx)), complex(np.vdot(self.partner(y), gx)))

    def rmul(self, v, s):
        return s[0] * v + s[1] * self.partner(v)

    def conj(self, s):
        return qs_conj(s)

    def absval(self, s):
        return qs_abs(s)

    def real(self, s):
        return s[0].real

    def nonreal_part(self, s):
        return float(np.hypot(s[0].imag, abs(s[1])))

    def from_real(self, r):
        return (complex(r), 0j)

    def unit_from(self, s):
        a = qs_abs(s)
        c = qs_conj(s)
        return (c[0] / a, c[1] / a)

    def div_real(self, s, r):
        return (s[0] / r, s[1] / r)


def _chain_moment(ops, c, d, s):
    """Moment [d_i, c_j] with i + j = s (Hankel in s); c, d bottom-up lists."""
    k, l = len(c), len(d)
    i = min(l, s - 1)
    j = s - i
    if j > k:
        j = k
        i = s - j
    if not (1 <= i <= l and 1 <= j <= k):
        return ops.from_real(0.0)
    return ops.form(d[i - 1], c[j - 1])


def _normalize_hermitian_chains(chains, ops, degenerate_tol=1e-10):
    """Transform Jordan chains so the Gram against the form becomes +-sips.

    Returns [(eta, chain)] with [c_i, c_j] = eta when i + j = k + 1 and 0
    otherwise, and all cross-chain moments annihilated.
    """
    chains = [list(c) for c in chains]
    out = []
    while chains:
        kappa = max(len(c) for c in chains)
        tops = [i for i, c in enumerate(chains) if len(c) == kappa]
        scale = max(max(np.linalg.norm(v) for v in c) for c in chains) ** 2
        best_self = (0.0, None)
        for i in tops:
            h = _chain_moment(ops, chains[i], chains[i], kappa + 1)
            if ops.absval(h) > best_self[0]:
                best_self = (ops.absval(h), i)
        # recombination partners must share the maximal length: adding a
        # shorter chain cannot stay a Jordan chain and cannot feed the
        # leading moment anyway
        best_cross = (0.0, None, None)
        for i in tops:
            for j in tops:
                if j == i:
                    continue
                m = _chain_moment(ops, chains[i], chains[j], kappa + 1)
                if ops.absval(m) > best_cross[0]:
                    best_cross = (ops.absval(m), i, j)
        peak = max(best_self[0], best_cross[0])
        if peak <= degenerate_tol * max(1.0, scale):
            raise RankAmbiguous("degenerate leading moments in Gram normalization")
        if best_self[0] >= 0.1 * peak:
            i = best_self[1]
        else:
            # fold chain j into chain i; the folded self-moment is
            # h + 2|m| + h_j with |h|, |h_j| < 0.1 |m|, hence nonzero
            _, i, j = best_cross
            m = _chain_moment(ops, chains[i], chains[j], kappa + 1)
            q = ops.unit_from(m)
            for idx in range(kappa):
                chains[i][idx] = chains[i][idx] + ops.rmul(chains[j][idx], q)
        c = chains.pop(i)
        k = len(c)
        h = _chain_moment(ops, c, c, k + 1)
        eta = 1 if ops.real(h) > 0 else -1
        s = ops.from_real(1.0 / np.sqrt(abs(ops.real(h))))
        c = [ops.rmul(v, s) for v in c]
        # kill the higher self-moments h_{k+1+t} with real chain corrections
        for t in range(1, k):
            h_t = _chain_moment(ops, c, c, k + 1 + t)
            alpha = -ops.real(h_t) / (2.0 * eta)
            for idx in range(t, k):
                c[idx] = c[idx] + alpha * c[idx - t]
        # annihilate every remaining chain against c
        for d in chains:
            l = len(d)
            for t in range(l):
                g = _chain_moment(ops, c, d, k + 1 + t)
                q = ops.div_real(g, float(eta))
                for idx in range(t, l):
                    d[idx] = d[idx] - ops.rmul(c[idx - t], q)
        out.append((eta, c))
    return out


def _normalize_symplectic_chains(chains, bform, degenerate_tol=1e-10):
    """Pair chains against an antisymmetric bilinear form.

    Returns [(c, d)] with phi(d_i, c_j) = 1 when i + j = k + 1, 0 otherwise,
    and all other moments annihilated; self-moments vanish identically.
    """
    def moment(d, c, s):
        l, k = len(d), len(c)
        i = min(l, s - 1)
        j = s - i
        if j > k:
            j = k
            i = s - j
        if not (1 <= i <= l and 1 <= j <= k):
            return 0.0 + 0j
        return complex(bform(d[i - 1], c[j - 1]))

    chains = [list(c) for c in chains]
    out = []
    while chains:
        kappa = max(len(c) for c in chains)
        tops = [i for i, c in enumerate(chains) if len(c) == kappa]
        scale = max(max(np.linalg.norm(v) for v in c) for c in chains) ** 2
        best = (0.0, None, None)
        for a in tops:
            for b in tops:
                if a == b:
                    continue
                m = moment(chains[b], chains[a], kappa + 1)
                if abs(m) > best[0]:
                    best = (abs(m), a, b)
        if best[1] is None or best[0] <= degenerate_tol * max(1.0, scale):
            raise RankAmbiguous("degenerate symplectic pairing of chains")
        _, ia, ib = best
        c = chains[ia]
        d = chains[ib]
        for idx in sorted((ia, ib), reverse=True):
            chains.pop(idx)
        k = kappa
        d = [v / moment(d, c, k + 1) for v in d]
        for t in range(1, k):
            beta = -moment(d, c, k + 1 + t)
            for idx in range(t, k):
                d[idx] = d[idx] + beta * d[idx - t]
        for e in chains:
            l = len(e)
            for t in range(l):
                gamma = moment(e, c, k + 1 + t)
                for idx in range(t, l):
                    e[idx] = e[idx] - gamma * d[idx - t]
            for t in range(l):
                gamma = -moment(e, d, k + 1 + t)
                for idx in range(t, l):
                    e[idx] = e[idx] - gamma * c[idx - t]
        out.append((c, d))
    return out


# ---------------------------------------------------------------------------
# exact-canonical fast path
# ---------------------------------------------------------------------------

def _try_parse_canonical(b: np.ndarray, h: np.ndarray, tol_abs: float):
    """Recognize an exactly canonical pair; returns its block list or None."""
    n = b.shape[0] // 2
    b1, h1 = b[:n, :n], h[:n, :n]
    blocks = []
    i = 0
    while i < n:
        lam = b1[i, i]
        k = 1
        while (i + k < n and abs(b1[i + k - 1, i + k] - 1.0) <= tol_abs
               and abs(b1[i + k, i + k] - lam) <= tol_abs):
            k += 1
        if abs(lam.imag) <= tol_abs:
            lam = complex(lam.real, 0.0)
            hblk = h1[i:i + k, i:i + k].real
            if np.max(np.abs(hblk - sip_matrix(k))) <= tol_abs:
                sign = 1
            elif np.max(np.abs(hblk + sip_matrix(k))) <= tol_abs:
                sign = -1
            else:
                return None
            blocks.append(CanonicalBlock(lam, k, sign))
            i += k
        else:
            if lam.imag < 0 or i + 2 * k > n:
                return None
            conj_blk = b1[i + k:i + 2 * k, i + k:i + 2 * k]
            if np.max(np.abs(conj_blk - jordan_block(np.conj(lam), k))) > tol_abs:
                return None
            if np.max(np.abs(h1[i:i + 2 * k, i:i + 2 * k] - sip_matrix(2 * k))) > tol_abs:
                return None
            blocks.append(CanonicalBlock(lam, k, None))
            i += 2 * k
    spec = CanonicalSpec(tuple(blocks))
    if spec.sorted().blocks != spec.blocks:
        return None
    bm, hm = materialize_pair(spec)
    if (np.max(np.abs(bm.array - b)) > tol_abs
            or np.max(np.abs(hm.array - h)) > tol_abs):
        return None
    return spec


# ---------------------------------------------------------------------------
# the canonicalization engine
# ---------------------------------------------------------------------------

def canonicalize_pair(b, h, tol: Tolerances | None = None) -> tuple[OmegaMatrix, CanonicalSpec]:
    """Reduce an H-selfadjoint pair in Omega_2n to canonical form.

    Returns (S, spec) with S in Omega_2n, S^-1 B S and S^* H S equal to
    materialize_pair(spec) within the residual tolerance, and spec sorted
    canonically.
    """
    tol = tol or DEFAULT_TOL
    barr = b.array if isinstance(b, OmegaMatrix) else OmegaMatrix(np.asarray(b, dtype=complex)).array
    harr = h.array if isinstance(h, OmegaMatrix) else OmegaMatrix(np.asarray(h, dtype=complex)).array
    if barr.shape != harr.shape:
        raise SizeMismatch("B and H must have equal shape")
    res = selfadjoint_residual(harr, barr)  # validates Hermitian + invertible
    if res > tol.selfadjoint_factor:
        raise NotSelfadjoint(f"selfadjoint residual {res:.3e} exceeds tolerance")

    scale = max(1.0, float(np.max(np.abs(barr))), float(np.max(np.abs(harr))))
    spec = _try_parse_canonical(barr, harr, 1e-12 * scale)
    if spec is not None:
        s = np.eye(barr.shape[0], dtype=complex)
        return OmegaMatrix(s, check=False), spec

    n = barr.shape[0] // 2
    kmat = structure_matrix(n)
    radius = tol.cluster_radius(barr)
    clusters = _cluster_eigenvalues(np.linalg.eigvals(barr), radius)

    # snap centroids to the axes at cluster resolution, pair conjugate clusters
    real_clusters: list[_Cluster] = []
    nonreal: list[_Cluster] = []
    for c in clusters:
        re = 0.0 if abs(c.centroid.real) <= radius else c.centroid.real
        if abs(c.centroid.imag) <= radius:
            real_clusters.append(_Cluster(complex(re, 0.0), c.mult))
        elif c.centroid.imag > 0:
            nonreal.append(_Cluster(complex(re, c.centroid.imag), c.mult))
    for c in nonreal:
        mate = [d for d in clusters if d.centroid.imag < -radius
                and abs(np.conj(d.centroid) - c.centroid) <= 2 * radius]
        if not mate or mate[0].mult != c.mult:
            raise ClusterOverlap("conjugate eigenvalue clusters do not match")

    entries = []  # (CanonicalBlock, columns) in extraction order
    for c in real_clusters:
        if c.mult % 2:
            raise ClusterOverlap("real eigenvalue multiplicity must be even in Omega")
        q1, nd = _deflate_cluster(barr, c.centroid, radius, c.mult)
        x_c = q1.conj().T @ (kmat @ np.conj(q1))
        partner = lambda v, _x=x_c: _x @ np.conj(v)
        g_c = q1.conj().T @ harr @ q1
        chains = _nilpotent_chains(nd, c.mult, tol, partner=partner)
        ops = _QuatHermOps(g_c, partner)
        for eta, chain in _normalize_hermitian_chains(chains, ops):
            cols = q1 @ np.column_stack(chain)
            entries.append((CanonicalBlock(c.centroid, len(chain), eta), cols))
    for c in nonreal:
        q1, nd = _deflate_cluster(barr, c.centroid, radius, c.mult)
        phi = q1.T @ (np.conj(harr) @ kmat) @ q1
        bform = lambda x, y, _p=phi: x @ (_p @ y)
        chains = _nilpotent_chains(nd, c.mult, tol)
        for cc, dd in _normalize_symplectic_chains(chains, bform):
            u_cols = q1 @ np.column_stack(dd)
            w_cols = chi(q1 @ np.column_stack(cc), kmat)
            entries.append((CanonicalBlock(c.centroid, len(cc), None),
                            np.hstack([u_cols, w_cols])))

    entries.sort(key=lambda e: e[0].sort_key())
    blocks = tuple(e[0] for e in entries)
    cmat = np.hstack([e[1] for e in entries])
    if cmat.shape[1] != n:
        raise ClusterOverlap(
            f"collected {cmat.shape[1]} canonical columns, expected {n}")
    s = np.hstack([cmat, -chi(cmat, kmat)])
    spec = CanonicalSpec(blocks)

    bm, hm = materialize_pair(spec)
    res_b = np.linalg.norm(np.linalg.solve(s, barr @ s) - bm.array)
    res_h = np.linalg.norm(s.conj().T @ harr @ s - hm.array)
    limit = tol.residual(barr) + tol.residual(harr)
    if not np.isfinite(res_b + res_h) or res_b + res_h > limit:
        raise RankAmbiguous(
            f"canonicalization residual {res_b + res_h:.3e} exceeds {limit:.3e}")
    return OmegaMatrix(s, check=False), spec


def canonicalize_nilpotent_copy(x: np.ndarray, g: np.ndarray,
                                tol: Tolerances | None = None):
    """Complex (single-copy) canonicalization of a nilpotent selfadjoint pair.

    Returns (P, blocks) with P^-1 x P = sum of J_k(0) and P^* g P = sum of
    eta Q_k, blocks sorted canonically.  Used by the nilpotent root builder,
    which works per copy and doubles afterwards.
    """
    tol = tol or DEFAULT_TOL
    x = np.asarray(x, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = x.shape[0]
    chains = _nilpotent_chains(x, n, tol)
    ops = _ComplexHermOps(g)
    normalized = _normalize_hermitian_chains(chains, ops)
    blocks = [CanonicalBlock(0.0, len(c), eta) for eta, c in normalized]
    order = sorted(range(len(blocks)), key=lambda i: blocks[i].sort_key())
    cols = [np.column_stack(normalized[i][1]) for i in order]
    blocks = tuple(blocks[i] for i in order)
    p = np.hstack(cols)
    target_b = scipy.linalg.block_diag(*[jordan_block(0.0, b.size) for b in blocks])
    target_h = scipy.linalg.block_diag(*[b.sign * sip_matrix(b.size) for b in blocks])
    res = (np.linalg.norm(np.linalg.solve(p, x @ p) - target_b)
           + np.linalg.norm(p.conj().T @ g @ p - target_h))
    if not np.isfinite(res) or res > tol.residual(x) + tol.residual(g):
        raise RankAmbiguous(f"nilpotent copy canonicalization residual {res:.3e}")
    return p, blocks
