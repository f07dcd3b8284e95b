"""Arbiter PUF and k-XOR arbiter PUF simulation (linear additive delay model).

A challenge ``c`` of ``n`` bits is mapped to a feature vector ``phi`` of length
``n + 1`` with ``phi_i = prod_{l >= i} (-1)**c_l`` and ``phi_{n+1} = +1``.
A chain with delay vector ``w`` answers 1 when ``w . phi < 0`` and 0 otherwise
(exact zero counts as 0). A k-XOR PUF XORs the answers of its k chains.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, DisjointnessError
from .seeding import check_seed

ROLES = ("learning", "test")


def _readonly(a):
    a.setflags(write=False)
    return a


def transform_challenges(challenges):
    """Map a batch of challenges ``(N, n)`` to feature vectors ``(N, n + 1)``.

    Computed as a right-to-left running product, so the cost is O(n) per
    challenge. Entries are exactly -1.0 or +1.0.
    """
    c = np.asarray(challenges)
    if c.ndim != 2 or c.shape[1] < 1:
        raise ContractError(f"expected a (N, n) challenge array with n >= 1, got shape {c.shape}")
    if c.size and (c.min() < 0 or c.max() > 1):
        raise ContractError("challenge bits must be 0 or 1")
    signs = 1.0 - 2.0 * c.astype(np.float64)
    phi = np.ones((c.shape[0], c.shape[1] + 1), dtype=np.float64)
    phi[:, :-1] = np.cumprod(signs[:, ::-1], axis=1)[:, ::-1]
    return phi


def transform_challenge(challenge):
    """Feature vector of a single challenge (1-D array of length ``n + 1``)."""
    c = np.asarray(challenge)
    if c.ndim != 1:
        raise ContractError(f"expected a 1-D challenge, got shape {c.shape}")
    return transform_challenges(c[None, :])[0]


def chain_dots(weights, phi, strict=False):
    """Delay differences ``weights @ phi.T`` for ``m`` chains and ``N`` feature vectors.

    ``weights`` is ``(m, n + 1)`` and ``phi`` is ``(N, n + 1)``; the result is
    ``(m, N)``. In strict mode each dot product is accumulated in index order
    ``0 .. n`` in float64, which is the reference evaluation order; otherwise
    BLAS is used and may reorder the summation.
    """
    w = np.asarray(weights, dtype=np.float64)
    p = np.asarray(phi, dtype=np.float64)
    if w.ndim != 2 or p.ndim != 2 or w.shape[1] != p.shape[1]:
        raise ContractError(f"dimension mismatch: weights {w.shape} vs features {p.shape}")
    if not strict:
        return w @ p.T
    acc = np.zeros((w.shape[0], p.shape[0]), dtype=np.float64)
    for j in range(w.shape[1]):
        acc += w[:, j : j + 1] * p[:, j]
    return acc


def responses_from_dots(dots):
    """XOR of per-chain sign tests. ``dots`` is ``(..., k, N)``; returns uint8 ``(..., N)``."""
    neg = np.asarray(dots) < 0
    out = neg[..., 0, :].copy()
    for j in range(1, neg.shape[-2]):
        out ^= neg[..., j, :]
    return out.astype(np.uint8)


def apuf_response(w, phi):
    """Response bit of one arbiter chain: 1 if ``w . phi < 0`` else 0."""
    w = np.asarray(w, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if w.ndim != 1 or w.shape != phi.shape:
        raise ContractError(f"length mismatch: w {w.shape} vs phi {phi.shape}")
    return int(chain_dots(w[None, :], phi[None, :], strict=True)[0, 0] < 0)


@dataclass(frozen=True, eq=False)
class PufInstance:
    """Ground-truth device: ``k`` delay vectors of length ``n + 1``."""

    n: int
    k: int
    seed: int
    chains: np.ndarray

    def __post_init__(self):
        chains = np.array(self.chains, dtype=np.float64)
        if chains.shape != (self.k, self.n + 1):
            raise ContractError(f"chains must have shape ({self.k}, {self.n + 1}), got {chains.shape}")
        if not np.all(np.isfinite(chains)):
            raise ContractError("delay vectors must be finite")
        object.__setattr__(self, "chains", _readonly(chains))

    @property
    def size_label(self):
        return f"{self.k}x{self.n}"

    @property
    def instance_id(self):
        return (self.n, self.k, self.seed)

    def flatten(self):
        """Genotype layout used by the attack: chains concatenated, length ``k * (n + 1)``."""
        return self.chains.reshape(-1).copy()

    def dots(self, phi, strict=True):
        return chain_dots(self.chains, np.atleast_2d(phi), strict=strict)

    def responses(self, phi, strict=True):
        """Response bits for a batch of feature vectors ``(N, n + 1)``."""
        return responses_from_dots(self.dots(phi, strict=strict))

    def __eq__(self, other):
        if not isinstance(other, PufInstance):
            return NotImplemented
        return (self.n, self.k, self.seed) == (other.n, other.k, other.seed) and np.array_equal(
            self.chains, other.chains
        )

    def __repr__(self):
        return f"PufInstance({self.size_label}, seed={self.seed})"


def xor_apuf_response(instance, phi):
    """Response bit of the XOR PUF for a single feature vector."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape != (instance.n + 1,):
        raise ContractError(f"feature vector must have length {instance.n + 1}, got {phi.shape}")
    return int(instance.responses(phi[None, :])[0])


def sample_puf_instance(n, k, seed):
    """Draw each of the ``k * (n + 1)`` delay components i.i.d. from N(0, 1).

    The generator is PCG64 keyed by ``seed``, so ``(n, k, seed)`` always
    reproduces the same instance bit for bit.
    """
    if n < 1 or k < 1:
        raise ContractError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    return PufInstance(n=n, k=k, seed=seed, chains=rng.standard_normal((k, n + 1)))


@dataclass(frozen=True, eq=False)
class CrpSet:
    """A set of challenge-response pairs with precomputed feature vectors.

    ``challenges`` is uint8 ``(N, n)``, ``phi`` float64 ``(N, n + 1)`` and
    ``responses`` uint8 ``(N,)``. Arrays are made read-only on construction.
    """

    n: int
    k: int
    instance_seed: int
    role: str
    sampling_seed: int
    challenges: np.ndarray
    responses: np.ndarray
    phi: np.ndarray = None
    overlap_allowed: bool = False

    def __post_init__(self):
        if self.role not in ROLES:
            raise ContractError(f"role must be one of {ROLES}, got {self.role!r}")
        ch = np.array(self.challenges, dtype=np.uint8)
        if ch.ndim != 2 or ch.shape[1] != self.n:
            raise ContractError(f"challenges must have shape (N, {self.n}), got {ch.shape}")
        r = np.array(self.responses, dtype=np.uint8).reshape(-1)
        if r.shape[0] != ch.shape[0]:
            raise ContractError(f"{ch.shape[0]} challenges but {r.shape[0]} responses")
        if r.size and r.max() > 1:
            raise ContractError("response bits must be 0 or 1")
        phi = transform_challenges(ch) if self.phi is None else np.array(self.phi, dtype=np.float64)
        if phi.shape != (ch.shape[0], self.n + 1):
            raise ContractError(f"phi must have shape {(ch.shape[0], self.n + 1)}, got {phi.shape}")
        object.__setattr__(self, "challenges", _readonly(ch))
        object.__setattr__(self, "responses", _readonly(r))
        object.__setattr__(self, "phi", _readonly(phi))
        object.__setattr__(self, "overlap_allowed", bool(self.overlap_allowed))

    def __len__(self):
        return self.challenges.shape[0]

    @cached_property
    def phi_t8(self):
        """Features as a contiguous int8 ``(n + 1, N)`` block for the strict kernel."""
        return _readonly(np.ascontiguousarray(self.phi.T.astype(np.int8)))

    @property
    def instance_id(self):
        return (self.n, self.k, self.instance_seed)

    @property
    def size_label(self):
        return f"{self.k}x{self.n}"

    def verify(self, instance):
        """Number of stored responses that disagree with ``instance`` (0 for a valid set)."""
        return int(np.count_nonzero(instance.responses(self.phi) != self.responses))

    def __eq__(self, other):
        if not isinstance(other, CrpSet):
            return NotImplemented
        head = (self.n, self.k, self.instance_seed, self.role, self.sampling_seed, self.overlap_allowed)
        head_o = (other.n, other.k, other.instance_seed, other.role, other.sampling_seed, other.overlap_allowed)
        return (
            head == head_o
            and np.array_equal(self.challenges, other.challenges)
            and np.array_equal(self.responses, other.responses)
            and np.array_equal(self.phi, other.phi)
        )

    def __repr__(self):
        return f"CrpSet({self.size_label}, {self.role}, {len(self)} CRPs, instance_seed={self.instance_seed})"


def challenge_keys(challenges):
    """Hashable byte keys for challenge rows (bit-packed)."""
    packed = np.packbits(np.asarray(challenges, dtype=np.uint8), axis=1)
    return [row.tobytes() for row in packed]


def sample_challenges(n, count, seed):
    """The challenges ``generate_crp_set`` draws for a learning set with this seed."""
    return np.random.default_rng(check_seed(seed)).integers(0, 2, size=(count, n), dtype=np.uint8)


def generate_crp_set(instance, count, role="learning", seed=0, forbidden=None, require_disjoint=False):
    """Sample ``count`` challenges uniformly with replacement and record the responses.

    Parameters
    ----------
    instance : PufInstance
    count : int
    role : {"learning", "test"}
    seed : int
        Sampling seed (PCG64).
    forbidden : iterable of challenge arrays or CrpSet, optional
        Challenges a test set must avoid. Rejection sampling is used when
        ``2**n >= 2 * (len(forbidden) + count)``; otherwise overlap is allowed
        and recorded in ``overlap_allowed``.
    require_disjoint : bool
        Raise :class:`DisjointnessError` instead of allowing overlap.
    """
    if count < 1:
        raise ContractError(f"count must be >= 1, got {count}")
    if role not in ROLES:
        raise ContractError(f"role must be one of {ROLES}, got {role!r}")
    seed = check_seed(seed)
    n = instance.n
    rng = np.random.default_rng(seed)

    forbidden_keys = set()
    if forbidden is not None:
        sources = [forbidden] if isinstance(forbidden, (CrpSet, np.ndarray)) else list(forbidden)
        for src in sources:
            arr = src.challenges if isinstance(src, CrpSet) else np.atleast_2d(np.asarray(src, dtype=np.uint8))
            if arr.shape[1] != n:
                raise ContractError(f"forbidden challenges have width {arr.shape[1]}, expected {n}")
            forbidden_keys.update(challenge_keys(arr))

    overlap_allowed = False
    reject = False
    if role == "test" and forbidden_keys:
        # compare in integers: 2**n overflows floats for n >= 1024
        if (1 << n) >= 2 * (len(forbidden_keys) + count):
            reject = True
        elif require_disjoint:
            raise DisjointnessError(
                f"cannot draw {count} challenges disjoint from {len(forbidden_keys)} forbidden ones in a space of 2**{n}"
            )
        else:
            overlap_allowed = True

    if not reject:
        challenges = rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    else:
        kept = []
        have = 0
        while have < count:
            batch = rng.integers(0, 2, size=(count, n), dtype=np.uint8)
            ok = np.fromiter((key not in forbidden_keys for key in challenge_keys(batch)), dtype=bool, count=count)
            take = batch[ok][: count - have]
            kept.append(take)
            have += take.shape[0]
        challenges = np.concatenate(kept)

    phi = transform_challenges(challenges)
    responses = instance.responses(phi, strict=True)
    crps = CrpSet(
        n=n,
        k=instance.k,
        instance_seed=instance.seed,
        role=role,
        sampling_seed=seed,
        challenges=challenges,
        responses=responses,
        phi=phi,
        overlap_allowed=overlap_allowed,
    )
    if crps.verify(instance):
        raise AssertionError("generated responses failed re-verification")
    return crps
