"""Random tensor sampling, flattenings, permutation operators, and the
finite-size conditional expectation onto the group-algebra span.

Conventions shared by the whole package:
  * multi-indices linearize row-major: encode(i_1..i_k) = sum (i_j - 1) N^(k-j);
  * the flattening by sigma puts the tensor entry whose p-th coordinate is
    i_{sigma(p)} at matrix position (i_1..i_k), (i_{k+1}..i_{2k});
  * the permutation operator U_eta has entries U[i, j] = 1 iff j_s = i_{eta(s)}
    for all s, which makes eta -> U_eta a representation (U_eta U_eta2 =
    U_{eta eta2}) and yields U_eta M_sigma U_eta2^* = M_{(eta join eta2) sigma}
    exactly.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .group_algebra import AlgebraElement
from .perms import Permutation, embed_join

MAGIC = b"TFLAT1\x00"


class MultiIndexCodec:
    """Row-major linearization of [N]^k (1-based tuples)."""

    def __init__(self, N, k):
        self.N = N
        self.k = k

    def encode(self, tup):
        out = 0
        for v in tup:
            out = out * self.N + (v - 1)
        return out

    def decode(self, idx):
        out = []
        for _ in range(self.k):
            out.append(idx % self.N + 1)
            idx //= self.N
        return tuple(reversed(out))


def double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def complex_gaussian_base_moments(max_order=16):
    """Joint moments E[y^m conj(y)^n] of the standard complex Gaussian."""
    return {
        (m, n): float(math.factorial(m)) if m == n else 0.0
        for m in range(max_order + 1)
        for n in range(max_order + 1)
        if m + n <= max_order
    }


@dataclass(frozen=True)
class TensorModel:
    """Entry law of the random tensor.

    kind is one of "complex_ginibre", "real_ginibre", "diluted".  The diluted
    model multiplies a base variable y by an independent Bernoulli(p) mask,
    recenters, and rescales so the squared-entry normalization is exact at
    every N.
    """

    kind: str
    p: float = 1.0
    alpha: complex = 0.0
    beta2: float = 1.0
    base_scale: float = 1.0  # the sampled base variable is base_scale * (std complex Gaussian)
    base_moments: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("complex_ginibre", "real_ginibre", "diluted"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "diluted":
            if not (0 < self.p <= 1):
                raise ValueError(f"dilution probability {self.p} outside (0, 1]")
            if self.beta2 <= abs(self.alpha) ** 2 * self.p:
                raise ValueError("degenerate variance: beta2 <= |alpha|^2 p")
            if (1, 1) not in self.base_moments:
                raise ValueError("base_moments must include (1,1) = E|y|^2")

    @classmethod
    def complex_ginibre(cls):
        return cls("complex_ginibre")

    @classmethod
    def real_ginibre(cls):
        return cls("real_ginibre")

    @classmethod
    def diluted(cls, p, base_moments=None, alpha=None, beta2=None, base_scale=1.0):
        if base_moments is None:
            base_moments = {
                key: val * base_scale ** sum(key)
                for key, val in complex_gaussian_base_moments().items()
            }
        if alpha is None:
            alpha = complex(base_moments.get((1, 0), 0.0))
        if beta2 is None:
            beta2 = float(complex(base_moments[(1, 1)]).real)
        return cls("diluted", p=p, alpha=alpha, beta2=beta2,
                   base_scale=base_scale, base_moments=dict(base_moments))

    @property
    def c(self):
        """Limit of N^k E|entry|^2."""
        if self.kind in ("complex_ginibre", "real_ginibre"):
            return 1.0
        return self.beta2

    @property
    def c_prime(self):
        """Limit of N^k E[entry^2]."""
        if self.kind == "complex_ginibre":
            return 0.0
        if self.kind == "real_ginibre":
            return 1.0
        return complex(self.base_moments.get((2, 0), 0.0))

    def scale(self, N, k):
        """Per-entry normalization factor (entries are raw / scale)."""
        if self.kind in ("complex_ginibre", "real_ginibre"):
            return float(N) ** (k / 2.0)
        s2 = N**k * self.p * (self.beta2 - abs(self.alpha) ** 2 * self.p)
        return math.sqrt(s2 / self.beta2)

    def entry_moment(self, m, n, N, k):
        """Exact joint moment E[entry^m conj(entry)^n] at size N."""
        if m == 0 and n == 0:
            return 1.0
        if self.kind == "complex_ginibre":
            return math.factorial(m) * float(N) ** (-k * m) if m == n else 0.0
        if self.kind == "real_ginibre":
            if (m + n) % 2:
                return 0.0
            return double_factorial(m + n - 1) * float(N) ** (-k * (m + n) / 2.0)
        return self._diluted_moment(m, n) / self.scale(N, k) ** (m + n)

    def _diluted_moment(self, m, n):
        # E[(x - alpha p)^m (conj(x) - conj(alpha) p)^n] by binomial expansion,
        # with x = Bernoulli(p) * y so E[x^a conj(x)^b] = p E[y^a conj(y)^b]
        # whenever (a, b) != (0, 0).
        p, al = self.p, complex(self.alpha)
        total = 0.0 + 0.0j
        for a in range(m + 1):
            for b in range(n + 1):
                if a == 0 and b == 0:
                    raw = 1.0
                else:
                    key = (a, b)
                    if key not in self.base_moments:
                        raise ValueError(f"base moment {key} not provided")
                    raw = p * complex(self.base_moments[key])
                total += (
                    math.comb(m, a)
                    * math.comb(n, b)
                    * (-al * p) ** (m - a)
                    * (-al.conjugate() * p) ** (n - b)
                    * raw
                )
        return total

    def describe(self):
        out = {"kind": self.kind, "c": self.c,
               "c_prime": [complex(self.c_prime).real, complex(self.c_prime).imag]}
        if self.kind == "diluted":
            out["p"] = self.p
            out["alpha"] = [complex(self.alpha).real, complex(self.alpha).imag]
            out["beta2"] = self.beta2
        return out


@dataclass(frozen=True)
class RandomTensor:
    N: int
    k: int
    entries: np.ndarray  # shape (N,) * 2k, complex

    def entry(self, tup):
        return self.entries[tuple(v - 1 for v in tup)]


@dataclass(frozen=True)
class FlatMatrix:
    N: int
    k: int
    data: np.ndarray  # (N^k, N^k) complex

    @property
    def side(self):
        return self.N**self.k

    def adjoint(self):
        return FlatMatrix(self.N, self.k, self.data.conj().T)

    def transpose(self):
        return FlatMatrix(self.N, self.k, self.data.T)


def trial_rng(seed, trial=0):
    """Independent, reproducible stream for one Monte Carlo trial."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample_tensor(model, N, k, seed, trial=0):
    rng = trial_rng(seed, trial)
    shape = (N,) * (2 * k)
    if model.kind == "complex_ginibre":
        raw = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    elif model.kind == "real_ginibre":
        raw = rng.standard_normal(shape).astype(complex)
    else:
        base = (
            model.base_scale
            * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
            / math.sqrt(2)
        )
        mask = rng.random(shape) < model.p
        raw = mask * base - model.alpha * model.p
    return RandomTensor(N, k, raw / model.scale(N, k))


def flatten(t, sigma):
    """The flattening whose (rows, cols) entry is the tensor at the tuple
    with p-th coordinate i_{sigma(p)}."""
    if sigma.n != 2 * t.k:
        raise ValueError(f"degree {sigma.n} != 2k = {2 * t.k}")
    inv = sigma.inverse()
    axes = [inv(p) - 1 for p in range(1, 2 * t.k + 1)]
    side = t.N**t.k
    return FlatMatrix(t.N, t.k, t.entries.transpose(axes).reshape(side, side))


def tuple_index_map(eta, N):
    """Index array m with m[encode(i)] = encode(j), j_s = i_{eta(s)}."""
    k = eta.n
    coords = np.unravel_index(np.arange(N**k), (N,) * k)
    permuted = tuple(coords[eta(s) - 1] for s in range(1, k + 1))
    return np.ravel_multi_index(permuted, (N,) * k)


def perm_matrix(eta, N):
    """Dense permutation operator U_eta on the k-fold tensor power."""
    side = N**eta.n
    data = np.zeros((side, side))
    data[np.arange(side), tuple_index_map(eta, N)] = 1.0
    return FlatMatrix(N, eta.n, data.astype(complex))


def apply_perm_left(eta, A):
    """U_eta @ A via row gathering (no dense matmul)."""
    return A[tuple_index_map(eta, _N_of(A, eta.n))]


def _N_of(A, k):
    side = A.shape[0]
    N = round(side ** (1.0 / k))
    for cand in (N - 1, N, N + 1):
        if cand >= 1 and cand**k == side:
            return cand
    raise ValueError(f"side {side} is not a perfect k-th power for k={k}")


def apply_perm_right(A, eta):
    """A @ U_eta via column gathering."""
    return A[:, tuple_index_map(eta.inverse(), _N_of(A, eta.n))]


def phi_N(A):
    """Normalized trace of a single sample (no expectation)."""
    data = A.data if isinstance(A, FlatMatrix) else A
    if data.shape[0] != data.shape[1]:
        raise ValueError("matrix is not square")
    return complex(np.trace(data)) / data.shape[0]


def cond_expect_N(A, k=None):
    """Project onto the span of permutation operators: the coefficient of
    u_eta is the normalized trace of A U_eta^*, computed by a permuted
    diagonal sum."""
    if isinstance(A, FlatMatrix):
        data, k = A.data, A.k
    else:
        data = A
        if k is None:
            raise ValueError("k required for raw arrays")
    if data.shape[0] != data.shape[1]:
        raise ValueError("matrix is not square")
    N = _N_of(data, k)
    if N < k:
        warnings.warn(
            f"N={N} < k={k}: permutation operators are linearly dependent; "
            "coefficients are not a unique decomposition",
            stacklevel=2,
        )
    side = data.shape[0]
    rows = np.arange(side)
    coeffs = {}
    from .perms import group

    for eta in group(k):
        # trace(A U_{eta^{-1}}) = sum_i A[i, m_eta[i]] with m the tuple map
        coeffs[eta] = complex(data[rows, tuple_index_map(eta, N)].sum()) / side
    return AlgebraElement(k, coeffs)


def word_eval(t, word):
    """Product of flattening letters: each step multiplies by the flattening
    (or its adjoint) and then by the permutation operator of the step.

    word is a list of (sigma, eps, eta) with eps in {"1", "*"} (1 accepted).
    """
    side = t.N**t.k
    out = np.eye(side, dtype=complex)
    for sigma, eps, eta in word:
        m = flatten(t, sigma).data
        if eps in ("*", "star"):
            m = m.conj().T
        elif eps not in ("1", 1):
            raise ValueError(f"bad eps {eps!r}")
        out = out @ m
        if not eta.is_identity():
            out = apply_perm_right(out, eta)
    return FlatMatrix(t.N, t.k, out)


def choi_check(N, k):
    """Positivity and idempotency certificate for the conditional expectation.

    Builds C = sum_eta U_eta tensor conj(U_eta) and returns its smallest
    eigenvalue together with the max-norm defect of C^2 - k! C.
    """
    if N ** (2 * k) > 4096:
        raise ValueError(f"Choi matrix side N^(2k) = {N ** (2 * k)} exceeds guard 4096")
    from .perms import group

    side = N ** (2 * k)
    C = np.zeros((side, side), dtype=complex)
    for eta in group(k):
        U = perm_matrix(eta, N).data
        C += np.kron(U, U.conj())
    min_eig = float(np.linalg.eigvalsh(C).min())
    defect = float(np.abs(C @ C - math.factorial(k) * C).max())
    return min_eig, defect


# --- binary / CSV export -------------------------------------------------

_KIND_TENSOR = 0
_KIND_MATRIX = 1


def _write_header(fh, kind, N, k):
    fh.write(MAGIC)
    fh.write(struct.pack("<BIIB", kind, N, k, 0))  # dtype 0 = complex float64


def _read_header(fh):
    magic = fh.read(len(MAGIC))
    if magic != MAGIC:
        raise ValueError("bad magic; not a tensorflat binary file")
    kind, N, k, dtype = struct.unpack("<BIIB", fh.read(10))
    if dtype != 0:
        raise ValueError(f"unsupported dtype code {dtype}")
    return kind, N, k


def _write_payload(fh, arr):
    flat = np.ascontiguousarray(arr, dtype=complex).reshape(-1)
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    fh.write(inter.tobytes())


def _read_payload(fh, count):
    inter = np.frombuffer(fh.read(16 * count), dtype="<f8")
    return inter[0::2] + 1j * inter[1::2]


def save_tensor(path, t):
    with open(path, "wb") as fh:
        _write_header(fh, _KIND_TENSOR, t.N, t.k)
        _write_payload(fh, t.entries)


def load_tensor(path):
    with open(path, "rb") as fh:
        kind, N, k = _read_header(fh)
        if kind != _KIND_TENSOR:
            raise ValueError("file does not contain a tensor")
        flat = _read_payload(fh, N ** (2 * k))
    return RandomTensor(N, k, flat.reshape((N,) * (2 * k)))


def save_matrix(path, m):
    with open(path, "wb") as fh:
        _write_header(fh, _KIND_MATRIX, m.N, m.k)
        _write_payload(fh, m.data)


def load_matrix(path):
    with open(path, "rb") as fh:
        kind, N, k = _read_header(fh)
        if kind != _KIND_MATRIX:
            raise ValueError("file does not contain a matrix")
        flat = _read_payload(fh, N ** (2 * k))
    side = N**k
    return FlatMatrix(N, k, flat.reshape(side, side))


def matrix_to_csv(m, max_side=64):
    if m.side > max_side:
        raise ValueError(f"matrix side {m.side} too large for CSV export")
    lines = []
    for row in m.data:
        lines.append(",".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in row))
    return "\n".join(lines) + "\n"
