"""Spectral experiments: normalized sums of all flattenings and their
trace-power moments against the predicted diluted limit laws.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .moments import predicted_moments
from .perms import group
from .tensors import FlatMatrix, flatten, phi_N, sample_tensor


def build_target(t, which, model):
    """One of the three normalized all-flattening sums.

    S1 sums every flattening, S2 weights by signature, S3 symmetrizes with
    the adjoints (Hermitian).  Normalizations make the limiting nonzero
    spectral component have unit variance.
    """
    k = t.k
    side = t.N**k
    total = np.zeros((side, side), dtype=complex)
    c = model.c
    if which == "S1":
        for sigma in group(2 * k):
            total += flatten(t, sigma).data
        total /= math.sqrt(math.factorial(2 * k) * math.factorial(k) * c)
    elif which == "S2":
        for sigma in group(2 * k):
            total += sigma.signature() * flatten(t, sigma).data
        total /= math.sqrt(math.factorial(2 * k) * math.factorial(k) * c)
    elif which == "S3":
        denom = (
            math.factorial(2 * k)
            * math.factorial(k)
            * 2
            * (c + complex(model.c_prime).real)
        )
        if denom <= 0:
            raise ValueError("c + Re c' must be positive for the Hermitian target")
        for sigma in group(2 * k):
            m = flatten(t, sigma).data
            total += m + m.conj().T
        total /= math.sqrt(denom)
    else:
        raise ValueError(f"unknown target {which!r}")
    return FlatMatrix(t.N, t.k, total)


def trace_power_moments(A, hermitian, n_max):
    """Normalized traces of (A A*)^n, or of A^n when the matrix is declared
    Hermitian, by iterated multiplication (no eigendecomposition)."""
    if n_max > 12:
        raise ValueError("n_max exceeds guard 12")
    data = A.data if isinstance(A, FlatMatrix) else A
    side = data.shape[0]
    if hermitian:
        if np.abs(data - data.conj().T).max() > 1e-10:
            raise ValueError("matrix declared hermitian is not")
        base = data
    else:
        base = data @ data.conj().T
    out = []
    power = base
    for n in range(1, n_max + 1):
        out.append(complex(np.trace(power)) / side)
        if n < n_max:
            power = power @ base
    return out


def empirical_spectrum(A, hermitian):
    """Sorted real eigenvalues of A (Hermitian) or of A A*."""
    data = A.data if isinstance(A, FlatMatrix) else A
    if data.shape[0] > 4096:
        raise ValueError("matrix side exceeds eigensolver guard 4096")
    if hermitian:
        if np.abs(data - data.conj().T).max() > 1e-10:
            raise ValueError("matrix declared hermitian is not")
        target = data
    else:
        target = data @ data.conj().T
    return np.sort(np.linalg.eigvalsh(target))


def histogram(values, side):
    """Freedman-Diaconis histogram plus the mass near zero reported apart."""
    values = np.asarray(values)
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    width = 2 * iqr / len(values) ** (1 / 3) if iqr > 0 else None
    if width and width > 0:
        nbins = max(1, int(math.ceil((values.max() - values.min()) / width)))
        nbins = min(nbins, 512)
    else:
        nbins = 32
    counts, edges = np.histogram(values, bins=nbins)
    delta = 3 * iqr / side if iqr > 0 else 1e-3
    zero_mass = int(np.sum(np.abs(values) <= delta))
    return {
        "edges": edges.tolist(),
        "counts": counts.tolist(),
        "zero_band": delta,
        "zero_mass": zero_mass,
    }


@dataclass
class SpectralReport:
    target: str
    model: dict
    N: int
    k: int
    trials: int
    n_max: int
    seed: int
    rows: list = field(default_factory=list)  # (n, empirical, stderr, predicted)
    hist: dict = None

    def to_json(self):
        return json.dumps(
            {
                "target": self.target,
                "model": self.model,
                "N": self.N,
                "k": self.k,
                "trials": self.trials,
                "n_max": self.n_max,
                "seed": self.seed,
                "moments": [
                    {
                        "n": n,
                        "empirical": emp,
                        "stderr": se,
                        "predicted": pred,
                    }
                    for n, emp, se, pred in self.rows
                ],
                "histogram": self.hist,
            },
            indent=2,
            sort_keys=True,
        )

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["n", "predicted", "empirical", "stderr"])
        for n, emp, se, pred in self.rows:
            writer.writerow([n, pred, emp, se])
        return buf.getvalue()


def run_experiment(model, which, k, N, trials, n_max, seed, with_hist=False):
    """Trial-averaged moments of a spectral target with standard errors and
    the predicted limiting column."""
    hermitian = which == "S3"
    samples = np.zeros((trials, n_max))
    pooled = [] if with_hist else None
    for trial in range(trials):
        t = sample_tensor(model, N, k, seed, trial)
        A = build_target(t, which, model)
        moms = trace_power_moments(A, hermitian, n_max)
        samples[trial] = [m.real for m in moms]
        if with_hist:
            pooled.extend(empirical_spectrum(A, hermitian).tolist())
    means = samples.mean(axis=0)
    stderr = (
        samples.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(n_max)
    )
    predicted = predicted_moments(which, k, n_max)
    report = SpectralReport(
        target=which,
        model=model.describe(),
        N=N,
        k=k,
        trials=trials,
        n_max=n_max,
        seed=seed,
        rows=[
            (n + 1, float(means[n]), float(stderr[n]), float(predicted[n]))
            for n in range(n_max)
        ],
    )
    if with_hist:
        report.hist = histogram(np.array(pooled), N**k)
    return report


def histogram_svg(hist, width=640, height=360):
    """Minimal standalone SVG bar plot of a histogram dictionary."""
    counts = hist["counts"]
    edges = hist["edges"]
    if not counts:
        return "<svg xmlns='http://www.w3.org/2000/svg'/>"
    peak = max(counts) or 1
    x0, x1 = edges[0], edges[-1]
    span = (x1 - x0) or 1.0
    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}' "
        f"viewBox='0 0 {width} {height}'>",
        f"<rect width='{width}' height='{height}' fill='white'/>",
    ]
    pad = 30
    for i, cnt in enumerate(counts):
        bx = pad + (edges[i] - x0) / span * (width - 2 * pad)
        bw = max(1.0, (edges[i + 1] - edges[i]) / span * (width - 2 * pad))
        bh = cnt / peak * (height - 2 * pad)
        parts.append(
            f"<rect x='{bx:.2f}' y='{height - pad - bh:.2f}' width='{bw:.2f}' "
            f"height='{bh:.2f}' fill='steelblue'/>"
        )
    parts.append(
        f"<line x1='{pad}' y1='{height - pad}' x2='{width - pad}' "
        f"y2='{height - pad}' stroke='black'/>"
    )
    parts.append("</svg>")
    return "".join(parts)
