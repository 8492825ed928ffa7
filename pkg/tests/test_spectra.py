import json
import math

import numpy as np
import pytest

from tensorflat.perms import Permutation, group
from tensorflat.spectra import (
    build_target,
    empirical_spectrum,
    histogram,
    histogram_svg,
    run_experiment,
    trace_power_moments,
)
from tensorflat.tensors import (
    FlatMatrix,
    TensorModel,
    perm_matrix,
    phi_N,
    sample_tensor,
)

CG = TensorModel.complex_ginibre()


def test_hermitian_target_is_hermitian():
    t = sample_tensor(CG, 4, 2, 0)
    A = build_target(t, "S3", CG)
    assert np.abs(A.data - A.data.conj().T).max() == 0


def test_target_invariant_under_permutation_operators():
    t = sample_tensor(CG, 3, 2, 1)
    A = build_target(t, "S1", CG).data
    for eta in group(2):
        for eta2 in group(2):
            U = perm_matrix(eta, 3).data
            U2 = perm_matrix(eta2, 3).data
            assert np.abs(U @ A @ U2.conj().T - A).max() <= 1e-12


def test_trace_power_moments_basics():
    eye = FlatMatrix(3, 1, np.eye(3, dtype=complex))
    assert trace_power_moments(eye, True, 3) == [1, 1, 1]
    zero = FlatMatrix(3, 1, np.zeros((3, 3), dtype=complex))
    assert trace_power_moments(zero, False, 3) == [0, 0, 0]


def test_first_moment_is_frobenius_norm():
    rng = np.random.default_rng(2)
    data = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    A = FlatMatrix(3, 2, data)
    m1 = trace_power_moments(A, False, 1)[0]
    assert abs(m1 - (np.abs(data) ** 2).sum() / 9) <= 1e-12


def test_moment_spectrum_consistency():
    t = sample_tensor(CG, 3, 2, 3)
    for which, herm in (("S1", False), ("S3", True)):
        A = build_target(t, which, CG)
        eigs = empirical_spectrum(A, herm)
        moms = trace_power_moments(A, herm, 4)
        for n in range(1, 5):
            assert abs((eigs**n).sum() / A.side - moms[n - 1]) <= 1e-8


def test_empirical_spectrum_diag():
    diag = FlatMatrix(5, 1, np.diag([5.0, 3, 1, 4, 2]).astype(complex))
    assert np.allclose(empirical_spectrum(diag, True), [1, 2, 3, 4, 5])
    nonh = FlatMatrix(2, 1, np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        empirical_spectrum(nonh, True)


def test_normalization_invariance():
    # scaling the base law and dividing by the declared variance must give
    # identical moments for the same seed
    base = TensorModel.diluted(1.0)
    scaled = TensorModel.diluted(1.0, base_scale=3.0)
    assert scaled.c == pytest.approx(9.0)
    for trial in range(2):
        t1 = sample_tensor(base, 3, 1, 13, trial)
        t2 = sample_tensor(scaled, 3, 1, 13, trial)
        m1 = trace_power_moments(build_target(t1, "S1", base), False, 3)
        m2 = trace_power_moments(build_target(t2, "S1", scaled), False, 3)
        assert np.allclose(m1, m2, atol=1e-10)


def test_run_experiment_small():
    report = run_experiment(CG, "S1", 1, 16, 8, 3, seed=4, with_hist=True)
    assert len(report.rows) == 3
    # pure square case: first moment close to 1
    n, emp, se, pred = report.rows[0]
    assert pred == 1.0
    assert abs(emp - 1.0) <= max(5 * se, 0.2)
    payload = json.loads(report.to_json())
    assert payload["N"] == 16 and payload["seed"] == 4
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "n,predicted,empirical,stderr"
    assert report.hist["zero_mass"] >= 0


def test_s2_matches_s1_statistics():
    moments1 = run_experiment(CG, "S1", 1, 12, 10, 2, seed=5).rows
    moments2 = run_experiment(CG, "S2", 1, 12, 10, 2, seed=6).rows
    for (n1, e1, s1, _), (n2, e2, s2, _) in zip(moments1, moments2):
        assert abs(e1 - e2) <= 2 * (s1 + s2) + 0.1


def test_zero_atom_visible_in_spectrum():
    t = sample_tensor(CG, 16, 2, 7)
    A = build_target(t, "S3", CG)
    eigs = empirical_spectrum(A, True)
    frac = np.mean(np.abs(eigs) <= 0.05)
    assert frac >= 0.4  # half the spectrum collapses at zero in the limit


def test_histogram_and_svg():
    rng = np.random.default_rng(8)
    hist = histogram(rng.standard_normal(500), 500)
    assert sum(hist["counts"]) == 500
    svg = histogram_svg(hist)
    assert svg.startswith("<svg") and svg.endswith("</svg>")
