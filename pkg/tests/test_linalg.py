"""Shifted-system solver: oracles, monotonicity and conservation laws."""

import numpy as np
import pytest

from acfv.assembly import assemble_mass, assemble_stiffness
from acfv.errors import NumericalFailure
from acfv.linalg import DENSE_LIMIT, ShiftedSolver, pcg
from acfv.mesh import build_uniform_mesh


def make_solver(L, tau):
    mesh = build_uniform_mesh(L)
    return ShiftedSolver(assemble_mass(mesh), assemble_stiffness(mesh), tau)


def test_constants_are_fixed_points():
    rng = np.random.default_rng(3)
    for L in (1, 2, 3, 5, 7):
        tau = float(rng.uniform(0.01, 2.0))
        solver = make_solver(L, tau)
        out = solver.apply_markov(np.ones(L * L))
        np.testing.assert_allclose(out, 1.0, atol=1e-13)
        c = float(rng.uniform(-3, 3))
        np.testing.assert_allclose(solver.apply_markov(np.full(L * L, c)), c, atol=1e-12)


def test_eigen_decomposition_oracle_two_by_two():
    # Spectral oracle: on the 2x2 mesh M = I, so (M + tau A)^{-1} M has the
    # known eigenvectors of A with eigenvalues 1/(1 + tau lam).
    tau = 0.5
    solver = make_solver(2, tau)
    w = np.array([0.34392, 0.09673, 0.90535, 0.32785])
    basis = 0.5 * np.array([
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ])
    lams = np.array([0.0, 2.0, 2.0, 4.0])
    coeffs = basis @ w
    oracle = basis.T @ (coeffs / (1.0 + tau * lams))
    got = solver.apply_markov(w)
    np.testing.assert_allclose(got, oracle, rtol=1e-12)
    assert got[0] == pytest.approx(0.39495, abs=2e-5)


def test_against_dense_elimination_oracle():
    rng = np.random.default_rng(17)
    for L in (1, 2, 3, 4):
        for _ in range(5):
            tau = float(rng.uniform(0.01, 1.0))
            solver = make_solver(L, tau)
            b = rng.standard_normal(L * L)
            expected = np.linalg.solve(solver.shifted.toarray(), b)
            np.testing.assert_allclose(solver.solve(b), expected, atol=1e-10)


def test_iterative_path_matches_dense_oracle():
    # 100 cells exceeds the dense threshold, exercising conjugate gradients.
    L = 10
    assert L * L > DENSE_LIMIT
    solver = make_solver(L, 0.37)
    rng = np.random.default_rng(23)
    b = rng.standard_normal(L * L)
    x = solver.solve(b)
    expected = np.linalg.solve(solver.shifted.toarray(), b)
    np.testing.assert_allclose(x, expected, atol=1e-10)
    assert np.linalg.norm(solver.shifted @ x - b) <= 1e-12 * np.linalg.norm(b)


def test_positivity_preservation():
    rng = np.random.default_rng(29)
    solvers = {L: make_solver(L, float(rng.uniform(0.01, 1.0))) for L in range(1, 9)}
    worst = np.inf
    for _ in range(1000):
        L = int(rng.integers(1, 9))
        x = rng.uniform(0.0, 5.0, size=L * L)
        worst = min(worst, solvers[L].apply_markov(x).min())
    assert worst >= -1e-12


def test_mass_conservation():
    rng = np.random.default_rng(31)
    for L in (1, 3, 6):
        mesh = build_uniform_mesh(L)
        mass = assemble_mass(mesh)
        solver = ShiftedSolver(mass, assemble_stiffness(mesh), 0.25)
        for _ in range(50):
            x = rng.standard_normal(L * L)
            before = mass @ x
            after = mass @ solver.apply_markov(x)
            assert abs(after - before) <= 1e-10 * max(abs(before), 1.0)


def test_markov_nonexpansive_in_mass_norm():
    rng = np.random.default_rng(37)
    for L in (2, 4, 5):
        mesh = build_uniform_mesh(L)
        mass = assemble_mass(mesh)
        solver = ShiftedSolver(mass, assemble_stiffness(mesh), 0.6)
        for _ in range(100):
            x = rng.standard_normal(L * L)
            y = rng.standard_normal(L * L)
            gap_in = np.sqrt(((x - y) ** 2 * mass).sum())
            out = solver.apply_markov(x) - solver.apply_markov(y)
            gap_out = np.sqrt((out ** 2 * mass).sum())
            assert gap_out <= gap_in * (1 + 1e-12)


def test_stacked_solves_match_rowwise():
    solver = make_solver(3, 0.2)
    rng = np.random.default_rng(41)
    B = rng.standard_normal((7, 9))
    stacked = solver.solve(B)
    rowwise = np.vstack([solver.solve(row) for row in B])
    np.testing.assert_allclose(stacked, rowwise, rtol=1e-13, atol=1e-15)


def test_pcg_reports_failure_with_residual():
    matrix = np.diag([1.0, 1e8])
    with pytest.raises(NumericalFailure) as info:
        pcg(matrix, np.array([1.0, 1.0]), np.ones(2), rtol=1e-16, max_iter=1)
    assert info.value.residual is not None
    assert info.value.residual > 0


def test_zero_rhs_gives_zero():
    solver = make_solver(9, 0.5)
    np.testing.assert_array_equal(solver.solve(np.zeros(81)), np.zeros(81))


def test_rejects_bad_tau():
    mesh = build_uniform_mesh(2)
    with pytest.raises(ValueError):
        ShiftedSolver(assemble_mass(mesh), assemble_stiffness(mesh), 0.0)
