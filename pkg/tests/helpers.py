"""Shared random-object generators for the test suite."""

from __future__ import annotations

import numpy as np

import temporalis as tp


def random_density(rng: np.random.Generator, dim: int) -> tp.DensityOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return tp.DensityOperator(rho / np.trace(rho))


def random_unitary(rng: np.random.Generator, dim: int) -> tp.UnitaryOp:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return tp.UnitaryOp(q)


def random_measurement(
    rng: np.random.Generator, dim: int, allow_degenerate: bool = True
) -> tp.ProjectiveMeasurement:
    """Random complete measurement; projector ranks are a random composition of dim."""
    basis = random_unitary(rng, dim).mat
    if allow_degenerate and dim > 1 and rng.random() < 0.4:
        n_groups = int(rng.integers(1, dim))
    else:
        n_groups = dim
    cuts = sorted(rng.choice(np.arange(1, dim), size=n_groups - 1, replace=False)) if n_groups > 1 else []
    bounds = [0, *cuts, dim]
    branches = []
    for k in range(n_groups):
        cols = basis[:, bounds[k]:bounds[k + 1]]
        branches.append((float(k), cols @ cols.conj().T))
    return tp.ProjectiveMeasurement(branches)


def random_pure_scenario(
    rng: np.random.Generator, dim: int, n_checkpoints: int
) -> tp.TemporalScenario:
    """Pure initial state, random unitary segments, random rank-1 observables."""
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    initial = tp.DensityOperator.pure(psi)
    segments = [random_unitary(rng, dim) for _ in range(n_checkpoints - 1)]
    labels = (1.0, -1.0) if dim == 2 else tuple(float(k) for k in range(dim))
    measurements = [
        tp.ProjectiveMeasurement.from_basis(labels, random_unitary(rng, dim).mat)
        for _ in range(n_checkpoints)
    ]
    return tp.TemporalScenario(initial, segments, measurements)
