"""Shared helpers: random point/matrix generators and independent oracles."""

import numpy as np

from gaussvol.states import symplectic_form
from gaussvol.twomode import DomainTag, canonical_embed, domain_mask

ACCEPTANCE_LINES = []


def record_criterion(number: int, ok: bool, detail: str) -> str:
    """Collect one acceptance-criterion verdict for the terminal summary."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_covariance(rng, dim: int, spread: float = 1.0, shift: float = 0.1) -> np.ndarray:
    """Random symmetric positive definite matrix with controlled conditioning."""
    W = rng.normal(size=(dim, dim)) * spread
    V = W @ W.T / dim + shift * np.eye(dim)
    return 0.5 * (V + V.T)


def sample_canonical(rng, n: int, tag: DomainTag, margin: float = 1e-6,
                     box=(4.0, 4.0, 4.0, 4.0)) -> np.ndarray:
    """Rejection-sample (n, 4) standard-form points strictly inside a domain.

    A negative tolerance of ``-margin`` shrinks the domain, so every returned
    point sits at least ``margin`` away from the inequality boundaries.
    """
    out = np.empty((n, 4))
    have = 0
    while have < n:
        k = max(4 * (n - have), 1024)
        a = rng.uniform(0.0, box[0], k)
        b = rng.uniform(0.0, box[1], k)
        c = rng.uniform(-box[2], box[2], k)
        d = rng.uniform(-box[3], box[3], k)
        keep = domain_mask(a, b, c, d, tag, -margin)
        idx = np.flatnonzero(keep)[: n - have]
        out[have : have + idx.size] = np.column_stack([a[idx], b[idx], c[idx], d[idx]])
        have += idx.size
    return out


def embed_points(pts: np.ndarray) -> np.ndarray:
    """Stack of covariance matrices for an (n, 4) array of canonical points."""
    return np.stack([canonical_embed(p) for p in pts])


def uncertainty_oracle(V: np.ndarray, tol: float = 1e-9) -> bool:
    """Quantum check through the real embedding of V + i*Omega.

    The Hermitian matrix V + i*Omega is positive semidefinite exactly when the
    real symmetric block matrix [[V, -Omega], [Omega, V]] is, which avoids any
    complex arithmetic and gives an oracle independent of symplectic spectra.
    """
    V = np.asarray(V, dtype=float)
    omega = symplectic_form(V.shape[0] // 2)
    M = np.block([[V, -omega], [omega, V]])
    return bool(np.linalg.eigvalsh(M)[0] >= -tol)
