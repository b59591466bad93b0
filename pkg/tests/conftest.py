import numpy as np
import pytest

from qorbit import DensityMatrix, SystemShape
from qorbit.bloch import BlochTensor


def pure_state(vec, dims) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(SystemShape(tuple(dims)), np.outer(v, v.conj()))


def qubit_from_bloch(a) -> np.ndarray:
    """2x2 density matrix 1/2 + a.sigma (needs |a| <= 1/2)."""
    a = np.asarray(a, dtype=float)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.eye(2, dtype=complex) / 2 + a[0] * sx + a[1] * sy + a[2] * sz


def product_state(*bloch_vectors) -> DensityMatrix:
    m = qubit_from_bloch(bloch_vectors[0])
    for a in bloch_vectors[1:]:
        m = np.kron(m, qubit_from_bloch(a))
    return DensityMatrix(SystemShape((2,) * len(bloch_vectors)), m)


def partial_trace(matrix: np.ndarray, dims: tuple, keep: tuple) -> np.ndarray:
    """Trace out every site not listed in ``keep`` (independent oracle)."""
    n = len(dims)
    t = np.asarray(matrix).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwx"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for site in range(n):
        if site not in keep:
            col[site] = row[site]
    out_row = "".join(row[s] for s in keep)
    out_col = "".join(col[s] for s in keep)
    sub = "".join(row) + "".join(col) + "->" + out_row + out_col
    d_keep = int(np.prod([dims[s] for s in keep]))
    return np.einsum(sub, t).reshape(d_keep, d_keep)


def jacobian_singular_values(t: BlochTensor, fn, step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian spectrum of an invariant map.

    Coordinates are rescaled to order one first so that mixing polynomial
    degrees does not skew the singular values.
    """
    scale = t.max_abs()
    flat = t.flatten() / scale
    rows = []
    for i in range(flat.size):
        up = flat.copy()
        up[i] += step
        dn = flat.copy()
        dn[i] -= step
        rows.append((fn(BlochTensor.from_flat(t.n, up)) - fn(BlochTensor.from_flat(t.n, dn))) / (2 * step))
    return np.linalg.svd(np.array(rows).T, compute_uv=False)


def gap_rank(singular_values: np.ndarray, gap: float = 1e-4) -> int:
    """Numerical rank located at the first consecutive relative gap below ``gap``."""
    s = np.asarray(singular_values)
    for k in range(len(s) - 1):
        if s[k + 1] < gap * s[k]:
            return k + 1
    return len(s)


@pytest.fixture
def bell() -> DensityMatrix:
    return pure_state([1, 0, 0, 1], (2, 2))


@pytest.fixture
def ghz() -> DensityMatrix:
    vec = np.zeros(8)
    vec[0] = vec[7] = 1
    return pure_state(vec, (2, 2, 2))
