"""Local unitary transformations and their action on Bloch tensors.

Conjugating one qubit by u in SU(2) rotates that site's Bloch indices by
the 3x3 rotation O_ij = tr(sigma_i u sigma_j u^dag) / 2; this module
realizes both directions of that double cover (adjoint_rotation and
lift_rotation) and applies per-site rotations to coefficient tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import PAULI, BlochTensor
from .errors import (
    NotSpecialOrthogonal,
    NotSpecialUnitary,
    ShapeMismatch,
)
from .states import DensityMatrix, SystemShape

UNITARITY_TOL = 1e-12
SPECIAL_TOL = 1e-10


@dataclass(frozen=True)
class LocalUnitary:
    """One unitary factor per site of a system shape."""

    shape: SystemShape
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.factors) != self.shape.n:
            raise ShapeMismatch(
                f"{len(self.factors)} factors for {self.shape.n} sites"
            )
        factors = []
        for r, (d, u) in enumerate(zip(self.shape.dims, self.factors)):
            u = np.array(u, dtype=complex)
            if u.shape != (d, d):
                raise ShapeMismatch(f"factor {r} has shape {u.shape}, expected ({d}, {d})")
            dev = float(np.max(np.abs(u @ u.conj().T - np.eye(d))))
            if dev > UNITARITY_TOL:
                raise NotSpecialUnitary(
                    f"factor {r}: max |u u^dag - 1| = {dev:.3e}", margin=dev
                )
            u.setflags(write=False)
            factors.append(u)
        object.__setattr__(self, "factors", tuple(factors))

    def full_matrix(self) -> np.ndarray:
        out = self.factors[0]
        for u in self.factors[1:]:
            out = np.kron(out, u)
        return out


@dataclass(frozen=True)
class RotationTriple:
    """Per-site 3x3 special orthogonal matrices (one to three sites)."""

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 1 <= len(self.mats) <= 3:
            raise ShapeMismatch("rotation set covers 1-3 sites")
        mats = []
        for r, o in enumerate(self.mats):
            o = np.array(o, dtype=float)
            if o.shape != (3, 3):
                raise ShapeMismatch(f"rotation {r} has shape {o.shape}")
            dev = float(np.max(np.abs(o.T @ o - np.eye(3))))
            det_dev = abs(float(np.linalg.det(o)) - 1.0)
            if dev > UNITARITY_TOL or det_dev > UNITARITY_TOL:
                raise NotSpecialOrthogonal(
                    f"rotation {r}: orthogonality residue {dev:.3e}, |det - 1| = {det_dev:.3e}",
                    margin=max(dev, det_dev),
                )
            o.setflags(write=False)
            mats.append(o)
        object.__setattr__(self, "mats", tuple(mats))

    @property
    def n(self) -> int:
        return len(self.mats)

    @classmethod
    def identity(cls, n: int) -> "RotationTriple":
        return cls(tuple(np.eye(3) for _ in range(n)))


def apply(u: LocalUnitary, rho: DensityMatrix) -> DensityMatrix:
    """Conjugate rho by the tensor product of the per-site factors."""
    if u.shape != rho.shape:
        raise ShapeMismatch(f"unitary over {u.shape}, state over {rho.shape}")
    full = u.full_matrix()
    return DensityMatrix(rho.shape, full @ rho.matrix @ full.conj().T)


def haar_local(shape: SystemShape, seed: int = 0) -> LocalUnitary:
    """Independent Haar-distributed factor per site, deterministic per seed.

    Each factor is the Q of a QR factorization of a complex Ginibre matrix
    with the phase fixed so the triangular factor has positive real
    diagonal (which makes the draw Haar). Qubit factors are rescaled to
    determinant one.
    """
    rng = np.random.default_rng(seed)
    factors = []
    for d in shape.dims:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(g)
        phases = np.diag(r).copy()
        phases /= np.abs(phases)
        q = q * phases
        if d == 2:
            q = q / np.sqrt(np.linalg.det(q))
        factors.append(q)
    return LocalUnitary(shape, tuple(factors))


def adjoint_rotation(u) -> np.ndarray:
    """The SO(3) rotation induced on the Bloch vector by u in SU(2)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ShapeMismatch(f"expected a 2x2 matrix, got {u.shape}")
    det_dev = abs(complex(np.linalg.det(u)) - 1.0)
    unit_dev = float(np.max(np.abs(u @ u.conj().T - np.eye(2))))
    if det_dev > SPECIAL_TOL or unit_dev > SPECIAL_TOL:
        raise NotSpecialUnitary(
            f"|det - 1| = {det_dev:.3e}, unitarity residue {unit_dev:.3e}",
            margin=max(det_dev, unit_dev),
        )
    conj = np.einsum("ab,jbc,dc->jad", u, PAULI, u.conj())
    return np.einsum("iab,jba->ij", PAULI, conj).real / 2.0


def lift_rotation(o) -> np.ndarray:
    """An SU(2) element whose adjoint rotation is the given SO(3) matrix.

    Either preimage of the double cover works; the branch is fixed by
    requiring a nonnegative real part on the first nonzero quaternion
    component, so the lift is deterministic.
    """
    o = np.asarray(o, dtype=float)
    if o.shape != (3, 3):
        raise ShapeMismatch(f"expected a 3x3 matrix, got {o.shape}")
    orth_dev = float(np.max(np.abs(o.T @ o - np.eye(3))))
    det_dev = abs(float(np.linalg.det(o)) - 1.0)
    if orth_dev > SPECIAL_TOL or det_dev > SPECIAL_TOL:
        raise NotSpecialOrthogonal(
            f"orthogonality residue {orth_dev:.3e}, |det - 1| = {det_dev:.3e}",
            margin=max(orth_dev, det_dev),
        )
    t = float(np.trace(o))
    # Largest-component quaternion extraction for numerical stability.
    candidates = [1.0 + t, 1.0 + 2.0 * o[0, 0] - t, 1.0 + 2.0 * o[1, 1] - t, 1.0 + 2.0 * o[2, 2] - t]
    best = int(np.argmax(candidates))
    q = np.empty(4)
    if best == 0:
        w = 0.5 * np.sqrt(max(candidates[0], 0.0))
        q[:] = (w, (o[2, 1] - o[1, 2]) / (4 * w), (o[0, 2] - o[2, 0]) / (4 * w), (o[1, 0] - o[0, 1]) / (4 * w))
    elif best == 1:
        x = 0.5 * np.sqrt(max(candidates[1], 0.0))
        q[:] = ((o[2, 1] - o[1, 2]) / (4 * x), x, (o[0, 1] + o[1, 0]) / (4 * x), (o[0, 2] + o[2, 0]) / (4 * x))
    elif best == 2:
        y = 0.5 * np.sqrt(max(candidates[2], 0.0))
        q[:] = ((o[0, 2] - o[2, 0]) / (4 * y), (o[0, 1] + o[1, 0]) / (4 * y), y, (o[1, 2] + o[2, 1]) / (4 * y))
    else:
        z = 0.5 * np.sqrt(max(candidates[3], 0.0))
        q[:] = ((o[1, 0] - o[0, 1]) / (4 * z), (o[0, 2] + o[2, 0]) / (4 * z), (o[1, 2] + o[2, 1]) / (4 * z), z)
    q /= np.linalg.norm(q)
    for component in q:
        if abs(component) > 1e-12:
            if component < 0:
                q = -q
            break
    w, x, y, z = q
    return np.array(
        [[w - 1j * z, -y - 1j * x], [y - 1j * x, w + 1j * z]], dtype=complex
    )


def lift_rotations(rotations: RotationTriple) -> LocalUnitary:
    """Lift every per-site rotation; the result acts on an n-qubit system."""
    shape = SystemShape((2,) * rotations.n)
    return LocalUnitary(shape, tuple(lift_rotation(o) for o in rotations.mats))


def transform_bloch(t: BlochTensor, rotations: RotationTriple) -> BlochTensor:
    """Apply per-site rotations to every component of a Bloch tensor.

    Vectors rotate by their site's matrix, pair matrices by the two
    matrices on either index, and the triple tensor contracts one rotation
    into each index.
    """
    if rotations.n != t.n:
        raise ShapeMismatch(f"{rotations.n} rotations for an n={t.n} tensor")
    mats = rotations.mats
    if t.n == 1:
        return BlochTensor(n=1, alpha=mats[0] @ t.alpha)
    if t.n == 2:
        l, m = mats
        return BlochTensor(
            n=2,
            alpha=l @ t.alpha,
            beta=m @ t.beta,
            pair_12=l @ t.pair_12 @ m.T,
        )
    l, m, nrot = mats
    return BlochTensor(
        n=3,
        alpha=l @ t.alpha,
        beta=m @ t.beta,
        gamma=nrot @ t.gamma,
        pair_12=l @ t.pair_12 @ m.T,
        pair_13=l @ t.pair_13 @ nrot.T,
        pair_23=m @ t.pair_23 @ nrot.T,
        triple=np.einsum("im,jn,kp,mnp->ijk", l, m, nrot, t.triple),
    )
