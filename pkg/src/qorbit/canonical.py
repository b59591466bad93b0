"""Canonical gauge for generic 2- and 3-qubit Bloch tensors.

Three qubits: rotate each site into the eigenframe of its Gram matrix
(eigenvalues decreasing), which leaves a per-site Klein four-group of even
sign flips undetermined; that residual is fixed by the unique element
making all components of the site's Bloch vector share one sign. Two
qubits: a det-+1 signed singular value decomposition diagonalizes the
pair matrix, and the 16-element product of the two Klein groups is
resolved by exhaustive lexicographic minimization.

On a generic orbit the resulting point is unique, so two states are
locally equivalent exactly when their canonical tensors coincide.
Degeneracy (coincident Gram eigenvalues, vanishing vector components or
sign invariants) is reported, never raised: the best-effort point comes
back with ``generic = False``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fileio
from .bloch import BlochTensor, bloch_from_payload, bloch_payload
from .errors import ParseError, UnsupportedShape
from .invariants import GramTriple, _sign_invariant, gram
from .local_action import RotationTriple, transform_bloch

EIGENGAP_RTOL = 1e-8
COMPONENT_TOL = 1e-8
SIGN_INVARIANT_TOL = 1e-24

KLEIN = (
    np.eye(3),
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)


@dataclass(frozen=True)
class GenericityReport:
    """Margins certifying that the canonical construction is well posed.

    Per-site entries are None where a site has no such margin (n = 2 has
    no third Gram matrix). ``generic`` is True when every present margin
    clears its threshold: eigengaps relative to the Gram trace, component
    minima absolutely, sign invariants on a degree-9 absolute scale.
    """

    n: int
    eigengaps: tuple[float | None, ...]
    gram_traces: tuple[float | None, ...]
    min_components: tuple[float | None, ...]
    sign_invariants: tuple[float | None, ...]
    generic: bool

    def payload(self) -> dict:
        return {
            "n": self.n,
            "eigengaps": list(self.eigengaps),
            "gram_traces": list(self.gram_traces),
            "min_components": list(self.min_components),
            "sign_invariants": list(self.sign_invariants),
            "generic": bool(self.generic),
        }


@dataclass(frozen=True)
class CanonicalPoint:
    """A Bloch tensor in canonical gauge, the gauge used, and its report."""

    tensor: BlochTensor
    gauge: RotationTriple
    report: GenericityReport


def _min_gap(spectrum: np.ndarray) -> float:
    return float(min(spectrum[0] - spectrum[1], spectrum[1] - spectrum[2]))


def _report_from_gram(g: GramTriple, vectors: list[np.ndarray]) -> GenericityReport:
    """Margins from Gram eigen data plus site vectors in eigenframe gauge."""
    n = g.n
    gaps: list[float | None] = [None, None, None]
    traces: list[float | None] = [None, None, None]
    mins: list[float | None] = [None, None, None]
    signs: list[float | None] = [None, None, None]
    generic = True
    for site in range(n):
        gaps[site] = _min_gap(g.spectra[site])
        traces[site] = float(np.sum(g.spectra[site]))
        mins[site] = float(np.min(np.abs(vectors[site])))
        signs[site] = abs(_sign_invariant(vectors[site], np.diag(g.spectra[site])))
        generic = generic and (
            gaps[site] > EIGENGAP_RTOL * traces[site]
            and mins[site] > COMPONENT_TOL
            and signs[site] > SIGN_INVARIANT_TOL
        )
    return GenericityReport(
        n=n,
        eigengaps=tuple(gaps),
        gram_traces=tuple(traces),
        min_components=tuple(mins),
        sign_invariants=tuple(signs),
        generic=generic,
    )


def genericity(t: BlochTensor) -> GenericityReport:
    """Report the genericity margins of a tensor without moving it.

    Component minima are evaluated at the canonical point (vectors rotated
    into the Gram eigenframes); all reported quantities are orbit
    invariants.
    """
    if t.n not in (2, 3):
        raise UnsupportedShape(f"genericity is defined for n=2 or 3, got n={t.n}")
    g = gram(t)
    site_vectors = [t.alpha, t.beta, t.gamma][:t.n]
    rotated = [g.frames[site].T @ v for site, v in enumerate(site_vectors)]
    return _report_from_gram(g, rotated)


def _signs(vec: np.ndarray, tol: float) -> tuple[float, ...]:
    return tuple(0.0 if abs(v) <= tol else float(np.sign(v)) for v in vec)


def _uniform_sign_element(vec: np.ndarray) -> np.ndarray:
    """The Klein element making all (nonzero) components share one sign.

    Unique when every component is nonzero; with zero components, zeros
    act as wildcards and the first matching element in the fixed KLEIN
    order is taken, which keeps the choice deterministic.
    """
    tol = 1e-12 * (1.0 + float(np.max(np.abs(vec))))
    for k in KLEIN:
        s = _signs(k @ vec, tol)
        nonzero = [v for v in s if v != 0.0]
        if all(v == nonzero[0] for v in nonzero) if nonzero else True:
            return k
    raise AssertionError("unreachable: some Klein element always aligns signs")


def canonicalize3(t: BlochTensor) -> CanonicalPoint:
    """Move a three-qubit tensor to the canonical point of its orbit.

    Diagonalizes the three Gram matrices by per-site special orthogonal
    eigenframes (eigenvalues decreasing), then applies the per-site Klein
    element that makes alpha, beta, gamma each uniform in sign. Orbit
    uniqueness holds on generic inputs; otherwise the best-effort point is
    returned with ``generic = False`` in the report.
    """
    if t.n != 3:
        raise UnsupportedShape(f"canonicalize3 needs n=3, got n={t.n}")
    g = gram(t)
    frames = RotationTriple(tuple(g.frames[site].T for site in range(3)))
    aligned = transform_bloch(t, frames)
    klein = (
        _uniform_sign_element(aligned.alpha),
        _uniform_sign_element(aligned.beta),
        _uniform_sign_element(aligned.gamma),
    )
    # One composed transform, so replaying the gauge reproduces the
    # canonical tensor bit for bit.
    gauge = RotationTriple(tuple(k @ f for k, f in zip(klein, frames.mats)))
    canonical = transform_bloch(t, gauge)
    report = _report_from_gram(g, [canonical.alpha, canonical.beta, canonical.gamma])
    return CanonicalPoint(tensor=canonical, gauge=gauge, report=report)


def canonicalize2(t: BlochTensor) -> CanonicalPoint:
    """Move a two-qubit tensor to the canonical point of its orbit.

    The pair matrix is diagonalized by a signed SVD with both factors in
    SO(3) (any sign deficit is pushed into the last diagonal entry, so the
    diagonal is sorted by decreasing magnitude). The residual Klein x
    Klein gauge is fixed by exhaustively minimizing the lexicographic key
    (sign pattern of alpha, of beta, of the diagonal), ties broken by
    element order.
    """
    if t.n != 2:
        raise UnsupportedShape(f"canonicalize2 needs n=2, got n={t.n}")
    u, s, vt = np.linalg.svd(t.pair_12)
    du = float(np.sign(np.linalg.det(u))) or 1.0
    dv = float(np.sign(np.linalg.det(vt))) or 1.0
    o1 = u @ np.diag([1.0, 1.0, du])
    o2 = vt.T @ np.diag([1.0, 1.0, dv])
    base_rot = RotationTriple((o1.T, o2.T))
    base = transform_bloch(t, base_rot)

    scale = 1.0 + base.max_abs()
    tol = 1e-12 * scale
    best_key = None
    best = None
    for k1 in KLEIN:
        for k2 in KLEIN:
            cand = transform_bloch(base, RotationTriple((k1, k2)))
            key = (
                _signs(cand.alpha, tol)
                + _signs(cand.beta, tol)
                + _signs(np.diag(cand.pair_12), tol)
            )
            if best_key is None or key < best_key:
                best_key = key
                best = (k1, k2)
    k1, k2 = best
    gauge = RotationTriple((k1 @ base_rot.mats[0], k2 @ base_rot.mats[1]))
    canonical = transform_bloch(t, gauge)
    g = gram(canonical)
    report = _report_from_gram(g, [canonical.alpha, canonical.beta])
    return CanonicalPoint(tensor=canonical, gauge=gauge, report=report)


def canonicalize(t: BlochTensor) -> CanonicalPoint:
    """Dispatch to the 2- or 3-qubit canonical construction."""
    if t.n == 2:
        return canonicalize2(t)
    if t.n == 3:
        return canonicalize3(t)
    raise UnsupportedShape(f"canonical forms cover n=2 or 3, got n={t.n}")


def canonical_payload(point: CanonicalPoint) -> dict:
    payload = bloch_payload(point.tensor)
    payload["gauge"] = [m.tolist() for m in point.gauge.mats]
    payload["report"] = point.report.payload()
    return payload


def canonical_from_payload(payload) -> CanonicalPoint:
    if not isinstance(payload, dict):
        raise ParseError("canonical file must contain a single object")
    tensor = bloch_from_payload(payload)
    if "gauge" not in payload or "report" not in payload:
        raise ParseError("canonical file needs 'gauge' and 'report' fields")
    gauge_mats = payload["gauge"]
    if not isinstance(gauge_mats, list) or len(gauge_mats) != tensor.n:
        raise ParseError(f"'gauge' must list {tensor.n} rotation matrices")
    gauge = RotationTriple(tuple(
        fileio.real_array(m, (3, 3), f"gauge[{i}]") for i, m in enumerate(gauge_mats)
    ))
    rep = payload["report"]
    report = GenericityReport(
        n=tensor.n,
        eigengaps=tuple(rep.get("eigengaps", [None] * 3)),
        gram_traces=tuple(rep.get("gram_traces", [None] * 3)),
        min_components=tuple(rep.get("min_components", [None] * 3)),
        sign_invariants=tuple(rep.get("sign_invariants", [None] * 3)),
        generic=bool(rep.get("generic", False)),
    )
    return CanonicalPoint(tensor=tensor, gauge=gauge, report=report)
