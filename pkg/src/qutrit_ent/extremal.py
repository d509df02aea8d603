"""Stationary points of the entanglement measure on a support pattern.

States on a pattern are parametrized by nonnegative magnitudes on the unit
sphere and one phase per cell (the first cell's phase is gauge-fixed to 0).
The measure is invariant under row/column phase rotations, so phases enter
only through alternating sums around cycles of the pattern's bipartite
incidence graph; those cycle sums are the reported phase invariants.

The search runs projected gradient ascent and descent from seeded random
points, then drives candidates into exact stationarity with a damped
Gauss-Newton iteration on the projected-gradient residual (this second
stage also converges to interior saddles, which plain ascent misses).
Each run ends interior-stationary, escaped to the coefficient boundary, or
inside the measure's zero region.  All runs of a search are advanced
together through batched 3x3 linear algebra, and every derivative is
analytic: the gradient uses the spectral form of d Tr s(rho), the residual
Jacobian the corresponding divided-difference (Daleckii-Krein) kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measure import EIG_CLAMP, ZERO_ENTROPY_TOL
from .state_model import BasisCell, PureState, SupportPattern

TWO_PI = 2.0 * np.pi
_LN3 = np.log(3.0)

#: runs with any |magnitude| below this are classified boundary escapes
BOUNDARY_EPS = 1e-6

#: eigenvalues at or below this are treated as structural zeros in derivatives
GRAD_CLAMP = 1e-14

#: projected-gradient norm at which the gradient phase hands over to refinement
#: (the damped Newton stage converges from here at a fraction of the cost)
_SWITCH_TOL = 1e-4

#: iteration caps: gradient sweeps stay well below the 20000 hard limit
#: because refinement finishes convergence far faster
_GRAD_ITER_CAP = 400
_LM_ITER_CAP = 80

_INTERIOR = "interior_stationary"
_BOUNDARY = "boundary_escape"
_ZERO = "zero_measure_region"
_KIND_ORDER = {_INTERIOR: 0, _BOUNDARY: 1, _ZERO: 2}


class ZeroMeasureRegionError(ValueError):
    """Gradient requested inside the measure's zero branch."""


@dataclass(frozen=True)
class ParamPoint:
    """Magnitudes (unit sphere) and phases (first cell gauge-fixed to 0)."""

    pattern: SupportPattern
    magnitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        mags = np.array(self.magnitudes, dtype=float)
        phs = np.array(self.phases, dtype=float)
        k = self.pattern.k
        if mags.shape != (k,) or phs.shape != (k,):
            raise ValueError(f"expected {k} magnitudes and phases for {self.pattern}")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be nonnegative")
        if abs(float(np.sum(mags ** 2)) - 1.0) > 1e-12:
            raise ValueError("squared magnitudes must sum to 1")
        if np.any(phs < 0) or np.any(phs >= TWO_PI):
            raise ValueError("phases must lie in [0, 2*pi)")
        if abs(phs[0]) > 1e-12:
            raise ValueError("first-cell phase must be gauge-fixed to 0")
        mags.setflags(write=False)
        phs.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "phases", phs)

    @classmethod
    def create(cls, pattern: SupportPattern, magnitudes: Sequence[float],
               phases: Sequence[float] | None = None) -> "ParamPoint":
        """Build a point, normalizing magnitudes and gauging phases.

        Negative magnitudes are folded into a pi phase shift; the first
        cell's phase is removed as a global phase.
        """
        mags = np.array(magnitudes, dtype=float)
        if phases is None:
            phs = np.zeros_like(mags)
        else:
            phs = np.array(phases, dtype=float)
        mags, phs = _canonical_arrays(mags, phs)
        return cls(pattern, mags, phs)


def _canonical_arrays(mags: np.ndarray, phs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mags = mags.astype(float).copy()
    phs = phs.astype(float).copy()
    neg = mags < 0
    mags[neg] = -mags[neg]
    phs[neg] += np.pi
    norm = np.linalg.norm(mags)
    if norm == 0:
        raise ValueError("magnitudes are all zero")
    mags /= norm
    phs = (phs - phs[0]) % TWO_PI
    phs[0] = 0.0
    phs[phs >= TWO_PI] = 0.0
    return mags, phs


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental cycles of the pattern's bipartite incidence graph.

    Rows and columns are the vertices, cells the edges.  Each cycle is a
    signed cell sequence; a +1 sign means the cell is traversed from its
    row vertex to its column vertex.
    """

    pattern: SupportPattern
    cycles: tuple[tuple[tuple[BasisCell, int], ...], ...]

    def __len__(self) -> int:
        return len(self.cycles)


def cycle_basis(pattern: SupportPattern) -> CycleBasis:
    """Deterministic fundamental cycle basis from a flat-order spanning forest."""
    cells = pattern.cells
    parent: dict[int, tuple[int, BasisCell] | None] = {}
    comp: dict[int, int] = {}

    def find(node: int) -> int:
        root = node
        while comp.get(root, root) != root:
            root = comp[root]
        return root

    tree_adj: dict[int, list[tuple[int, BasisCell]]] = {}
    extra: list[BasisCell] = []
    for cell in cells:
        a, b = cell.row_index, 3 + cell.col_index
        tree_adj.setdefault(a, [])
        tree_adj.setdefault(b, [])
        ra, rb = find(a), find(b)
        if ra == rb:
            extra.append(cell)
        else:
            comp[max(ra, rb)] = min(ra, rb)
            tree_adj[a].append((b, cell))
            tree_adj[b].append((a, cell))

    # parent pointers from the smallest node of each component
    for root in sorted(tree_adj):
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            node = stack.pop()
            for other, cell in tree_adj[node]:
                if other not in parent:
                    parent[other] = (node, cell)
                    stack.append(other)

    def chain(node: int) -> list[int]:
        nodes = [node]
        while parent[nodes[-1]] is not None:
            nodes.append(parent[nodes[-1]][0])
        return nodes

    cycles = []
    for cell in extra:
        r_node, c_node = cell.row_index, 3 + cell.col_index
        chain_c, chain_r = chain(c_node), chain(r_node)
        common = set(chain_c) & set(chain_r)
        lca = next(n for n in chain_c if n in common)
        seq: list[tuple[BasisCell, int]] = [(cell, +1)]
        node = c_node
        while node != lca:
            up, via = parent[node]
            seq.append((via, +1 if node < 3 else -1))
            node = up
        down: list[tuple[BasisCell, int]] = []
        node = r_node
        while node != lca:
            up, via = parent[node]
            down.append((via, -1 if node < 3 else +1))
            node = up
        seq.extend(reversed(down))
        cycles.append(tuple(seq))
    return CycleBasis(pattern, tuple(cycles))


def cycle_invariants(point: ParamPoint) -> list[float]:
    """Alternating phase sums around the fundamental cycles, in [0, 2*pi).

    Invariant under row/column phase rotations of the state.
    """
    basis = cycle_basis(point.pattern)
    index = {cell: i for i, cell in enumerate(point.pattern.cells)}
    values = []
    for cycle in basis.cycles:
        total = sum(sign * point.phases[index[cell]] for cell, sign in cycle)
        values.append(float(total % TWO_PI))
    return values


def state_from_params(point: ParamPoint) -> PureState:
    """Coefficient matrix with m_i e^{i phi_i} on the pattern cells."""
    mat = np.zeros((3, 3), dtype=complex)
    amps = point.magnitudes * np.exp(1j * point.phases)
    for cell, amp in zip(point.pattern.cells, amps):
        mat[cell.row_index, cell.col_index] = amp
    mat /= np.linalg.norm(mat)
    return PureState(mat)


# -- batched evaluation core -------------------------------------------------

class _Geometry:
    """Precomputed index arrays and cycle data for one pattern."""

    def __init__(self, pattern: SupportPattern):
        self.pattern = pattern
        self.cells = pattern.cells
        self.k = pattern.k
        self.rows = np.array([c.row_index for c in self.cells])
        self.cols = np.array([c.col_index for c in self.cells])
        idx = np.arange(self.k)
        self.cell_of_param = np.concatenate([idx, idx])
        self.rows2 = self.rows[self.cell_of_param]
        self.cols2 = self.cols[self.cell_of_param]
        self.col_match = (self.cols2[:, None] == self.cols2[None, :]).astype(float)
        self.row_match = (self.rows2[:, None] == self.rows2[None, :]).astype(float)
        basis = cycle_basis(pattern)
        index = {cell: i for i, cell in enumerate(self.cells)}
        self.cycle_terms = [
            np.array([(index[cell], sign) for cell, sign in cycle])
            for cycle in basis.cycles
        ]

    def matrices(self, m: np.ndarray, phi: np.ndarray) -> np.ndarray:
        z = m * np.exp(1j * phi)
        mats = np.zeros((m.shape[0], 3, 3), dtype=complex)
        mats[:, self.rows, self.cols] = z
        return mats

    def invariants(self, phi: np.ndarray) -> np.ndarray:
        out = np.zeros((phi.shape[0], len(self.cycle_terms)))
        for j, terms in enumerate(self.cycle_terms):
            vals = (phi[:, terms[:, 0].astype(int)] @ terms[:, 1]) % TWO_PI
            vals[vals > TWO_PI - 1e-8] = 0.0
            out[:, j] = vals
        return out


def _entropy_from_spec(lam: np.ndarray) -> np.ndarray:
    """Base-3 entropy of a batch of spectra, 0*log0 convention."""
    lam = np.clip(lam, 0.0, None)
    safe = np.where(lam > EIG_CLAMP, lam, 1.0)
    return -np.sum(np.where(lam > EIG_CLAMP, lam * np.log(safe), 0.0), axis=-1) / _LN3


def _eta_batch(geom: _Geometry, m: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Measure values and squared singular values (descending)."""
    mats = geom.matrices(m, phi)
    s = np.linalg.svd(mats, compute_uv=False)
    lam = s ** 2
    return _entropy_from_spec(lam), lam


def _sprime(lam: np.ndarray) -> np.ndarray:
    """Derivative of the half-entropy lam -> -lam ln(lam) / (2 ln 3), clamped."""
    safe = np.where(lam > GRAD_CLAMP, lam, 1.0)
    return np.where(lam > GRAD_CLAMP, -(np.log(safe) + 1.0) / (2.0 * _LN3), 0.0)


def _gamma_kernel(lam: np.ndarray) -> np.ndarray:
    """Divided differences of the clamped half-entropy derivative.

    Entry (j, k) is (s'(lam_j) - s'(lam_k)) / (lam_j - lam_k) with the
    analytic limit on (near-)degenerate pairs.
    """
    f = _sprime(lam)
    lj = lam[..., :, None]
    lk = lam[..., None, :]
    fj = f[..., :, None]
    fk = f[..., None, :]
    diff = lj - lk
    live_j = lj > GRAD_CLAMP
    live_k = lk > GRAD_CLAMP
    both = live_j & live_k
    near = np.abs(diff) <= 1e-6 * np.maximum(lj, lk)
    safe_diff = np.where(np.abs(diff) > 0, diff, 1.0)
    generic = (fj - fk) / safe_diff
    degenerate = -2.0 / (2.0 * _LN3 * np.clip(lj + lk, GRAD_CLAMP, None))
    out = np.where(both & near, degenerate, np.where(np.abs(diff) > 0, generic, 0.0))
    neither = ~live_j & ~live_k
    return np.where(neither, 0.0, out)


def _grad_core(geom: _Geometry, m: np.ndarray, phi: np.ndarray, want_hessian: bool):
    eps = np.exp(1j * phi)
    z = m * eps
    mats = np.zeros((m.shape[0], 3, 3), dtype=complex)
    mats[:, geom.rows, geom.cols] = z
    mh = mats.conj().swapaxes(1, 2)

    rho_a = mats @ mh
    rho_b = mats.swapaxes(1, 2) @ mats.conj()
    lam_a, u = np.linalg.eigh(rho_a)
    lam_b, v = np.linalg.eigh(rho_b)
    entropy = _entropy_from_spec(lam_a)

    fa = _sprime(lam_a)
    fb = _sprime(lam_b)
    l_a = np.einsum("nij,nj,nkj->nik", u, fa, u.conj())
    l_b = np.einsum("nij,nj,nkj->nik", v, fb, v.conj())

    ga = mh @ l_a
    gb = mats.conj() @ l_b
    wvec = ga[:, geom.cols, geom.rows] + gb[:, geom.rows, geom.cols]

    ew = eps * wvec
    grad_m = 2.0 * ew.real
    grad_phi = -2.0 * m * ew.imag
    grad = np.concatenate([grad_m, grad_phi], axis=1)
    if not want_hessian:
        return grad, entropy, lam_a

    k = geom.k
    alpha = np.concatenate([eps, 1j * z], axis=1)

    # products of first derivatives against the spectral weight
    la_rr = l_a[:, geom.rows2[None, :], geom.rows2[:, None]]
    lb_cc = l_b[:, geom.cols2[None, :], geom.cols2[:, None]]
    pair = alpha[:, :, None] * alpha.conj()[:, None, :]
    hess = 2.0 * (pair * la_rr).real * geom.col_match
    hess += 2.0 * (pair * lb_cc).real * geom.row_match

    # divided-difference (Daleckii-Krein) curvature of the matrix entropy
    gam_a = _gamma_kernel(lam_a)
    gam_b = _gamma_kernel(lam_b)
    avec = u.conj()[:, geom.rows, :]
    bvec = (mh @ u)[:, geom.cols, :]
    cvec = v.conj()[:, geom.cols, :]
    dvec = (mats.conj() @ v)[:, geom.rows, :]
    ci = geom.cell_of_param

    def dal(gamma, xv, yv):
        t1 = np.einsum("nqj,npj,njk,nqk,npk->nqp", xv, yv, gamma, yv, xv, optimize=True)
        t2 = np.einsum("nqj,npj,njk,nqk,npk->nqp", xv, xv.conj(), gamma, yv, yv.conj(),
                       optimize=True)
        t1e = t1[:, ci][:, :, ci]
        t2e = t2[:, ci][:, :, ci]
        ap = alpha[:, :, None] * alpha[:, None, :]
        am = alpha[:, :, None] * alpha.conj()[:, None, :]
        return 2.0 * (ap * t1e + am * t2e).real

    hess += dal(gam_a, avec, bvec)
    hess += dal(gam_b, cvec, dvec)

    # second derivatives of the matrix elements (within one cell)
    iw = (1j * ew).real
    rows_idx = np.arange(k)
    hess[:, rows_idx, rows_idx + k] += 2.0 * iw
    hess[:, rows_idx + k, rows_idx] += 2.0 * iw
    hess[:, rows_idx + k, rows_idx + k] += -2.0 * m * ew.real

    hess = 0.5 * (hess + hess.swapaxes(1, 2))
    return grad, entropy, lam_a, hess


def _project_mgrad(m: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Project the magnitude block onto the sphere tangent space."""
    k = m.shape[1]
    out = grad.copy()
    radial = np.sum(m * grad[:, :k], axis=1, keepdims=True)
    out[:, :k] -= radial * m
    return out


def _residual_jacobian(geom: _Geometry, m: np.ndarray, phi: np.ndarray):
    """Stationarity residual [projected gradient; norm constraint] and Jacobian."""
    n, k = m.shape
    grad, entropy, lam, hess = _grad_core(geom, m, phi, want_hessian=True)
    gm = grad[:, :k]
    gamma = np.sum(m * gm, axis=1)
    res = np.concatenate([
        gm - gamma[:, None] * m,
        grad[:, k:],
        (np.sum(m * m, axis=1) - 1.0)[:, None],
    ], axis=1)

    dgamma = np.einsum("nj,njq->nq", m, hess[:, :k, :])
    dgamma[:, :k] += gm
    j_top = hess[:, :k, :] - m[:, :, None] * dgamma[:, None, :]
    j_top[:, np.arange(k), np.arange(k)] -= gamma[:, None]
    j_last = np.concatenate([2.0 * m, np.zeros_like(m)], axis=1)[:, None, :]
    jac = np.concatenate([j_top, hess[:, k:, :], j_last], axis=1)
    return res, jac, entropy, lam


_ST_RUNNING, _ST_REFINE, _ST_BOUNDARY, _ST_ZERO = 0, 1, 2, 3


def _gradient_phase(geom: _Geometry, m0: np.ndarray, phi0: np.ndarray, sign: float,
                    max_iter: int = _GRAD_ITER_CAP):
    """Batched projected gradient ascent on sign*eta with backtracking.

    Fresh step 0.5 each sweep, halved on Armijo failure up to 60 times.
    Returns endpoints and a status per run.
    """
    m = m0.copy()
    phi = phi0.copy()
    n, k = m.shape
    status = np.full(n, _ST_RUNNING)
    eta_val, _ = _eta_batch(geom, m, phi)

    for _ in range(max_iter):
        live = status == _ST_RUNNING
        if not live.any():
            break
        zero = live & (eta_val <= ZERO_ENTROPY_TOL)
        status[zero] = _ST_ZERO
        bound = (status == _ST_RUNNING) & (np.min(np.abs(m), axis=1) < BOUNDARY_EPS)
        status[bound] = _ST_BOUNDARY
        live = status == _ST_RUNNING
        if not live.any():
            break

        grad, _, _ = _grad_core(geom, m[live], phi[live], want_hessian=False)
        grad = _project_mgrad(m[live], grad)
        gnorm = np.linalg.norm(grad, axis=1)
        small = gnorm <= _SWITCH_TOL
        idx_live = np.flatnonzero(live)
        status[idx_live[small]] = _ST_REFINE
        moving = ~small
        if not moving.any():
            continue
        idx = idx_live[moving]
        d = sign * grad[moving]
        dnorm_sq = gnorm[moving] ** 2
        f0 = sign * eta_val[idx]
        step = np.full(idx.size, 0.5)
        pending = np.ones(idx.size, dtype=bool)
        accepted = np.zeros(idx.size, dtype=bool)
        m_new = m[idx].copy()
        phi_new = phi[idx].copy()
        f_new = f0.copy()
        for _half in range(60):
            if not pending.any():
                break
            mt = m[idx[pending]] + step[pending, None] * d[pending, :k]
            mt /= np.linalg.norm(mt, axis=1, keepdims=True)
            pt = phi[idx[pending]] + step[pending, None] * d[pending, k:]
            ft = sign * _eta_batch(geom, mt, pt)[0]
            ok = ft >= f0[pending] + 1e-4 * step[pending] * dnorm_sq[pending]
            sel = np.flatnonzero(pending)
            good = sel[ok]
            m_new[good] = mt[ok]
            phi_new[good] = pt[ok]
            f_new[good] = ft[ok]
            accepted[good] = True
            pending[good] = False
            step[sel[~ok]] *= 0.5
        m[idx[accepted]] = m_new[accepted]
        phi[idx[accepted]] = phi_new[accepted]
        eta_val[idx[accepted]] = sign * f_new[accepted]
        status[idx[~accepted]] = _ST_REFINE  # stalled line search
    status[status == _ST_RUNNING] = _ST_REFINE
    return m, phi, status


def _lm_refine(geom: _Geometry, m0: np.ndarray, phi0: np.ndarray, tol: float,
               max_iter: int = _LM_ITER_CAP):
    """Batched damped Gauss-Newton on the stationarity residual.

    Returns endpoints and final residual norms (gradient block only is
    re-measured by the caller after canonicalization).
    """
    n, k = m0.shape
    x = np.concatenate([m0, phi0], axis=1)
    res, jac, entropy, _ = _residual_jacobian(geom, x[:, :k], x[:, k:])
    cost = 0.5 * np.sum(res ** 2, axis=1)
    jtj = np.einsum("nrp,nrq->npq", jac, jac)
    mu = 1e-3 * np.clip(np.max(np.einsum("npp->np", jtj), axis=1), 1e-8, None)
    frozen = np.zeros(n, dtype=bool)
    target = 0.25 * tol

    for _ in range(max_iter):
        rnorm = np.linalg.norm(res, axis=1)
        frozen |= rnorm <= target
        frozen |= entropy <= ZERO_ENTROPY_TOL
        live = ~frozen
        if not live.any():
            break
        jtr = np.einsum("nrp,nr->np", jac, res)
        diag = np.clip(np.einsum("npp->np", jtj), 1e-10, None)
        a = jtj + mu[:, None, None] * diag[:, None, :] * np.eye(2 * k)
        try:
            delta = np.linalg.solve(a[live], -jtr[live][..., None])[..., 0]
        except np.linalg.LinAlgError:
            a_live = a[live] + 1e-12 * np.eye(2 * k)
            delta = np.linalg.solve(a_live, -jtr[live][..., None])[..., 0]
        x_try = x[live] + delta
        res_try, jac_try, ent_try, _ = _residual_jacobian(geom, x_try[:, :k], x_try[:, k:])
        cost_try = 0.5 * np.sum(res_try ** 2, axis=1)
        better = np.isfinite(cost_try) & (cost_try < cost[live])
        idx = np.flatnonzero(live)
        good = idx[better]
        x[good] = x_try[better]
        res[good] = res_try[better]
        jac[good] = jac_try[better]
        entropy[good] = ent_try[better]
        cost[good] = cost_try[better]
        jtj[good] = np.einsum("nrp,nrq->npq", jac_try[better], jac_try[better])
        mu[good] = np.clip(mu[good] / 3.0, 1e-14, None)
        bad = idx[~better]
        mu[bad] = np.clip(mu[bad] * 4.0, None, 1e12)
        stuck = bad[np.linalg.norm(delta[~better], axis=1) < 1e-15]
        frozen[stuck] = True

    rnorm = np.linalg.norm(res, axis=1)
    return x[:, :k], x[:, k:], rnorm, entropy


@dataclass(frozen=True)
class ExtremalResult:
    """One deduplicated run outcome of the stationary-point search."""

    eta_value: float
    params: ParamPoint
    grad_residual: float
    kind: str
    cycle_values: tuple[float, ...]
    schmidt_sq: tuple[float, ...]

    @property
    def is_interior(self) -> bool:
        return self.kind == _INTERIOR

    def to_dict(self) -> dict:
        return {
            "eta": self.eta_value,
            "magnitudes": [float(v) for v in self.params.magnitudes],
            "phases": [float(v) for v in self.params.phases],
            "cycle_invariants": [float(v) for v in self.cycle_values],
            "schmidt_sq": [float(v) for v in self.schmidt_sq],
            "kind": self.kind,
            "grad_residual": None if np.isnan(self.grad_residual) else float(self.grad_residual),
        }


def eta_gradient(point: ParamPoint) -> "GradientResult":
    """Gradient of the measure on the constraint manifold.

    The magnitude block is projected onto the tangent space of the unit
    sphere; phases are unconstrained.  Raises ZeroMeasureRegionError inside
    the measure's zero branch, where the extremization is vacuous.
    """
    if np.any(point.magnitudes <= 1e-9):
        raise ValueError("gradient needs all magnitudes above 1e-9")
    geom = _Geometry(point.pattern)
    m = point.magnitudes[None, :]
    phi = point.phases[None, :]
    grad, entropy, _ = _grad_core(geom, m, phi, want_hessian=False)
    if entropy[0] <= ZERO_ENTROPY_TOL:
        raise ZeroMeasureRegionError(
            "state lies in the zero-measure branch; the measure is identically 0 there")
    grad = _project_mgrad(m, grad)
    k = point.pattern.k
    return GradientResult(magnitudes=grad[0, :k].copy(), phases=grad[0, k:].copy())


@dataclass(frozen=True)
class GradientResult:
    magnitudes: np.ndarray
    phases: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.magnitudes ** 2) + np.sum(self.phases ** 2)))


def _residual_norm(geom: _Geometry, m: np.ndarray, phi: np.ndarray) -> np.ndarray:
    grad, entropy, _ = _grad_core(geom, m, phi, want_hessian=False)
    grad = _project_mgrad(m, grad)
    return np.linalg.norm(grad, axis=1)


def _random_points(geom: _Geometry, starts: int, seed: int):
    k = geom.k
    m0 = np.empty((starts, k))
    phi0 = np.empty((starts, k))
    for i in range(starts):
        rng = np.random.default_rng((seed, i))
        m0[i] = np.sqrt(rng.dirichlet(np.full(k, 2.0)))
        phi0[i] = rng.uniform(0.0, TWO_PI, k)
    return m0, phi0


def _dedup_key(eta_value: float, schmidt_sq, invariants, kind: str):
    inv_mod = int(round(TWO_PI / 1e-6))
    inv_key = tuple(int(round(v / 1e-6)) % inv_mod for v in invariants)
    return (
        int(round(eta_value * 1e7)),
        tuple(int(round(v * 1e7)) for v in schmidt_sq),
        inv_key,
        kind,
    )


#: a cycle's phase invariant counts as identified only when every cell on the
#: cycle keeps at least this much magnitude; below it the phase is numerically
#: unconstrained and the invariant is treated as a wildcard when clustering
_PHASE_ID_TOL = 1e-3

#: near a boundary-stationary corner the gradient scales quadratically with
#: the vanishing magnitudes, so refined points with coefficients below this
#: can pass the residual test without being genuine interior points; they are
#: snapped onto the boundary and kept only if the snap breaks stationarity
_SNAP_TOL = 1e-4

_CLUSTER_ETA_TOL = 1e-5
_CLUSTER_SPEC_TOL = 1e-5
_CLUSTER_INV_TOL = 5e-3


def _circular_close(a: float, b: float, tol: float) -> bool:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d) <= tol


@dataclass
class _Candidate:
    kind: str
    eta_value: float
    schmidt_sq: tuple
    invariants: tuple
    wildcards: tuple
    residual: float
    mags: np.ndarray
    phs: np.ndarray


def _cluster(cands: list[_Candidate]) -> list[_Candidate]:
    """Merge run outcomes that describe the same stationary class.

    Entries match when their kind, measure and spectrum agree; interior
    entries must also agree on every identified cycle invariant (a cycle
    through a near-zero magnitude carries no phase information and matches
    anything).  Representatives with the fewest unidentified invariants and
    the smallest residual win.
    """
    def sort_key(c: _Candidate):
        res = c.residual if np.isfinite(c.residual) else np.inf
        return (_KIND_ORDER[c.kind], sum(c.wildcards), res,
                _dedup_key(c.eta_value, c.schmidt_sq, c.invariants, c.kind))

    reps: list[_Candidate] = []
    for cand in sorted(cands, key=sort_key):
        merged = False
        for rep in reps:
            if rep.kind != cand.kind:
                continue
            if abs(rep.eta_value - cand.eta_value) > _CLUSTER_ETA_TOL:
                continue
            if max(abs(a - b) for a, b in zip(rep.schmidt_sq, cand.schmidt_sq)) > _CLUSTER_SPEC_TOL:
                continue
            if cand.kind == _INTERIOR:
                ok = all(
                    rw or cw or _circular_close(rv, cv, _CLUSTER_INV_TOL)
                    for rv, cv, rw, cw in zip(rep.invariants, cand.invariants,
                                              rep.wildcards, cand.wildcards)
                )
                if not ok:
                    continue
            merged = True
            break
        if not merged:
            reps.append(cand)
    return reps


def find_stationary(pattern: SupportPattern, starts: int = 100, seed: int = 42,
                    tol: float = 1e-10) -> list[ExtremalResult]:
    """Multi-start search for stationary points of the measure on a pattern.

    From each seeded random point the search runs gradient ascent, gradient
    descent and a direct stationarity refinement; every run is classified
    interior-stationary (converged with all magnitudes above 1e-6), a
    boundary escape, or a landing in the zero-measure region.  Results are
    deduplicated on (eta, sorted squared singular values, cycle invariants,
    kind), then merged when they describe the same stationary class up to
    the numerical identifiability of the phases.  Output is sorted by eta
    descending; fixed (pattern, starts, seed) give identical output.
    """
    if starts < 1:
        raise ValueError(f"starts must be >= 1, got {starts}")
    geom = _Geometry(pattern)
    m0, phi0 = _random_points(geom, starts, seed)

    # every run (ascent endpoint, descent endpoint, raw start) is driven to
    # exact stationarity, so boundary escapes land on face-stationary states
    seeds_m, seeds_phi = [m0], [phi0]
    for sign in (+1.0, -1.0):
        m_end, phi_end, _ = _gradient_phase(geom, m0, phi0, sign)
        seeds_m.append(m_end)
        seeds_phi.append(phi_end)
    m_all, phi_all, _, _ = _lm_refine(geom, np.concatenate(seeds_m),
                                      np.concatenate(seeds_phi), tol)

    # canonicalize every endpoint and evaluate it in one batch
    neg = m_all < 0
    mags = np.abs(m_all)
    phs = phi_all + np.pi * neg
    norms = np.linalg.norm(mags, axis=1, keepdims=True)
    keep = norms[:, 0] > 1e-12
    mags, phs = mags[keep] / norms[keep], phs[keep]
    phs = (phs - phs[:, :1]) % TWO_PI
    phs[:, 0] = 0.0
    eta_all, lam_all = _eta_batch(geom, mags, phs)
    inv_all = geom.invariants(phs)
    res_all = _residual_norm(geom, mags, phs)
    min_mag = np.min(mags, axis=1)
    cycle_cells = [terms[:, 0].astype(int) for terms in geom.cycle_terms]

    seen: dict[tuple, _Candidate] = {}
    for i in range(mags.shape[0]):
        mag_row, phs_row = mags[i], phs[i]
        eta_row, lam_row, inv_row, res_row = (
            float(eta_all[i]), lam_all[i], inv_all[i], float(res_all[i]))
        if eta_row <= ZERO_ENTROPY_TOL:
            kind, residual, eta_value = _ZERO, float("nan"), 0.0
        elif res_row > tol:
            continue  # unconverged refinement asserts nothing
        elif min_mag[i] < BOUNDARY_EPS:
            kind, residual, eta_value = _BOUNDARY, res_row, eta_row
        else:
            kind, residual, eta_value = _INTERIOR, res_row, eta_row
            if min_mag[i] < _SNAP_TOL:
                snap = np.where(mag_row < _SNAP_TOL, 0.0, mag_row)
                snap /= np.linalg.norm(snap)
                eta_snap, lam_snap = _eta_batch(geom, snap[None], phs_row[None])
                res_snap = float(_residual_norm(geom, snap[None], phs_row[None])[0])
                if res_snap <= 1e-8 and abs(float(eta_snap[0]) - eta_row) <= 1e-7:
                    # indistinguishable from a boundary-stationary state
                    kind, residual, eta_value = _BOUNDARY, res_snap, float(eta_snap[0])
                    mag_row, lam_row = snap, lam_snap[0]
                    inv_row = geom.invariants(phs_row[None])[0]
        schmidt_sq = tuple(float(v) for v in lam_row)
        invariants = tuple(float(v) for v in inv_row)
        if kind == _INTERIOR:
            wild = tuple(bool(np.min(mag_row[cells]) < _PHASE_ID_TOL) for cells in cycle_cells)
        else:
            wild = tuple(True for _ in cycle_cells)
        cand = _Candidate(kind, eta_value, schmidt_sq, invariants, wild,
                          residual, mag_row, phs_row)
        key = _dedup_key(eta_value, schmidt_sq, invariants, kind)
        old = seen.get(key)
        if old is None or (np.nan_to_num(cand.residual, nan=np.inf)
                           < np.nan_to_num(old.residual, nan=np.inf)):
            seen[key] = cand

    out = []
    for cand in _cluster(list(seen.values())):
        point = ParamPoint(pattern, *_canonical_arrays(cand.mags, cand.phs))
        out.append(ExtremalResult(cand.eta_value, point, cand.residual, cand.kind,
                                  cand.invariants, cand.schmidt_sq))
    out.sort(key=lambda r: (-r.eta_value, _KIND_ORDER[r.kind],
                            _dedup_key(r.eta_value, r.schmidt_sq, r.cycle_values, r.kind)))
    return out


@dataclass(frozen=True)
class ExtremumVerdict:
    """Outcome of the interior-extremum probe.

    ``none_detected`` is heuristic evidence from a finite multi-start
    search, not a proof of absence.
    """

    found: bool
    interior: tuple[ExtremalResult, ...]
    starts: int

    @property
    def verdict(self) -> str:
        return "found" if self.found else "none_detected"


def has_interior_extremum(pattern: SupportPattern, starts: int = 100,
                          seed: int = 42) -> ExtremumVerdict:
    """Probe a pattern for interior stationary points with positive measure.

    A none_detected verdict is only reportable from at least 100 starts.
    """
    results = find_stationary(pattern, starts=starts, seed=seed)
    interior = tuple(r for r in results if r.is_interior and r.eta_value > ZERO_ENTROPY_TOL)
    if not interior and starts < 100:
        raise ValueError("a none_detected verdict needs at least 100 starts")
    return ExtremumVerdict(found=bool(interior), interior=interior, starts=starts)
