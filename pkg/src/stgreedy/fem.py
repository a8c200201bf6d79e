"""Continuous finite element spaces on bisection meshes, L2 projection.

Lagrange elements of order r2 (polynomial degree < r2, r2 >= 2: order 1
would collapse the continuous space to global constants, which the
engine rejects).  Projection solves the sparse normal equations
directly and verifies the residual; per-element indicators split the
projection error so that their squares sum to the global square.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .meshnd import IntervalMesh, initial_mesh, refine_bisection
from .quadrature import DEFAULT_SIMPLEX_RULE, gauss_interval_rule


class FemError(ValueError):
    pass


class GreedySpaceCapError(RuntimeError):
    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = list(offenders)


def _edge_key(v0, v1, step, d):
    # orientation-canonical position along the shared edge
    if v0 <= v1:
        return ("e", v0, v1, step, d)
    return ("e", v1, v0, d - step, d)


def _lagrange_basis_1d(r2):
    # nodes i/(r2-1) on [0,1]; coefficients of each basis poly in monomials
    nodes = np.linspace(0.0, 1.0, r2)
    V = np.vander(nodes, r2, increasing=True)
    C = np.linalg.inv(V)            # C[:, k] = monomial coeffs of phi_k
    return nodes.reshape(-1, 1), lambda pts: np.vander(
        np.asarray(pts).ravel(), r2, increasing=True) @ C


def _lagrange_basis_2d(r2):
    d = r2 - 1
    lattice = np.array([(i / d, j / d) for j in range(d + 1)
                        for i in range(d + 1 - j)])
    monos = [(a, b) for b in range(d + 1) for a in range(d + 1 - b)]

    def vander(pts):
        pts = np.asarray(pts)
        return np.stack([pts[:, 0] ** a * pts[:, 1] ** b
                         for a, b in monos], axis=1)

    C = np.linalg.inv(vander(lattice))
    return lattice, lambda pts: vander(np.asarray(pts)) @ C


class FemSpace:
    """Global continuous Lagrange space on a bisection mesh."""

    def __init__(self, mesh, r2):
        if r2 < 2:
            raise FemError(
                "r2 must be >= 2: continuity collapses order-1 elements "
                "to global constants")
        self.mesh = mesh
        self.r2 = int(r2)
        if mesh.dim == 1:
            self._ref_nodes, self._basis = _lagrange_basis_1d(r2)
            rule = gauss_interval_rule()
            self._qref = rule.nodes.reshape(-1, 1)
            self._qw = rule.weights
        else:
            self._ref_nodes, self._basis = _lagrange_basis_2d(r2)
            rule = DEFAULT_SIMPLEX_RULE
            self._qref = rule.barycentric[:, 1:]
            self._qw = rule.weights
        self._Bq = self._basis(self._qref)            # (Q, L)
        self._build_dofs()
        self._quad_pts = None

    def _build_dofs(self):
        # dofs are keyed topologically (vertex id, oriented position on an
        # edge, or element-local), never by rounded coordinates: shared
        # nodes then match exactly at any refinement depth
        key_to_dof = {}
        eldofs = []
        coords = []

        def dof(key, pt):
            if key not in key_to_dof:
                key_to_dof[key] = len(key_to_dof)
                coords.append(pt)
            return key_to_dof[key]

        if self.mesh.dim == 1:
            for e, verts in enumerate(self.mesh.element_vertices()):
                pts = self._map_points(verts, self._ref_nodes)
                row = []
                for i, pt in enumerate(pts):
                    if i == 0:
                        row.append(dof(("v", float(verts[0])), pt))
                    elif i == len(pts) - 1:
                        row.append(dof(("v", float(verts[1])), pt))
                    else:
                        row.append(dof(("i", e, i), pt))
                eldofs.append(row)
        else:
            d = self.r2 - 1
            lattice_ij = [(i, j) for j in range(d + 1)
                          for i in range(d + 1 - j)]
            for e, elem in enumerate(self.mesh.elements):
                verts = np.array([self.mesh.vertices[v] for v in elem.v])
                pts = self._map_points(verts, self._ref_nodes)
                va, vb, vc = elem.v
                row = []
                for (i, j), pt in zip(lattice_ij, pts):
                    k = d - i - j
                    if (i, j) == (0, 0):
                        key = ("v", va)
                    elif (i, j) == (d, 0):
                        key = ("v", vb)
                    elif (i, j) == (0, d):
                        key = ("v", vc)
                    elif j == 0:              # edge va-vb, parameter i/d
                        key = _edge_key(va, vb, i, d)
                    elif i == 0:              # edge va-vc, parameter j/d
                        key = _edge_key(va, vc, j, d)
                    elif k == 0:              # edge vb-vc, parameter j/d
                        key = _edge_key(vb, vc, j, d)
                    else:
                        key = ("i", e, i, j)
                    row.append(dof(key, pt))
                eldofs.append(row)
        self.eldofs = np.array(eldofs, dtype=int)
        self.ndof = len(key_to_dof)
        self.dof_points = np.array(coords)

    def _map_points(self, verts, ref_pts):
        if self.mesh.dim == 1:
            a, b = verts
            return (a + (b - a) * np.asarray(ref_pts)).reshape(-1, 1)
        v0, v1, v2 = np.asarray(verts)
        ref = np.asarray(ref_pts)
        return v0 + np.outer(ref[:, 0], v1 - v0) + np.outer(ref[:, 1], v2 - v0)

    def measures(self):
        return self.mesh.areas()

    def quad_points(self):
        """Physical quadrature points per element, shape (E, Q, n)."""
        if self._quad_pts is None:
            self._quad_pts = np.stack([self._map_points(v, self._qref)
                                       for v in self.mesh.element_vertices()])
        return self._quad_pts

    def quad_weights(self):
        """Physical quadrature weights matching quad_points, flat (E*Q,)."""
        return (self.measures()[:, None] * self._qw[None, :]).ravel()

    def mass_matrix(self):
        L = self._Bq.shape[1]
        mref = self._Bq.T @ (self._qw[:, None] * self._Bq)   # (L, L)
        meas = self.measures()
        E = len(self.eldofs)
        rows = np.repeat(self.eldofs, L, axis=1).ravel()
        cols = np.tile(self.eldofs, (1, L)).ravel()
        vals = (meas[:, None, None] * mref[None, :, :]).ravel()
        M = sp.coo_matrix((vals, (rows, cols)),
                          shape=(self.ndof, self.ndof)).tocsr()
        return M

    def load_vector(self, g):
        pts = self.quad_points()
        E, Q, n = pts.shape
        gv = np.asarray(g(pts.reshape(-1, n))).reshape(E, Q)
        meas = self.measures()
        local = (meas[:, None] * (gv @ (self._qw[:, None] * self._Bq)))
        b = np.zeros(self.ndof)
        np.add.at(b, self.eldofs, local)
        return b, gv

    def element_values(self, dofs):
        """Values of the FE function at the element quadrature points."""
        return dofs[self.eldofs] @ self._Bq.T          # (E, Q)


class FemFunction:
    """A member of a continuous FE space: dof values plus its space."""

    def __init__(self, space: FemSpace, dofs):
        self.space = space
        self.dofs = np.asarray(dofs, dtype=float)

    @property
    def mesh(self):
        return self.space.mesh

    def element_quad_values(self):
        return self.space.element_values(self.dofs)

    def norm(self):
        vals = self.element_quad_values()
        meas = self.space.measures()
        return float(np.sqrt(max((meas * (vals ** 2 @ self.space._qw)).sum(), 0.0)))

    def at_points(self, points):
        """Pointwise evaluation (n = 1 only: cells located by bisection)."""
        if self.mesh.dim != 1:
            raise FemError("pointwise evaluation only supported for n = 1")
        points = np.asarray(points, dtype=float).reshape(-1)
        edges = np.array([ab for ab in self.mesh.element_vertices()])
        lows = edges[:, 0]
        idx = np.clip(np.searchsorted(lows, points, side="right") - 1,
                      0, len(lows) - 1)
        out = np.empty_like(points)
        for e in np.unique(idx):
            m = idx == e
            a, b = edges[e]
            ref = (points[m] - a) / (b - a)
            out[m] = self.space._basis(ref.reshape(-1, 1)) @ \
                self.dofs[self.space.eldofs[e]]
        return out


def fem_project(g, mesh, r2, space=None, rtol=1e-10):
    """L2(Omega)-orthogonal projection of ``g`` onto the order-r2 space.

    Solves the SPD normal equations directly and checks the relative
    residual against ``rtol``.
    """
    space = space or FemSpace(mesh, r2)
    M = space.mass_matrix()
    b, _ = space.load_vector(g)
    dofs = spla.spsolve(M, b)
    res = np.linalg.norm(M @ dofs - b)
    if res > rtol * max(np.linalg.norm(b), 1e-300):
        raise FemError(f"projection solve residual {res} above {rtol}")
    return FemFunction(space, dofs)


def element_indicators(g, mesh, r2, fem=None):
    """Per-element L2 errors of the projection of ``g``.

    Returns (eta, fem) with eta_K = ||g - P g||_{L2(K)}; the squares sum
    to the global squared projection error by construction.
    """
    if fem is None:
        fem = fem_project(g, mesh, r2)
    space = fem.space
    pts = space.quad_points()
    E, Q, n = pts.shape
    gv = np.asarray(g(pts.reshape(-1, n))).reshape(E, Q)
    diff = gv - fem.element_quad_values()
    eta2 = space.measures() * ((diff ** 2) @ space._qw)
    return np.sqrt(np.maximum(eta2, 0.0)), fem


def greedy_space(g, r2, delta, n=None, mesh0=None, max_gen=40):
    """Adaptive bisection until the global projection error is <= delta.

    Marks every element whose indicator exceeds delta / sqrt(#T) (an
    absolute threshold: if the global error is above delta, at least
    one element must exceed it, so the loop always progresses).
    Returns (mesh, FemFunction, history) where history records
    (#T, error) per iteration.
    """
    if not delta > 0:
        raise FemError(f"delta must be positive, got {delta}")
    mesh = mesh0 if mesh0 is not None else initial_mesh(n)
    history = []
    while True:
        eta, fem = element_indicators(g, mesh, r2)
        err = float(np.sqrt((eta ** 2).sum()))
        history.append((mesh.size, err))
        if err <= delta:
            return mesh, fem, history
        thr = delta / np.sqrt(mesh.size)
        marked = np.nonzero(eta > thr)[0]
        if len(marked) == 0:           # float equal-case guard
            marked = np.array([int(np.argmax(eta))])
        gens = _generations(mesh)
        blocked = [int(m) for m in marked if gens[m] >= max_gen]
        if blocked:
            raise GreedySpaceCapError(
                f"generation cap {max_gen} hit with error {err} > {delta}",
                offenders=blocked)
        mesh = refine_bisection(mesh, marked)


def _generations(mesh):
    if isinstance(mesh, IntervalMesh):
        return [lvl for lvl, _ in mesh.cells]
    return [e.gen for e in mesh.elements]
