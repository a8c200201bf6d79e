"""Vector-valued views of fields: maps t -> X, X = L2(Omega) on a grid.

The engine treats f(t, x) as a function of t with values in X.  A
:class:`SliceFn` is such a view, discretized on the field's fixed
spatial quadrature grid.  Finite differences, polynomial subtraction
and pullbacks to the unit interval compose lazily; separable fields
(tau(t) * g(x)) keep a scalar fast path through every combinator.
"""

import numpy as np
from scipy.special import comb

from .quadrature import time_nodes

_CHUNK = 64


class SpaceProfile:
    """Spatial factor g of a separable function, with cached norms."""

    def __init__(self, grid, vals, fn=None):
        self.grid = grid
        self.vals = np.asarray(vals, dtype=float)
        self.fn = fn
        self._norms = {}

    def norm(self, p=2):
        key = float(p)
        if key not in self._norms:
            self._norms[key] = self.grid.norm(self.vals, p=p)
        return self._norms[key]


class XVal:
    """Element of discretized X: nodal values plus optional structure.

    ``mu``/``profile`` tag multiples of a shared spatial profile (kept
    by every combinator on separable inputs); ``fn`` allows evaluation
    at arbitrary points of Omega when available.
    """

    def __init__(self, grid, vals, fn=None, mu=None, profile=None):
        self.grid = grid
        self.vals = np.asarray(vals, dtype=float)
        self.fn = fn
        self.mu = mu
        self.profile = profile

    @property
    def separable(self):
        return self.mu is not None and self.profile is not None

    def norm(self, p=2):
        if self.separable:
            return abs(self.mu) * self.profile.norm(p)
        return self.grid.norm(self.vals, p=p)

    def at_points(self, points):
        if self.separable and self.profile.fn is not None:
            return self.mu * self.profile.fn(points)
        if self.fn is not None:
            return self.fn(points)
        raise ValueError("X value has no off-grid evaluator")

    def scaled(self, c):
        fn = (lambda pts, _f=self.fn, _c=c: _c * _f(pts)) if self.fn else None
        return XVal(self.grid, c * self.vals, fn=fn,
                    mu=None if self.mu is None else c * self.mu,
                    profile=self.profile)


class SliceFn:
    """Map from a time interval into discretized X.

    Exactly one of (``tau``, ``profile``) or ``gen`` is set:
    separable values are tau(t) * profile, generic values come from
    ``gen(ts) -> (len(ts), M)``.
    """

    def __init__(self, grid, tau=None, profile=None, gen=None,
                 graded_t0=False, source=None):
        self.grid = grid
        self.tau = tau
        self.profile = profile
        self.gen = gen
        self.graded_t0 = graded_t0
        self.source = source    # backing Field when off-grid sampling works

    @classmethod
    def from_field(cls, field):
        grid = field.grid
        if field.separable:
            profile = SpaceProfile(grid, field.space_values(grid.points),
                                   fn=lambda pts: field.space_values(np.asarray(pts)))
            return cls(grid, tau=field.time_values, profile=profile,
                       graded_t0=field.singular_t0, source=field)
        return cls(grid, gen=lambda ts: field.sample(ts, grid.points),
                   graded_t0=field.singular_t0, source=field)

    def sample_at(self, ts, points):
        """Values at arbitrary spatial points, when a backing field exists."""
        if self.separable:
            return np.outer(self.tau(np.asarray(ts)), self.profile.fn(points))
        if self.source is not None:
            return self.source.sample(ts, points)
        raise ValueError("slice function has no off-grid evaluator")

    @property
    def separable(self):
        return self.tau is not None

    # -- evaluation ---------------------------------------------------------

    def values(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.separable:
            return np.outer(self.tau(ts), self.profile.vals)
        return np.asarray(self.gen(ts), dtype=float)

    def xnorms(self, ts):
        """||f(t)||_X for each t in ts (the X norm is always L2(Omega))."""
        ts = np.asarray(ts, dtype=float)
        if self.separable:
            return np.abs(self.tau(ts)) * self.profile.norm(2)
        vals = self.values(ts)
        return np.sqrt(np.maximum(vals ** 2 @ self.grid.weights, 0.0))

    def value_at(self, t) -> XVal:
        if self.separable:
            mu = float(self.tau(np.array([t]))[0])
            return XVal(self.grid, mu * self.profile.vals, mu=mu,
                        profile=self.profile)
        vals = self.values(np.array([t]))[0]
        return XVal(self.grid, vals)

    # -- norms in time ------------------------------------------------------

    def quad(self, a, b, panels=None):
        graded = self.graded_t0 and a == 0.0
        kw = {} if panels is None else {"panels": panels}
        return time_nodes(a, b, graded=graded, **kw)

    def lp_norm(self, a, b, p, panels=None):
        """||f||_{Lp([a,b),X)}; for p = inf the max over quadrature nodes."""
        if not b > a:
            return 0.0
        ts, ws = self.quad(a, b, panels=panels)
        ns = self.xnorms(ts)
        if np.isinf(p):
            return float(np.max(ns))
        return float(np.dot(ws, ns ** p) ** (1.0 / p))

    # -- combinators --------------------------------------------------------

    def difference(self, h, r):
        """r-th order forward difference with step h, as a new SliceFn.

        The result is meaningful on the shrunken interval [a, b - r h).
        """
        signs = np.array([comb(r, i, exact=True) * (-1) ** (r - i)
                          for i in range(r + 1)], dtype=float)
        if self.separable:
            def tau(ts, _t=self.tau):
                ts = np.asarray(ts, dtype=float)
                acc = np.zeros_like(ts)
                for i, c in enumerate(signs):
                    acc += c * _t(ts + i * h)
                return acc
            return SliceFn(self.grid, tau=tau, profile=self.profile,
                           graded_t0=self.graded_t0)

        def gen(ts, _g=self.gen):
            ts = np.asarray(ts, dtype=float)
            acc = None
            for i, c in enumerate(signs):
                v = c * np.asarray(_g(ts + i * h), dtype=float)
                acc = v if acc is None else acc + v
            return acc
        return SliceFn(self.grid, gen=gen, graded_t0=self.graded_t0)

    def minus_expansion(self, fns, coeffs):
        """Subtract sum_k coeffs[k] * fns[k](t) (coeffs are X values)."""
        if self.separable and all(c.separable and c.profile is self.profile
                                  for c in coeffs):
            mus = [c.mu for c in coeffs]

            def tau(ts, _t=self.tau):
                ts = np.asarray(ts, dtype=float)
                acc = _t(ts).astype(float).copy()
                for mu, fn in zip(mus, fns):
                    acc -= mu * fn(ts)
                return acc
            return SliceFn(self.grid, tau=tau, profile=self.profile,
                           graded_t0=self.graded_t0)

        vecs = [c.vals for c in coeffs]

        def gen(ts):
            ts = np.asarray(ts, dtype=float)
            acc = self.values(ts).copy()
            for vec, fn in zip(vecs, fns):
                acc -= np.outer(fn(ts), vec)
            return acc
        return SliceFn(self.grid, gen=gen, graded_t0=self.graded_t0)

    def minus_monomials(self, coeffs, powers):
        """Subtract sum_k coeffs[k] * t^powers[k] (coeffs are X values)."""
        fns = [(lambda ts, _k=k: np.asarray(ts) ** _k) for k in powers]
        return self.minus_expansion(fns, coeffs)

    def pullback(self, a, d):
        """View on [0, 1): theta -> f(a + theta d)."""
        graded = self.graded_t0 and a == 0.0
        if self.separable:
            return SliceFn(self.grid,
                           tau=lambda th, _t=self.tau: _t(a + d * np.asarray(th)),
                           profile=self.profile, graded_t0=graded)
        return SliceFn(self.grid,
                       gen=lambda th, _g=self.gen: _g(a + d * np.asarray(th)),
                       graded_t0=graded)


def pairwise_lp_distance(fn: SliceFn, ts, ws, ys, p):
    """g(y) = int ||f(t) - f(y)||_X^p dt for each candidate y, vectorized.

    ``ts, ws`` are the quadrature nodes/weights of the integral and
    ``ys`` the candidate time points.  Returns an array of len(ys).
    """
    if fn.separable:
        taut = fn.tau(np.asarray(ts))
        tauy = fn.tau(np.asarray(ys))
        gnorm = fn.profile.norm(2)
        diff = np.abs(taut[None, :] - tauy[:, None]) * gnorm
        return diff ** p @ ws
    vt = fn.values(ts)
    out = np.empty(len(ys))
    w = fn.grid.weights
    ys = np.asarray(ys)
    for lo in range(0, len(ys), _CHUNK):
        vy = fn.values(ys[lo:lo + _CHUNK])
        d2 = ((vt[None, :, :] - vy[:, None, :]) ** 2) @ w
        out[lo:lo + _CHUNK] = np.sqrt(np.maximum(d2, 0.0)) ** p @ ws
    return out
