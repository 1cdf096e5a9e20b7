"""Dense complex tensor-leg calculus and operator-subspace arithmetic.

Everything downstream works with operators on a small tensor product of
finite-dimensional Hilbert spaces.  Legs are numbered 1-based.  All
orthogonality, membership and residual semantics are fixed by the
Hilbert-Schmidt inner product <M, N> = trace(M* N).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

# Rank cut for span computations (relative to the largest singular value).
RANK_RTOL = 1e-10
# Relative residual below which two operators / spans count as equal.
EQUALITY_TOL = 1e-9
# Least-squares well-definedness threshold for induced maps.
SOLVE_TOL = 1e-8

_TINY = 1e-300


class LinalgError(ValueError):
    """Raised on dimension mismatches and ill-posed subspace operations."""


def dagger(m):
    """Adjoint (conjugate transpose)."""
    return np.conj(np.swapaxes(m, -1, -2))


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(m))


def hs_inner(a, b) -> complex:
    """<a, b> = trace(a* b)."""
    return complex(np.vdot(a, b))


def rel_residual(x, y) -> float:
    """``|x - y| / max(|x|, |y|)`` with a safe zero-zero case."""
    return hs_norm(x - y) / max(hs_norm(x), hs_norm(y), _TINY)


def kron(a, b, *rest):
    """Kronecker product of two or more matrices; dimensions multiply."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for m in rest:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


@dataclass(frozen=True)
class LegSpace:
    """An ordered tensor product of finite-dimensional Hilbert spaces.

    ``dims[k]`` is the dimension of leg ``k+1``; legs are addressed 1-based
    throughout so that subscripted operators like ``V13`` read off directly.
    """

    dims: tuple

    def __init__(self, dims):
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise LinalgError(f"leg dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def nlegs(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(math.prod(self.dims))

    def identity(self):
        return np.eye(self.dim, dtype=complex)

    def join(self, other: "LegSpace") -> "LegSpace":
        return LegSpace(self.dims + other.dims)

    def leg_dims(self, legs) -> tuple:
        return tuple(self.dims[l - 1] for l in legs)

    def _check_legs(self, legs):
        seen = set()
        for l in legs:
            if not 1 <= l <= self.nlegs or l in seen:
                raise LinalgError(f"bad leg list {legs} for {self.dims}")
            seen.add(l)

    def embed(self, m, legs):
        """Promote ``m`` (acting on the named legs, in the listed order) to
        the full space, acting as the identity elsewhere.

        The result is an exact entry rearrangement: no arithmetic beyond
        multiplication by 0/1.
        """
        m = np.asarray(m, dtype=complex)
        self._check_legs(legs)
        dl = list(self.leg_dims(legs))
        if m.shape != (math.prod(dl), math.prod(dl)):
            raise LinalgError(
                f"operator of shape {m.shape} does not act on legs {legs} of {self.dims}"
            )
        legs0 = [l - 1 for l in legs]
        rest = [i for i in range(self.nlegs) if i not in legs0]
        dr = [self.dims[i] for i in rest]
        mt = m.reshape(dl + dl)
        it = np.eye(int(math.prod(dr)), dtype=complex).reshape(dr + dr)
        t = np.multiply.outer(mt, it)
        k = len(legs0)
        r = len(rest)
        row_axis = {}
        col_axis = {}
        for pos, l in enumerate(legs0):
            row_axis[l], col_axis[l] = pos, k + pos
        for pos, l in enumerate(rest):
            row_axis[l], col_axis[l] = 2 * k + pos, 2 * k + r + pos
        perm = [row_axis[i] for i in range(self.nlegs)] + [
            col_axis[i] for i in range(self.nlegs)
        ]
        d = self.dim
        return np.ascontiguousarray(t.transpose(perm).reshape(d, d))

    def permute(self, m, new_order) -> np.ndarray:
        """Conjugate ``m`` by the permutation sending leg ``new_order[k]`` to
        position ``k+1``: the result acts on ``LegSpace(leg_dims(new_order))``.
        """
        self._check_legs(new_order)
        if len(new_order) != self.nlegs:
            raise LinalgError("permutation must list every leg exactly once")
        m = np.asarray(m, dtype=complex)
        src = [l - 1 for l in new_order]
        t = m.reshape(self.dims + self.dims)
        perm = src + [self.nlegs + i for i in src]
        d = self.dim
        return np.ascontiguousarray(t.transpose(perm).reshape(d, d))

    def partial_trace(self, m, legs) -> np.ndarray:
        """Trace out the named legs; the result acts on the remaining legs."""
        self._check_legs(legs)
        m = np.asarray(m, dtype=complex)
        t = m.reshape(self.dims + self.dims)
        n = self.nlegs
        for l in sorted(legs, reverse=True):
            t = np.trace(t, axis1=l - 1, axis2=n + l - 1)
            n -= 1
        rest = [self.dims[i] for i in range(self.nlegs) if (i + 1) not in legs]
        d = int(math.prod(rest))
        return t.reshape(d, d)

    def replace_legs(self, legs, new_dims) -> "LegSpace":
        """Leg space with the (contiguous, ascending) named legs replaced by
        ``new_dims`` in their position; used when a map changes a leg's type.
        """
        legs = list(legs)
        if legs != list(range(legs[0], legs[0] + len(legs))):
            raise LinalgError(f"legs {legs} must be contiguous and ascending")
        lo = legs[0] - 1
        hi = legs[-1]
        return LegSpace(self.dims[:lo] + tuple(new_dims) + self.dims[hi:])


def embed_legs(m, src_legs, target: LegSpace):
    """Operator acting as ``m`` on ``src_legs`` of ``target``, identity elsewhere."""
    return target.embed(m, src_legs)


def flip_tensor(m, d1: int, d2: int):
    """Conjugate an operator on C^d1 (x) C^d2 by the tensor flip."""
    return LegSpace((d1, d2)).permute(m, [2, 1])


class OperatorSubspace:
    """A linear subspace of B(H), stored as a Hilbert-Schmidt orthonormal basis.

    ``basis`` has shape (k, d, d); rows of ``flat`` are the same vectors
    flattened.  Instances are immutable.
    """

    def __init__(self, space: LegSpace, basis):
        basis = np.asarray(basis, dtype=complex)
        d = space.dim
        if basis.ndim != 3 or basis.shape[1:] != (d, d):
            raise LinalgError(f"basis shape {basis.shape} does not match dim {d}")
        self.space = space
        self.basis = basis
        self.flat = basis.reshape(basis.shape[0], d * d)
        gram = self.flat.conj() @ self.flat.T
        if basis.shape[0] and hs_norm(gram - np.eye(basis.shape[0])) > 1e-8:
            raise LinalgError("basis is not orthonormal")
        self.basis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __iter__(self):
        return iter(self.basis)

    def __repr__(self):
        return f"<OperatorSubspace dim {self.dim} on legs {self.space.dims}>"

    def coords(self, m):
        """Coordinates of ``m`` in the basis plus the projection residual
        relative to |m| (0 for members, ~1 for orthogonal operators)."""
        v = np.asarray(m, dtype=complex).reshape(-1)
        c = self.flat.conj() @ v
        res = np.linalg.norm(v - self.flat.T @ c) / max(np.linalg.norm(v), _TINY)
        return c, float(res)

    def project(self, m):
        c, _ = self.coords(m)
        d = self.space.dim
        return (self.flat.T @ c).reshape(d, d)

    def residual_of(self, m, floor: float = 0.0) -> float:
        """Projection residual relative to max(|m|, floor); pass a unit floor
        when testing products whose norm may legitimately vanish."""
        v = np.asarray(m, dtype=complex).reshape(-1)
        c = self.flat.conj() @ v
        return float(np.linalg.norm(v - self.flat.T @ c)
                     / max(np.linalg.norm(v), floor, _TINY))

    def contains(self, m, tol: float = EQUALITY_TOL) -> bool:
        return self.residual_of(m) <= tol

    def from_coords(self, c):
        d = self.space.dim
        return (self.flat.T @ np.asarray(c, dtype=complex)).reshape(d, d)


def span_close(generators, ambient: LegSpace, rtol: float = RANK_RTOL) -> OperatorSubspace:
    """Orthonormal basis of the linear span of ``generators``.

    Rank-revealing: singular values below ``rtol`` times the largest are
    treated as zero.
    """
    gens = list(generators)
    if not gens:
        raise LinalgError("span_close needs at least one generator")
    d = ambient.dim
    rows = np.array([np.asarray(g, dtype=complex).reshape(-1) for g in gens])
    if rows.shape[1] != d * d:
        raise LinalgError("generators do not act on the ambient space")
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return OperatorSubspace(ambient, np.zeros((0, d, d), dtype=complex))
    k = int(np.sum(s > rtol * s[0]))
    return OperatorSubspace(ambient, vh[:k].reshape(k, d, d))


@dataclass
class SpanComparison:
    equal: bool
    residual: float
    dims: tuple


def subspace_equal(s1: OperatorSubspace, s2: OperatorSubspace,
                   tol: float = EQUALITY_TOL) -> SpanComparison:
    """Mutual-projection test for equality of two spans on the same ambient."""
    if s1.space.dims != s2.space.dims:
        raise LinalgError("subspaces live on different ambient spaces")
    res = 0.0
    for a, b in ((s1, s2), (s2, s1)):
        for v in b.basis:
            res = max(res, a.residual_of(v))
    return SpanComparison(res <= tol, res, (s1.dim, s2.dim))


def subspace_intersect(s1: OperatorSubspace, s2: OperatorSubspace,
                       rtol: float = RANK_RTOL) -> OperatorSubspace:
    """Intersection via principal angles.

    Directions whose principal cosine is within ``rtol`` of 1 are kept; the
    returned basis lies in ``s1`` (and, up to ``rtol``, in ``s2``).
    """
    if s1.space.dims != s2.space.dims:
        raise LinalgError("subspaces live on different ambient spaces")
    d = s1.space.dim
    if s1.dim == 0 or s2.dim == 0:
        return OperatorSubspace(s1.space, np.zeros((0, d, d), dtype=complex))
    g = s1.flat.conj() @ s2.flat.T
    u, s, _ = np.linalg.svd(g)
    k = int(np.sum(s >= 1.0 - rtol))
    basis = (u[:, :k].T @ s1.flat).reshape(k, d, d)
    if k == 0:
        return OperatorSubspace(s1.space, basis)
    return span_close(list(basis), s1.space)


class LinearMap:
    """A linear map defined on an operator subspace, with values in B(target).

    The map is stored as the images of an orthonormal basis of its domain;
    applying it to an operator first projects onto that domain (the projection
    residual is reported by :meth:`coords_residual` when it matters).
    """

    def __init__(self, domain: OperatorSubspace, images, target: LegSpace,
                 residual: float = 0.0):
        images = np.asarray(images, dtype=complex)
        dt = target.dim
        if images.shape != (domain.dim, dt, dt):
            raise LinalgError(
                f"need {domain.dim} images of shape ({dt},{dt}), got {images.shape}"
            )
        self.domain = domain
        self.target = target
        self.images = images
        self.images_flat = images.reshape(domain.dim, dt * dt)
        self.residual = float(residual)
        self.images.setflags(write=False)

    def __call__(self, m):
        c, _ = self.domain.coords(m)
        dt = self.target.dim
        return (self.images_flat.T @ c).reshape(dt, dt)

    def coords_residual(self, m) -> float:
        return self.domain.coords(m)[1]

    def image_span(self) -> OperatorSubspace:
        return span_close(list(self.images), self.target)

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """self after inner (domain of ``inner``)."""
        imgs = np.array([self(m) for m in inner.images])
        return LinearMap(inner.domain, imgs, self.target,
                         residual=max(self.residual, inner.residual))

    def min_singular_ratio(self) -> float:
        """Smallest/largest singular value of the coordinate matrix; an
        injectivity certificate (kernel-freeness) when well above rank noise."""
        s = np.linalg.svd(self.images_flat, compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            return 0.0
        return float(s[-1] / s[0])

    def apply_to_legs(self, w, legs, space: LegSpace):
        """Apply the map to the named (contiguous) legs of ``w``.

        ``w`` must lie in domain (x) B(other legs) up to projection; the
        named legs must carry exactly the domain's leg space.  Returns the
        transformed operator together with its leg space.
        """
        legs = list(legs)
        if space.leg_dims(legs) != self.domain.space.dims:
            raise LinalgError(
                f"legs {legs} of {space.dims} do not carry {self.domain.space.dims}"
            )
        w = np.asarray(w, dtype=complex)
        n = space.nlegs
        legs0 = [l - 1 for l in legs]
        rest = [i for i in range(n) if i not in legs0]
        t = w.reshape(space.dims + space.dims)
        perm = (legs0 + [n + l for l in legs0]
                + rest + [n + i for i in rest])
        dl = int(math.prod(space.leg_dims(legs)))
        dr = int(math.prod(space.dims[i] for i in rest))
        g = t.transpose(perm).reshape(dl * dl, dr * dr)
        c = self.domain.flat.conj() @ g                  # (k, dr*dr)
        out_flat = self.images_flat.T @ c                # (dt*dt, dr*dr)
        out_space = space.replace_legs(legs, self.target.dims)
        tdims = self.target.dims
        k = len(tdims)
        res = out_flat.reshape(tdims + tdims + tuple(space.dims[i] for i in rest) * 2)
        # interleave target legs back into position
        lo = legs0[0]
        new_n = out_space.nlegs
        row_axis = {}
        col_axis = {}
        for pos in range(k):
            row_axis[lo + pos], col_axis[lo + pos] = pos, k + pos
        for pos, i in enumerate(rest):
            j = i if i < lo else i - len(legs0) + k
            row_axis[j] = 2 * k + pos
            col_axis[j] = 2 * k + len(rest) + pos
        perm_back = [row_axis[i] for i in range(new_n)] + [
            col_axis[i] for i in range(new_n)
        ]
        d = out_space.dim
        return np.ascontiguousarray(res.transpose(perm_back).reshape(d, d)), out_space


def identity_map(domain: OperatorSubspace) -> LinearMap:
    return LinearMap(domain, domain.basis.copy(), domain.space)


def solve_linear_map(inputs, outputs, in_space: LegSpace, out_space: LegSpace,
                     rtol: float = RANK_RTOL) -> LinearMap:
    """Least-squares linear map with ``L(inputs[i]) ~ outputs[i]``.

    The inputs are orthonormalized first; ``residual`` on the result is the
    worst relative defect max_i |L(inputs[i]) - outputs[i]| / |outputs[i]|.
    A residual above ~1e-8 means the requested assignment is not a
    well-defined linear map on span(inputs).
    """
    inputs = list(inputs)
    outputs = list(outputs)
    if len(inputs) != len(outputs) or not inputs:
        raise LinalgError("need equally many inputs and outputs, at least one")
    dom = span_close(inputs, in_space, rtol=rtol)
    x = np.array([np.asarray(m, dtype=complex).reshape(-1) for m in inputs])
    y = np.array([np.asarray(m, dtype=complex).reshape(-1) for m in outputs])
    c = x @ dom.flat.conj().T                           # (n, k) coordinates
    sol, *_ = np.linalg.lstsq(c, y, rcond=None)
    recon = c @ sol
    res = 0.0
    for i in range(len(inputs)):
        res = max(res, np.linalg.norm(recon[i] - y[i])
                  / max(np.linalg.norm(y[i]), 1.0))
    dt = out_space.dim
    return LinearMap(dom, sol.reshape(dom.dim, dt, dt), out_space, residual=res)


def tensor_subspace(s1: OperatorSubspace, s2: OperatorSubspace) -> OperatorSubspace:
    """Span of {a (x) b} over the two bases; orthonormality is inherited
    because the HS inner product is multiplicative under Kronecker products."""
    space = s1.space.join(s2.space)
    basis = np.array([kron(a, b) for a in s1.basis for b in s2.basis])
    if basis.size == 0:
        return OperatorSubspace(space, np.zeros((0, space.dim, space.dim), complex))
    return OperatorSubspace(space, basis)


def star_hom_residual(phi: LinearMap, basis=None, unit=None) -> float:
    """Worst defect of multiplicativity, *-compatibility and unitality of
    ``phi`` over the given basis of its domain (default: the stored one).

    The domain span must be an algebra for this to be meaningful.
    """
    mats = list(basis) if basis is not None else list(phi.domain.basis)
    imgs = [phi(m) for m in mats]
    worst = 0.0
    scale = max(max(hs_norm(m) for m in imgs), 1.0)
    for i, a in enumerate(mats):
        worst = max(worst, hs_norm(phi(dagger(a)) - dagger(imgs[i])) / scale)
        for j, b in enumerate(mats):
            worst = max(worst, hs_norm(phi(a @ b) - imgs[i] @ imgs[j]) / scale ** 2)
    if unit is not None:
        worst = max(worst, rel_residual(phi(unit), phi.target.identity()))
    return worst
