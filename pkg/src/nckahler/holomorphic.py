"""Holomorphic calculus: the delta_j operators, holomorphic elements,
delbar-connections on free modules, flatness, H^0, morphisms, and the
dimension-2 reduction to the classical del_tau operator.

Connections are stored with plain nested lists of torus elements for the
coefficient matrices A_j (these can be rectangular in morphism checks, unlike
the square fiber matrices of the operator calculus).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np
from scipy.linalg import null_space

from .torus import TWO_PI_I, DimensionMismatch, TorusElement

DENSE_LIMIT = 6000  # max unknown count for the dense H^0 solver


def delta(a, j):
    """delta_j = del_{2j} + i del_{2j-1} (1-based j up to n/2)."""
    return a.derive(2 * j) + 1j * a.derive(2 * j - 1)


def delta_eigenvalue(m, j):
    """Eigenvalue of delta_j on U^m."""
    return TWO_PI_I * (m[2 * j - 1] + 1j * m[2 * j - 2])


def delbar_tuple(a):
    """(delta_1(a), ..., delta_{n/2}(a)) — a is holomorphic iff all vanish."""
    if a.theta.n % 2 != 0:
        raise DimensionMismatch("holomorphic calculus needs even torus dimension")
    return tuple(delta(a, j) for j in range(1, a.theta.n // 2 + 1))


def holomorphic_kernel(theta, radius, extra_ops=None):
    """C-basis of { a supported in box(radius) : delta_j(a) = 0 for all j }.

    The delta_j are diagonal on monomials, so the kernel is spanned by the
    monomials whose eigenvalue tuple vanishes; contract: only U^0.
    `extra_ops` replaces the eigenvalue functions (for sanity checks)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    half = theta.n // 2
    eigs = extra_ops or [lambda m, j=j: delta_eigenvalue(m, j)
                         for j in range(1, half + 1)]
    basis = []
    for m in iproduct(range(-radius, radius + 1), repeat=theta.n):
        if all(abs(e(m)) < 1e-12 for e in eigs):
            basis.append(TorusElement.monomial(theta, m))
    return basis


# -- matrices of torus elements (nested lists, possibly rectangular) --------


def zero_matrix(theta, rows, cols):
    return [[TorusElement.zero(theta) for _ in range(cols)] for _ in range(rows)]


def matrix_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matrix_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matrix_mul(A, B):
    if A and B and len(A[0]) != len(B):
        raise DimensionMismatch(f"cannot multiply {len(A[0])} columns into {len(B)} rows")
    theta = A[0][0].theta
    out = zero_matrix(theta, len(A), len(B[0]))
    for i, row in enumerate(A):
        for k, a in enumerate(row):
            if a.coeffs:
                for j in range(len(B[0])):
                    out[i][j] = out[i][j] + a * B[k][j]
    return out


def matrix_delta(A, j):
    return [[delta(a, j) for a in row] for row in A]


def matrix_norm(A):
    return max((a.norm() for row in A for a in row), default=0.0)


def matrix_to_json(A):
    return [[a.to_json() for a in row] for row in A]


def matrix_from_json(theta, rows):
    return [[TorusElement.from_json(theta, cell) for cell in row] for row in rows]


@dataclass
class Connection:
    """delbar-connection on the free module A^m: nabla_j = delta_j + A_j."""

    theta: object
    m: int
    A: list  # n/2 matrices, each m x m nested lists of TorusElements

    def __post_init__(self):
        half = self.theta.n // 2
        if len(self.A) != half:
            raise DimensionMismatch(f"need {half} coefficient matrices, got {len(self.A)}")
        for Aj in self.A:
            if len(Aj) != self.m or any(len(r) != self.m for r in Aj):
                raise DimensionMismatch("coefficient matrix is not m x m")

    def apply(self, j, xi):
        """(nabla_j xi)_i = delta_j(xi_i) + sum_l A_j[i][l] xi_l."""
        out = [delta(x, j) for x in xi]
        for i in range(self.m):
            for l in range(self.m):
                out[i] = out[i] + self.A[j - 1][i][l] * xi[l]
        return out

    def to_json(self):
        return {"m": self.m, "A": [matrix_to_json(Aj) for Aj in self.A]}

    @classmethod
    def from_json(cls, theta, obj):
        return cls(theta, int(obj["m"]),
                   [matrix_from_json(theta, Aj) for Aj in obj["A"]])


def grassmannian(theta, m):
    """The flat connection on the free module: all A_j = 0."""
    half = theta.n // 2
    return Connection(theta, m, [zero_matrix(theta, m, m) for _ in range(half)])


def flatness_check(conn):
    """Max curvature residual over l < r:
    delta_l(A_r) - delta_r(A_l) + [A_l, A_r]; zero iff holomorphic structure."""
    half = conn.theta.n // 2
    res = 0.0
    for l in range(1, half + 1):
        for r in range(l + 1, half + 1):
            Al, Ar = conn.A[l - 1], conn.A[r - 1]
            curv = matrix_add(
                matrix_sub(matrix_delta(Ar, l), matrix_delta(Al, r)),
                matrix_sub(matrix_mul(Al, Ar), matrix_mul(Ar, Al)),
            )
            res = max(res, matrix_norm(curv))
    return res


def _diagonal_scalars(conn, tol=1e-12):
    """If every A_j is (scalar constant) . Id, return the scalars, else None."""
    zero_mode = (0,) * conn.theta.n
    out = []
    for Aj in conn.A:
        c = Aj[0][0].coeffs.get(zero_mode, 0.0)
        for i, row in enumerate(Aj):
            for l, a in enumerate(row):
                want = {zero_mode: c} if (i == l and abs(c) > tol) else {}
                ref = TorusElement(conn.theta, want)
                if not a.close_to(ref, tol):
                    return None
        out.append(c)
    return out


def h0_solve(conn, radius):
    """C-basis of { xi in (box-truncated A)^m : delta_j(xi) + A_j xi = 0 }.

    Diagonal fast path when all A_j are scalar constants (the delta_j are
    diagonal on monomials, so the system decouples per mode); otherwise the
    finite linear system over the box coefficients is assembled densely and
    its null space computed."""
    theta, m = conn.theta, conn.m
    half = theta.n // 2
    scalars = _diagonal_scalars(conn)
    if scalars is not None:
        basis = []
        for mode in iproduct(range(-radius, radius + 1), repeat=theta.n):
            if all(abs(delta_eigenvalue(mode, j + 1) + scalars[j]) < 1e-10
                   for j in range(half)):
                for i in range(m):
                    xi = [TorusElement.zero(theta) for _ in range(m)]
                    xi[i] = TorusElement.monomial(theta, mode)
                    basis.append(xi)
        return basis

    modes = list(iproduct(range(-radius, radius + 1), repeat=theta.n))
    index = {mode: t for t, mode in enumerate(modes)}
    n_unknowns = len(modes) * m
    if n_unknowns > DENSE_LIMIT:
        raise ValueError(
            f"{n_unknowns} unknowns exceeds the dense solver limit {DENSE_LIMIT}; "
            "reduce the radius or rank"
        )
    out_modes = {}

    def out_index(mode):
        if mode not in out_modes:
            out_modes[mode] = len(out_modes)
        return out_modes[mode]

    rows_j = []
    for j in range(1, half + 1):
        entries = []  # (out_mode_index, i, unknown_index, coefficient)
        for mode, t in index.items():
            for i in range(m):
                u = t * m + i
                entries.append((out_index(mode), i, u, delta_eigenvalue(mode, j)))
                for l in range(m):
                    a = conn.A[j - 1][i][l]
                    for k, c in a.coeffs.items():
                        tgt = tuple(x + y for x, y in zip(k, mode))
                        entries.append((out_index(tgt), i,
                                        t * m + l, c * theta.phase(k, mode)))
        rows_j.append(entries)
    n_rows = len(out_modes) * m
    system = np.zeros((n_rows * half, n_unknowns), dtype=complex)
    for j, entries in enumerate(rows_j):
        base = j * n_rows
        for om, i, u, c in entries:
            system[base + om * m + i, u] += c
    ns = null_space(system, rcond=1e-10)
    basis = []
    for col in ns.T:
        xi = [dict() for _ in range(m)]
        for t, mode in enumerate(modes):
            for i in range(m):
                v = col[t * m + i]
                if abs(v) > 1e-12:
                    xi[i][mode] = v
        basis.append([TorusElement(theta, c) for c in xi])
    return basis


def morphism_check(phi, c1, c2):
    """Residual of nabla^{(2)} phi = (id tensor phi) nabla^{(1)}, i.e.
    max_j of delta_j(phi) + A_j^{(2)} phi - phi A_j^{(1)};
    phi is an m2 x m1 nested list of torus elements."""
    if len(phi) != c2.m or any(len(r) != c1.m for r in phi):
        raise DimensionMismatch(
            f"phi must be {c2.m} x {c1.m} for the given connections")
    half = c1.theta.n // 2
    res = 0.0
    for j in range(1, half + 1):
        defect = matrix_add(matrix_delta(phi, j),
                            matrix_sub(matrix_mul(c2.A[j - 1], phi),
                                       matrix_mul(phi, c1.A[j - 1])))
        res = max(res, matrix_norm(defect))
    return res


def del_tau(a, tau=1j):
    """The classical complex-torus operator at modulus tau on dimension 2:
    del_tau(U^{(r1,r2)}) = 2 pi i (r1 tau + r2) U^{(r1,r2)}."""
    if a.theta.n != 2:
        raise DimensionMismatch("del_tau lives on the 2-dimensional torus")
    return TorusElement(
        a.theta,
        {m: TWO_PI_I * (m[0] * tau + m[1]) * c for m, c in a.coeffs.items()},
    )


def ps_compare(theta, radius=4):
    """Compare delta_1 with c . del_tau at tau = i on a monomial box, fixing
    the single scalar c by evaluating both sides on U_2; returns the max
    residual after that one normalization."""
    if theta.n != 2:
        raise DimensionMismatch("comparison requires torus dimension 2")
    u2 = TorusElement.generator(theta, 2)
    lhs = delta(u2, 1).coeffs[(0, 1)]
    rhs = del_tau(u2).coeffs[(0, 1)]
    c = lhs / rhs
    res = 0.0
    for m in iproduct(range(-radius, radius + 1), repeat=2):
        a = TorusElement.monomial(theta, m)
        res = max(res, (delta(a, 1) - c * del_tau(a)).norm())
    return res
