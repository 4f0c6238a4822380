"""Dirac operators, complex structures indexed by perfect matchings, and the
full N=(2,2) verification checklist on the noncommutative even torus.

All operators act on A_Theta tensor C^{N^2} (fiber ordering: first tensor leg
then second, via kron), except the base Dirac operator which lives on C^N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import GammaRep, build_gamma
from .ncdiff import HVector, NCDiffOp
from .report import VerificationReport, default_tol
from .torus import DimensionMismatch, TorusElement


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class Matching:
    """Perfect matching of {1..2k} into k strictly increasing disjoint pairs."""

    pairs: tuple

    def __post_init__(self):
        seen = set()
        for p in self.pairs:
            if len(p) != 2 or p[0] >= p[1]:
                raise MatchingError(f"pair {p} is not strictly increasing")
            seen.update(p)
        k = len(self.pairs)
        if seen != set(range(1, 2 * k + 1)):
            raise MatchingError(
                f"{self.pairs} is not a perfect matching of 1..{2 * k}")

    @property
    def two_k(self):
        return 2 * len(self.pairs)

    @classmethod
    def parse(cls, text):
        """Parse "1-2,3-4" into a Matching."""
        pairs = []
        for chunk in text.split(","):
            a, _, b = chunk.strip().partition("-")
            try:
                pairs.append((int(a), int(b)))
            except ValueError:
                raise MatchingError(f"cannot parse pair {chunk!r}") from None
        return cls(tuple(sorted(pairs)))

    def __str__(self):
        return ",".join(f"{a}-{b}" for a, b in self.pairs)


def enumerate_matchings(two_k):
    """All perfect matchings of {1..2k}: smallest unmatched element first,
    partner ascending.  Count is (2k-1)!! = (2k-1)(2k-3)...1."""
    if two_k % 2 != 0 or two_k < 2:
        raise MatchingError(f"need an even set size >= 2, got {two_k}")
    out = []

    def rec(remaining, acc):
        if not remaining:
            out.append(Matching(tuple(acc)))
            return
        first = remaining[0]
        for partner in remaining[1:]:
            rest = [x for x in remaining[1:] if x != partner]
            rec(rest, acc + [(first, partner)])

    rec(list(range(1, two_k + 1)), [])
    return out


# -- operator constructors --------------------------------------------------


def build_dirac(rep, theta):
    """D = sum_j del_j tensor gamma_j on the C^N fiber."""
    if rep.n != theta.n:
        raise DimensionMismatch(f"rep n={rep.n} vs theta n={theta.n}")
    op = NCDiffOp.zero(theta, rep.N)
    for j in range(1, rep.n + 1):
        op = op + NCDiffOp.derivation(theta, rep.N, j, mat=rep.gammas[j - 1])
    return op


def build_lifted(rep, theta, eps_prime=1):
    """The lifted pair on the C^{N^2} fiber and the differential it defines:

        DD    = sum_j del_j tensor kron(1, gamma_j)
        DDbar = -eps' sum_j del_j tensor kron(gamma_j, sigma)
        d     = (DD - i DDbar) / 2,   d* = (DD + i DDbar) / 2.
    """
    if rep.n != theta.n:
        raise DimensionMismatch(f"rep n={rep.n} vs theta n={theta.n}")
    N = rep.N
    eyeN = np.eye(N)
    DD = NCDiffOp.zero(theta, N * N)
    DDbar = NCDiffOp.zero(theta, N * N)
    for j in range(1, rep.n + 1):
        g = rep.gammas[j - 1]
        DD = DD + NCDiffOp.derivation(theta, N * N, j, mat=np.kron(eyeN, g))
        DDbar = DDbar + NCDiffOp.derivation(
            theta, N * N, j, mat=-eps_prime * np.kron(g, rep.sigma)
        )
    d = (DD - DDbar.scale(1j)).scale(0.5)
    d_star = (DD + DDbar.scale(1j)).scale(0.5)
    return DD, DDbar, d, d_star


def build_T_script(rep, theta, eps_prime=1):
    """T-script = sum_j (i eps'/2) kron(gamma_j, gamma_j sigma): bounded,
    self-adjoint, commutes with the algebra, and satisfies [T, d] = d."""
    N = rep.N
    mat = np.zeros((N * N, N * N), dtype=complex)
    for g in rep.gammas:
        mat += (1j * eps_prime / 2.0) * np.kron(g, g @ rep.sigma)
    return NCDiffOp.constant(theta, mat)


def build_I(matching, rep, theta):
    """Complex-structure generator for one matching:

        I = (1/2) sum_{(l,j) in pairs} [kron(1, gamma_l gamma_j)
                                        + kron(gamma_l gamma_j, 1)].
    """
    if matching.two_k != rep.n:
        raise MatchingError(f"matching covers 1..{matching.two_k}, rep has n={rep.n}")
    N = rep.N
    eyeN = np.eye(N)
    mat = np.zeros((N * N, N * N), dtype=complex)
    for (l, j) in matching.pairs:
        gg = rep.gammas[l - 1] @ rep.gammas[j - 1]
        mat += 0.5 * (np.kron(eyeN, gg) + np.kron(gg, eyeN))
    return NCDiffOp.constant(theta, mat)


def build_gamma_tilde(rep, theta):
    return NCDiffOp.constant(theta, np.kron(rep.sigma, rep.sigma))


def build_hodge_star(rep, theta):
    return NCDiffOp.constant(theta, np.kron(np.eye(rep.N), rep.sigma))


def build_pm_intertwiner(rep, theta):
    """kron(sigma, 1): conjugates the eps'=+1 differentials into eps'=-1."""
    return NCDiffOp.constant(theta, np.kron(rep.sigma, np.eye(rep.N)))


@dataclass
class KahlerPackage:
    rep: GammaRep
    theta: object
    eps_prime: int
    matching: Matching
    D: NCDiffOp
    DD: NCDiffOp
    DDbar: NCDiffOp
    d: NCDiffOp
    d_star: NCDiffOp
    T_script: NCDiffOp
    I_op: NCDiffOp
    d2: NCDiffOp
    del_hol: NCDiffOp
    del_bar: NCDiffOp
    T: NCDiffOp
    T_bar: NCDiffOp
    gamma_tilde: NCDiffOp
    hodge_star: NCDiffOp


def build_kahler_package(theta, matching=None, eps_prime=1, rep=None):
    """Assemble every operator of the construction for one (Theta, matching,
    eps') choice: d2 = [I, d], del = (d - i d2)/2, delbar = (d + i d2)/2,
    T = (T_script - i I)/2, Tbar = (T_script + i I)/2."""
    rep = build_gamma(theta.n) if rep is None else rep
    if matching is None:
        matching = enumerate_matchings(theta.n)[0]
    D = build_dirac(rep, theta)
    DD, DDbar, d, d_star = build_lifted(rep, theta, eps_prime)
    Ts = build_T_script(rep, theta, eps_prime)
    I_op = build_I(matching, rep, theta)
    d2 = I_op.commutator(d)
    del_hol = (d - d2.scale(1j)).scale(0.5)
    del_bar = (d + d2.scale(1j)).scale(0.5)
    T = (Ts - I_op.scale(1j)).scale(0.5)
    T_bar = (Ts + I_op.scale(1j)).scale(0.5)
    return KahlerPackage(
        rep=rep, theta=theta, eps_prime=eps_prime, matching=matching,
        D=D, DD=DD, DDbar=DDbar, d=d, d_star=d_star, T_script=Ts, I_op=I_op,
        d2=d2, del_hol=del_hol, del_bar=del_bar, T=T, T_bar=T_bar,
        gamma_tilde=build_gamma_tilde(rep, theta),
        hodge_star=build_hodge_star(rep, theta),
    )


# -- verification -----------------------------------------------------------


def verify_core_chain(pkg, tol=None):
    """The operator identities the construction rests on, before the full
    axiom checklist: squares of the lifted pair, nilpotency, [T,d]=d,
    [I, .] commutations, [I,[I,d]]=-d, and the d/d2 cross relations."""
    tol = default_tol() if tol is None else tol
    rp = VerificationReport(tol=tol)
    theta, m = pkg.theta, pkg.DD.m

    lap = NCDiffOp.zero(theta, m)
    for j in range(1, theta.n + 1):
        dj = NCDiffOp.derivation(theta, m, j)
        lap = lap + dj.compose(dj)
    rp.add("DD^2 = -sum del_r^2", (pkg.DD.compose(pkg.DD) + lap).residual_norm())
    rp.add("DDbar^2 = -sum del_r^2", (pkg.DDbar.compose(pkg.DDbar) + lap).residual_norm())
    rp.add("{DD, DDbar} = 0", pkg.DD.anticommutator(pkg.DDbar).residual_norm())
    rp.add("d^2 = 0", pkg.d.compose(pkg.d).residual_norm())
    rp.add("[T_script, d] = d", (pkg.T_script.commutator(pkg.d) - pkg.d).residual_norm())
    rp.add("[I, T_script] = 0", pkg.I_op.commutator(pkg.T_script).residual_norm())
    rp.add("[I, gamma_tilde] = 0", pkg.I_op.commutator(pkg.gamma_tilde).residual_norm())
    rp.add("[I, star] = 0", pkg.I_op.commutator(pkg.hodge_star).residual_norm())
    rp.add("[I, [I, d]] = -d",
           (pkg.I_op.commutator(pkg.I_op.commutator(pkg.d)) + pkg.d).residual_norm())
    d2s = pkg.d2.adjoint()
    rp.add("{d, d2*} = 0", pkg.d.anticommutator(d2s).residual_norm())
    rp.add("{d*, d2} = 0", pkg.d_star.anticommutator(pkg.d2).residual_norm())
    return rp


def verify_n22(pkg, tol=None, rng=None, samples=3):
    """Full N=(2,2) axiom checklist for one package, as a report."""
    tol = default_tol() if tol is None else tol
    rng = np.random.default_rng(7) if rng is None else rng
    rp = VerificationReport(tol=tol)
    rp.meta = {
        "n": pkg.theta.n,
        "matching": str(pkg.matching),
        "eps_prime": pkg.eps_prime,
    }
    p, pb = pkg.del_hol, pkg.del_bar
    ps, pbs = p.adjoint(), pb.adjoint()
    T, Tb = pkg.T, pkg.T_bar
    gt, st = pkg.gamma_tilde, pkg.hodge_star

    rp.add("del^2 = 0", p.compose(p).residual_norm())
    rp.add("delbar^2 = 0", pb.compose(pb).residual_norm())
    rp.add("{del, delbar} = 0", p.anticommutator(pb).residual_norm())
    rp.add("[T, Tbar] = 0", T.commutator(Tb).residual_norm())
    rp.add("[T, del] = del", (T.commutator(p) - p).residual_norm())
    rp.add("[T, delbar] = 0", T.commutator(pb).residual_norm())
    rp.add("[Tbar, del] = 0", Tb.commutator(p).residual_norm())
    rp.add("[Tbar, delbar] = delbar", (Tb.commutator(pb) - pb).residual_norm())

    for s in range(samples):
        a = TorusElement.random(pkg.theta, rng, radius=1, terms=3)
        ma = NCDiffOp.mult(a, pkg.DD.m)
        rp.add(f"[T, a] = 0 (sample {s})", T.commutator(ma).residual_norm())
        rp.add(f"[Tbar, a] = 0 (sample {s})", Tb.commutator(ma).residual_norm())
        # "bounded" commutators = derivation degree 0 in normal form
        for nm, op in (("del", p), ("delbar", pb)):
            com = op.commutator(ma)
            deg = com.max_degree()
            rp.add(f"[{nm}, a] degree-0 (sample {s})", float(deg))
        rp.add(f"{{del, [delbar, a]}} degree-0 (sample {s})",
               float(p.anticommutator(pb.commutator(ma)).max_degree()))

    rp.add("{gamma_tilde, del} = 0", gt.anticommutator(p).residual_norm())
    rp.add("{gamma_tilde, delbar} = 0", gt.anticommutator(pb).residual_norm())
    rp.add("[gamma_tilde, T] = 0", gt.commutator(T).residual_norm())
    rp.add("[gamma_tilde, Tbar] = 0", gt.commutator(Tb).residual_norm())

    # Hodge relations with zeta = -1: star del = -delbar* star, star delbar = -del* star
    rp.add("star del = -delbar* star",
           (st.compose(p) + pbs.compose(st)).residual_norm())
    rp.add("star delbar = -del* star",
           (st.compose(pb) + ps.compose(st)).residual_norm())

    rp.add("{del, delbar*} = 0", p.anticommutator(pbs).residual_norm())
    rp.add("{delbar, del*} = 0", pb.anticommutator(ps).residual_norm())
    lap_d = p.anticommutator(ps)
    lap_db = pb.anticommutator(pbs)
    rp.add("{del, del*} = {delbar, delbar*}", (lap_d - lap_db).residual_norm())

    # structural consistency of the package
    rp.add("d = del + delbar", (p + pb - pkg.d).residual_norm())
    rp.add("d + d* = DD", (pkg.d + pkg.d_star - pkg.DD).residual_norm())
    rp.add("T_script = T + Tbar", (T + Tb - pkg.T_script).residual_norm())
    rp.add("d* = (DD + i DDbar)/2",
           (pkg.d.adjoint() - pkg.d_star).residual_norm())

    # Laplacian equalities
    lap = pkg.d.anticommutator(pkg.d_star)
    d2s = pkg.d2.adjoint()
    rp.add("{d, d*} = {d2, d2*}",
           (lap - pkg.d2.anticommutator(d2s)).residual_norm())
    rp.add("{d, d*} = 2{delbar, delbar*}",
           (lap - lap_db.scale(2.0)).residual_norm())

    rp.extend(verify_core_chain(pkg, tol=tol))
    return rp


def verify_real_structure(theta, rep=None, variant="plus", tol=None, rng=None,
                          radius=3, samples=20):
    """The real-structure conditions for J = (a -> a*) tensor J_N on the C^N
    fiber: J D = eps' D J on monomial basis vectors in a box, plus the zero-
    and first-order conditions [JaJ*, b] = [JaJ*, [D, b]] = 0 on sampled
    monomial pairs."""
    tol = default_tol() if tol is None else tol
    rng = np.random.default_rng(11) if rng is None else rng
    rep = build_gamma(theta.n) if rep is None else rep
    rp = VerificationReport(tol=tol)
    rp.meta = {"n": theta.n, "variant": variant}
    C = rep.conj_matrix(variant)
    eps, eps_p, _ = rep.signs(variant)
    D = build_dirac(rep, theta)
    N = rep.N

    def J(v):
        stars = [e.star() for e in v.entries]
        return HVector([
            sum((C[i, j] * stars[j] for j in range(N)),
                TorusElement.zero(theta))
            for i in range(N)
        ])

    def J_inv(v):
        # J^2 = eps I, so J^{-1} = eps J
        return J(v).scale(eps)

    res = 0.0
    for m in _box_sample(theta.n, radius, rng, 12):
        for i in range(N):
            v = HVector.basis(theta, N, i, exponent=m)
            res = max(res, (J(D.apply(v)) - D.apply(J(v)).scale(eps_p)).norm())
    rp.add("J D = eps' D J", res)

    res0 = res1 = 0.0
    for _ in range(samples):
        ma = tuple(int(x) for x in rng.integers(-2, 3, size=theta.n))
        mb = tuple(int(x) for x in rng.integers(-2, 3, size=theta.n))
        a = TorusElement.monomial(theta, ma)
        b = TorusElement.monomial(theta, mb)
        mult_b = NCDiffOp.mult(b, N)
        Db = D.commutator(mult_b)

        def JaJstar(v, a=a):
            return J_inv(HVector([a * e for e in J(v).entries]))

        for i in range(N):
            v = HVector.basis(theta, N, i)
            bv = HVector([b * e for e in v.entries])
            res0 = max(res0, (JaJstar(bv) -
                              HVector([b * e for e in JaJstar(v).entries])).norm())
            res1 = max(res1, (JaJstar(Db.apply(v)) - Db.apply(JaJstar(v))).norm())
    rp.add("[J a J*, b] = 0", res0)
    rp.add("[J a J*, [D, b]] = 0", res1)
    return rp


def _box_sample(n, radius, rng, count):
    """A deterministic handful of exponents in box(radius), corners included."""
    out = {(0,) * n, (radius,) + (0,) * (n - 1), (-radius,) * n}
    while len(out) < count:
        out.add(tuple(int(x) for x in rng.integers(-radius, radius + 1, size=n)))
    return sorted(out)


def verify_pm_conjugation(theta, matching, rep=None):
    """Residual of W del_+ = del_- W and the delbar analogue for
    W = kron(sigma, 1), conjugating the eps' = +1 package into eps' = -1."""
    rep = build_gamma(theta.n) if rep is None else rep
    plus = build_kahler_package(theta, matching, eps_prime=1, rep=rep)
    minus = build_kahler_package(theta, matching, eps_prime=-1, rep=rep)
    W = build_pm_intertwiner(rep, theta)
    r1 = (W.compose(plus.del_hol) - minus.del_hol.compose(W)).residual_norm()
    r2 = (W.compose(plus.del_bar) - minus.del_bar.compose(W)).residual_norm()
    return max(r1, r2)


def verify_distinctness(theta, two_k, threshold=0.1, rep=None):
    """True iff the d2 operators of all matchings are pairwise well-separated."""
    rep = build_gamma(two_k) if rep is None else rep
    ops = [build_kahler_package(theta, mt, eps_prime=1, rep=rep).d2
           for mt in enumerate_matchings(two_k)]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if (ops[i] - ops[j]).residual_norm() <= threshold:
                return False
    return True
