"""The ODE q d/dq psi = A(q) psi with a simple pole at q = 0.

Formal side (exact): with A(q) = sum_n Ahat_n q^n the modes of a solution
psi = sum psihat_n q^n satisfy

    (n - Ahat_0) psihat_n = sum_{j<n} Ahat_{n-j} psihat_j,

solved order by order.  At a resonance (n - Ahat_0 singular) no mode is
ever invented: a seed must be supplied and is verified against the
recursion.  The convergence certificate mirrors the classical majorant
argument: with M the resonance bound, beta = M + 1 dominates
||(n - Ahat_0)^{-1}|| for n > M via the Neumann series
(n - Ahat_0)^{-1} = n^{-1} sum_j (Ahat_0/n)^j, alpha bounds
sum ||Ahat_n|| r1^n, gamma = max(1, alpha beta), and every radius
r0 < r1/gamma works; we certify r0 = r1/(2 gamma) together with the
inequality  r1^n ||psihat_n|| <= gamma n^{-1} sum_{j<n} r1^j ||psihat_j||
on all computed modes beyond M.

Numeric side (the only floating-point code in the package): classical
fixed-step RK4 transport of psi' = A(q) psi / q along straight segments
between waypoints, with a step-halving Richardson error estimate.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import mat_one_norm, mat_vec, solve_linear, vec_one_norm
from .series import TruncSeries

__all__ = [
    "PoleODE",
    "FormalSolution",
    "RadiusEstimate",
    "ResonanceError",
    "formal_solve",
    "radius_estimate",
    "NumericPath",
    "numeric_continue",
]

F0 = Fraction(0)
F1 = Fraction(1)


class PoleODE:
    """q d/dq psi = A(q) psi with A an N x N matrix of q-series that are
    holomorphic at 0 (entry floors >= 0)."""

    def __init__(self, entries, order: int | None = None):
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise ValueError("A must be square")
        self.dim = n
        rows = []
        ords = []
        for row in entries:
            out = []
            for e in row:
                if not isinstance(e, TruncSeries):
                    if order is None:
                        raise ValueError("scalar entries need an explicit order")
                    e = TruncSeries.const("q", Fraction(e), order)
                if e.floor < 0:
                    raise ValueError("entries must be holomorphic at q = 0")
                out.append(e)
                ords.append(e.order)
            rows.append(out)
        self.entries = rows
        self.order = min(ords) if ords else (order or 0)

    def coeff_matrix(self, k: int):
        """Ahat_k, defined for 0 <= k < order."""
        if not 0 <= k < self.order:
            raise IndexError(f"coefficient {k} outside the common window")
        return [[e.coeff(k) if e.floor <= k else F0 for e in row]
                for row in self.entries]

    def eval_complex(self, q: complex):
        """Truncated evaluation of A at a numeric point (Horner)."""
        out = []
        for row in self.entries:
            line = []
            for e in row:
                acc = 0j
                for k in range(e.order - 1, e.floor - 1, -1):
                    acc = acc * q + complex(e.coeff(k))
                line.append(acc * q ** e.floor if e.floor else acc)
            out.append(line)
        return out

    def __repr__(self):
        return f"PoleODE(dim={self.dim}, order={self.order})"


class ResonanceError(Exception):
    """(n - Ahat_0) is singular at a required n and no valid seed exists."""

    def __init__(self, n, reason):
        super().__init__(f"resonance at n = {n}: {reason}")
        self.n = n


class FormalSolution:
    """Modes psihat_0..psihat_K of a formal solution; the recursion
    residual is re-verified on construction."""

    def __init__(self, ode: PoleODE, modes):
        self.ode = ode
        self.modes = [list(map(Fraction, v)) for v in modes]
        for n in range(len(self.modes)):
            r = self.residual(n)
            if any(r):
                raise AssertionError(f"recursion residual nonzero at n = {n}")

    @property
    def K(self) -> int:
        return len(self.modes) - 1

    def residual(self, n: int):
        """n psihat_n - sum_{j<=n} Ahat_{n-j} psihat_j, exactly."""
        out = [n * x for x in self.modes[n]]
        for j in range(0, n + 1):
            img = mat_vec(self.ode.coeff_matrix(n - j), self.modes[j])
            out = [x - y for x, y in zip(out, img)]
        return out

    def partial_sum(self, q):
        """Value of the degree-K partial sum at an exact or float point."""
        out = [0 * q for _ in range(self.ode.dim)]
        p = 1
        for v in self.modes:
            out = [x + c * p for x, c in zip(out, v)]
            p = p * q
        return out

    def __repr__(self):
        return f"FormalSolution(K={self.K}, dim={self.ode.dim})"


def formal_solve(ode: PoleODE, seeds: dict, K: int) -> FormalSolution:
    """Run the mode recursion to order K.  ``seeds`` maps a resonant index
    n to the chosen psihat_n; each seed is verified against the recursion
    (fail closed: no seed is ever invented, and an inconsistent or missing
    seed raises ResonanceError naming n)."""
    if K >= ode.order:
        raise ValueError(f"order {K} beyond the coefficient window {ode.order}")
    A0 = ode.coeff_matrix(0)
    N = ode.dim
    modes = []
    for n in range(K + 1):
        rhs = [F0] * N
        for j in range(n):
            img = mat_vec(ode.coeff_matrix(n - j), modes[j])
            rhs = [x + y for x, y in zip(rhs, img)]
        mat = [[(n if i == k else 0) - A0[i][k] for k in range(N)] for i in range(N)]
        res = solve_linear(mat, rhs)
        if res.unique:
            if n in seeds and [Fraction(x) for x in seeds[n]] != res.solution:
                raise ResonanceError(n, "seed supplied at a non-resonant index "
                                        "disagrees with the recursion")
            modes.append(res.solution)
            continue
        if n not in seeds:
            kind = "no solution" if not res.consistent else \
                f"kernel of dimension {len(res.free)}"
            raise ResonanceError(n, f"(n - Ahat_0) singular ({kind}); seed required")
        seed = [Fraction(x) for x in seeds[n]]
        got = mat_vec(mat, seed)
        if got != rhs:
            raise ResonanceError(n, "seed violates the recursion")
        modes.append(seed)
    return FormalSolution(ode, modes)


class RadiusEstimate:
    def __init__(self, r0, r1, alpha, beta, gamma, M, growth_checked):
        self.r0 = r0
        self.r1 = r1
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.M = M
        self.growth_checked = growth_checked

    def __repr__(self):
        return (f"RadiusEstimate(r0={self.r0}, alpha={self.alpha}, "
                f"beta={self.beta}, gamma={self.gamma}, M={self.M})")


def radius_estimate(ode: PoleODE, r1, alpha=None, majorant=None,
                    solution: FormalSolution | None = None) -> RadiusEstimate:
    """Certify a convergence radius r0 for formal solutions.

    ``alpha`` bounds sum_n ||Ahat_n|| r1^n; it may be supplied directly or
    derived from a declared geometric majorant (C, g) with
    ||Ahat_n|| <= C g^n — the declaration is verified against every
    computed coefficient (sound up to the truncation order) and requires
    g r1 < 1, giving alpha = C / (1 - g r1).  When a FormalSolution is
    passed, the growth inequality

        r1^n ||psihat_n|| <= gamma n^{-1} sum_{j<n} r1^j ||psihat_j||

    is checked exactly for every computed n > M."""
    r1 = Fraction(r1)
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    norm0 = mat_one_norm(ode.coeff_matrix(0))
    M = int(norm0) + (0 if norm0 == int(norm0) else 1)  # ceil
    beta = Fraction(M + 1)
    if alpha is None:
        if majorant is None:
            raise ValueError("supply alpha or a majorant (C, g)")
        C, g = Fraction(majorant[0]), Fraction(majorant[1])
        for n in range(ode.order):
            nn = mat_one_norm(ode.coeff_matrix(n))
            if nn > C * g ** n:
                raise ValueError(f"majorant fails at coefficient {n}: "
                                 f"||Ahat_{n}|| = {nn} > {C * g ** n}")
        if g * r1 >= 1:
            raise ValueError("majorant gives no finite bound on |q| <= r1")
        alpha = C / (1 - g * r1)
    else:
        alpha = Fraction(alpha)
    gamma = max(F1, alpha * beta)
    r0 = r1 / (2 * gamma)
    growth_checked = 0
    if solution is not None:
        for n in range(M + 1, solution.K + 1):
            lhs = r1 ** n * vec_one_norm(solution.modes[n])
            rhs = gamma * Fraction(1, n) * sum(
                (r1 ** j * vec_one_norm(solution.modes[j]) for j in range(n)), F0)
            if lhs > rhs:
                raise AssertionError(f"growth inequality fails at n = {n}")
            growth_checked += 1
    return RadiusEstimate(r0, r1, alpha, beta, gamma, M, growth_checked)


class NumericPath:
    """Ordered waypoints in the punctured disc; transport runs along the
    straight segments between consecutive waypoints."""

    def __init__(self, waypoints):
        self.waypoints = [complex(w) for w in waypoints]
        if len(self.waypoints) < 2:
            raise ValueError("a path needs at least two waypoints")
        if any(abs(w) < 1e-15 for w in self.waypoints):
            raise ValueError("path must avoid the pole at q = 0")

    def segments(self):
        return list(zip(self.waypoints, self.waypoints[1:]))


def _rk4_transport(ode: PoleODE, path: NumericPath, psi, steps: int):
    def field(q, v):
        a = ode.eval_complex(q)
        return [sum(a[i][j] * v[j] for j in range(len(v))) / q
                for i in range(len(v))]

    v = [complex(x) for x in psi]
    for a, b in path.segments():
        h = (b - a) / steps
        if abs(h) == 0.0:
            raise ValueError("step underflow: degenerate segment")
        q = a
        for _ in range(steps):
            if min(abs(q), abs(q + h)) < 10 * abs(h):
                raise ValueError("pole proximity: step size comparable to |q|")
            k1 = field(q, v)
            k2 = field(q + h / 2, [x + h / 2 * k for x, k in zip(v, k1)])
            k3 = field(q + h / 2, [x + h / 2 * k for x, k in zip(v, k2)])
            k4 = field(q + h, [x + h * k for x, k in zip(v, k3)])
            v = [x + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
                 for x, a1, a2, a3, a4 in zip(v, k1, k2, k3, k4)]
            q = q + h
    return v


def numeric_continue(ode: PoleODE, psi_start, path, steps: int = 1000):
    """Transport psi along the path with classical RK4; returns
    (value, error_estimate) where the estimate is the step-halving
    Richardson difference |psi_h - psi_{h/2}| / 15.  Deterministic."""
    if not isinstance(path, NumericPath):
        path = NumericPath(path)
    if steps < 1:
        raise ValueError("steps must be positive")
    coarse = _rk4_transport(ode, path, psi_start, steps)
    fine = _rk4_transport(ode, path, psi_start, 2 * steps)
    err = max(abs(x - y) for x, y in zip(coarse, fine)) / 15.0
    return fine, err
