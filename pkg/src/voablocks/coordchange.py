"""The group of local coordinate changes rho (rho(0)=0, rho'(0) != 0) and
its exponential-Virasoro representation U(rho) on graded modules.

Core identity: every rho factors as

    rho(z) = c0 * exp(sum_{n>0} c_n z^{n+1} d/dz) z,

and the representation is U(rho) = c0^{Ltilde0} exp(sum_{n>0} c_n L_n).
The c_n are extracted by an order-by-order triangular solve: the equation
for the z^{n+1} coefficient contains c_n linearly with coefficient c0.

The scalar ring is generic: coefficients may be rationals or truncated
series in another variable.  The latter is what powers the conjugation
check U(a) Y(v,z) U(a)^{-1} = Y(U(rho_z) v, a(z)) where
rho_z(t) = a(t+z) - a(z) has z-series coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import vec_add_into, vec_is_zero, vec_max_weight, vec_scale, weight_of
from .models import Module
from .series import TruncSeries, series_comp_inverse
from .virasoro import apply_exp_raising, gbinom

__all__ = [
    "CoordChange",
    "poly_series",
    "poly_compose",
    "gamma_series",
    "extract_coeffs",
    "exp_field_series",
    "U_apply",
    "U_apply_series",
    "U_inverse_apply",
    "gamma_relation_check",
    "derivative_at_identity",
    "huang_conjugation_check",
]

F0 = Fraction(0)
F1 = Fraction(1)


def _is_scalar(x):
    return isinstance(x, (int, Fraction))


def _inv(x):
    return Fraction(1) / x if _is_scalar(x) else x.reciprocal()


def _nz(x) -> bool:
    return x != 0 if _is_scalar(x) else bool(x)


def poly_series(cmap: dict, var: str, order: int) -> TruncSeries:
    """Exact polynomial as a truncated series at any requested order."""
    cmap = {k: Fraction(v) if isinstance(v, int) else v for k, v in cmap.items() if v}
    if any(k >= order for k in cmap):
        raise ValueError("order too small for the polynomial")
    return TruncSeries.from_coeff_map(var, cmap, order)


def poly_compose(p1: dict, p2: dict) -> dict:
    """Exact composition of polynomials given as exponent->coefficient maps."""
    out: dict = {}
    for k, c in p1.items():
        # p2^k by repeated convolution
        power = {0: F1}
        for _ in range(k):
            nxt: dict = {}
            for e1, c1 in power.items():
                for e2, c2 in p2.items():
                    nxt[e1 + e2] = nxt.get(e1 + e2, F0) + c1 * c2
            power = nxt
        for e, cc in power.items():
            v = out.get(e, F0) + c * cc
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


class CoordChange:
    """A coordinate change given by an exact polynomial rho(z) = sum a_k z^k
    (a_0 = 0, a_1 != 0), regenerable as a series at any truncation order."""

    def __init__(self, poly: dict):
        poly = {int(k): Fraction(v) for k, v in poly.items() if v}
        if poly.get(0):
            raise ValueError("rho(0) must be 0")
        poly.pop(0, None)
        if not poly.get(1):
            raise ValueError("rho'(0) must be nonzero (not in the group)")
        self.poly = poly
        self.degree = max(poly)
        self._coeff_cache: dict[int, list] = {}

    @classmethod
    def identity(cls) -> "CoordChange":
        return cls({1: F1})

    def series(self, order: int, var: str = "z") -> TruncSeries:
        return poly_series(self.poly, var, max(order, self.degree + 1))

    def compose(self, other: "CoordChange") -> "CoordChange":
        return CoordChange(poly_compose(self.poly, other.poly))

    def inverse_series(self, order: int, var: str = "z") -> TruncSeries:
        return series_comp_inverse(self.series(order, var))

    def coeffs(self, count: int) -> list:
        """[c0, c1, ..., c_count] of the exponential factorization."""
        if count not in self._coeff_cache:
            self._coeff_cache[count] = extract_coeffs(self.series(count + 2), count)
        return list(self._coeff_cache[count])

    def deriv_at0(self, k: int) -> Fraction:
        """k-th derivative of rho at 0."""
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        return self.poly.get(k, F0) * fact

    def __repr__(self):
        return f"CoordChange({self.poly})"


def exp_field_series(cs, var: str, order: int) -> TruncSeries:
    """exp(sum_{m>=1} cs[m-1] z^{m+1} d/dz) applied to z, truncated."""
    f = TruncSeries.identity(var, order)
    out = f
    term = f
    k = 0
    while not term.is_zero():
        k += 1
        d = term.deriv()
        nxt = TruncSeries.zero(var, order)
        for m, cm in enumerate(cs, start=1):
            if _is_scalar(cm) and cm == 0:
                continue
            nxt = nxt + d.shift(m + 1).scale(cm)
        term = (nxt / k).truncate(min(order, nxt.order))
        out = out + term
    return out


def extract_coeffs(rho: TruncSeries, count: int | None = None) -> list:
    """[c0, c1, ..., c_count] with rho = c0 exp(sum c_n z^{n+1} d/dz) z.

    c0 = rho'(0); each further c_n is solved linearly at order z^{n+1}.
    Closed forms at low order: c1 = (1/2) rho''(0)/rho'(0),
    c2 = (1/6) rho'''(0)/rho'(0) - (1/4)(rho''(0)/rho'(0))^2.
    """
    if rho.order < 2:
        raise ValueError("series window too small to see rho'(0)")
    if rho.floor > 1:
        raise ValueError("rho'(0) = 0: not a coordinate change")
    a1 = rho.coeff(1)
    if not _nz(a1):
        raise ValueError("rho'(0) = 0: not a coordinate change")
    if rho.floor < 1 and _nz(rho.coeff(0)):
        raise ValueError("rho(0) must be 0")
    if count is None:
        count = rho.order - 2
    if count > rho.order - 2:
        raise ValueError("series order too small for requested coefficient count")
    inv_a1 = _inv(a1)
    cs: list = []
    for n in range(1, count + 1):
        s = exp_field_series(cs, rho.var, n + 2)
        cn = rho.coeff(n + 1) * inv_a1 - s.coeff(n + 1)
        cs.append(cn)
    return [a1] + cs


def gamma_series(xi, order: int, var: str = "z") -> TruncSeries:
    """gamma_xi(z) = 1/(xi+z) - 1/xi = sum_{k>=1} (-1)^k xi^{-k-1} z^k."""
    xi = Fraction(xi)
    if xi == 0:
        raise ValueError("xi must be nonzero")
    cmap = {k: Fraction((-1) ** k) / xi ** (k + 1) for k in range(1, order)}
    return TruncSeries.from_coeff_map(var, cmap, order)


def U_apply_series(rho: TruncSeries, w: dict, module: Module) -> dict:
    """U(rho) w from a truncated series rho with sufficient order."""
    W = vec_max_weight(w)
    if W < 0:
        return {}
    cs = extract_coeffs(rho, min(W, max(rho.order - 2, 0)))
    if len(cs) - 1 < W:
        raise ValueError(f"series order {rho.order} too small for weight {W}")
    return apply_exp_raising(cs[1:], cs[0], w, module)


def U_apply(rho, w: dict, module: Module) -> dict:
    """U(rho) w for rho a CoordChange or a TruncSeries."""
    if isinstance(rho, CoordChange):
        W = vec_max_weight(w)
        if W < 0:
            return {}
        cs = rho.coeffs(W)
        return apply_exp_raising(cs[1:], cs[0], w, module)
    return U_apply_series(rho, w, module)


def U_inverse_apply(rho: CoordChange, w: dict, module: Module) -> dict:
    W = vec_max_weight(w)
    return U_apply_series(rho.inverse_series(W + 2), w, module)


def _ltilde0(w: dict) -> dict:
    return {label: c * weight_of(label) for label, c in w.items() if weight_of(label)}


def _scale_ltilde0(s, w: dict) -> dict:
    return {label: c * s ** weight_of(label) for label, c in w.items()}


def gamma_relation_check(xi, w: dict, module: Module) -> bool:
    """U(gamma_xi) xi^{Ltilde0} w == xi^{-Ltilde0} U(gamma_1) w, exactly."""
    xi = Fraction(xi)
    W = vec_max_weight(w)
    order = W + 3
    lhs = U_apply_series(gamma_series(xi, order), _scale_ltilde0(xi, w), module)
    rhs = _scale_ltilde0(_inv(xi), U_apply_series(gamma_series(F1, order), w, module))
    diff = vec_add_into(dict(lhs), rhs, Fraction(-1))
    return vec_is_zero(diff)


def derivative_at_identity(drho: TruncSeries, w: dict, module: Module) -> dict:
    """d/dzeta U(rho_zeta) w at zeta = 0 for the family rho_zeta = z + zeta*drho:

        sum_{n>=1} (coefficient of z^n in drho) * Ltilde_{n-1} w

    where Ltilde_0 is the grading operator (not L_0).
    """
    W = vec_max_weight(w)
    nmax = W + 1
    if drho.order - 1 < nmax:
        raise ValueError("drho truncated too soon for this vector's weights")
    out: dict = {}
    for n in range(1, nmax + 1):
        cn = drho.coeff(n)
        if _is_scalar(cn) and cn == 0:
            continue
        ln_w = _ltilde0(w) if n == 1 else module.L_apply(n - 1, w)
        vec_add_into(out, ln_w, cn)
    return out


# ---------------------------------------------------------------------------
# Huang's conjugation identity


class HuangReport:
    def __init__(self, passed: bool, lhs: dict, rhs: dict, window: tuple):
        self.passed = passed
        self.lhs = lhs  # label -> TruncSeries in z
        self.rhs = rhs
        self.window = window

    def __bool__(self):
        return self.passed


def _series_map_eq(a: dict, b: dict, floor: int, order: int) -> bool:
    labels = set(a) | set(b)
    for label in labels:
        sa = a.get(label)
        sb = b.get(label)
        for n in range(floor, order):
            ca = sa.coeff(n) if sa is not None else F0
            cb = sb.coeff(n) if sb is not None else F0
            if ca != cb:
                return False
    return True


def huang_conjugation_check(alpha: CoordChange, v, w: dict, module: Module,
                            z_order: int) -> HuangReport:
    """Exact check of U(a) Y(v,z) U(a)^{-1} w = Y(U(rho_z) v, a(z)) w in
    W((z)) on the window [-(wt v + wt w), z_order).

    rho_z(t) = a(t+z) - a(z) is expanded with z-series coefficients; the
    right-hand side substitutes a(z) into the mode expansion of the
    transformed vector.
    """
    voa = module.voa
    if isinstance(v, tuple):
        v = {v: F1}
    Wv = vec_max_weight(v)
    Ww = vec_max_weight(w)
    K = z_order
    nmax = Wv + Ww - 1
    floor = -(nmax + 1)

    # generous z-window: reciprocal powers of a(z) eat ~1 order per factor
    A = 2 * K + 2 * (Wv + Ww) + 8

    # ---- left side: mode-by-mode conjugation, exact rational vectors
    ainv_w = U_apply_series(alpha.inverse_series(Ww + 2), w, module)
    lhs: dict = {}
    for n in range(-K, nmax + 1):
        t = module.mode_apply(v, n, ainv_w)
        if not t:
            continue
        t = U_apply(alpha, t, module)
        for label, c in t.items():
            lhs.setdefault(label, {})[-n - 1] = c
    lhs = {label: TruncSeries.from_coeff_map("z", cmap, K) for label, cmap in lhs.items()}

    # ---- right side
    # rho_z(t) = a(t+z) - a(z): t-coefficient j is sum_k a_k C(k,j) z^{k-j}
    tcoeffs = []
    for j in range(1, Wv + 2):
        cmap = {k - j: alpha.poly[k] * gbinom(k, j) for k in alpha.poly if k >= j}
        tcoeffs.append(TruncSeries.from_coeff_map("z", cmap, A))
    rho_z = TruncSeries("t", 1, tcoeffs)
    cs = extract_coeffs(rho_z, Wv)
    vt = apply_exp_raising(cs[1:], cs[0], v, voa)  # VOA vector, z-series coeffs

    a_series = alpha.series(A)
    a_inv_mul = a_series.reciprocal()  # 1/a(z), floor -1
    pow_cache: dict[int, TruncSeries] = {0: TruncSeries.const("z", F1, A)}

    def a_pow(m: int) -> TruncSeries:
        if m not in pow_cache:
            base = a_series if m > 0 else a_inv_mul
            prev = a_pow(m - 1 if m > 0 else m + 1)
            pow_cache[m] = prev * base
        return pow_cache[m]

    rhs_map: dict = {}
    for ul, fu in vt.items():
        wt_u = weight_of(ul)
        for n in range(-K, wt_u + Ww):
            t = module.mode_apply(ul, n, w)
            if not t:
                continue
            zser = a_pow(-n - 1) * fu  # scalar or same-variable series factor
            for label, c in t.items():
                cur = rhs_map.get(label)
                add = zser.map_coeffs(lambda x, c=c: x * c)
                rhs_map[label] = add if cur is None else cur + add
    rhs = rhs_map

    window_ok = all(s.order >= K for s in rhs.values())
    if not window_ok:
        raise ValueError("internal z-window exhausted; raise the order margin")
    passed = _series_map_eq(lhs, rhs, floor, K)
    return HuangReport(passed, lhs, rhs, (floor, K))
