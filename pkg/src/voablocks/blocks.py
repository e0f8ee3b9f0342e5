"""Genus-0 conformal blocks on the Riemann sphere.

Marked points carry the local coordinates zeta - p (finite p) and 1/zeta
(at infinity).  Everything global is exact: meromorphic functions with
poles only at the marked points are stored in partial-fraction form

    f(zeta) = sum_k c_k zeta^k  +  sum_p sum_m a_{p,m} (zeta - p)^{-m},

and gluing/reconstruction from Laurent tails is exact linear algebra.  The
solvability criterion is the strong residue theorem: the tails s_i glue to
a global function iff sum_i Res_i (s_i * lambda) = 0 for every 1-form
lambda with poles only at the marked points; a violated pairing is
reported as a witness of the shape lambda = zeta^m (zeta - z0)^n dzeta.

Block functionals are linear maps on tensors of capped module vectors.
Propagation inserts one extra VOA vector varying over the sphere; its
value at a rational point y is computed by assembling the Laurent tails of
the propagated section at every marked point, reconstructing the unique
global rational function, and evaluating at y.  At infinity the insertion
is twisted by U(gamma_{1/w}) = e^{w^{-1} L_1} (-w^2)^{Ltilde0} and the
1-form bookkeeping uses dzeta = -w^{-2} dw.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import vec_add_into, vec_is_zero, vec_max_weight, weight_of
from .linalg import solve_linear
from .models import Module, contragredient
from .series import TruncSeries
from .virasoro import gbinom

__all__ = [
    "INFINITY",
    "SpherePoints",
    "RationalFunction",
    "LaurentTail",
    "ResidueReport",
    "UnderdeterminedCap",
    "strong_residue_check",
    "rational_glue",
    "residue_pairing",
    "global_form_tails",
    "BlockFunctional",
    "IntertwinerError",
    "hom_block",
    "identity_hom",
    "three_point_block",
    "vertex_block",
    "gamma_twist",
    "propagate_eval",
    "propagate_block",
    "block_property_check",
]

F0 = Fraction(0)
F1 = Fraction(1)


class _Infinity:
    """The point at infinity on the sphere; local coordinate 1/zeta."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


class SpherePoints:
    """Ordered distinct marked points on P^1; at most one INFINITY, last."""

    def __init__(self, points):
        pts = [p if p is INFINITY else Fraction(p) for p in points]
        if len({repr(p) for p in pts}) != len(pts):
            raise ValueError("marked points must be distinct")
        if any(p is INFINITY for p in pts) and pts[-1] is not INFINITY:
            raise ValueError("INFINITY must come last")
        self.points = pts

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def finite(self):
        return [p for p in self.points if p is not INFINITY]

    @property
    def has_infinity(self) -> bool:
        return bool(self.points) and self.points[-1] is INFINITY

    def __repr__(self):
        return f"SpherePoints({self.points})"


def _recip_power(c0, c1, m: int, var: str, order: int) -> TruncSeries:
    """(c0 + c1 t)^(-m) as a series in t (c0 != 0, m >= 1)."""
    base = TruncSeries.from_coeff_map(var, {0: Fraction(c0), 1: Fraction(c1)},
                                      order + 1).reciprocal()
    out = base
    for _ in range(m - 1):
        out = out * base
    return out.truncate(order)


class RationalFunction:
    """Partial-fraction form: polynomial part + pole parts at finite points."""

    def __init__(self, poly=None, poles=None):
        self.poly = {int(k): Fraction(c) for k, c in (poly or {}).items() if c}
        if any(k < 0 for k in self.poly):
            raise ValueError("polynomial part needs exponents >= 0")
        self.poles = {}
        for p, part in (poles or {}).items():
            part = {int(m): Fraction(c) for m, c in part.items() if c}
            if any(m < 1 for m in part):
                raise ValueError("pole orders must be >= 1")
            if part:
                self.poles[Fraction(p)] = part

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        poly = dict(self.poly)
        for k, c in other.poly.items():
            poly[k] = poly.get(k, F0) + c
        poles = {p: dict(part) for p, part in self.poles.items()}
        for p, part in other.poles.items():
            dst = poles.setdefault(p, {})
            for m, c in part.items():
                dst[m] = dst.get(m, F0) + c
        return RationalFunction(poly, poles)

    def scale(self, s) -> "RationalFunction":
        s = Fraction(s)
        return RationalFunction({k: c * s for k, c in self.poly.items()},
                                {p: {m: c * s for m, c in part.items()}
                                 for p, part in self.poles.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.poly and not self.poles

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((tuple(sorted(self.poly.items())),
                     tuple(sorted((p, tuple(sorted(part.items())))
                                  for p, part in self.poles.items()))))

    # -- evaluation and expansion -------------------------------------

    def pole_order_at(self, p) -> int:
        if p is INFINITY:
            return max(self.poly, default=0)
        part = self.poles.get(Fraction(p))
        return max(part, default=0) if part else 0

    def eval(self, x) -> Fraction:
        x = Fraction(x)
        if x in self.poles:
            raise ZeroDivisionError(f"evaluation at the pole {x}")
        total = sum((c * x ** k for k, c in self.poly.items()), F0)
        for p, part in self.poles.items():
            for m, c in part.items():
                total += c * (x - p) ** (-m)
        return total

    def expand_at(self, p, order: int, var: str = "t") -> TruncSeries:
        """Laurent expansion in the local coordinate t = zeta - p."""
        p = Fraction(p)
        cmap = {-m: c for m, c in self.poles.get(p, {}).items()}
        for k, c in self.poly.items():
            for j in range(0, min(k, max(order - 1, 0)) + 1):
                cmap[j] = cmap.get(j, F0) + c * gbinom(k, j) * p ** (k - j)
        for p2, part in self.poles.items():
            if p2 == p:
                continue
            for m, c in part.items():
                if order <= 0:
                    continue
                s = _recip_power(p - p2, F1, m, var, order)
                for e in range(0, order):
                    cmap[e] = cmap.get(e, F0) + c * s.coeff(e)
        cmap = {e: c for e, c in cmap.items() if c and e < order}
        return TruncSeries.from_coeff_map(var, cmap, order)

    def expand_at_infinity(self, order: int, var: str = "w") -> TruncSeries:
        """Laurent expansion in w = 1/zeta."""
        cmap = {-k: c for k, c in self.poly.items()}
        for p, part in self.poles.items():
            for m, c in part.items():
                # (1/w - p)^{-m} = w^m (1 - p w)^{-m}
                if p == 0:
                    cmap[m] = cmap.get(m, F0) + c
                    continue
                if order - m <= 0:
                    continue
                s = _recip_power(F1, -p, m, var, order - m)
                for e in range(0, order - m):
                    cmap[e + m] = cmap.get(e + m, F0) + c * s.coeff(e)
        cmap = {e: c for e, c in cmap.items() if c and e < order}
        return TruncSeries.from_coeff_map(var, cmap, order)

    def expand_at_point(self, p, order: int, var: str | None = None) -> TruncSeries:
        if p is INFINITY:
            return self.expand_at_infinity(order, var or "w")
        return self.expand_at(p, order, var or "t")

    def __repr__(self):
        return f"RationalFunction(poly={self.poly}, poles={self.poles})"


class LaurentTail:
    """Declared Laurent data: one truncated series per marked point, in the
    local coordinate of that point (zeta - p, or w = 1/zeta at INFINITY)."""

    def __init__(self, tails: dict):
        self.tails = dict(tails)
        for p, s in self.tails.items():
            if not isinstance(s, TruncSeries):
                raise TypeError(f"tail at {p} must be a TruncSeries")

    def items(self):
        return self.tails.items()

    def __getitem__(self, p):
        return self.tails[p]


# ---------------------------------------------------------------------------
# strong residue theorem on P^1


class UnderdeterminedCap(Exception):
    """The declared windows are too short to certify the check."""


class _Witness:
    """A violated residue pairing lambda = zeta^m (zeta - z0)^n dzeta."""

    def __init__(self, kind, point, order, residue):
        self.kind = kind          # "pole" or "infinity"
        self.point = point
        self.order = order        # pole order m (kind=pole) or degree k
        self.residue = residue

    def product_exponents(self, z0=None):
        """(m, n) with lambda = zeta^m (zeta - z0)^n dzeta, when expressible."""
        if self.kind == "infinity":
            return (self.order, 0)
        if self.point == 0:
            return (-self.order, 0)
        if z0 is not None and self.point == Fraction(z0):
            return (0, -self.order)
        return None

    def __repr__(self):
        if self.kind == "infinity":
            return f"<lambda = zeta^{self.order} dzeta, residue sum {self.residue}>"
        return (f"<lambda = (zeta - {self.point})^(-{self.order}) dzeta, "
                f"residue sum {self.residue}>")


class ResidueReport:
    def __init__(self, passed, section, witness, conditions):
        self.passed = passed
        self.section = section      # RationalFunction on success
        self.witness = witness      # _Witness on failure
        self.conditions = conditions

    def __bool__(self):
        return self.passed


def _form_expansion(g: RationalFunction, p, order: int) -> TruncSeries:
    """Expansion of the 1-form g dzeta in the local coordinate at p; at
    infinity the Jacobian dzeta = -w^{-2} dw is included."""
    if p is INFINITY:
        s = g.expand_at_infinity(order + 2)
        return s.shift(-2).scale(Fraction(-1)).truncate(order)
    return g.expand_at(p, order)


def _tail_residue(tail: TruncSeries, lam: TruncSeries) -> Fraction:
    """Res of (tail * lam) at the point; lam is exact with finite pole,
    so the sum runs over tail exponents k < -lam.floor."""
    lam_pole = max(0, -lam.floor)
    if tail.order < lam_pole:
        raise UnderdeterminedCap(
            f"tail order {tail.order} < dual pole order {lam_pole}")
    total = F0
    for k in range(tail.floor, lam_pole):
        c = tail.coeff(k)
        if c:
            total += c * lam.coeff(-1 - k)
    return total


def _dual_form_family(points: SpherePoints, tails: dict):
    """Spanning 1-forms with poles only at the marked points, up to the
    pole orders the tail windows can certify."""
    fams = []
    for p in points.finite:
        for m in range(1, tails[p].order + 1):
            fams.append(("pole", p, m, RationalFunction(poles={p: {m: F1}})))
    if points.has_infinity:
        for k in range(0, tails[INFINITY].order - 1):
            fams.append(("infinity", INFINITY, k, RationalFunction(poly={k: F1})))
    return fams


def strong_residue_check(tails, points=None, divisor=None) -> ResidueReport:
    """Test the residue criterion for the declared tails; on pass,
    reconstruct the global meromorphic function by exact linear algebra
    and re-expand to confirm every tail.

    ``tails`` maps each marked point (rational or INFINITY) to a
    TruncSeries in its local coordinate; ``divisor`` optionally bounds the
    pole order of the reconstruction at each point (defaults to the pole
    orders visible in the tails).  The configuration must include INFINITY.
    """
    if isinstance(tails, LaurentTail):
        tails = dict(tails.items())
    if points is None:
        points = SpherePoints([p for p in tails if p is not INFINITY] +
                              ([INFINITY] if INFINITY in tails else []))
    if not points.has_infinity:
        raise ValueError("configurations must include the point at infinity")
    if {repr(p) for p in tails} != {repr(p) for p in points}:
        raise ValueError("tails and marked points disagree")
    if divisor is None:
        divisor = {}
    dcap = {p: divisor.get(p, max(0, -tails[p].floor)) for p in points}

    # residue conditions against the spanning dual forms
    conditions = 0
    for kind, p0, m, g in _dual_form_family(points, tails):
        total = F0
        for p in points:
            lam = _form_expansion(g, p, max(1, -tails[p].floor))
            total += _tail_residue(tails[p], lam)
        conditions += 1
        if total:
            return ResidueReport(False, None, _Witness(kind, p0, m, total), conditions)

    # reconstruction in the partial-fraction basis allowed by the divisor
    basis = []
    for p in points.finite:
        for m in range(1, dcap[p] + 1):
            basis.append(RationalFunction(poles={p: {m: F1}}))
    for k in range(0, dcap[INFINITY] + 1):
        basis.append(RationalFunction(poly={k: F1}))

    rows, rhs = [], []
    for p in points:
        t = tails[p]
        expans = [b.expand_at_point(p, t.order) for b in basis]
        lo = min(t.floor, -dcap[p])
        for e in range(lo, t.order):
            rows.append([s.coeff(e) if e < s.order else F0 for s in expans])
            rhs.append(t.coeff(e) if e >= t.floor else F0)
    if rows:
        res = solve_linear(rows, rhs)
        if not res.consistent:
            raise AssertionError("residue conditions passed but matching failed")
        if res.free:
            raise UnderdeterminedCap(
                f"{len(res.free)} free coefficients at the declared windows")
        coeffs = res.solution
    else:
        coeffs = [F0] * len(basis)
    section = RationalFunction()
    for c, b in zip(coeffs, basis):
        if c:
            section = section + b.scale(c)
    for p in points:  # re-expansion confirmation
        t = tails[p]
        s = section.expand_at_point(p, t.order)
        for e in range(min(t.floor, s.floor), t.order):
            have = s.coeff(e) if e >= s.floor else F0
            want = t.coeff(e) if e >= t.floor else F0
            if have != want:
                raise AssertionError("reconstructed section fails re-expansion")
    return ResidueReport(True, section, None, conditions)


def rational_glue(exp0: TruncSeries, exp_z0: TruncSeries, exp_inf: TruncSeries,
                  z0, divisor=None) -> ResidueReport:
    """Glue expansions at 0, z0 and infinity into a global rational
    function, or report the violated pairing zeta^m (zeta - z0)^n dzeta
    (read it off the witness with ``product_exponents(z0)``)."""
    z0 = Fraction(z0)
    if z0 == 0:
        raise ValueError("z0 must be nonzero")
    tails = {F0: exp0, z0: exp_z0, INFINITY: exp_inf}
    points = SpherePoints([F0, z0, INFINITY])
    return strong_residue_check(tails, points, divisor)


def residue_pairing(sigma: dict, t: RationalFunction) -> Fraction:
    """Sum over marked points of Res <sigma_p, t>: each sigma_p is the tail
    of 1-form-valued data in the local coordinate at p (already including
    the coordinate Jacobian at infinity); t is a global RationalFunction."""
    total = F0
    for p, s in sigma.items():
        tpole = t.pole_order_at(p)
        if s.order < tpole:
            raise UnderdeterminedCap("sigma window too short for t's pole at "
                                     f"{p}")
        texp = t.expand_at_point(p, max(1, 1 - s.floor))
        for k in range(s.floor, tpole):
            c = s.coeff(k)
            if c:
                e = -1 - k
                total += c * (texp.coeff(e) if e < texp.order else F0)
    return total


def global_form_tails(g: RationalFunction, points: SpherePoints, order: int) -> dict:
    """Tails of the global 1-form g dzeta at the marked points (a coboundary:
    its residue pairing with any global function vanishes)."""
    return {p: _form_expansion(g, p, order) for p in points}


# ---------------------------------------------------------------------------
# block functionals


class BlockFunctional:
    """Linear functional on a tensor of capped module vectors attached to
    marked points; ``caps[i]`` bounds the weights slot i can pair."""

    def __init__(self, points: SpherePoints, modules, caps, evaluate, name=""):
        if len(modules) != len(points) or len(caps) != len(points):
            raise ValueError("one module and one cap per marked point")
        self.points = points
        self.modules = list(modules)
        self.caps = list(caps)
        self.evaluate = evaluate
        self.name = name

    def __call__(self, *w_vecs) -> Fraction:
        if len(w_vecs) != len(self.modules):
            raise ValueError("wrong number of insertions")
        return self.evaluate(*w_vecs)

    def __repr__(self):
        return f"BlockFunctional({self.name or 'anonymous'}, {self.points})"


class IntertwinerError(Exception):
    """T failed the mode-commutation test; carries a witness."""

    def __init__(self, v, n, label, diff):
        super().__init__(f"T fails to intertwine mode (v={v}, n={n}) on {label}")
        self.witness = {"v": v, "n": n, "label": label, "difference": diff}


def _generator_checks(voa):
    """Vectors whose modes generate all module modes."""
    return [(1,)] if voa.gen_weight == 1 else [(2,)]


def hom_block(T: dict, w1: Module, w2: Module, cap: int) -> BlockFunctional:
    """phi_T(u (x) v) = <T u, v> on (P^1; 0, infinity) for T: W1 -> W2'
    given by its columns (label of W1 -> dual vector over W2 labels).

    T must commute with all modes; this is verified on the generating
    field's modes within the cap, and failures raise IntertwinerError."""
    voa = w1.voa
    w2d = contragredient(w2)

    def apply_T(u: dict) -> dict:
        out: dict = {}
        for label, c in u.items():
            col = T.get(label)
            if col:
                vec_add_into(out, col, c)
        return out

    for v in _generator_checks(voa):
        wt_v = weight_of(v)
        for wt in range(cap + 1):
            for label in w1.basis_at(wt):
                for n in range(wt_v + wt - 1 - cap, wt_v + wt):
                    lhs = apply_T(w1.mode_apply(v, n, {label: F1}))
                    rhs = w2d.mode_apply(v, n, apply_T({label: F1}))
                    diff = vec_add_into(dict(lhs), rhs, Fraction(-1))
                    if not vec_is_zero(diff):
                        raise IntertwinerError(v, n, label, diff)

    def evaluate(u: dict, v: dict) -> Fraction:
        return _pair_dual(apply_T(u), v)

    points = SpherePoints([F0, INFINITY])
    return BlockFunctional(points, [w1, w2], [cap, cap], evaluate, name="hom")


def identity_hom(module: Module, cap: int) -> BlockFunctional:
    """phi(u (x) v) = canonical pairing on W (x) W', from T = identity
    (W2 is the contragredient, so T: W -> W2' = W'' is identity on labels)."""
    T = {label: {label: F1} for wt in range(cap + 1) for label in module.basis_at(wt)}
    return hom_block(T, module, contragredient(module), cap)


def _pair_dual(u: dict, up: dict) -> Fraction:
    """Dual-basis pairing by label matching."""
    return sum((c * up[label] for label, c in u.items() if label in up), F0)


def three_point_block(module: Module, v, z0, w: dict, wp: dict) -> Fraction:
    """<Y_W(v, z0) w, w'> as an exact finite sum; w' lives in W'."""
    z0 = Fraction(z0)
    if z0 == 0:
        raise ValueError("z0 must be off the marked points 0 and infinity")
    if isinstance(v, tuple):
        v = {v: F1}
    total = F0
    dual_weights = {weight_of(label) for label in wp}
    for vl, vc in v.items():
        for wl, wc in w.items():
            for d in dual_weights:
                n = weight_of(vl) + weight_of(wl) - 1 - d
                img = module.mode_apply({vl: F1}, n, {wl: F1})
                if img:
                    total += vc * wc * _pair_dual(img, wp) * z0 ** (-n - 1)
    return total


def vertex_block(module: Module, z0, cap: int) -> BlockFunctional:
    """The vertex-operator block phi(w (x) v (x) w') = <Y(v, z0) w, w'>
    on (P^1; 0, z0, infinity) with modules (W, V, W')."""
    z0 = Fraction(z0)
    points = SpherePoints([F0, z0, INFINITY])
    modules = [module, module.voa, contragredient(module)]

    def evaluate(w, v, wp):
        return three_point_block(module, v, z0, w, wp)

    return BlockFunctional(points, modules, [cap, cap, cap], evaluate, name="vertex")


def gamma_twist(v, module) -> list:
    """U(gamma_{1/w}) v = e^{w^{-1} L_1} (-w^2)^{Ltilde0} v on the VOA,
    as a list of (w-exponent, vector) pairs: a Laurent polynomial in w
    with VOA-vector coefficients."""
    if isinstance(v, tuple):
        v = {v: F1}
    voa = module.voa
    # (-w^2)^{Ltilde0}: the weight-k component picks up (-1)^k w^{2k}
    by_exp: dict[int, dict] = {}
    for label, c in v.items():
        k = weight_of(label)
        vec_add_into(by_exp.setdefault(2 * k, {}), {label: c * (-1) ** k})
    out: dict[int, dict] = {e: dict(vec) for e, vec in by_exp.items()}
    term = by_exp
    m = 0
    fact = 1
    while term:
        m += 1
        fact *= m
        nxt: dict[int, dict] = {}
        for e, vec in term.items():
            img = voa.mode_apply(voa.conformal_vector, 2, vec)  # L_1
            img = {l: c for l, c in img.items() if c}
            if img:
                vec_add_into(nxt.setdefault(e - 1, {}), img)
        term = {e: vec for e, vec in nxt.items() if not vec_is_zero(vec)}
        for e, vec in term.items():
            vec_add_into(out.setdefault(e, {}), vec, Fraction(1, fact))
    return sorted((e, vec) for e, vec in
                  ((e, {l: c for l, c in vec.items() if c}) for e, vec in out.items())
                  if vec)


def _mode_window(cap: int, wt_v: int, wt_w: int):
    """Modes n with Y(v)_n w of weight in [0, cap]: an inclusive range."""
    return (wt_v + wt_w - 1 - cap, wt_v + wt_w - 1)


def _slot_tail_finite(phi: BlockFunctional, i: int, v: dict, w_vecs) -> TruncSeries:
    """Tail of the propagated section at the finite marked point i: the
    coefficient of t^{-n-1} is phi(..., Y(v)_n w_i, ...), certified for
    the modes the slot cap can see."""
    module = phi.modules[i]
    cap = phi.caps[i]
    w_i = w_vecs[i]
    cmap: dict = {}
    order = None
    for vl, vc in v.items():
        wt_v = weight_of(vl)
        for wl, wc in w_i.items():
            n_min, n_max = _mode_window(cap, wt_v, weight_of(wl))
            for n in range(n_min, n_max + 1):
                img = module.mode_apply({vl: F1}, n, {wl: F1})
                if img:
                    args = list(w_vecs)
                    args[i] = img
                    val = phi(*args)
                    if val:
                        cmap[-n - 1] = cmap.get(-n - 1, F0) + vc * wc * val
            top = -n_min  # exponents < top are fully certified
            order = top if order is None else min(order, top)
    if order is None:
        order = cap + 1
    cmap = {e: c for e, c in cmap.items() if c and e < order}
    return TruncSeries.from_coeff_map("t", cmap, order)


def _slot_tail_infinity(phi: BlockFunctional, v: dict, w_vecs) -> TruncSeries:
    """Tail at infinity: insert Y_{M}(U(gamma_{1/w}) v, w) into the last
    slot, collecting the w-Laurent bookkeeping from the twist."""
    i = len(phi.modules) - 1
    module = phi.modules[i]
    cap = phi.caps[i]
    w_i = w_vecs[i]
    cmap: dict = {}
    order = None
    for shift, vec in gamma_twist(v, phi.modules[0]):
        for vl, vc in vec.items():
            wt_v = weight_of(vl)
            for wl, wc in w_i.items():
                n_min, n_max = _mode_window(cap, wt_v, weight_of(wl))
                for n in range(n_min, n_max + 1):
                    img = module.mode_apply({vl: F1}, n, {wl: F1})
                    if img:
                        args = list(w_vecs)
                        args[i] = img
                        val = phi(*args)
                        if val:
                            e = shift - n - 1
                            cmap[e] = cmap.get(e, F0) + vc * wc * val
                top = shift - n_min
                order = top if order is None else min(order, top)
    if order is None:
        order = cap + 1
    cmap = {e: c for e, c in cmap.items() if c and e < order}
    return TruncSeries.from_coeff_map("w", cmap, order)


def _propagated_section(phi: BlockFunctional, v: dict, w_vecs) -> RationalFunction:
    if not phi.points.has_infinity:
        raise ValueError("block configurations must include infinity")
    tails = {}
    for i, p in enumerate(phi.points):
        if p is INFINITY:
            tails[INFINITY] = _slot_tail_infinity(phi, v, w_vecs)
        else:
            tails[p] = _slot_tail_finite(phi, i, v, w_vecs)
    report = strong_residue_check(tails, phi.points)
    if not report.passed:
        raise AssertionError(
            f"propagated tails failed to glue; witness {report.witness}")
    return report.section


def propagate_eval(phi: BlockFunctional, v, y, w_vecs) -> Fraction:
    """Value of the propagated block (one extra V-insertion at y) in the
    standard global trivialization; exact.  For the vacuum insertion this
    returns phi(w_vecs) at every y off the marked points."""
    y = Fraction(y)
    if any(p is not INFINITY and p == y for p in phi.points):
        raise ValueError("y must avoid the marked points")
    if isinstance(v, tuple):
        v = {v: F1}
    vac = v.get((), F0)
    rest = {l: c for l, c in v.items() if l != () and c}
    total = vac * phi(*w_vecs) if vac else F0
    if rest:
        total += _propagated_section(phi, rest, w_vecs).eval(y)
    return total


def propagate_block(phi: BlockFunctional, y, cap: int) -> BlockFunctional:
    """The propagated block as a functional with one extra V-slot at y
    (inserted after the finite marked points, before INFINITY)."""
    y = Fraction(y)
    voa = phi.modules[0].voa
    finite_count = len(phi.points.finite)
    pts = SpherePoints(phi.points.finite + [y] +
                       ([INFINITY] if phi.points.has_infinity else []))
    n_args = len(phi.points) + 1

    def evaluate(*args):
        if len(args) != n_args:
            raise ValueError("wrong arity")
        w_vecs = list(args[:finite_count]) + list(args[finite_count + 1:])
        return propagate_eval(phi, args[finite_count], y, w_vecs)

    modules = phi.modules[:finite_count] + [voa] + phi.modules[finite_count:]
    # the inherited slots lose cap headroom: evaluating them goes through a
    # nested propagation whose windows shrink by the new insertion's weight
    old = [max(0, c - cap) for c in phi.caps]
    caps = old[:finite_count] + [cap] + old[finite_count:]
    return BlockFunctional(pts, modules, caps, evaluate,
                           name=f"{phi.name or 'block'}~propagated@{y}")


def _residue_action(module, v_terms, lam: TruncSeries, w_i: dict, cap: int) -> dict:
    """Res of Y(., t) w_i against the form tail lam, for v given as
    (t-exponent shift, vector) terms.  Raises when a nonzero component
    escapes the cap (the action is then not computable at this window)."""
    acted: dict = {}
    for shift, vec in v_terms:
        for vl, vc in vec.items():
            wt_v = weight_of(vl)
            for wl, wc in w_i.items():
                n_top = wt_v + weight_of(wl) - 1  # modes below weight 0 vanish
                for k in range(lam.floor, min(n_top - shift, lam.order - 1) + 1):
                    c = lam.coeff(k)
                    if not c:
                        continue
                    img = module.mode_apply({vl: F1}, k + shift, {wl: F1})
                    if img:
                        vec_add_into(acted, img, c * vc * wc)
                if n_top - shift >= lam.order:
                    raise UnderdeterminedCap("form window too short for the "
                                             "residue action")
    over = {l: c for l, c in acted.items() if c and weight_of(l) > cap}
    if over:
        raise UnderdeterminedCap("residue action left the capped window")
    return {l: c for l, c in acted.items() if c}


def block_property_check(phi: BlockFunctional, v, g: RationalFunction, w_vecs) -> bool:
    """The defining invariance of conformal blocks: the residue action of
    the global V-valued 1-form (v g dzeta) on the insertions sums to a
    vector that phi kills.  Exact; raises when the caps cannot certify."""
    if {repr(p) for p in g.poles} - {repr(p) for p in phi.points.finite}:
        raise ValueError("form has poles off the marked points")
    if isinstance(v, tuple):
        v = {v: F1}
    wt_v = vec_max_weight(v)
    total = F0
    for i, p in enumerate(phi.points):
        module = phi.modules[i]
        w_i = w_vecs[i]
        wmax = vec_max_weight(w_i)
        if p is INFINITY:
            terms = gamma_twist(v, phi.modules[0])
            span = max((abs(e) for e, _ in terms), default=0)
            lam = _form_expansion(g, INFINITY, 2 * wt_v + wmax + span + 3)
        else:
            terms = [(0, v)]
            lam = _form_expansion(g, p, wt_v + wmax + 1)
        acted = _residue_action(module, terms, lam, w_i, phi.caps[i])
        if acted:
            args = list(w_vecs)
            args[i] = acted
            total += phi(*args)
    return total == 0
