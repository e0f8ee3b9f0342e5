"""Concrete CFT-type vertex operator algebras with computable modes.

Two models:

* rank-1 Heisenberg (free boson) at c = 1, with Fock modules F_mu whose
  basis is indexed by partitions ``alpha_{-n1} ... alpha_{-nk} |mu>``;
  bracket ``[alpha_m, alpha_n] = m delta_{m,-n}``, conformal vector
  ``(1/2) alpha_{-1}^2 1``, conformal weight Delta = mu^2/2;

* the universal Virasoro VOA at rational central charge c, with basis
  ``L_{-n1} ... L_{-nk} 1`` for partitions into parts >= 2.

Mode operators Y_W(v)_h are computed recursively: every basis vector of V
peels as v = Y(g)_j u for the generating field g (alpha resp. the conformal
vector), and the m = 0 case of the Jacobi identity rewrites Y_W(v)_h as a
finite sum of products of generator modes with modes of the shorter word u:

    Y_W(Y(g)_j u)_h = sum_l (-1)^l C(j,l) g_{j-l} u_{h+l}
                    - sum_l (-1)^{l+j} C(j,l) u_{j+h-l} g_l

Both sums terminate on any vector because modes kill everything below
weight 0.  Generator modes act directly: alpha_k by exact bracket algebra on
partition labels, L_k by PBW straightening through the Virasoro bracket.

Contragredient modules are realized on the same labels with the twisted
action Y_{W'}(v)_n = sum_m ((-1)^{wt v} / m!) Y_W(L_1^m v)^t at mode index
-n - m - 2 + 2 wt(v).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .graded import (
    GradedSpace,
    vec_add_into,
    vec_is_zero,
    vec_max_weight,
    weight_of,
)
from .virasoro import CentralCharge, gbinom, vir_bracket

__all__ = [
    "partitions",
    "CapError",
    "Module",
    "VOAModel",
    "HeisenbergVOA",
    "FockModule",
    "VirasoroVOA",
    "DualModule",
    "heisenberg_model",
    "fock_module",
    "virasoro_model",
    "contragredient",
    "ModeOperator",
    "mode_matrix",
    "contragredient_mode",
    "JacobiReport",
    "jacobi_check",
]

F0 = Fraction(0)
F1 = Fraction(1)


@lru_cache(maxsize=None)
def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> tuple:
    """All partitions of n with parts in [min_part, max_part], as
    non-increasing tuples in descending lexicographic order."""
    if n == 0:
        return ((),)
    if n < min_part:
        return ()
    if max_part is None or max_part > n:
        max_part = n
    out = []
    for first in range(max_part, min_part - 1, -1):
        for rest in partitions(n - first, min_part, first):
            out.append((first,) + rest)
    return tuple(out)


class CapError(Exception):
    """A computed vector needs weights above the requested cap."""


class Module:
    """Common machinery for graded modules with a single generating field.

    Subclasses provide ``basis_at`` and ``gen_apply``; everything else
    (generic modes, L_n action, spaces) is shared.  Vectors are
    label -> coefficient dicts.
    """

    voa: "VOAModel"
    delta: Fraction
    name: str

    def __init__(self):
        self._mode_cache: dict = {}

    # -- subclass interface --------------------------------------------

    def basis_at(self, n: int) -> tuple:
        raise NotImplementedError

    def gen_apply(self, k: int, label: tuple) -> dict:
        """Action of the generator mode Y_W(g)_k on a basis label."""
        raise NotImplementedError

    # -- shared ---------------------------------------------------------

    def space(self, cap: int, dual: bool = False) -> GradedSpace:
        name = self.name + ("'" if dual else "")
        return GradedSpace(name, {n: list(self.basis_at(n)) for n in range(cap + 1)},
                           delta=self.delta, dual=dual)

    def gen_apply_vec(self, k: int, v: dict) -> dict:
        out: dict = {}
        for label, c in v.items():
            vec_add_into(out, self.gen_apply(k, label), c)
        return out

    def mode_apply(self, v, h: int, w: dict) -> dict:
        """Y_W(v)_h w for v a VOA label or label->coefficient dict."""
        if isinstance(v, tuple):
            v = {v: F1}
        out: dict = {}
        for vl, vc in v.items():
            for wl, wc in w.items():
                t = self._mode_basis(vl, h, wl)
                if t:
                    vec_add_into(out, t, vc * wc)
        return out

    def _mode_basis(self, vl: tuple, h: int, wl: tuple) -> dict:
        key = (vl, h, wl)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        if not vl:
            res = {wl: F1} if h == -1 else {}
        else:
            j, rest = self.voa.peel(vl)
            res = {}
            # first sum: g_{j-l} u_{h+l}, dies once u_{h+l} hits weight < 0
            lmax1 = weight_of(rest) + weight_of(wl) - h - 1
            for l in range(0, lmax1 + 1):
                b = gbinom(j, l)
                if b == 0:
                    continue
                t = self._mode_basis(rest, h + l, wl)
                if not t:
                    continue
                coef = Fraction(-b if l % 2 else b)
                for tl, tc in t.items():
                    vec_add_into(res, self.gen_apply(j - l, tl), coef * tc)
            # second sum: u_{j+h-l} g_l, dies once g_l hits weight < 0
            lmax2 = self.voa.gen_weight + weight_of(wl) - 1
            for l in range(0, lmax2 + 1):
                b = gbinom(j, l)
                if b == 0:
                    continue
                coef = Fraction(b if (l + j) % 2 else -b)
                g = self.gen_apply(l, wl)
                for gl, gc in g.items():
                    t = self._mode_basis(rest, j + h - l, gl)
                    if t:
                        vec_add_into(res, t, coef * gc)
        self._mode_cache[key] = res
        return res

    def L_apply(self, n: int, w: dict) -> dict:
        """L_n = Y_W(conformal vector)_{n+1}."""
        return self.mode_apply(self.voa.conformal_vector, n + 1, w)


class VOAModel(Module):
    """A VOA is in particular a module over itself (the vacuum module)."""

    c: Fraction
    gen_weight: int
    conformal_vector: dict
    vacuum: tuple = ()

    def peel(self, label: tuple) -> tuple[int, tuple]:
        """Split a basis label as v = Y(g)_j u; returns (j, label of u)."""
        raise NotImplementedError

    def central_charge(self) -> CentralCharge:
        return CentralCharge(self.c)


class HeisenbergVOA(VOAModel):
    """Rank-1 free boson: basis alpha_{-n1}...alpha_{-nk} 1, c = 1."""

    def __init__(self):
        super().__init__()
        self.voa = self
        self.name = "heisenberg"
        self.c = F1
        self.delta = F0
        self.mu = F0
        self.gen_weight = 1
        self.conformal_vector = {(1, 1): Fraction(1, 2)}

    def basis_at(self, n: int) -> tuple:
        return partitions(n)

    def peel(self, label: tuple) -> tuple[int, tuple]:
        return -label[0], label[1:]

    def gen_apply(self, k: int, label: tuple) -> dict:
        # alpha_k on a partition word over the highest-weight vector
        if k < 0:
            return {tuple(sorted(label + (-k,), reverse=True)): F1}
        if k == 0:
            return {label: self.mu} if self.mu else {}
        cnt = label.count(k)
        if not cnt:
            return {}
        shorter = list(label)
        shorter.remove(k)
        return {tuple(shorter): Fraction(k * cnt)}


class FockModule(HeisenbergVOA):
    """Fock module F_mu: same partition basis, alpha_0 acts by mu,
    conformal weight Delta = mu^2/2."""

    def __init__(self, voa: HeisenbergVOA, mu):
        super().__init__()
        self.voa = voa
        self.mu = Fraction(mu)
        self.delta = self.mu ** 2 / 2
        self.name = f"fock({self.mu})"


class VirasoroVOA(VOAModel):
    """Universal Virasoro VOA: basis L_{-n1}...L_{-nk} 1 with parts >= 2,
    quotiented only by L_{-1} 1 = 0."""

    def __init__(self, c):
        super().__init__()
        self.voa = self
        self.c = Fraction(c)
        self.delta = F0
        self.name = f"virasoro(c={self.c})"
        self.gen_weight = 2
        self.conformal_vector = {(2,): F1}
        self._L_cache: dict = {}

    def basis_at(self, n: int) -> tuple:
        return partitions(n, min_part=2)

    def peel(self, label: tuple) -> tuple[int, tuple]:
        # L_{-n} = Y(conformal vector)_{-n+1}
        return -label[0] + 1, label[1:]

    def gen_apply(self, k: int, label: tuple) -> dict:
        return self._L(k - 1, label)

    def _L(self, n: int, label: tuple) -> dict:
        """L_n on a PBW word, straightened through the Virasoro bracket."""
        key = (n, label)
        hit = self._L_cache.get(key)
        if hit is not None:
            return hit
        if not label:
            res = {(-n,): F1} if n <= -2 else {}
        elif n <= -label[0]:
            res = {(-n,) + label: F1}
        else:
            lam = label[0]
            rest = label[1:]
            res: dict = {}
            # L_n L_{-lam} = L_{-lam} L_n + (n+lam) L_{n-lam} + central
            for l2, c2 in self._L(n, rest).items():
                vec_add_into(res, self._L(-lam, l2), c2)
            inner = self._L(n - lam, rest)
            if inner:
                vec_add_into(res, inner, Fraction(n + lam))
            if n == lam:
                _, central = vir_bracket(n, -lam, self.c)
                if central:
                    vec_add_into(res, {rest: F1}, central)
        self._L_cache[key] = res
        return res

    def L_apply(self, n: int, w: dict) -> dict:
        out: dict = {}
        for label, c in w.items():
            vec_add_into(out, self._L(n, label), c)
        return out


class DualModule(Module):
    """Contragredient module on the same labels, modes via the finite
    L_1-twisted transpose sum."""

    def __init__(self, base: Module):
        super().__init__()
        self.base = base
        self.voa = base.voa
        self.delta = base.delta
        self.name = base.name + "'"

    def basis_at(self, n: int) -> tuple:
        return self.base.basis_at(n)

    def mode_apply(self, v, h: int, w: dict) -> dict:
        if isinstance(v, tuple):
            v = {v: F1}
        out: dict = {}
        for vl, vc in v.items():
            for wl, wc in w.items():
                t = self._dual_mode_basis(vl, h, wl)
                if t:
                    vec_add_into(out, t, vc * wc)
        return out

    def _dual_mode_basis(self, vl: tuple, h: int, wl: tuple) -> dict:
        key = (vl, h, wl)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        wtv = weight_of(vl)
        sign = Fraction(-1 if wtv % 2 else 1)
        res: dict = {}
        lv: dict = {vl: F1}
        m = 0
        fact = 1
        while lv:
            k = -h - m - 2 + 2 * wtv
            vec_add_into(res, self._transpose_apply(lv, k, wl), sign / fact)
            m += 1
            fact *= m
            lv = self.voa.mode_apply(self.voa.conformal_vector, 2, lv)  # L_1
            lv = {l: c for l, c in lv.items() if c}
        self._mode_cache[key] = res
        return res

    def _transpose_apply(self, u_vec: dict, k: int, wl: tuple) -> dict:
        """Y_W(u)^t_k on the dual basis vector labeled wl."""
        d = weight_of(wl)
        out: dict = {}
        for ul, uc in u_vec.items():
            src = d - (weight_of(ul) - k - 1)
            if src < 0:
                continue
            for wl2 in self.base.basis_at(src):
                img = self.base.mode_apply({ul: F1}, k, {wl2: F1})
                cc = img.get(wl)
                if cc:
                    vec_add_into(out, {wl2: F1}, uc * cc)
        return out

    def gen_apply(self, k: int, label: tuple) -> dict:  # pragma: no cover
        raise NotImplementedError("dual modules act through mode_apply only")


# ---------------------------------------------------------------------------
# public constructors


def heisenberg_model() -> HeisenbergVOA:
    return HeisenbergVOA()


def fock_module(voa: HeisenbergVOA, mu) -> FockModule:
    return FockModule(voa, mu)


def virasoro_model(c) -> VirasoroVOA:
    return VirasoroVOA(c)


def contragredient(module: Module) -> DualModule:
    return DualModule(module)


# ---------------------------------------------------------------------------
# mode matrices


class ModeOperator:
    """Matrix of Y_W(v)_n between capped weight windows, by basis columns."""

    def __init__(self, module: Module, v, n: int, cap: int, columns: dict):
        self.module = module
        self.v = v
        self.n = n
        self.cap = cap
        self.columns = columns  # src label -> image dict

    def apply(self, w: dict) -> dict:
        out: dict = {}
        for label, c in w.items():
            vec_add_into(out, self.columns.get(label, {}), c)
        return out

    def entries(self):
        for src, img in self.columns.items():
            for dst, c in img.items():
                yield (dst, src, c)


def mode_matrix(module: Module, v, n: int, cap: int) -> ModeOperator:
    """Materialize Y_W(v)_n on all basis labels of weight <= cap.

    Raises CapError when a nonzero image component lands above the cap
    (never silently truncates).
    """
    columns = {}
    for wt in range(cap + 1):
        for wl in module.basis_at(wt):
            img = module.mode_apply(v, n, {wl: F1})
            over = vec_max_weight(img)
            if over > cap and not vec_is_zero({l: c for l, c in img.items() if weight_of(l) > cap}):
                raise CapError(
                    f"mode image needs weight {over} > cap {cap} (source {wl}, mode {n})")
            columns[wl] = img
    return ModeOperator(module, v, n, cap, columns)


def contragredient_mode(module: Module, v, n: int, cap: int) -> ModeOperator:
    """Matrix of Y_{W'}(v)_n on the dual space to the same cap."""
    return mode_matrix(contragredient(module), v, n, cap)


# ---------------------------------------------------------------------------
# Jacobi identity checker


class JacobiReport:
    def __init__(self, passed: bool, l_ranges: dict, witness: dict | None):
        self.passed = passed
        self.l_ranges = l_ranges
        self.witness = witness

    def __bool__(self):
        return self.passed

    def __repr__(self):
        status = "pass" if self.passed else f"FAIL witness={self.witness}"
        return f"JacobiReport({status}, l_ranges={self.l_ranges})"


def jacobi_check(module: Module, u, v, w: dict, m: int, n: int, h: int) -> JacobiReport:
    """Exact check of the mode Jacobi identity applied to w:

    sum_l C(m,l) Y(Y(u)_{n+l} v)_{m+h-l}
      = sum_l (-1)^l C(n,l) Y(u)_{m+n-l} Y(v)_{h+l}
      - sum_l (-1)^{l+n} C(n,l) Y(v)_{n+h-l} Y(u)_{m+l}

    All three sums are finite by lower truncation; the report records the
    l-ranges actually summed.
    """
    voa = module.voa
    if isinstance(u, tuple):
        u = {u: F1}
    if isinstance(v, tuple):
        v = {v: F1}
    wt_u = vec_max_weight(u)
    wt_v = vec_max_weight(v)
    wt_w = vec_max_weight(w)

    lhs: dict = {}
    lmax_L = wt_u + wt_v - 1 - n  # Y(u)_{n+l} v = 0 beyond
    for l in range(0, max(lmax_L, -1) + 1):
        b = gbinom(m, l)
        if b == 0:
            continue
        inner = voa.mode_apply(u, n + l, v)
        if inner:
            vec_add_into(lhs, module.mode_apply(inner, m + h - l, w), Fraction(b))

    rhs: dict = {}
    lmax_1 = wt_v + wt_w - 1 - h  # Y(v)_{h+l} w = 0 beyond
    for l in range(0, max(lmax_1, -1) + 1):
        b = gbinom(n, l)
        if b == 0:
            continue
        t = module.mode_apply(v, h + l, w)
        if t:
            coef = Fraction(-b if l % 2 else b)
            vec_add_into(rhs, module.mode_apply(u, m + n - l, t), coef)
    lmax_2 = wt_u + wt_w - 1 - m  # Y(u)_{m+l} w = 0 beyond
    for l in range(0, max(lmax_2, -1) + 1):
        b = gbinom(n, l)
        if b == 0:
            continue
        t = module.mode_apply(u, m + l, w)
        if t:
            coef = Fraction(b if (l + n) % 2 else -b)
            vec_add_into(rhs, module.mode_apply(v, n + h - l, t), coef)

    diff = vec_add_into(dict(lhs), rhs, Fraction(-1))
    passed = vec_is_zero(diff)
    ranges = {"lhs": (0, max(lmax_L, -1)), "rhs_uv": (0, max(lmax_1, -1)),
              "rhs_vu": (0, max(lmax_2, -1))}
    return JacobiReport(passed, ranges, None if passed else diff)
