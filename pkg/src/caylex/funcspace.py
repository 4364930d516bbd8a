"""Formal-sum calculus on a group: translations, difference operators,
L^p and Dirichlet norms, the Laplacian, harmonicity tests, the duality
pairing, cocycle extension, truncation and pointwise powers.

Two carriers are supported.  FormalSum is a sparse, finitely supported
function on the whole group.  BallFunction is a dense vector over a
CayleyBall's vertex indices with an explicit exterior convention:
'zero' extends the function by 0 outside the ball (so norms match the
globally extended function), 'ball' restricts sums to in-ball edges and
counts skipped ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from .cayley import EXTERIOR, CayleyBall
from .groups import Element, GroupModel

P_MIN, P_MAX = 1.0, 16.0


def _check_p(p: float) -> float:
    p = float(p)
    if not (P_MIN <= p <= P_MAX):
        raise ValueError(f"p must lie in [{P_MIN}, {P_MAX}], got {p}")
    return p


def conjugate_index(p: float) -> float:
    """q with 1/p + 1/q = 1; returns inf for p = 1 (display only)."""
    return math.inf if p == 1.0 else p / (p - 1.0)


class FormalSum:
    """Finitely supported scalar function on G, stored sparsely.
    Zero coefficients are pruned on construction."""

    __slots__ = ("group", "data")

    def __init__(self, group: GroupModel, data: Optional[Dict[Element, complex]] = None,
                 prune_eps: float = 0.0):
        self.group = group
        if data is None:
            data = {}
        if prune_eps > 0.0:
            self.data = {x: v for x, v in data.items() if abs(v) > prune_eps}
        else:
            self.data = {x: v for x, v in data.items() if v != 0}

    @classmethod
    def delta(cls, group: GroupModel, x: Optional[Element] = None) -> "FormalSum":
        if x is None:
            x = group.identity()
        return cls(group, {x: 1.0})

    @classmethod
    def indicator(cls, group: GroupModel, elems: Iterable[Element]) -> "FormalSum":
        return cls(group, {x: 1.0 for x in elems})

    def __call__(self, x: Element):
        return self.data.get(x, 0.0)

    def support(self):
        return self.data.keys()

    def is_real(self) -> bool:
        return all(not isinstance(v, complex) or v.imag == 0 for v in self.data.values())

    def is_nonnegative(self) -> bool:
        return all((not isinstance(v, complex) or v.imag == 0)
                   and complex(v).real >= 0 for v in self.data.values())

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = dict(self.data)
        for x, v in other.data.items():
            out[x] = out.get(x, 0.0) + v
        return FormalSum(self.group, out)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        out = dict(self.data)
        for x, v in other.data.items():
            out[x] = out.get(x, 0.0) - v
        return FormalSum(self.group, out)

    def __mul__(self, c) -> "FormalSum":
        return FormalSum(self.group, {x: c * v for x, v in self.data.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "FormalSum":
        return self * (-1.0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FormalSum) and self.group is other.group
                and self.data == other.data)

    def __repr__(self):
        n = len(self.data)
        return f"<FormalSum on {self.group.name}, support {n}>"

    def to_json_obj(self) -> list:
        fmt = self.group.format_element
        return [{"element": fmt(x), "re": complex(v).real, "im": complex(v).imag}
                for x, v in sorted(self.data.items(), key=lambda kv: fmt(kv[0]))]

    @classmethod
    def from_json_obj(cls, group: GroupModel, obj: list) -> "FormalSum":
        data = {}
        for rec in obj:
            v = rec["re"] + 1j * rec.get("im", 0.0)
            if v.imag == 0:
                v = v.real
            data[group.parse_element(rec["element"])] = v
        return cls(group, data)


class BallFunction:
    """Dense scalar function over a ball's vertex indices."""

    __slots__ = ("ball", "values", "convention", "diagnostics")

    def __init__(self, ball: CayleyBall, values, convention: str = "zero",
                 diagnostics: Optional[dict] = None):
        if convention not in ("zero", "ball"):
            raise ValueError(f"unknown exterior convention {convention!r}")
        values = np.asarray(values)
        if values.shape != (ball.n_vertices,):
            raise ValueError("values length must equal ball vertex count")
        self.ball = ball
        self.values = values
        self.convention = convention
        self.diagnostics = diagnostics if diagnostics is not None else {}

    @classmethod
    def zeros(cls, ball: CayleyBall, convention: str = "zero") -> "BallFunction":
        return cls(ball, np.zeros(ball.n_vertices), convention)

    @classmethod
    def from_formal_sum(cls, ball: CayleyBall, alpha: FormalSum,
                        convention: str = "zero") -> "BallFunction":
        vals = np.zeros(ball.n_vertices,
                        dtype=complex if not alpha.is_real() else float)
        for x, v in alpha.data.items():
            i = ball.index.get(x)
            if i is not None:
                vals[i] = v
        return cls(ball, vals, convention)

    def to_formal_sum(self) -> FormalSum:
        elems = self.ball.elements
        return FormalSum(self.ball.group,
                         {elems[i]: v for i, v in enumerate(self.values.tolist()) if v != 0})

    def copy_with(self, values) -> "BallFunction":
        return BallFunction(self.ball, values, self.convention)

    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or bool(np.all(self.values.imag == 0))

    def is_nonnegative(self) -> bool:
        return self.is_real() and bool(np.all(np.real(self.values) >= 0))

    def __repr__(self):
        return f"<BallFunction on {self.ball!r}, convention={self.convention}>"


Carrier = Union[FormalSum, BallFunction]


@dataclass
class NormReport:
    p: float
    q: float
    lp: float               # ||.||_p
    dp_seminorm: float      # ||.||_D(p)
    dp_norm: float          # ||.||_D^p(G)
    at_identity: float      # |alpha(e)|


# ---------------------------------------------------------------------------
# translations and difference operators

def translate(alpha: FormalSum, g: Element) -> FormalSum:
    """Right translation: result(x) = alpha(x g^-1)."""
    mul = alpha.group.multiply
    return FormalSum(alpha.group, {mul(x, g): v for x, v in alpha.data.items()})


def _gen_index(group: GroupModel, g: Element) -> int:
    try:
        return group.generators.index(g)
    except ValueError:
        raise ValueError(f"{g!r} is not a generator of {group.name}")


def convolve_diff(beta: Carrier, g: Element) -> Carrier:
    """beta * (g - 1): result(x) = beta(x g^-1) - beta(x), for g in S."""
    if isinstance(beta, FormalSum):
        _gen_index(beta.group, g)
        return translate(beta, g) - beta
    ball = beta.ball
    j = _gen_index(ball.group, g)
    nbr = ball.nbr[:, j]
    ext = nbr == EXTERIOR
    shifted = np.where(ext, 0.0, beta.values[np.clip(nbr, 0, None)])
    out = shifted - beta.values
    diag = {}
    if beta.convention == "ball":
        out = np.where(ext, 0.0, out)
        diag["skipped_edges"] = int(ext.sum())
    return BallFunction(ball, out, beta.convention, diag)


def laplacian(alpha: Carrier) -> Carrier:
    """(Lap alpha)(x) = sum_{g in S} (alpha(x g^-1) - alpha(x))."""
    if isinstance(alpha, FormalSum):
        out = FormalSum(alpha.group)
        for g in alpha.group.generators:
            out = out + convolve_diff(alpha, g)
        return out
    ball = alpha.ball
    nbr = ball.nbr
    ext = nbr == EXTERIOR
    vals = np.where(ext, 0.0, alpha.values[np.clip(nbr, 0, None)])
    out = vals.sum(axis=1) - (~ext if alpha.convention == "ball" else
                              np.ones_like(ext)).sum(axis=1) * alpha.values
    return BallFunction(ball, out, alpha.convention,
                        {"valid_mask": ~ext.any(axis=1)})


# ---------------------------------------------------------------------------
# norms

def _formal_diff_terms(alpha: FormalSum, g: Element) -> List[complex]:
    """Nonzero values of alpha*(g-1), without building a FormalSum."""
    mul = alpha.group.multiply
    ginv = alpha.group.inverse(g)
    data = alpha.data
    terms = []
    seen = set()
    for x in data:
        seen.add(x)
        d = data.get(mul(x, ginv), 0.0) - data[x]
        if d != 0:
            terms.append(d)
    for x in data:
        xg = mul(x, g)
        if xg not in seen:
            # alpha(xg) = 0 here, alpha(xg g^-1) = alpha(x)
            terms.append(data[x])
    return terms


def dirichlet_seminorm_pow(alpha: Carrier, p: float) -> float:
    """sum_{g in S} ||alpha*(g-1)||_p^p."""
    p = _check_p(p)
    if isinstance(alpha, FormalSum):
        total = 0.0
        for g in alpha.group.generators:
            total += sum(abs(d) ** p for d in _formal_diff_terms(alpha, g))
        return total
    ball = alpha.ball
    nbr = ball.nbr
    ext = nbr == EXTERIOR
    vals = np.where(ext, 0.0, alpha.values[np.clip(nbr, 0, None)])
    diffs = np.abs(vals - alpha.values[:, None]) ** p
    if alpha.convention == "ball":
        return float(np.where(ext, 0.0, diffs).sum())
    # implicit zero: in-ball directed pairs, plus the reverse-direction
    # terms of exterior-incident edges (|f| each, hence counted twice)
    inball = float(np.where(ext, 0.0, diffs).sum())
    boundary = float((ext * (np.abs(alpha.values) ** p)[:, None]).sum())
    return inball + 2.0 * boundary


def lp_norm(alpha: Carrier, p: float) -> float:
    p = _check_p(p)
    if isinstance(alpha, FormalSum):
        return sum(abs(v) ** p for v in alpha.data.values()) ** (1.0 / p)
    return float((np.abs(alpha.values) ** p).sum() ** (1.0 / p))


def value_at_identity(alpha: Carrier):
    if isinstance(alpha, FormalSum):
        return alpha(alpha.group.identity())
    return alpha.values[0]


def norms(alpha: Carrier, p: float) -> NormReport:
    """L^p norm, D(p) seminorm, D^p(G) norm and |alpha(e)|."""
    p = _check_p(p)
    semi_pow = dirichlet_seminorm_pow(alpha, p)
    ae = abs(value_at_identity(alpha))
    return NormReport(
        p=p,
        q=conjugate_index(p),
        lp=lp_norm(alpha, p),
        dp_seminorm=semi_pow ** (1.0 / p),
        dp_norm=(semi_pow + ae ** p) ** (1.0 / p),
        at_identity=ae,
    )


# ---------------------------------------------------------------------------
# harmonicity

@dataclass
class HarmonicityReport:
    harmonic: bool
    max_residual: float
    alternative_agrees: bool  # |S| a(x) = sum_g a(x g^-1) checked too


def is_harmonic(alpha: Carrier, domain, tol: float = 1e-10) -> HarmonicityReport:
    """max_{x in domain} |Lap alpha(x)| <= tol, cross-checked against the
    averaged form |S| a(x) = sum_g a(x g^-1)."""
    if isinstance(alpha, FormalSum):
        group = alpha.group
        mul, inv = group.multiply, group.inverse
        nS = len(group.generators)
        max_res = 0.0
        max_alt = 0.0
        for x in domain:
            ax = alpha(x)
            lap = sum(alpha(mul(x, inv(g))) - ax for g in group.generators)
            avg = sum(alpha(mul(x, inv(g))) for g in group.generators)
            max_res = max(max_res, abs(lap))
            max_alt = max(max_alt, abs(avg - nS * ax))
    else:
        ball = alpha.ball
        domain = np.asarray(list(domain), dtype=np.int64)
        nbr = ball.nbr[domain]
        if (nbr == EXTERIOR).any():
            raise ValueError("domain must have all S-neighbors inside the ball")
        vals = alpha.values[nbr]
        nS = nbr.shape[1]
        lap = vals.sum(axis=1) - nS * alpha.values[domain]
        alt = vals.sum(axis=1) - nS * alpha.values[domain]
        max_res = float(np.abs(lap).max()) if len(domain) else 0.0
        max_alt = float(np.abs(alt).max()) if len(domain) else 0.0
    agrees = abs(max_res - max_alt) <= 1e-12 * (1.0 + max_res)
    return HarmonicityReport(harmonic=max_res <= tol, max_residual=max_res,
                             alternative_agrees=agrees)


# ---------------------------------------------------------------------------
# pairing

def pairing(alpha: Carrier, beta: Carrier, p: float = 2.0) -> complex:
    """<alpha, beta> = sum_x sum_g (alpha*(g-1))(x) conj((beta*(g-1))(x)).

    Sesquilinear exactly as displayed; p (and q = p/(p-1)) matter only for
    reporting, the sum is unconditional for finitely supported input.
    """
    _check_p(p)
    if isinstance(alpha, FormalSum) and isinstance(beta, FormalSum):
        if alpha.group is not beta.group:
            raise ValueError("pairing requires functions on the same group")
        total = 0.0 + 0.0j
        for g in alpha.group.generators:
            da = convolve_diff(alpha, g)
            db = convolve_diff(beta, g)
            small, big = (da, db) if len(da.data) <= len(db.data) else (db, da)
            for x, v in small.data.items():
                w = big.data.get(x)
                if w is not None:
                    total += (v * np.conj(w)) if small is da else (w * np.conj(v))
        return complex(total)
    if isinstance(alpha, BallFunction) and isinstance(beta, BallFunction):
        if alpha.ball is not beta.ball:
            raise ValueError("pairing requires functions on the same ball")
        ball = alpha.ball
        nbr = ball.nbr
        ext = nbr == EXTERIOR
        fa = np.where(ext, 0.0, alpha.values[np.clip(nbr, 0, None)]) - alpha.values[:, None]
        fb = np.where(ext, 0.0, beta.values[np.clip(nbr, 0, None)]) - beta.values[:, None]
        if alpha.convention == "ball" or beta.convention == "ball":
            fa = np.where(ext, 0.0, fa)
            fb = np.where(ext, 0.0, fb)
            inball = complex((fa * np.conj(fb)).sum())
            return inball
        # exterior x with x g^-1 in the ball: diffs are (f(ball end) - 0)
        inball = complex((fa * np.conj(fb)).sum())
        boundary = complex((ext * (alpha.values[:, None] * np.conj(beta.values)[:, None])).sum())
        return inball + boundary
    raise TypeError("pairing needs two FormalSums or two BallFunctions")


def harmonicity_via_pairing(alpha: Carrier, domain, tol: float = 1e-10):
    """alpha is harmonic iff <delta_y, alpha> = 0 for all y; returns
    (harmonic, max |<delta_y, alpha>|) over the domain."""
    max_res = 0.0
    if isinstance(alpha, FormalSum):
        group = alpha.group
        for y in domain:
            val = pairing(FormalSum.delta(group, y), alpha)
            max_res = max(max_res, abs(val))
    else:
        ball = alpha.ball
        for i in domain:
            d = BallFunction.zeros(ball, alpha.convention)
            vals = d.values.copy()
            vals[i] = 1.0
            val = pairing(d.copy_with(vals), alpha)
            max_res = max(max_res, abs(val))
    # <delta_y, alpha> = -2 conj(Lap alpha(y)); same tolerance scale
    return max_res <= 2.0 * tol, max_res


# ---------------------------------------------------------------------------
# cocycle view

def cocycle_view(alpha: FormalSum) -> Dict[Element, FormalSum]:
    """The 1-cocycle g -> alpha*(g-1) on the generating set."""
    return {g: convolve_diff(alpha, g) for g in alpha.group.generators}


def cocycle_extend(view: Dict[Element, FormalSum], group: GroupModel,
                   word: Iterable[Element]) -> FormalSum:
    """Extend a generator cocycle to a word by delta(wg) = delta(w)_g + delta(g)
    (for right translation alpha_g(x) = alpha(x g^-1))."""
    out = FormalSum(group)
    for g in word:
        out = translate(out, g) + view[g]
    return out


def check_cocycle(alpha: FormalSum, g_word: List[Element], h_word: List[Element]) -> float:
    """Residual of delta(gh) = delta(g)_h + delta(h), where delta is the
    coboundary of alpha; both sides are evaluated independently and also
    compared against alpha*(gh - 1) computed directly."""
    group = alpha.group
    view = cocycle_view(alpha)
    lhs = cocycle_extend(view, group, g_word + h_word)
    g_elem = group.identity()
    for g in g_word:
        g_elem = group.multiply(g_elem, g)
    h_elem = group.identity()
    for h in h_word:
        h_elem = group.multiply(h_elem, h)
    rhs = translate(cocycle_extend(view, group, g_word), h_elem) \
        + cocycle_extend(view, group, h_word)
    res = max((abs(v) for v in (lhs - rhs).data.values()), default=0.0)
    # direct route: alpha*(x-1) = translate(alpha, x) - alpha
    gh = g_elem
    for h in h_word:
        gh = group.multiply(gh, h)
    direct = translate(alpha, gh) - alpha
    res2 = max((abs(v) for v in (lhs - direct).data.values()), default=0.0)
    return max(res, res2)


# ---------------------------------------------------------------------------
# truncation, modulus, powers

def _require_nonnegative(alpha: Carrier, what: str):
    if not alpha.is_nonnegative():
        raise ValueError(f"{what} requires a non-negative real function")


def truncate_min(alpha: Carrier, beta: Carrier) -> Carrier:
    """Pointwise min of two non-negative real functions."""
    _require_nonnegative(alpha, "truncate_min")
    _require_nonnegative(beta, "truncate_min")
    if isinstance(alpha, FormalSum) and isinstance(beta, FormalSum):
        out = {}
        for x in set(alpha.data) | set(beta.data):
            out[x] = min(alpha(x), beta(x))
        return FormalSum(alpha.group, out)
    if isinstance(alpha, BallFunction) and isinstance(beta, BallFunction):
        if alpha.ball is not beta.ball:
            raise ValueError("mismatched balls")
        return alpha.copy_with(np.minimum(alpha.values, beta.values))
    raise TypeError("truncate_min needs carriers of the same kind")


def modulus(alpha: Carrier) -> Carrier:
    if isinstance(alpha, FormalSum):
        return FormalSum(alpha.group, {x: abs(v) for x, v in alpha.data.items()})
    return alpha.copy_with(np.abs(alpha.values))


def power(alpha: Carrier, t: float) -> Carrier:
    """alpha^t(x) = alpha(x)^t for non-negative real alpha, t >= 1."""
    if t < 1:
        raise ValueError("power requires t >= 1")
    _require_nonnegative(alpha, "power")
    if isinstance(alpha, FormalSum):
        return FormalSum(alpha.group, {x: v ** t for x, v in alpha.data.items()})
    return alpha.copy_with(np.real(alpha.values) ** t)
