"""Local symbolic L-function calculus: pole orders at positive half-integers.

A formal representation is a sum of blocks (token) (x) [a] (x) [b] where the
token exposes only its dimension and the multiplicity of the trivial
representation inside it.  The local factor of such a block is

    L(s, token (x) [a] (x) [b]) = prod_q L(s + (a-1)/2 + (b-1-2q)/2, token),

q = 0..b-1, with the first SL2 factor contributing only its top exponent.
A block therefore has a pole at s0 exactly when the token contains the
trivial representation and s0 + (a+b)/2 - 1 is an integer in [0, b-1]; the
pole is simple per trivial constituent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .repcore import (
    AParam,
    AparamError,
    ParityError,
    WeilSymbol,
    alt2_sl2,
    clebsch_gordan,
    dual_param,
    sym2_sl2,
    CONJ_ORTH,
    CONJ_SYMPL,
    ORTH,
    SYMPL,
)
from .relevance import NotRelevantError, check_relevant

__all__ = [
    "Token",
    "FormalRep",
    "to_formal",
    "tensor_formal",
    "sym2_formal",
    "alt2_formal",
    "ord_at",
    "gl_ratio_order",
    "bessel_ratio_order",
    "adjoint_order",
    "gl_hom_formula_order",
]


@dataclass(frozen=True, order=True)
class Token:
    """An inert Weil-group building block: Symbol, TensorPair, SymSquare or AltSquare."""

    kind: str  # "sym", "tensor", "sym2", "alt2"
    first: WeilSymbol
    second: WeilSymbol | None = None

    @property
    def dim(self) -> int:
        d = self.first.dim
        if self.kind == "sym":
            return d
        if self.kind == "tensor":
            return d * self.second.dim
        if self.kind == "sym2":
            return d * (d + 1) // 2
        if self.kind == "alt2":
            return d * (d - 1) // 2
        raise AparamError(f"unknown token kind {self.kind!r}")

    @property
    def trivial_mult(self) -> int:
        """Multiplicity of the trivial Weil representation inside the token."""
        if self.kind == "sym":
            return 1 if self.first.is_trivial else 0
        if self.kind == "tensor":
            return 1 if self.second.id == self.first.dual_id else 0
        if self.kind == "sym2":
            return 1 if self.first.duality in (ORTH, CONJ_ORTH) and self.first.selfdual else 0
        if self.kind == "alt2":
            return 1 if self.first.duality in (SYMPL, CONJ_SYMPL) and self.first.selfdual else 0
        raise AparamError(f"unknown token kind {self.kind!r}")

    def sort_key(self):
        return (self.kind, self.first.id, self.second.id if self.second else "")


def symbol_token(s: WeilSymbol) -> Token:
    return Token("sym", s)


def tensor_token(a: WeilSymbol, b: WeilSymbol) -> Token:
    return Token("tensor", a, b)


class FormalRep:
    """Canonically merged multiset of (token, d_dim, a_dim, mult) blocks."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        merged: dict[tuple, int] = {}
        for tok, d, a, mult in blocks:
            if mult == 0 or tok.dim == 0:
                continue
            key = (tok, d, a)
            merged[key] = merged.get(key, 0) + mult
        out = tuple(
            (tok, d, a, m)
            for (tok, d, a), m in sorted(merged.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1], kv[0][2]))
        )
        object.__setattr__(self, "blocks", out)

    def __setattr__(self, *a):
        raise AttributeError("FormalRep is immutable")

    def __eq__(self, other):
        return isinstance(other, FormalRep) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __add__(self, other: "FormalRep") -> "FormalRep":
        return FormalRep(self.blocks + other.blocks)

    @property
    def dim(self) -> int:
        return sum(tok.dim * d * a * m for tok, d, a, m in self.blocks)


def to_formal(p: AParam) -> FormalRep:
    """View a parameter as a formal representation of Symbol blocks."""
    return FormalRep((symbol_token(t.weil), t.d_dim, t.a_dim, t.mult) for t in p.terms)


def ord_at(r: FormalRep, s0: Fraction | int | str) -> int:
    """Order of the pole of the local L-factor of ``r`` at a positive half-integer.

    Local factors never vanish, so the result is always >= 0; zeros arise
    only when taking ratios.
    """
    s0 = Fraction(s0)
    if s0 <= 0 or (2 * s0).denominator != 1:
        raise AparamError(f"evaluation point must be a positive half-integer, got {s0}")
    total = 0
    for tok, a, b, mult in r.blocks:
        tm = tok.trivial_mult
        if tm == 0:
            continue
        q = s0 + Fraction(a + b, 2) - 1
        if q.denominator == 1 and 0 <= q <= b - 1:
            total += tm * mult
    return total


def tensor_formal(m: AParam, n: AParam) -> FormalRep:
    """Bilinear tensor expansion; symbols pair into inert TensorPair tokens."""
    blocks = []
    for t in m.terms:
        for u in n.terms:
            tok = tensor_token(t.weil, u.weil)
            for d in clebsch_gordan(t.d_dim, u.d_dim):
                for a in clebsch_gordan(t.a_dim, u.a_dim):
                    blocks.append((tok, d, a, t.mult * u.mult))
    return FormalRep(blocks)


def _square_single(weil: WeilSymbol, d_dim: int, a_dim: int, alt: bool):
    """Blocks of Sym^2 (alt=False) or Alt^2 (alt=True) of a single summand."""
    s_tok = Token("sym2", weil)
    a_tok = Token("alt2", weil)
    dd_s, dd_a = sym2_sl2(d_dim), alt2_sl2(d_dim)
    aa_s, aa_a = sym2_sl2(a_dim), alt2_sl2(a_dim)
    # Sym^2(rho (x) X (x) Y) groups by how many of the three factors are alternated.
    if not alt:
        combos = [(s_tok, dd_s, aa_s), (s_tok, dd_a, aa_a), (a_tok, dd_s, aa_a), (a_tok, dd_a, aa_s)]
    else:
        combos = [(a_tok, dd_s, aa_s), (a_tok, dd_a, aa_a), (s_tok, dd_s, aa_a), (s_tok, dd_a, aa_s)]
    blocks = []
    for tok, dds, aas in combos:
        if tok.dim == 0:
            continue
        for d in dds:
            for a in aas:
                blocks.append((tok, d, a, 1))
    return blocks


def _square_formal(p: AParam, alt: bool) -> FormalRep:
    blocks = []
    terms = p.terms
    for t in terms:
        single = _square_single(t.weil, t.d_dim, t.a_dim, alt)
        blocks.extend((tok, d, a, mult * t.mult) for tok, d, a, mult in single)
        pairs = t.mult * (t.mult - 1) // 2
        if pairs:
            tok = tensor_token(t.weil, t.weil)
            for d in clebsch_gordan(t.d_dim, t.d_dim):
                for a in clebsch_gordan(t.a_dim, t.a_dim):
                    blocks.append((tok, d, a, pairs))
    for i, t in enumerate(terms):
        for u in terms[i + 1 :]:
            tok = tensor_token(t.weil, u.weil)
            for d in clebsch_gordan(t.d_dim, u.d_dim):
                for a in clebsch_gordan(t.a_dim, u.a_dim):
                    blocks.append((tok, d, a, t.mult * u.mult))
    return FormalRep(blocks)


def sym2_formal(p: AParam) -> FormalRep:
    """Symmetric square, with Sym^2(V^c) = Sym^2(V)^c + (V(x)V)^(c choose 2) on repeats."""
    return _square_formal(p, alt=False)


def alt2_formal(p: AParam) -> FormalRep:
    """Exterior square of a formal sum."""
    return _square_formal(p, alt=True)


# ---------------------------------------------------------------------------
# The two branching ratios.  Returned orders count poles positive and zeros
# negative, so "pole of order >= 0" reads as result >= 0.


def gl_ratio_order(m: AParam, n: AParam) -> int:
    """Signed order at s=0 of the general-linear branching ratio.

    Numerator: the two mixed tensor factors at the half shift.  Denominator:
    the two adjoint factors at the full shift.
    """
    if m.parity != "gl" or n.parity != "gl":
        raise ParityError("gl ratio needs two gl parameters")
    num = ord_at(tensor_formal(m, dual_param(n)), Fraction(1, 2)) + ord_at(
        tensor_formal(dual_param(m), n), Fraction(1, 2)
    )
    den = ord_at(tensor_formal(m, dual_param(m)), 1) + ord_at(
        tensor_formal(n, dual_param(n)), 1
    )
    return num - den


def adjoint_order(p: AParam) -> int:
    """Pole order at the full shift of the adjoint factor picked by parity."""
    if p.parity in (SYMPL, CONJ_SYMPL):
        return ord_at(sym2_formal(p), 1)
    if p.parity in (ORTH, CONJ_ORTH):
        return ord_at(alt2_formal(p), 1)
    raise ParityError("adjoint factor needs a classical parity")


def bessel_ratio_order(m: AParam, n: AParam, detail: bool = False):
    """Signed order at s=0 of the Bessel branching ratio for a classical pair.

    Numerator ord(m (x) n at 1/2) minus the two adjoint orders at 1.  For a
    relevant pair the result is >= 0; on multiplicity-free pairs with
    trivial first SL2 it is <= 0 with equality exactly at relevance.
    """
    if m.parity not in (SYMPL, CONJ_SYMPL):
        raise ParityError("first parameter must be (conjugate-)symplectic")
    if n.parity not in (ORTH, CONJ_ORTH):
        raise ParityError("second parameter must be (conjugate-)orthogonal")
    num = ord_at(tensor_formal(m, n), Fraction(1, 2))
    den = adjoint_order(m) + adjoint_order(n)
    if detail:
        return num, den, num - den
    return num - den


def gl_hom_formula_order(m: AParam, n: AParam) -> int:
    """Pole order at s=0 of the gl ratio, by hom-space counting from the witness.

    Only valid for relevant gl pairs with trivial first SL2.  Writing the
    chains 1-based (index = Arthur dimension) the order is

        sum_i  <M_i, N_{i-1}> + <M_i, N_{i+1}> - <M_i^+, N_{i-1}^-> - <M_i^-, N_{i+1}^+>
             + <M_1^+, M_1^-> + <N_1^+, N_1^->

    where <A, B> counts label matches with multiplicity and N_0 = N_0^- = 0.
    The two boundary products vanish whenever the bottom chain entries are
    multiplicity-free; without them the nearest-neighbour sum undercounts
    exactly by those terms (checked symbolically against the blockwise
    expansion on chains of depth 6).
    """
    if m.parity != "gl" or n.parity != "gl":
        raise ParityError("hom formula needs gl parameters")
    if not (m.is_deligne_trivial() and n.is_deligne_trivial()):
        raise AparamError("hom formula needs trivial first SL2")
    w = check_relevant(m, n)
    if not w:
        raise NotRelevantError(w)
    total = 0
    for _lab, lw in w.labels:
        size = len(lw.mplus)
        for i0 in range(size):  # 0-based; 1-based index is i0 + 1
            m_i = lw.m(i0)
            if not m_i:
                continue
            n_down = lw.n(i0 - 1) if i0 >= 1 else 0
            n_up = lw.n(i0 + 1)
            total += m_i * n_down + m_i * n_up
            # minus the linked parts: M_i^+ against N_{i-1}^- and M_i^- against N_{i+1}^+
            nm_down = lw.nminus[i0 - 1] if i0 >= 1 else 0
            np_up = lw.nplus[i0 + 1] if i0 + 1 < size else 0
            total -= lw.mplus[i0] * nm_down + lw.mminus[i0] * np_up
        if size:
            total += lw.mplus[0] * lw.mminus[0] + lw.nplus[0] * lw.nminus[0]
    return total
