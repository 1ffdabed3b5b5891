"""Global symbolic L-order calculus over cuspidal symbols.

Central vanishing orders are unknowns: z(A, B) >= 0 stands for the order of
the completed Rankin product of the cuspidal pair (A, B) at the center.
Pole bookkeeping follows the convention that L(A (x) B, s) has exactly one
pole, simple, at the edge s = 1, occurring iff B is the contragredient of
A; zeros at real points occur only at the center.  For a block
(A (x) B) (x) [d] evaluated after a shift this yields:

  shift 1/2:  pole +1 iff d even nonzero and B ~ A^dual;  zero -z(A,B) iff d odd
  shift 1:    pole +1 iff d odd and B ~ A^dual;           zero -z(A,B) iff d even nonzero

Symmetric and exterior squares of a selfdual cuspidal symbol carry a pole
marker instead of a dual test: Sym^2 poles for orthogonal symbols, Alt^2
for symplectic ones (conjugate types behave like their plain counterparts).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .repcore import (
    AParam,
    AparamError,
    NotDiscreteError,
    ParityError,
    ShapeError,
    WeilSymbol,
    alt2_sl2,
    clebsch_gordan,
    sym2_sl2,
    CONJ_ORTH,
    CONJ_SYMPL,
    ORTH,
    SYMPL,
    _SIGN,
)
from .relevance import NotRelevantError, check_relevant, endoscopic_rows

__all__ = [
    "OrderExpr",
    "z_key",
    "global_block_order",
    "square_block_order",
    "global_ratio_order",
    "diagonal_block_order",
]

CuspSymbol = WeilSymbol

HALF = Fraction(1, 2)
ONE = Fraction(1)


@dataclass(frozen=True)
class OrderExpr:
    """Integer constant plus an integer combination of central-order unknowns."""

    const: int = 0
    zs: tuple[tuple[tuple[str, str], int], ...] = ()

    @classmethod
    def of(cls, const: int = 0, zs: dict | None = None) -> "OrderExpr":
        clean = {k: v for k, v in (zs or {}).items() if v}
        return cls(const, tuple(sorted(clean.items())))

    def __add__(self, other: "OrderExpr") -> "OrderExpr":
        zs = dict(self.zs)
        for k, v in other.zs:
            zs[k] = zs.get(k, 0) + v
        return OrderExpr.of(self.const + other.const, zs)

    def __sub__(self, other: "OrderExpr") -> "OrderExpr":
        return self + other.scale(-1)

    def scale(self, c: int) -> "OrderExpr":
        return OrderExpr.of(self.const * c, {k: v * c for k, v in self.zs})

    def substitute(self, bindings: dict[tuple[str, str], int]) -> int:
        """Numeric value under nonnegative bindings for the unknowns."""
        total = self.const
        for k, v in self.zs:
            try:
                val = bindings[k]
            except KeyError:
                raise AparamError(f"no binding for unknown z{k}") from None
            if val < 0:
                raise AparamError("central orders must be nonnegative")
            total += v * val
        return total

    def render(self) -> str:
        bits = []
        if self.const or not self.zs:
            bits.append(str(self.const))
        for (a, b), v in self.zs:
            mag = f"{abs(v)}*" if abs(v) != 1 else ""
            bits.append(("- " if v < 0 else "+ ") + f"{mag}z({a},{b})")
        text = " ".join(bits)
        return text[2:] if text.startswith("+ ") else text

    def __repr__(self):
        return f"OrderExpr({self.render()})"


def z_key(a: WeilSymbol | str, b: WeilSymbol | str) -> tuple[str, str]:
    a = a.id if isinstance(a, WeilSymbol) else a
    b = b.id if isinstance(b, WeilSymbol) else b
    return (a, b) if a <= b else (b, a)


def global_block_order(
    p1: CuspSymbol, p2: CuspSymbol, d: int, shift: Fraction | int | str
) -> OrderExpr:
    """Signed order at s=0 of the Rankin block (p1 (x) p2) (x) [d] after a shift."""
    shift = Fraction(shift)
    if shift not in (HALF, ONE):
        raise AparamError("shift must be 1/2 or 1")
    if d < 0:
        raise AparamError("block dimension must be nonnegative")
    if d == 0:
        return OrderExpr.of(0)
    dual = p2.id == p1.dual_id
    if shift == HALF:
        if d % 2 == 0:
            return OrderExpr.of(1 if dual else 0)
        return OrderExpr.of(0, {z_key(p1, p2): -1})
    if d % 2 == 1:
        return OrderExpr.of(1 if dual else 0)
    return OrderExpr.of(0, {z_key(p1, p2): -1})


def square_block_order(kind: str, p: CuspSymbol, d: int) -> OrderExpr:
    """Order at s=0, after the full shift, of (Sym^2 or Alt^2 of p) (x) [d].

    Only odd d can occur here (squares of SL2 irreducibles decompose into
    odd-dimensional pieces), so no central-value unknowns enter.
    """
    if d % 2 == 0:
        raise ShapeError("square blocks always carry odd SL2 dimensions")
    if kind == "sym2":
        marker = p.duality in (ORTH, CONJ_ORTH) and p.selfdual
    elif kind == "alt2":
        marker = p.duality in (SYMPL, CONJ_SYMPL) and p.selfdual
    else:
        raise AparamError(f"unknown square kind {kind!r}")
    return OrderExpr.of(1 if marker else 0)


def _check_global_pair(m: AParam, n: AParam):
    if m.parity == "gl" or n.parity == "gl":
        raise ParityError("global ratio needs classical parities")
    if _SIGN[m.parity] == _SIGN[n.parity]:
        raise ParityError("the two parities must be opposite")
    for p in (m, n):
        if not p.is_deligne_trivial():
            raise AparamError("global parameters carry only the second SL2 factor")
        if not p.is_discrete():
            raise NotDiscreteError("global ratio needs discrete parameters")


def global_ratio_order(m: AParam, n: AParam) -> OrderExpr:
    """Canonicalized order at s=0 of the global branching ratio.

    The pair decomposes into partnered rows (V_a, W_a); the numerator is the
    blockwise expansion of sum V_a (x) W_b at the half shift and the
    denominator collects the diagonal squares and the cross tensors at the
    full shift.  For a relevant pair the constant term vanishes and the
    expression is minus the sum of central unknowns over special pairs.
    """
    _check_global_pair(m, n)
    w = check_relevant(m, n)
    if not w:
        raise NotRelevantError(w)
    rows = endoscopic_rows(m, n, w)
    expr = OrderExpr.of(0)
    # numerator: diagonal V_a (x) W_a plus both mixed products per unordered pair
    for r in rows:
        for d in clebsch_gordan(r.m_dim, r.n_dim) if r.m_dim and r.n_dim else []:
            expr += global_block_order(r.weil, r.weil, d, HALF)
    for i, ra in enumerate(rows):
        for rb in rows[i + 1 :]:
            if ra.m_dim and rb.n_dim:
                for d in clebsch_gordan(ra.m_dim, rb.n_dim):
                    expr += global_block_order(ra.weil, rb.weil, d, HALF)
            if rb.m_dim and ra.n_dim:
                for d in clebsch_gordan(rb.m_dim, ra.n_dim):
                    expr += global_block_order(rb.weil, ra.weil, d, HALF)
    # denominator: the adjoint square on each side (symmetric square on the
    # symplectic parameter, exterior square on the orthogonal one), tensors off
    # the diagonal
    first_sympl = m.parity in (SYMPL, CONJ_SYMPL)
    den = OrderExpr.of(0)
    for r in rows:
        for dim, sympl_side in ((r.m_dim, first_sympl), (r.n_dim, not first_sympl)):
            if not dim:
                continue
            if sympl_side:
                # Sym^2(rho (x) [b]) = Sym^2 rho (x) Sym^2[b] + Alt^2 rho (x) Alt^2[b]
                for d in sym2_sl2(dim):
                    den += square_block_order("sym2", r.weil, d)
                for d in alt2_sl2(dim):
                    den += square_block_order("alt2", r.weil, d)
            else:
                # Alt^2(rho (x) [b]) = Sym^2 rho (x) Alt^2[b] + Alt^2 rho (x) Sym^2[b]
                for d in alt2_sl2(dim):
                    den += square_block_order("sym2", r.weil, d)
                for d in sym2_sl2(dim):
                    den += square_block_order("alt2", r.weil, d)
    for i, ra in enumerate(rows):
        for rb in rows[i + 1 :]:
            if ra.m_dim and rb.m_dim:
                for d in clebsch_gordan(ra.m_dim, rb.m_dim):
                    den += global_block_order(ra.weil, rb.weil, d, ONE)
            if ra.n_dim and rb.n_dim:
                for d in clebsch_gordan(ra.n_dim, rb.n_dim):
                    den += global_block_order(ra.weil, rb.weil, d, ONE)
    return expr - den


def diagonal_block_order(v: CuspSymbol, dims: tuple[int, int]) -> OrderExpr:
    """Order contribution of one partnered row (V (x) [b], V (x) [b']); always zero.

    Exposed for unit testing of the min-count bookkeeping: the poles of the
    tensor numerator match the poles of the two square factors exactly.
    """
    if not v.selfdual:
        raise AparamError("diagonal rows carry selfdual symbols")
    b, bp = dims
    if abs(b - bp) != 1:
        raise ShapeError("row dimensions must differ by one")
    sign = _SIGN.get(v.duality)
    if b and sign * (1 if b % 2 else -1) != -1:
        raise ParityError("first-side block must be symplectic")
    if bp and sign * (1 if bp % 2 else -1) != 1:
        raise ParityError("second-side block must be orthogonal")
    expr = OrderExpr.of(0)
    for d in clebsch_gordan(b, bp) if b and bp else []:
        expr += global_block_order(v, v, d, HALF)
    if b:
        for d in sym2_sl2(b):
            expr -= square_block_order("sym2", v, d)
        for d in alt2_sl2(b):
            expr -= square_block_order("alt2", v, d)
    if bp:
        for d in alt2_sl2(bp):
            expr -= square_block_order("sym2", v, d)
        for d in sym2_sl2(bp):
            expr -= square_block_order("alt2", v, d)
    return expr
