"""Epsilon-factor sign calculus and component-group characters.

Base epsilon values eps(rho (x) tau) and determinant signs (det rho)(-1) are
user-declared in a SignTable; everything else is derived.  The building
block is

    eps(rho (x) [a] (x) tau (x) [b]) = eps(rho (x) tau)^(ab) * (-1)^(n(a,b) if rho ~ tau)

with n(a,b) = min(a,b) * (max(a,b) - 1), which specializes on the trivial
pair to eps([a] (x) [b]) = (-1)^(n(a,b)).  Inertia contributions of
nontrivial inert symbols are taken trivial by convention; only the trivial
symbol triggers the (-1)^(n-1) base case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .repcore import (
    AParam,
    AparamError,
    CONJ_SYMPL,
    NotDiscreteError,
    ParityError,
    SYMPL,
    WeilSymbol,
    swap_sl2,
    _SIGN,
)
from .relevance import (
    EndoRow,
    check_relevant,
    endoscopic_rows,
    special_pairs,
)

__all__ = [
    "SignTableError",
    "SignTable",
    "CharacterAssignment",
    "eps_block",
    "ggp_chi",
    "ggp_character",
    "without_gaps",
    "alternating_characters",
    "is_alternating",
    "supercuspidal_support",
    "swap_sl2",
    "arthur_character",
    "gg_global_character",
    "automorphy_test",
    "predict_multiplicity",
]


class SignTableError(AparamError):
    pass


class SignTable:
    """Declared base epsilon values and determinant signs.

    ``base_eps`` maps unordered pairs of symbol ids to +-1 and is forced to
    +1 on the trivial pair.  Absent entries raise rather than guess.
    """

    def __init__(self, base_eps: dict | None = None, det_m1: dict | None = None):
        self._eps: dict[tuple[str, str], int] = {("1", "1"): +1}
        for key, val in (base_eps or {}).items():
            a, b = key
            if val not in (1, -1):
                raise SignTableError(f"epsilon value for {key} must be +-1")
            if a == b == "1" and val != 1:
                raise SignTableError("the trivial pair has epsilon +1")
            self._eps[(a, b)] = val
            self._eps[(b, a)] = val
        self._det: dict[str, int] = {"1": +1}
        for sid, val in (det_m1 or {}).items():
            if val not in (1, -1):
                raise SignTableError(f"determinant sign for {sid!r} must be +-1")
            if sid == "1" and val != 1:
                raise SignTableError("the trivial symbol has determinant sign +1")
            self._det[sid] = val

    def eps(self, a: WeilSymbol | str, b: WeilSymbol | str) -> int:
        a = a.id if isinstance(a, WeilSymbol) else a
        b = b.id if isinstance(b, WeilSymbol) else b
        try:
            return self._eps[(a, b)]
        except KeyError:
            raise SignTableError(f"no declared epsilon for the pair ({a!r}, {b!r})") from None

    def det_m1(self, s: WeilSymbol | str) -> int:
        s = s.id if isinstance(s, WeilSymbol) else s
        try:
            return self._det[s]
        except KeyError:
            raise SignTableError(f"no declared determinant sign for {s!r}") from None

    @classmethod
    def from_json(cls, data: dict | str) -> "SignTable":
        """Schema: {"eps": [{"a", "b", "value"}], "detm1": [{"id", "value"}]}."""
        if isinstance(data, str):
            data = json.loads(data)
        eps = {(r["a"], r["b"]): int(r["value"]) for r in data.get("eps", [])}
        det = {r["id"]: int(r["value"]) for r in data.get("detm1", [])}
        return cls(eps, det)


BasisKey = tuple[str, str, int, int]  # (side, symbol id, d_dim, a_dim)


@dataclass(frozen=True)
class CharacterAssignment:
    """Signs on the canonical basis of a component group (or a product of two).

    Keys are (side, symbol id, d_dim, a_dim); side is "M" or "N".
    """

    values: tuple[tuple[BasisKey, int], ...]

    @classmethod
    def of(cls, mapping: dict) -> "CharacterAssignment":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, key):
        return dict(self.values)[key]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _n_ab(a: int, b: int) -> int:
    return min(a, b) * (max(a, b) - 1)


def eps_block(rho: WeilSymbol, a: int, tau: WeilSymbol, b: int, table: SignTable) -> int:
    """Epsilon of rho (x) [a] (x) tau (x) [b] for selfdual symbols."""
    if not rho.selfdual or not tau.selfdual:
        raise SignTableError("epsilon blocks are defined for selfdual symbols")
    base = table.eps(rho, tau)
    val = base if (a * b) % 2 else 1
    if rho.id == tau.id and _n_ab(a, b) % 2:
        val = -val
    return val


def ggp_chi(rho: WeilSymbol, a: int, n0: AParam, table: SignTable) -> int:
    """Distinguished-character value on the basis element rho (x) [a].

    chi(rho, a) = eps(rho (x) [a] (x) N0) * (det rho)(-1)^(a dim N0 / 2)
                * (det N0)(-1)^(a dim rho / 2), the epsilon running over the
    summands of the tempered partner N0 (multiplicities allowed).
    """
    if not n0.is_tempered():
        raise AparamError("the partner parameter must be tempered")
    val = 1
    for t in n0.terms:
        if t.mult % 2:
            val *= eps_block(rho, a, t.weil, t.d_dim, table)
    # determinant twists: a symplectic partner has trivial determinant, so its
    # factor drops without consulting the table (and its possibly half-integer
    # exponent never matters)
    def det_rho():
        return table.det_m1(rho)

    def det_n0():
        if n0.parity in (SYMPL, CONJ_SYMPL):
            return 1
        sign = 1
        for t in n0.terms:
            if (t.d_dim * t.mult) % 2:
                sign *= table.det_m1(t.weil)
        return sign

    for base_fn, num in ((det_rho, a * n0.dim), (det_n0, a * rho.dim)):
        e, r = divmod(num, 2)
        if r:
            if base_fn() != 1:
                raise AparamError("half-integral determinant exponent on a nontrivial sign")
            continue
        if e % 2:
            val *= base_fn()
    return val


def ggp_character(m0: AParam, n0: AParam, table: SignTable) -> CharacterAssignment:
    """Distinguished character on both component groups of a tempered pair.

    The first-side values follow the quoted recipe against the second
    parameter; the second side is computed by the mirrored recipe.
    """
    for p in (m0, n0):
        if not p.is_tempered():
            raise AparamError("both parameters must be tempered")
        if not p.is_discrete():
            raise NotDiscreteError("component-group bases need discrete parameters")
    out = {}
    for t in m0.terms:
        out[("M", t.weil.id, t.d_dim, 1)] = ggp_chi(t.weil, t.d_dim, n0, table)
    for t in n0.terms:
        out[("N", t.weil.id, t.d_dim, 1)] = ggp_chi(t.weil, t.d_dim, m0, table)
    return CharacterAssignment.of(out)


# ---------------------------------------------------------------------------
# Gap and alternation predicates for tempered discrete parameters


def _require_tempered_discrete(m: AParam):
    if not m.is_discrete():
        raise NotDiscreteError("this predicate needs a discrete parameter")
    if not m.is_tempered():
        raise AparamError("this predicate needs a tempered parameter")


def without_gaps(m: AParam) -> bool:
    """True when every summand rho (x) [d] with d >= 3 has rho (x) [d-2] below it."""
    _require_tempered_discrete(m)
    have = {(t.weil.id, t.d_dim) for t in m.terms}
    return all(d < 3 or (sid, d - 2) in have for sid, d in have)


def _alternation_constraints(m: AParam):
    """Pairs of forced relations on the basis, plus the forced bottom values."""
    have = {(t.weil.id, t.d_dim) for t in m.terms}
    forced = {key: -1 for key in have if key[1] == 2}
    links = [
        ((sid, d - 2), (sid, d)) for sid, d in have if d >= 3 and (sid, d - 2) in have
    ]
    return have, forced, links


def is_alternating(m: AParam, alpha: CharacterAssignment) -> bool:
    """Whether a character flips sign along every adjacent chain pair of ``m``."""
    _require_tempered_discrete(m)
    have, forced, links = _alternation_constraints(m)
    vals = {(k[1], k[2]): v for k, v in alpha.values}
    if set(vals) != have:
        raise AparamError("character domain does not match the summand set")
    if any(vals[k] != v for k, v in forced.items()):
        return False
    return all(vals[hi] == -vals[lo] for lo, hi in links)


def alternating_characters(m: AParam) -> list[CharacterAssignment]:
    """All characters alternating along every chain, bottoms at [2] pinned to -1.

    Sign links form disjoint paths (consecutive summands of one chain), so
    each connected segment contributes one free sign unless it contains a
    pinned bottom.
    """
    _require_tempered_discrete(m)
    have, forced, links = _alternation_constraints(m)
    # relative sign of each key against its segment root
    parent = {k: k for k in have}
    rel = {k: +1 for k in have}

    def find(k):
        if parent[k] == k:
            return k, +1
        root, sign = find(parent[k])
        parent[k], rel[k] = root, sign * rel[k]
        return root, rel[k]

    for lo, hi in links:
        rlo, slo = find(lo)
        rhi, shi = find(hi)
        if rlo != rhi:
            # alpha(hi) = -alpha(lo)  =>  sign of rhi's root against rlo's
            parent[rhi], rel[rhi] = rlo, -slo * shi
    roots = sorted({find(k)[0] for k in have})
    pinned = {}
    for key, val in forced.items():
        root, sign = find(key)
        pinned[root] = val * sign  # value of the root itself
    free_roots = [r for r in roots if r not in pinned]
    out = []
    for mask in range(1 << len(free_roots)):
        root_val = dict(pinned)
        for bit, r in enumerate(free_roots):
            root_val[r] = +1 if (mask >> bit) & 1 == 0 else -1
        vals = {}
        for k in have:
            root, sign = find(k)
            vals[k] = root_val[root] * sign
        out.append(
            CharacterAssignment.of({("M", sid, d, 1): vals[(sid, d)] for sid, d in have})
        )
    return sorted(out, key=lambda c: c.values)


def supercuspidal_support(m: AParam, alpha: CharacterAssignment) -> bool:
    """Gapless parameter together with an alternating character."""
    return without_gaps(m) and is_alternating(m, alpha)


# ---------------------------------------------------------------------------
# Endoscopic sign characters and the automorphy test


def _row_eps(ri: EndoRow, rj: EndoRow, table: SignTable) -> int:
    return eps_block(ri.weil, ri.d_dim, rj.weil, rj.d_dim, table)


def _rows(m: AParam, n: AParam):
    rows = endoscopic_rows(m, n)
    return [r for r in rows if r.in_i], [r for r in rows if not r.in_i]


def _mside_key(r: EndoRow) -> BasisKey:
    return ("M", r.weil.id, r.d_dim, r.m_dim)


def _nside_key(r: EndoRow) -> BasisKey:
    return ("N", r.weil.id, r.d_dim, r.n_dim)


def arthur_character(m: AParam, n: AParam, table: SignTable) -> CharacterAssignment:
    """The discrete-spectrum sign character on both component groups.

    On the first parameter's basis the value at an I-row is the product of
    declared epsilons over the J-rows with strictly larger first-side Arthur
    dimension; the other three families mirror this.
    """
    i_rows, j_rows = _rows(m, n)
    out = {}
    for ri in i_rows:
        if ri.m_dim:
            val = 1
            for rj in j_rows:
                if ri.m_dim < rj.m_dim:
                    val *= _row_eps(ri, rj, table)
            out[_mside_key(ri)] = val
        if ri.n_dim:
            val = 1
            for rj in j_rows:
                if ri.n_dim > rj.n_dim:
                    val *= _row_eps(ri, rj, table)
            out[_nside_key(ri)] = val
    for rj in j_rows:
        if rj.m_dim:
            val = 1
            for ri in i_rows:
                if ri.m_dim < rj.m_dim:
                    val *= _row_eps(ri, rj, table)
            out[_mside_key(rj)] = val
        if rj.n_dim:
            val = 1
            for ri in i_rows:
                if ri.n_dim > rj.n_dim:
                    val *= _row_eps(ri, rj, table)
            out[_nside_key(rj)] = val
    return CharacterAssignment.of(out)


def gg_global_character(m: AParam, n: AParam, table: SignTable) -> CharacterAssignment:
    """The distinguished character transported to the same bases.

    Nonzero products appear only on the I-rows' first side and the J-rows'
    second side; the other two families are identically +1.
    """
    i_rows, j_rows = _rows(m, n)
    out = {}
    for ri in i_rows:
        if ri.m_dim:
            val = 1
            for rj in j_rows:
                val *= _row_eps(ri, rj, table)
            out[_mside_key(ri)] = val
        if ri.n_dim:
            out[_nside_key(ri)] = 1
    for rj in j_rows:
        if rj.m_dim:
            out[_mside_key(rj)] = 1
        if rj.n_dim:
            val = 1
            for ri in i_rows:
                val *= _row_eps(ri, rj, table)
            out[_nside_key(rj)] = val
    return CharacterAssignment.of(out)


def automorphy_test(m: AParam, n: AParam, table: SignTable) -> dict:
    """Check the four product-equals-one conditions for automorphy.

    When all four hold, the per-row restricted products over special pairs
    are additionally asserted to be +1.
    """
    i_rows, j_rows = _rows(m, n)
    failed = []

    def prod(pairs):
        val = 1
        for ri, rj in pairs:
            val *= _row_eps(ri, rj, table)
        return val

    for ri in i_rows:
        if ri.m_dim and prod((ri, rj) for rj in j_rows if ri.m_dim > rj.m_dim) != 1:
            failed.append(f"first-side product at {ri.weil.id}:D{ri.d_dim} (I-row)")
        if ri.n_dim and prod((ri, rj) for rj in j_rows if ri.n_dim > rj.n_dim) != 1:
            failed.append(f"second-side product at {ri.weil.id}:D{ri.d_dim} (I-row)")
    for rj in j_rows:
        if rj.m_dim and prod((ri, rj) for ri in i_rows if ri.m_dim < rj.m_dim) != 1:
            failed.append(f"first-side product at {rj.weil.id}:D{rj.d_dim} (J-row)")
        if rj.n_dim and prod((ri, rj) for ri in i_rows if ri.n_dim < rj.n_dim) != 1:
            failed.append(f"second-side product at {rj.weil.id}:D{rj.d_dim} (J-row)")
    automorphic = not failed
    if automorphic:
        specials = special_pairs(m, n)
        for ri in i_rows:
            val = prod((sp.i_row, sp.j_row) for sp in specials if sp.i_row == ri)
            if val != 1:
                raise AparamError("special-pair product identity failed on an I-row")
        for rj in j_rows:
            val = prod((sp.i_row, sp.j_row) for sp in specials if sp.j_row == rj)
            if val != 1:
                raise AparamError("special-pair product identity failed on a J-row")
    return {"automorphic": automorphic, "failed_conditions": failed}


def predict_multiplicity(m: AParam, n: AParam, table: SignTable) -> dict:
    """Branching-multiplicity prediction for a pair of classical parameters.

    The multiplicity is 1 exactly when the pair is relevant; the
    distinguished character is produced in the two covered regimes: tempered
    pairs (root-number recipe) and discrete endoscopic pairs (restricted
    epsilon products).  Outside those the character is left undetermined.
    """
    if m.parity == "gl" or n.parity == "gl":
        raise ParityError("multiplicity prediction needs classical parities")
    if _SIGN[m.parity] == _SIGN[n.parity]:
        raise ParityError("the two parities must be opposite")
    verdict = check_relevant(m, n)
    if not verdict:
        return {"d": 0, "character": None, "reason": verdict.reason}
    if m.is_tempered() and n.is_tempered() and m.is_discrete() and n.is_discrete():
        return {"d": 1, "character": ggp_character(m, n, table)}
    if m.is_discrete() and n.is_discrete():
        return {"d": 1, "character": gg_global_character(m, n, table)}
    return {"d": 1, "character": None}
