"""Deciding relevance of a pair of Arthur parameters.

A pair (M, N) is relevant when every WD-label admits a splitting of its
chain multiplicities m_i = m_i^+ + m_i^-, n_i = n_i^+ + n_i^- (i indexing
the Arthur factor [i+1]) with the cross-links

    m_i^+ = n_{i+1}^-   and   n_i^+ = m_{i+1}^-   for all i >= 0.

The splitting, when it exists, is unique: the plus parts vanish at the top
index and everything below is forced.  The free parts are m_0^- and n_0^-.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .repcore import (
    AParam,
    ATerm,
    AparamError,
    BudgetError,
    NotDiscreteError,
    ParityError,
    ShapeError,
    WeilSymbol,
    clebsch_gordan,
    composite_sign,
    delta_map,
    _SIGN,
)

__all__ = [
    "LabelWitness",
    "RelevanceWitness",
    "NotRelevant",
    "NotRelevantError",
    "check_relevant",
    "is_relevant",
    "brute_force_relevant",
    "ep_identities",
    "EndoRow",
    "endoscopic_rows",
    "SpecialPair",
    "special_pairs",
    "correlator_witness",
    "CorrelatorWitness",
    "delta_class_search",
]

Label = tuple[WeilSymbol, int]


class NotRelevantError(AparamError):
    """Raised by operations whose precondition is a relevant pair."""

    def __init__(self, certificate: "NotRelevant"):
        super().__init__(certificate.reason)
        self.certificate = certificate


@dataclass(frozen=True)
class LabelWitness:
    """The unique splitting along one WD-label, indexed by Arthur index i."""

    mplus: tuple[int, ...]
    mminus: tuple[int, ...]
    nplus: tuple[int, ...]
    nminus: tuple[int, ...]

    def m(self, i: int) -> int:
        return self._at(self.mplus, i) + self._at(self.mminus, i)

    def n(self, i: int) -> int:
        return self._at(self.nplus, i) + self._at(self.nminus, i)

    @staticmethod
    def _at(seq, i):
        return seq[i] if 0 <= i < len(seq) else 0


@dataclass(frozen=True)
class RelevanceWitness:
    """Per-label splittings certifying relevance of (m, n)."""

    m: AParam
    n: AParam
    labels: tuple[tuple[Label, LabelWitness], ...]

    relevant = True

    def __bool__(self):
        return True

    def label_map(self) -> dict[Label, LabelWitness]:
        return dict(self.labels)


@dataclass(frozen=True)
class NotRelevant:
    """Minimal infeasibility certificate: the first place a count went negative."""

    label: Label
    index: int
    side: str
    deficit: int

    relevant = False

    def __bool__(self):
        return False

    @property
    def reason(self) -> str:
        sym, d = self.label
        return (
            f"label {sym.id}:D{d}: forced {self.side}-part at Arthur index "
            f"{self.index} short by {self.deficit}"
        )


def _label_chains(m: AParam, n: AParam) -> dict[Label, tuple[dict[int, int], dict[int, int]]]:
    cm, cn = m.chains(), n.chains()
    out = {}
    for lab in sorted(set(cm) | set(cn), key=lambda L: (L[0].id, L[1])):
        out[lab] = (cm.get(lab, {}), cn.get(lab, {}))
    return out


def _descend(mc: dict[int, int], nc: dict[int, int]):
    """Run the forced top-down splitting on one label; None on failure."""
    top = max(list(mc) + list(nc), default=-1)
    size = top + 1
    mplus = [0] * size
    mminus = [0] * size
    nplus = [0] * size
    nminus = [0] * size
    for i in range(top, -1, -1):
        up_mm = mminus[i + 1] if i + 1 <= top else 0
        up_nm = nminus[i + 1] if i + 1 <= top else 0
        nplus[i] = up_mm
        nminus[i] = nc.get(i, 0) - nplus[i]
        if nminus[i] < 0:
            return None, ("N", i, -nminus[i])
        mplus[i] = up_nm
        mminus[i] = mc.get(i, 0) - mplus[i]
        if mminus[i] < 0:
            return None, ("M", i, -mminus[i])
    return LabelWitness(tuple(mplus), tuple(mminus), tuple(nplus), tuple(nminus)), None


def check_relevant(m: AParam, n: AParam) -> RelevanceWitness | NotRelevant:
    """Decide relevance and return the unique witness or an infeasibility certificate.

    The notion is symmetric in (m, n) and always holds when both parameters
    are tempered.
    """
    labels = []
    for lab, (mc, nc) in _label_chains(m, n).items():
        w, err = _descend(mc, nc)
        if w is None:
            side, i, deficit = err
            return NotRelevant(lab, i, side, deficit)
        labels.append((lab, w))
    return RelevanceWitness(m, n, tuple(labels))


def is_relevant(m: AParam, n: AParam) -> bool:
    return check_relevant(m, n).relevant


def _splittings(total: int):
    return [(p, total - p) for p in range(total + 1)]


def brute_force_relevant(
    m: AParam, n: AParam, cap: int = 200_000
) -> RelevanceWitness | NotRelevant:
    """Independent oracle: enumerate all splittings per label and test the links.

    Raises BudgetError when a label admits more than ``cap`` candidate
    splittings.  Agrees with check_relevant on its whole domain and finds at
    most one witness per label (uniqueness).
    """
    labels = []
    for lab, (mc, nc) in _label_chains(m, n).items():
        top = max(list(mc) + list(nc), default=-1)
        size = top + 1
        ms = [mc.get(i, 0) for i in range(size)]
        ns = [nc.get(i, 0) for i in range(size)]
        count = 1
        for v in ms + ns:
            count *= v + 1
            if count > cap:
                raise BudgetError(f"more than {cap} splittings on label {lab[0].id}:D{lab[1]}")
        found = []
        for msplit in product(*(_splittings(v) for v in ms)):
            for nsplit in product(*(_splittings(v) for v in ns)):
                ok = True
                for i in range(size):
                    up_nm = nsplit[i + 1][1] if i + 1 < size else 0
                    up_mm = msplit[i + 1][1] if i + 1 < size else 0
                    if msplit[i][0] != up_nm or nsplit[i][0] != up_mm:
                        ok = False
                        break
                if ok:
                    found.append((msplit, nsplit))
        if len(found) > 1:
            raise AparamError(f"witness not unique on label {lab}")  # impossible
        if not found:
            w, err = _descend(mc, nc)
            side, i, deficit = err if err else ("M", 0, 0)
            return NotRelevant(lab, i, side, deficit)
        msplit, nsplit = found[0]
        labels.append(
            (
                lab,
                LabelWitness(
                    tuple(p for p, _ in msplit),
                    tuple(q for _, q in msplit),
                    tuple(p for p, _ in nsplit),
                    tuple(q for _, q in nsplit),
                ),
            )
        )
    return RelevanceWitness(m, n, tuple(labels))


def ep_identities(w: RelevanceWitness) -> list[Label]:
    """Check the two odd/even cross sums; returns the labels that fail (empty = pass).

    As multisets of WD-labels:  sum over odd i of M_i equals sum over even i
    of N_i minus the free part N_0^-, and symmetrically with M and N swapped.
    """
    bad = []
    for lab, lw in w.labels:
        size = len(lw.mplus)
        m_odd = sum(lw.m(i) for i in range(1, size, 2))
        m_even = sum(lw.m(i) for i in range(0, size, 2))
        n_odd = sum(lw.n(i) for i in range(1, size, 2))
        n_even = sum(lw.n(i) for i in range(0, size, 2))
        nminus0 = lw.nminus[0] if size else 0
        mminus0 = lw.mminus[0] if size else 0
        if m_odd != n_even - nminus0 or n_odd != m_even - mminus0:
            bad.append(lab)
    return bad


# ---------------------------------------------------------------------------
# Endoscopic rows and special pairs


@dataclass(frozen=True)
class EndoRow:
    """One matched summand: a WD-label with its Arthur dimensions on both sides.

    ``m_dim`` / ``n_dim`` are the Arthur dimensions of the summand inside the
    first / second parameter (0 when absent); they always differ by one.
    ``in_i`` marks rows whose label has the first parameter's duality sign.
    """

    weil: WeilSymbol
    d_dim: int
    m_dim: int
    n_dim: int
    in_i: bool


def endoscopic_rows(m: AParam, n: AParam, witness: RelevanceWitness | None = None) -> list[EndoRow]:
    """Decompose a discrete relevant pair into partnered rows.

    Every irreducible summand of one parameter is paired with a partner on
    the other side whose Arthur dimension differs by exactly one (a missing
    partner counts as dimension 0).  Requires opposite classical parities.
    """
    if m.parity == "gl" or n.parity == "gl":
        raise ParityError("endoscopic rows need classical parities")
    if _SIGN[m.parity] == _SIGN[n.parity]:
        raise ParityError("the two parities must be opposite")
    if not m.is_discrete() or not n.is_discrete():
        raise NotDiscreteError("endoscopic rows are defined for discrete parameters")
    if witness is None:
        witness = check_relevant(m, n)
        if not witness:
            raise NotRelevantError(witness)
    rows = []
    m_sign = _SIGN[m.parity]
    for (sym, d), lw in witness.labels:
        sign, _ = composite_sign(sym, d, 1)
        if sign is None:
            raise ShapeError(f"label {sym.id}:D{d} is not selfdual")
        in_i = sign == m_sign
        size = len(lw.mplus)
        for i in range(size):
            if lw.mplus[i]:
                rows.append(EndoRow(sym, d, i + 1, i + 2, in_i))
            if lw.mminus[i]:
                rows.append(EndoRow(sym, d, i + 1, i if i >= 1 else 0, in_i))
        if size and lw.nminus[0]:
            rows.append(EndoRow(sym, d, 0, 1, in_i))
    rows.sort(key=lambda r: (r.weil.id, r.d_dim, r.m_dim))
    return rows


@dataclass(frozen=True)
class SpecialPair:
    """Matched rows with Arthur dimensions (b, b+1) against (b+1, b)."""

    i_row: EndoRow
    j_row: EndoRow


def special_pairs(m: AParam, n: AParam) -> list[SpecialPair]:
    """All row pairs (i, j) with (m_i, m'_i) = (n'_j, n_j).

    These are the summand blocks V(x)[b] + W(x)[b+1] in one parameter facing
    V(x)[b+1] + W(x)[b] in the other; a fully tempered pair has none.
    """
    rows = endoscopic_rows(m, n)
    i_rows = [r for r in rows if r.in_i]
    j_rows = [r for r in rows if not r.in_i]
    out = []
    for ri in i_rows:
        for rj in j_rows:
            if (ri.m_dim, ri.n_dim) == (rj.n_dim, rj.m_dim):
                out.append(SpecialPair(ri, rj))
    return out


# ---------------------------------------------------------------------------
# Correlator


@dataclass(frozen=True)
class GradedMap:
    """A surjection V_i^{sign} (x) t_i^a  ->  W_{i+-1} (x) t^{a+1} of the given rank."""

    label: Label
    src_index: int
    src_sign: str
    src_grade: int
    dst_index: int
    dst_grade: int
    rank: int


@dataclass(frozen=True)
class KernelPiece:
    label: Label
    index: int
    grade: int
    mult: int


@dataclass(frozen=True)
class CorrelatorWitness:
    """Graded map data for a degree-1 map T with T*T = e and TT* = e'."""

    mode: str  # "bilinear" or "gl-doubled"
    maps: tuple[GradedMap, ...]
    kernel: tuple[KernelPiece, ...]
    zero: bool  # True when both nilpotents vanish and T = 0 works


def correlator_witness(m: AParam, n: AParam) -> CorrelatorWitness | NotRelevant:
    """Build the graded correlator data from the relevance witness.

    Exists exactly when the pair is relevant.  For a pair of classical
    parameters the parities must be opposite; a pair of gl parameters is
    handled through the doubled construction, with the same graded data.
    """
    if m.parity == "gl" and n.parity == "gl":
        mode = "gl-doubled"
    elif m.parity != "gl" and n.parity != "gl" and _SIGN[m.parity] != _SIGN[n.parity]:
        mode = "bilinear"
    else:
        raise ParityError("need two gl parameters or opposite classical parities")
    w = check_relevant(m, n)
    if not w:
        return w
    maps = []
    kernel = []
    for lab, lw in w.labels:
        size = len(lw.mplus)
        for i in range(size):
            plus, minus = lw.mplus[i], lw.mminus[i]
            if plus:
                for a in range(-i, i + 1, 2):
                    maps.append(GradedMap(lab, i, "+", a, i + 1, a + 1, plus))
            if minus:
                for a in range(-i, i - 1, 2):
                    maps.append(GradedMap(lab, i, "-", a, i - 1, a + 1, minus))
                kernel.append(KernelPiece(lab, i, i, minus))
    zero = m.is_tempered() and n.is_tempered()
    return CorrelatorWitness(mode, tuple(maps), tuple(kernel), zero)


# ---------------------------------------------------------------------------
# Search of the diagonal-restriction class


def _inverse_cg(dims: tuple[int, ...], cap: list[int]) -> set[tuple[tuple[int, int], ...]]:
    """All multisets of (d, a) pairs whose Clebsch-Gordan dimensions tile ``dims``."""
    if not dims:
        return {()}
    cap[0] -= 1
    if cap[0] < 0:
        raise BudgetError("diagonal-class search budget exceeded")
    top = dims[0]
    rest = list(dims)
    out = set()
    for d in range(1, top + 1):
        a = top + 1 - d
        need = clebsch_gordan(d, a)
        pool = list(rest)
        ok = True
        for x in need:
            if x in pool:
                pool.remove(x)
            else:
                ok = False
                break
        if not ok:
            continue
        for tail in _inverse_cg(tuple(sorted(pool, reverse=True)), cap):
            out.add(tuple(sorted(((d, a),) + tail)))
    return out


def delta_class_search(m: AParam, bound: int = 100_000) -> list[AParam]:
    """Parameters of the same parity and dimension with the same diagonal image.

    Works by tiling each symbol's diagonal-restriction dimensions by inverse
    Clebsch-Gordan pairs; parity-violating regroupings are discarded.  The
    input parameter is always part of its own class.
    """
    if m.parity != "gl" and not m.is_discrete():
        raise NotDiscreteError("diagonal-class search expects a discrete parameter")
    image = delta_map(m)
    per_symbol: dict[WeilSymbol, list[int]] = {}
    for t in image.terms:
        per_symbol.setdefault(t.weil, []).extend([t.d_dim] * t.mult)
    cap = [bound]
    sym_choices = []
    for sym in sorted(per_symbol, key=lambda s: s.id):
        dims = tuple(sorted(per_symbol[sym], reverse=True))
        tilings = _inverse_cg(dims, cap)
        sym_choices.append((sym, sorted(tilings)))
    results = set()
    def build(idx: int, acc: list[ATerm]):
        if len(results) > bound:
            raise BudgetError("diagonal-class search budget exceeded")
        if idx == len(sym_choices):
            cand = AParam(list(acc), m.parity)
            if m.parity == "gl" or not any(
                not _matches(t) for t in cand.terms
            ):
                results.add(cand)
            return
        sym, tilings = sym_choices[idx]
        for tiling in tilings:
            terms = [ATerm(sym, d, a, 1) for (d, a) in tiling]
            build(idx + 1, acc + terms)

    def _matches(t: ATerm) -> bool:
        sign, conj = composite_sign(t.weil, t.d_dim, t.a_dim)
        if sign is None:
            return False
        return (
            sign == _SIGN[m.parity]
            and conj == (m.parity in ("conjugate-orthogonal", "conjugate-symplectic"))
        )

    build(0, [])
    assert m in results
    return sorted(results, key=lambda p: tuple(t.sort_key() for t in p.terms))
