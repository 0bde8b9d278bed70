"""Four-slot boundary-vector identities on truncated Fock spaces.

Operators on F_{q^2} (x) F_q (x) F_{q^2} (x) F_q are sums of elementary
tensor words in the boson letters.  Every letter word is a monomial
matrix on a truncated Fock space, so operator identities are decided
exactly on the sub-box of modes whose images provably stay below the
cutoff; the margin bookkeeping turns truncation into exact statements.
The coproduct images delta/delta_op expand through two 4x4 letter
matrices, and the boundary annihilation checks reduce each four-slot
difference operator to a quadratic word in the t entries via a fixed
operator dictionary before applying it to the product boundary vector.
"""

from __future__ import annotations

from .field import ONE, ZERO, Params, Scalar, _coerce
from .poch import poch
from .report import Report
from .spinrep import RangeError


class TruncationMarginError(ArithmeticError):
    """The cutoff is too small to certify the requested comparison."""


class DerivationGap(ValueError):
    """A boundary word has no expansion through the operator dictionary."""


_LETTERS = {"q": ("a+", "a-", "k"), "q2": ("A+", "A-", "K")}
_SLOT_BASES = ("q2", "q", "q2", "q")


def _letter_action(letter: str, m: int, base: str, params: Params):
    """Image of |m> under one letter, as (mode, coefficient)."""
    if letter not in _LETTERS[base]:
        raise RangeError(f"letter {letter!r} is not a base-{base} operator")
    q = params.q
    if letter in ("a+", "A+"):
        return m + 1, ONE
    if letter == "a-":
        return m - 1, ONE - q ** (2 * m)
    if letter == "A-":
        return m - 1, ONE - q ** (4 * m)
    if letter == "k":
        return m, q ** m
    return m, q ** (2 * m)


def _word_value(word, m: int, base: str, params: Params, cutoff=None):
    """Apply a letter word (rightmost letter first) to |m>.

    Returns (mode, coefficient); a lowering letter at mode 0 kills the
    coefficient.  With a cutoff, escaping above it is an error.
    """
    coeff = ONE
    for letter in reversed(word):
        m, c = _letter_action(letter, m, base, params)
        coeff = coeff * c
        if coeff.is_zero():
            return m, ZERO
        if cutoff is not None and m > cutoff:
            raise TruncationMarginError(f"mode {m} escaped the cutoff {cutoff}")
    return m, coeff


def _word_on_vector(word, vec, base: str, params: Params, cutoff: int):
    """Dense image of a coefficient vector; components above cutoff drop."""
    out = [ZERO] * (cutoff + 1)
    for m, x in enumerate(vec):
        if x.is_zero():
            continue
        mode, coeff = _word_value(word, m, base, params)
        if 0 <= mode <= cutoff and not coeff.is_zero():
            out[mode] = out[mode] + coeff * x
    return out


def _word_raise(word) -> int:
    return sum(1 for letter in word if letter.endswith("+"))


def _word_shift(word) -> int:
    return _word_raise(word) - sum(1 for letter in word if letter.endswith("-"))


class TruncatedFock:
    """Fock space cut at a mode cutoff, in base q (a+, a-, k) or q2 (A+, A-, K)."""

    __slots__ = ("cutoff", "base")

    def __init__(self, cutoff: int, base: str) -> None:
        if cutoff < 0:
            raise RangeError(f"cutoff must be nonnegative, got {cutoff}")
        if base not in ("q", "q2"):
            raise RangeError(f"base must be 'q' or 'q2', got {base!r}")
        self.cutoff = cutoff
        self.base = base

    def letters(self):
        return _LETTERS[self.base]

    def apply_letter(self, letter: str, m: int, params: Params):
        if not (0 <= m <= self.cutoff):
            raise RangeError(f"mode {m} outside 0..{self.cutoff}")
        return _letter_action(letter, m, self.base, params)

    def boundary_vector(self, kind: int, params: Params):
        """Coefficient tuple of the weight-kind boundary series up to the cutoff.

        Mode kind*m carries 1/(b; b)_m with b the kind^2 power of the base
        deformation parameter; all other modes vanish.
        """
        if kind not in (1, 2):
            raise RangeError(f"boundary kind must be 1 or 2, got {kind}")
        q = params.q
        b = q ** (kind * kind) if self.base == "q" else q ** (2 * kind * kind)
        comps = [ZERO] * (self.cutoff + 1)
        for m in range(self.cutoff // kind + 1):
            comps[kind * m] = poch(b, b, m).inverse()
        return tuple(comps)

    def __repr__(self) -> str:
        return f"TruncatedFock(cutoff={self.cutoff}, base={self.base!r})"


def pi_matrix(which: int, i: int, j: int, params: Params):
    """Entry (i, j) of one of the two 4x4 letter matrices, as (coeff, word)."""
    if which not in (1, 2):
        raise RangeError(f"matrix label must be 1 or 2, got {which}")
    if not (1 <= i <= 4 and 1 <= j <= 4):
        raise RangeError(f"matrix indices must lie in 1..4, got ({i}, {j})")
    q = params.q
    if which == 1:
        table = {
            (1, 1): (ONE, ("a-",)),
            (1, 2): (ONE, ("k",)),
            (2, 1): (-q, ("k",)),
            (2, 2): (ONE, ("a+",)),
            (3, 3): (ONE, ("a-",)),
            (3, 4): (-ONE, ("k",)),
            (4, 3): (q, ("k",)),
            (4, 4): (ONE, ("a+",)),
        }
    else:
        table = {
            (1, 1): (ONE, ()),
            (2, 2): (ONE, ("A-",)),
            (2, 3): (ONE, ("K",)),
            (3, 2): (-(q * q), ("K",)),
            (3, 3): (ONE, ("A+",)),
            (4, 4): (ONE, ()),
        }
    return table.get((i, j), (ZERO, ()))


class TensorOp4:
    """Operator on the four-slot product space, as a sum of tensor words.

    Each term is (coefficient, four letter words); slot bases alternate
    q2, q, q2, q.  Words are monomial matrices, so the raising count per
    slot bounds how far any image can climb.
    """

    __slots__ = ("terms",)

    def __init__(self, terms) -> None:
        self.terms = tuple((c, w) for c, w in terms)

    @classmethod
    def word(cls, words, coeff: Scalar = ONE) -> "TensorOp4":
        if len(words) != 4:
            raise RangeError(f"need 4 slot words, got {len(words)}")
        tup = tuple(tuple(w) for w in words)
        for slot, w in enumerate(tup):
            allowed = _LETTERS[_SLOT_BASES[slot]]
            for letter in w:
                if letter not in allowed:
                    raise RangeError(f"letter {letter!r} invalid in slot {slot + 1}")
        return cls(((coeff, tup),))

    def __add__(self, other: "TensorOp4") -> "TensorOp4":
        return TensorOp4(self.terms + other.terms)

    def __sub__(self, other: "TensorOp4") -> "TensorOp4":
        return TensorOp4(self.terms + tuple((-c, w) for c, w in other.terms))

    def __mul__(self, other: "TensorOp4") -> "TensorOp4":
        out = []
        for c1, w1 in self.terms:
            for c2, w2 in other.terms:
                out.append((c1 * c2, tuple(w1[i] + w2[i] for i in range(4))))
        return TensorOp4(out)

    def scale(self, c) -> "TensorOp4":
        c = _coerce(c)
        return TensorOp4(tuple((c * v, w) for v, w in self.terms))

    def simplified(self) -> "TensorOp4":
        merged: dict = {}
        for c, w in self.terms:
            cur = merged.get(w)
            merged[w] = c if cur is None else cur + c
        return TensorOp4(tuple((c, w) for w, c in merged.items() if not c.is_zero()))

    def raise_budget(self):
        """Per-slot maximum raising count over all terms."""
        budget = [0, 0, 0, 0]
        for _, words in self.terms:
            for i, w in enumerate(words):
                r = _word_raise(w)
                if r > budget[i]:
                    budget[i] = r
        return tuple(budget)

    def apply_basis(self, modes, params: Params, cutoff: int):
        """Image of the basis vector |m1..m4>, as {target modes: coefficient}."""
        out: dict = {}
        for coeff, words in self.terms:
            val = coeff
            tgt = []
            for i in range(4):
                mode, c = _word_value(words[i], modes[i], _SLOT_BASES[i], params, cutoff)
                val = val * c
                if val.is_zero():
                    break
                tgt.append(mode)
            else:
                key = tuple(tgt)
                cur = out.get(key)
                new = val if cur is None else cur + val
                if new.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = new
        return out

    def __repr__(self) -> str:
        return f"TensorOp4({len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# coproduct images


def _delta_t(i: int, j: int, params: Params, opp: bool) -> TensorOp4:
    terms = []
    for k in range(1, 5):
        for l in range(1, 5):
            for m in range(1, 5):
                if opp:
                    slots = ((2, m, j), (1, l, m), (2, k, l), (1, i, k))
                else:
                    slots = ((2, i, k), (1, k, l), (2, l, m), (1, m, j))
                coeff = ONE
                words = []
                for which, a, b in slots:
                    c, w = pi_matrix(which, a, b, params)
                    if c.is_zero():
                        break
                    coeff = coeff * c
                    words.append(w)
                else:
                    terms.append((coeff, tuple(words)))
    return TensorOp4(terms)


def _expand(poly, params: Params, opp: bool) -> TensorOp4:
    total = TensorOp4(())
    cache: dict = {}
    for coeff, factors in poly:
        cur = None
        for ij in factors:
            key = tuple(ij)
            dt = cache.get(key)
            if dt is None:
                dt = _delta_t(key[0], key[1], params, opp)
                cache[key] = dt
            cur = dt if cur is None else cur * dt
        if cur is None:
            cur = TensorOp4.word(((), (), (), ()))
        total = total + cur.scale(coeff)
    return total.simplified()


def delta(poly, params: Params) -> TensorOp4:
    """Coproduct image of a polynomial in the t entries.

    poly is an iterable of (coefficient, ((i1, j1), (i2, j2), ...)) monomials;
    the image of each t factor is the 64-term four-slot sum and the map is
    multiplicative over factors.
    """
    return _expand(poly, params, False)


def delta_op(poly, params: Params) -> TensorOp4:
    """Slot-reversed coproduct image of a polynomial in the t entries."""
    return _expand(poly, params, True)


# ---------------------------------------------------------------------------
# exact comparison on margin-safe boxes


def _pure_sum_zero(items, n: int) -> bool:
    """Whether sum of coeff * v1 (x) v2 (x) v3 (x) v4 vanishes on the n-box."""
    pairs: dict = {}
    for coeff, v1, v2, v3, v4 in items:
        key = (v3, v4)
        arr = pairs.get(key)
        if arr is None:
            arr = [[ZERO] * n for _ in range(n)]
            pairs[key] = arr
        for i1, a in enumerate(v1):
            c1 = coeff * a
            if c1.is_zero():
                continue
            row = arr[i1]
            for i2, b in enumerate(v2):
                if not b.is_zero():
                    row[i2] = row[i2] + c1 * b
    total: dict = {}
    for (v3, v4), arr in pairs.items():
        live = [(i1, i2) for i1 in range(n) for i2 in range(n)
                if not arr[i1][i2].is_zero()]
        if not live:
            continue
        for i3 in range(n):
            c = v3[i3]
            if c.is_zero():
                continue
            for i4 in range(n):
                s = c * v4[i4]
                if s.is_zero():
                    continue
                t2 = total.get((i3, i4))
                if t2 is None:
                    t2 = [[ZERO] * n for _ in range(n)]
                    total[(i3, i4)] = t2
                for i1, i2 in live:
                    t2[i1][i2] = t2[i1][i2] + arr[i1][i2] * s
    return all(v.is_zero() for t2 in total.values() for row in t2 for v in row)


def _op_vanishes(op: TensorOp4, M: int, params: Params) -> bool:
    terms = op.simplified().terms
    if not terms:
        return True
    budget = max(max(_word_raise(w) for w in words) for _, words in terms)
    margin = max(3, budget + 1)
    if M < margin:
        raise TruncationMarginError(f"cutoff {M} below margin {margin}")
    modes = range(M - margin + 1)
    n = len(modes)
    fcache: dict = {}

    def fvec(slot, word):
        key = (slot, word)
        vals = fcache.get(key)
        if vals is None:
            base = _SLOT_BASES[slot]
            vals = tuple(_word_value(word, m, base, params, M)[1] for m in modes)
            fcache[key] = vals
        return vals

    groups: dict = {}
    for coeff, words in terms:
        net = tuple(_word_shift(w) for w in words)
        groups.setdefault(net, []).append((coeff, words))
    for grp in groups.values():
        items = [(coeff, fvec(0, w[0]), fvec(1, w[1]), fvec(2, w[2]), fvec(3, w[3]))
                 for coeff, w in grp]
        if not _pure_sum_zero(items, n):
            return False
    return True


def ops_agree(a: TensorOp4, b: TensorOp4, M: int, params: Params) -> bool:
    """Exact agreement of two tensor operators on the margin-safe mode box.

    Terms with different net mode shifts cannot overlap, so the difference
    is grouped by shift and each group must cancel identically.
    """
    return _op_vanishes(a - b, M, params)


# ---------------------------------------------------------------------------
# the operator dictionary

_KK = ("k", "k")

# (lhs words, lhs name, monomials as (sign, q exponent, t factors), rhs name)
_LEMMA = (
    (((), _KK, ("K", "K"), ()), "1*kk*KK*1",
     ((1, 0, ((1, 4), (1, 4))), (-1, -3, ((4, 2), (1, 3)))),
     "t14^2 - q^-3*t42*t13"),
    (((), ("k",), ("K",), ("k",)), "1*k*K*k",
     ((-1, 0, ((1, 4),)),),
     "-t14"),
    (((), ("k",), ("K",), ("k",)), "1*k*K*k",
     ((1, -4, ((4, 1),)),),
     "q^-4*t41"),
    ((("K",), _KK, ("K",), ()), "K*kk*K*1",
     ((1, -1, ((2, 3), (1, 4))), (-1, 0, ((2, 4), (1, 3)))),
     "q^-1*t23*t14 - t24*t13"),
    (((), ("k",), ("K",), ("a+",)), "1*k*K*a+",
     ((-1, -3, ((4, 2),)),),
     "-q^-3*t42"),
    (((), ("k",), ("K",), ("a-",)), "1*k*K*a-",
     ((1, 0, ((1, 3),)),),
     "t13"),
    ((("A+",), _KK, ("K",), ()), "A+*kk*K*1",
     ((-1, -5, ((3, 3), (4, 1))), (-1, 0, ((3, 4), (1, 3)))),
     "-q^-5*t33*t41 - t34*t13"),
    ((("A-",), _KK, ("K",), ()), "A-*kk*K*1",
     ((1, 1, ((2, 2), (1, 4))), (1, -4, ((2, 1), (4, 2)))),
     "q*t22*t14 + q^-4*t21*t42"),
    (((), ("k", "a+"), ("K",), ()), "1*ka+*K*1",
     ((1, 1, ((4, 4), (1, 3))), (1, -4, ((4, 3), (4, 1)))),
     "q*t44*t13 + q^-4*t43*t41"),
    (((), ("k", "a-"), ("K",), ()), "1*ka-*K*1",
     ((-1, -3, ((4, 2), (1, 1))), (1, -4, ((4, 1), (1, 2)))),
     "-q^-3*t42*t11 + q^-4*t41*t12"),
    (((), _KK, ("K", "A+"), ()), "1*kk*KA+*1",
     ((-1, -1, ((4, 4), (4, 1))), (-1, -2, ((4, 3), (4, 2)))),
     "-q^-1*t44*t41 - q^-2*t43*t42"),
    (((), _KK, ("K", "A-"), ()), "1*kk*KA-*1",
     ((-1, -5, ((4, 1), (1, 1))), (1, -2, ((1, 2), (1, 3)))),
     "-q^-5*t41*t11 + q^-2*t12*t13"),
)

_DICT: dict = {}
for _words, _, _monos, _rstr in _LEMMA:
    _DICT.setdefault(_words, (_monos, _rstr))

# The 1*kk*K*1 word has no dictionary entry of its own.  Acting right of the
# intertwiner on the (1,1) boundary vector it can be traded for KA+ + KK in
# the third slot (the raising characterization fixes that slot), which the
# dictionary then resolves through the 1*kk*KA+*1 and 1*kk*KK*1 rows.
_X_WORDS = ((), _KK, ("K",), ())
_X_MONOS = ((-1, -1, ((4, 4), (4, 1))), (-1, -2, ((4, 3), (4, 2))),
            (1, 0, ((1, 4), (1, 4))), (-1, -3, ((4, 2), (1, 3))))
_X_STR = "-q^-1*t44*t41 - q^-2*t43*t42 + t14^2 - q^-3*t42*t13"


def _poly(monos, params: Params):
    q = params.q
    out = []
    for s, e, factors in monos:
        val = q ** e
        out.append((val if s > 0 else -val, factors))
    return out


def check_lemma_identities(params: Params, M: int) -> Report:
    """Verify the 12 dictionary rows as exact operator identities.

    Both sides climb at most 2 modes per slot, so the comparison runs on
    all basis vectors with every mode at most M - 3.
    """
    if M < 6:
        raise TruncationMarginError(f"need cutoff >= 6, got {M}")
    rep = Report(f"operator dictionary at cutoff {M}")
    for lhs_words, lhs_name, monos, rhs_str in _LEMMA:
        lhs = TensorOp4.word(lhs_words)
        rhs = delta(_poly(monos, params), params)
        ok = ops_agree(lhs, rhs, M, params)
        rep.add(f"{lhs_name} == delta({rhs_str})", ok, f"modes <= {M - 3}")
    return rep


# ---------------------------------------------------------------------------
# boundary vectors and annihilation


class XiVector:
    """Truncated product boundary vector: chi_r, eta_k, chi_r, eta_k."""

    __slots__ = ("r", "k", "cutoff", "factors")

    def __init__(self, r: int, k: int, cutoff: int, params: Params) -> None:
        if (r, k) not in ((1, 1), (1, 2), (2, 2)):
            raise RangeError(f"boundary labels must be (1,1), (1,2) or (2,2), got ({r}, {k})")
        self.r = r
        self.k = k
        self.cutoff = cutoff
        chi = TruncatedFock(cutoff, "q2").boundary_vector(r, params)
        eta = TruncatedFock(cutoff, "q").boundary_vector(k, params)
        self.factors = (chi, eta, chi, eta)

    def component(self, modes) -> Scalar:
        val = ONE
        for i in range(4):
            val = val * self.factors[i][modes[i]]
        return val

    def __repr__(self) -> str:
        return f"XiVector(r={self.r}, k={self.k}, cutoff={self.cutoff})"


def _words_str(words) -> str:
    return "*".join("".join(w) if w else "1" for w in words)


def _boundary_ops(r: int, k: int, params: Params):
    """The four difference operators annihilating the (r, k) boundary vector."""
    q = params.q
    slot1 = [(ONE, "1", ("A+",)), (-ONE, "-1", ("A-",))]
    slot3 = [(ONE, "1", ("K", "A+")), (-ONE, "-1", ("K", "A-"))]
    slot2 = [(ONE, "1", ("k", "a+")), (-ONE, "-1", ("k", "a-"))]
    slot4 = [(ONE, "1", ("a+",)), (-ONE, "-1", ("a-",))]
    if r == 1:
        slot1.append((ONE + q * q, "1+q^2", ("K",)))
        slot3.append((ONE + q * q, "1+q^2", ("K", "K")))
        big = "(A+ - A- + (1+q^2)*K)"
    else:
        big = "(A+ - A-)"
    if k == 1:
        slot2.append((ONE + q, "1+q", ("k", "k")))
        slot4.append((ONE + q, "1+q", ("k",)))
        small = "(a+ - a- + (1+q)*k)"
    else:
        small = "(a+ - a-)"
    return (
        (f"{big}*kk*K*1",
         [(c, s, (w, _KK, ("K",), ())) for c, s, w in slot1]),
        (f"1*k{small}*K*1",
         [(c, s, ((), w, ("K",), ())) for c, s, w in slot2]),
        (f"1*kk*K{big}*1",
         [(c, s, ((), _KK, w, ())) for c, s, w in slot3]),
        (f"1*k*K*{small}",
         [(c, s, ((), ("k",), ("K",), w)) for c, s, w in slot4]),
    )


def _derive_terms(terms, params: Params, allow_indirect: bool):
    """Resolve a boundary operator through the dictionary to a t polynomial."""
    poly = []
    parts = []
    indirect = False
    for coeff, cstr, words in terms:
        entry = _DICT.get(words)
        if entry is None:
            if allow_indirect and words == _X_WORDS:
                entry = (_X_MONOS, _X_STR)
                indirect = True
            else:
                raise DerivationGap(f"no dictionary entry for {_words_str(words)}")
        monos, rstr = entry
        for cm, factors in _poly(monos, params):
            poly.append((coeff * cm, factors))
        parts.append(f"({cstr})*[{rstr}]")
    return poly, " + ".join(parts), indirect


def _kills_vector(op: TensorOp4, xi: XiVector, bound: int, params: Params) -> bool:
    cutoff = xi.cutoff
    items = []
    for coeff, words in op.simplified().terms:
        vecs = []
        for i in range(4):
            full = _word_on_vector(words[i], xi.factors[i], _SLOT_BASES[i], params, cutoff)
            vecs.append(tuple(full[: bound + 1]))
        items.append((coeff, vecs[0], vecs[1], vecs[2], vecs[3]))
    return _pure_sum_zero(items, bound + 1)


def _slot_terms_on_vector(terms, vec, base: str, params: Params, cutoff: int):
    out = [ZERO] * (cutoff + 1)
    for coeff, word in terms:
        img = _word_on_vector(word, vec, base, params, cutoff)
        for m in range(cutoff + 1):
            if not img[m].is_zero():
                out[m] = out[m] + coeff * img[m]
    return out


def _characterization_checks(params: Params, M: int):
    """Componentwise identities pinning the four boundary series."""
    q = params.q
    fq = TruncatedFock(M, "q")
    fq2 = TruncatedFock(M, "q2")
    eta1 = fq.boundary_vector(1, params)
    eta2 = fq.boundary_vector(2, params)
    chi1 = fq2.boundary_vector(1, params)
    chi2 = fq2.boundary_vector(2, params)
    rows = (
        ("(a+ - 1 + k) annihilates eta1", "q", eta1,
         ((ONE, ("a+",)), (-ONE, ()), (ONE, ("k",)))),
        ("(A+ - 1 + K) annihilates chi1", "q2", chi1,
         ((ONE, ("A+",)), (-ONE, ()), (ONE, ("K",)))),
        ("(a- - 1 - q*k) annihilates eta1", "q", eta1,
         ((ONE, ("a-",)), (-ONE, ()), (-q, ("k",)))),
        ("(A- - 1 - q^2*K) annihilates chi1", "q2", chi1,
         ((ONE, ("A-",)), (-ONE, ()), (-(q * q), ("K",)))),
        ("(a+ - a- + (1+q)*k) annihilates eta1", "q", eta1,
         ((ONE, ("a+",)), (-ONE, ("a-",)), (ONE + q, ("k",)))),
        ("(A+ - A- + (1+q^2)*K) annihilates chi1", "q2", chi1,
         ((ONE, ("A+",)), (-ONE, ("A-",)), (ONE + q * q, ("K",)))),
        ("(a+ - a-) annihilates eta2", "q", eta2,
         ((ONE, ("a+",)), (-ONE, ("a-",)))),
        ("(A+ - A-) annihilates chi2", "q2", chi2,
         ((ONE, ("A+",)), (-ONE, ("A-",)))),
    )
    out = []
    for name, base, vec, terms in rows:
        lower = max(sum(1 for letter in w if letter.endswith("-")) for _, w in terms)
        bound = M - lower
        img = _slot_terms_on_vector(terms, vec, base, params, M)
        ok = all(img[m].is_zero() for m in range(bound + 1))
        out.append((name, ok, f"components <= {bound}"))
    # lowering images restated as vector matches, not annihilation
    lhs = _slot_terms_on_vector(((ONE, ("a-",)),), eta1, "q", params, M)
    rhs = _slot_terms_on_vector(((ONE, ()), (q, ("k",))), eta1, "q", params, M)
    out.append(("a- on eta1 matches (1 + q*k) on eta1",
                all(lhs[m] == rhs[m] for m in range(M)), f"components <= {M - 1}"))
    lhs = _slot_terms_on_vector(((ONE, ("a-",)),), eta2, "q", params, M)
    rhs = _slot_terms_on_vector(((ONE, ("a+",)),), eta2, "q", params, M)
    out.append(("a- on eta2 matches a+ on eta2",
                all(lhs[m] == rhs[m] for m in range(M)), f"components <= {M - 1}"))
    return out


def check_annihilation(r: int, k: int, params: Params, M: int) -> Report:
    """Verify the four boundary annihilation identities for one (r, k) label.

    Each difference operator resolves through the dictionary to a t
    polynomial T; the slot-reversed image of T must kill the product
    boundary vector on all components with modes at most M - 3.  The
    characterization identities for the single-slot series are appended.
    """
    if (r, k) not in ((1, 1), (1, 2), (2, 2)):
        raise RangeError(f"boundary labels must be (1,1), (1,2) or (2,2), got ({r}, {k})")
    if M < 10:
        raise TruncationMarginError(f"need cutoff >= 10, got {M}")
    bound = M - 3
    rep = Report(f"boundary annihilation ({r},{k}) at cutoff {M}")
    xi = XiVector(r, k, M, params)
    allow_indirect = r == 1 and k == 1
    for name, terms in _boundary_ops(r, k, params):
        poly, tstr, indirect = _derive_terms(terms, params, allow_indirect)
        dop = delta_op(poly, params)
        ok = _kills_vector(dop, xi, bound, params)
        note = "indirect entry for 1*kk*K*1; " if indirect else ""
        rep.add(f"{name} annihilates Xi({r},{k})",
                ok, f"{note}T = {tstr}; components <= {bound}")
    for cname, ok, detail in _characterization_checks(params, M):
        rep.add(cname, ok, detail)
    return rep
