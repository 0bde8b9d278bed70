"""q-boson algebra: normal ordering, traces, and boundary-vector contractions.

Words live in the algebra with generators ap, am, k subject to
    am ap = 1 - q^2 k^2,   ap am = 1 - k^2,   k ap = q ap k,   k am = q^{-1} am k.
A NormalForm stores a word as  X^h * sum c_{imj} ap^i k^m am^j  where X^h is a
diagonal spectral marker (z^h acts on the Fock state |v> as z^v) kept at the
far left.  Closed-form traces and boundary contractions evaluate such words
exactly; a summed-series oracle with certified rational tail bounds provides
an independent cross-check.
"""

from __future__ import annotations

from fractions import Fraction

from .field import ONE, ZERO, Params, PoleError, Scalar
from .poch import PochLedger, poch, qbinom


class TailBoundError(ArithmeticError):
    """The oracle could not certify its tail below the requested bound."""


class NormalForm:
    """Normally ordered word: marker argument xarg and {(i, m, j): coeff} terms."""

    __slots__ = ("terms", "xarg")

    def __init__(self, terms, xarg: Scalar = ONE):
        self.terms = terms
        self.xarg = xarg

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items()))
        return f"NormalForm(xarg={self.xarg}, {{{inner}}})"


def _put(terms, key, val):
    cur = terms.get(key)
    new = val if cur is None else cur + val
    if new.is_zero():
        terms.pop(key, None)
    else:
        terms[key] = new


class QBosonEngine:
    """Normal-ordering engine bound to one parameter bundle."""

    def __init__(self, params: Params):
        self.params = params
        self.q = params.q
        self._amap_memo = {}
        self._tracepoly_memo = {}

    def one(self) -> NormalForm:
        return NormalForm({(0, 0, 0): ONE})

    def term(self, i: int, m: int, j: int, coeff: Scalar = ONE) -> NormalForm:
        if coeff.is_zero():
            return NormalForm({})
        return NormalForm({(i, m, j): coeff})

    def ap(self) -> NormalForm:
        return self.term(1, 0, 0)

    def am(self) -> NormalForm:
        return self.term(0, 0, 1)

    def kdiag(self) -> NormalForm:
        return self.term(0, 1, 0)

    def marker(self, zarg: Scalar) -> NormalForm:
        return NormalForm({(0, 0, 0): ONE}, zarg)

    def scale(self, nf: NormalForm, c: Scalar) -> NormalForm:
        if c.is_zero():
            return NormalForm({}, nf.xarg)
        return NormalForm({k: v * c for k, v in nf.terms.items()}, nf.xarg)

    def add(self, a: NormalForm, b: NormalForm) -> NormalForm:
        if a.xarg != b.xarg:
            raise ValueError("cannot add words with different markers")
        terms = dict(a.terms)
        for k, v in b.terms.items():
            _put(terms, k, v)
        return NormalForm(terms, a.xarg)

    def amap(self, j: int, i: int) -> dict:
        """Normal ordering of am^j ap^i as {(i', m', j'): coeff}."""
        key = (j, i)
        memo = self._amap_memo
        if key in memo:
            return memo[key]
        if j == 0:
            out = {(i, 0, 0): ONE}
        elif i == 0:
            out = {(0, 0, j): ONE}
        else:
            prev = self.amap(j - 1, i - 1)
            out = dict(prev)
            fac = self.q ** (2 * i)
            for (a, b, c), coeff in prev.items():
                _put(out, (a, b + 2, c), -fac * (self.q ** (2 * c)) * coeff)
        memo[key] = out
        return out

    def mul(self, x: NormalForm, y: NormalForm) -> NormalForm:
        terms: dict = {}
        x2 = y.xarg
        for (i1, m1, j1), c1 in x.terms.items():
            # y's marker passes left through x: each am costs x2, each ap costs 1/x2
            cbase = c1 * (x2 ** (j1 - i1)) if x2 != ONE else c1
            for (i2, m2, j2), c2 in y.terms.items():
                cc = cbase * c2
                for (a, b, c), w in self.amap(j1, i2).items():
                    val = cc * w * (self.q ** (m1 * a + c * m2))
                    _put(terms, (i1 + a, m1 + b + m2, c + j2), val)
        return NormalForm(terms, x.xarg * y.xarg)

    def mulseq(self, factors) -> NormalForm:
        out = None
        for f in factors:
            out = f if out is None else self.mul(out, f)
        return self.one() if out is None else out

    def _tracepoly(self, j: int):
        """Coefficients of prod_{l=1}^{j} (1 - q^{2l} x) in x."""
        memo = self._tracepoly_memo
        if j in memo:
            return memo[j]
        coeffs = [ONE]
        for l in range(1, j + 1):
            f = self.q ** (2 * l)
            nxt = [ZERO] * (len(coeffs) + 1)
            for d, cd in enumerate(coeffs):
                nxt[d] = nxt[d] + cd
                nxt[d + 1] = nxt[d + 1] - f * cd
            coeffs = nxt
        memo[j] = coeffs
        return coeffs

    def trace(self, nf: NormalForm) -> Scalar:
        """Fock-space trace of X^h * word, as an exact rational function value."""
        zarg = nf.xarg
        total = ZERO
        for (i, m, j), c in nf.terms.items():
            if i != j:
                continue
            zj = zarg ** j
            for d, cd in enumerate(self._tracepoly(j)):
                den = ONE - zarg * (self.q ** (m + 2 * d))
                total = total + c * cd * zj * den.inverse()
        return total


def eliminate_annihilators(engine: QBosonEngine, nf: NormalForm, ket: int) -> NormalForm:
    """Rewrite am factors against the boundary ket eta_1 or eta_2.

    eta_1:  am |eta_1> = (1 + q k)|eta_1>
    eta_2:  am |eta_2> = ap |eta_2>
    """
    if ket not in (1, 2):
        raise ValueError("ket must be 1 or 2")
    q = engine.q
    done: dict = {}
    work = dict(nf.terms)
    while work:
        (i, m, j), c = work.popitem()
        if j == 0:
            _put(done, (i, m, 0), c)
        elif ket == 1:
            _put(work, (i, m, j - 1), c)
            _put(work, (i, m + 1, j - 1), c * (q ** j))
        elif j >= 2:
            _put(work, (i, m, j - 2), c)
            _put(work, (i, m + 2, j - 2), -c * (q ** (2 * j - 2)))
        else:
            _put(work, (i + 1, m, 0), c * (q ** m))
    return NormalForm(done, nf.xarg)


def _base_11(engine, zarg, j, m):
    q = engine.q
    num = (zarg ** j) * poch(-q, q, j) * poch(zarg, q, m)
    den = poch(-q * zarg, q, j + m)
    if den.is_zero():
        raise PoleError("boundary contraction pole")
    return num / den


def _ratio_q2(engine, zarg, m):
    # (z^2; q^2)_m / (-q z^2; q^2)_m
    q2 = engine.q ** 2
    z2 = zarg ** 2
    den = poch(-engine.q * z2, q2, m)
    if den.is_zero():
        raise PoleError("boundary contraction pole")
    return poch(z2, q2, m) / den


def _base_bra1_ket2(engine, zarg, j, m):
    q = engine.q
    out = ZERO
    for i in range(j + 1):
        out = out + (q ** (i * (i + 1) // 2)) * qbinom(j, i, q) * _ratio_q2(engine, zarg, i + m)
    return (zarg ** j) * out


def _base_bra2_ket1(engine, zarg, j, m):
    q = engine.q
    out = ZERO
    for i in range(j + 1):
        sign = ONE if i % 2 == 0 else -ONE
        out = out + sign * (q ** (i * (i + 1) // 2 - i * j)) * qbinom(j, i, q) * _ratio_q2(engine, zarg, m + i)
    return (q ** (-j * m)) * out


def _base_22(engine, zarg, j, m):
    if j % 2:
        return ZERO
    t = engine.params.t
    led = PochLedger(t, zarg)
    led.mul((zarg ** j) * poch(engine.q ** 2, engine.q ** 4, j // 2))
    # word part (q^{2j+2m+2} z^2; q^4)_inf / (q^{2m} z^2; q^4)_inf, all in base t^8
    led.add_tail(1, 1, 4 * (j + m) + 4, 2, 1, 8)
    led.add_tail(-1, 1, 4 * m, 2, 1, 8)
    # normalizer (q^2 z^2;q^4)_inf/(z^2;q^4)_inf: divide for even m, multiply for odd
    s = -1 if m % 2 == 0 else 1
    led.add_tail(s, 1, 4, 2, 1, 8)
    led.add_tail(-s, 1, 0, 2, 1, 8)
    return led.reduce()


def boundary_contract(engine: QBosonEngine, nf: NormalForm, bra: int, ket: int) -> Scalar:
    """Normalized contraction <eta_bra| X^h word |eta_ket> / <eta_bra| X^h |eta_ket>.

    For the (2, 2) pair with odd weight the plain normalizer sits in the wrong
    product tower; there the convention multiplies by it instead.
    """
    if bra not in (1, 2) or ket not in (1, 2):
        raise ValueError("boundary labels must be 1 or 2")
    flat = eliminate_annihilators(engine, nf, ket)
    zarg = nf.xarg
    total = ZERO
    for (i, m, j), c in flat.terms.items():
        if bra == 1 and ket == 1:
            base = _base_11(engine, zarg, i, m)
        elif bra == 1:
            base = _base_bra1_ket2(engine, zarg, i, m)
        elif ket == 1:
            base = _base_bra2_ket1(engine, zarg, i, m)
        else:
            base = _base_22(engine, zarg, i, m)
        total = total + c * base
    return total


# --- summed-series oracle -------------------------------------------------

def _pb_lower(x: Fraction, terms: int = 25) -> Fraction:
    """Certified rational lower bound for prod_{l>=1} (1 - x^l), 0 < x < 1."""
    head = Fraction(1)
    xl = Fraction(1)
    for _ in range(terms):
        xl *= x
        head *= 1 - xl
    rest = 1 - xl * x / (1 - x)
    if rest <= 0:
        raise TailBoundError("tail estimate needs a smaller |q|")
    return head * rest


def _eta_ket_component(kind: int, v: int, q: Fraction) -> Fraction:
    if v % kind:
        return Fraction(0)
    base = q ** (kind * kind)
    out = Fraction(1)
    cur = base
    for _ in range(v // kind):
        out *= 1 - cur
        cur *= base
    return 1 / out


def _eta_bra_component(kind: int, v: int, q: Fraction) -> Fraction:
    if v % kind:
        return Fraction(0)
    out = _eta_ket_component(kind, v, q)
    q2 = q * q
    cur = q2
    for _ in range(v):
        out *= 1 - cur
        cur *= q2
    return out


def _real(x: Scalar, what: str) -> Fraction:
    if not x.is_real():
        raise TailBoundError(f"oracle needs real {what}")
    return x.re


def boundary_contract_oracle(params: Params, nf: NormalForm, bra: int, ket: int,
                             target: Fraction = Fraction(1, 10 ** 25)):
    """Independent contraction value by truncated summation over Fock states.

    Returns (value, bound) with |value - exact| <= bound certified, bound <= target.
    Requires real parameters with 0 < t^2 < 1 and 0 < xarg < 1.
    """
    t = _real(params.t, "t")
    zq = _real(nf.xarg, "marker argument")
    if not (0 < abs(t) < 1) or not (0 < zq < 1):
        raise TailBoundError("oracle needs 0 < |t| < 1 and 0 < z < 1")
    q = -t * t
    absq = t * t
    pb = _pb_lower(absq)
    terms = [(i, m, j, _real(c, "coefficient")) for (i, m, j), c in nf.terms.items()]
    if any(m < 0 for _, m, _, _ in terms):
        raise TailBoundError("oracle handles nonnegative k powers only")
    parity = None
    if bra == 2 and ket == 2:
        pars = {(i + m + j) % 2 for i, m, j, _ in terms}
        if len(pars) > 1:
            raise TailBoundError("mixed weight parity in a (2,2) contraction")
        parity = pars.pop() if pars else 0

    def word_sum(wterms, cutoff):
        total = Fraction(0)
        for i, m, j, c in wterms:
            # exact matrix elements: z^h ap^i k^m am^j acting on |v>
            for v in range(j, cutoff + 1):
                av = _eta_ket_component(ket, v, q)
                if av == 0:
                    continue
                w = v - j + i
                bw = _eta_bra_component(bra, w, q)
                if bw == 0:
                    continue
                prod = Fraction(1)
                for l in range(j):
                    prod *= 1 - q ** (2 * (v - l))
                total += c * av * bw * (zq ** w) * (q ** (m * (v - j))) * prod
        return total

    def word_tail(wterms, cutoff):
        tail = Fraction(0)
        geo = (zq ** (cutoff + 1)) / (1 - zq)
        for i, m, j, c in wterms:
            tail += abs(c) * (2 ** j) * (Fraction(zq) ** (i - j)) / (pb * pb) * geo
        return tail

    unit = [(0, 0, 0, Fraction(1))]
    cutoff = 64
    while True:
        nhat = word_sum(terms, cutoff)
        dhat = word_sum(unit, cutoff)
        en = word_tail(terms, cutoff)
        ed = word_tail(unit, cutoff)
        if parity == 1:
            value = nhat * dhat
            bound = en * abs(dhat) + abs(nhat) * ed + en * ed
        else:
            lb_dhat = 2 * dhat * dhat / (1 + dhat * dhat)  # rational lower bound for |dhat|
            lbd = lb_dhat - ed
            if lbd <= 0:
                bound = None
            else:
                value = nhat / dhat
                bound = (en * abs(dhat) + abs(nhat) * ed) / (lbd * abs(dhat))
        if bound is not None and bound <= target:
            return value, bound
        cutoff *= 2
        if cutoff > 20000:
            raise TailBoundError("oracle cutoff limit reached before certification")
