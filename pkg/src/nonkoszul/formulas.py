"""Closed-form layer: relation-degree formulas, top socle degrees, diagonal
F-thresholds, and weak Lefschetz verdicts.

Every function here computes from arithmetic on the degree tuple alone; the
rank computations live in `oracle` and stay strictly separate so the two
routes can be pitted against each other on verification grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .modp import check_prime, largest_power_leq, q_split
from .oracle import EResult, e_degree_oracle


class NotApplicableError(Exception):
    """A closed formula declined the input; carries the failing flags and,
    when the base-formula range still holds, the minimum-function value."""

    def __init__(self, failing, min_value=None, report=None):
        self.failing = tuple(failing)
        self.min_value = min_value
        self.report = report
        super().__init__("formula not applicable: " + ", ".join(self.failing))


def _check_degrees(d) -> tuple[int, ...]:
    d = tuple(int(x) for x in d)
    if not d:
        raise ValueError("empty degree tuple")
    if any(x < 1 for x in d):
        raise ValueError(f"degrees must be positive, got {d}")
    return d


def condition_char0(d) -> bool:
    """The characteristic-zero hypothesis: no d_i exceeds the sum of the
    co-degrees, d_i <= sum_{j != i} (d_j - 1)."""
    d = _check_degrees(d)
    n = len(d) - 1
    total = sum(d)
    return all(2 * di <= total - n for di in d)


def e0_formula(d) -> int:
    """Relation degree in characteristic zero, ceil((sum d - n + 1)/2)."""
    d = _check_degrees(d)
    if not condition_char0(d):
        raise NotApplicableError(("char0_condition",))
    n = len(d) - 1
    return (sum(d) - n + 2) // 2


def ep_base(p: int, kappa) -> int:
    """Base-case value for tuples with every entry in [1, p]:
    max over the entries and min(ceil((sum - n + 1)/2), p)."""
    check_prime(p)
    kappa = _check_degrees(kappa)
    if any(x > p for x in kappa):
        raise ValueError(f"base formula needs entries <= p = {p}, got {kappa}")
    n = len(kappa) - 1
    return max(max(kappa), min((sum(kappa) - n + 2) // 2, p))


@dataclass(frozen=True)
class ApplicabilityReport:
    """Which closed-form routes accept the tuple, with the base-q split that
    the main route would use (q = largest power of p not exceeding min d)."""

    p: int
    d: tuple[int, ...]
    q: int
    e: int
    k: tuple[int, ...]
    r: tuple[int, ...]
    char0_condition: bool
    main_thm_k_range: bool
    main_thm_condition5: bool
    same_q_for_all: bool

    @property
    def main_applicable(self) -> bool:
        return (self.same_q_for_all and self.main_thm_k_range
                and self.main_thm_condition5)

    def failing_main_flags(self) -> tuple[str, ...]:
        out = []
        if not self.same_q_for_all:
            out.append("same_q_for_all")
        if not self.main_thm_k_range:
            out.append("main_thm_k_range")
        if not self.main_thm_condition5:
            out.append("main_thm_condition5")
        return tuple(out)


def applicability(p: int, d) -> ApplicabilityReport:
    check_prime(p)
    d = _check_degrees(d)
    n = len(d) - 1
    q, e = largest_power_leq(p, min(d))
    splits = [q_split(di, q) for di in d]
    k = tuple(s.k for s in splits)
    r = tuple(s.r for s in splits)
    same_q = all(largest_power_leq(p, di)[0] == q for di in d)
    k_range = all(1 <= ki <= p - 1 for ki in k)
    bound = (sum(k) - n + 1) // 2
    cond5 = all(ki <= bound for ki in k)
    return ApplicabilityReport(
        p=p, d=d, q=q, e=e, k=k, r=r,
        char0_condition=condition_char0(d),
        main_thm_k_range=k_range,
        main_thm_condition5=cond5,
        same_q_for_all=same_q,
    )


def min_function(p: int, q: int, k, r) -> int:
    """min over epsilon in {0,1}^(n+1) of q*ep_base(k + epsilon) plus the
    remainders at the coordinates where epsilon is 0."""
    check_prime(p)
    k = tuple(int(x) for x in k)
    r = tuple(int(x) for x in r)
    if len(k) != len(r):
        raise ValueError("k and r must have the same length")
    if any(x < 1 for x in k) or any(not 0 <= x < q for x in r):
        raise ValueError("need k_i >= 1 and 0 <= r_i < q")
    if any(ki + 1 > p for ki in k):
        raise NotApplicableError(("main_thm_k_range",))
    best = None
    for eps in product((0, 1), repeat=len(k)):
        kk = tuple(ki + ei for ki, ei in zip(k, eps))
        value = q * ep_base(p, kk) + sum(ri for ri, ei in zip(r, eps) if ei == 0)
        if best is None or value < best:
            best = value
    return best


def _degenerate(d: tuple[int, ...]) -> bool:
    return d[-1] > sum(x - 1 for x in d[:-1])


def ep_main(p: int, d) -> EResult:
    """Main closed form for n >= 3: the q-split minimum, when the tuple has a
    uniform largest prime power, k in [1, p-1], and the balance condition."""
    d = _check_degrees(d)
    if len(d) < 4:
        raise ValueError("main formula needs at least four degrees")
    rep = applicability(p, d)
    failing = rep.failing_main_flags()
    if failing:
        min_value = None
        if rep.main_thm_k_range:
            min_value = min_function(p, rep.q, rep.k, rep.r)
        raise NotApplicableError(failing, min_value=min_value, report=rep)
    value = min_function(p, rep.q, rep.k, rep.r)
    if rep.q > 1:
        method = "main"
    else:
        # q = 1 collapses the split, so the value is the base formula's; call
        # it char0 when the char-0 theorem provably gives the same number
        n = len(d) - 1
        e0 = (sum(d) - n + 2) // 2
        method = "char0" if rep.char0_condition and p >= e0 else "base"
    return EResult(value=value, method=method, degenerate=_degenerate(d),
                   witness=None)


def ep_han(p: int, d1: int, d2: int, d3: int) -> int:
    """Two-variable closed form, valid under the triangle inequality: minimum
    over q = p^e and epsilon in {0,1}^3 of
    q*ceil((sum(k + eps) - 1)/2) + remainders at epsilon = 0,
    keeping only terms where every k_i + eps_i >= 1.

    The scan continues past min(d): once q exceeds a degree d_i the split
    forces k_i = 0 and eps_i = 1, and those terms still matter.  Over F_2
    the triple (3, 3, 4) has its minimum at q = 4 (where f^4 vanishes in
    the quotient), which q <= min(d) would miss.  Powers beyond sum(d)
    cannot win, so the scan stops there."""
    check_prime(p)
    d = _check_degrees((d1, d2, d3))
    if 2 * max(d) > sum(d):
        raise NotApplicableError(("triangle_inequality",))
    best = None
    q = 1
    total = sum(d)
    while q <= total:
        k = [di // q for di in d]
        r = [di % q for di in d]
        for eps in product((0, 1), repeat=3):
            if any(ki + ei == 0 for ki, ei in zip(k, eps)):
                continue
            tot = sum(k) + sum(eps)
            value = q * (tot // 2) + sum(ri for ri, ei in zip(r, eps) if ei == 0)
            if best is None or value < best:
                best = value
        q *= p
    return best


def ep_dispatch(p: int, d, want_witness: bool = True) -> EResult:
    """Route to the cheapest valid method: two-variable formula for n = 2,
    the main formula for applicable n >= 3, the rank oracle otherwise."""
    d = _check_degrees(d)
    if len(d) == 3:
        try:
            value = ep_han(p, *d)
            return EResult(value=value, method="han",
                           degenerate=_degenerate(d), witness=None)
        except NotApplicableError:
            return e_degree_oracle(p, d, want_witness=want_witness)
    if len(d) >= 4:
        try:
            return ep_main(p, d)
        except NotApplicableError:
            return e_degree_oracle(p, d, want_witness=want_witness)
    return e_degree_oracle(p, d, want_witness=want_witness)


def _e_value(result) -> int:
    return result.value if isinstance(result, EResult) else int(result)


def tsd_formula(p: int, K, a: int, e_provider=None) -> int:
    """Top socle degree of the box on caps K cut by the degree-a diagonal
    form, maximized over the valid rounding choices of K_i = a*d_i + e_i."""
    check_prime(p)
    K = _check_degrees(K)
    a = int(a)
    if a < 1:
        raise ValueError("exponent a must be positive")
    if e_provider is None:
        e_provider = lambda t: ep_dispatch(p, t, want_witness=False)
    m = len(K)
    d = [Ki // a for Ki in K]
    e = [Ki % a for Ki in K]
    choices = []
    for di, ei in zip(d, e):
        opts = []
        if di >= 1:
            opts.append(0)
        if ei >= 1:
            opts.append(1)
        choices.append(opts)   # K_i >= 1 guarantees at least one option
    best = None
    for eps in product(*choices):
        dd = tuple(di + ei for di, ei in zip(d, eps))
        E = _e_value(e_provider(dd))
        g = sum(a - 1 if ei == 0 else e[i] - 1 for i, ei in enumerate(eps))
        value = a * (sum(dd) - m - E + 1) + g
        if best is None or value > best:
            best = value
    return best


@dataclass(frozen=True)
class FThresholdResult:
    """Diagonal F-threshold of the degree-a diagonal form in n+1 variables,
    as the exact rational c = n + 1 - a*M."""

    p: int
    a: int
    n: int
    e: int
    q: int
    kappa: int
    s: int
    terms: tuple[Fraction, ...]
    M: Fraction
    c: Fraction

    def to_dict(self) -> dict:
        return {"p": self.p, "a": self.a, "n": self.n, "e": self.e,
                "q": self.q, "kappa": self.kappa, "s": self.s,
                "terms": [frac_str(t) for t in self.terms],
                "M": frac_str(self.M), "c": frac_str(self.c)}


def frac_str(x: Fraction) -> str:
    """Exact decimal-free rendering, 'num/den' or plain integer string."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fthreshold_formula(p: int, a: int, n: int) -> FThresholdResult:
    """Exact diagonal F-threshold via the five-term rational minimum at the
    smallest e with p^e >= a."""
    check_prime(p)
    a = int(a)
    n = int(n)
    if a < 1:
        raise ValueError("exponent a must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if a % p == 0:
        raise ValueError(f"a must be prime to p, got a={a}, p={p}")
    e = 0
    while p ** e < a:
        e += 1
    q = p ** e
    kappa = q // a
    s = q - kappa * a
    assert 0 <= s < a and 1 <= kappa <= p - 1
    m = n + 1
    terms = (
        Fraction((m * kappa - n + 2) // 2, q) + Fraction(m * s, a * q),
        Fraction((m * kappa - n + 3) // 2, q) + Fraction(n * s, a * q),
        Fraction((m * kappa + 2) // 2, q) + Fraction(s, a * q),
        Fraction((m * kappa + 3) // 2, q),
        Fraction(p, q),
    )
    M = min(terms)
    c = Fraction(m) - a * M
    return FThresholdResult(p=p, a=a, n=n, e=e, q=q, kappa=kappa, s=s,
                            terms=terms, M=M, c=c)


def wlp_criterion(p: int, d, e_provider=None) -> bool:
    """Weak Lefschetz verdict from the relation degree: the box quotient on d
    has WLP iff the relation degree reaches the characteristic-zero value."""
    check_prime(p)
    d = _check_degrees(d)
    if e_provider is None:
        e_provider = lambda t: ep_dispatch(p, t, want_witness=False)
    n = len(d) - 1
    return _e_value(e_provider(d)) >= (sum(d) - n + 2) // 2


def _scope_report(p: int, d, size: int) -> ApplicabilityReport:
    d = _check_degrees(d)
    if len(d) != size:
        raise ValueError(f"expected {size} degrees, got {len(d)}")
    rep = applicability(p, d)
    failing = rep.failing_main_flags()
    if failing:
        raise NotApplicableError(failing, report=rep)
    if rep.q == 1:
        raise NotApplicableError(("prime_power_q",), report=rep)
    return rep


def wlp_classify_n3(p: int, d) -> bool:
    """Closed-form WLP classification for four caps with a uniform prime
    power q > 1.  Sorts the remainders internally; the verdict splits on the
    parity of sum(k)."""
    rep = _scope_report(p, d, 4)
    q = rep.q
    r = sorted(rep.r)
    pq_ok = p * q >= (sum(rep.d) - 1) // 2
    if sum(rep.k) % 2 == 1:
        return (r[0] + r[1] + r[2] - r[3] + 2 >= q
                and q >= r[1] + r[2] + r[3] - r[0] - 2
                and pq_ok)
    return (2 * q - 2 <= sum(r) <= 2 * q + 2
            and r[2] + r[3] <= r[0] + r[1] + 2
            and pq_ok)


def wlp_classify_n4(p: int, d) -> bool:
    """WLP classification for five caps with q > 1: a single sporadic case."""
    rep = _scope_report(p, d, 5)
    return p == 3 and rep.q == 3 and sorted(rep.d) == [4, 4, 4, 4, 5]


def wlp_feasibility_filter(n: int, p: int, q: int) -> bool:
    """Necessary-condition screen: False means WLP is impossible for these
    (n, p, q); True only means not excluded."""
    check_prime(p)
    if n < 1:
        raise ValueError("need n >= 1")
    if q < 1:
        raise ValueError("need q >= 1")
    if q == 1:
        return True
    if n >= 9 and q > 2:
        return False
    if n in (7, 8) and q > 3:
        return False
    if n in (5, 6) and q > 4:
        return False
    if p == 2 and not (n <= 3 or (n == 4 and q == 2)):
        return False
    if p == 3 and q == 3 and n > 4:
        return False
    if n >= 5 and q > 1:
        return False
    return True
