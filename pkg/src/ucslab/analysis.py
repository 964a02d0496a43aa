"""Per-n extremal constants, conjecture checks, binomial audits and the
subfamily constructions used in the inequalities between the constants."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .census import Census, get_census
from .core import (
    Family,
    FamilyError,
    SeparationParams,
    best_cover,
    bound_numerator,
    compress,
    conjecture_bound,
    cover_count,
    expand,
    format_family,
    is_separated,
    is_weakly_separated,
    k_subsets,
    meets_bound,
    pattern_target,
    realised_patterns,
)
from .enumeration import check_n, enumerate_families, order_key

CLASS_KINDS = ("all", "separated", "weakly_separated")
VARIANT_CLASS = {"standard": "separated", "strong": "weakly_separated"}
MAX_AUDIT_K = 30


class EmptyClassError(ValueError):
    """The selected class has no family on this ground-set size."""


def valid_params(n: int) -> list[SeparationParams]:
    return [SeparationParams(k, l) for k in range(1, n + 1) for l in range(1, k + 1)]


# ------------------------------------------------------------------ profiles

@dataclass(frozen=True)
class Profile:
    """Everything the scans need about one family, for every valid (k, l)."""

    size: int
    best: dict[tuple[int, int], tuple[int, int]]
    separated: frozenset[tuple[int, int]]
    weak: frozenset[tuple[int, int]]

    def in_class(self, kind: str, p: SeparationParams) -> bool:
        key = (p.k, p.l)
        if kind == "all":
            return key in self.best
        if kind == "separated":
            return key in self.separated
        if kind == "weakly_separated":
            return key in self.weak
        raise ValueError(f"unknown class kind {kind!r}")

    def value(self, p: SeparationParams) -> Fraction:
        return Fraction(self.best[p.k, p.l][1], self.size)


@lru_cache(maxsize=None)
def _profile(n: int, bits: int) -> Profile:
    f = Family.from_bits(n, bits)
    members = f.members
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for k in range(1, n + 1):
        for s in k_subsets(n, k):
            hist = [0] * (k + 1)
            for a in members:
                hist[(a & s).bit_count()] += 1
            count = 0
            for l in range(k, 0, -1):
                count += hist[l]
                if (k, l) not in best or count > best[k, l][1]:
                    best[k, l] = (s, count)
    strong = realised_patterns(f)
    weak = realised_patterns(f, weak=True)
    sep = frozenset(kl for kl in best if pattern_target(n, *kl) & ~strong == 0)
    wsep = frozenset(kl for kl in best if pattern_target(n, *kl) & ~weak == 0)
    return Profile(len(members), best, sep, wsep)


def profile(f: Family) -> Profile:
    return _profile(f.n, f.bits)


# ----------------------------------------------------------------- constants

@dataclass(frozen=True)
class FamilyClassSelector:
    kind: str
    params: SeparationParams

    def __post_init__(self) -> None:
        if self.kind not in CLASS_KINDS:
            raise ValueError(f"class kind must be one of {CLASS_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class ConstantReport:
    n: int
    k: int
    l: int
    kind: str
    value: Fraction
    witness: Family
    witness_s: int
    families_scanned: int
    canonical_scanned: int
    conjectured: Fraction

    @property
    def verdict(self) -> str:
        return "below_bound" if self.value < self.conjectured else "meets_bound"

    def record(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "class": self.kind,
            "value_num": self.value.numerator,
            "value_den": self.value.denominator,
            "witness": format_family(self.witness),
            "witness_s": self.witness_s,
            "families_scanned": self.families_scanned,
            "canonical_scanned": self.canonical_scanned,
            "conjectured_num": self.conjectured.numerator,
            "conjectured_den": self.conjectured.denominator,
            "verdict": self.verdict,
        }


def _census(n: int, census: Census | None) -> Census:
    if census is None:
        return get_census(n)
    if census.n != n:
        raise ValueError(f"census is for n={census.n}, asked for n={n}")
    return census


def empirical_constant(n: int, selector: FamilyClassSelector, census: Census | None = None) -> ConstantReport:
    """Minimum over the selected class on n labeled elements of the best cover fraction.

    The witness is the first family of the class, in stream order, attaining
    the minimum.
    """
    check_n(n)
    p = selector.params
    if p.k > n:
        raise EmptyClassError(f"no family on n={n} elements has a {p.k}-subset")
    census = _census(n, census)
    best_key = None
    scanned = canonical = 0
    for rep, count, first in census:
        prof = _profile(n, rep)
        if not prof.in_class(selector.kind, p):
            continue
        scanned += count
        canonical += 1
        key = (prof.value(p), order_key(first, n))
        if best_key is None or key < best_key:
            best_key, best_first = key, first
    if best_key is None:
        raise EmptyClassError(f"class {selector.kind} {p} is empty on n={n}")
    witness = Family.from_bits(n, best_first)
    s, count = best_cover(witness, p)
    value = Fraction(count, len(witness))
    assert value == best_key[0], "witness cover disagrees with its class representative"
    return ConstantReport(n, p.k, p.l, selector.kind, value, witness, s, scanned, canonical, conjecture_bound(p))


@dataclass(frozen=True)
class VerifyResult:
    n: int
    k: int
    l: int
    variant: str
    passed: bool
    vacuous: bool
    families_scanned: int
    canonical_scanned: int
    min_value: Fraction | None
    conjectured: Fraction
    counterexample: Family | None = None
    diagnostic: dict[int, int] = field(default_factory=dict)

    def record(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "variant": self.variant,
            "class": VARIANT_CLASS[self.variant],
            "verdict": "pass" if self.passed else "counterexample",
            "vacuous": self.vacuous,
            "families_scanned": self.families_scanned,
            "canonical_scanned": self.canonical_scanned,
            "value_num": None if self.min_value is None else self.min_value.numerator,
            "value_den": None if self.min_value is None else self.min_value.denominator,
            "conjectured_num": self.conjectured.numerator,
            "conjectured_den": self.conjectured.denominator,
            "counterexample": None if self.counterexample is None else format_family(self.counterexample),
            "diagnostic": {str(s): c for s, c in self.diagnostic.items()},
        }


def verify_conjecture(
    n: int, p: SeparationParams, variant: str = "standard", census: Census | None = None
) -> VerifyResult:
    """Check that every family of the class on n elements has a k-set S with
    cover_count * 2**k >= |family| * sum_{i>=l} C(k, i).

    ``standard`` scans the k|l-separated class, ``strong`` the weakly
    separated one.  The first failing family in stream order is returned with
    the cover count of every k-set.
    """
    check_n(n)
    if variant not in VARIANT_CLASS:
        raise ValueError(f"variant must be one of {tuple(VARIANT_CLASS)}, got {variant!r}")
    kind = VARIANT_CLASS[variant]
    bound = conjecture_bound(p)
    if p.k > n:
        return VerifyResult(n, p.k, p.l, variant, True, True, 0, 0, None, bound)
    census = _census(n, census)
    scanned = canonical = 0
    min_value = None
    bad_key = None
    for rep, count, first in census:
        prof = _profile(n, rep)
        if not prof.in_class(kind, p):
            continue
        scanned += count
        canonical += 1
        v = prof.value(p)
        if min_value is None or v < min_value:
            min_value = v
        if not meets_bound(prof.best[p.k, p.l][1], prof.size, p):
            key = order_key(first, n)
            if bad_key is None or key < bad_key:
                bad_key, bad_first = key, first
    if bad_key is None:
        return VerifyResult(n, p.k, p.l, variant, True, scanned == 0, scanned, canonical, min_value, bound)
    cex = Family.from_bits(n, bad_first)
    diag = {s: cover_count(cex, s, p.l) for s in k_subsets(n, p.k)}
    return VerifyResult(n, p.k, p.l, variant, False, False, scanned, canonical, min_value, bound, cex, diag)


@dataclass(frozen=True)
class ClassCounts:
    total: int
    separated: int
    weakly_separated: int
    canonical_total: int
    canonical_separated: int
    canonical_weakly_separated: int


def classify_all(n: int, census: Census | None = None) -> dict[tuple[int, int], ClassCounts]:
    """Labeled and canonical class sizes for every k <= n, l <= k."""
    check_n(n)
    census = _census(n, census)
    table = {}
    for p in valid_params(n):
        tot = sep = weak = ctot = csep = cweak = 0
        for rep, count, _ in census:
            prof = _profile(n, rep)
            tot += count
            ctot += 1
            if (p.k, p.l) in prof.separated:
                sep += count
                csep += 1
            if (p.k, p.l) in prof.weak:
                weak += count
                cweak += 1
        table[p.k, p.l] = ClassCounts(tot, sep, weak, ctot, csep, cweak)
    return table


def powerset_attains_bound(n: int, p: SeparationParams) -> bool:
    """P(X) has best cover fraction exactly equal to the bound, for k <= n."""
    f = Family.powerset(n)
    _, count = best_cover(f, p)
    return Fraction(count, len(f)) == conjecture_bound(p)


# --------------------------------------------------------------------- audit

AUDIT_INEQUALITIES = ("superadditivity", "product", "product_shifted")


@dataclass(frozen=True)
class AuditReport:
    inequality: str
    max_k: int
    checks: int
    failures: tuple[tuple[int, int, int], ...]
    equalities: tuple[tuple[int, int, int], ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self) -> dict:
        return {
            "inequality": self.inequality,
            "max_k": self.max_k,
            "params": PARAM_NAMES[self.inequality],
            "checks": self.checks,
            "failures": [list(t) for t in self.failures],
            "equality_count": len(self.equalities),
            "equalities": [list(t) for t in self.equalities],
            "verdict": "pass" if self.passed else "fail",
        }


PARAM_NAMES = {
    "superadditivity": ["k", "k2", "l"],
    "product": ["k2", "k", "l"],
    "product_shifted": ["k2", "k", "l"],
}


def _b(k: int, l: int) -> Fraction:
    return Fraction(bound_numerator(k, l), 1 << k)


def audit_sides(inequality: str, a: int, b: int, l: int) -> tuple[Fraction, Fraction]:
    """(lhs, rhs) of one audited inequality, as exact fractions, for display.

    superadditivity (a=k, b=k2):  B(k+k2, l) >= B(k,l) + B(k2,l) - B(k,l) B(k2,l)
    product (a=k2, b=k):          B(k2+k, l) >= 2^-k2 B(k, l)
    product_shifted (a=k2, b=k):  B(k2+k, l+k2) >= 2^-k2 B(k, l)
    """
    if inequality == "superadditivity":
        x, y = _b(a, l), _b(b, l)
        return _b(a + b, l), x + y - x * y
    if inequality == "product":
        return _b(a + b, l), Fraction(1, 1 << a) * _b(b, l)
    if inequality == "product_shifted":
        return _b(a + b, l + a), Fraction(1, 1 << a) * _b(b, l)
    raise ValueError(f"unknown inequality {inequality!r}")


def _integer_sides(inequality: str, a: int, b: int, l: int) -> tuple[int, int]:
    # both sides scaled by 2**(a+b)
    if inequality == "superadditivity":
        na, nb = bound_numerator(a, l), bound_numerator(b, l)
        return bound_numerator(a + b, l), (na << b) + (nb << a) - na * nb
    if inequality == "product":
        return bound_numerator(a + b, l), bound_numerator(b, l)
    return bound_numerator(a + b, l + a), bound_numerator(b, l)


def audit_binomial(max_k: int, inequalities: tuple[str, ...] = AUDIT_INEQUALITIES) -> list[AuditReport]:
    if not isinstance(max_k, int) or not 1 <= max_k <= MAX_AUDIT_K:
        raise ValueError(f"max_k must be in 1..{MAX_AUDIT_K}, got {max_k}")
    reports = []
    for name in inequalities:
        if name not in AUDIT_INEQUALITIES:
            raise ValueError(f"unknown inequality {name!r}")
        failures, equal, checks = [], [], 0
        for a in range(1, max_k + 1):
            for b in range(1, max_k + 1):
                top = min(a, b) if name == "superadditivity" else b
                for l in range(1, top + 1):
                    lhs, rhs = _integer_sides(name, a, b, l)
                    checks += 1
                    if lhs < rhs:
                        failures.append((a, b, l))
                    elif lhs == rhs:
                        equal.append((a, b, l))
        reports.append(AuditReport(name, max_k, checks, tuple(sorted(failures)), tuple(sorted(equal))))
    return reports


# -------------------------------------------------------- derived subfamilies

@dataclass(frozen=True)
class DisjointSplit:
    """Members missing S, re-grounded on X \\ S, plus the three-way split
    (|B|, |B'|, |A'|): members meeting S in >= l, in 1..l-1, and not at all."""

    family: Family | None
    remainder: int
    sizes: tuple[int, int, int]
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.family is not None


def derive_disjoint_subfamily(f: Family, s: int, l: int = 1) -> DisjointSplit:
    if not f.ground.fits(s):
        raise FamilyError(f"S={s} is not a subset of the ground set")
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    b = b_prime = 0
    disjoint = []
    for a in f.members:
        hit = (a & s).bit_count()
        if hit >= l:
            b += 1
        elif hit:
            b_prime += 1
        else:
            disjoint.append(a)
    sizes = (b, b_prime, len(disjoint))
    assert sum(sizes) == len(f), "partition sizes must add up to the family size"
    rest = f.full & ~s
    if not rest:
        return DisjointSplit(None, rest, sizes, "empty remainder")
    masks = [compress(a, rest) for a in disjoint]
    width = rest.bit_count()
    if (1 << width) - 1 not in masks:
        return DisjointSplit(None, rest, sizes, "not a family on remainder: X \\ S is not a member")
    return DisjointSplit(Family.from_masks(width, masks), rest, sizes)


def derive_quotient_subfamily(f: Family, s: int) -> Family:
    """{A \\ S : S <= A in f} plus the empty set, re-grounded on X \\ S."""
    if not f.ground.fits(s):
        raise FamilyError(f"S={s} is not a subset of the ground set")
    rest = f.full & ~s
    if not rest:
        raise FamilyError("S is the whole ground set; the quotient has an empty ground set")
    masks = {0}
    masks.update(compress(a, rest) for a in f.members if a & s == s)
    return Family.from_masks(rest.bit_count(), masks)


@dataclass(frozen=True)
class StepFinding:
    step: str
    family: Family
    params: tuple[int, int, int]
    s: int
    designated: bool
    problem: str


def disjoint_step_problem(f: Family, k: int, k2: int, l: int, s: int) -> str | None:
    """Check the split A' of f by S (|S| = k) for f in the (k+k2)|l-separated class."""
    split = derive_disjoint_subfamily(f, s, l)
    if not split.valid:
        return split.reason
    sub = split.family
    p2 = SeparationParams(k2, l)
    if not is_separated(sub, p2):
        return f"A' is not {p2}-separated"
    s2_local, c2 = best_cover(sub, p2)
    s2 = expand(s2_local, split.remainder)
    if cover_count(f, s | s2, l) < split.sizes[0] + c2:
        return "cover count of S u S' below |B| + cover of A'"
    return None


def quotient_step_problem(f: Family, k: int, k2: int, l: int, s: int) -> str | None:
    """Check the quotient of f by S (|S| = k2) for f in the (k+k2)|(l+k2) class."""
    q = derive_quotient_subfamily(f, s)
    p = SeparationParams(k, l)
    if not is_separated(q, p):
        return f"A'' is not {p}-separated"
    if len(q) < cover_count(f, s, k2):
        return "A'' smaller than the number of members containing S"
    rest = f.full & ~s
    s2_local, c2 = best_cover(q, p)
    if cover_count(f, s | expand(s2_local, rest), l + k2) < c2:
        return "cover count of S u S'' below the cover of A''"
    return None


@dataclass
class StepSuiteReport:
    n_max: int
    strict: bool
    checked: int = 0
    findings: list[StepFinding] = field(default_factory=list)

    @property
    def designated_findings(self) -> list[StepFinding]:
        return [x for x in self.findings if x.designated]


def proof_step_suite(n_max: int = 4, strict: bool = False) -> StepSuiteReport:
    """Run both subfamily constructions over every family with n <= n_max.

    The designated S is the best cover set; strict mode also tries every
    other admissible S and records failures as findings.
    """
    report = StepSuiteReport(n_max, strict)
    for n in range(1, n_max + 1):
        for f in enumerate_families(n):
            _disjoint_checks(f, strict, report)
            _quotient_checks(f, strict, report)
    return report


def _disjoint_checks(f: Family, strict: bool, report: StepSuiteReport) -> None:
    n = f.n
    for k in range(1, n):
        for k2 in range(1, n - k + 1):
            for l in range(1, min(k, k2) + 1):
                if not is_separated(f, SeparationParams(k + k2, l)):
                    continue
                designated, _ = best_cover(f, SeparationParams(k, l))
                candidates = k_subsets(n, k) if strict else [designated]
                for s in candidates:
                    report.checked += 1
                    problem = disjoint_step_problem(f, k, k2, l, s)
                    if problem:
                        report.findings.append(StepFinding("disjoint", f, (k, k2, l), s, s == designated, problem))


def _quotient_checks(f: Family, strict: bool, report: StepSuiteReport) -> None:
    n = f.n
    for k2 in range(1, n):
        designated, dcount = best_cover(f, SeparationParams(k2, k2))
        for k in range(1, n - k2 + 1):
            for l in range(1, k + 1):
                if not is_separated(f, SeparationParams(k + k2, l + k2)):
                    continue
                if not meets_bound(dcount, len(f), SeparationParams(k2, k2)):
                    report.checked += 1
                    report.findings.append(StepFinding(
                        "quotient", f, (k, k2, l), designated, True,
                        "no k2-set lies in 2^-k2 of the members"))
                    continue
                if strict:
                    candidates = [s for s in k_subsets(n, k2)
                                  if meets_bound(cover_count(f, s, k2), len(f), SeparationParams(k2, k2))]
                else:
                    candidates = [designated]
                for s in candidates:
                    report.checked += 1
                    problem = quotient_step_problem(f, k, k2, l, s)
                    if problem:
                        report.findings.append(StepFinding("quotient", f, (k, k2, l), s, s == designated, problem))

