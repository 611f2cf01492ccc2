"""Command line front end.

Four commands: rank a poset file, run a normalizer tower over it, run a named
verification suite, and construct an inverse system from a function family.
Reports are KEY=VALUE lines sorted by key; the fact a line rests on rides
directly above it as a `# anchor:` comment. Output is byte-identical for a
fixed input and seed. Each command also drops a small matplotlib figure next
to the textual report (into --out).

Exit codes: 0 pass, 1 verification failure, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
from pathlib import Path

from .chains import DEFAULT_CAP, enumerate_gens
from .descriptors import (
    GroupDescriptor,
    TwistedDescriptor,
    enumerate_qf_types,
    equivalent,
    eval_twisted,
    probe_zoo,
    reduce_descriptor,
    support,
    truly_reduced,
)
from .errors import (
    IncoherentProjection,
    NormtowerError,
    NotDirected,
    NotEnumerable,
    SearchBudgetExceeded,
    StepLimitExceeded,
    UniverseTooLarge,
)
from .group import (
    fast_ops,
    oracle_from_element,
    oracle_multiply,
    oracle_to_element,
    GroupElement,
    parse_element,
    render_element,
)
from .normalizer import (
    check_level_normalizers,
    level_subgroup,
    tower,
    tower_k_fast,
    tower_twisted_brute,
    whole_group,
)
from .plots import (
    save_poset_figure,
    save_system_figure,
    save_tower_figure,
    save_verdict_figure,
)
from .poset import GREATER, Poset, load_poset, qf_type, rank
from .powis import (
    build_from_functions,
    check_existential_limit,
    check_limit,
    check_shift_closure,
    check_shift_compat,
    load_funcs,
    load_powis,
    parse_powis_text,
    powis_to_text,
)
from .twisted import enumerate_twisted


# report plumbing ----------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (tuple, list)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


class Report:
    """Sorted KEY=VALUE lines, each optionally preceded by an anchor comment.

    The body (rows plus anchors) is the part frozen fixtures pin; trailing
    notes are plain comments and stay out of the comparison.
    """

    def __init__(self):
        self._rows = {}
        self._anchors = {}
        self._notes = []

    def add(self, key: str, value, anchor: str | None = None):
        assert key not in self._rows, f"duplicate report key {key}"
        self._rows[key] = _fmt(value)
        if anchor:
            self._anchors[key] = anchor

    def note(self, text: str):
        self._notes.append(text)

    def body(self) -> str:
        lines = []
        for key in sorted(self._rows):
            if key in self._anchors:
                lines.append(f"# anchor: {self._anchors[key]}")
            lines.append(f"{key}={self._rows[key]}")
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        out = self.body()
        for text in self._notes:
            out += f"# {text}\n"
        return out


def _emit(rep: Report) -> None:
    sys.stdout.write(rep.render())


def _fail(err) -> int:
    name = type(err).__name__ if isinstance(err, Exception) else "error"
    print(f"{name}: {err}", file=sys.stderr)
    return 2


def _frozen_ok(rep: Report, args, name: str) -> bool:
    """Compare the report body against a frozen copy when one is on disk."""
    if not getattr(args, "fixtures", None):
        return True
    path = Path(args.fixtures) / f"{name}.txt"
    if not path.exists():
        rep.note(f"frozen: no fixture named {name}.txt")
        return True
    if path.read_text() == rep.body():
        rep.note("frozen: match")
        return True
    rep.note("frozen: mismatch")
    return False


class _Checks:
    """Per-suite pass/fail rows, mirrored into the report and the figure."""

    def __init__(self, rep: Report):
        self.rep = rep
        self.rows = []

    def add(self, name: str, ok: bool, anchor: str | None = None, witness=None):
        self.rep.add(f"check[{name}]", "pass" if ok else "fail", anchor=anchor)
        if witness is not None and not ok:
            self.rep.add(f"witness[{name}]", witness)
        self.rows.append((name, ok))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.rows)


def _figure_path(args, name: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# rank ----------------------------------------------------------------------


def cmd_rank(args) -> int:
    try:
        P = load_poset(args.file)
    except (NormtowerError, ValueError, OSError) as err:
        return _fail(err)
    stem = Path(args.file).stem
    info = rank(P)
    rep = Report()
    rep.add("command", "rank")
    rep.add("input", Path(args.file).name)
    rep.add("elements", len(P.elements))
    for x in P.elements:
        rep.add(f"rk[{x}]", info.rk[x])
    rep.add(
        "rkI",
        info.rk_of_poset,
        anchor="the order's rank is one more than its largest element rank",
    )
    for a in sorted(info.levels):
        rep.add(
            f"levels[{a}]",
            info.levels[a],
            anchor="each level collects the elements of one exact rank" if a == 0 else None,
        )
    fig = f"{stem}.rank.png"
    save_poset_figure(P, info, _figure_path(args, fig))
    rep.add("figure", fig)
    ok = _frozen_ok(rep, args, f"rank-{stem}")
    _emit(rep)
    return 0 if ok else 1


# tower ---------------------------------------------------------------------


def cmd_tower(args) -> int:
    try:
        P = load_poset(args.file)
        U = enumerate_gens(P, cap=args.cap)
    except (NormtowerError, ValueError, OSError) as err:
        return _fail(err)
    stem = Path(args.file).stem
    rep = Report()
    rep.add("command", "tower")
    rep.add("input", Path(args.file).name)
    rep.add("side", args.side)
    rep.add("method", args.method)

    try:
        if args.side == "g":
            # one group-side engine serves both method flags: a full scan
            trep = tower(whole_group(U), level_subgroup(U, 0))
            rep.add("engine", "group-scan")
            rep.add(
                "tau",
                trep.tau,
                anchor="number of normalizer steps until the subgroup repeats",
            )
            sizes = trep.sizes
            rep.add("sizes", sizes)
        elif args.method == "fast":
            krep = tower_k_fast(U)
            rep.add("engine", "group-side-preimage")
            rep.add("tau", krep.tau)
            rep.add(
                "expected",
                krep.expected,
                anchor="the declared expectation is one more than the poset rank",
            )
            rep.add("match", krep.match)
            sizes = krep.gpart_sizes
            rep.add(
                "sizes",
                sizes,
                anchor="group-part sizes per level; flag parts ride along untouched",
            )
        else:
            # quadratic scans over the listed product: smallest universes only
            levels = tower_twisted_brute(U, limit=1024)
            rep.add("engine", "twisted-enumeration")
            rep.add("tau", len(levels) - 1)
            sizes = tuple(len(l) for l in levels)
            rep.add("sizes", sizes)
    except (UniverseTooLarge, NotEnumerable, StepLimitExceeded) as err:
        return _fail(err)

    fig = f"{stem}.tower-{args.side}-{args.method}.png"
    save_tower_figure(sizes, f"{stem} {args.side}-side tower", _figure_path(args, fig))
    rep.add("figure", fig)
    ok = _frozen_ok(rep, args, f"tower-{args.side}-{args.method}-{stem}")
    _emit(rep)
    return 0 if ok else 1


# verify suites --------------------------------------------------------------


def _suite_normalform(args, rep: Report, checks: _Checks) -> None:
    P = load_poset(args.file)
    U = enumerate_gens(P, cap=args.cap)
    fast = fast_ops(U)
    n = len(U.gens)
    rng = random.Random(f"{args.seed}:normalform")

    checks.add(
        "involution",
        all(fast.mul(1 << i, 1 << i) == 0 for i in range(n)),
        anchor="every generator squares to the identity",
    )

    # rewriting engine against the level-decomposition multiplier
    size = 1 << n
    if size <= 256:
        pairs = itertools.product(range(size), range(size))
        rep.add("oracle_mode", "exhaustive")
        rep.add("oracle_pairs", size * size)
    else:
        pairs = (
            (rng.randrange(size), rng.randrange(size)) for _ in range(args.samples)
        )
        rep.add("oracle_mode", "sampled")
        rep.add("oracle_pairs", args.samples)
    bad = None
    for m1, m2 in pairs:
        got = fast.mul(m1, m2)
        v1 = oracle_from_element(GroupElement(U, m1))
        v2 = oracle_from_element(GroupElement(U, m2))
        want = oracle_to_element(oracle_multiply(v1, v2)).mask
        if got != want:
            bad = (m1, m2, got, want)
            break
    checks.add(
        "oracle",
        bad is None,
        anchor="rewriting product equals the level-decomposition product",
        witness=bad,
    )

    bad = None
    for _ in range(args.samples):
        word = [rng.randrange(n) for _ in range(rng.randint(0, 6))]
        m = 0
        for t in word:
            m = fast.rmul(m, t)
        if m.bit_count() > len(word):
            bad = tuple(word)
            break
    checks.add(
        "length",
        bad is None,
        anchor="a normal form is never longer than the word that produced it",
        witness=bad,
    )

    bad = None
    for _ in range(args.samples):
        a, b, c = (rng.randrange(size) for _ in range(3))
        if fast.mul(fast.mul(a, b), c) != fast.mul(a, fast.mul(b, c)):
            bad = (a, b, c)
            break
        if fast.mul(a, fast.inv_one(a)) != 0:
            bad = (a,)
            break
    checks.add(
        "group_laws",
        bad is None,
        anchor="sampled associativity and inverse cancellation both hold",
        witness=bad,
    )

    bad = None
    for _ in range(min(args.samples, size)):
        g = GroupElement(U, rng.randrange(size))
        if parse_element(U, render_element(g)) != g:
            bad = render_element(g)
            break
    checks.add(
        "roundtrip",
        bad is None,
        anchor="rendered elements parse back to themselves",
        witness=bad,
    )
    rep.add("gens", n)


def _suite_glevels(args, rep: Report, checks: _Checks) -> None:
    P = load_poset(args.file)
    U = enumerate_gens(P, cap=args.cap)
    lev = check_level_normalizers(U, w=2)
    for v in lev.verdicts:
        checks.add(
            f"superset_{v.alpha}",
            v.superset_ok,
            anchor=(
                "the next level subgroup always normalizes the current one"
                if v.alpha == 0
                else None
            ),
        )
        # equality is data, not a pass criterion: it tracks the width verdict
        rep.add(f"equal[{v.alpha}]", v.equal)
        if v.outsider_witnesses:
            rep.add(f"outsiders[{v.alpha}]", len(v.outsider_witnesses))
    checks.add(
        "top_fixed",
        lev.top_fixed,
        anchor="at the top level the whole group is its own normalizer",
    )
    rep.add("w", lev.w)
    rep.add("width_ok", lev.width.ok)
    rep.add("levels", len(lev.verdicts))


def _suite_ktower(args, rep: Report, checks: _Checks) -> None:
    P = load_poset(args.file)
    U = enumerate_gens(P, cap=args.cap)
    krep = tower_k_fast(U)
    rep.add("tau", krep.tau)
    rep.add("expected", krep.expected)
    rep.add("sizes", krep.gpart_sizes)
    checks.add(
        "expected",
        krep.match,
        anchor="tower length is one more than the poset rank",
    )
    try:
        elements = list(enumerate_twisted(U, limit=1024))
    except NotEnumerable:
        rep.add("brute", "skipped")
        return
    rep.add("brute", "ran")
    levels = tower_twisted_brute(U, limit=1024)
    checks.add(
        "brute_tau",
        len(levels) - 1 == krep.tau,
        anchor="the enumerated tower stabilizes after the same number of steps",
        witness=len(levels) - 1,
    )
    agree = True
    for i, glevel in enumerate(krep.glevels):
        if i + 1 >= len(levels):
            agree = False
            break
        preimage = frozenset(p for p in elements if glevel.contains_mask(p.g.mask))
        if preimage != levels[i + 1]:
            agree = False
            break
    checks.add(
        "brute_levels",
        agree,
        anchor="each enumerated level is exactly the preimage of a group-side level",
    )


def _decreasing_runs(p, max_len: int = 3) -> list:
    """Position sequences that read as strictly decreasing chains in type p."""
    runs = [(i,) for i in range(p.k)]
    out = list(runs)
    for _ in range(max_len - 1):
        runs = [
            run + (j,)
            for run in runs
            for j in range(p.k)
            if p.code(run[-1], j) == GREATER
        ]
        out.extend(runs)
    return out


def _random_descriptor(rng: random.Random, p) -> TwistedDescriptor:
    runs = _decreasing_runs(p)

    def item():
        lbar = runs[rng.randrange(len(runs))]
        eta = tuple(rng.randint(0, 1) for _ in lbar[:-1])
        return (lbar, eta)

    part0 = GroupDescriptor(p.k, tuple(item() for _ in range(rng.randint(0, 3))))
    flags = tuple(
        GroupDescriptor(p.k, tuple(item() for _ in range(rng.randint(1, 2))))
        for _ in range(rng.randint(0, 2))
    )
    return TwistedDescriptor(p.k, (part0,) + flags)


def _suite_desceq(args, rep: Report, checks: _Checks) -> None:
    P = load_poset(args.file)
    rng = random.Random(f"{args.seed}:desceq")
    per_k = max(1, args.samples // 3)
    queries = 0
    equal_count = 0
    mismatch = None
    for k in (1, 2, 3):
        cat = enumerate_qf_types(k, probes=probe_zoo() + (P,))
        types = [p for p in cat.types if cat.witnesses.get(p)]
        for _ in range(per_k):
            p = types[rng.randrange(len(types))]
            d1 = _random_descriptor(rng, p)
            d2 = _random_descriptor(rng, p)
            try:
                if equivalent(d1, d2, p, level=2, catalog=cat, instances=3):
                    equal_count += 1
            except AssertionError:
                mismatch = (k, p.render(), d1.render(), d2.render())
                break
            queries += 1
        if mismatch:
            break
    rep.add("queries", queries)
    rep.add("equal", equal_count)
    rep.add("instances", 3)
    checks.add(
        "instance_agreement",
        mismatch is None,
        anchor="equivalence verdicts agree across independent realizing instances",
        witness=mismatch,
    )

    # worked identities on a fixed type
    cat = enumerate_qf_types(2, probes=probe_zoo() + (P,))
    p = cat.types[0]
    d = _random_descriptor(rng, p)
    checks.add(
        "reflexive",
        equivalent(d, d, p, level=2, catalog=cat),
        anchor="every descriptor is equivalent to itself",
    )
    it = _decreasing_runs(p)[0]
    padded = TwistedDescriptor(
        p.k,
        (GroupDescriptor(p.k, d.parts[0].items + ((it, ()), (it, ()))),)
        + d.parts[1:],
    )
    checks.add(
        "pad_twice",
        equivalent(d, padded, p, level=2, catalog=cat),
        anchor="appending one generator item twice changes nothing",
    )


def _suite_descsupp(args, rep: Report, checks: _Checks) -> None:
    P = load_poset(args.file)
    U = enumerate_gens(P, cap=args.cap)
    rng = random.Random(f"{args.seed}:descsupp")
    pairs_checked = 0
    pairs_equal = 0
    certified = 0
    attempted = 0
    violation = None
    for k in (1, 2, 3):
        cat = enumerate_qf_types(k, probes=probe_zoo() + (P,))
        tuples = list(itertools.product(P.elements, repeat=k))
        if len(tuples) > 512:
            tuples = [
                tuples[rng.randrange(len(tuples))] for _ in range(512)
            ]
            rep.add(f"mode[{k}]", "sampled")
        by_type = {}
        for tbar in tuples:
            by_type.setdefault(qf_type(tbar, P), []).append(tbar)
        for p, cls in sorted(by_type.items(), key=lambda kv: kv[0].render()):
            if p not in cat.witnesses:
                continue
            for _ in range(3):
                d = _random_descriptor(rng, p)
                attempted += 1
                try:
                    dr = reduce_descriptor(d, p, catalog=cat)
                except SearchBudgetExceeded:
                    continue
                if not truly_reduced(dr, p, catalog=cat):
                    continue
                certified += 1
                supp = sorted(support(dr))
                values = {tbar: eval_twisted(tbar, dr, U) for tbar in cls}
                for t1, t2 in itertools.combinations(cls, 2):
                    pairs_checked += 1
                    if values[t1] != values[t2]:
                        continue
                    pairs_equal += 1
                    m1 = sorted(t1[i] for i in supp)
                    m2 = sorted(t2[i] for i in supp)
                    if m1 != m2:
                        violation = (dr.render(), t1, t2)
                        break
                if violation:
                    break
            if violation:
                break
        if violation:
            break
    rep.add("pairs_checked", pairs_checked)
    rep.add("pairs_equal", pairs_equal)
    rep.add("reduced_certified", f"{certified}/{attempted}")
    checks.add(
        "permutation",
        violation is None,
        anchor="tuples agreeing on a reduced descriptor agree on its support up to order",
        witness=violation,
    )
    checks.add(
        "nonvacuous",
        pairs_equal > 0 and certified > 0,
        anchor="at least one certified descriptor and one equal pair were exercised",
    )


def _suite_powis(args, rep: Report, checks: _Checks) -> None:
    try:
        S = load_powis(args.file)
    except IncoherentProjection as err:
        checks.add(
            "coherent",
            False,
            anchor="projections along any two routes between nodes agree",
            witness=err.witness,
        )
        return
    except NotDirected as err:
        checks.add("directed", False, witness=str(err))
        return
    S.cap = args.cap
    checks.add(
        "coherent",
        True,
        anchor="projections along any two routes between nodes agree",
    )
    rep.add("nodes", len(S.nodes.elements))
    rep.add("nice", S.nice)

    compat = check_shift_compat(S, samples=args.samples, seed=args.seed)
    for e in compat.edges:
        tag = f"{e.low}<{e.high}"
        rep.add(f"compat_checked[{tag}]", e.checked)
        rep.add(f"compat_skipped[{tag}]", e.skipped)
    checks.add(
        "compat",
        compat.ok,
        anchor="lifted shifts match the originals wherever the lift lands",
        witness=next((e.mismatches[0] for e in compat.edges if e.mismatches), None),
    )

    ran_closure = False
    closure_ok = True
    for u in S.nodes.elements:
        try:
            crep = check_shift_closure(S, u, seed=args.seed)
        except (UniverseTooLarge, NotEnumerable):
            rep.add(f"closure[{u}]", "skipped")
            continue
        ran_closure = True
        rep.add(f"closure[{u}]", "ok" if crep.ok else "failed")
        rep.add(f"closure_cases[{u}]", len(crep.cases))
        closure_ok = closure_ok and crep.ok
    checks.add(
        "closure",
        closure_ok,
        anchor="composites and inverses of shifts stay inside the encoded family",
    )
    if not ran_closure:
        rep.note("closure: every node skipped, universes over cap")


def _pick_top(S) -> str | None:
    if S.limit is not None:
        return S.limit
    nodes = S.nodes
    for m in nodes.elements:
        if all(x == m or nodes.lt(x, m) for x in nodes.elements):
            return m
    return None


def _suite_limit(args, rep: Report, checks: _Checks) -> None:
    S = load_powis(args.file)
    vstar = _pick_top(S)
    if vstar is None:
        raise NotDirected("no maximum node to test the limit clauses at")
    rep.add("vstar", vstar)
    lrep = check_limit(S, vstar)
    anchors = {
        "maximum": "the chosen node sits above every other node",
        "restriction": "dropping the top leaves a directed coherent system",
        "capture": "every top element is eventually carried by the nodes below",
        "order": "the order between top elements is eventually decided below",
        "threads": "every coherent thread below the top has exactly one preimage",
    }
    for name, ok in lrep.clauses().items():
        checks.add(f"clause_{name}", ok, anchor=anchors[name])
    if not lrep.capture_ok:
        rep.add(
            "capture_failures",
            tuple(t for t, u in lrep.capture if u is None),
        )
    if not lrep.order_ok:
        rep.add("order_failures", len(lrep.order_failures))
    if not lrep.threads_ok:
        rep.add("thread_failures", len(lrep.thread_failures))


def _suite_exlimit(args, rep: Report, checks: _Checks) -> None:
    S = load_powis(args.file)
    vstar = _pick_top(S)
    if vstar is None:
        raise NotDirected("no maximum node to test the extension law at")
    rep.add("vstar", vstar)
    budget = args.samples * 1000
    ex = check_existential_limit(S, vstar, 1, 1, budget=budget)
    rep.add("budget", budget)
    rep.add("spent", ex.budget_spent)
    rep.add("instances", ex.instances)
    rep.add("types", ex.type_count)
    rep.add("verdict", ex.verdict)
    if ex.example is not None:
        rep.add("example", ex.example)
    if ex.counterexample is not None:
        rep.add("counterexample", ex.counterexample)
    checks.add(
        "extension",
        ex.verdict == "satisfied",
        anchor="every small assumption pattern extends to a matching witness at the top",
    )


_SUITES = {
    "normalform": _suite_normalform,
    "glevels": _suite_glevels,
    "ktower": _suite_ktower,
    "desceq": _suite_desceq,
    "descsupp": _suite_descsupp,
    "powis": _suite_powis,
    "limit": _suite_limit,
    "exlimit": _suite_exlimit,
}


def cmd_verify(args) -> int:
    stem = Path(args.file).stem
    rep = Report()
    rep.add("suite", args.suite)
    rep.add("input", Path(args.file).name)
    rep.add("seed", args.seed)
    rep.add("samples", args.samples)
    checks = _Checks(rep)
    try:
        _SUITES[args.suite](args, rep, checks)
    except (IncoherentProjection, NotDirected) as err:
        # semantic defect in an otherwise well-formed input: a failure, not
        # a usage error
        rep.add("ok", False)
        rep.add("error", str(err))
        _emit(rep)
        return 1
    except (NormtowerError, ValueError, OSError) as err:
        return _fail(err)
    rep.add("ok", checks.ok)
    fig = f"{stem}.verify-{args.suite}.png"
    save_verdict_figure(
        checks.rows or [("no checks", False)],
        f"{args.suite} {stem}",
        _figure_path(args, fig),
    )
    rep.add("figure", fig)
    frozen = _frozen_ok(rep, args, f"verify-{args.suite}-{stem}")
    _emit(rep)
    return 0 if checks.ok and frozen else 1


# construct -------------------------------------------------------------------


def cmd_construct(args) -> int:
    try:
        funcs, theta, kappa, ideal = load_funcs(args.file)
        S, lrep = build_from_functions(funcs, theta, kappa, ideal)
    except (NormtowerError, ValueError, OSError) as err:
        return _fail(err)
    stem = Path(args.file).stem
    rep = Report()
    rep.add("command", "construct")
    rep.add("input", Path(args.file).name)
    rep.add("theta", theta)
    rep.add("kappa", kappa)
    rep.add("functions", len(funcs))
    rep.add("nodes", len(S.nodes.elements))
    rep.add("vstar", lrep.vstar)

    text = powis_to_text(S)
    out_file = _figure_path(args, f"{stem}.powis")
    out_file.write_text(text)
    rep.add("file", out_file.name)
    try:
        again = powis_to_text(parse_powis_text(text))
        roundtrip = again == text
    except NormtowerError:
        roundtrip = False
    rep.add(
        "roundtrip",
        roundtrip,
        anchor="the emitted file parses back to the identical system",
    )

    # clause verdicts are data about the construction, not a failure mode
    for name, ok in lrep.clauses().items():
        rep.add(f"clause[{name}]", "pass" if ok else "fail")

    fig = f"{stem}.construct.png"
    save_system_figure(S, lrep, _figure_path(args, fig))
    rep.add("figure", fig)
    frozen = _frozen_ok(rep, args, f"construct-{stem}")
    _emit(rep)
    if not roundtrip or not frozen:
        return 1
    return 0


# entry point -----------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--cap", type=int, default=DEFAULT_CAP, help="generator cap")
    sub.add_argument("--seed", type=int, default=0, help="64-bit seed")
    sub.add_argument("--samples", type=int, default=250, help="sample count")
    sub.add_argument("--fixtures", default=None, help="frozen regression data dir")
    sub.add_argument("--out", default=".", help="directory for figures and files")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normtower",
        description="rank orders, climb normalizer towers, verify the algebra",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("rank", help="rank a poset file")
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=cmd_rank)

    p = subs.add_parser("tower", help="run a normalizer tower over a poset file")
    p.add_argument("file")
    p.add_argument("--side", choices=("g", "k"), default="k")
    p.add_argument("--method", choices=("brute", "fast"), default="fast")
    _add_common(p)
    p.set_defaults(func=cmd_tower)

    p = subs.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(_SUITES))
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("construct", help="build an inverse system from functions")
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
