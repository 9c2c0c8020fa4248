"""Command-line interface: ``wgroup <command> ...`` (or ``python -m wgroup``)."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import __version__
from . import f2algebra as f2
from .axioms import AxiomReport, ScanTooLarge, verify_axioms
from .cgroup import (
    ExtractionError,
    PresentedCGroup,
    center_of_even_subgroup,
    extract_candidate_space,
    frattini,
    involution_classes,
    quotient_order,
)
from .classify import (
    InconsistentSpace,
    TreeSyntaxError,
    build,
    classify,
    frattini_log2,
    order_log2,
    parse_tree,
    rank,
    realizable,
    realize,
    to_json,
)
from .formats import FormatError, char_string, read_cgp, read_sos, serialize_cgp, serialize_sos
from .oracle import (
    OracleLimit,
    axiom4_exhaustive,
    components_exhaustive,
    enumerate_quotient,
    frattini_by_enumeration,
    involution_classes_by_enumeration,
    translations_exhaustive,
)
from .orderspace import SpaceError, component_members, components, equivalent, translation_group

DEFAULT_MAX_LEN = 6
ORACLE_MAX_LEN = 4
ORACLE_PAIR_BUDGET = 3_000_000


class InputError(Exception):
    """Bad input; reported on stderr with exit code 2."""


def _max_len(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if not 2 <= value <= 8:
        raise argparse.ArgumentTypeError("--max-len must be between 2 and 8")
    return value


class Output:
    def __init__(self, args: argparse.Namespace, source: str) -> None:
        self.json = getattr(args, "json", False)
        self.payload: dict = {"tool_version": __version__, "input": source}
        self.lines: list[str] = []

    def set(self, **items) -> None:
        self.payload.update(items)

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def flush(self) -> None:
        if self.json:
            print(json.dumps(self.payload, indent=2, sort_keys=False))
        else:
            out = "\n".join(self.lines)
            print(out, end="" if out.endswith("\n") else "\n")


def _load_sos(path: str):
    try:
        return read_sos(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_cgp(path: str) -> PresentedCGroup:
    try:
        return PresentedCGroup.from_presentation(read_cgp(path))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _warn_len(args: argparse.Namespace) -> None:
    if getattr(args, "max_len", DEFAULT_MAX_LEN) > 6:
        print(f"warning: --max-len {args.max_len} may take a long time", file=sys.stderr)


def _report_json(report: AxiomReport, dim: int) -> dict:
    w4 = report.axiom4_witness
    return {
        "max_len": report.max_len,
        "ok": report.ok,
        "axiom2": {"ok": report.axiom2_ok, "witness": None if report.axiom2_ok else char_string(report.axiom2_witness, dim)},
        "axiom3": {"ok": report.axiom3_ok, "witness": None if report.axiom3_ok else f2.to_bits(report.axiom3_witness, dim)},
        "axiom4": {
            "ok": report.axiom4_ok,
            "witness": None if w4 is None else {
                "f": [f2.to_bits(a, dim) for a in w4.f],
                "g": [f2.to_bits(a, dim) for a in w4.g],
                "x": f2.to_bits(w4.x, dim),
                "total_length": len(w4.f) + len(w4.g),
            },
        },
        "saturation": {"ok": report.saturation_ok, "phantom": None if report.saturation_ok else char_string(report.phantom, dim)},
        "order_sensitive_length": report.order_sensitive_length,
    }


def _report_text(report: AxiomReport, dim: int) -> list[str]:
    mark = lambda ok: "ok" if ok else "FAIL"
    out = [f"axiom (2): {mark(report.axiom2_ok)}"]
    if not report.axiom2_ok:
        out.append(f"  character positive at -1: {char_string(report.axiom2_witness, dim)}")
    out.append(f"axiom (3): {mark(report.axiom3_ok)}")
    if not report.axiom3_ok:
        out.append(f"  element positive at every character: {f2.to_bits(report.axiom3_witness, dim)}")
    out.append(f"axiom (4) up to length {report.max_len}: {mark(report.axiom4_ok)}")
    if report.axiom4_witness is not None:
        out.append(f"  witness: {report.axiom4_witness.describe(dim)}")
    out.append(f"saturation: {mark(report.saturation_ok)}")
    if not report.saturation_ok:
        out.append(f"  phantom ordering outside X: {char_string(report.phantom, dim)}")
    return out


# -- commands -------------------------------------------------------------------------

def cmd_verify(args) -> int:
    _warn_len(args)
    space = _load_sos(args.file)
    report = verify_axioms(space, args.max_len)
    out = Output(args, args.file)
    out.set(report=_report_json(report, space.dim))
    for line in _report_text(report, space.dim):
        out.text(line)
    out.text("all axioms hold" if report.ok else "not a space of orderings")
    out.flush()
    return 0 if report.ok else 1


def cmd_components(args) -> int:
    space = _load_sos(args.file)
    try:
        comps = components(space)
    except SpaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Output(args, args.file)
    rendered = [serialize_sos(c) for c in comps]
    out.set(count=len(comps), components=rendered)
    out.text(f"components: {len(comps)}")
    for k, text in enumerate(rendered, start=1):
        out.text(f"# component {k}")
        out.text(text.rstrip("\n"))
    out.flush()
    return 0


def cmd_translation(args) -> int:
    space = _load_sos(args.file)
    trans = translation_group(space)
    out = Output(args, args.file)
    basis = [char_string(v, space.dim) for v in trans.basis]
    out.set(dim=trans.dim, basis=basis)
    out.text(f"dim T = {trans.dim}")
    for b in basis:
        out.text(f"basis {b}")
    out.flush()
    return 0


def cmd_classify(args) -> int:
    _warn_len(args)
    space = _load_sos(args.file)
    out = Output(args, args.file)
    try:
        tree = classify(space, None if args.no_verify else args.max_len)
    except InconsistentSpace as exc:
        out.set(error=str(exc))
        out.text(f"not classifiable: {exc}")
        out.flush()
        return 1
    out.set(tree=tree.encode(), tree_json=to_json(tree), rank=rank(tree),
            log2_order=order_log2(tree), log2_frattini=frattini_log2(tree))
    out.text(f"tree: {tree.encode()}")
    out.text(f"rank: {rank(tree)}")
    out.text(f"log2 order: {order_log2(tree)}")
    out.text(f"log2 Frattini: {frattini_log2(tree)}")
    out.flush()
    return 0


def _tree(args):
    try:
        return parse_tree(args.tree)
    except TreeSyntaxError as exc:
        raise InputError(f"tree {args.tree!r}: {exc}") from None


def cmd_build(args) -> int:
    print(serialize_sos(build(_tree(args))), end="")
    return 0


def cmd_realize(args) -> int:
    print(serialize_cgp(realize(_tree(args)).presentation()), end="")
    return 0


def cmd_group(args) -> int:
    group = _load_cgp(args.file)
    out = Output(args, args.file)
    if args.query == "order":
        out.set(log2_order=quotient_order(group))
        out.text(f"log2 order: {quotient_order(group)}")
    elif args.query == "frattini":
        info = frattini(group)
        out.set(log2_order=info.log2_order, commutator_log2_order=info.commutator_log2,
                equals_commutator_subgroup=info.equals_commutator)
        out.text(f"log2 order of Frattini: {info.log2_order}")
        out.text(f"log2 order of commutator image: {info.commutator_log2}")
        if info.equals_commutator is not None:
            out.text(f"Frattini equals commutator image: {'yes' if info.equals_commutator else 'no'}")
    elif args.query == "center":
        try:
            info = center_of_even_subgroup(group)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        n = group.n
        out.set(log2_order=info.log2_order, central_classes=[f2.to_bits(c, n) for c in info.central_classes],
                order4_classes=[f2.to_bits(c, n) for c in info.order4_classes], independent_order4=info.order4_rank)
        out.text(f"log2 order of Z(H): {info.log2_order}")
        out.text(f"independent order-4 central classes outside Frattini: {info.order4_rank}")
        for c in info.order4_classes:
            out.text(f"order-4 class {f2.to_bits(c, n)}")
    else:
        classes = involution_classes(group)
        n = group.n
        out.set(count=len(classes), classes=[f2.to_bits(c.pattern, n) for c in classes])
        out.text(f"involution classes: {len(classes)}")
        for c in classes:
            out.text(f"class {f2.to_bits(c.pattern, n)}")
    out.flush()
    return 0


def cmd_extract(args) -> int:
    _warn_len(args)
    group = _load_cgp(args.file)
    out = Output(args, args.file)
    try:
        space = extract_candidate_space(group)
    except ExtractionError as exc:
        out.set(error=str(exc))
        out.text(f"# extraction failed: {exc}")
        out.flush()
        return 1
    report = verify_axioms(space, args.max_len)
    text = serialize_sos(space)
    out.set(sos=text, report=_report_json(report, space.dim))
    out.text(text.rstrip("\n"))
    for line in _report_text(report, space.dim):
        out.text(f"# {line}")
    out.flush()
    return 0 if report.ok else 1


def cmd_realizable(args) -> int:
    _warn_len(args)
    group = _load_cgp(args.file)
    try:
        verdict = realizable(group, args.max_len)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = Output(args, args.file)
    out.set(
        verdict="consistent" if verdict.consistent else "not realizable",
        summary=verdict.summary,
        evidence=list(verdict.reasons),
        max_len=verdict.max_len,
        presented_log2_order=verdict.presented_log2,
        required_log2_order=verdict.required_log2,
        candidate_tree=None if verdict.tree is None else verdict.tree.encode(),
        axioms=None if verdict.axioms is None else _report_json(verdict.axioms, verdict.candidate.dim),
    )
    out.text(verdict.summary if verdict.consistent else "not realizable")
    for reason in verdict.reasons:
        out.text(f"  {reason}")
    if verdict.tree is not None:
        out.text(f"candidate tree: {verdict.tree.encode()}")
    out.flush()
    return 0 if verdict.consistent else 1


def cmd_equiv(args) -> int:
    a, b = _load_sos(args.a), _load_sos(args.b)
    phi = equivalent(a, b)
    out = Output(args, f"{args.a} {args.b}")
    if phi is None:
        out.set(equivalent=False)
        out.text("not equivalent")
    else:
        images = [f2.to_bits(v, b.dim) for v in phi]
        out.set(equivalent=True, images_of_basis=images)
        out.text("equivalent")
        for i, img in enumerate(images, start=1):
            out.text(f"b{i} -> {img}")
    out.flush()
    return 0 if phi is not None else 1


def cmd_oracle(args) -> int:
    out = Output(args, args.file)
    checks: list[tuple[str, object, object]] = []
    if args.kind == "space":
        space = _load_sos(args.file)
        size = 1 << space.dim
        pairs = sum((k - 1) * size ** k for k in range(2, args.max_len + 1))
        if pairs > ORACLE_PAIR_BUDGET:
            raise InputError(f"exhaustive scan too large ({pairs} form pairs); lower --max-len")
        fast, slow = verify_axioms(space, args.max_len), axiom4_exhaustive(space, args.max_len)
        checks.append(("axiom (2)", fast.axiom2_ok, slow.axiom2_ok))
        checks.append(("axiom (3)", fast.axiom3_ok, slow.axiom3_ok))
        checks.append(("axiom (4)", fast.axiom4_ok, slow.axiom4_ok))
        checks.append(("axiom (4) witness", fast.axiom4_witness, slow.axiom4_witness))
        checks.append(("phantom ordering", fast.phantom, slow.phantom))
        checks.append(("translation group", sorted(translation_group(space)), translations_exhaustive(space)))
        checks.append(("components", component_members(space), components_exhaustive(space)))
    else:
        group = _load_cgp(args.file)
        try:
            table = enumerate_quotient(group.n, list(group.relators))
        except OracleLimit as exc:
            raise InputError(str(exc)) from None
        checks.append(("log2 order", quotient_order(group), table.log2_order))
        checks.append(("log2 Frattini", frattini(group).log2_order, frattini_by_enumeration(table)))
        checks.append(("involution classes", [c.pattern for c in involution_classes(group)],
                       involution_classes_by_enumeration(table)))
    same = all(a == b for _, a, b in checks)
    out.set(identical=same, checks=[{"check": name, "fast": repr(a), "oracle": repr(b), "match": a == b}
                                    for name, a, b in checks])
    for name, a, b in checks:
        out.text(f"{'match' if a == b else 'MISMATCH'}  {name}: fast={a!r} oracle={b!r}")
    out.text("identical" if same else "DIFFERENT")
    out.flush()
    return 0 if same else 1


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgroup", description=__doc__)
    parser.add_argument("--version", action="version", version=f"wgroup {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_text: str, max_len: int | None = None) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="emit JSON")
        if max_len is not None:
            p.add_argument("--max-len", type=_max_len, default=max_len, help=f"form-length bound (default {max_len})")
        p.set_defaults(func=func)
        return p

    add("verify", cmd_verify, "check the axioms", DEFAULT_MAX_LEN).add_argument("file")
    add("components", cmd_components, "connected components").add_argument("file")
    add("translation", cmd_translation, "translation group").add_argument("file")
    p = add("classify", cmd_classify, "structure tree and group orders", DEFAULT_MAX_LEN)
    p.add_argument("file")
    p.add_argument("--no-verify", action="store_true", help="skip the axiom check")
    add("build", cmd_build, "space of orderings for a tree").add_argument("--tree", required=True)
    add("realize", cmd_realize, "presentation for a tree").add_argument("--tree", required=True)
    p = add("group", cmd_group, "queries on a presented group")
    p.add_argument("file")
    p.add_argument("query", choices=["order", "frattini", "center", "involutions"])
    add("extract", cmd_extract, "candidate space of a presentation", DEFAULT_MAX_LEN).add_argument("file")
    add("realizable", cmd_realizable, "look for realizability obstructions", DEFAULT_MAX_LEN).add_argument("file")
    p = add("equiv", cmd_equiv, "equivalence of two spaces")
    p.add_argument("a")
    p.add_argument("b")
    p = add("oracle", cmd_oracle, "compare fast paths with brute force", ORACLE_MAX_LEN)
    p.add_argument("kind", choices=["space", "group"])
    p.add_argument("file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, InputError, ScanTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpaceError, f2.DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
