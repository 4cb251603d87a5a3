"""Command-line front end: parse a ring expression, run a check, emit a report."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from . import __version__
from .cech import build_sequence, check_exactness
from .errors import BudgetExceeded, MalformedInput, SchemeCheckError
from .expr import parse_ring_expr, to_ring, to_text
from .localization import DefinitionsDisagree, definitions_equivalence_check, localize, strickland_check
from .ring_core import (
    DEFAULT_MAX_RING_SIZE,
    FiniteRing,
    RingHom,
    enumerate_homs,
    submonoid_generated_by,
)
from .scheme import affine_is_scheme, mk_affine, scheme_check
from .sheaf import DEFAULT_MAX_COVERS, is_sheaf
from .spectrum import basis_check, enumerate_ideals, spec_points, zariski_topology
from .structure_sheaf import compare_constructions, global_sections_check, structure_sheaf

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_TRUNCATED = 0, 1, 2, 3

ELEMENT_HELP = (
    "Elements are integers in the ring's own indexing: residues for Z/n; "
    "for GF(p)[x]/(f) the element sum c_i x^i is index sum c_i p^i; "
    "for A x B the pair (a, b) is index a*|B| + b; quotient cosets are "
    "numbered in order of their least member."
)


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    verdicts: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    budgets: dict[str, int] = field(default_factory=dict)
    truncated: dict[str, bool] = field(default_factory=dict)
    error: str | None = None
    version: str = __version__
    schema: int = SCHEMA_VERSION

    @property
    def exit_status(self) -> int:
        if self.error is not None:
            return EXIT_INPUT
        if any(self.truncated.values()):
            return EXIT_TRUNCATED
        return EXIT_OK if all(self.verdicts.values()) else EXIT_FAIL

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def jsonable(obj: Any) -> Any:
    """Deterministic JSON-ready copy: sets sorted, tuples as lists, other objects as str."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        items = [jsonable(x) for x in obj]
        return sorted(items, key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return str(obj)


def parse_elements(text: str, R: FiniteRing) -> tuple[int, ...]:
    try:
        elts = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise MalformedInput(f"bad element list {text!r}; expected comma-separated integers") from None
    if not elts:
        raise MalformedInput("empty element list")
    bad = [e for e in elts if not 0 <= e < R.size]
    if bad:
        raise MalformedInput(f"element {bad[0]} is out of range for a ring of size {R.size}")
    return elts


def load_ring(text: str, max_size: int) -> tuple[str, FiniteRing]:
    e = parse_ring_expr(text)
    return to_text(e), to_ring(e, max_size)


# -- subcommands ----------------------------------------------------------------


def cmd_spec(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    X = zariski_topology(R)
    basis = basis_check(R)
    rep.details = {
        "ring_size": R.size,
        "ideals": [str(I) for I in enumerate_ideals(R)],
        "primes": [str(p) for p in spec_points(R)],
        "opens": [X.describe(U) for U in X.opens],
        "discrete": X.is_discrete,
    }
    rep.verdicts["basic_opens_form_basis"] = basis.ok
    if basis.witness:
        rep.witnesses["basic_opens_form_basis"] = basis.witness


def _monoid(args, R: FiniteRing):
    if (args.at is None) == (args.monoid is None):
        raise MalformedInput("give exactly one of --at or --monoid")
    gens = parse_elements(args.at if args.at is not None else args.monoid, R)
    if args.at is not None and len(gens) != 1:
        raise MalformedInput("--at takes a single element")
    return gens, submonoid_generated_by(R, gens)


def cmd_localize(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    gens, S = _monoid(args, R)
    L = localize(R, S)
    report = strickland_check(L.canonical, S)
    rep.inputs["monoid_generators"] = list(gens)
    rep.details = {
        "monoid": sorted(S.members),
        "size": L.ring.size,
        "kernel": sorted(L.canonical.kernel),
        "canonical": list(L.canonical.images),
        "representatives": [list(rs) for rs in L.representatives],
    }
    for name in ("cond_units", "cond_fractions", "cond_kernel"):
        c = getattr(report, name)
        rep.verdicts[name] = c.ok
        if not c.ok:
            rep.witnesses[name] = jsonable(c.witness)
    rep.verdicts["is_localization"] = report.verdict


def cmd_sheafcheck(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    O = structure_sheaf(R)
    X = O.presheaf.space
    verdict = is_sheaf(O.presheaf, args.max_covers)
    rep.budgets["covers_checked"] = verdict.covers_checked
    rep.truncated["is_sheaf"] = verdict.truncated
    rep.verdicts["is_sheaf"] = verdict.ok
    if verdict.failure:
        rep.witnesses["is_sheaf"] = jsonable(verdict.failure)
    cmp = compare_constructions(R)
    rep.verdicts["constructions_agree"] = cmp.ok
    if not cmp.ok:
        rep.witnesses["constructions_agree"] = jsonable(cmp.report.witness)
    gs = global_sections_check(R)
    rep.verdicts["global_sections"] = gs.ok
    rep.details = {
        "sections": {X.describe(U): O.presheaf(U).size for U in X.opens},
        "global_sections_size": gs.size,
    }


def cmd_cech(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    fs = parse_elements(args.gens, R)
    rep.inputs["gens"] = list(fs)
    seq = build_sequence(R, fs)
    v = check_exactness(seq)
    rec = v.record()
    rep.verdicts["exact"] = v.exact
    rep.details = {k: jsonable(x) for k, x in rec.items() if k not in ("witness", "exact")}
    rep.details["bezout"] = jsonable(seq.bezout)
    if v.witness is not None:
        rep.witnesses["exact"] = jsonable(v.witness)


def cmd_scheme(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    X = mk_affine(R, args.max_covers)
    rep.truncated["is_sheaf"] = X.base.sheaf_certificate.truncated
    rep.budgets["covers_checked"] = X.base.sheaf_certificate.covers_checked
    cert = affine_is_scheme(R)
    v = scheme_check(X, cert, args.max_covers)
    rep.verdicts["is_sheaf"] = X.base.sheaf_certificate.ok
    rep.verdicts["stalks_local"] = all(w.is_local for w in X.stalk_certificates.values())
    rep.verdicts["is_scheme"] = v.ok
    if not v.ok:
        rep.witnesses["is_scheme"] = jsonable({"uncovered": v.uncovered, "failures": v.member_failures})
    rep.details = {"points": [str(p) for p in X.space.points], "members": len(cert.members)}


def cmd_equiv(args, rep: Report):
    _, R = load_ring(args.ring, args.max_ring_size)
    gens, S = _monoid(args, R)
    rep.inputs["monoid_generators"] = list(gens)
    family = []
    for chunk in args.family or []:
        for text in chunk.split(";"):
            if text.strip():
                family.append(load_ring(text, args.max_ring_size)[1])
    rep.inputs["family"] = [A.label for A in family]
    if args.target:
        label, T = load_ring(args.target, args.max_ring_size)
        rep.inputs["target"] = label
        homs: list[RingHom] = list(enumerate_homs(R, T))
    else:
        homs = [localize(R, S).canonical]
    instances = []
    agree = True
    for h in homs:
        try:
            r = definitions_equivalence_check(h, S, family)
        except DefinitionsDisagree as exc:
            agree = False
            rep.witnesses.setdefault("definitions_agree", {"hom": list(h.images), "message": str(exc)})
            continue
        instances.append({"hom": list(h.images), "definitions": list(r.verdicts), "family": r.family})
    rep.verdicts["definitions_agree"] = agree
    rep.details = {"instances": instances}


COMMANDS = {
    "spec": cmd_spec,
    "localize": cmd_localize,
    "sheafcheck": cmd_sheafcheck,
    "cech": cmd_cech,
    "scheme": cmd_scheme,
    "equiv": cmd_equiv,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-ring-size", type=int, default=DEFAULT_MAX_RING_SIZE)
    common.add_argument("--max-covers", type=int, default=DEFAULT_MAX_COVERS)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress human-readable output")

    parser = argparse.ArgumentParser(
        prog="schemecheck",
        description="Verify localizations, spectra, structure sheaves and scheme certificates of finite rings.",
        epilog=ELEMENT_HELP,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, epilog=ELEMENT_HELP)
        p.add_argument("ring", help="ring expression, e.g. 'Z/12' or 'GF(2)[x]/(x^2+x+1) x Z/3'")
        return p

    add("spec", "prime ideals and Zariski topology")
    p = add("localize", "localize and check the localization predicate")
    p.add_argument("--at", help="single element f; localize at <f>")
    p.add_argument("--monoid", help="comma-separated generators of the submonoid")
    add("sheafcheck", "structure sheaf, sheaf axiom, construction comparison")
    p = add("cech", "exactness of 0 -> R -> prod R[1/f_i] -> prod R[1/f_i f_j]")
    p.add_argument("--gens", required=True, help="comma-separated f_1,...,f_n")
    add("scheme", "Spec(R) as a scheme, with its certificate checked")
    p = add("equiv", "compare the three characterizations of a localization")
    p.add_argument("--at", help="single element f; use the submonoid <f>")
    p.add_argument("--monoid", help="comma-separated generators of the submonoid")
    p.add_argument("--family", action="append", help="test rings, ';'-separated or repeated")
    p.add_argument("--target", help="check every hom from the ring into this target")
    return parser


def _colour(ok: bool, text: str, enabled: bool) -> str:
    if not enabled:
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def render(rep: Report, colour: bool) -> str:
    lines = [f"{rep.command} {rep.inputs.get('ring', '')}".rstrip()]
    if rep.error is not None:
        lines.append(f"error: {rep.error}")
        return "\n".join(lines) + "\n"
    for k, v in sorted(rep.details.items()):
        if isinstance(v, (list, dict)) and len(json.dumps(v)) > 200:
            v = f"<{len(v)} entries; see --json>"
        lines.append(f"{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    for k, ok in sorted(rep.verdicts.items()):
        flag = " (truncated)" if rep.truncated.get(k) else ""
        lines.append(f"{k}: " + _colour(ok, "true" if ok else "false", colour) + flag)
        if k in rep.witnesses:
            lines.append(f"  witness: {json.dumps(rep.witnesses[k])}")
    return "\n".join(lines) + "\n"


def run_command(argv: Sequence[str]) -> Report:
    """Run one command and return its report; never raises on bad input."""
    args = build_parser().parse_args(list(argv))
    rep = Report(
        command=args.command,
        inputs={"ring": args.ring},
        budgets={"max_ring_size": args.max_ring_size, "max_covers": args.max_covers},
    )
    try:
        rep.inputs["ring"] = to_text(parse_ring_expr(args.ring))
        COMMANDS[args.command](args, rep)
    except BudgetExceeded as exc:
        rep.truncated["budget"] = True
        rep.witnesses["budget"] = str(exc)
    except (MalformedInput, SchemeCheckError) as exc:
        rep.error = str(exc)
    rep.details = jsonable(rep.details)
    rep.witnesses = jsonable(rep.witnesses)
    rep._args = args  # type: ignore[attr-defined]
    return rep


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    rep = run_command(argv)
    args = rep._args  # type: ignore[attr-defined]
    if args.json:
        text = rep.to_json()
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    if not args.quiet:
        colour = sys.stdout.isatty() and "NO_COLOR" not in os.environ
        out = sys.stderr if rep.error is not None else sys.stdout
        out.write(render(rep, colour and out is sys.stdout))
    return rep.exit_status


if __name__ == "__main__":
    raise SystemExit(main())
