"""Command-line front end: ``exactum validate|gen|complete|check|exp|suite``.

Exit codes: 0 holds, 1 refuted, 2 undecided within the cap, 3 input error.
"""
from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .catprovider import load_fixture, parse_group
from .construct import (
    build_exponential,
    build_exponential_proj,
    decide_cartesian_closure,
    oracle_exponential,
)
from .excomp import ExCompletion, projectivity_report
from .fincat import FinCategory, parse_spec, serialize_spec, validate_category
from .relation import PseudoEqRel, find_pseudo_eq_rel, identity_relation, is_identity_relation
from .results import InputError, PreconditionError, SearchResult, SoundnessError, Verdict
from .invariants import FAIL, UNDECIDED, FixtureSpec, run_fixture, span_equality, write_default_corpus
from .wsp import (
    search_gw_dependent_product,
    search_gwsp,
    search_pseudo_simple_product,
    search_weak_simple_product,
)

HOLDS, REFUTED, UNDECIDED_V, ERROR = "holds", "refuted", "undecided", "error"
EXIT = {HOLDS: 0, REFUTED: 1, UNDECIDED_V: 2, ERROR: 3}
SEVERITY = [HOLDS, UNDECIDED_V, REFUTED, ERROR]
FIXTURE_NAMES = ["one", "chain2", "diamond", "m3", "two-infinities", "finset", "free-gsets"]

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "exactum report",
    "type": "object",
    "required": ["tool_version", "fixture", "command", "verdict", "payload", "caps", "duration_ms"],
    "properties": {
        "tool_version": {"type": "string"},
        "fixture": {"type": "string"},
        "command": {"type": "string"},
        "verdict": {"enum": [HOLDS, REFUTED, UNDECIDED_V, ERROR]},
        "payload": {"type": "object"},
        "caps": {"type": "object"},
        "duration_ms": {"type": ["integer", "null"]},
    },
    "additionalProperties": False,
}


@dataclass
class Report:
    fixture: str
    command: str
    verdict: str
    payload: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    duration_ms: int | None = None
    tool_version: str = __version__

    @property
    def exit_code(self) -> int:
        return EXIT[self.verdict]

    def to_json(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "fixture": self.fixture,
            "command": self.command,
            "verdict": self.verdict,
            "payload": jsonable(self.payload),
            "caps": jsonable(self.caps),
            "duration_ms": self.duration_ms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(data["fixture"], data["command"], data["verdict"], data["payload"], data["caps"],
                   data["duration_ms"], data["tool_version"])

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.to_json(), sort_keys=True, indent=2)
        lines = [f"fixture: {self.fixture}", f"command: {self.command}", f"verdict: {self.verdict}"]
        if self.command == "suite":
            return "\n".join(lines + _suite_lines(self.payload))
        for k, v in sorted(jsonable(self.payload).items()):
            lines.append(f"  {k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
        if self.caps:
            lines.append(f"caps: {json.dumps(jsonable(self.caps), sort_keys=True, ensure_ascii=False)}")
        return "\n".join(lines)


def _suite_lines(payload) -> list:
    out = []
    for row in payload["fixtures"]:
        out.append(f"{row['fixture']}: {row['verdict']}")
        for c in row["checks"]:
            out.append(f"  {c['name']}: {c['status']} ({c['decided']}/{c['instances']} decided)")
    return out


def jsonable(x):
    """Deterministic JSON-compatible rendering of results and witnesses."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, PseudoEqRel):
        return repr(x)
    if isinstance(x, SearchResult):
        return {"verdict": x.verdict.value, "witness": jsonable(x.witness), "reason": x.reason}
    if dataclasses.is_dataclass(x):
        return {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if hasattr(x, "_asdict"):
        return jsonable(x._asdict())
    return repr(x)


def _verdict_of(v: Verdict) -> str:
    return {Verdict.FOUND: HOLDS, Verdict.NOT_FOUND: REFUTED, Verdict.UNDECIDED: UNDECIDED_V}[v]


# --------------------------------------------------------------------------
# argument resolution


def default_cap() -> int:
    raw = os.environ.get("EXACTUM_DEFAULT_CAP", "4")
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"EXACTUM_DEFAULT_CAP must be an integer, got {raw!r}")
    if cap < 0:
        raise InputError("EXACTUM_DEFAULT_CAP must be non-negative")
    return cap


def resolve_fixture(name: str, args) -> tuple[object, dict]:
    """A category handle from a fixture name, a ``.cat`` table or a ``.json`` config."""
    cap = args.cap if getattr(args, "cap", None) is not None else None
    path = Path(name)
    if name.endswith(".json"):
        spec = _read_config(path)
        if cap is not None:
            spec.cap = cap
        return spec.build(), {"cap": spec.cap}
    if name.endswith(".cat"):
        c = _read_table(path)
        report = validate_category(c)
        if not report.ok:
            raise InputError(f"{name}: category laws fail: {sorted(report.laws())}")
        return c.as_handle(), {}
    if name not in FIXTURE_NAMES:
        raise InputError(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURE_NAMES)} or a .cat/.json file")
    group = None
    if getattr(args, "group", None):
        group = parse_group(_read(Path(args.group)))
    if name in ("finset", "free-gsets"):
        cap = default_cap() if cap is None else cap
        return load_fixture(name, cap=cap, group=group), {"cap": cap}
    return load_fixture(name, k=args.k), {}


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def _read_table(path: Path) -> FinCategory:
    return parse_spec(_read(path))


def _read_config(path: Path) -> FixtureSpec:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc.msg}", exc.lineno, exc.colno)
    return FixtureSpec.from_json(data, path.stem)


def _find_object(p, token: str):
    for o in p.objects():
        if str(o) == token:
            return o
    raise InputError(f"unknown object {token!r}")


def resolve_arrow(p, token: str):
    """``SRC>DST``, ``SRC>DST#i`` (i-th arrow in hom order) or a table arrow id."""
    token = token.strip()
    if ">" in token:
        ends, _, idx = token.partition("#")
        s, _, t = ends.partition(">")
        hom = p.hom(_find_object(p, s.strip()), _find_object(p, t.strip()))
        try:
            i = int(idx) if idx else 0
            return hom[i]
        except (ValueError, IndexError):
            raise InputError(f"no arrow {token!r} ({len(hom)} in that hom-set)")
    if token.startswith("id:"):
        return p.identity(_find_object(p, token[3:]))
    for a in p.objects():
        for b in p.objects():
            for f in p.hom(a, b):
                if f[2] == token:
                    return f
    raise InputError(f"unknown arrow {token!r}")


def parse_rel_file(p, text: str, name: str) -> PseudoEqRel:
    """Line ``rel NAME on X1 => X0 : x1, x2`` with arrows as in :func:`resolve_arrow`."""
    for lineno, line in enumerate(text.splitlines(), 1):
        # whole-line comments only: '#' also selects arrows inside a hom-set
        line = line.strip()
        if not line.startswith("rel "):
            continue
        try:
            head, arrows = line[4:].split(":", 1)
            rname, _, objs = head.partition(" on ")
            x1, x0 = [t.strip() for t in objs.split("=>")]
            d0, d1 = [t.strip() for t in arrows.split(",")]
        except ValueError:
            raise InputError("malformed relation line", lineno)
        if rname.strip() != name:
            continue
        f0, f1 = resolve_arrow(p, d0), resolve_arrow(p, d1)
        if (f0[0], f0[1]) != (_find_object(p, x1), _find_object(p, x0)) or (f1[0], f1[1]) != (f0[0], f0[1]):
            raise InputError(f"relation {name!r}: arrows do not match X1 => X0", lineno)
        rel = find_pseudo_eq_rel(p, f0, f1)
        if rel is None:
            raise InputError(f"relation {name!r} is not a pseudo equivalence relation", lineno)
        return rel
    raise InputError(f"no relation named {name!r}")


def resolve_object(e: ExCompletion, token: str) -> PseudoEqRel:
    """``gamma:X``, ``rel:FILE#NAME`` or ``#i`` (i-th enumerated object)."""
    p = e.base
    if token.startswith("gamma:"):
        return e.gamma(_find_object(p, token[6:]))
    if token.startswith("rel:"):
        path, _, name = token[4:].partition("#")
        return parse_rel_file(p, _read(Path(path)), name)
    if token.startswith("#"):
        obs = e.objects()
        try:
            return obs[int(token[1:])]
        except (ValueError, IndexError):
            raise InputError(f"no enumerated object {token!r} ({len(obs)} objects)")
    return e.gamma(_find_object(p, token))


def resolve_rel(p, token: str | None, y0, span=None) -> PseudoEqRel:
    if token is None or token == "identity":
        return identity_relation(p, y0)
    if token == "equality":
        if span is None:
            raise InputError("--rel equality needs a span")
        rel = span_equality(p, *span)
        if rel is None:
            raise InputError("equality relation outside cap")
        return rel
    if token.startswith("rel:"):
        path, _, name = token[4:].partition("#")
        return parse_rel_file(p, _read(Path(path)), name)
    raise InputError(f"unknown relation {token!r}")


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> Report:
    c = _read_table(Path(args.file))
    rep = validate_category(c)
    payload = {"objects": len(c.objects), "arrows": len(c.arrows), "violations": rep.violations[:20]}
    return Report(args.file, "validate", HOLDS if rep.ok else REFUTED, payload)


def table_of(p, name: str | None = None) -> FinCategory:
    """A finite table presentation of any enumerated handle."""
    ids = {}
    arrows = []
    for a in p.objects():
        for b in p.objects():
            for i, f in enumerate(p.hom(a, b)):
                if f == p.identity(a):
                    continue
                aid = f"{a}_{b}" if len(p.hom(a, b)) == 1 else f"{a}_{b}_{i}"
                ids[f] = aid
                arrows.append((aid, str(a), str(b)))
    comp = {}
    for f, fid in ids.items():
        for g, gid in ids.items():
            if f[1] == g[0]:
                h = p.compose(g, f)
                comp[(gid, fid)] = ids.get(h, f"id:{h[0]}")
    return FinCategory(name or p.name, [str(o) for o in p.objects()], arrows, comp)


def cmd_gen(args) -> Report:
    p, caps = resolve_fixture(args.fixture, args)
    text = serialize_spec(table_of(p))
    if args.out:
        Path(args.out).write_text(text)
    return Report(args.fixture, "gen", HOLDS, {"spec": text if not args.out else args.out}, caps)


def cmd_complete(args) -> Report:
    p, caps = resolve_fixture(args.fixture, args)
    e = ExCompletion(p, caps.get("cap"))
    obs = e.objects()
    homs = [[len(e.hom(a, b)) for b in obs] for a in obs]
    payload = {"objects": [repr(o) for o in obs], "hom_counts": homs, "exhaustive": e.exhaustive}
    return Report(args.fixture, "complete", HOLDS, payload, caps)


def _span(p, text: str | None):
    if not text:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError("--span takes two comma-separated arrows")
    f, g = (resolve_arrow(p, t) for t in parts)
    if f[0] != g[0]:
        raise InputError("span legs must share their domain")
    return f, g


def _all_spans(p):
    for y in p.objects():
        for j in p.objects():
            for f in p.hom(y, j):
                for x in p.objects():
                    for g in p.hom(y, x):
                        yield f, g


def cmd_check(args) -> Report:
    p, caps = resolve_fixture(args.fixture, args)
    kind = args.kind
    cmd = f"check {kind}"
    if kind in ("ccc", "lccc"):
        v = decide_cartesian_closure(p, caps.get("cap"), kind == "lccc")
        payload = {"routes": v.routes, "witness": v.witnesses.get("projective") if v.value is False else None,
                   "oracle_witness": v.witnesses.get("oracle") if v.value is False else None}
        return Report(args.fixture, cmd, _verdict_of(v.verdict), payload, {**caps, "exhaustive": p.exhaustive})
    if kind == "projectivity":
        e = ExCompletion(p, caps.get("cap"))
        targets = [resolve_object(e, args.object)] if args.object else list(e.objects())
        rows = {}
        worst = HOLDS
        for a in targets:
            rep = projectivity_report(e, a)
            rows[repr(a)] = {"projective": rep.projective.value, "internally_projective": rep.internally_projective.value}
            if rep.internally_projective is Verdict.UNDECIDED and worst == HOLDS:
                worst = UNDECIDED_V
        if len(targets) == 1:
            worst = _verdict_of(rep.projective)
            if rep.projective is Verdict.FOUND and rep.internally_projective is not Verdict.FOUND:
                worst = _verdict_of(rep.internally_projective)
        return Report(args.fixture, cmd, worst, {"objects": rows}, caps)
    spans = [_span(p, args.span)] if args.span else list(_all_spans(p))
    results = []
    for s in spans:
        if kind == "wsp":
            r = search_weak_simple_product(p, *s)
        elif kind == "psp":
            r = search_pseudo_simple_product(p, *s)
        elif kind == "gwsp":
            rel = resolve_rel(p, args.rel, s[0][0], s)
            try:
                r = search_gwsp(p, *s, rel, weak_mode=args.weak_mode)
            except PreconditionError as exc:
                if args.span:
                    raise InputError(str(exc))
                continue
        else:  # gwdp: the span is read as g: Y0 -> X, f: X -> J
            g, f = s
            if g[1] != f[0]:
                if args.span:
                    raise InputError("gwdp expects --span g,f with g: Y0 -> X and f: X -> J")
                continue
            rel = resolve_rel(p, args.rel, g[0])
            try:
                r = search_gw_dependent_product(p, rel, g, f)
            except PreconditionError as exc:
                if args.span:
                    raise InputError(str(exc))
                continue
        results.append((s, r))
    verdicts = [r.verdict for _, r in results]
    if Verdict.NOT_FOUND in verdicts:
        verdict = REFUTED
    elif Verdict.UNDECIDED in verdicts:
        verdict = UNDECIDED_V
    else:
        verdict = HOLDS
    if args.span:
        payload = {"result": results[0][1]}
    else:
        failing = next((s for s, r in results if r.verdict is Verdict.NOT_FOUND), None)
        payload = {"instances": len(results), "failing": failing,
                   "counts": {v.value: verdicts.count(v) for v in Verdict}}
    return Report(args.fixture, cmd, verdict, payload, caps)


def cmd_exp(args) -> Report:
    p, caps = resolve_fixture(args.fixture, args)
    e = ExCompletion(p, caps.get("cap"))
    A, B = resolve_object(e, args.a), resolve_object(e, args.b)
    methods = ["gwsp", "reduct", "oracle"] if args.method == "all" else [args.method]
    out = {}
    for m in methods:
        if m == "gwsp":
            if not is_identity_relation(p, A):
                raise InputError("--method gwsp needs a projective exponent gamma:X")
            r = build_exponential_proj(e, A.x0, B)
        elif m == "reduct":
            r = build_exponential(e, A, B)
        else:
            r = oracle_exponential(e, A, B)
        out[m] = r
    found = [r.witness.obj for r in out.values() if r.found]
    iso = all(e.find_iso(found[0], o) is not None for o in found[1:]) if found else None
    verdicts = {r.verdict for r in out.values()}
    if iso is False:
        raise SoundnessError("exponential methods disagree")
    if Verdict.UNDECIDED in verdicts:
        verdict = UNDECIDED_V
    elif verdicts == {Verdict.FOUND}:
        verdict = HOLDS
    elif verdicts == {Verdict.NOT_FOUND}:
        verdict = REFUTED
    else:
        raise SoundnessError(f"exponential methods disagree: {sorted(v.value for v in verdicts)}")
    payload = {
        m: {"verdict": r.verdict.value, "object": repr(r.witness.obj) if r.found else None, "reason": r.reason}
        for m, r in out.items()
    }
    if found:
        payload["canonical"] = repr(e.canonical(found[0]) or found[0])
    return Report(args.fixture, "exp", verdict, payload, caps)


# --------------------------------------------------------------------------
# corpus runner


def _fixture_verdict(checks) -> str:
    statuses = [c.status for c in checks]
    if FAIL in statuses:
        return REFUTED
    if UNDECIDED in statuses:
        return UNDECIDED_V
    return HOLDS


def _run_spec(spec: FixtureSpec) -> dict:
    try:
        checks = run_fixture(spec)
    except (InputError, PreconditionError) as exc:
        return {"fixture": spec.name, "verdict": ERROR, "error": str(exc), "checks": []}
    return {
        "fixture": spec.name,
        "verdict": _fixture_verdict(checks),
        "checks": [jsonable(c.to_json()) for c in checks],
    }


def load_corpus(directory: Path) -> list[FixtureSpec]:
    if not directory.is_dir():
        raise InputError(f"corpus directory {directory} does not exist")
    files = sorted(directory.glob("*.json"))
    if not files:
        raise InputError(f"corpus directory {directory} has no fixture configs")
    return [_read_config(f) for f in files]


def check_suite(directory: Path, jobs: int = 1) -> Report:
    specs = load_corpus(directory)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_spec, specs))
    else:
        rows = [_run_spec(s) for s in specs]
    rows.sort(key=lambda r: r["fixture"])
    worst = max((r["verdict"] for r in rows), key=SEVERITY.index)
    payload = {"fixtures": rows, "summary": {r["fixture"]: r["verdict"] for r in rows}}
    # no timing in suite output: it must be byte-identical across runs
    return Report(str(directory), "suite", worst, payload, {"jobs_independent": True})


def cmd_suite(args) -> Report:
    directory = Path(args.corpus)
    if args.init:
        write_default_corpus(directory)
    return check_suite(directory, args.jobs)


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="exactum", description="Exact completions and cartesian closure, decided by search.")
    ap.add_argument("--version", action="version", version=f"exactum {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None, help="size cap for generated providers")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--k", type=int, default=4, help="truncation for two-infinities")
    common.add_argument("--group", default=None, help="group file for free-gsets")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="parse and validate a .cat table")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("gen", parents=[common], help="print a fixture as a .cat table")
    p.add_argument("fixture")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("complete", parents=[common], help="enumerate the exact completion")
    p.add_argument("fixture")
    p.set_defaults(fn=cmd_complete)

    p = sub.add_parser("check", parents=[common], help="decide a property of a fixture")
    p.add_argument("kind", choices=["ccc", "lccc", "wsp", "psp", "gwsp", "gwdp", "projectivity"])
    p.add_argument("fixture")
    p.add_argument("--span", default=None, help="two arrows, e.g. '0>T,0>p'")
    p.add_argument("--rel", default=None, help="identity | equality | rel:FILE#NAME")
    p.add_argument("--object", default=None, help="gamma:X | rel:FILE#NAME | #i")
    p.add_argument("--weak-mode", action="store_true", dest="weak_mode")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("exp", parents=[common], help="exponential of two completion objects")
    p.add_argument("fixture")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--method", choices=["gwsp", "reduct", "oracle", "all"], default="all")
    p.set_defaults(fn=cmd_exp)

    p = sub.add_parser("suite", parents=[common], help="run the invariant suite over a corpus")
    p.add_argument("corpus")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--init", action="store_true", help="write the default corpus into the directory first")
    p.set_defaults(fn=cmd_suite)
    return ap


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    as_json = argv is not None and "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        as_json = args.json
        start = time.perf_counter()
        report = args.fn(args)
        if args.command != "suite":
            report.duration_ms = int((time.perf_counter() - start) * 1000)
    except InputError as exc:
        print(f"exactum: error: {exc}", file=err)
        return EXIT[ERROR]
    except PreconditionError as exc:
        print(f"exactum: precondition failed: {exc}", file=err)
        return EXIT[ERROR]
    except SoundnessError as exc:
        print(f"exactum: internal soundness failure: {exc}", file=err)
        return EXIT[ERROR]
    print(report.render(as_json), file=out)
    return report.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
