"""cctlab command line: validate | subdivide | hh | check.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .algkit import AlgebraError, BudgetExceeded, ModuleError, algebra_from_dict
from .checks import CHECKS, CheckConfig, CheckReport, content_hash, run_check, shriek_hh
from .diagram import DiagramError, diagram_from_dict, module_from_dict
from .exalg import QQ, Field
from .fincat import CategoryError, category_from_dict, category_to_dict, classify, subdivide


class InputError(Exception):
    pass


# ---------------------------------------------------------------- file loading

def load_json(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _resolve(value, base: Path):
    """Bundles may reference other JSON files by relative path."""
    if isinstance(value, str):
        return load_json(base / value)
    return value


def resolve_diagram_raw(raw: dict, base: Path) -> dict:
    out = dict(raw)
    if "category" not in raw or "algebras" not in raw:
        raise InputError("diagram bundle needs 'category' and 'algebras'")
    out["category"] = _resolve(raw["category"], base)
    out["algebras"] = {o: _resolve(a, base) for o, a in raw["algebras"].items()}
    return out


def kind_of(raw) -> str:
    if not isinstance(raw, dict):
        return "unknown"
    if "modules" in raw:
        return "module"
    if "algebras" in raw:
        return "diagram"
    if "mul" in raw or ("dim" in raw and "unit" in raw):
        return "algebra"
    if "objects" in raw:
        return "category"
    return "unknown"


def load_diagram(path: str | Path, field: Field | None = None):
    path = Path(path)
    raw = resolve_diagram_raw(load_json(path), path.parent)
    try:
        return diagram_from_dict(raw, field)
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc}") from None


def load_module(path: str | Path, diagram, field: Field | None = None):
    path = Path(path)
    raw = load_json(path)
    if diagram is None:
        if "diagram" not in raw:
            raise InputError(f"{path}: module bundle needs a diagram (a 'diagram' entry or a preceding file)")
        draw = _resolve(raw["diagram"], path.parent)
        base = path.parent / raw["diagram"] if isinstance(raw["diagram"], str) else path
        diagram = diagram_from_dict(resolve_diagram_raw(draw, Path(base).parent), field)
    try:
        return module_from_dict(diagram, raw)
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc}") from None


# ---------------------------------------------------------------- cache

def cache_dir() -> Path:
    env = os.environ.get("CCTLAB_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "cctlab"


def cache_get(key: str) -> str | None:
    p = cache_dir() / f"{key}.json"
    try:
        return p.read_text()
    except OSError:
        return None


def cache_put(key: str, text: str) -> None:
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, d / f"{key}.json")


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text)
    if args.json:
        sys.stdout.write(text)


def _field(args) -> Field:
    return Field(args.mod) if args.mod else QQ


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    report = CheckReport("validate", {"paths": list(args.paths)})
    diagram = None
    F = _field(args) if args.mod else None
    for p in args.paths:
        raw = load_json(p)
        kind = kind_of(raw)
        item = {"path": str(p), "kind": kind}
        try:
            if kind == "category":
                C = category_from_dict(raw)
                item["checked"] = ["identities", "closure", "dom/cod", "associativity"]
                item["classify"] = str(classify(C))
            elif kind == "algebra":
                algebra_from_dict(raw, F)
                item["checked"] = ["shape", "associativity", "unit"]
            elif kind == "diagram":
                diagram = load_diagram(p, F)
                item["checked"] = ["category", "algebras", "homs", "functoriality"]
            elif kind == "module":
                load_module(p, diagram, F)
                item["checked"] = ["objectwise actions", "linearity of T", "functoriality of T"]
            else:
                raise InputError(f"{p}: unrecognised bundle (no objects, mul, algebras or modules)")
            item["valid"] = True
        except (CategoryError, AlgebraError, DiagramError, ModuleError) as exc:
            item["valid"] = False
            item["error"] = str(exc)
            report.fail(f"{p}: {exc}")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{p}: malformed field: {exc}") from None
        report.witnesses.append(item)
    report.instance = content_hash("validate", [load_json(p) for p in args.paths], __version__)
    _emit(args, "validate", report.to_json())
    if not args.json:
        for w in report.witnesses:
            status = "ok" if w["valid"] else f"INVALID: {w['error']}"
            print(f"{w['path']} [{w['kind']}] {status}")
    return 0 if report.outcome else 1


def cmd_subdivide(args) -> int:
    path = Path(args.category)
    raw = load_json(path)
    C = category_from_dict(raw)
    report = CheckReport("subdivide", {"twice": args.twice})
    report.instance = content_hash("subdivide", raw, args.twice, __version__)
    sub = subdivide(C)
    out_dir = Path(args.out) if args.out else path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = path.stem
    files = []
    first = out_dir / f"{stem}.sub.json"
    first.write_text(json.dumps(category_to_dict(sub.category), indent=1) + "\n")
    files.append(first)
    report.witnesses.append({"input": str(classify(C)), "objects": len(sub.category.objects),
                             "non_identity": len(sub.category.non_identity()),
                             "classify": str(classify(sub.category))})
    if args.twice:
        sub2 = subdivide(sub.category)
        second = out_dir / f"{stem}.sub2.json"
        second.write_text(json.dumps(category_to_dict(sub2.category), indent=1) + "\n")
        files.append(second)
        report.witnesses.append({"objects": len(sub2.category.objects),
                                 "non_identity": len(sub2.category.non_identity()),
                                 "classify": str(classify(sub2.category))})
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        for f, w in zip(files, report.witnesses):
            print(f"{f}: {w['objects']} objects, {w['non_identity']} non-identity morphisms, {w['classify']}")
    return 0


def cmd_hh(args) -> int:
    F = _field(args)
    dpath = Path(args.diagram)
    # key on the resolved bundle so edits to referenced files invalidate the entry
    key_parts = ["hh", resolve_diagram_raw(load_json(dpath), dpath.parent), args.max_degree, args.method,
                 F.spec(), __version__]
    if args.bimodule:
        mraw = dict(load_json(args.bimodule))
        mraw.pop("diagram", None)
        key_parts.append(mraw)
    key = content_hash(*key_parts)
    text = None if args.no_cache else cache_get(key)
    if text is None:
        A = load_diagram(dpath, F)
        if classify(A.category).name != "POSET":
            raise InputError("hh needs a poset base; run `cctlab subdivide` on the category first")
        M = load_module(args.bimodule, A, F) if args.bimodule else None
        if M is not None and not M.bimodule:
            raise InputError("hh needs a bimodule bundle (left and right actions)")
        dims = shriek_hh(A, M, args.max_degree, args.method)
        label = f"{dpath.stem}/{Path(args.bimodule).stem if args.bimodule else 'A'}"
        table = {"label": label, "field": F.spec(), "method": args.method, "instance": key,
                 "rows": [{"n": n, "dim": d} for n, d in enumerate(dims)]}
        text = json.dumps(table, indent=1, sort_keys=True) + "\n"
        if not args.no_cache:
            cache_put(key, text)
    _emit(args, "hh", text)
    if not args.json:
        table = json.loads(text)
        print(f"{table['label']}  ({table['field']})")
        for row in table["rows"]:
            print(f"  H^{row['n']} = {row['dim']}")
    return 0


def _run_to_json(name: str, cfg: CheckConfig) -> str:
    return run_check(name, cfg).to_json()


def cmd_check(args) -> int:
    names = list(CHECKS) if args.name == "all" else [args.name]
    cfg = CheckConfig(seed=args.seed, max_degree=args.max_degree, field=_field(args), samples=args.samples)
    keys = {name: content_hash("check", name, cfg.params(), __version__) for name in names}
    texts = {name: None if args.no_cache else cache_get(keys[name]) for name in names}
    todo = [name for name in names if texts[name] is None]
    if args.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            fresh = dict(zip(todo, pool.map(_run_to_json, todo, [cfg] * len(todo))))
    else:
        fresh = {name: _run_to_json(name, cfg) for name in todo}
    status = 0
    for name in names:  # assembled in a fixed order whatever finished first
        text = texts[name]
        if text is None:
            text = fresh[name]
            if not args.no_cache:
                cache_put(keys[name], text)
        data = json.loads(text)
        _emit(args, name, text)
        if not args.json:
            mark = "PASS" if data["outcome"] else "FAIL"
            print(f"{name:<11} {mark}  {len(data['witnesses'])} instances, {len(data['controls'])} controls")
            for msg in data["failures"]:
                print(f"    {msg}")
        if not data["outcome"]:
            status = 1
    return status


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cctlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cctlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="write JSON reports into DIR")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    common.add_argument("--mod", type=int, metavar="P", help="compute over GF(P) instead of QQ")
    common.add_argument("--no-cache", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="validate category/algebra/diagram/module files")
    v.add_argument("paths", nargs="+")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("subdivide", parents=[common], help="write C' (and C'') for a category file")
    s.add_argument("category")
    s.add_argument("--twice", action="store_true")
    s.set_defaults(func=cmd_subdivide)

    h = sub.add_parser("hh", parents=[common], help="Hochschild dimensions of A! with coefficients in M!")
    h.add_argument("diagram")
    h.add_argument("bimodule", nargs="?")
    h.add_argument("--max-degree", type=int, default=3)
    h.add_argument("--method", choices=("auto", "bar", "reduced"), default="reduced")
    h.set_defaults(func=cmd_hh)

    c = sub.add_parser("check", parents=[common], help="run a verification suite")
    c.add_argument("name", choices=CHECKS + ("all",))
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--max-degree", type=int, default=3)
    c.add_argument("--samples", type=int)
    c.add_argument("--jobs", type=int, default=1, help="run independent suites in parallel processes")
    c.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.mod is not None:
            Field(args.mod)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CategoryError, DiagramError, BudgetExceeded, AlgebraError, ModuleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
