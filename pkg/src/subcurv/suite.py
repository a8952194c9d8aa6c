"""Run the identity catalogue over sampled points and build reports.

Work fans out over sample points (``SUBCURV_THREADS`` caps the worker count,
``0`` or unset means automatic); results are collected in point order, so a
report depends only on its configuration.
"""

import csv
import io
import json
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import identities as I
from .errors import ConfigError, DimensionError, SubcurvError
from .gallery import NAMES, build_example
from .probe import Probe
from .submersion import parse_submersion

FAMILIES = ("oneill", "ricci", "scalar", "generalized", "corollary")
FORMATS = ("json", "csv", "text")
NORM_CONVENTION = "block"


@dataclass
class RunConfig:
    examples: list = field(default_factory=list)
    files: list = field(default_factory=list)
    points: int = 100
    seed: int = 42
    tolerance: float = 1e-8
    families: tuple = FAMILIES
    format: str = "json"
    output: str = None
    threads: int = None

    def validate(self):
        if not self.examples and not self.files:
            raise ConfigError("no examples or definition files given")
        for name in self.examples:
            if name not in NAMES:
                raise ConfigError(f"unknown example {name!r}; known: {', '.join(NAMES)}")
        if int(self.points) < 1:
            raise ConfigError("points must be >= 1")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be > 0")
        bad = set(self.families) - set(FAMILIES)
        if bad:
            raise ConfigError(f"unknown families {sorted(bad)}; known: {', '.join(FAMILIES)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        return self


def thread_count(requested=None):
    if requested is None:
        raw = os.environ.get("SUBCURV_THREADS", "0")
        try:
            requested = int(raw)
        except ValueError:
            raise ConfigError(f"SUBCURV_THREADS must be an integer, got {raw!r}")
    if requested < 0:
        raise ConfigError("SUBCURV_THREADS must be >= 0")
    if requested == 0:
        return min(8, os.cpu_count() or 1)
    return requested


def catalogue(families=FAMILIES):
    """Relations evaluated per point, in report order (corollaries separate)."""
    rels = []
    if "oneill" in families:
        rels += I.ONEILL
    if "ricci" in families:
        rels += I.RICCI
    if "generalized" in families:
        rels += I.GENERALIZED
    return rels


def frame_seed(seed, k):
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def _vector_rng(seed, k, i):
    return np.random.default_rng([seed, k, i])


def _evaluate_point(spec, x, k, cfg):
    """All (identity key, record dict) cells at sample point ``k``."""
    fs = frame_seed(cfg.seed, k)
    tol = cfg.tolerance
    try:
        probe = Probe(spec, x, frame_seed=fs)
    except SubcurvError as exc:
        return [(key, _error(k, x, fs, exc)) for key in _keys(cfg.families)]
    out = []
    for i, rel in enumerate(catalogue(FAMILIES)):
        if rel.id.family in cfg.families:
            rng = _vector_rng(cfg.seed, k, i)
            out.append((rel.id.key, _cell(lambda: I.evaluate(rel, probe, rng, tol, fs), k, x, fs)))
    if "scalar" in cfg.families:
        out.append((I.SCALAR_ID.key,
                    _cell(lambda: I.eval_scalar(spec, x, fs, tol, probe), k, x, fs)))
    if "corollary" in cfg.families:
        out += _corollary_cells(spec, x, k, fs, probe, cfg)
    return out


def _corollary_cells(spec, x, k, fs, probe, cfg):
    base = len(catalogue(FAMILIES))
    try:
        rep = I.eval_umbilical_corollaries(
            spec, x, fs, cfg.tolerance, probe,
            rng_for=lambda j: _vector_rng(cfg.seed, k, base + j))
    except SubcurvError as exc:
        return [(rel.id.key, _error(k, x, fs, exc)) for rel in I.COROLLARIES]
    if not rep.applicable:
        return [(rel.id.key, _skip(k, x, fs, rep.reason, normN=rep.normN))
                for rel in I.COROLLARIES]
    out = []
    for rel, rec in rep.records:
        if isinstance(rec, Exception):
            out.append((rel.id.key, _skip(k, x, fs, str(rec))))
            continue
        d = _record(rec, k)
        d["extras"].update(normN=rep.normN, umbilicity=rep.totally_umbilical)
        out.append((rel.id.key, d))
    return out


def _keys(families):
    keys = [r.id.key for r in catalogue(FAMILIES) if r.id.family in families]
    if "scalar" in families:
        keys.append(I.SCALAR_ID.key)
    if "corollary" in families:
        keys += [r.id.key for r in I.COROLLARIES]
    return keys


def _relations():
    rels = {r.id.key: r for r in catalogue(FAMILIES) + I.COROLLARIES}
    return rels


def _record(rec, k):
    d = rec.as_dict()
    d.pop("identity")
    d = {"point_index": k, "status": "ok", **d}
    d.setdefault("extras", {})
    return d


def _skip(k, x, fs, reason, **extras):
    d = {"point_index": k, "status": "skipped", "seed": fs,
         "point": [float(c) for c in x], "reason": reason}
    if extras:
        d["extras"] = extras
    return d


def _error(k, x, fs, exc):
    return {"point_index": k, "status": "error", "seed": fs,
            "point": [float(c) for c in x], "reason": f"{type(exc).__name__}: {exc}"}


def _cell(thunk, k, x, fs):
    try:
        return _record(thunk(), k)
    except DimensionError as exc:
        return _skip(k, x, fs, str(exc))
    except (SubcurvError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return _error(k, x, fs, exc)


# ---------------------------------------------------------------------------
# aggregation

def _stats(values):
    if not values:
        return None, None
    return max(values), statistics.median(values)


def summarize(records, tol, relation=None):
    """Per-example summary of one identity's records."""
    ok = [r for r in records if r["status"] == "ok"]
    skipped = [r for r in records if r["status"] == "skipped"]
    errors = [r for r in records if r["status"] == "error"]
    rp = [r["rel_printed"] for r in ok]
    rc = [r["rel_corrected"] for r in ok if r["rel_corrected"] is not None]
    has_corr = bool(ok) and len(rc) == len(ok)
    holds_p = bool(ok) and all(v < tol for v in rp)
    holds_c = has_corr and all(v < tol for v in rc)
    if errors:
        verdict = "error"
    elif not ok:
        verdict = "skipped"
    elif holds_p:
        verdict = I.Verdict.PRINTED.value
    elif holds_c:
        verdict = I.Verdict.CORRECTED.value
    else:
        verdict = I.Verdict.FAIL.value
    mp, medp = _stats(rp)
    mc, medc = _stats(rc)
    out = {
        "evaluated": len(ok), "skipped": len(skipped), "errors": len(errors),
        "max_rel_printed": mp, "median_rel_printed": medp,
        "max_rel_corrected": mc, "median_rel_corrected": medc,
        "holds_printed": holds_p, "holds_corrected": holds_c,
        "verdict": verdict,
        "variant": {"exact_as_printed": "printed",
                    "exact_sign_corrected": "corrected"}.get(verdict, "none"),
    }
    if skipped and not ok:
        out["skip_reason"] = skipped[0]["reason"]
    if errors:
        out["error"] = errors[0]["reason"]
    if relation is not None and relation.informational:
        out["informational"] = True
    if ok and "matching_conventions" in ok[0].get("extras", {}):
        common = set(("block", "full"))
        for r in ok:
            common &= set(r["extras"]["matching_conventions"])
        out["norm_conventions"] = sorted(common)
    if ok and "delta_printed" in ok[0].get("extras", {}):
        out["max_delta_printed"] = max(r["extras"]["delta_printed"] for r in ok)
        dc = [r["extras"]["delta_corrected"] for r in ok if "delta_corrected" in r["extras"]]
        if dc:
            out["max_delta_corrected"] = max(dc)
    return out


def _winner(summaries):
    """Variant holding at every evaluated point of every example, if any."""
    live = [s for s in summaries if s["evaluated"]]
    if not live:
        return "skipped"
    if any(s["errors"] for s in summaries):
        return "error"
    if all(s["holds_printed"] for s in live):
        return "printed"
    if all(s["holds_corrected"] for s in live):
        return "corrected"
    return "none"


# ---------------------------------------------------------------------------
# running

@dataclass
class ExampleTarget:
    name: str
    spec: object
    source: str


def resolve_targets(cfg):
    targets = [ExampleTarget(n, build_example(n).spec, "gallery") for n in cfg.examples]
    for path in cfg.files:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}")
        spec = parse_submersion(text)
        name = spec.name or p.stem
        targets.append(ExampleTarget(name, spec, str(path)))
    seen = set()
    for t in targets:
        if t.name in seen:
            raise ConfigError(f"example name {t.name!r} given twice")
        seen.add(t.name)
    return targets


def run_example(spec, cfg, pool=None):
    """Records of every identity at ``cfg.points`` sample points of ``spec``."""
    xs = spec.sample(np.random.default_rng(cfg.seed), int(cfg.points))
    jobs = [(k, x) for k, x in enumerate(xs)]
    runner = pool.map if pool is not None else map
    cells = list(runner(lambda job: _evaluate_point(spec, job[1], job[0], cfg), jobs))
    table = {key: [] for key in _keys(cfg.families)}
    for point_cells in cells:
        for key, rec in point_cells:
            table[key].append(rec)
    return table


def run_suite(cfg):
    """Evaluate the configured families; returns the report as a plain dict."""
    cfg.validate()
    targets = resolve_targets(cfg)
    rels = _relations()
    examples = {}
    with ThreadPoolExecutor(max_workers=thread_count(cfg.threads)) as pool:
        for t in targets:
            table = run_example(t.spec, cfg, pool)
            idents = {}
            for key, records in table.items():
                idents[key] = {"summary": summarize(records, cfg.tolerance, rels.get(key)),
                               "records": records}
            examples[t.name] = {
                "source": t.source,
                "dims": {"total": t.spec.total.dim, "base": t.spec.base.dim,
                         "fibre": t.spec.fibre_dim},
                "identities": idents,
            }
    relations = {}
    for key in _keys(cfg.families):
        rel = rels.get(key)
        sums = [ex["identities"][key]["summary"] for ex in examples.values()]
        info = {"winner": _winner(sums)}
        if rel is not None:
            info["corrections"] = list(rel.corrections)
            if rel.notes:
                info["notes"] = list(rel.notes)
            if rel.informational:
                info["informational"] = True
        relations[key] = info
    failing = [key for key, info in relations.items()
               if not info.get("informational") and info["winner"] in ("none", "error")]
    return {
        "suite": {
            "points": int(cfg.points), "seed": int(cfg.seed), "tolerance": float(cfg.tolerance),
            "families": [f for f in FAMILIES if f in cfg.families],
            "norm_convention": NORM_CONVENTION,
            "residual": "|lhs - rhs| / max(1, |lhs|, |rhs|)",
        },
        "examples": examples,
        "relations": relations,
        "failing": failing,
        "passed": not failing,
    }


def exit_code(report):
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# formatting

def to_json(report):
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


CSV_FIELDS = ("example", "identity", "point_index", "status", "seed", "point", "lhs",
              "rhs_printed", "rhs_corrected", "rel_printed", "rel_corrected", "verdict",
              "reason")


def to_csv(report):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for ex, data in report["examples"].items():
        for key, ident in data["identities"].items():
            for r in ident["records"]:
                row = {f: r.get(f, "") for f in CSV_FIELDS}
                row.update(example=ex, identity=key,
                           point=";".join(repr(c) for c in r["point"]))
                row = {f: "" if v is None else (repr(v) if isinstance(v, float) else v)
                       for f, v in row.items()}
                w.writerow(row)
    return buf.getvalue()


def _fmt(v):
    return "-" if v is None else f"{v:.3e}"


def to_text(report):
    s = report["suite"]
    lines = [f"subcurv suite: points={s['points']} seed={s['seed']} "
             f"tolerance={s['tolerance']:g} norms={s['norm_convention']}"]
    for ex, data in report["examples"].items():
        d = data["dims"]
        lines.append("")
        lines.append(f"== {ex} (n={d['total']}, m={d['base']}, k={d['fibre']})")
        lines.append(f"{'family':<12} {'identity':<18} {'max_rel':>10} {'verdict':<22} variant")
        for key, ident in data["identities"].items():
            sm = ident["summary"]
            parts = key.split("/")
            family, rest = parts[0], "/".join(parts[1:]) or "-"
            v = sm["variant"]
            worst = sm["max_rel_corrected"] if v == "corrected" else sm["max_rel_printed"]
            tail = v
            if sm["verdict"] == "skipped":
                tail = f"- ({sm.get('skip_reason', '')})"
            elif sm["verdict"] == "error":
                tail = f"- ({sm.get('error', '')})"
            if "norm_conventions" in sm:
                tail += f" [norms: {','.join(sm['norm_conventions']) or 'none'}]"
            if sm.get("informational"):
                tail += " [informational]"
            lines.append(f"{family:<12} {rest:<18} {_fmt(worst):>10} {sm['verdict']:<22} {tail}")
    corrected = [k for k, v in report["relations"].items() if v["winner"] == "corrected"]
    lines.append("")
    lines.append(f"relations needing a corrected form: {len(corrected)}")
    for key in corrected:
        for c in report["relations"][key].get("corrections", []):
            lines.append(f"  {key}: {c}")
    lines.append("")
    if report["failing"]:
        lines.append("FAILED: " + ", ".join(report["failing"]))
    else:
        lines.append("PASSED")
    return "\n".join(lines) + "\n"


WRITERS = {"json": to_json, "csv": to_csv, "text": to_text}


def render(report, fmt):
    if fmt not in WRITERS:
        raise ConfigError(f"unknown format {fmt!r}")
    return WRITERS[fmt](report)
