"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL`` line (also when run as a
script: ``python3 tests/test_acceptance.py``) and asserts the criterion at
its stated tolerance.  Criterion 1 checks the relations exactly as printed
and is expected to fail; see the decisions ledger for the analysis.
"""

import sys
import time

import numpy as np
import pytest

from subcurv import Kind, Probe, build_example, christoffel, christoffel_fd, curvature, generalized_tensor
from subcurv.gallery import NAMES, export_text
from subcurv.suite import RunConfig, render, run_suite


@pytest.fixture
def say(capsys):
    """Print one status line per criterion, bypassing output capture."""
    def emit(n, ok, detail, extra=()):
        with capsys.disabled():
            print(f"\ncriterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
            for line in extra:
                print(f"      {line}")
    return emit


def _records(report, example, prefix):
    for key, ident in report["examples"][example]["identities"].items():
        if key.startswith(prefix):
            yield key, ident


def test_criterion_1_oneill_as_printed(say):
    t0 = time.perf_counter()
    rep = run_suite(RunConfig(examples=["hopf", "warped_interval_s1"], points=100,
                              families=("oneill",)))
    elapsed = time.perf_counter() - t0
    bad = []
    for ex in ("hopf", "warped_interval_s1"):
        for key, ident in _records(rep, ex, "oneill/"):
            worst = ident["summary"]["max_rel_printed"]
            if worst >= 1e-8:
                bad.append(f"{ex}:{key} printed {worst:.2e}, corrected "
                           f"{ident['summary']['max_rel_corrected']:.1e}")
    ok = not bad and elapsed < 30
    say(1, ok, f"{6 - len({b.split(':')[1].split()[0] for b in bad})}/6 printed relations hold, "
               f"{elapsed:.1f}s" + ("" if not bad else "; failing: " + "; ".join(bad)))
    assert elapsed < 30
    assert not bad, "printed relations 3 and 4 do not hold; corrected forms do (see ledger)"


def test_criterion_2_hopf_base_curvature(say):
    s = build_example("hopf").spec
    worst = 0.0
    vals = []
    for k, x in enumerate(s.sample(np.random.default_rng(2), 20)):
        p = Probe(s, x, frame_seed=k)
        X, Y = p.Xs
        # independent computations: base curvature at π(p), total curvature, |A_X Y|
        JX, JY = p.geo.J @ X, p.geo.J @ Y
        Kb = curvature(s.base, s.project(x)).sectional(JX, JY)
        Kt = curvature(s.total, x).sectional(X, Y)
        a = p.A(X, Y)
        a2 = p.g(a, a)
        worst = max(worst, abs(Kb - (Kt + 3 * a2)), abs(Kb - 4), abs(Kt - 1), abs(a2 - 1))
        vals.append((Kb, Kt, a2))
    Kb, Kt, a2 = vals[0]
    ok = worst < 1e-8
    say(2, ok, f"K_base={Kb:.12f} K_total={Kt:.12f} |A_X Y|^2={a2:.12f}; max residual {worst:.1e}")
    assert ok


def test_criterion_3_scalar_relation(say):
    rep = run_suite(RunConfig(examples=["hopf", "product_s2_s1"], points=100,
                              families=("scalar",)))
    hopf = rep["examples"]["hopf"]["identities"]["scalar"]
    prod = rep["examples"]["product_s2_s1"]["identities"]["scalar"]
    convs = hopf["summary"]["norm_conventions"]
    r0 = hopf["records"][0]
    a2 = r0["extras"]["normA2_block"], r0["extras"]["normA2_full"]
    prod_lhs = max(abs(r["lhs"] - 2) for r in prod["records"])
    ok = (len(convs) == 1 and hopf["summary"]["max_rel_printed"] < 1e-7
          and prod["summary"]["max_rel_printed"] < 1e-7 and prod_lhs < 1e-7)
    say(3, ok, f"hopf matches convention {convs} (|A|^2 block={a2[0]:.6f}, full={a2[1]:.6f}); "
               f"hopf max rel {hopf['summary']['max_rel_printed']:.1e}; "
               f"product 2=0+2 max rel {prod['summary']['max_rel_printed']:.1e}")
    assert ok


def test_criterion_4_ricci(say):
    rep = run_suite(RunConfig(examples=list(NAMES), points=100, families=("ricci",)))
    worst = max(ident["summary"]["max_rel_printed"]
                for ex in NAMES for _, ident in _records(rep, ex, "ricci/"))
    ok = worst < 1e-8
    say(4, ok, f"(i)-(iii) on {len(NAMES)} gallery entries x 100 points, max rel {worst:.1e}")
    assert ok


def test_criterion_5_s3_flatness(say):
    s = build_example("hopf").spec
    rng = np.random.default_rng(5)
    worst = {k: 0.0 for k in Kind}
    l_dev = 0.0
    for x in s.total.sample(rng, 100):
        c = curvature(s.total, x)
        g = c.metric
        frame = []
        for v in rng.standard_normal((3, 3)):
            for u in frame:
                v = v - (u @ g @ v) * u
            frame.append(v / np.sqrt(v @ g @ v))
        quad = [frame[i] for i in rng.integers(0, 3, 4)]
        for kind in Kind:
            if kind is Kind.L:
                continue
            worst[kind] = max(worst[kind], abs(generalized_tensor(kind, c, *quad).value),
                              abs(generalized_tensor(kind, c, frame[0], frame[1], frame[1], frame[0]).value))
        l_dev = max(l_dev, abs(generalized_tensor(Kind.L, c, frame[0], frame[1], frame[1], frame[0]).value + 3))
    ok = all(v < 1e-8 for v in worst.values()) and l_dev < 1e-8
    say(5, ok, ", ".join(f"|{k.value}|<={v:.1e}" for k, v in worst.items() if k is not Kind.L)
         + f", |L*(X,Y,Y,X)+3|<={l_dev:.1e}")
    assert ok


def test_criterion_6_generalized_relations(say):
    rep = run_suite(RunConfig(examples=list(NAMES), points=100, families=("generalized",)))
    rels = {k: v for k, v in rep["relations"].items() if k.startswith("generalized/")}
    winners = {k: v["winner"] for k, v in rels.items()}
    both_fail = sum(ident["summary"]["verdict"] == "both_fail"
                    for ex in NAMES for _, ident in _records(rep, ex, "generalized/"))
    corrected = sorted(k for k, w in winners.items() if w == "corrected")
    stable = all(w in ("printed", "corrected") for w in winners.values())
    expected = [f"generalized/{k.value}/HVHV" for k in Kind] + ["generalized/C*/HHHH"]
    ok = len(rels) == 30 and stable and both_fail == 0 and all(e in corrected for e in expected)
    say(6, ok, f"30 relations, {len(corrected)} need a corrected form, "
               f"{30 - len(corrected)} hold as printed, {both_fail} both_fail; corrected: "
                + ", ".join(k.split('/', 1)[1] for k in corrected),
        extra=[f"{k}: {'; '.join(rels[k]['corrections'])}" for k in corrected])
    assert ok


def test_criterion_7_corollaries(say):
    rep = run_suite(RunConfig(examples=["hopf", "warped_interval_s1"], points=100,
                              families=("corollary",)))
    hopf = dict(_records(rep, "hopf", "corollary/"))
    checked = {k: v for k, v in hopf.items() if k.split("/")[1] in ("P*", "L*", "V*", "W*")}
    delta = max(v["summary"]["max_delta_printed"] for v in checked.values())
    resid = max(min(v["summary"]["max_rel_printed"],
                    v["summary"]["max_rel_corrected"]
                    if v["summary"]["max_rel_corrected"] is not None else np.inf)
                for v in checked.values())
    normN = max(r["extras"]["normN"] for v in checked.values() for r in v["records"])
    warped = dict(_records(rep, "warped_interval_s1", "corollary/"))
    skipped = all(v["summary"]["verdict"] == "skipped" and v["summary"]["skip_reason"] == "N != 0"
                  for v in warped.values())
    ok = delta < 1e-8 and resid < 1e-8 and normN < 1e-10 and skipped
    say(7, ok, f"hopf |N|<={normN:.1e}, corollary vs full form delta {delta:.1e}, "
               f"residual {resid:.1e} over {len(checked)} forms; warped skipped: {skipped}")
    assert ok


def test_criterion_8_structural_zeros(say):
    s = build_example("product_s2_s1").spec
    rep = run_suite(RunConfig(examples=["product_s2_s1"], points=100))
    worst, worst_printed = 0.0, 0.0
    for key, ident in rep["examples"]["product_s2_s1"]["identities"].items():
        winner = rep["relations"][key]["winner"]
        field = "abs_corrected" if winner == "corrected" else "abs_printed"
        for r in ident["records"]:
            worst = max(worst, r[field])
            worst_printed = max(worst_printed, r["abs_printed"])
    tan = 0.0
    for k, x in enumerate(s.sample(np.random.default_rng(8), 100)):
        geo = Probe(s, x, frame_seed=k).geo
        tan = max(tan, np.abs(geo.T).max(), np.abs(geo.A).max(), np.abs(geo.N).max())
    ok = worst < 1e-12 and tan < 1e-12
    say(8, ok, f"max residual of holding variant {worst:.1e} (printed forms max {worst_printed:.1e}, "
               f"the printed V*/HVHV omits its scalar term), max |T|,|A|,|N| {tan:.1e}")
    assert ok


def test_criterion_9_numerical_hygiene(say):
    fd_err, sym_err = 0.0, 0.0
    rng = np.random.default_rng(9)
    for name in NAMES:
        s = build_example(name).spec
        for m in (s.total, s.base):
            for x in m.sample(rng, 100):
                fd_err = max(fd_err, np.abs(christoffel(m, x) - christoffel_fd(m, x, 1e-4)).max())
        for x in s.total.sample(rng, 20):
            R = curvature(s.total, x).riemann_lowered
            scale = max(1.0, np.abs(R).max())
            for other in (R + R.transpose(1, 0, 2, 3), R + R.transpose(0, 1, 3, 2),
                          R - R.transpose(2, 3, 0, 1),
                          R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)):
                sym_err = max(sym_err, np.abs(other).max() / scale)
    ok = fd_err < 1e-5 and sym_err < 1e-9
    say(9, ok, f"autodiff vs central differences {fd_err:.1e}; symmetries/Bianchi {sym_err:.1e}")
    assert ok


def test_criterion_10_determinism_round_trip(say, tmp_path):
    cfg = dict(examples=["hopf", "kaluza_klein_generic"], points=5, seed=99)
    a, b = run_suite(RunConfig(**cfg)), run_suite(RunConfig(**cfg))
    same = all(render(a, f) == render(b, f) for f in ("json", "csv", "text"))
    delta = 0.0
    for name in NAMES:
        path = tmp_path / f"{name}.sub"
        path.write_text(export_text(name))
        ra = run_suite(RunConfig(examples=[name], points=5))["examples"][name]["identities"]
        rb = run_suite(RunConfig(files=[str(path)], points=5))["examples"][name]["identities"]
        for key in ra:
            for x, y in zip(ra[key]["records"], rb[key]["records"]):
                assert x["status"] == y["status"]
                for f in ("lhs", "rhs_printed", "rhs_corrected", "rel_printed", "rel_corrected"):
                    if x.get(f) is not None:
                        delta = max(delta, abs(x[f] - y[f]))
    ok = same and delta < 1e-10
    say(10, ok, f"byte-identical reports: {same}; max export/reimport delta {delta:.1e}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
