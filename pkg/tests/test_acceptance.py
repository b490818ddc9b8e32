"""Acceptance criteria; each test records one PASS/FAIL line, echoed in the terminal summary."""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from symkilling import cone, gallot, invariants as inv, sasaki
from symkilling import geometry as geo
from symkilling import killing as kil
from symkilling.suites import chain_values
from symkilling.young import (
    T2, T21, T22, Tableau, exchange_defect, hook_product, irrep_dimension, project,
    young_symmetrize,
)

SEED = 42


def record(label: str, ok: bool, detail: str):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _metric(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)


def _maxabs(a):
    return float(np.max(np.abs(a)))


def test_criterion_01_hook_numbers():
    t = time.perf_counter()
    hooks = [hook_product(s) for s in ((2,), (2, 1), (2, 2))]
    ms = 1000 * (time.perf_counter() - t)
    record("1", hooks == [2, 3, 12] and ms < 1.0, f"hooks={hooks} time={ms:.3f}ms")


def test_criterion_02_projector_suite():
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    worst = {"idempotence": 0.0, "eigen21": 0.0, "eigen22": 0.0, "exchange": 0.0}
    colT = Tableau(((1, 3), (2,)))
    for _ in range(1000):
        b = project(T21, rng.normal(size=(3,) * 3))
        g = project(T22, rng.normal(size=(3,) * 4))
        s = project(T2, rng.normal(size=(3, 3)))
        for T, p in ((T2, s), (T21, b), (T22, g)):
            worst["idempotence"] = max(worst["idempotence"], _maxabs(project(T, p) - p))
        worst["eigen21"] = max(worst["eigen21"], _maxabs(young_symmetrize(T21, b) - 3 * b))
        worst["eigen22"] = max(worst["eigen22"], _maxabs(young_symmetrize(T22, g) - 12 * g))
        bc = project(colT, rng.normal(size=(3,) * 3), adjoint=True)
        worst["exchange"] = max(worst["exchange"], exchange_defect(g, (2, 2), 1, 2),
                                exchange_defect(bc, (2, 1), 1, 2, adjoint=True))
    sec = time.perf_counter() - t
    ok = max(worst.values()) < 1e-12 and sec < 5.0
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items())
    record("2", ok, f"{detail} trials=1000 time={sec:.2f}s")


def test_criterion_03_dimension_table():
    t = time.perf_counter()
    irr = [irrep_dimension((2, 2), n) for n in (2, 3, 4)]
    kd = [kil.killing_dimension(geo.RoundSphere(n, 1.0), n_loops=20, seed=SEED) for n in (2, 3)]
    bound = [kil.killing_upper_bound(n) for n in (2, 3)]
    sec = time.perf_counter() - t
    ok = irr == [1, 6, 20] and kd == [6, 20] and kd == bound and sec < 120
    record("3", ok, f"irrep(2,2)={irr} killing_dimension={kd} bound={bound} loops=20 "
                    f"time={sec:.1f}s")


@pytest.fixture(scope="module")
def chain_suite():
    """10 ambient tensors x 50 points on the unit S^2 and S^3, plus bump controls."""
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    worst: dict = {}
    controls = {"killing": np.inf, "prolongation": np.inf, "pair": np.inf, "horizontal": np.inf}
    for n in (2, 3):
        M = geo.RoundSphere(n, 1.0)
        for _ in range(10):
            kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(n + 1, rng))
            for _ in range(50):
                for k, v in chain_values(M, kf, geo.sample_point(M, rng)).items():
                    worst[k] = max(worst.get(k, 0.0), v)
        for _ in range(3):
            bf = kil.bump_field(M, rng)
            u = geo.sample_point(M, rng)
            controls["killing"] = min(controls["killing"], kil.killing_residual(bf, M, u))
            controls["prolongation"] = min(controls["prolongation"],
                                           max(kil.prolongation_defect(bf, M, u)))
            controls["pair"] = min(controls["pair"],
                                   max(kil.pair_defect(bf, kil.C_kappa_field(bf, M), M, u)))
            controls["horizontal"] = min(controls["horizontal"],
                                         cone.S_kappa_horizontal_defect(bf, M, u))
    return worst, controls, time.perf_counter() - t


def test_criterion_04_equivalence_chain(chain_suite):
    worst, controls, sec = chain_suite
    limits = {"killing": 1e-7, "prolongation": 1e-6, "pair": 1e-6, "horizontal": 1e-7,
              "nullity": 1e-7}
    ok = all(worst[k] < v for k, v in limits.items())
    ok = ok and min(controls.values()) > 1e-3 and sec < 180
    detail = " ".join(f"{k}={worst[k]:.1e}" for k in limits)
    ctrl = " ".join(f"{k}={v:.2g}" for k, v in controls.items())
    record("4", ok, f"{detail} controls[{ctrl}] time={sec:.1f}s")


def test_criterion_05_kappa_from_C(chain_suite):
    worst, _, _ = chain_suite
    record("5", worst["kappa_from_C"] < 1e-5, f"relative error={worst['kappa_from_C']:.1e}")


def test_criterion_06_identities(chain_suite):
    worst, _, _ = chain_suite
    keys = ("weitzenboeck", "dtr_vs_divergence", "ds_vs_dtr", "ricci_first_form",
            "ricci_second_form")
    ok = all(worst[k] < 1e-5 for k in keys)
    record("6", ok, " ".join(f"{k}={worst[k]:.1e}" for k in keys))


def test_criterion_07_special_forms():
    rng = np.random.default_rng(SEED)
    f1 = f2 = fx = 0.0
    for n in (2, 3, 4):
        for _ in range(5):
            G = _metric(rng, n)
            R1 = geo.unit_curvature(G)
            k = project(T2, rng.normal(size=(n, n)))
            k1 = project(T21, rng.normal(size=(n,) * 3))
            f1 = max(f1, _maxabs(kil.F1(k, R1) - kil.F1_unit_rhs(k, G)))
            f2 = max(f2, _maxabs(kil.F2(k, k1, R1, np.zeros((n,) + R1.shape))
                                 - kil.F2_unit_rhs(k1, G)))
            Ginv = np.linalg.inv(G)
            R = np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
            DR = np.stack([np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
                           for _ in range(n)])
            Dk = rng.normal(size=(n,) * 3)
            fx = max(fx, _maxabs(kil.F2(k, Dk, R, DR) - kil.F2_expanded(k, Dk, R, DR)))
    ok = max(f1, f2, fx) < 1e-10
    record("7", ok, f"F1 special={f1:.1e} F2 special={f2:.1e} compact-vs-expanded={fx:.1e}")


def test_criterion_08_cone_suite():
    rng = np.random.default_rng(SEED)
    flat = 0.0
    for n in (2, 3):
        M = geo.RoundSphere(n, 1.0)
        for _ in range(5):
            flat = max(flat, _maxabs(cone.cone_curvature(M, geo.sample_point(M, rng))))
    Ms = geo.ScaledSphere(2, 4.0)
    u = geo.sample_point(Ms, rng)
    A = cone.cone_curvature(Ms, u)
    oracle = _maxabs(A - cone.cone_curvature_oracle(Ms, u))
    trip = 0.0
    for n in (2, 3):
        for _ in range(10):
            t = cone.ConeTriple(project(T2, rng.normal(size=(n, n))),
                                project(T21, rng.normal(size=(n,) * 3)),
                                project(T22, rng.normal(size=(n,) * 4)))
            trip = max(trip, (cone.decompose(cone.assemble(t)) - t).maxabs())
            S = kil.random_curvature_tensor(n + 1, rng)
            trip = max(trip, _maxabs(cone.assemble(cone.decompose(S)) - S))
    ok = flat < 1e-8 and oracle < 1e-6 and trip < 1e-12
    record("8", ok, f"|R_hat| unit spheres={flat:.1e} scaled vs FD={oracle:.1e} "
                    f"(|R_hat|={_maxabs(A):.2f}) round trip={trip:.1e}")


def test_criterion_09_sasaki_suite():
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    kres = corr = 0.0
    spans = []
    for kind, dim in (("sasaki", 3), ("3sasaki", 7)):
        S = sasaki.make_structure(kind, dim)
        u = geo.sample_point(S.model, rng)
        for i in range(1, S.count + 1):
            for j in range(i, S.count + 1):
                kres = max(kres, kil.killing_residual(sasaki.sasaki_killing_tensor(S, i, j),
                                                      S.model, u))
                corr = max(corr, max(sasaki.cone_correspondence_defect(S, i, j, u).values()))
        spans.append(sasaki.sasaki_span_dimension(S, seed=SEED))
    sec = time.perf_counter() - t
    ok = kres < 1e-7 and corr < 1e-6 and spans == [2, 7] and sec < 120
    record("9", ok, f"killing={kres:.1e} correspondence={corr:.1e} spans={spans} time={sec:.1f}s")


def _gallot_measure(funcs_for, rng):
    out = {"e2": 0.0, "killing": 0.0, "rough": 0.0, "dtr_added_laplacian": 0.0, "dtr_derived": 0.0,
           "control": np.inf}
    for n in (2, 3):
        M = geo.RoundSphere(n, 1.0)
        for f in funcs_for(M):
            for _ in range(2):
                u = geo.sample_point(M, rng)
                ids = gallot.gallot_identities(f, M, u)
                out["e2"] = max(out["e2"], gallot.e2_residual(f, M, u))
                out["killing"] = max(out["killing"],
                                     kil.killing_residual(gallot.kappa_f_field(f, M), M, u))
                out["rough"] = max(out["rough"], ids["rough_laplacian"])
                out["dtr_added_laplacian"] = max(out["dtr_added_laplacian"], ids["dtr_added_laplacian"])
                out["dtr_derived"] = max(out["dtr_derived"], ids["dtr_derived"])
        u = geo.sample_point(M, rng)
        out["control"] = min(out["control"], gallot.e2_residual(gallot.chart_square(), M, u))
    return out


def test_criterion_10_first_harmonics():
    """Linear functions with the (3n+1)/2 trace factor."""
    rng = np.random.default_rng(SEED)
    m = _gallot_measure(lambda M: [gallot.first_harmonic(M, rng.normal(size=M.n + 1))
                                   for _ in range(2)], rng)
    ok = (m["e2"] < 1e-5 and m["killing"] < 1e-6 and m["rough"] < 1e-5
          and m["dtr_added_laplacian"] < 1e-5 and m["control"] > 1e-3)
    record("10", ok, f"first harmonics: e2={m['e2']:.2g} kappa_f killing={m['killing']:.2g} "
                     f"rough laplacian={m['rough']:.2g} dtr (3n+1)/2={m['dtr_added_laplacian']:.2g} "
                     f"control={m['control']:.2g}")


def test_criterion_10_corrected_quadratic_solutions():
    """Same checks on the actual solutions (quadratic restrictions) with factor (n-1)/2."""
    rng = np.random.default_rng(SEED)
    m = _gallot_measure(lambda M: [gallot.random_quadratic(M, rng) for _ in range(2)], rng)
    ok = (m["e2"] < 1e-5 and m["killing"] < 1e-6 and m["rough"] < 1e-5
          and m["dtr_derived"] < 1e-5 and m["control"] > 1e-3)
    record("10-corrected", ok,
           f"quadratics: e2={m['e2']:.1e} kappa_f killing={m['killing']:.1e} "
           f"rough laplacian={m['rough']:.1e} dtr (n-1)/2={m['dtr_derived']:.1e} "
           f"control={m['control']:.2g}")


EXPECTED = {"so4": 1, "so5": 1, "so6": 1, "so7": 1, "so8": 1, "u2": 2, "u3": 2, "su3": 2,
            "sp2": 7, "g2": 1, "spin7": 1}


def test_criterion_11_invariants_table():
    got, times = {}, {}
    dims_ok = True
    for name in EXPECTED:
        kind, N = inv.parse_algebra(name)
        t = time.perf_counter()
        alg = inv.build_algebra(kind, N)
        dims_ok &= alg.dim == inv.expected_dimension(kind, N)
        got[name] = inv.curvature_trivial_multiplicity(alg)
        times[name] = time.perf_counter() - t
    g2 = inv.build_algebra("g2", 7).dim
    spin7 = inv.build_algebra("spin7", 8).dim
    slow = times["sp2"] + times["spin7"]
    ok = got == EXPECTED and dims_ok and (g2, spin7) == (14, 21) and slow < 180
    table = " ".join(f"{k}={v}" for k, v in got.items())
    record("11", ok, f"{table} dim g2={g2} dim spin7={spin7} sp2+spin7 time={slow:.1f}s")


def test_criterion_12_line_counterexample():
    M = geo.FlatSpace(1)
    kf = kil.affine_line_field(1.0, 0.7)
    u = np.array([0.3])
    pair = max(kil.pair_defect(kf, kil.zero_curvature_field(), M, u))
    killing = kil.killing_residual(kf, M, u)
    record("12", pair < 1e-10 and killing > 1e-2, f"pair={pair:.1e} killing={killing:.2g}")
