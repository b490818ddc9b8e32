"""Verification suites: each returns a list of CheckReport built from one seeded generator."""
from __future__ import annotations

import fnmatch
import time
from dataclasses import dataclass, field

import numpy as np

from . import cone, gallot, invariants, killing as kil, sasaki
from . import geometry as geo
from .multilinear import (
    ProductKind,
    derive,
    owedge,
    target_tableau,
)
from .young import (
    T2,
    T21,
    T22,
    Tableau,
    exchange_defect,
    hook_length_dimension,
    hook_product,
    irrep_dimension,
    membership_residual,
    project,
    young_symmetrize,
)

SUITES = ("young", "products", "geometry", "cone", "prolongation", "dimensions", "sasaki",
          "gallot", "invariants")

# default tolerances by derivative order of the quantity checked
TOL_ALGEBRA = 1e-12
TOL_FIRST = 1e-8
TOL_SECOND = 1e-6
TOL_THIRD = 1e-5
TOL_THIRD_FD = 1e-4


@dataclass
class CheckReport:
    name: str
    paper_ref: str
    value: float | int | None
    expected: float | int | None
    tolerance: float | None
    passed: bool
    wall_time_ms: float
    mode: str = "max"  # max: value <= tol; min: value > tol; equal: value == expected; info

    def to_dict(self, timing: bool = True) -> dict:
        v = self.value
        if isinstance(v, float) and not np.isfinite(v):
            v = None
        return {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "value": v,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "mode": self.mode,
            "wall_time_ms": round(self.wall_time_ms, 3) if timing else 0.0,
        }


@dataclass
class SuiteConfig:
    suite: str
    model: str = "sphere"
    n: int = 2
    radius: float = 1.0
    structure: str | None = None
    dim: int | None = None
    algebra: str | None = None
    seed: int = 42
    samples: int | None = None
    fd_step: float = 1e-3
    tol: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        for k, v in self.tol.items():
            if not v > 0:
                raise ValueError(f"tolerance for {k} must be positive")

    def count(self, default: int) -> int:
        return default if self.samples is None else self.samples


class Recorder:
    """Collects checks for one suite; names get the suite as prefix."""

    def __init__(self, suite: str, cfg: SuiteConfig):
        self.suite = suite
        self.cfg = cfg
        self.reports: list[CheckReport] = []

    def _tol(self, name: str, default):
        for pat, v in self.cfg.tol.items():
            if fnmatch.fnmatchcase(name, pat) or fnmatch.fnmatchcase(name, f"{self.suite}.{pat}"):
                return v
        return default

    def _run(self, fn):
        t = time.perf_counter()
        value = fn()
        return value, 1000 * (time.perf_counter() - t)

    def residual(self, name, ref, fn, tol):
        full = f"{self.suite}.{name}"
        tol = self._tol(full, tol)
        value, ms = self._run(fn)
        value = float(value)
        self.reports.append(CheckReport(full, ref, value, None, tol, bool(value <= tol), ms, "max"))
        return value

    def control(self, name, ref, fn, floor):
        """Negative control: passes when the value exceeds ``floor``."""
        full = f"{self.suite}.{name}"
        floor = self._tol(full, floor)
        value, ms = self._run(fn)
        value = float(value)
        self.reports.append(CheckReport(full, ref, value, None, floor, bool(value > floor), ms,
                                        "min"))
        return value

    def integer(self, name, ref, fn, expected):
        full = f"{self.suite}.{name}"
        value, ms = self._run(fn)
        value = int(value)
        self.reports.append(CheckReport(full, ref, value, int(expected), None,
                                        value == int(expected), ms, "equal"))
        return value

    def info(self, name, ref, fn):
        full = f"{self.suite}.{name}"
        value, ms = self._run(fn)
        value = float(value) if not isinstance(value, (int, np.integer)) else int(value)
        self.reports.append(CheckReport(full, ref, value, None, None, True, ms, "info"))
        return value


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _random_metric(n, rng):
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)


def _worst(fn, items):
    return max(fn(x) for x in items)


# ----------------------------------------------------------------------------
# young


def suite_young(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("young", cfg)
    rng = np.random.default_rng(cfg.seed)
    trials = cfg.count(200)
    for shape, h in (((2,), 2), ((2, 1), 3), ((2, 2), 12)):
        rec.integer(f"hook{''.join(map(str, shape))}", "hook numbers of the small frames",
                    lambda s=shape: hook_product(s), h)
    n = 3
    tabs = (T2, T21, T22)
    samples = [(T, rng.normal(size=(n,) * T.size)) for _ in range(trials) for T in tabs]

    def idem(item):
        T, t = item
        p = project(T, t)
        return _maxabs(project(T, p) - p) / max(_maxabs(t), 1.0)

    rec.residual("projector_idempotence", "normalized Young symmetrizers are projectors",
                 lambda: _worst(idem, samples), TOL_ALGEBRA)

    def eigen(T, c):
        def f():
            worst = 0.0
            for _ in range(trials):
                b = project(T, rng.normal(size=(n,) * T.size))
                worst = max(worst, _maxabs(young_symmetrize(T, b) - c * b) / max(_maxabs(b), 1e-300))
            return worst
        return f

    rec.residual("eigenvalue_21", "S_T beta = 3 beta on the (2,1) image", eigen(T21, 3.0),
                 TOL_ALGEBRA)
    rec.residual("eigenvalue_22", "S_T gamma = 12 gamma on the (2,2) image", eigen(T22, 12.0),
                 TOL_ALGEBRA)

    def exch():
        worst = 0.0
        for _ in range(trials):
            # rows of the (2,2) normal tableau are the slot blocks (1,2), (3,4)
            g = project(T22, rng.normal(size=(n,) * 4))
            worst = max(worst, exchange_defect(g, (2, 2), 1, 2) / max(_maxabs(g), 1e-300))
            # columns of (2,1) with filling 1 3 / 2: block grouping (1,2), (3)
            b = project(Tableau(((1, 3), (2,))), rng.normal(size=(n,) * 3), adjoint=True)
            worst = max(worst, exchange_defect(b, (2, 1), 1, 2, adjoint=True)
                        / max(_maxabs(b), 1e-300))
        return worst

    rec.residual("exchange_rule", "exchange (Plucker) relations vanish on projector images",
                 exch, TOL_ALGEBRA)
    rec.control("exchange_control", "random tensors violate the exchange relation",
                lambda: exchange_defect(rng.normal(size=(n,) * 4), (2, 2), 1, 2), 1e-3)
    for nn, d in ((2, 1), (3, 6), (4, 20)):
        rec.integer(f"dim22_n{nn}", "dimension of the (2,2) image via projector rank",
                    lambda nn=nn: irrep_dimension((2, 2), nn), d)
        rec.integer(f"dim22_n{nn}_hook_content", "hook content formula oracle",
                    lambda nn=nn: hook_length_dimension((2, 2), nn), d)
    rec.integer("dim21_n3", "dimension of the (2,1) image via projector rank",
                lambda: irrep_dimension((2, 1), 3), hook_length_dimension((2, 1), 3))
    return rec.reports


# ----------------------------------------------------------------------------
# products


def suite_products(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("products", cfg)
    rng = np.random.default_rng(cfg.seed)
    trials = cfg.count(50)
    n = 3

    def args(kind):
        sym = lambda: project(T2, rng.normal(size=(n, n)))  # noqa: E731
        skew = lambda: (lambda a: a - a.T)(rng.normal(size=(n, n)))  # noqa: E731
        one = lambda: rng.normal(size=n)  # noqa: E731
        if kind is ProductKind.SYM1X1:
            return one(), one()
        if kind is ProductKind.ONEFORM_SYM2:
            return one(), sym()
        if kind is ProductKind.TWOFORM_TWOFORM:
            return skew(), skew()
        if kind is ProductKind.ONEFORM_S21:
            return one(), project(T21, rng.normal(size=(n,) * 3))
        return sym(), sym()

    for kind in ProductKind:
        def image(kind=kind):
            return max(membership_residual(target_tableau(kind), owedge(*args(kind), kind))
                       for _ in range(trials))

        rec.residual(f"image_{kind.value}", "each product lands in its target projector image",
                     image, TOL_ALGEBRA)

    def order_sign():
        worst = 0.0
        for kind in (ProductKind.ONEFORM_SYM2, ProductKind.ONEFORM_S21):
            for _ in range(trials):
                a, b = args(kind)
                worst = max(worst, _maxabs(owedge(a, b, kind) + owedge(b, a, kind)))
        return worst

    rec.residual("mixed_order_sign", "lambda (.) t = - t (.) lambda for the mixed products",
                 order_sign, TOL_ALGEBRA)

    def equivariance():
        worst = 0.0
        for kind in ProductKind:
            for _ in range(max(trials // 5, 1)):
                a, b = args(kind)
                A = rng.normal(size=(n, n))
                lhs = derive(A, owedge(a, b, kind))
                rhs = owedge(derive(A, a), b, kind) + owedge(a, derive(A, b), kind)
                worst = max(worst, _maxabs(lhs - rhs) / max(_maxabs(lhs), 1.0))
        return worst

    rec.residual("derivation_leibniz", "endomorphisms act as derivations on all products",
                 equivariance, TOL_ALGEBRA)

    return rec.reports


# ----------------------------------------------------------------------------
# geometry


def _model_from(cfg: SuiteConfig) -> geo.ManifoldModel:
    if cfg.model == "sphere":
        return geo.RoundSphere(cfg.n, cfg.radius)
    if cfg.model == "flat":
        return geo.FlatSpace(cfg.n)
    if cfg.model == "scaled":
        return geo.ScaledSphere(cfg.n, 1.0 / cfg.radius**2)
    raise ValueError(f"unknown model {cfg.model!r}")


def suite_geometry(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("geometry", cfg)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.count(5)
    models = [geo.RoundSphere(2), geo.RoundSphere(3, 2.0), geo.ScaledSphere(2, 4.0),
              geo.FlatSpace(3)]
    for M in models:
        tag = M.label().replace("^", "").replace("(r=", "_r").replace(")", "")
        pts = [geo.sample_point(M, rng) for _ in range(count)]

        def sec(M=M, pts=pts):
            worst = 0.0
            for u in pts:
                g = geo.geometry_at(M, u)
                x, y = geo.unit_vectors(g.G, rng, 2)
                worst = max(worst, abs(geo.sectional_curvature(g.Rend, g.G, x, y) - M.curvature))
            return worst

        rec.residual(f"{tag}.sectional_curvature", "constant sectional curvature of the model",
                     sec, TOL_SECOND)

        def const(M=M, pts=pts):
            return max(_maxabs(geo.geometry_at(M, u).Rend
                               - geo.constant_curvature(geo.metric_at(M, u), M.curvature))
                       / max(1.0, _maxabs(geo.metric_at(M, u))) for u in pts)

        rec.residual(f"{tag}.constant_curvature_form", "R = c R_1 on space forms", const,
                     TOL_SECOND)

        def gam(M=M, pts=pts):
            import jax.numpy as jnp

            return max(_maxabs(np.asarray(geo.christoffel_from_metric(M.metric, jnp.asarray(u)))
                               - geo.christoffel_at(M, u)) for u in pts)

        rec.residual(f"{tag}.christoffel_from_metric", "closed-form Christoffels vs metric route",
                     gam, TOL_FIRST)

        def gam_fd(M=M, pts=pts):
            return max(_maxabs(geo.christoffel_from_metric(
                lambda v: np.asarray(M.metric(v)), u, mode="fd", h=cfg.fd_step)
                - geo.christoffel_at(M, u)) for u in pts)

        rec.residual(f"{tag}.christoffel_fd", "finite-difference Christoffel oracle", gam_fd,
                     TOL_FIRST)
        if M.is_sphere:
            def gauss(M=M, pts=pts):
                return max(_maxabs(geo.gauss_curvature_low(M, u) - geo.geometry_at(M, u).Rlow)
                           / max(1.0, _maxabs(geo.metric_at(M, u)) ** 2) for u in pts)

            rec.residual(f"{tag}.gauss_equation", "intrinsic curvature vs Gauss equation oracle",
                         gauss, TOL_SECOND)

            def pull(M=M, pts=pts):
                import jax
                import jax.numpy as jnp

                worst = 0.0
                for u in pts:
                    J = np.asarray(jax.jacfwd(M.embedding)(jnp.asarray(u)))
                    worst = max(worst, _maxabs(J.T @ J - geo.metric_at(M, u)))
                return worst

            rec.residual(f"{tag}.embedding_pullback", "conformal metric = pulled-back metric",
                         pull, TOL_FIRST)
        nul = geo.one_nullity(M, pts[0]).shape[1]
        rec.integer(f"{tag}.one_nullity_dimension", "dimension of the 1-nullity",
                    lambda nul=nul: nul, M.n if abs(M.curvature - 1.0) < 1e-12 else 0)

    M = geo.RoundSphere(2)
    kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(3, rng))
    pts = [geo.sample_point(M, rng) for _ in range(count)]

    def ad_vs_fd():
        worst = 0.0
        for u in pts:
            a = geo.covariant_derivative(kf, M, u, 1)
            b = geo.covariant_derivative(kf, M, u, 1, mode="fd", h=cfg.fd_step)
            worst = max(worst, _maxabs(a - b) / max(_maxabs(a), 1.0))
        return worst

    rec.residual("derivative_ad_vs_fd", "forward-mode vs Richardson finite differences",
                 ad_vs_fd, TOL_FIRST)

    def ricci_identity():
        worst = 0.0
        for u in pts:
            _, _, D2k = geo.derivatives(kf, M, u, 2)
            g = geo.geometry_at(M, u)
            lhs = D2k - D2k.transpose(1, 0, 2, 3)
            worst = max(worst, _maxabs(lhs - kil.curvature_action(g.Rend, np.asarray(kf(u)))))
        return worst

    rec.residual("ricci_identity", "commutator of second derivatives is the curvature action",
                 ricci_identity, TOL_SECOND)
    return rec.reports


# ----------------------------------------------------------------------------
# cone


def suite_cone(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("cone", cfg)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.count(5)
    for n in (2, 3):
        M = geo.RoundSphere(n)
        pts = [geo.sample_point(M, rng) for _ in range(count)]
        rec.residual(f"S{n}.cone_curvature_flat", "the cone over the unit sphere is flat",
                     lambda M=M, pts=pts: max(_maxabs(cone.cone_curvature(M, u)) for u in pts),
                     TOL_FIRST)

        def trip(n=n):
            worst = 0.0
            for _ in range(count):
                t = cone.ConeTriple(project(T2, rng.normal(size=(n, n))),
                                    project(T21, rng.normal(size=(n,) * 3)),
                                    project(T22, rng.normal(size=(n,) * 4)))
                worst = max(worst, (cone.decompose(cone.assemble(t)) - t).maxabs())
                S = kil.random_curvature_tensor(n + 1, rng)
                worst = max(worst, _maxabs(cone.assemble(cone.decompose(S)) - S))
            return worst

        rec.residual(f"S{n}.triple_round_trip", "assemble and decompose are inverse", trip,
                     TOL_ALGEBRA)

        def delta(n=n):
            worst = 0.0
            for _ in range(count):
                G = _random_metric(n, rng)
                t = cone.ConeTriple(project(T2, rng.normal(size=(n, n))),
                                    project(T21, rng.normal(size=(n,) * 3)),
                                    project(T22, rng.normal(size=(n,) * 4)))
                r = rng.uniform(0.5, 2.0)
                d = cone.horizontal_difference(t, G, r) - cone.delta_action_triple(t, G, r)
                worst = max(worst, d.maxabs() / max(t.maxabs(), 1.0))
            return worst

        rec.residual(f"S{n}.delta_consistency",
                     "horizontal defect formula equals the Delta action term by term", delta,
                     TOL_ALGEBRA)

        def kill(M=M, pts=pts, n=n):
            worst = 0.0
            for u in pts:
                kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(n + 1, rng))
                worst = max(worst, cone.S_kappa_horizontal_defect(kf, M, u))
            return worst

        rec.residual(f"S{n}.S_kappa_parallel", "S^kappa of a Killing tensor is parallel", kill,
                     TOL_SECOND)
        rec.residual(f"S{n}.metric_parallel", "the metric triple is parallel",
                     lambda M=M, pts=pts: max(cone.S_kappa_horizontal_defect(
                         kil.metric_field(M), M, u) for u in pts), TOL_SECOND)
        bump = kil.bump_field(M, rng)
        rec.control(f"S{n}.non_killing_control", "a non-Killing field is not parallel",
                    lambda M=M, pts=pts: min(cone.S_kappa_horizontal_defect(bump, M, u)
                                             for u in pts), 1e-3)

        def ambient(M=M, pts=pts, n=n):
            worst = 0.0
            for u in pts:
                Samb = kil.random_curvature_tensor(n + 1, rng)
                kf = kil.ambient_killing_field(M, Samb)
                r = rng.uniform(0.5, 2.0)
                tri = cone.build_S_kappa(kf, M, u, r)
                amb = cone.decompose(sasaki.pullback_to_cone(Samb, M, u, r))
                worst = max(worst, (tri - amb).maxabs() / max(amb.maxabs(), 1.0))
            return worst

        rec.residual(f"S{n}.ambient_oracle",
                     "S^kappa equals the constant ambient tensor with r^2, r^3, r^4 scaling",
                     ambient, TOL_SECOND)

        def hess(M=M, pts=pts, n=n):
            worst = 0.0
            for u in pts[:2]:
                kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(n + 1, rng))
                worst = max(worst, cone.hessian_description_defect(kf, M, u))
            worst = max(worst, cone.hessian_description_defect(kil.metric_field(M), M, pts[0]))
            return worst

        rec.residual(f"S{n}.hessian_description",
                     "S^kappa = P hat-nabla^2 (r^4 kappa)", hess,
                     TOL_SECOND)

    def rules():
        worst = 0.0
        for _ in range(count):
            n = 3
            G = _random_metric(n, rng)
            r = rng.uniform(0.5, 2.0)
            D = cone.nabla_hat_dr(G, r)
            expect = np.zeros((n + 1, n + 1))
            expect[:n, :n] = r * G
            worst = max(worst, _maxabs(D - expect))
            for k in (2, 3, 4):
                gam = rng.normal(size=(n,) * k)
                Dg = rng.normal(size=(n,) + (n,) * k)
                out = cone.nabla_hat_pullback(gam, Dg, G, r)
                ext = np.pad(gam, [(0, 1)] * k)
                worst = max(worst, _maxabs(out[n] + (k / r) * ext))
        return worst

    rec.residual("connection_rules",
                 "hat-nabla_r dr = 0, hat-nabla_x dr = r x#, hat-nabla_r gamma = -(k/r) gamma",
                 rules, TOL_ALGEBRA)
    M = geo.ScaledSphere(2, 4.0)
    u = geo.sample_point(M, rng)
    A = cone.cone_curvature(M, u)
    rec.control("scaled_cone_nonflat", "the cone over a non-unit sphere is curved",
                lambda: _maxabs(A), 1e-3)
    rec.residual("scaled_cone_fd_oracle", "cone curvature formula vs FD curvature of the cone metric",
                 lambda: _maxabs(A - cone.cone_curvature_oracle(M, u, h=cfg.fd_step)), TOL_SECOND)
    S3 = sasaki.make_structure("sasaki", 3)
    u3 = geo.sample_point(S3.model, rng)
    rec.residual("S3.hessian_description_eta_square",
                 "Hessian description for the square of the characteristic form",
                 lambda: cone.hessian_description_defect(sasaki.sasaki_killing_tensor(S3, 1, 1),
                                                           S3.model, u3), TOL_SECOND)
    return rec.reports


# ----------------------------------------------------------------------------
# prolongation (Killing equation chain)


def chain_values(M, kf, u) -> dict:
    """All residuals of the equivalence chain for one field at one point."""
    cf = kil.C_kappa_field(kf, M)
    p = kil.prolongation_defect(kf, M, u)
    pr = kil.pair_defect(kf, cf, M, u)
    nd = kil.nullity_defect(kf, M, u)
    k = np.asarray(kf(u))
    rec_k = kil.kappa_from_C(cf, M, u)
    out = {
        "killing": kil.killing_residual(kf, M, u),
        "prolongation": max(p),
        "pair": max(pr),
        "horizontal": cone.S_kappa_horizontal_defect(kf, M, u) if M.is_sphere else 0.0,
        "nullity": max(nd),
        "kappa_from_C": _maxabs(rec_k - k) / max(_maxabs(k), 1e-300),
        "weitzenboeck": kil.weitzenboeck_defect(kf, M, u),
    }
    out.update(kil.trace_identities(kf, M, u, cf))
    return out


def suite_prolongation(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("prolongation", cfg)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.count(5)
    tols = {"killing": 1e-7, "prolongation": 1e-6, "pair": 1e-6, "horizontal": 1e-7,
            "nullity": 1e-7, "kappa_from_C": 1e-5, "weitzenboeck": 1e-5,
            "dtr_vs_divergence": 1e-5, "ds_vs_dtr": 1e-5, "ricci_first_form": 1e-5,
            "ricci_second_form": 1e-5}
    refs = {"killing": "Killing equation for kappa(p) = 1/2 S(p,p,.,.)",
            "prolongation": "prolongation of the Killing equation",
            "pair": "pair equations for (kappa, C^kappa)",
            "horizontal": "S^kappa parallel in horizontal directions",
            "nullity": "nullity conditions (tautological on unit spheres)",
            "kappa_from_C": "kappa is recovered from C (n > 1)",
            "weitzenboeck": "Weitzenboeck formula for Killing tensors",
            "dtr_vs_divergence": "d tr kappa = 2 delta kappa",
            "ds_vs_dtr": "d s^C = -4 d tr kappa",
            "ricci_first_form": "Ric^C from the Hessian trace",
            "ricci_second_form": "Ric^C from the rough Laplacian"}
    for n in (cfg.n,) if cfg.suite != "all" else (2, 3):
        M = geo.RoundSphere(n)
        vals: dict = {}
        t0 = time.perf_counter()
        for _ in range(count):
            kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(n + 1, rng))
            u = geo.sample_point(M, rng)
            for k, v in chain_values(M, kf, u).items():
                vals[k] = max(vals.get(k, 0.0), v)
        ms = 1000 * (time.perf_counter() - t0) / len(vals)
        for k in sorted(vals):
            rec.residual(f"S{n}.{k}", refs[k], lambda v=vals[k]: v, tols[k])
            rec.reports[-1].wall_time_ms = ms
        bump = kil.bump_field(M, rng)
        u = geo.sample_point(M, rng)
        rec.control(f"S{n}.control_killing", "a bump field is not Killing",
                    lambda: kil.killing_residual(bump, M, u), 1e-3)
        rec.control(f"S{n}.control_prolongation", "a bump field violates the prolongation",
                    lambda: max(kil.prolongation_defect(bump, M, u)), 1e-3)
        rec.control(f"S{n}.control_pair", "a bump field violates the pair equations",
                    lambda: max(kil.pair_defect(bump, kil.C_kappa_field(bump, M), M, u)), 1e-3)
        rec.control(f"S{n}.control_horizontal", "S^kappa of a bump field is not parallel",
                    lambda: cone.S_kappa_horizontal_defect(bump, M, u), 1e-3)

    def special(which):
        def f():
            worst = 0.0
            for n in (2, 3, 4):
                for _ in range(count):
                    G = _random_metric(n, rng)
                    k = project(T2, rng.normal(size=(n, n)))
                    k1 = project(T21, rng.normal(size=(n,) * 3))
                    R1 = geo.unit_curvature(G)
                    if which == 1:
                        d = kil.F1(k, R1) - kil.F1_unit_rhs(k, G)
                    else:
                        d = kil.F2(k, k1, R1, np.zeros((n,) + R1.shape)) - kil.F2_unit_rhs(k1, G)
                    rhs = kil.F1_unit_rhs(k, G) if which == 1 else kil.F2_unit_rhs(k1, G)
                    worst = max(worst, _maxabs(d) / _maxabs(rhs))
            return worst
        return f

    rec.residual("F1_unit_special_form", "F1 on curvature-one models", special(1), 1e-10)
    rec.residual("F2_unit_special_form", "F2 on curvature-one models (Killing 1-jets)",
                 special(2), 1e-10)

    def compact_expanded():
        worst = 0.0
        for n in (2, 3):
            for _ in range(count):
                k = project(T2, rng.normal(size=(n, n)))
                Dk = rng.normal(size=(n,) * 3)
                G = _random_metric(n, rng)
                Ginv = np.linalg.inv(G)
                R = np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
                DR = np.stack([np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
                               for _ in range(n)])
                F = kil.F2(k, Dk, R, DR)
                assert _maxabs(F) > 1e-6
                worst = max(worst, _maxabs(F - kil.F2_expanded(k, Dk, R, DR)) / _maxabs(F))
        return worst

    rec.residual("F2_compact_vs_expanded", "compact and expanded forms of F2", compact_expanded,
                 1e-10)

    def minus_quarter():
        n = 3
        G = _random_metric(n, rng)
        k = project(T2, rng.normal(size=(n, n)))
        R1 = geo.unit_curvature(G)
        return _maxabs(kil.F1_with_sign(k, R1, -1.0) - kil.F1_unit_rhs(k, G))

    rec.info("F1_minus_quarter", "F1 with -1/4 in front of the second term", minus_quarter)

    def expanded_minus():
        n = 3
        G = _random_metric(n, rng)
        Ginv = np.linalg.inv(G)
        R = np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
        DR = np.stack([np.einsum("lw,ijkw->ijlk", Ginv, kil.random_curvature_tensor(n, rng))
                       for _ in range(n)])
        k = project(T2, rng.normal(size=(n, n)))
        Dk = rng.normal(size=(n,) * 3)
        return _maxabs(kil.F2(k, Dk, R, DR) - kil.F2_expanded(k, Dk, R, DR, correction_sign=-1.0))

    rec.info("F2_expanded_minus_correction", "expanded F2 with a minus on the correction term",
             expanded_minus)

    M1 = geo.FlatSpace(1)
    kf = kil.affine_line_field(1.0, 0.7)
    c0 = kil.zero_curvature_field()
    u1 = np.array([0.3])
    rec.residual("line_pair_equations", "on the line (kappa affine, C = 0) solves the pair",
                 lambda: max(kil.pair_defect(kf, c0, M1, u1)), 1e-10)
    rec.control("line_not_killing", "on the line that kappa is not Killing",
                lambda: kil.killing_residual(kf, M1, u1), 1e-2)
    return rec.reports


# ----------------------------------------------------------------------------
# dimensions


def suite_dimensions(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("dimensions", cfg)
    loops = max(cfg.count(20), 10)
    cases = []
    if cfg.suite == "all":
        cases = [geo.RoundSphere(2), geo.RoundSphere(3), geo.FlatSpace(2)]
    else:
        cases = [_model_from(cfg)]
    for M in cases:
        tag = M.label().replace("^", "").replace("(r=", "_r").replace(")", "")
        rec.integer(f"{tag}.fiber_dimension", "dimension of Sym^2 + S_(2,1) + S_(2,2)",
                    lambda M=M: kil.fiber_basis(M.n).shape[1], kil.killing_upper_bound(M.n))
        rec.integer(f"{tag}.killing_dimension",
                    "holonomy fixed space of the Killing connection (upper bound attained)",
                    lambda M=M: kil.killing_dimension(M, loops, cfg.seed),
                    kil.killing_upper_bound(M.n))
    M = geo.ScaledSphere(2, 4.0)
    rec.integer("S2_c4.unit_connection_dimension",
                "unit-curvature connection on a curvature-4 sphere: only the metric survives",
                lambda: kil.killing_dimension(M, loops, cfg.seed, connection="unit"), 1)
    return rec.reports


# ----------------------------------------------------------------------------
# sasaki


def suite_sasaki(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("sasaki", cfg)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.count(3)
    if cfg.structure is not None and cfg.suite != "all":
        dim = cfg.dim or (3 if cfg.structure == "sasaki" else 7)
        cases = [(cfg.structure, dim)]
    else:
        cases = [("sasaki", 3), ("3sasaki", 7)]
    for kind, dim in cases:
        S = sasaki.make_structure(kind, dim)
        tag = f"{kind}_S{dim}"
        pts = [geo.sample_point(S.model, rng) for _ in range(count)]
        if S.quaternion_sign is not None:
            rec.info(f"{tag}.quaternion_sign", "sign s in I1 I2 = s I3",
                     lambda S=S: S.quaternion_sign)
        for k in range(1, S.count + 1):
            fc = [sasaki.form_checks(S, k, u) for u in pts]
            for key in fc[0]:
                rec.residual(f"{tag}.eta{k}.{key}", "characteristic form property",
                             lambda key=key, fc=fc: max(c[key] for c in fc), TOL_FIRST)
        pairs = [(i, j) for i in range(1, S.count + 1) for j in range(i, S.count + 1)]
        for i, j in pairs:
            kf = sasaki.sasaki_killing_tensor(S, i, j)
            rec.residual(f"{tag}.k{i}{j}.killing", "eta_i . eta_j is Killing",
                         lambda kf=kf, S=S, pts=pts: max(kil.killing_residual(kf, S.model, u)
                                                         for u in pts), 1e-7)
            rec.residual(f"{tag}.k{i}{j}.constant_trace", "eta_i . eta_j has constant trace",
                         lambda kf=kf, S=S, pts=pts: max(sasaki.trace_gradient(kf, S.model, u)
                                                         for u in pts), TOL_FIRST)
            cc = [sasaki.cone_correspondence_defect(S, i, j, u) for u in pts[:2]]
            for key in cc[0]:
                rec.residual(f"{tag}.k{i}{j}.cone_{key}",
                             "correspondence with omega_i (.) omega_j on the cone",
                             lambda key=key, cc=cc: max(c[key] for c in cc), TOL_SECOND)
            rd = sasaki.coefficient_normalizations(S, i, j, pts[0])
            rec.info(f"{tag}.k{i}{j}.quarter_absorbed",
                     "C^kappa vs d eta_i (.) d eta_j without the extra 1/4",
                     lambda rd=rd: rd["quarter_absorbed"])

        def scaling(S=S, u=pts[0]):
            c = 2.5
            k1 = np.asarray(sasaki.sasaki_killing_tensor(S, 1, S.count, scale=c)(u))
            k0 = np.asarray(sasaki.sasaki_killing_tensor(S, 1, S.count)(u))
            C1 = np.asarray(sasaki.pair_C_field(S, 1, S.count, scale=c)(u))
            C0 = np.asarray(sasaki.pair_C_field(S, 1, S.count)(u))
            return max(_maxabs(k1 - c * k0), _maxabs(C1 - c * C0))

        rec.residual(f"{tag}.bilinear_scaling", "scaling eta_i scales kappa and C linearly",
                     scaling, TOL_ALGEBRA)
        rec.integer(f"{tag}.span_dimension", "dimension of span{g, eta_i . eta_j}",
                    lambda S=S: sasaki.sasaki_span_dimension(S, seed=cfg.seed),
                    sasaki.expected_span_dimension(S))
        mem = sasaki.span_members(S)
        rec.residual(f"{tag}.span_constant_trace", "every member of the span has constant trace",
                     lambda S=S, mem=mem: max(sasaki.trace_gradient(f, S.model, pts[0])
                                              for f in mem), TOL_FIRST)
        rec.residual(f"{tag}.span_nullity", "nullity conditions for the span",
                     lambda S=S, mem=mem: max(max(kil.nullity_defect(f, S.model, pts[0]))
                                              for f in mem), 1e-7)
    if cfg.suite == "all" or cfg.structure is None:
        S7 = sasaki.make_structure("3sasaki", 7)
        Is = sasaki.quaternion_structures(8)
        dup = sasaki.make_structure("3sasaki", 7, validate=False, structures=(Is[0], Is[0], Is[2]))
        rec.control("duplicate_structure_guard", "duplicated structure collapses the span",
                    lambda: float(sasaki.expected_span_dimension(dup)
                                  - sasaki.sasaki_span_dimension(dup, seed=cfg.seed)), 0.5)
        S3q = sasaki.make_structure("3sasaki", 3)
        rec.info("3sasaki_S3.span_dimension", "span on S^3 where eta_1^2+eta_2^2+eta_3^2 = 2 g",
                 lambda: sasaki.sasaki_span_dimension(S3q, seed=cfg.seed))
        del S7
    return rec.reports


# ----------------------------------------------------------------------------
# gallot


def suite_gallot(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("gallot", cfg)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.count(3)
    dims = (cfg.n,) if cfg.suite != "all" else (2, 3)
    for n in dims:
        M = geo.RoundSphere(n)
        tag = f"S{n}"
        pts = [geo.sample_point(M, rng) for _ in range(count)]
        quads = [gallot.random_quadratic(M, rng) for _ in range(2)]
        rec.residual(f"{tag}.quadratic_e2", "restrictions of quadratic forms solve the equation",
                     lambda M=M, pts=pts, quads=quads: max(
                         gallot.e2_residual(f, M, u) for f in quads for u in pts), TOL_THIRD)
        rec.residual(f"{tag}.constant_e2", "constants solve the equation",
                     lambda M=M, pts=pts: max(gallot.e2_residual(gallot.constant_function(1.7),
                                                                 M, u) for u in pts), TOL_THIRD)
        ids = [gallot.gallot_identities(f, M, u) for f in quads for u in pts]
        chains = [gallot.kappa_f_chain(f, M, u) for f in quads for u in pts[:2]]
        rec.residual(f"{tag}.quadratic_rough_laplacian", "nabla^* nabla df = (n+3) df",
                     lambda ids=ids: max(d["rough_laplacian"] for d in ids), TOL_THIRD)
        rec.residual(f"{tag}.quadratic_dlaplacian", "d nabla^* nabla f = 2(n+1) df",
                     lambda ids=ids: max(d["dlap_vs_df"] for d in ids), TOL_THIRD)
        rec.residual(f"{tag}.quadratic_dtr_derived", "d tr kappa^f = (n-1)/2 df",
                     lambda ids=ids: max(d["dtr_derived"] for d in ids), TOL_THIRD)
        rec.info(f"{tag}.quadratic_dtr_added_laplacian", "d tr kappa^f vs (3n+1)/2 df",
                 lambda ids=ids: max(d["dtr_added_laplacian"] for d in ids))
        for key, tol in (("killing", 1e-6), ("pair", 1e-5), ("C_is_C_kappa", 1e-5),
                         ("horizontal", 1e-5)):
            rec.residual(f"{tag}.quadratic_kappa_{key}", "kappa^f and C feed the Killing chain",
                         lambda key=key, chains=chains: max(c[key] for c in chains), tol)
        rec.residual(f"{tag}.cone_hessian_parallel", "q = 1/2 hat-nabla^2 (r^2 f) is parallel",
                     lambda M=M, pts=pts, quads=quads: max(
                         gallot.cone_hessian_defect(f, M, u)["parallel"] for f in quads
                         for u in pts[:2]), TOL_THIRD)
        rec.residual(f"{tag}.cone_hessian_recovers_f", "f = q(d_r, d_r) at r = 1",
                     lambda M=M, pts=pts, quads=quads: gallot.cone_hessian_defect(
                         quads[0], M, pts[0])["recovers_f"], TOL_SECOND)
        N = n + 1
        rec.integer(f"{tag}.solution_dimension", "solutions in span{1, x_a, x_a x_b}",
                    lambda M=M: gallot.e2_solution_dimension(M, "quadratic", seed=cfg.seed),
                    N * (N + 1) // 2)
        rec.info(f"{tag}.solution_dimension_linear_span", "solutions in span{1, x_a}",
                 lambda M=M: gallot.e2_solution_dimension(M, "linear", seed=cfg.seed))
        lin = gallot.first_harmonic(M, rng.normal(size=N))
        rec.control(f"{tag}.first_harmonic_not_solution",
                    "restrictions of linear functions do not solve the equation",
                    lambda M=M, pts=pts, lin=lin: min(gallot.e2_residual(lin, M, u) for u in pts),
                    1e-3)
        rec.info(f"{tag}.first_harmonic_trace_factor", "observed c in d tr kappa^f = c df",
                 lambda M=M, pts=pts, lin=lin: gallot.observed_trace_factor(lin, M, pts[0]))
        rec.info(f"{tag}.first_harmonic_kappa_killing", "Killing residual of kappa^f",
                 lambda M=M, pts=pts, lin=lin: gallot.kappa_f_chain(lin, M, pts[0])["killing"])
        rec.info(f"{tag}.quadratic_trace_factor", "observed c in d tr kappa^f = c df",
                 lambda M=M, pts=pts, quads=quads: gallot.observed_trace_factor(quads[0], M, pts[0]))
        sq = gallot.chart_square()
        rec.control(f"{tag}.chart_square_control", "|u|^2 in the chart is not a solution",
                    lambda M=M, pts=pts: min(gallot.e2_residual(sq, M, u) for u in pts), 1e-3)
    return rec.reports


# ----------------------------------------------------------------------------
# invariants


EXPECTED_MULTIPLICITY = {"so4": 1, "so5": 1, "so6": 1, "so7": 1, "so8": 1, "u2": 2, "u3": 2,
                         "su3": 2, "sp2": 7, "g2": 1, "spin7": 1}
INFORMATIONAL = ("su2",)


def _invariant_checks(rec: Recorder, name: str, dim: int | None, seed: int):
    kind, N = invariants.parse_algebra(name, dim)
    name = invariants.canonical_name(kind, N)
    alg = invariants.build_algebra(kind, N)
    rec.integer(f"{name}.algebra_dimension", "dimension of the holonomy algebra",
                lambda: alg.dim, invariants.expected_dimension(kind, N))
    rec.residual(f"{name}.closure", "generators close under the bracket",
                 lambda: invariants.closure_residual(alg), 1e-9)
    ref = "trivial components in the curvature tensors"
    if name in EXPECTED_MULTIPLICITY:
        m = rec.integer(f"{name}.multiplicity", ref,
                        lambda: invariants.curvature_trivial_multiplicity(alg),
                        EXPECTED_MULTIPLICITY[name])
    else:
        m = rec.info(f"{name}.multiplicity", ref + " (no expected value)",
                     lambda: invariants.curvature_trivial_multiplicity(alg))
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(N, N)))
    rec.integer(f"{name}.multiplicity_conjugated", "multiplicity after a change of basis",
                lambda: invariants.curvature_trivial_multiplicity(invariants.conjugated(alg, Q)), m)
    if kind in ("so", "u", "su", "sp"):
        rep = invariants.explicit_span_report(alg)
        if name in INFORMATIONAL:
            rec.info(f"{name}.explicit_rank", "rank of g (.) g and omega (.) omega",
                     lambda: rep["explicit_rank"])
        else:
            rec.integer(f"{name}.explicit_span", "g (.) g and omega_i (.) omega_j span the kernel",
                        lambda: rep["explicit_rank"] if rep["spans"] else -1, m)


def suite_invariants(cfg: SuiteConfig) -> list[CheckReport]:
    rec = Recorder("invariants", cfg)
    if cfg.algebra is not None and cfg.suite != "all":
        _invariant_checks(rec, cfg.algebra, cfg.dim, cfg.seed)
    else:
        for name in list(EXPECTED_MULTIPLICITY) + list(INFORMATIONAL):
            _invariant_checks(rec, name, None, cfg.seed)
    return rec.reports


RUNNERS = {
    "young": suite_young,
    "products": suite_products,
    "geometry": suite_geometry,
    "cone": suite_cone,
    "prolongation": suite_prolongation,
    "dimensions": suite_dimensions,
    "sasaki": suite_sasaki,
    "gallot": suite_gallot,
    "invariants": suite_invariants,
}


def run_suite(cfg: SuiteConfig) -> list[CheckReport]:
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    out: list[CheckReport] = []
    for s in names:
        out.extend(RUNNERS[s](cfg))
    return sorted(out, key=lambda r: r.name)
