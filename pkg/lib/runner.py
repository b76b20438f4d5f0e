# lib/runner.py
# -----------------------------------------------------------------------------
# Execução dos subcomandos do rdlab.
# - Cada subcomando grava seus relatórios (CSV + resumo JSON, ou só JSON)
#   em run.output_dir, sempre com o digest da config e a versão do formato
# - Códigos de saída: 0 ok, 1 verificação falhou, 2 uso/config, 3 orçamento
# - Aleatoriedade apenas via run.seed
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from config import ExperimentConfig
from groups.axioms import check_group_axioms
from groups.base import GroupAutomorphism, GroupElement, MarkedGroup
from groups.catalog import (
    amenable_exponential,
    catalog,
    catalog_extension,
    has_extension,
    identity_automorphism,
    inner_automorphism,
    matrix_automorphism,
)
from lib.cayley import build_ball, growth
from lib.convolution import (
    FinSuppFunction,
    ball_indicator,
    check_automorphism_identities,
    delta,
    opnorm_lower,
    random_integer_function,
    rd_profile,
    sphere_indicator,
)
from lib.distortion import aut_growth_profile, distortion_profile, verify_witnesses
from lib.errors import BudgetExceededError, CheckFailedError, RdLabError
from lib.extension import (
    build_context,
    check_decomposition,
    check_multiplication,
    cocycle_collect,
    cocycle_profiles,
    collect_alphabet,
    intrinsic_length_inequality,
    length_inequality_check,
    random_kernel_words,
)
from lib.fitting import classify_growth
from lib.reports import CheckReport, form_text, write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

EXTENSION_SUBCOMMANDS = ("section", "cocycles", "decompose-check", "length-ineq", "distortion")
SUBCOMMANDS = (
    "growth",
    "rd-profile",
    "opnorm",
    "section",
    "cocycles",
    "decompose-check",
    "length-ineq",
    "distortion",
    "aut-growth",
    "all",
    "print-config",
)


class RunResult(BaseModel):
    subcommand: str
    status: int = EXIT_OK
    files: List[str] = Field(default_factory=list)
    summaries: List[str] = Field(default_factory=list)
    error: Optional[str] = None


@dataclass
class _Writer:
    """Escreve relatórios no formato configurado."""
    out_dir: Path
    fmt: str
    config_digest: str
    files: List[str] = field(default_factory=list)

    def report(self, name: str, header: Sequence[str], rows: List[Sequence[Any]], summary: Dict[str, Any]) -> None:
        if self.fmt == "csv":
            self.files.append(str(write_csv(self.out_dir / f"{name}.csv", header, rows, self.config_digest)))
            self.files.append(str(write_json(self.out_dir / f"{name}.summary.json", {"summary": summary},
                                             self.config_digest)))
        else:
            payload = {"summary": summary, "rows": [dict(zip(header, r)) for r in rows]}
            self.files.append(str(write_json(self.out_dir / f"{name}.json", payload, self.config_digest)))


@dataclass
class _Outcome:
    ok: bool
    summary: str


def _marked(cfg: ExperimentConfig) -> MarkedGroup:
    return catalog(cfg.group.name, cfg.group.params)


def _extension_context(cfg: ExperimentConfig, section_radius: int, method: str = "bfs", **kwargs):
    G = _marked(cfg)
    return build_context(catalog_extension(G), section_radius, method=method, **kwargs)


# --------------------- subcomandos ---------------------
def _growth(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    G = _marked(cfg)
    t = build_ball(G, cfg.radii.ball)
    seq = growth(t)
    cls = classify_growth(seq.sizes, ratio=cfg.thresholds.classify_ratio, min_x=cfg.thresholds.fit_min_radius)
    axioms = check_group_axioms(G, cfg.checks.axioms_radius, seed=cfg.run.seed)
    w.report(
        "growth",
        ["n", "ball_size", "sphere_size"],
        list(seq.rows()),
        {
            "group": G.label,
            "radius": t.radius,
            "classification": cls,
            "axioms": axioms,
        },
    )
    return _Outcome(axioms.ok, f"growth {G.label}: |B_{t.radius}| = {t.size}, {cls.summary()}; {axioms.summary_line()}")


def _test_function(cfg: ExperimentConfig, G: MarkedGroup) -> FinSuppFunction:
    r = cfg.estimator.function_radius
    t = build_ball(G, max(r, 1))
    kind = cfg.estimator.function
    if kind == "ball":
        return ball_indicator(t, r)
    if kind == "sphere":
        return sphere_indicator(t, r)
    sphere = t.sphere(r)
    return delta(G, sphere[0] if sphere else G.identity())


def _opnorm(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    G = _marked(cfg)
    f = _test_function(cfg, G)
    est = opnorm_lower(f, cfg.estimator.m, tol=cfg.estimator.tol, max_iter=cfg.estimator.max_iter)
    rows = [(h.m, h.value, h.iterations, h.converged) for h in est.history]
    w.report(
        "opnorm",
        ["m", "value", "iterations", "converged"],
        rows,
        {"group": G.label, "function": cfg.estimator.function, "function_radius": cfg.estimator.function_radius,
         "estimate": est.model_dump(exclude={"history"})},
    )
    monotone = all(b >= a - 1e-9 * max(1.0, a) for a, b in zip(est.values(), est.values()[1:]))
    return _Outcome(
        monotone and est.value <= est.l1_ceiling * (1 + 1e-12),
        f"opnorm {G.label} {cfg.estimator.function}_{cfg.estimator.function_radius}: "
        f"{est.value:.10g} (m={est.truncation_radius}, ceiling {est.l1_ceiling:g}, converged={est.converged})",
    )


def _rd_profile(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    G = _marked(cfg)
    e = cfg.estimator
    adaptive = amenable_exponential(cfg.group.name) if e.adaptive is None else e.adaptive
    m = e.adaptive_floor if adaptive else e.m
    prof = rd_profile(G, cfg.radii.rd, m, tol=e.tol, max_iter=e.max_iter, adaptive=adaptive,
                      min_radius=cfg.thresholds.fit_min_radius)
    rows = [(r.n, r.ball_size, r.l2, r.m, r.opnorm_lower, r.ratio, r.converged) for r in prof.rows]
    w.report(
        "rd_profile",
        ["n", "ball_size", "l2", "m", "opnorm_lower", "ratio", "converged"],
        rows,
        {"group": G.label, "adaptive": adaptive, "fitted_exponent": prof.fitted_exponent,
         "fit_residual": prof.fit_residual, "fit_window": prof.fit_window, "exponential": prof.exponential,
         "polynomial": prof.polynomial, "superpolynomial": prof.superpolynomial()},
    )
    return _Outcome(True, f"rd-profile {G.label}: exponent {prof.fitted_exponent:.4f} "
                          f"(residual {prof.fit_residual:.3g}), superpolynomial={prof.superpolynomial()}")


def _section(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    R = cfg.radii.section
    Rm = cfg.radii.multiplication
    ctx = _extension_context(cfg, max(R, 2 * Rm))
    rows = []
    for q in ctx.ball_Q.ball(R):
        x = ctx.sigma(q)
        word = ctx.section.words[q]
        rows.append((form_text(q.form), form_text(x.form), ctx.G.word_label(word), ctx.ell_Q(q), ctx.ell_G(x)))
    geodesic = all(r[3] == r[4] for r in rows)
    mult = check_multiplication(ctx, Rm)
    w.report(
        "section",
        ["q", "sigma", "sigma_word", "l_Q", "l_G"],
        rows,
        {"extension": ctx.ext.name, "radius": R, "geodesic": geodesic, "multiplication": mult},
    )
    return _Outcome(geodesic and mult.ok,
                    f"section {ctx.ext.name}: {len(rows)} cosets, geodesic={geodesic}; {mult.summary_line()}")


def _cocycles(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    R = cfg.radii.cocycles
    L = cfg.checks.word_length
    ctx = _extension_context(cfg, max(2 * R, L), method="lift", ball_radius=R)
    prof = cocycle_profiles(ctx, R, theta_radius=2 * R, ratio=cfg.thresholds.classify_ratio,
                            min_radius=cfg.thresholds.fit_min_radius)

    alphabet = collect_alphabet(ctx)
    rng = np.random.default_rng(cfg.run.seed)
    collect = CheckReport(name=f"cocycle collection {ctx.ext.name}")
    for word in random_kernel_words(ctx, cfg.checks.words, L, rng, alphabet):
        _, trace = cocycle_collect(ctx, word, alphabet)
        collect.record(trace.ok, witness={"word": " ".join(alphabet.labels[i] for i in word)})

    rows = []
    for r in range(2 * R + 1):
        theta = prof.theta_growth[r] if r < len(prof.theta_growth) else None
        rows.append((r, prof.amplitude[r], theta))
    w.report(
        "cocycles",
        ["r", "beta_amplitude", "theta_growth"],
        rows,
        {"extension": ctx.ext.name, "amplitude_table": prof.amplitude_table,
         "amplitude_class": prof.amplitude_class, "theta_class": prof.theta_class,
         "ambient_ok": prof.ambient_ok, "ambient_checked": prof.ambient_checked,
         "ambient_witness": prof.ambient_witness, "collection": collect},
    )
    return _Outcome(
        collect.ok and prof.ambient_ok,
        f"cocycles {ctx.ext.name}: amplitude {prof.amplitude_class.summary()}, "
        f"theta {prof.theta_class.summary()}; {collect.summary_line()}",
    )


def _decompose(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    R = cfg.radii.decompose
    ctx = _extension_context(cfg, 2 * R)
    report = check_decomposition(ctx, cfg.checks.pairs, R, cfg.run.seed)
    w.report(
        "decompose_check",
        ["pairs", "checked", "mismatches", "max_slice_gap", "min_slice_margin"],
        [(cfg.checks.pairs, report.checked, report.mismatches, report.max_slice_gap, report.min_slice_margin)],
        {"extension": ctx.ext.name, "report": report},
    )
    return _Outcome(report.ok, report.summary_line())


def _length_ineq(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    R = cfg.radii.length
    ctx = _extension_context(cfg, R)
    report = length_inequality_check(ctx, R)
    intrinsic = intrinsic_length_inequality(ctx, R, min_radius=cfg.thresholds.fit_min_radius)
    w.report(
        "length_ineq",
        ["n", "max_ratio"],
        [(n, v) for n, v in enumerate(report.per_radius)],
        {"extension": ctx.ext.name, "report": report, "intrinsic": intrinsic},
    )
    return _Outcome(report.ok, f"length-ineq {ctx.ext.name} R={R}: max ratio {report.max_ratio:.6g} (<= 3: {report.ok})")


def _distortion(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    R = cfg.radii.distortion
    ctx = _extension_context(cfg, 1, method="lift", subgroup_radius=R)
    prof = distortion_profile(ctx, R, ratio=cfg.thresholds.classify_ratio, min_radius=cfg.thresholds.fit_min_radius)
    witnessed = verify_witnesses(ctx, prof)
    rows = [(r.n, r.distortion, r.witness_word, r.relative_growth, r.partial) for r in prof.rows]
    w.report(
        "distortion",
        ["n", "D", "witness_word", "relative_growth", "partial"],
        rows,
        {"extension": ctx.ext.name, "classification": prof.classification, "witnessed": witnessed,
         "domination_ok": prof.domination_ok, "partial_radii": prof.partial_radii},
    )
    return _Outcome(witnessed and prof.domination_ok,
                    f"distortion {ctx.ext.name} R={R}: {prof.classification.summary()}")


def default_automorphism(G: MarkedGroup) -> Tuple[GroupAutomorphism, List[GroupElement]]:
    """ℤ²: matriz [[2,1],[1,1]] com U = {e₁}; demais: conjugação por s₁, U = {s₃} (ou {s₁})."""
    if G.descriptor.name == "Zn" and G.group.rank == 2:
        return matrix_automorphism(G, [[2, 1], [1, 1]]), [G.generators[0]]
    if not G.generators:
        return identity_automorphism(G), [G.identity()]
    U = [G.generators[2]] if len(G.generators) > 2 else [G.generators[0]]
    return inner_automorphism(G, G.generators[0]), U


def _aut_growth(cfg: ExperimentConfig, w: _Writer) -> _Outcome:
    G = _marked(cfg)
    K = cfg.radii.aut
    alpha, U = default_automorphism(G)
    t = build_ball(G, K // 2 + 1)
    prof = aut_growth_profile(alpha, U, t, K, ratio=cfg.thresholds.classify_ratio,
                              min_radius=cfg.thresholds.fit_min_radius)
    rng = np.random.default_rng(cfg.run.seed)
    support = build_ball(G, 2).elements
    pairs = [(random_integer_function(G, support, rng), random_integer_function(G, support, rng))
             for _ in range(cfg.checks.aut_pairs)]
    ident = check_automorphism_identities(alpha, pairs)
    w.report(
        "aut_growth",
        ["k", "lambda"],
        list(zip(prof.ks, prof.lengths)),
        {"group": G.label, "U": [form_text(u.form) for u in U], "forward": prof.forward,
         "backward": prof.backward, "inner_bound_ok": prof.inner_bound_ok,
         "inequality_ok": prof.inequality_ok, "modular_factor": prof.modular_factor,
         "unresolved": prof.unresolved, "identities": ident},
    )
    ok = ident.ok and prof.inequality_ok and prof.inner_bound_ok is not False
    return _Outcome(ok, f"aut-growth {G.label} K={K}: forward {prof.forward.summary()}, "
                        f"backward {prof.backward.summary()}; {ident.summary_line()}")


_HANDLERS: Dict[str, Callable[[ExperimentConfig, _Writer], _Outcome]] = {
    "growth": _growth,
    "rd-profile": _rd_profile,
    "opnorm": _opnorm,
    "section": _section,
    "cocycles": _cocycles,
    "decompose-check": _decompose,
    "length-ineq": _length_ineq,
    "distortion": _distortion,
    "aut-growth": _aut_growth,
}


def _status_for(exc: BaseException) -> int:
    if isinstance(exc, BudgetExceededError):
        return EXIT_BUDGET
    if isinstance(exc, CheckFailedError):
        return EXIT_CHECK_FAILED
    return EXIT_USAGE


def run(subcommand: str, cfg: ExperimentConfig) -> RunResult:
    """Executa um subcomando (ou ``all``) e devolve status + arquivos + resumos."""
    result = RunResult(subcommand=subcommand)
    if subcommand not in SUBCOMMANDS:
        result.status = EXIT_USAGE
        result.error = f"unknown subcommand {subcommand!r} (known: {', '.join(SUBCOMMANDS)})"
        return result
    if subcommand == "print-config":
        result.summaries.append(cfg.to_text())
        return result

    w = _Writer(out_dir=Path(cfg.run.output_dir), fmt=cfg.run.report_format, config_digest=cfg.digest())
    if subcommand == "all":
        names = [n for n in _HANDLERS if n not in EXTENSION_SUBCOMMANDS or has_extension(cfg.group.name)]
        skipped = [n for n in _HANDLERS if n not in names]
        if skipped:
            logger.info("%s has no catalog extension; skipping %s", cfg.group.name, ", ".join(skipped))
    else:
        names = [subcommand]

    for name in names:
        try:
            outcome = _HANDLERS[name](cfg, w)
        except BudgetExceededError as e:
            result.status = max(result.status, EXIT_BUDGET)
            result.error = f"{name}: {e} (completed radius {e.completed_radius})"
            logger.error(result.error)
            break
        except RdLabError as e:
            result.status = max(result.status, _status_for(e))
            result.error = f"{name}: {e}"
            logger.error(result.error)
            if result.status != EXIT_CHECK_FAILED:
                break
            continue
        result.summaries.append(outcome.summary)
        logger.info(outcome.summary)
        if not outcome.ok:
            result.status = max(result.status, EXIT_CHECK_FAILED)
    result.files = list(w.files)
    return result
