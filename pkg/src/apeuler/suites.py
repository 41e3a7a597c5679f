"""Named verification suites run by the command line."""
import numpy as np

from apeuler import verify

OPTIONAL = ("drift",)


def _base(af, cfg):
    return verify.base_flow_audit(af.base, 1000, rng=cfg.seed)


def _residual(af, cfg):
    g = cfg.grids
    times = np.random.default_rng(cfg.seed).uniform(0.0, 100.0, g.residual_times)
    return verify.residual_audit(af, times, g.residual_points // g.residual_times, rng=cfg.seed)


def _estimates(af, cfg):
    g = cfg.grids
    return verify.estimate_suite(af, g.estimate_times, g.phase_samples, g.estimate_per_dim, rng=cfg.seed)


def _derivative(af, cfg):
    return [verify.embedding_derivative_check(af, rng=cfg.seed)]


def _layout(af, cfg):
    return verify.layout_entries(af.layout)


def _frequencies(af, cfg):
    pr = cfg.probe
    return verify.frequency_entries(af.freqs, pr.weight_max, pr.comp_max, pr.budget)


def _witness(af, cfg):
    return verify.witness_entries(af, extra_directions=2, rng=cfg.seed)


def _pressure(af, cfg):
    return verify.pressure_refinement(af, ladder=tuple(cfg.grids.pressure), tol=cfg.grids.pressure_tol)


def _drift(af, cfg):
    g = cfg.grids
    return verify.spectral_drift_check(af, t_final=g.drift_t, dt=g.drift_dt, n=g.drift_n,
                                       fine=(g.drift_fine_n, g.drift_fine_dt), tol=g.drift_tol)


SUITES = {
    "base": _base,
    "residual": _residual,
    "estimates": _estimates,
    "derivative": _derivative,
    "layout": _layout,
    "frequencies": _frequencies,
    "witness": _witness,
    "pressure": _pressure,
    "drift": _drift,
}


def resolve(selection):
    """Suite names from a comma list; ``full`` is every non-optional suite, ``all`` adds the rest."""
    names = [s.strip() for s in selection.split(",") if s.strip()]
    if not names:
        raise ValueError("empty suite selection")
    out = []
    for name in names:
        if name == "full":
            expand = [s for s in SUITES if s not in OPTIONAL]
        elif name == "all":
            expand = list(SUITES)
        elif name in SUITES:
            expand = [name]
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, full, all")
        out.extend(s for s in expand if s not in out)
    return out


def run(af, cfg, names, report=None, progress=None):
    report = verify.VerificationReport(config=cfg.to_dict()) if report is None else report
    for name in names:
        if progress:
            progress(name)
        report.extend(SUITES[name](af, cfg))
    return report
