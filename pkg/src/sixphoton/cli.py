"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 numerical-check failure.
"""

from __future__ import annotations

import argparse
import importlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import fock, optics, qstate, witness as wit
from .montecarlo import CountTable, estimate_correlation, estimate_probabilities, estimate_witness, sample_counts
from .optics import settings_for

# The package namespace re-exports a function named ``teleclone``; fetch the module itself.
tc = importlib.import_module(".teleclone", __package__)

EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 1, 2, 3
BASES = ("HV", "DA", "LR")
SETTING_WORDS = {"HV": "zzzzzz", "DA": "xxxxxx", "LR": "yyyyyy"}
SINGLE_QUBIT = {
    "H": optics.KET_H,
    "V": optics.KET_V,
    "D": optics.NAMED_BASES["DA"][0],
    "A": optics.NAMED_BASES["DA"][1],
    "L": optics.NAMED_BASES["LR"][0],
    "R": optics.NAMED_BASES["LR"][1],
}


class UsageError(Exception):
    pass


class ValidationError(Exception):
    pass


class NumericalCheckError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_schema(name: str) -> dict:
    return json.loads(resources.files("sixphoton.data").joinpath(name).read_text())


def _emit(args, text: str, suffix: str | None = None):
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _check_p(p):
    if not 0 <= p <= 1:
        raise ValidationError(f"p = {p} outside [0, 1]")


# --- derive -------------------------------------------------------------

def _haar_unitary(rng) -> np.ndarray:
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def invariance_report(ket: np.ndarray, samples: int = 20, seed: int = 0) -> dict:
    """Largest deviation of ``|<psi| U^{(x)n} |psi>|`` from one over sampled single-qubit unitaries."""
    rng = np.random.default_rng(seed)
    n = qstate.n_qubits(ket)
    worst = 0.0
    for _ in range(samples):
        u = _haar_unitary(rng)
        overlap = abs(np.vdot(ket, qstate.kron(*[u] * n) @ ket))
        worst = max(worst, 1 - overlap)
    return {"samples": samples, "max_deviation": worst}


def cmd_derive(args) -> int:
    if args.network in optics.NETWORKS:
        network = optics.NETWORKS[args.network]()
    else:
        try:
            network = optics.load_network_config(args.network)
        except (OSError, ValueError, KeyError) as exc:
            raise ValidationError(f"cannot load network {args.network!r}: {exc}") from None
    phase = args.phase
    if phase is None:
        # the singlet-type four-photon state needs opposite signs of the two pair terms
        phase = math.pi if args.network == "four-mode" else 0.0
    source = fock.PdcSource(args.alpha, phase)
    term = fock.pdc_term(source, args.order).normalized()
    state = fock.apply_network(term, network)
    spatial = list(dict.fromkeys(m.spatial for m in network.outputs))
    post = fock.postselect_one_per_spatial_mode(state, spatial)
    report = {
        "order": args.order,
        "network": args.network,
        "relative_phase": phase,
        "spatial_modes": spatial,
        "success_probability": post.probability,
    }
    if post.is_null:
        report["ket"] = None
        _emit(args, _json(report))
        return EXIT_NUMERIC
    ket = fock.canonical_gauge(post.ket)
    labels = qstate.outcome_labels(settings_for("HV", len(spatial)))
    report["ket"] = {lab: [a.real, a.imag] for lab, a in zip(labels, ket) if abs(a) > 1e-12}
    status = 0
    if args.network == "experiment" and args.order == 3:
        f = qstate.fidelity(ket, qstate.reference_state("Psi6Plus"))
        report["fidelity_psi6plus"] = f
        if f < 1 - 1e-9:
            status = EXIT_NUMERIC
    elif args.network == "pair" and args.order == 1:
        report["fidelity_psi2plus"] = qstate.fidelity(ket, qstate.reference_state("Psi2Plus"))
    if len(spatial) == 4:
        report["invariance"] = invariance_report(ket, seed=args.seed or 0)
    if args.dump_fock:
        Path(args.dump_fock).write_text(state.to_json(indent=1))
    _emit(args, _json(report))
    if "fidelity_psi6plus" in report:
        print(f"fidelity {report['fidelity_psi6plus']:.6f}  success probability {post.probability:.6g}", file=sys.stderr)
    return status


# --- histogram ------------------------------------------------------------

def svg_bar_chart(values, labels, title: str = "") -> str:
    width, height, pad = 12 * len(values) + 60, 260, 40
    top = max(max(values), 1e-12)
    bars = []
    for i, (v, lab) in enumerate(zip(values, labels)):
        h = (height - 2 * pad) * v / top
        x = pad + 12 * i
        bars.append(
            f'<rect x="{x}" y="{height - pad - h:.2f}" width="10" height="{h:.2f}" fill="#4477aa">'
            f"<title>{lab}: {v:.5f}</title></rect>"
        )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<text x="{pad}" y="20" font-size="12">{title}</text>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - 20}" y2="{height - pad}" stroke="black"/>\n'
        + "\n".join(bars)
        + "\n</svg>\n"
    )


def cmd_histogram(args) -> int:
    _check_p(args.p)
    settings = settings_for(args.basis)
    rho = qstate.add_white_noise(qstate.reference_state("Psi6Plus"), args.p)
    errors = None
    if args.mode == "analytic":
        probs = qstate.outcome_distribution(rho, settings)
    else:
        table = sample_counts(rho, settings, events=args.events, seed=args.seed)
        probs, errors = estimate_probabilities(table)
    labels = qstate.outcome_labels(settings)
    fmt = args.format or "csv"
    if fmt == "csv":
        text = qstate.distribution_to_csv(probs, settings, errors)
    elif fmt == "json":
        text = _json({"basis": args.basis, "p": args.p, "mode": args.mode,
                      "probabilities": dict(zip(labels, map(float, probs)))})
    else:
        text = svg_bar_chart(probs, labels, f"{args.basis} basis, p = {args.p}")
    _emit(args, text)
    return 0


# --- project --------------------------------------------------------------

def cmd_project(args) -> int:
    ket = qstate.reference_state("Psi6Plus")
    cond = qstate.project_qubit(ket, args.qubit, SINGLE_QUBIT[args.outcome])
    rest = [m for m in qstate.MODE_LABELS if m != args.qubit]
    out = {"qubit": args.qubit, "outcome": args.outcome, "probability": cond.probability, "modes": rest}
    if cond.is_null:
        out["ket"] = None
    else:
        settings = settings_for("HV", 5)
        labels = qstate.outcome_labels(settings)
        out["ket"] = {lab: [a.real, a.imag] for lab, a in zip(labels, cond.ket) if abs(a) > 1e-12}
        out["distribution"] = dict(zip(labels, map(float, qstate.outcome_distribution(cond.ket, settings))))
    if (args.format or "json") == "csv" and not cond.is_null:
        _emit(args, qstate.distribution_to_csv(qstate.outcome_distribution(cond.ket, settings), settings))
    else:
        _emit(args, _json(out))
    return 0


# --- report -------------------------------------------------------------

def _witness_entry(obs, value, target, se=None):
    rep = wit.WitnessReport(value, se or 0.0, noise_tolerance=wit.white_noise_tolerance(obs, target))
    d = rep.to_dict()
    if se is None:
        d["standard_error"] = None
    return d


def build_report(p: float | None = None, tables: dict | None = None) -> dict:
    """Correlations, noise weight, fidelity, witnesses and indicator sums for one dataset."""
    target = qstate.reference_state("Psi6Plus")
    w_max, w_red = wit.psi6_witnesses(target)
    ideal = {"HV": -1.0, "DA": 1.0, "LR": 1.0}
    if tables is None:
        rho = qstate.add_white_noise(target, p)
        corr = {b: qstate.correlation(rho, settings_for(b)) for b in BASES}
        se = {b: None for b in BASES}
        red_val, red_se = wit.expectation(w_red, rho), None
        max_val = wit.expectation(w_max, rho)
        source = {"mode": "analytic", "p": p}
    else:
        ests = {b: estimate_correlation(tables[b]) for b in BASES}
        corr = {b: e.value for b, e in ests.items()}
        se = {b: e.standard_error for b, e in ests.items()}
        red = estimate_witness(w_red, tables)
        red_val, red_se = red.value, red.standard_error
        max_val = None
        source = {"mode": "counts", "events": {b: tables[b].total for b in BASES}}
    p_hat = qstate.estimate_p_from_correlations(corr["HV"], corr["DA"], corr["LR"])
    p_hat_se = None if tables is None else math.sqrt(sum(s**2 for s in se.values())) / 3
    rho_fit = qstate.add_white_noise(target, p_hat)
    residuals = None
    if p_hat < 1:
        from .montecarlo import noise_residual_correlation

        residuals = dict(zip(BASES, noise_residual_correlation([corr[b] for b in BASES], p_hat, [ideal[b] for b in BASES])))
    tensor = {SETTING_WORDS[b]: corr[b] for b in BASES}
    value3, verdict3 = wit.indicator_norm(tensor, list(tensor))
    pairs = {}
    for i, b1 in enumerate(BASES):
        for b2 in BASES[i + 1:]:
            v, verdict = wit.indicator_norm(tensor, [SETTING_WORDS[b1], SETTING_WORDS[b2]])
            pairs[f"{b1}+{b2}"] = {"value": v, "verdict": verdict.value}
    witnesses = {"reduced": _witness_entry(w_red, red_val, target, red_se)}
    if max_val is not None:
        witnesses["max_overlap"] = _witness_entry(w_max, max_val, target)
    else:
        # the max-overlap witness needs far more than three settings; report the white-noise model value
        witnesses["max_overlap"] = _witness_entry(w_max, wit.expectation(w_max, rho_fit), target)
        witnesses["max_overlap"]["from_model"] = True
    return {
        "source": source,
        "correlations": {b: {"value": corr[b], "standard_error": se[b], "ideal": ideal[b]} for b in BASES},
        "p_hat": p_hat,
        "p_hat_standard_error": p_hat_se,
        "fidelity": qstate.fidelity(rho_fit, target),
        "noise_residuals": residuals,
        "witnesses": witnesses,
        "indicator": {"three_bases": {"value": value3, "verdict": verdict3.value}, "pairs": pairs},
    }


def _read_table(path: str) -> CountTable:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(str(exc)) from None
    try:
        return CountTable.from_csv(text)
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def cmd_report(args) -> int:
    if args.counts:
        tables = {}
        for path in args.counts:
            t = _read_table(path)
            if t.basis not in BASES:
                raise ValidationError(f"{path}: count table must use a named basis")
            tables[t.basis] = t
        if set(tables) != set(BASES):
            raise ValidationError(f"need one count file per basis {BASES}, got {sorted(tables)}")
        report = build_report(tables=tables)
    else:
        p = 1.0 if args.p is None else args.p
        _check_p(p)
        report = build_report(p=p)
    _emit(args, _json(report))
    return 0


# --- witness ---------------------------------------------------------------

def cmd_witness(args) -> int:
    target = qstate.reference_state("Psi6Plus")
    w_max, w_red = wit.psi6_witnesses(target)
    obs = w_red if args.kind == "reduced" else w_max
    if (args.format or "text") == "json":
        _emit(args, _json({"kind": args.kind, "terms": obs.terms,
                           "expectation_target": wit.expectation(obs, target),
                           "noise_tolerance": wit.white_noise_tolerance(obs, target)}))
    else:
        _emit(args, obs.to_text())
    return 0


# --- teleclone -------------------------------------------------------------

def _parse_input(spec: str) -> np.ndarray:
    if spec in SINGLE_QUBIT:
        return SINGLE_QUBIT[spec]
    try:
        theta, phi = (float(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"input must be one of {sorted(SINGLE_QUBIT)} or 'theta,phi', got {spec!r}") from None
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def cmd_teleclone(args) -> int:
    receivers = tuple(args.receivers)
    rest = [q for q in range(1, 7) if q not in receivers]
    port = args.port if args.port is not None else rest[0]
    try:
        layout = tc.ProtocolLayout(port, tuple(q for q in rest if q != port), receivers)
    except (ValueError, TypeError) as exc:
        raise ValidationError(str(exc)) from None
    try:
        table = tc.derive_correction_table(layout)
    except tc.ProtocolError as exc:
        _emit(args, _json({"layout": layout.__dict__, "error": str(exc)}))
        return EXIT_NUMERIC
    x = _parse_input(args.input)
    outcomes = {}
    for o in tc.OUTCOMES:
        res = tc.teleclone(x, layout, table, outcome=o)
        outcomes[tc.BELL_NAMES[o]] = {"probability": res.probability, "fidelities": list(res.fidelities)}
    sampled = tc.teleclone(x, layout, table, seed=args.seed)
    report = {
        "layout": {"input": 0, "port": layout.port, "ancillas": list(layout.ancillas), "receivers": list(layout.receivers)},
        "corrections": table.to_dict(),
        "uniform_corrections": table.uniform,
        "outcomes": outcomes,
        "sampled_outcome": tc.BELL_NAMES[sampled.outcome],
        "optimal_fidelity": tc.optimal_fidelity(len(receivers)),
    }
    _emit(args, _json(report))
    worst = max(abs(f - report["optimal_fidelity"]) for v in outcomes.values() for f in v["fidelities"])
    return 0 if worst < 1e-9 else EXIT_NUMERIC


# --- simulate ------------------------------------------------------------

def cmd_simulate(args) -> int:
    _check_p(args.p)
    rho = qstate.add_white_noise(qstate.reference_state("Psi6Plus"), args.p)
    out_dir = Path(args.out) if args.out else None
    tables = {}
    for i, b in enumerate(BASES):
        seed = None if args.seed is None else args.seed * 3 + i
        if args.events is not None:
            t = sample_counts(rho, settings_for(b), events=args.events, seed=seed)
        else:
            t = sample_counts(rho, settings_for(b), duration_hours=args.duration, rate_per_hour=args.rate, seed=seed)
        tables[b] = t
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / f"counts_{b}.csv").write_text(t.to_csv())
    report = build_report(tables=tables)
    report["source"]["p_true"] = args.p
    text = _json(report)
    if out_dir:
        (out_dir / "report.json").write_text(text)
    sys.stdout.write(text)
    return 0


# --- wiring ----------------------------------------------------------------

CONFIG_KEYS = {
    "derive": {"order", "network", "alpha", "phase", "dump_fock"},
    "histogram": {"basis", "p", "mode", "events"},
    "project": {"qubit", "outcome"},
    "report": {"p", "counts"},
    "witness": {"kind"},
    "teleclone": {"input", "receivers", "port"},
    "simulate": {"p", "events", "duration", "rate"},
}
GLOBAL_KEYS = {"seed", "out", "format"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (directory for simulate)")
    common.add_argument("--format", choices=["csv", "json", "svg", "text"], default=None)
    common.add_argument("--config", default=None, help="JSON file with command parameters")

    parser = _Parser(prog="sixphoton", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("derive", parents=[common], help="PDC term -> network -> post-selection")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--network", default="experiment", help="experiment, pair, four-mode or a JSON layout path")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--phase", type=float, default=None, help="relative phase between the pair terms (radians)")
    p.add_argument("--dump-fock", default=None, help="write the pre-selection Fock polynomial here")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("histogram", parents=[common], help="64-bin outcome distribution")
    p.add_argument("--basis", choices=BASES, default="HV")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--mode", choices=["analytic", "sampled"], default="analytic")
    p.add_argument("--events", type=int, default=320)
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("project", parents=[common], help="five-qubit state after projecting one qubit")
    p.add_argument("--qubit", choices=list(qstate.MODE_LABELS), default="b")
    p.add_argument("--outcome", choices=sorted(SINGLE_QUBIT), default="H")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("report", parents=[common], help="correlations, fidelity, witnesses, indicator")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--counts", nargs=3, metavar="CSV", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("witness", parents=[common], help="print a witness as 'coeff WORD' lines")
    p.add_argument("--kind", choices=["reduced", "max"], default="reduced")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("teleclone", parents=[common], help="qubit-level telecloning report")
    p.add_argument("--input", default="H", help="H, V, D, A, L, R or 'theta,phi'")
    p.add_argument("--receivers", type=int, nargs=3, default=[4, 5, 6])
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_teleclone)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo count tables and estimates")
    p.add_argument("--p", type=float, default=0.859)
    p.add_argument("--events", type=int, default=None)
    p.add_argument("--duration", type=float, default=94.0)
    p.add_argument("--rate", type=float, default=3.4)
    p.set_defaults(func=cmd_simulate)
    return parser


def _apply_config(args) -> None:
    if not args.config:
        return
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS[args.command] - GLOBAL_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys for {args.command}: {sorted(unknown)}")
    for key, value in cfg.items():
        setattr(args, key, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalCheckError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
