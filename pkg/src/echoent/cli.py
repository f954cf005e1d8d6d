"""Command-line front end.

Subcommands:

  scan        classify a pulse-time grid: coherences, separability verdicts,
              negativities, entropies -> scan.csv + scan_summary.json
  spectral    second-order attenuation/phase curves -> spectral.csv
              + spectral_peaks.json
  witness     phase-shift entanglement witness -> witness.json
  reproduce   canned runs: "fig1" (full scan of the periodic model) and
              "sec4b" (snapshot identity table)

Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance failure,
4 witness hypotheses violated.  Output CSVs are byte-identical for
identical configuration and seed (fixed 17-significant-digit decimal
format, '.' separator, newline line endings).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import entanglement, model, scenarios, spectral

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_HYPOTHESIS = 4

COHERENCE_ROW_CAP = 1.0 + 1e-9


class ConfigError(Exception):
    pass


class NumericError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _parse_complex(text: str, name: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{name} must be given as 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ConfigError(f"{name}: could not parse {text!r} as 're,im'") from None


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def _tau_grid(args, default=None) -> np.ndarray:
    if args.tau_stop is None:
        if default is None:
            raise ConfigError("--tau-stop is required when no scenario default exists")
        if args.points is None:
            return default
        start, stop = float(default[0]), float(default[-1])
    else:
        start, stop = args.tau_start, args.tau_stop
    points = args.points if args.points is not None else 201
    if points < 2:
        raise ConfigError(f"--points must be >= 2, got {points}")
    if not stop > start >= 0.0:
        raise ConfigError(f"need stop > start >= 0, got [{start}, {stop}]")
    return np.linspace(start, stop, points)


def _build_source(args):
    """Resolve --scenario / --model into (pair, R0, a, b, grid, label)."""
    if (args.scenario is None) == (args.model is None):
        raise ConfigError("exactly one of --scenario or --model is required")
    if args.scenario is not None:
        name = args.scenario
        if name == "sec4b":
            scn = scenarios.sec4b_snapshot(args.c0 if args.c0 is not None else 0.7)
        elif name == "fig1":
            scn = scenarios.fig1_model(1.0)
        elif name == "commuting":
            scn = scenarios.commuting_family(4, args.seed, with_v_commuting=True,
                                             beta=args.beta if args.beta is not None else 1.0)
        elif name == "random":
            scn = scenarios.random_scenario(4, args.seed)
        else:
            raise ConfigError(
                f"unknown scenario {name!r}; choose from sec4b, fig1, "
                f"commuting, random"
            )
        pair, r0, grid = scn.pair, scn.R0, scn.tau_grid
        a, b = scn.a, scn.b
        label = f"scenario:{name}"
    else:
        if args.c0 is not None:
            raise ConfigError("--c0 only applies to --scenario sec4b")
        mdl, r0 = model.model_from_json(_load_json(args.model))
        if args.beta is not None:
            r0 = model.thermal_state(mdl.H_E, args.beta)
        pair = model.GeneratedPropagators(mdl)
        grid = None
        a = b = 1.0 / np.sqrt(2.0)
        label = f"model:{args.model}"
    if args.a is not None:
        a = _parse_complex(args.a, "--a")
    if args.b is not None:
        b = _parse_complex(args.b, "--b")
    grid = _tau_grid(args, default=grid)
    return pair, r0, a, b, grid, label


def _check_rows_coherence(records):
    for r in records:
        if abs(r.W_pre) > COHERENCE_ROW_CAP or abs(r.W_echo) > COHERENCE_ROW_CAP:
            raise NumericError(
                f"coherence magnitude exceeded 1 at tau={r.tau!r}: "
                f"|W_pre|={abs(r.W_pre)!r}, |W_echo|={abs(r.W_echo)!r}"
            )


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, obj):
    _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_scan(args) -> int:
    try:
        pair, r0, a, b, grid, label = _build_source(args)
        records, summary = entanglement.classify_scan(pair, a, b, r0, grid,
                                                      tol=args.tol)
        _check_rows_coherence(records)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    cv = summary["cross_validation"]
    if cv["disagree"] > 0 or cv["inconclusive"] > 0.01 * 2 * summary["points"]:
        print(
            f"numerical failure: criterion/negativity cross-validation "
            f"disagree={cv['disagree']}, inconclusive={cv['inconclusive']} "
            f"out of {2 * summary['points']} checks",
            file=sys.stderr,
        )
        return EXIT_NUMERIC
    out = Path(args.out)
    summary = {"source": label, **summary}
    _write(out / "scan.csv", entanglement.scan_records_to_csv(records))
    _write_json(out / "scan_summary.json", summary)
    n_flags = len(summary["echo_induced"])
    print(f"scan: {summary['points']} points -> {out / 'scan.csv'}")
    print(f"echo-induced points: {n_flags}")
    for entry in summary["echo_induced"][:10]:
        print(f"  tau = {entry['tau']:.6g} (index {entry['index']})")
    return EXIT_OK


def _psd_from_json(data: dict):
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError('PSD file must hold an object with a "kind" key')
    kind = data.get("kind")
    try:
        if kind == "comb":
            peaks = data["peaks"]
            om = [float(p[0]) for p in peaks]
            wt = [float(p[1]) for p in peaks]
            return spectral.BohrSpectrum(omegas=np.array(om), weights=np.array(wt))
        if kind == "ohmic":
            return spectral.AnalyticPSD.ohmic(data["amplitude"], data["cutoff"])
        if kind == "lorentzian":
            return spectral.AnalyticPSD.lorentzian(
                data["amplitude"], data["center"], data["width"])
        if kind == "one_over_f":
            return spectral.AnalyticPSD.one_over_f(
                data["amplitude"], data["exponent"],
                data["omega_min"], data["omega_max"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad PSD specification: {exc}") from None
    raise ConfigError(
        f"unknown PSD kind {kind!r}; choose from comb, ohmic, lorentzian, "
        f"one_over_f"
    )


def _biased_decomposition(mdl: model.PureDephasingModel):
    """Split V0, V1 into the (eta, V) coupling family with lam = 1.

    V = V0 - V1 and V0 + V1 = eta V; the split exists iff the sum is
    proportional to the difference.
    """
    diff = mdl.V0 - mdl.V1
    total = mdl.V0 + mdl.V1
    denom = float(np.vdot(diff, diff).real)
    if denom < 1e-24:
        raise ConfigError("model has V0 = V1; no coupling to analyze")
    eta = float(np.vdot(diff, total).real) / denom
    residual = float(np.linalg.norm(total - eta * diff))
    if residual > 1e-10 * (np.linalg.norm(total) + 1.0):
        raise ConfigError(
            "model couplings are not of the biased family "
            "(V0 + V1 is not proportional to V0 - V1); the second-order "
            "attenuation/phase description does not apply"
        )
    return eta, diff


def cmd_spectral(args) -> int:
    try:
        if (args.model is None) == (args.psd is None):
            raise ConfigError("exactly one of --model or --psd is required")
        grid = _tau_grid(args)
        grid = grid[grid > 0.0]
        if grid.size == 0:
            raise ConfigError("spectral grid needs positive pulse times")
        rows = []
        if args.model is not None:
            mdl, r0 = model.model_from_json(_load_json(args.model))
            if args.beta is not None:
                r0 = model.thermal_state(mdl.H_E, args.beta)
            eta, v = _biased_decomposition(mdl)
            spec = spectral.bohr_spectrum(mdl.H_E, v, r0)
            for tau in grid:
                chi = spectral.chi_echo(spec, tau)
                phi = spectral.phi_stationary(mdl.H_E, v, r0, tau)
                rows.append((tau, chi, phi,
                             spectral.second_order_W(1.0, eta, chi, phi).W_approx))
            sidecar = {
                "source": f"model:{args.model}",
                "eta": eta,
                "peaks": [[float(o), float(w)]
                          for o, w in zip(spec.omegas, spec.weights)],
            }
        else:
            psd = _psd_from_json(_load_json(args.psd))
            eta = args.eta
            beta = args.beta if args.beta is not None else 0.0
            for tau in grid:
                chi = spectral.chi_echo(psd, tau)
                phi = spectral.phi_echo(psd, tau, beta)
                rows.append((tau, chi, phi,
                             spectral.second_order_W(1.0, eta, chi, phi).W_approx))
            if isinstance(psd, spectral.BohrSpectrum):
                sidecar = {
                    "source": f"psd:{args.psd}",
                    "eta": eta, "beta": beta,
                    "peaks": [[float(o), float(w)]
                              for o, w in zip(psd.omegas, psd.weights)],
                }
            else:
                sidecar = {
                    "source": f"psd:{args.psd}",
                    "eta": eta, "beta": beta,
                    "family": psd.family, "params": psd.params,
                }
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except spectral.SpectralQuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    lines = ["tau,chi,phi,W2_re,W2_im"]
    for tau, chi, phi, w2 in rows:
        lines.append(",".join(
            [_fmt(tau), _fmt(chi), _fmt(phi), _fmt(w2.real), _fmt(w2.imag)]))
    out = Path(args.out)
    _write(out / "spectral.csv", "\n".join(lines) + "\n")
    _write_json(out / "spectral_peaks.json", sidecar)
    print(f"spectral: {len(rows)} points -> {out / 'spectral.csv'}")
    return EXIT_OK


def cmd_witness(args) -> int:
    try:
        if args.model is None:
            raise ConfigError("witness requires --model")
        mdl, r0 = model.model_from_json(_load_json(args.model))
        if args.beta is not None:
            r0 = model.thermal_state(mdl.H_E, args.beta)
        grid = _tau_grid(args, default=np.linspace(0.1, 3.0, 30))
        grid = grid[grid > 0.0]
        result = spectral.witness(mdl, r0, grid,
                                  threshold=args.tol if args.tol else 1e-10)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except spectral.HypothesisError as exc:
        print(f"witness hypotheses violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    out = Path(args.out)
    _write_json(out / "witness.json", {
        "verdict": result.verdict,
        "phi_max": result.phi_max,
        "threshold": result.threshold,
        "comm_norm_V1_R0": result.comm_norm_V1_R0,
        "taus": [float(t) for t in result.taus],
        "phi": [float(p) for p in result.phi],
    })
    print(f"witness: {result.verdict} (max |phi| = {result.phi_max:.3e}, "
          f"|[V1, R0]| = {result.comm_norm_V1_R0:.3e})")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.target == "fig1":
        ns = argparse.Namespace(
            scenario="fig1", model=None, c0=None, beta=None, seed=args.seed,
            a=None, b=None, tau_start=0.0, tau_stop=None, points=None,
            tol=None, out=args.out,
        )
        return cmd_scan(ns)
    if args.target == "sec4b":
        out = Path(args.out)
        table = []
        for c0 in (0.0, 0.25, 0.5, 0.7, 1.0):
            scn = scenarios.sec4b_snapshot(c0)
            t = scn.reference_time
            from .dynamics import coherence, echoed_coherence
            w_pre = coherence(scn.pair, scn.R0, t)
            w_echo = echoed_coherence(scn.pair, scn.R0, t)
            pre = entanglement.prepulse_separability(scn.pair, scn.R0, t)
            echo = entanglement.echoed_separability(scn.pair, scn.R0, t)
            table.append({
                "c0": c0,
                "W_pre": [w_pre.real, w_pre.imag],
                "W_echo": [w_echo.real, w_echo.imag],
                "comm_pre": pre.commutator_norm,
                "comm_echo": echo.commutator_norm,
                "separable_pre": pre.separable,
                "separable_echo": echo.separable,
            })
        scn = scenarios.sec4b_snapshot(0.7)
        t = scn.reference_time
        w0 = scn.pair.branch_unitary(0, t)
        w1 = scn.pair.branch_unitary(1, t)
        from .linalg import dagger
        _write_json(out / "sec4b_identities.json", {
            "reference_time": t,
            "w0_dagger": model.matrix_to_json(dagger(w0)),
            "w1": model.matrix_to_json(w1),
            "w0_dagger_w1": model.matrix_to_json(dagger(w0) @ w1),
            "echoed_operator": model.matrix_to_json(
                dagger(w0) @ dagger(w1) @ w0 @ w1),
            "table": table,
        })
        print(f"reproduce sec4b -> {out / 'sec4b_identities.json'}")
        for row in table:
            print(f"  c0={row['c0']:.2f}: W_pre={row['W_pre'][0]:+.3f}, "
                  f"W_echo={row['W_echo'][0]:+.3f}, "
                  f"echo separable={row['separable_echo']}")
        return EXIT_OK
    print(f"error: unknown reproduce target {args.target!r}", file=sys.stderr)
    return EXIT_CONFIG


def _add_common(p):
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--scenario", help="built-in scenario name")
    p.add_argument("--tau-start", type=float, default=0.0)
    p.add_argument("--tau-stop", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--a", help="qubit amplitude a as 're,im'")
    p.add_argument("--b", help="qubit amplitude b as 're,im'")
    p.add_argument("--c0", type=float, default=None,
                   help="snapshot environment weight (sec4b only)")
    p.add_argument("--beta", type=float, default=None,
                   help="inverse temperature; overrides R0 to thermal")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echoent",
        description="pure-dephasing echo scans, spectra, and entanglement "
                    "classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="classify a pulse-time grid")
    _add_common(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_spec = sub.add_parser("spectral", help="second-order chi/phi curves")
    _add_common(p_spec)
    p_spec.add_argument("--psd", help="PSD JSON file (comb or analytic family)")
    p_spec.add_argument("--eta", type=float, default=0.0,
                        help="coupling bias for --psd runs")
    p_spec.set_defaults(func=cmd_spectral)

    p_wit = sub.add_parser("witness", help="phase-shift entanglement witness")
    _add_common(p_wit)
    p_wit.set_defaults(func=cmd_witness)

    p_rep = sub.add_parser("reproduce", help="canned runs")
    p_rep.add_argument("target", choices=["fig1", "sec4b"])
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--out", default=".")
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
