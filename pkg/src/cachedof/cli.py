"""Command-line front end.

Subcommands: params | build | verify | simulate | table1 | bounds.  All file
outputs are JSON with a format-version field; reporting commands also write a
CSV alongside and render a matplotlib figure next to it.  Identical
invocations with the same seed produce byte-identical files.
"""

import argparse
import csv
import itertools
import json
import os
import random
import sys

from . import channel
from .errors import (
    ConstraintViolationError,
    IllConditionedError,
    InconsistentScheduleError,
    InvalidDemandError,
    NotPrimePowerError,
)
from .projgeom import vector_to_int
from .scheme_pg import PGParams, PGPacketId, PGScheme
from .scheme_subset import Round, SubsetPacketId, SubsetParams, SubsetScheme
from .verify import (
    TABLE1_MANIFEST,
    check_asymptotic_fractions,
    check_completeness,
    check_qbinom_bounds,
    compute_rate_dof,
    table1_report,
)

FORMAT_VERSION = 1
STREAM_THRESHOLD = 100_000
EXIT_PARAM_ERROR = 2
EXIT_VERIFY_FAILED = 3
EXIT_SIM_TOLERANCE = 4


def _default_seed():
    return int(os.environ.get("CACHEDOF_SEED", "0"))


def _add_scheme_subparsers(cmd, handler, extra):
    scheme_sub = cmd.add_subparsers(dest="scheme", required=True)
    sub = scheme_sub.add_parser("subset", help="subset-indexed scheme")
    sub.add_argument("--KT", type=int, required=True, help="number of transmitters")
    sub.add_argument("--tT", type=int, required=True, help="transmitters caching each subfile")
    sub.add_argument("--KR", type=int, required=True, help="number of receivers")
    sub.add_argument("--tR", type=int, required=True, help="receivers caching each subfile")
    pg = scheme_sub.add_parser("pg", help="projective-geometry scheme")
    for name, desc in (
        ("--q", "field order (prime power)"),
        ("--kt", "transmitter ambient dimension"),
        ("--lt", "transmitter base dimension parameter"),
        ("--mt", "transmitter cache-set dimension parameter"),
        ("--kr", "receiver ambient dimension"),
        ("--lr", "receiver base dimension parameter"),
        ("--mr", "receiver cache-set dimension parameter"),
    ):
        pg.add_argument(name, type=int, required=True, help=desc)
    for p in (sub, pg):
        p.add_argument("--N", type=int, default=None,
                       help="number of files (default: number of receivers)")
        extra(p)
        p.set_defaults(func=handler)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cachedof",
        description="Cache-aided interference schemes: build, verify, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("params", help="print derived scheme parameters")
    _add_scheme_subparsers(p_params, cmd_params, lambda p: None)

    p_build = sub.add_parser("build", help="enumerate and verify a delivery schedule")

    def build_extra(p):
        p.add_argument("--demands", default="random",
                       help="comma-separated files per receiver, or 'random'")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--out", help="write the scheme export JSON here")
        p.add_argument("--report", help="write the verification report JSON here")
        p.add_argument("--materialize", action="store_true",
                       help="embed all rounds in the export even above the "
                            f"streaming threshold ({STREAM_THRESHOLD})")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; the current implementation runs one "
                            "worker and output is deterministic regardless")

    _add_scheme_subparsers(p_build, cmd_build, build_extra)

    p_verify = sub.add_parser("verify", help="re-verify a scheme export")
    p_verify.add_argument("--in", dest="infile", required=True)
    p_verify.add_argument("--report", help="write the verification report JSON here")
    p_verify.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="zero-forcing and AWGN round simulation")

    def sim_extra(p):
        p.add_argument("--demands", default="random")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--snr", default="0,10,20,30", help="SNR grid in dB")
        p.add_argument("--draws", type=int, default=1000,
                       help="noise draws per SNR point")
        p.add_argument("--sample-rounds", type=int, default=20,
                       help="rounds taken from the head of the schedule")
        p.add_argument("--payload-len", type=int, default=64)
        p.add_argument("--noise-free", action="store_true",
                       help="skip the noise sweep; report exact-recovery MSE only")
        p.add_argument("--tolerance", type=float, default=1e-9,
                       help="zero-forcing residual tolerance")
        p.add_argument("--out", help="report prefix; writes .json, .csv and .png")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; the current implementation runs one "
                            "worker and output is deterministic regardless")

    _add_scheme_subparsers(p_sim, cmd_simulate, sim_extra)

    p_table = sub.add_parser("table1", help="regenerate the comparison table")
    p_table.add_argument("--out", help="report prefix; writes .json, .csv and .png")
    p_table.set_defaults(func=cmd_table1)

    p_bounds = sub.add_parser("bounds", help="q-binomial bound sweep")
    p_bounds.add_argument("--amax", type=int, default=12)
    p_bounds.add_argument("--fmax", type=int, default=None,
                          help="upper end of the f sweep (default: amax)")
    p_bounds.add_argument("--qset", default="2,3,4,5")
    p_bounds.add_argument("--out", help="report prefix; writes .json, .csv and .png")
    p_bounds.set_defaults(func=cmd_bounds)
    return parser


def _make_params(args):
    if args.scheme == "subset":
        n = args.N if args.N is not None else args.KR
        return SubsetParams(K_T=args.KT, K_R=args.KR, N=n, t_T=args.tT, t_R=args.tR)
    params = PGParams(q=args.q, k_t=args.kt, l_t=args.lt, m_t=args.mt,
                      k_r=args.kr, l_r=args.lr, m_r=args.mr)
    return params


def _n_files(args, params):
    if args.scheme == "subset":
        return params.N
    return args.N if args.N is not None else params.K_R


def _build_scheme(args):
    params = _make_params(args)
    n_files = _n_files(args, params)
    if args.scheme == "subset":
        scheme = SubsetScheme.build(params)
    else:
        scheme = PGScheme.build(params, n_files)
    demands = _parse_demands(args.demands, params.K_R, n_files, args.seed)
    return params, scheme, demands, n_files


def _parse_demands(spec, n_receivers, n_files, seed):
    if spec == "random":
        rng = random.Random(seed)
        return {r: rng.randint(1, n_files) for r in range(1, n_receivers + 1)}
    try:
        values = [int(x) for x in spec.split(",")]
    except ValueError as exc:
        raise InvalidDemandError(f"cannot parse demand vector {spec!r}") from exc
    if len(values) != n_receivers:
        raise InvalidDemandError(
            f"demand vector has {len(values)} entries for {n_receivers} receivers"
        )
    return dict(enumerate(values, start=1))


def _params_dict(params, n_files):
    if isinstance(params, SubsetParams):
        return {
            "family": "subset",
            "K_T": params.K_T, "K_R": params.K_R, "N": n_files,
            "t_T": params.t_T, "t_R": params.t_R,
            "F_C": params.F_C, "F_P": params.F_P, "F": params.F,
            "dof": params.dof,
            "tx_fraction": str(params.tx_fraction),
            "rx_fraction": str(params.rx_fraction),
        }
    return {
        "family": "pg",
        "q": params.q, "k_t": params.k_t, "l_t": params.l_t, "m_t": params.m_t,
        "k_r": params.k_r, "l_r": params.l_r, "m_r": params.m_r, "N": n_files,
        "K_T": params.K_T, "K_R": params.K_R,
        "t_T": params.t_T, "t_R": params.t_R,
        "F_T": params.F_T, "F_R": params.F_R, "F_P": params.F_P,
        "F_C": params.F_C, "F": params.F, "dof": params.dof,
        "tx_fraction": str(params.tx_fraction),
        "rx_fraction": str(params.rx_fraction),
    }


def _caching_doc(scheme):
    if isinstance(scheme, SubsetScheme):
        return {
            "subfiles": [
                {"T": list(t), "R": list(r)} for t, r in scheme.caching.subfiles
            ]
        }
    fam = scheme.families
    q = scheme.params.q
    return {
        "transmitters": [
            [vector_to_int(row, q) for row in s.basis] for s in fam.transmitters
        ],
        "receivers": [
            [vector_to_int(row, q) for row in s.basis] for s in fam.receivers
        ],
        "tx_cache_sets": [list(s) for s in fam.tx_cache_sets],
        "rx_cache_sets": [list(s) for s in fam.rx_cache_sets],
        "zf_sets": [list(s) for s in fam.zf_sets],
        "tx_cover": [list(c) for c in fam.tx_cover],
        "rx_cover": [list(c) for c in fam.rx_cover],
    }


def _round_doc(rnd, scheme_name):
    serves = []
    for rx, pkt in rnd.entries:
        if scheme_name == "subset":
            serves.append({
                "rx": rx, "file": pkt.file,
                "T": list(pkt.tx_set), "R": list(pkt.cached_at),
                "Rp": list(pkt.zero_forced_at),
            })
        else:
            serves.append({
                "rx": rx, "file": pkt.file,
                "Xt": pkt.tx_cache_idx, "Xr": pkt.rx_cache_idx, "Y": pkt.zf_idx,
            })
    return {"tx": list(rnd.transmitters), "serves": serves}


def _round_from_doc(doc, scheme_name):
    entries = []
    for s in doc["serves"]:
        if scheme_name == "subset":
            pkt = SubsetPacketId(s["file"], tuple(s["T"]), tuple(s["R"]),
                                 tuple(s["Rp"]))
        else:
            pkt = PGPacketId(s["file"], s["Xt"], s["Xr"], s["Y"])
        entries.append((s["rx"], pkt))
    return Round(transmitters=tuple(doc["tx"]), entries=tuple(entries))


def _write_json(path, doc):
    with open(path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2))
        fh.write("\n")


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def cmd_params(args):
    params = _make_params(args)
    n_files = _n_files(args, params)
    doc = _params_dict(params, n_files)
    width = max(len(k) for k in doc)
    for key, value in doc.items():
        print(f"{key:<{width}}  {value}")
    return 0


def cmd_build(args):
    params, scheme, demands, n_files = _build_scheme(args)
    total = params.round_count
    materialize = args.materialize or total <= STREAM_THRESHOLD
    if materialize:
        rounds = list(scheme.rounds(demands))
        report = check_completeness(iter(rounds), scheme, demands)
    else:
        rounds = None
        report = check_completeness(scheme.rounds(demands), scheme, demands)

    accounting = None
    try:
        accounting = compute_rate_dof(report, params)
    except InconsistentScheduleError as exc:
        print(f"rate/DoF accounting failed: {exc}", file=sys.stderr)

    if args.out:
        doc = {
            "format_version": FORMAT_VERSION,
            "scheme": args.scheme,
            "params": _params_dict(params, n_files),
            "seed": args.seed,
            "demands": [demands[r] for r in range(1, params.K_R + 1)],
            "caching": _caching_doc(scheme),
            "summary": report.to_json_dict(),
        }
        if rounds is not None:
            doc["rounds"] = [_round_doc(r, args.scheme) for r in rounds]
        _write_json(args.out, doc)
    if args.report:
        _write_json(args.report,
                    {"format_version": FORMAT_VERSION, **report.to_json_dict()})

    mode = "materialized" if materialize else "streamed"
    print(f"rounds: {report.rounds_total} ({mode}); valid: {report.rounds_valid}")
    print(f"packets: served {report.packets_served} / missing {report.packets_missing}; "
          f"duplicates {report.duplicate_count}; orphans {report.orphan_count}")
    if accounting:
        print(f"rate: {accounting['rate']}  dof: {accounting['dof']}")
    print(f"verification: {'PASS' if report.passed else 'FAIL'}")
    if not report.passed or accounting is None:
        return EXIT_VERIFY_FAILED
    return 0


def cmd_verify(args):
    with open(args.infile) as fh:
        doc = json.load(fh)
    if "rounds" not in doc:
        print("export has no materialized rounds; rebuild with --materialize",
              file=sys.stderr)
        return EXIT_PARAM_ERROR
    pd = doc["params"]
    if doc["scheme"] == "subset":
        params = SubsetParams(K_T=pd["K_T"], K_R=pd["K_R"], N=pd["N"],
                              t_T=pd["t_T"], t_R=pd["t_R"])
        scheme = SubsetScheme.build(params)
    else:
        params = PGParams(q=pd["q"], k_t=pd["k_t"], l_t=pd["l_t"], m_t=pd["m_t"],
                          k_r=pd["k_r"], l_r=pd["l_r"], m_r=pd["m_r"])
        scheme = PGScheme.build(params, pd["N"])
    demands = dict(enumerate(doc["demands"], start=1))
    rounds = (_round_from_doc(r, doc["scheme"]) for r in doc["rounds"])
    report = check_completeness(rounds, scheme, demands)
    if args.report:
        _write_json(args.report,
                    {"format_version": FORMAT_VERSION, **report.to_json_dict()})
    print(f"rounds: {report.rounds_total}; valid: {report.rounds_valid}")
    print(f"packets: served {report.packets_served} / missing {report.packets_missing}; "
          f"duplicates {report.duplicate_count}; orphans {report.orphan_count}; "
          f"extras {report.extras}; wrong file {report.wrong_file}; "
          f"foreign {report.foreign}")
    print(f"verification: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else EXIT_VERIFY_FAILED


def cmd_simulate(args):
    params, scheme, demands, _ = _build_scheme(args)
    snr_db = [float(x) for x in args.snr.split(",")]
    sampled = list(itertools.islice(scheme.rounds(demands), args.sample_rounds))
    if not sampled:
        raise ValueError("no rounds to simulate; increase --sample-rounds")
    setups = []
    max_residual = 0.0
    resampled = []
    for idx, rnd in enumerate(sampled):
        seed = channel.round_channel_seed(args.seed, idx)
        for attempt in itertools.count():
            realization = channel.sample_channel(len(rnd.entries), params.K_T, seed)
            try:
                plan = channel.solve_beamforming(rnd, scheme.caching, realization)
                break
            except IllConditionedError:
                # probability-zero under the channel model; resample and record
                resampled.append({"round": idx, "attempt": attempt})
                if attempt >= 4:
                    raise
                seed = (*channel.round_channel_seed(args.seed, idx), attempt)
        max_residual = max(
            max_residual, channel.residual_interference(rnd, plan, realization)
        )
        payloads = channel.make_payloads(
            len(rnd.entries), args.payload_len, seed=(args.seed, idx, 2)
        )
        setups.append((rnd, plan, realization, payloads))

    noise_free_mse = 0.0
    for rnd, plan, realization, payloads in setups:
        sim = channel.simulate_round(rnd, plan, realization, payloads, snr=1.0)
        noise_free_mse = max(noise_free_mse, float(sim.mse.max()))

    mse_by_snr = []
    if not args.noise_free:
        for db in snr_db:
            snr = 10.0 ** (db / 10.0)
            total = 0.0
            for draw in range(args.draws):
                rnd, plan, realization, payloads = setups[draw % len(setups)]
                sim = channel.simulate_round(
                    rnd, plan, realization, payloads, snr=snr,
                    noise_seed=channel.round_noise_seed(
                        args.seed, draw % len(setups), draw
                    ),
                )
                total += float(sim.mse.mean())
            mse_by_snr.append(total / args.draws)

    doc = {
        "format_version": FORMAT_VERSION,
        "scheme": args.scheme,
        "seed": args.seed,
        "snr_grid_db": snr_db,
        "rounds_checked": len(sampled),
        "draws_per_point": 0 if args.noise_free else args.draws,
        "payload_len": args.payload_len,
        "max_residual": max_residual,
        "noise_free_mse": noise_free_mse,
        "mse_by_snr": mse_by_snr,
        "tolerance": args.tolerance,
        "channel_resamples": resampled,
    }
    if args.out:
        _write_json(f"{args.out}.json", doc)
        rows = [("snr_db", "mse")]
        rows += [(db, mse) for db, mse in zip(snr_db, mse_by_snr)]
        _write_csv(f"{args.out}.csv", rows)
        if mse_by_snr:
            from .plots import render_mse_curve

            render_mse_curve(snr_db, mse_by_snr, f"{args.out}.png",
                             title=f"{args.scheme} scheme: MSE vs SNR")

    print(f"rounds checked: {len(sampled)}; max residual: {max_residual:.3e}")
    print(f"noise-free MSE: {noise_free_mse:.3e}")
    for db, mse in zip(snr_db, mse_by_snr):
        print(f"snr {db:6.1f} dB -> mse {mse:.6e}")
    if max_residual > args.tolerance:
        print(f"residual exceeds tolerance {args.tolerance:g}", file=sys.stderr)
        return EXIT_SIM_TOLERANCE
    return 0


def cmd_table1(args):
    report = table1_report()
    print(report.to_text())
    if args.out:
        doc = {"format_version": FORMAT_VERSION, **report.to_json_dict()}
        _write_json(f"{args.out}.json", doc)
        _write_csv(f"{args.out}.csv", report.csv_rows())
        from .plots import render_table1_chart

        render_table1_chart(report, f"{args.out}.png")
    return 0


def cmd_bounds(args):
    amax = args.amax
    fmax = args.fmax if args.fmax is not None else amax
    q_values = [int(x) for x in args.qset.split(",")]
    ok_lookup = {}
    failures = []
    for q in q_values:
        for b in range(1, amax + 1):
            for a in range(b, amax + 1):
                for f in range(b, fmax + 1):
                    ok = check_qbinom_bounds(a, b, f, q)
                    ok_lookup[(a, b, f, q)] = ok
                    if not ok:
                        failures.append((a, b, f, q))
    fraction_checks = []
    for i, row in enumerate(TABLE1_MANIFEST, start=1):
        ok = check_asymptotic_fractions(row.pg)
        fraction_checks.append({"row": i, "ok": ok})
        if not ok:
            failures.append(("fractions", i))

    doc = {
        "format_version": FORMAT_VERSION,
        "amax": amax,
        "fmax": fmax,
        "qset": q_values,
        "checks": len(ok_lookup),
        "failures": [list(f) for f in failures],
        "fraction_checks": fraction_checks,
    }
    if args.out:
        _write_json(f"{args.out}.json", doc)
        rows = [("a", "b", "f", "q", "ok")]
        rows += [
            (a, b, f, q, ok_lookup[(a, b, f, q)])
            for (a, b, f, q) in sorted(ok_lookup)
        ]
        _write_csv(f"{args.out}.csv", rows)
        from .plots import render_bounds_grid

        render_bounds_grid(amax, q_values, ok_lookup, f"{args.out}.png")

    print(f"bound checks: {len(ok_lookup)}; failures: {len(failures)}")
    for f in failures[:10]:
        print(f"failed: {f}")
    return 0 if not failures else EXIT_VERIFY_FAILED


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConstraintViolationError, NotPrimePowerError, InvalidDemandError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM_ERROR
    except IllConditionedError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIM_TOLERANCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
