"""Command-line front end.

Subcommands:
  figure   write the CSV for one bundled figure preset (2..10)
  sweep    evaluate evaluators over a grid described on the command line
  pairing  total-EC pairing study, optionally exhaustive over matchings
  selftest run the built-in invariant checks

Exit code 0 on success; on failure a single machine-readable JSON line is
printed to stderr and the exit code is nonzero.  The default stream seed
can be overridden with the NOMA_FBL_SEED environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DomainError
from .harness import FIGURE_IDS, SweepSpec, SystemConfig, run_figure, run_sweep
from .pairing import PairingSet, NomaPair, PairEcTable, best_pairing, enumerate_pairings
from .rate import FblParams


def _parse_set(items: list[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise DomainError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _parse_grid(spec: str) -> tuple[float, ...]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"range grid must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step == 0.0:
            raise DomainError("grid step must be nonzero")
        values = []
        k = 0
        while True:
            v = start + k * step
            if (step > 0 and v > stop + 1e-12) or (step < 0 and v < stop - 1e-12):
                break
            values.append(v)
            k += 1
        return tuple(values)
    return tuple(float(tok) for tok in spec.split(",") if tok.strip())


def _cmd_figure(args) -> int:
    overrides = _parse_set(args.set or [])
    path = run_figure(args.fig_id, overrides, args.out)
    print(path)
    return 0


def _cmd_sweep(args) -> int:
    cfg = SystemConfig.from_json(args.config) if args.config else SystemConfig()
    spec = SweepSpec(
        axis=args.axis,
        grid=_parse_grid(args.grid),
        evaluators=tuple(tok.strip() for tok in args.evaluators.split(",") if tok.strip()),
        output_path=args.out,
    )
    print(run_sweep(cfg, spec))
    return 0


def _cmd_pairing(args) -> int:
    fp = FblParams(args.blocklength, args.error_prob)
    if args.exhaustive:
        ps, score = best_pairing(args.num_users, fp, args.theta, 10 ** (args.rho_db / 10.0),
                                 args.samples, args.seed)
        print(f"matchings evaluated: {len(enumerate_pairings(args.num_users))}")
        print(f"best pairing: {ps.key()}  total_ec={score!r}")
        return 0
    # default: price the nested pairing (1,V), (2,V-1), ... on shared draws
    v = args.num_users
    table = PairEcTable(v, fp, args.theta, 10 ** (args.rho_db / 10.0), args.samples, args.seed)
    nested = PairingSet(tuple(NomaPair(k, v + 1 - k) for k in range(1, v // 2 + 1)))
    print(f"nested pairing: {nested.key()}  total_ec={table.total(nested)!r}")
    return 0


def _cmd_selftest(_args) -> int:
    from .selftest import run_selftest

    return run_selftest()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="noma-fbl",
        description="Effective capacity of finite-blocklength NOMA downlinks over Rayleigh fading",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", help="write the CSV for one bundled figure preset")
    p_fig.add_argument("fig_id", type=int, choices=FIGURE_IDS, metavar="FIG",
                       help=f"figure id, one of {FIGURE_IDS}")
    p_fig.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a SystemConfig field (repeatable)")
    p_fig.add_argument("--out", help="output CSV path (default figure<FIG>.csv)")
    p_fig.set_defaults(fn=_cmd_figure)

    p_sweep = sub.add_parser("sweep", help="evaluate evaluators over a parameter grid")
    p_sweep.add_argument("--config", help="JSON file mirroring SystemConfig fields")
    p_sweep.add_argument("--axis", required=True, choices=("rho_db", "theta", "epsilon"))
    p_sweep.add_argument("--grid", required=True,
                         help="comma list '1e-3,1e-2,...' or range 'start:stop:step'")
    p_sweep.add_argument("--evaluators", required=True,
                         help="comma subset of mc,closed,high_snr,asymptotic")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_pair = sub.add_parser("pairing", help="total-EC pairing study")
    p_pair.add_argument("--num-users", "--V", dest="num_users", type=int, required=True)
    p_pair.add_argument("--rho-db", type=float, required=True)
    p_pair.add_argument("--theta", type=float, default=0.01)
    p_pair.add_argument("--blocklength", type=int, default=400)
    p_pair.add_argument("--error-prob", type=float, default=1e-5)
    p_pair.add_argument("--samples", type=int, default=1_000_000)
    p_pair.add_argument("--seed", type=int, default=None)
    p_pair.add_argument("--exhaustive", action="store_true",
                        help="search all perfect matchings (V <= 12)")
    p_pair.set_defaults(fn=_cmd_pairing)

    p_self = sub.add_parser("selftest", help="run the built-in invariant checks")
    p_self.set_defaults(fn=_cmd_selftest)

    args = parser.parse_args(argv)
    if getattr(args, "seed", "absent") is None:
        from .harness import default_seed

        args.seed = default_seed()
    try:
        return args.fn(args)
    except Exception as exc:  # single machine-readable error line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
