"""Command line front end.

`dbicm simulate` runs a sweep in-process by default; with --server it
becomes a thin client that submits the same job to a running service and
downloads the CSV. `dbicm serve` starts the HTTP service, and
`dbicm constellation` dumps a mapping table.

Exit codes: 0 on success, 1 for configuration errors or runtime
failures, 2 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .sweep import (
    SimConfig,
    SweepCancelled,
    build_constellation,
    emit_csv,
    run_sweep,
)

__all__ = ["build_parser", "main", "parse_ebn0"]


def parse_ebn0(text: str) -> list:
    """`start:step:stop` (inclusive grid) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step == 0:
            raise ValueError("ebn0 step must be non-zero")
        span = (stop - start) / step
        if span < -1e-9:
            raise ValueError(f"ebn0 range {text!r} is empty")
        count = int(span + 1e-9) + 1
        return [start + i * step for i in range(count)]
    points = [float(p) for p in text.split(",") if p.strip()]
    if not points:
        raise ValueError(f"no Eb/N0 points in {text!r}")
    return points


def _add_simulate_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="dbicm-wd",
                   choices=["bicm", "dbicm", "dbicm-wd", "dbicm-id", "genie"])
    p.add_argument("--mod", default="qam16",
                   choices=["qpsk", "qam16", "qam64", "apsk32"])
    p.add_argument("--apsk-rate", default="2/3",
                   help="DVB-S2 code rate identifier selecting the 32APSK "
                        "ring-radius pair")
    p.add_argument("--delay", default="0,1,0,1",
                   help="comma-separated per-position delays, e.g. 0,1,0,1")
    p.add_argument("--tn", type=int, default=101,
                   help="slots per transmission")
    p.add_argument("--window", "-W", type=int, default=5)
    p.add_argument("--iters", type=int, default=5,
                   help="outer iterations per window position")
    p.add_argument("--bp-iters", type=int, default=50)
    p.add_argument("--bp-variant", default="sumprod",
                   choices=["sumprod", "minsum"])
    p.add_argument("--demap", default="exact",
                   choices=["exact", "maxlog"],
                   help="bitwise LLR marginalization mode")
    p.add_argument("--code", default="peg:3,6,1200",
                   help="alist file path or peg:<dv>,<dc>,<N>")
    p.add_argument("--interleaver", default="auto",
                   choices=["auto", "identity", "random"])
    p.add_argument("--ebn0", required=True,
                   help="start:step:stop or comma-separated dB values")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--min-error-frames", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=100000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-",
                   help="output CSV path, - for stdout")
    p.add_argument("--quiet", action="store_true",
                   help="suppress per-point progress on stderr")
    p.add_argument("--server", default=None, metavar="URL",
                   help="submit the sweep to a running service instead of "
                        "simulating locally")
    p.add_argument("--poll-interval", type=float, default=1.0,
                   help="status poll period in seconds (server mode)")


def _config_from_args(args: argparse.Namespace) -> SimConfig:
    delays = tuple(int(d) for d in args.delay.split(","))
    return SimConfig(
        scheme=args.scheme,
        mod=args.mod,
        apsk_rate=args.apsk_rate,
        delays=delays,
        t_n=args.tn,
        window=args.window,
        iters=args.iters,
        bp_iters=args.bp_iters,
        bp_variant=args.bp_variant,
        demap_mode=args.demap,
        code_spec=args.code,
        interleaver=args.interleaver,
        master_seed=args.seed,
        min_error_frames=args.min_error_frames,
        max_frames=args.max_frames,
    )


def _write_csv(records, out_path: str) -> None:
    if out_path == "-":
        emit_csv(records, sys.stdout)
        return
    with open(out_path, "w", newline="") as fh:
        emit_csv(records, fh)


def _simulate_local(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    points = parse_ebn0(args.ebn0)

    def progress(idx: int, rec) -> None:
        if not args.quiet:
            print(
                f"[{idx + 1}/{len(points)}] {rec.scheme} "
                f"{rec.ebn0_db:g} dB: ber={rec.ber:.3e} fer={rec.fer:.3e} "
                f"frames={rec.frames}",
                file=sys.stderr,
            )

    records = run_sweep(cfg, points, workers=args.workers,
                        progress_cb=progress)
    _write_csv(records, args.out)
    return 0


def _simulate_remote(args: argparse.Namespace) -> int:
    import httpx

    payload = {
        "scheme": args.scheme,
        "mod": args.mod,
        "apsk_rate": args.apsk_rate,
        "delay": args.delay,
        "tn": args.tn,
        "window": args.window,
        "iters": args.iters,
        "bp_iters": args.bp_iters,
        "bp_variant": args.bp_variant,
        "demap_mode": args.demap,
        "code": args.code,
        "interleaver": args.interleaver,
        "ebn0_points": parse_ebn0(args.ebn0),
        "seed": args.seed,
        "min_error_frames": args.min_error_frames,
        "max_frames": args.max_frames,
        "workers": args.workers,
    }
    base = args.server.rstrip("/")
    with httpx.Client(base_url=base, timeout=30.0) as client:
        resp = client.post("/sweeps", json=payload)
        if resp.status_code == 422:
            print(f"error: service rejected the request: {resp.text}",
                  file=sys.stderr)
            return 1
        resp.raise_for_status()
        job_id = resp.json()["id"]
        if not args.quiet:
            print(f"submitted sweep {job_id} to {base}", file=sys.stderr)
        try:
            while True:
                status = client.get(f"/sweeps/{job_id}")
                status.raise_for_status()
                body = status.json()
                state = body["state"]
                if not args.quiet:
                    print(
                        f"  {state}: {body['points_done']}/"
                        f"{body['points_total']} points",
                        file=sys.stderr,
                    )
                if state in ("done", "failed", "cancelled"):
                    break
                time.sleep(args.poll_interval)
        except KeyboardInterrupt:
            client.delete(f"/sweeps/{job_id}")
            print(f"cancelled sweep {job_id}", file=sys.stderr)
            return 1
        if state != "done":
            print(f"error: sweep {job_id} ended as {state}: "
                  f"{body.get('error')}", file=sys.stderr)
            return 1
        csv_text = client.get(f"/sweeps/{job_id}/csv")
        csv_text.raise_for_status()
    if args.out == "-":
        sys.stdout.write(csv_text.text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(csv_text.text)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.server:
        return _simulate_remote(args)
    return _simulate_local(args)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="warning" if args.quiet else "info")
    return 0


def cmd_constellation(args: argparse.Namespace) -> int:
    const = build_constellation(args.tag, args.apsk_rate)
    rows = [
        {
            "label": int(i),
            "bits": "".join(str(b) for b in const.bits[i]),
            "re": float(const.points[i].real),
            "im": float(const.points[i].imag),
        }
        for i in range(const.points.size)
    ]
    if args.format == "json":
        json.dump({"name": const.name, "m": const.m, "points": rows},
                  sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print("label,bits,re,im")
        for r in rows:
            print(f"{r['label']},{r['bits']},{r['re']:.12g},{r['im']:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbicm",
        description="Delayed BICM link simulations: windowed decoding, "
                    "iterative detection, and reference receivers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a BER/FER sweep")
    _add_simulate_args(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--quiet", action="store_true")
    p_serve.set_defaults(func=cmd_serve)

    p_const = sub.add_parser("constellation", help="print a mapping table")
    p_const.add_argument("tag",
                         choices=["qpsk", "qam16", "qam64", "apsk32"])
    p_const.add_argument("--apsk-rate", default="2/3")
    p_const.add_argument("--format", default="csv", choices=["csv", "json"])
    p_const.set_defaults(func=cmd_constellation)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SweepCancelled:
        print("error: sweep cancelled", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
