"""Command-line entry point: ``tdpir <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import basecodes as bc
from . import hamada
from .design import td_affine, td_curves, td_projective, verify_t_td
from .ff import field_new, field_of_order
from .fileio import (
    read_code,
    read_ic,
    read_manifest,
    write_manifest,
    write_scheme,
    write_share,
)
from .harness import (
    ChunkedDatabase,
    LoopbackTransport,
    RetrievalError,
    TcpTransport,
    client_retrieve,
    load_share_states,
    serve,
)
from .inccode import code_of_design, incidence_code, rs2_dimension_census
from .pir import PirScheme, audit_privacy_empirical, audit_privacy_exact, cost_report, setup

AFFINE_ROWS = "2:8,2:16,2:32,2:64,2:1024,2:4096,2:16384,2:65536,3:8,3:16,3:64,3:256,3:1024,3:8192,4:8,4:64,4:256,5:8,5:64"


def _target_field(q: int, ext: int):
    p = field_of_order(q).p
    return field_new(p, ext)


def build_code(family: str, args: list[str], ext: int = 1):
    """Incidence code for a family name and its integer arguments."""
    ints = [int(a) for a in args] if family != "oa-code" else []
    if family == "affine":
        m, q = ints
        return code_of_design(td_affine(m, field_of_order(q)), _target_field(q, ext))
    if family == "projective":
        m, q = ints
        return code_of_design(td_projective(m, field_of_order(q)), _target_field(q, ext))
    if family == "rs":
        t, q = ints
        return code_of_design(td_curves(t, field_of_order(q)), _target_field(q, ext))
    if family == "oa-code":
        C0 = read_code(args[0])
    elif family == "golay2":
        C0 = bc.golay24_binary()
    elif family == "golay3":
        C0 = bc.golay12_ternary()
    elif family == "rm1":
        C0 = bc.rm1(ints[0])
    elif family == "mds-q2":
        C0 = bc.mds_q_plus_2(field_of_order(ints[0]))
    else:
        raise SystemExit(f"unknown family {family!r}")
    return incidence_code(C0, field_new(C0.F.p, ext))


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def cmd_build(ns) -> int:
    C = build_code(ns.family, ns.args, ns.ext)
    ok = verify_t_td(C.design)
    path = write_scheme(C, ns.out)
    print(f"{C}  design check: {'ok' if ok else ok.detail}")
    print(f"wrote {path} and {path.with_suffix('.td')}")
    return 0 if ok else 1


def cmd_encode(ns) -> int:
    C = read_ic(ns.scheme)
    data = Path(ns.input).read_bytes()
    db = ChunkedDatabase.from_bytes(data, C.k, C.F)
    scheme, shares = setup(C, db.symbols)
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for sh in shares.shares:
        name = f"share_{sh.group_index:04d}.bin"
        write_share(out / name, sh.values, C.F.p, C.F.e, sh.group_index)
        files.append(name)
    write_manifest(out / "scheme.json", {
        "scheme": str(Path(ns.scheme).resolve()),
        "nbytes": db.nbytes,
        "record_bytes": db.record_bytes,
        "m": db.m,
        "k": C.k,
        "shares": files,
    })
    print(f"{db.k} records of {db.record_bytes} bytes ({db.m} symbols each) -> {len(files)} shares in {out}")
    return 0


def cmd_serve(ns) -> int:
    addr = _parse_addr(ns.listen)
    print(f"serving {ns.share} on {addr[0]}:{addr[1]}", flush=True)
    try:
        serve(ns.share, addr)
    except KeyboardInterrupt:
        pass
    return 0


def _open_manifest(path):
    man = read_manifest(path)
    C = read_ic(man["scheme"])
    db = ChunkedDatabase(C.F, C.k, man["record_bytes"], man["nbytes"], np.zeros((C.k, man["m"]), dtype=np.int64))
    return man, C, db


def cmd_retrieve(ns) -> int:
    man, C, db = _open_manifest(ns.manifest)
    scheme = PirScheme(C)
    if ns.servers:
        transport = TcpTransport([_parse_addr(a) for a in ns.servers.split(",")], ns.timeout)
    else:
        base = Path(ns.manifest).parent
        transport = LoopbackTransport(load_share_states([base / f for f in man["shares"]]))
    try:
        res = client_retrieve(scheme, transport, ns.index, ns.seed, man["m"])
    except RetrievalError as exc:
        print(f"retrieval failed: {exc}", file=sys.stderr)
        return 1
    record = db.record_from_symbols(res.symbols, ns.index)
    if ns.out:
        Path(ns.out).write_bytes(record)
    else:
        sys.stdout.buffer.write(record)
    tr = res.traffic
    print(
        f"\nupload {tr.content_upload_bits} bits, download {tr.content_download_bits} bits "
        f"(framing: {tr.raw_upload_bytes} B up, {tr.raw_download_bytes} B down)",
        file=sys.stderr,
    )
    return 0


def cmd_audit(ns) -> int:
    C = read_ic(ns.scheme)
    scheme = PirScheme(C)
    rep = audit_privacy_exact(scheme, ns.tmax)
    print(f"exact audit t_max={ns.tmax}: {'pass' if rep.ok else 'FAIL'} ({rep.cases} cases)")
    if not rep.ok:
        print(f"  {rep.counterexample}")
    ok = rep.ok
    if ns.empirical:
        T = [int(x) for x in ns.empirical.split(",")]
        e = audit_privacy_empirical(scheme, ns.i, ns.i2, T, ns.samples, ns.seed)
        print(f"empirical T={T}: TV={e.distance:.4f} threshold={e.threshold:.4f} "
              f"{'separated' if e.separated else 'indistinguishable'}")
    return 0 if ok else 1


def _parse_rows(text: str):
    return [tuple(int(x) for x in item.split(":")) for item in text.split(",") if item]


def cmd_tables(ns) -> int:
    if ns.kind == "costs":
        header = ["instance", "download", "ops/server", "storage overhead", "chunk"]
        rows = []
        for m, q in _parse_rows(ns.rows or "2:64,3:64,2:8,3:8"):
            a = hamada.chunk_costs(m, q)
            rows.append([f"affine(m={m},q={q})", hamada.human_bytes(a.download_bytes), a.ops_per_server,
                         hamada.human_bytes(a.overhead_bytes), hamada.human_bytes(a.chunk_bytes)])
    elif ns.family == "projective":
        header = ["q", "ell", "n", "k", "R"]
        qs = [int(x) for x in (ns.rows or "2,4,8,16,32,64").split(",")]
        rows = [[r.ell - 1, r.ell, r.n, r.k, f"{r.rate:.3f}"] for r in hamada.projective_table(qs)]
    else:
        header = ["m", "ell", "n", "k", "R"]
        rows = [[r.m, r.ell, r.n, r.k, f"{r.rate:.3f}"]
                for r in hamada.table1(_parse_rows(ns.rows or AFFINE_ROWS))]
    sys.stdout.write(hamada.format_table(header, rows, ns.format))
    return 0


def cmd_census(ns) -> int:
    hist = rs2_dimension_census(field_of_order(ns.q), ns.ell, ns.workers)
    print(", ".join(f"dim {d}: {c}" for d, c in hist.items()))
    return 0


def cmd_bench(ns) -> int:
    C = read_ic(ns.scheme)
    rng = np.random.default_rng(ns.seed)
    D = rng.integers(C.F.q, size=(C.k, ns.m))
    scheme, shares = setup(C, D)
    transport = LoopbackTransport.from_shares(shares, C.F.q)
    pred = cost_report(scheme, ns.m)
    failures = bad_reads = bad_bits = 0
    t0 = time.perf_counter()
    for r in range(ns.retrievals):
        i = int(rng.integers(C.k))
        shares.reset_counters()
        try:
            res = client_retrieve(scheme, transport, i, int(rng.integers(2**63)), ns.m)
        except RetrievalError:
            bad_bits += 1
            continue
        failures += int(not np.array_equal(res.symbols, D[i]))
        bad_reads += int(shares.reads != [1] * scheme.ell)
    dt = time.perf_counter() - t0
    print(json.dumps({
        "retrievals": ns.retrievals,
        "mean_latency_ms": 1000 * dt / max(1, ns.retrievals),
        "upload_bits": pred.upload_bits,
        "download_bits": pred.download_bits,
        "wrong_records": failures,
        "read_violations": bad_reads,
        "accounting_mismatches": bad_bits,
    }, indent=2))
    return 0 if failures == bad_reads == bad_bits == 0 else 1


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdpir", description="Transversal-design PIR toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="build a design and its incidence code")
    p.add_argument("family", choices=["affine", "projective", "oa-code", "golay2", "golay3", "rm1", "mds-q2", "rs"])
    p.add_argument("args", nargs="*", help="family parameters, e.g. 'affine 2 8' or 'rs 3 4'")
    p.add_argument("--ext", type=int, default=1, help="symbol field is GF(p^ext)")
    p.add_argument("--out", required=True, help="output stem; writes STEM.td and STEM.ic")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="encode a file into share files")
    p.add_argument("--scheme", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("serve", help="serve one share file over TCP")
    p.add_argument("--share", required=True)
    p.add_argument("--listen", default="127.0.0.1:9000")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("retrieve", help="privately retrieve one record")
    p.add_argument("--manifest", required=True, help="scheme.json written by encode")
    p.add_argument("--servers", help="comma-separated host:port list in group order; "
                                     "omit to read the share files in-process")
    p.add_argument("--index", type=int, required=True, help="0-based record index")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("audit", help="privacy audits")
    p.add_argument("--scheme", required=True)
    p.add_argument("--tmax", type=int, default=1)
    p.add_argument("--empirical", help="comma-separated coalition for a sampled TV check")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--i2", type=int, default=1)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("tables", help="dimension and cost tables")
    p.add_argument("--family", choices=["affine", "projective"], default="affine")
    p.add_argument("--rows", help="'m:q,...' (affine dimensions and costs) or 'q,...' (projective)")
    p.add_argument("--kind", choices=["dimensions", "costs"], default="dimensions",
                   help="code dimensions, or chunked-retrieval costs of a 100 MiB database")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("census", help="dimension census of IC(RS_2(x)) over subsets x")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("bench", help="retrieval latency and one-read-per-server check")
    p.add_argument("--scheme", required=True)
    p.add_argument("--retrievals", type=int, default=200)
    p.add_argument("--m", type=int, default=1, help="symbols per record")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ns = make_parser().parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
