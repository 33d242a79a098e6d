"""Multi-server simulator: wire frames, chunked databases, servers, client.

Frame layout: a 4-byte little-endian length (of everything after it), a
one-byte tag, then the payload.

    QUERY   u32 local index
    ANSWER  u32 array, one symbol per codeword of the record
    LOAD    share file bytes (replaces the server's share)
    ERROR   utf-8 message; the server closes the connection after it
"""

from __future__ import annotations

import math
import socket
import socketserver
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ff import FieldSpec
from .fileio import FormatError, parse_share, share_bytes
from .pir import (
    CostReport,
    EncodedShares,
    PirScheme,
    ShareStore,
    cost_report,
    gen_queries,
    reconstruct,
    setup,
    symbol_bits,
)

QUERY, ANSWER, LOAD, ERROR = 1, 2, 3, 4
TAG_NAMES = {QUERY: "QUERY", ANSWER: "ANSWER", LOAD: "LOAD", ERROR: "ERROR"}
MAX_FRAME = 1 << 30


class WireError(ValueError):
    pass


class RetrievalError(RuntimeError):
    pass


# -- frames --

def pack_frame(tag: int, payload: bytes = b"") -> bytes:
    return struct.pack("<IB", len(payload) + 1, tag) + payload


def unpack_frame(frame: bytes) -> tuple[int, bytes]:
    if len(frame) < 5:
        raise WireError("frame shorter than its header")
    (length,) = struct.unpack_from("<I", frame)
    if length != len(frame) - 4 or length < 1:
        raise WireError("frame length prefix does not match")
    return frame[4], frame[5:]


def query_frame(index: int) -> bytes:
    return pack_frame(QUERY, struct.pack("<I", index))


def answer_frame(symbols) -> bytes:
    return pack_frame(ANSWER, np.asarray(symbols, dtype="<u4").tobytes())


def error_frame(msg: str) -> bytes:
    return pack_frame(ERROR, msg.encode())


def parse_query(payload: bytes) -> int:
    if len(payload) != 4:
        raise WireError("QUERY payload must be one u32")
    return struct.unpack("<I", payload)[0]


def parse_answer(payload: bytes) -> np.ndarray:
    if len(payload) % 4:
        raise WireError("ANSWER payload is not a u32 array")
    return np.frombuffer(payload, dtype="<u4").astype(np.int64)


def recv_exact(sock, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        buf += chunk
    return bytes(buf)


def recv_frame(sock) -> bytes:
    head = recv_exact(sock, 4)
    (length,) = struct.unpack("<I", head)
    if not 1 <= length <= MAX_FRAME:
        raise WireError(f"bad frame length {length}")
    return head + recv_exact(sock, length)


# -- chunked database --

def symbols_per_record(record_bytes: int, F: FieldSpec) -> int:
    """Smallest m with q^m >= 256^record_bytes."""
    if F.p == 2:
        return math.ceil(8 * record_bytes / F.e)
    m, cap, need = 0, 1, 256**record_bytes
    while cap < need:
        cap *= F.q
        m += 1
    return m


def bytes_to_symbols(records: np.ndarray, F: FieldSpec, m: int) -> np.ndarray:
    """Rows of bytes -> rows of m base-q digits, big-endian, zero-padded."""
    records = np.asarray(records, dtype=np.uint8)
    nrec, nb = records.shape
    if F.p == 2:
        bits = np.unpackbits(records, axis=1)
        pad = m * F.e - bits.shape[1]
        bits = np.hstack([np.zeros((nrec, pad), dtype=np.uint8), bits])
        w = 1 << np.arange(F.e - 1, -1, -1, dtype=np.int64)
        return bits.reshape(nrec, m, F.e).astype(np.int64) @ w
    out = np.zeros((nrec, m), dtype=np.int64)
    for r in range(nrec):
        v = int.from_bytes(records[r].tobytes(), "big")
        for j in range(m - 1, -1, -1):
            v, out[r, j] = divmod(v, F.q)
    return out


def symbols_to_bytes(symbols: np.ndarray, F: FieldSpec, record_bytes: int) -> np.ndarray:
    symbols = np.atleast_2d(np.asarray(symbols, dtype=np.int64))
    nrec, m = symbols.shape
    if F.p == 2:
        bits = ((symbols[:, :, None] >> np.arange(F.e - 1, -1, -1)) & 1).reshape(nrec, m * F.e)
        bits = bits[:, m * F.e - 8 * record_bytes :].astype(np.uint8)
        return np.packbits(bits, axis=1)
    out = np.zeros((nrec, record_bytes), dtype=np.uint8)
    for r in range(nrec):
        v = 0
        for d in symbols[r].tolist():
            v = v * F.q + d
        out[r] = np.frombuffer(v.to_bytes(record_bytes, "big"), dtype=np.uint8)
    return out


@dataclass(eq=False)
class ChunkedDatabase:
    """k records of ``record_bytes`` bytes, each stored as m field symbols.

    ``symbols[i, r]`` is symbol r of record i; codeword r of the encoding
    carries column r, so one query vector fetches a whole record.
    """

    F: FieldSpec
    k: int
    record_bytes: int
    nbytes: int
    symbols: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.symbols.shape[1]

    @classmethod
    def from_bytes(cls, data: bytes, k: int, F: FieldSpec) -> "ChunkedDatabase":
        nbytes = len(data)
        rb = max(1, math.ceil(nbytes / k))
        buf = np.zeros(k * rb, dtype=np.uint8)
        buf[:nbytes] = np.frombuffer(data, dtype=np.uint8)
        m = symbols_per_record(rb, F)
        syms = bytes_to_symbols(buf.reshape(k, rb), F, m)
        return cls(F, k, rb, nbytes, syms)

    def record(self, i: int) -> bytes:
        return self.record_from_symbols(self.symbols[i], i)

    def record_from_symbols(self, syms, i: int) -> bytes:
        raw = symbols_to_bytes(syms, self.F, self.record_bytes)[0].tobytes()
        start = i * self.record_bytes
        return raw[: max(0, min(self.record_bytes, self.nbytes - start))]

    def to_bytes(self) -> bytes:
        raw = symbols_to_bytes(self.symbols, self.F, self.record_bytes).tobytes()
        return raw[: self.nbytes]


def encode_database(scheme_code, db: ChunkedDatabase) -> tuple[PirScheme, EncodedShares]:
    return setup(scheme_code, db.symbols)


# -- servers --

class ServerState:
    """Read-only answering logic shared by the loop-back and TCP servers."""

    def __init__(self, share: ShareStore, q: int):
        self.share = share
        self.q = q

    @classmethod
    def from_share_bytes(cls, data: bytes) -> "ServerState":
        head, vals = parse_share(data)
        return cls(ShareStore(vals, head["group_index"]), head["p"] ** head["e"])

    def handle(self, frame: bytes) -> tuple[bytes, bool]:
        """Response frame and whether to keep the connection open."""
        try:
            tag, payload = unpack_frame(frame)
            if tag == QUERY:
                idx = parse_query(payload)
                if idx >= self.share.s:
                    return error_frame(f"index {idx} out of range [0, {self.share.s})"), False
                row = np.atleast_1d(self.share.read(idx))
                return answer_frame(row), True
            if tag == LOAD:
                new = ServerState.from_share_bytes(payload)
                self.share, self.q = new.share, new.q
                return answer_frame([]), True
            return error_frame(f"unexpected frame tag {tag}"), False
        except (WireError, FormatError, ValueError) as exc:
            return error_frame(str(exc)), False


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        state: ServerState = self.server.state
        while True:
            try:
                frame = recv_frame(self.request)
            except ConnectionError:
                return
            except WireError as exc:
                self.request.sendall(error_frame(str(exc)))
                return
            resp, keep = state.handle(frame)
            self.request.sendall(resp)
            if not keep:
                return


class ShareServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, state: ServerState):
        self.state = state
        super().__init__(address, _Handler)


def start_server(state: ServerState, address=("127.0.0.1", 0)) -> ShareServer:
    """Serve in a background thread; ``server.server_address`` has the port."""
    srv = ShareServer(address, state)
    threading.Thread(target=srv.serve_forever, daemon=True).start()
    return srv


def serve(share_file, listen_address: tuple[str, int]):
    with open(share_file, "rb") as fh:
        state = ServerState.from_share_bytes(fh.read())
    with ShareServer(listen_address, state) as srv:
        srv.serve_forever()


# -- transports --

class LoopbackTransport:
    """In-process transport: frames go straight to ServerState.handle."""

    def __init__(self, states: list[ServerState]):
        self.states = states

    @classmethod
    def from_shares(cls, shares: EncodedShares, q: int) -> "LoopbackTransport":
        return cls([ServerState(sh, q) for sh in shares.shares])

    def exchange(self, j: int, frame: bytes) -> bytes:
        return self.states[j].handle(frame)[0]


class TcpTransport:
    def __init__(self, addresses, timeout: float = 10.0):
        self.addresses = [tuple(a) for a in addresses]
        self.timeout = timeout

    def exchange(self, j: int, frame: bytes) -> bytes:
        with socket.create_connection(self.addresses[j], timeout=self.timeout) as sock:
            sock.sendall(frame)
            return recv_frame(sock)


# -- client --

@dataclass
class Traffic:
    content_upload_bits: int = 0
    content_download_bits: int = 0
    raw_upload_bytes: int = 0
    raw_download_bytes: int = 0


@dataclass
class Retrieval:
    symbols: np.ndarray
    traffic: Traffic
    predicted: CostReport
    seconds: float


def client_retrieve(scheme: PirScheme, transport, i: int, seed, m: int = 1) -> Retrieval:
    """Fetch all m symbols of record ``i``; every server gets one QUERY.

    Raises RetrievalError on any error frame, failed server or accounting
    mismatch; nothing is reconstructed from partial answers.
    """
    t0 = time.perf_counter()
    Q = gen_queries(scheme, i, seed)
    frames = [query_frame(int(qj)) for qj in Q.queries]

    def ask(j):
        return transport.exchange(j, frames[j])

    with ThreadPoolExecutor(max_workers=min(scheme.ell, 32)) as ex:
        try:
            replies = list(ex.map(ask, range(scheme.ell)))
        except (OSError, WireError) as exc:
            raise RetrievalError(f"server unreachable: {exc}") from exc

    traffic = Traffic()
    sbits, qbits = symbol_bits(scheme.s), symbol_bits(scheme.q)
    answers = []
    for j, (qf, rf) in enumerate(zip(frames, replies)):
        tag, payload = unpack_frame(rf)
        if tag != ANSWER:
            raise RetrievalError(f"server {j}: {payload.decode(errors='replace')}")
        a = parse_answer(payload)
        if a.size != m or (a.size and a.max() >= scheme.q):
            raise RetrievalError(f"server {j}: malformed answer of {a.size} symbols")
        if parse_query(unpack_frame(qf)[1]) >= scheme.s:
            raise RetrievalError("query index out of range")
        traffic.content_upload_bits += sbits
        traffic.content_download_bits += qbits * a.size
        traffic.raw_upload_bytes += len(qf)
        traffic.raw_download_bytes += len(rf)
        answers.append(a)

    syms = reconstruct(scheme, i, answers, Q)
    pred = cost_report(scheme, m)
    if (traffic.content_upload_bits, traffic.content_download_bits) != (pred.upload_bits, pred.download_bits):
        raise RetrievalError("measured protocol bits differ from the cost model")
    return Retrieval(np.atleast_1d(syms), traffic, pred, time.perf_counter() - t0)


def load_share_states(paths) -> list[ServerState]:
    states = []
    for path in paths:
        with open(path, "rb") as fh:
            states.append(ServerState.from_share_bytes(fh.read()))
    return sorted(states, key=lambda st: st.share.group_index)


def shares_to_files(shares: EncodedShares, F: FieldSpec) -> list[bytes]:
    return [share_bytes(sh.values, F.p, F.e, sh.group_index) for sh in shares.shares]
