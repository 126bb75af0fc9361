"""Versioned binary weights file for the recurrent network.

Layout (little-endian)::

    magic "LGTN", version u16, input_width u32, hidden u32,
    then each parameter tensor in fixed key order as raw f64 values.

Raw doubles make the round trip bit-exact. Documented in
docs/model-format.md.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from lagoontwin.errors import IntegrityError
from lagoontwin.runoff.lstm import LstmNetwork

MAGIC = b"LGTN"
VERSION = 1


def _key_order(net_params: dict[str, np.ndarray]) -> list[str]:
    return sorted(net_params)


def dump_weights(net: LstmNetwork) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack("<HII", VERSION, net.input_width, net.hidden)
    for key in _key_order(net.params):
        tensor = np.ascontiguousarray(net.params[key], dtype="<f8")
        out += tensor.tobytes()
    return bytes(out)


def load_weights(data: bytes) -> LstmNetwork:
    if data[:4] != MAGIC:
        raise IntegrityError("bad weights magic")
    version, input_width, hidden = struct.unpack_from("<HII", data, 4)
    if version != VERSION:
        raise IntegrityError(f"unsupported weights version {version}")
    net = LstmNetwork(input_width=input_width, hidden=hidden)
    pos = 4 + struct.calcsize("<HII")
    for key in _key_order(net.params):
        shape = net.params[key].shape
        count = int(np.prod(shape))
        end = pos + 8 * count
        if end > len(data):
            raise IntegrityError("truncated weights file")
        net.params[key] = np.frombuffer(data[pos:end], dtype="<f8").reshape(shape).copy()
        pos = end
    if pos != len(data):
        raise IntegrityError("trailing bytes in weights file")
    return net


def save_weights(net: LstmNetwork, path: Path) -> None:
    Path(path).write_bytes(dump_weights(net))


def read_weights(path: Path) -> LstmNetwork:
    return load_weights(Path(path).read_bytes())
