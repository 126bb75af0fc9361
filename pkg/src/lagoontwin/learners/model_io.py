"""Versioned binary model files (documented in docs/model-format.md).

Layout (little-endian)::

    magic    "LGTM" (4 bytes)
    version  u16
    kind     u8 (1 = boosted trees, 2 = linear)
    payload  kind-specific; doubles are raw IEEE754 (bit-exact round trip)

Boosted-tree payload: hyperparams (n_trees u32, learning_rate f64,
max_depth u16, min_samples_leaf u16, seed u64), base score f64, tree count
u32, then per tree: node count u32 and nodes as
(feature i32, threshold f64, left i32, right i32, value f64).
"""

from __future__ import annotations

import struct
from pathlib import Path

from lagoontwin.errors import IntegrityError
from lagoontwin.learners.gbrt import GbrtModel, HyperParams
from lagoontwin.learners.linear import LinearModel, NaivePersistence
from lagoontwin.learners.tree import RegressionTree, TreeNode

import numpy as np

MAGIC = b"LGTM"
VERSION = 1
KIND_GBRT = 1
KIND_LINEAR = 2
KIND_NAIVE = 3

_NODE = struct.Struct("<idiid")


def _encode_tree(tree: RegressionTree) -> bytes:
    out = bytearray(struct.pack("<I", len(tree.nodes)))
    for node in tree.nodes:
        out += _NODE.pack(node.feature, node.threshold, node.left, node.right, node.value)
    return bytes(out)


def _decode_tree(data: bytes, pos: int, max_depth: int, min_leaf: int) -> tuple[RegressionTree, int]:
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    nodes = []
    for _ in range(count):
        nodes.append(TreeNode(*_NODE.unpack_from(data, pos)))
        pos += _NODE.size
    return RegressionTree(tuple(nodes), max_depth, min_leaf), pos


def dump_model(model: GbrtModel | LinearModel) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack("<H", VERSION)
    if isinstance(model, GbrtModel):
        out += struct.pack("<B", KIND_GBRT)
        p = model.params
        out += struct.pack(
            "<IdHHQ", p.n_trees, p.learning_rate, p.max_depth, p.min_samples_leaf, p.seed
        )
        out += struct.pack("<d", model.base_score)
        out += struct.pack("<I", len(model.trees))
        for tree in model.trees:
            out += _encode_tree(tree)
    elif isinstance(model, LinearModel):
        out += struct.pack("<B", KIND_LINEAR)
        out += struct.pack("<I", len(model.coef))
        out += struct.pack(f"<{len(model.coef)}d", *model.coef)
        out += struct.pack("<d", model.intercept)
    elif isinstance(model, NaivePersistence):
        out += struct.pack("<B", KIND_NAIVE)
    else:
        raise IntegrityError(f"cannot serialize model type {type(model).__name__}")
    return bytes(out)


def load_model(data: bytes) -> GbrtModel | LinearModel:
    if data[:4] != MAGIC:
        raise IntegrityError("bad model magic")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != VERSION:
        raise IntegrityError(f"unsupported model version {version}")
    (kind,) = struct.unpack_from("<B", data, 6)
    pos = 7
    if kind == KIND_GBRT:
        n_trees, lr, max_depth, min_leaf, seed = struct.unpack_from("<IdHHQ", data, pos)
        pos += struct.calcsize("<IdHHQ")
        (base,) = struct.unpack_from("<d", data, pos)
        pos += 8
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        trees = []
        for _ in range(count):
            tree, pos = _decode_tree(data, pos, max_depth, min_leaf)
            trees.append(tree)
        params = HyperParams(n_trees, lr, max_depth, min_leaf, seed)
        return GbrtModel(
            base_score=base, trees=tuple(trees), learning_rate=lr, params=params
        )
    if kind == KIND_LINEAR:
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        coef = np.array(struct.unpack_from(f"<{n}d", data, pos))
        pos += 8 * n
        (intercept,) = struct.unpack_from("<d", data, pos)
        return LinearModel(coef=coef, intercept=intercept)
    if kind == KIND_NAIVE:
        return NaivePersistence()
    raise IntegrityError(f"unknown model kind {kind}")


def save_model(model: GbrtModel | LinearModel, path: Path) -> None:
    Path(path).write_bytes(dump_model(model))


def read_model(path: Path) -> GbrtModel | LinearModel:
    return load_model(Path(path).read_bytes())
