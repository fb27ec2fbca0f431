"""
Seeded randomness and content hashing.

Every random draw in the pipeline comes from `make_rng(seed, stream)`: a numpy
Generator on the Philox counter-based bit generator. The stream name is folded
into the SeedSequence spawn key, so each consumer (parameter init, splits,
injection, ...) gets an independent generator and reruns match across
platforms regardless of the order the consumers run in.
"""
import hashlib
import json
import zlib

import numpy as np


def _stream_key(stream: str | int) -> int:
    if isinstance(stream, int):
        return stream
    return zlib.crc32(stream.encode('utf8'))


def make_rng(seed: int, *stream: str | int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(_stream_key(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(rng: np.random.Generator) -> int:
    """plain int seed for libraries that want one (networkx)"""
    return int(rng.integers(0, 2 ** 31 - 1))


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 20), b''):
            h.update(block)
    return h.hexdigest()


def dict_sha256(obj: dict) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(text.encode('utf8')).hexdigest()
