"""MNIST IDX reader and writer.

IDX layout: a 4-byte big-endian magic (two zero bytes, a type code, the
number of dimensions), one big-endian uint32 per dimension, then the raw
data.  Images are magic 0x00000803 with dims (N, 28, 28); labels are
0x00000801 with dims (N,).  Gzipped files are decompressed transparently.
"""
import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetPairingError, IdxFormatError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
ROWS = COLS = 28
N_PIXELS = ROWS * COLS

TRAIN_FILES = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")
TEST_FILES = ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Images as a (N, 784) uint8 array, row-major 28x28; labels (N,) uint8."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise DatasetPairingError(
                f"{len(self.images)} images but {len(self.labels)} labels")

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (np.array_equal(self.images, other.images)
                and np.array_equal(self.labels, other.labels))

    def subset(self, n):
        return Dataset(self.images[:n], self.labels[:n])


def _read_bytes(path):
    data = Path(path).read_bytes()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def _parse_header(data, magic, ndim):
    if len(data) < 4:
        raise IdxFormatError("file too short for IDX magic", offset=len(data))
    (got,) = struct.unpack_from(">I", data, 0)
    if got != magic:
        raise IdxFormatError(
            f"bad magic 0x{got:08X}, expected 0x{magic:08X}", offset=0)
    header_len = 4 + 4 * ndim
    if len(data) < header_len:
        raise IdxFormatError("truncated IDX header", offset=len(data))
    return struct.unpack_from(">" + "I" * ndim, data, 4), header_len


def parse_idx_images(data):
    (n, rows, cols), start = _parse_header(data, IMAGE_MAGIC, 3)
    if (rows, cols) != (ROWS, COLS):
        raise IdxFormatError(f"images are {rows}x{cols}, expected 28x28",
                             offset=8)
    need = start + n * N_PIXELS
    if len(data) < need:
        raise IdxFormatError(
            f"truncated image data: header declares {n} images", offset=len(data))
    return np.frombuffer(data, np.uint8, n * N_PIXELS, start).reshape(n, N_PIXELS).copy()


def parse_idx_labels(data):
    (n,), start = _parse_header(data, LABEL_MAGIC, 1)
    if len(data) < start + n:
        raise IdxFormatError(
            f"truncated label data: header declares {n} labels", offset=len(data))
    labels = np.frombuffer(data, np.uint8, n, start).copy()
    bad = np.flatnonzero(labels > 9)
    if bad.size:
        raise IdxFormatError(f"label byte {labels[bad[0]]} out of range 0-9",
                             offset=start + int(bad[0]))
    return labels


def load_idx_images(path):
    return parse_idx_images(_read_bytes(path))


def load_idx_labels(path):
    return parse_idx_labels(_read_bytes(path))


def load_dataset(images_path, labels_path):
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise DatasetPairingError(
            f"{images_path} has {len(images)} images but {labels_path} has "
            f"{len(labels)} labels")
    return Dataset(images, labels)


def images_to_idx(images):
    images = np.asarray(images, dtype=np.uint8).reshape(-1, N_PIXELS)
    header = struct.pack(">IIII", IMAGE_MAGIC, len(images), ROWS, COLS)
    return header + images.tobytes()


def labels_to_idx(labels):
    labels = np.asarray(labels, dtype=np.uint8)
    return struct.pack(">II", LABEL_MAGIC, len(labels)) + labels.tobytes()


def save_dataset(dataset, images_path, labels_path):
    Path(images_path).write_bytes(images_to_idx(dataset.images))
    Path(labels_path).write_bytes(labels_to_idx(dataset.labels))


def _find(directory, name):
    for candidate in (name, name + ".gz", name.replace("-idx", ".idx")):
        p = Path(directory) / candidate
        if p.exists():
            return p
    raise FileNotFoundError(f"{name}[.gz] not found in {directory}")


def default_data_dir():
    """``$LOGNNET_DATA`` if set, else ``./data/mnist``."""
    return Path(os.environ.get("LOGNNET_DATA", "data/mnist"))


def load_mnist(directory=None):
    """Return ``(train, test)`` from the four canonical files in a directory."""
    directory = Path(directory) if directory is not None else default_data_dir()
    train = load_dataset(_find(directory, TRAIN_FILES[0]),
                         _find(directory, TRAIN_FILES[1]))
    test = load_dataset(_find(directory, TEST_FILES[0]),
                        _find(directory, TEST_FILES[1]))
    return train, test
