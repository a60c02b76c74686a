"""LogNNet assembly: configuration, training, evaluation, persistence.

Training order: materialize W1, fit hidden stats on the training set,
then train the classifier for ``epochs`` in-order passes, scoring the test
set after each.  W1 is materialized for fitting regardless of the chosen
inference algorithm; all algorithms produce the same sums, so the trained
model does not depend on that choice.
"""
import json
import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import kernels
from .chaos import N_IN, ReservoirParams, lyapunov, materialize_w1
from .classifier import N_CLASSES, check_stack, forward, init_stack, pack, train_epoch
from .errors import ModelFormatError, ParameterError
from .reservoir import HiddenStats, normalize_hidden, project_images, stats_from_raw
from .rng import derive_seed
from .tpattern import Pattern, builtin_pattern, load_pattern

BYTES_PER_ELEMENT = 4


def parse_shape(text):
    """``"784:P:10"`` or ``"784:P:H:10"`` -> (P, classifier widths)."""
    try:
        parts = [int(p) for p in str(text).split(":")]
    except ValueError:
        raise ParameterError(f"bad shape {text!r}; expected 784:P[:H]:10") from None
    if len(parts) < 3 or parts[0] != 784 or parts[-1] != N_CLASSES or min(parts) < 1:
        raise ParameterError(f"bad shape {text!r}; expected 784:P[:H]:10")
    return parts[1], tuple(parts[2:])


def format_shape(P, classifier_shape):
    return ":".join(str(v) for v in (784, P, *classifier_shape))


@dataclass(frozen=True)
class NetworkConfig:
    params: ReservoirParams = field(default_factory=ReservoirParams)
    pattern: object = 3  # builtin id, or path of a pattern file
    classifier_shape: tuple = (10,)
    learning_rate: float = 0.3
    epochs: int = 20
    seed: int = 1
    algorithm: int = 2
    loss: str = "mse"

    def __post_init__(self):
        object.__setattr__(self, "classifier_shape", tuple(int(v) for v in self.classifier_shape))
        if not self.classifier_shape or self.classifier_shape[-1] != N_CLASSES:
            raise ParameterError("classifier shape must end in 10")
        if min(self.classifier_shape) < 1:
            raise ParameterError("classifier widths must be positive")
        if not self.learning_rate > 0:
            raise ParameterError("learning rate must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ParameterError("epochs must be a positive integer")
        if self.algorithm not in (1, 2, 3):
            raise ParameterError("algorithm must be 1, 2 or 3")
        if self.loss not in ("mse", "ce"):
            raise ParameterError("loss must be 'mse' or 'ce'")

    @property
    def shape(self):
        return format_shape(self.params.P, self.classifier_shape)

    def resolve_pattern(self):
        if isinstance(self.pattern, Pattern):
            return self.pattern
        if isinstance(self.pattern, int) or str(self.pattern).isdigit():
            return builtin_pattern(int(self.pattern))
        return load_pattern(self.pattern)

    def to_dict(self):
        d = asdict(self)
        d["classifier_shape"] = list(self.classifier_shape)
        if isinstance(self.pattern, Pattern):
            d["pattern"] = "embedded"
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["params"] = ReservoirParams(**d["params"])
        d["classifier_shape"] = tuple(d["classifier_shape"])
        return cls(**d)


@dataclass(eq=False)
class Model:
    config: NetworkConfig
    pattern: Pattern
    stats: HiddenStats
    layers: list
    training_history: list = field(default_factory=list)

    def __post_init__(self):
        if self.stats.P != self.config.params.P:
            raise ParameterError("hidden stats width does not match P")
        check_stack(self.layers, self.config.params.P + 1)
        if self.layers[-1].shape[1] != N_CLASSES:
            raise ParameterError("classifier must end with 10 outputs")

    @property
    def params(self):
        return self.config.params

    def hidden(self, images, algorithm=3, w1=None):
        raw = project_images(images, self.pattern, self.params, algorithm, w1)
        return normalize_hidden(raw, self.stats)

    def predict(self, images, algorithm=None, threads=1):
        return classify_images(self, images, algorithm, threads)


@dataclass(frozen=True)
class MemoryReport:
    stored_elements: int
    bytes: int
    breakdown: dict

    def rows(self):
        return [(name, count, count * BYTES_PER_ELEMENT)
                for name, count in self.breakdown.items()]


def memory_report(config, algorithm=None):
    """Weight storage under the 4-bytes-per-element accounting convention."""
    algorithm = config.algorithm if algorithm is None else algorithm
    P = config.params.P
    breakdown = {}
    if algorithm == 1:
        breakdown["w1_scalar"] = 1
    elif algorithm == 2:
        breakdown["w1_row"] = N_IN
    elif algorithm == 3:
        breakdown["w1_matrix"] = N_IN * P
    else:
        raise ParameterError("algorithm must be 1, 2 or 3")
    fan_in = P
    for k, width in enumerate(config.classifier_shape, start=2):
        breakdown[f"w{k}"] = (fan_in + 1) * width
        fan_in = width
    total = sum(breakdown.values())
    return MemoryReport(total, total * BYTES_PER_ELEMENT, breakdown)


def accuracy(predictions, labels):
    labels = np.asarray(labels)
    if len(labels) == 0:
        return 0.0
    return float(np.count_nonzero(np.asarray(predictions) == labels)) / len(labels) * 100.0


def train(config, train_set, test_set=None, progress=None, degenerate="error"):
    """Fit hidden stats and train the classifier; returns a Model.

    ``progress(epoch, accuracy)`` is called after each epoch when given.
    ``degenerate`` is passed to ``stats_from_raw``.
    """
    params = config.params
    pattern = config.resolve_pattern()
    w1 = materialize_w1(params)
    raw_train = project_images(train_set.images, pattern, params, 3, w1)
    stats = stats_from_raw(raw_train, degenerate)
    h_train = normalize_hidden(raw_train, stats)
    del raw_train
    h_test = None
    if test_set is not None and len(test_set):
        h_test = normalize_hidden(project_images(test_set.images, pattern, params, 3, w1), stats)

    layers = init_stack(params.P, config.classifier_shape, config.seed)
    history = []
    for epoch in range(1, config.epochs + 1):
        train_epoch(layers, h_train, train_set.labels, config.learning_rate, config.loss)
        if h_test is not None:
            acc = accuracy(np.argmax(forward(h_test, layers), axis=1), test_set.labels)
            history.append(acc)
            if progress is not None:
                progress(epoch, acc)
    return Model(config, pattern, stats, layers, history)


def _classify_chunk(model, images, algorithm, w1):
    k = kernels.get()
    params = model.params
    flat, dims = pack(model.layers)
    wt = w1.wt if w1 is not None else np.zeros((params.P, N_IN))
    return np.asarray(k.classify(
        np.ascontiguousarray(images, dtype=np.uint8), model.pattern.perm, algorithm,
        params.r, params.A, params.B, params.form_code, params.P,
        wt, np.empty(N_IN), model.stats.sh_min, model.stats.sh_max,
        model.stats.usre, flat, dims))


def classify_images(model, images, algorithm=None, threads=1):
    """Predicted digits, running the full single-image pipeline per image."""
    algorithm = model.config.algorithm if algorithm is None else algorithm
    if algorithm not in (1, 2, 3):
        raise ParameterError("algorithm must be 1, 2 or 3")
    images = np.atleast_2d(images)
    w1 = materialize_w1(model.params) if algorithm == 3 else None
    if threads <= 1 or len(images) < 2 * threads:
        return _classify_chunk(model, images, algorithm, w1)
    chunks = np.array_split(images, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(lambda c: _classify_chunk(model, c, algorithm, w1), chunks)
    return np.concatenate(list(parts))


def evaluate(model, dataset, algorithm=None, threads=1):
    """Percentage of correctly classified images."""
    return accuracy(classify_images(model, dataset.images, algorithm, threads),
                    dataset.labels)


# --- model file -------------------------------------------------------------
#
# magic "LOGNNET\0", u32 version, u32 config length, config JSON (UTF-8),
# 784 x u16 pattern, P x f64 for sh_min, sh_max, usre, u32 layer count,
# per layer u32 rows, u32 cols, rows*cols x f64, u32 history length,
# history f64s, then u32 CRC-32 of everything before it.  Little endian.

MAGIC = b"LOGNNET\0"
VERSION = 1


def model_to_bytes(model):
    cfg = model.config.to_dict()
    cfg.pop("algorithm")  # a runtime choice, not part of the model
    cfg_bytes = json.dumps(cfg, sort_keys=True).encode()
    parts = [MAGIC, struct.pack("<II", VERSION, len(cfg_bytes)), cfg_bytes,
             model.pattern.perm.astype("<u2").tobytes()]
    for arr in (model.stats.sh_min, model.stats.sh_max, model.stats.usre):
        parts.append(np.asarray(arr, dtype="<f8").tobytes())
    parts.append(struct.pack("<I", len(model.layers)))
    for w in model.layers:
        parts.append(struct.pack("<II", *w.shape))
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
    parts.append(struct.pack("<I", len(model.training_history)))
    parts.append(np.asarray(model.training_history, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"model file truncated at byte {len(self.data)}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def f64(self, n):
        return np.frombuffer(self.take(8 * n), dtype="<f8").astype(np.float64)


def model_from_bytes(data):
    if len(data) < len(MAGIC) + 12 or not data.startswith(MAGIC):
        raise ModelFormatError("not a LogNNet model file")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ModelFormatError("model file checksum mismatch (corrupt or truncated)")
    rd = _Reader(body)
    rd.take(len(MAGIC))
    version = rd.u32()
    if version != VERSION:
        raise ModelFormatError(f"unsupported model file version {version}")
    try:
        cfg = json.loads(rd.take(rd.u32()).decode())
        pattern = Pattern(np.frombuffer(rd.take(2 * 784), dtype="<u2").astype(np.int64))
        P = cfg["params"]["P"]
        stats = HiddenStats(rd.f64(P), rd.f64(P), rd.f64(P))
        layers = []
        for _ in range(rd.u32()):
            rows, cols = rd.u32(), rd.u32()
            layers.append(rd.f64(rows * cols).reshape(rows, cols))
        history = list(rd.f64(rd.u32()))
        config = NetworkConfig.from_dict(cfg)
    except (KeyError, TypeError, ValueError, UnicodeDecodeError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model file: {exc}") from None
    if rd.pos != len(body):
        raise ModelFormatError("trailing bytes after model data")
    return Model(config, pattern, stats, layers, [float(a) for a in history])


def save_model(model, path):
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path, algorithm=None):
    model = model_from_bytes(Path(path).read_bytes())
    if algorithm is not None:
        model.config = replace(model.config, algorithm=algorithm)
    return model


def model_to_text(model):
    """Human-readable dump of a model."""
    lines = [f"# LogNNet-{model.config.shape}",
             "config " + json.dumps(model.config.to_dict(), sort_keys=True),
             "pattern " + " ".join(map(str, model.pattern.perm))]
    for name in ("sh_min", "sh_max", "usre"):
        lines.append(name + " " + " ".join(repr(float(v)) for v in getattr(model.stats, name)))
    for k, w in enumerate(model.layers, start=2):
        lines.append(f"w{k} {w.shape[0]}x{w.shape[1]}")
        lines += [" ".join(repr(float(v)) for v in row) for row in w]
    lines.append("history " + " ".join(repr(a) for a in model.training_history))
    return "\n".join(lines) + "\n"


# --- parameter sweep --------------------------------------------------------

def sweep_r(config, r_grid, train_set, test_set, threads=1, lyapunov_samples=100_000,
            progress=None):
    """Train and score one model per r; rows of (r, accuracy, lyapunov).

    Neurons left constant by a periodic r feed 0 instead of aborting the sweep.
    """
    for r in r_grid:
        replace(config.params, r=float(r))  # validates r before any training

    def point(index_r):
        index, r = index_r
        cfg = replace(config, params=replace(config.params, r=float(r)),
                      seed=derive_seed(config.seed, index))
        model = train(cfg, train_set, test_set, degenerate="zero")
        acc = model.training_history[-1]
        lam = lyapunov(float(r), samples=lyapunov_samples, form=config.params.form)
        if progress is not None:
            progress(float(r), acc, lam)
        return (float(r), acc, lam)

    jobs = list(enumerate(r_grid))
    if threads <= 1:
        return [point(j) for j in jobs]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(point, jobs))
