"""Per-image inference timing for the three projection algorithms.

Protocol: pin to one core where the OS allows, run 10 untimed inferences,
then time ``repetitions`` batches.  A batch loops over the sample images
enough times to last at least ``min_batch_seconds``; its mean per-image
time is one measurement and the reported figure is the median across
batches.  Every timed call runs the whole pipeline (reorder, project,
normalize, classify, argmax) and its predictions are kept.
"""
import os
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .chaos import ReservoirParams
from .network import NetworkConfig, classify_images, train

WARMUP = 10
METRICS = ("t_alg1_ms", "t_alg2_ms", "t_alg3_ms", "t_alg1/t_alg3", "t_alg2/t_alg3")


def pin_to_one_core():
    """Restrict this process to a single CPU; returns the CPU or None."""
    try:
        cpu = min(os.sched_getaffinity(0))
        os.sched_setaffinity(0, {cpu})
        return cpu
    except (AttributeError, OSError):
        return None


def time_per_image(model, algorithm, images, repetitions=5, min_batch_seconds=0.02,
                   sink=None):
    """Median over batches of the mean seconds spent per image."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    images = np.ascontiguousarray(np.atleast_2d(images))
    warm = images[np.arange(WARMUP) % len(images)]
    classify_images(model, warm, algorithm)

    # size the batch from one timed pass
    t0 = time.perf_counter()
    preds = classify_images(model, images, algorithm)
    once = time.perf_counter() - t0
    loops = max(1, int(np.ceil(min_batch_seconds / max(once, 1e-9))))

    means = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        for _ in range(loops):
            preds = classify_images(model, images, algorithm)
        means.append((time.perf_counter() - t0) / (loops * len(images)))
    if sink is not None:
        sink.append(preds)
    return statistics.median(means)


@dataclass(frozen=True)
class TimingReport:
    P: int
    samples: int
    t_alg1: float
    t_alg2: float
    t_alg3: float

    @property
    def ratio13(self):
        return self.t_alg1 / self.t_alg3

    @property
    def ratio23(self):
        return self.t_alg2 / self.t_alg3

    def metric(self, name):
        return {
            "t_alg1_ms": self.t_alg1 * 1e3,
            "t_alg2_ms": self.t_alg2 * 1e3,
            "t_alg3_ms": self.t_alg3 * 1e3,
            "t_alg1/t_alg3": self.ratio13,
            "t_alg2/t_alg3": self.ratio23,
        }[name]


def time_model(model, images, repetitions=5, min_batch_seconds=0.02):
    t = [time_per_image(model, a, images, repetitions, min_batch_seconds)
         for a in (1, 2, 3)]
    return TimingReport(model.params.P, len(images), *t)


def bench_grid(p_grid, train_set, images, repetitions=5, fit_images=5000,
               min_batch_seconds=0.02, base_params=None, seed=1):
    """Timing reports for each hidden width.

    Each model gets hidden stats from the first ``fit_images`` training
    images and one training epoch; timing does not depend on how well
    it is trained.
    """
    base_params = base_params or ReservoirParams()
    fit = train_set.subset(fit_images)
    reports = []
    for P in p_grid:
        params = ReservoirParams(base_params.r, base_params.A, base_params.B, P,
                                 base_params.form)
        model = train(NetworkConfig(params=params, epochs=1, seed=seed), fit, None)
        reports.append(time_model(model, images, repetitions, min_batch_seconds))
    return reports


def ratio_report(reports):
    """Header and rows shaped like a metric x P table."""
    header = ["metric"] + [str(r.P) for r in reports]
    rows = [[name] + [r.metric(name) for r in reports] for name in METRICS]
    return header, rows
