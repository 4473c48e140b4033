"""Training loop, evaluation, metrics emission and checkpointing.

Runs are bit-deterministic given the config seed: initialization, batch
order and arithmetic are all driven by seeded generators.  The metrics CSV
is part of that contract (two identical runs produce byte-identical files),
so its ``seconds`` column is reserved at 0.000 in format v1; measured
wall-clock timing is reported on stderr instead.
"""

import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .checkpoint import save_state
from .config import input_size
from .data import BatchIterator, att_split, load_att, load_mnist, resize_bilinear
from .errors import DataError, TrainingAborted
from .networks import build_network
from .nn import SGD, softmax_cross_entropy

CSV_HEADER = "iteration,loss,accuracy,seconds"


@dataclass
class EvalPoint:
    iteration: int
    loss: float
    accuracy: float
    wall_time: float  # stderr-only; not part of the deterministic CSV


def load_datasets(cfg, data_root=None):
    """Resolve and load the (train, test) pair described by the config."""
    root = Path(data_root if data_root is not None else cfg.data_root)
    if cfg.dataset == "mnist":
        train = load_mnist(root / cfg.train_images, root / cfg.train_labels)
        test = load_mnist(root / cfg.test_images, root / cfg.test_labels)
        if cfg.train_limit:
            train = train.subset(np.arange(min(cfg.train_limit, len(train))))
        expected = input_size(cfg)
        if train.images.shape[1:] != (expected, expected):
            raise DataError(
                f"expected {expected}x{expected} images, got {train.images.shape[1:]}"
            )
        return train, test
    full = load_att(root)
    resized = np.stack([
        resize_bilinear(img, cfg.image_size, cfg.image_size) for img in full.images
    ])
    full = type(full)(resized, full.labels, full.class_count)
    return att_split(full, cfg.per_class_train, cfg.split_seed)


def evaluate(network, dataset, batch_size=256):
    """Accuracy on a dataset in inference mode (running BN statistics)."""
    network.set_training(False)
    correct = 0
    for start in range(0, len(dataset), batch_size):
        images = dataset.images[start:start + batch_size]
        labels = dataset.labels[start:start + batch_size]
        logits = network.forward(images)
        correct += int((logits.argmax(axis=1) == labels).sum())
    network.set_training(True)
    return correct / len(dataset)


class Trainer:
    def __init__(self, cfg, train_set, test_set, log=None):
        self.cfg = cfg
        self.train_set = train_set
        self.test_set = test_set
        self.network = build_network(cfg, train_set.class_count)
        self.log = log if log is not None else sys.stderr

    def run(self):
        cfg = self.cfg
        batches = BatchIterator(self.train_set, cfg.batch_size, seed=cfg.seed)
        optimizer = SGD(self.network.parameters(), cfg.learning_rate, cfg.momentum)
        points = []
        window_losses = []
        started = time.perf_counter()
        for iteration in range(1, cfg.iterations + 1):
            images, labels = next(batches)
            logits = self.network.forward(images)
            if not np.isfinite(logits).all():
                raise TrainingAborted(iteration, self.network.scan_nonfinite(images))
            loss, grad = softmax_cross_entropy(logits, labels)
            if not np.isfinite(loss):
                raise TrainingAborted(iteration, self.network.scan_nonfinite(images))
            window_losses.append(loss)
            self.network.backward(grad)
            optimizer.step()
            if iteration % cfg.eval_every == 0 or iteration == cfg.iterations:
                accuracy = evaluate(self.network, self.test_set)
                point = EvalPoint(
                    iteration=iteration,
                    loss=float(np.mean(window_losses)),
                    accuracy=accuracy,
                    wall_time=time.perf_counter() - started,
                )
                window_losses = []
                points.append(point)
                print(
                    f"iteration {point.iteration}: loss {point.loss:.6f} "
                    f"accuracy {point.accuracy:.4f} wall {point.wall_time:.1f}s",
                    file=self.log,
                )
                if iteration == cfg.iterations:
                    break
        return points

    def save_checkpoint(self, path):
        save_state(path, self.network.state())


def write_metrics_csv(path, points):
    """Deterministic metrics artifact; see the module docstring for the
    reserved seconds column."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{p.iteration},{p.loss!r},{p.accuracy!r},0.000")
    Path(path).write_text("\n".join(lines) + "\n")
