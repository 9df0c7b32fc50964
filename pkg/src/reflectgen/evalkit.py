"""Detection evaluation: IoU, greedy matching, AP/mAP, and the two
reference losses.

AP uses all-point interpolation (the area under the precision envelope
over every recall point). Equal-score detections are ordered by
(frame id, box coordinates) so evaluation is deterministic. A class
with no ground truth has no AP; it is reported as absent, never as 0.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .annotate import Annotation, BoundingBox

DEFAULT_THRESHOLDS = (0.0, 0.25, 0.5, 0.75)


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class Detection:
    frame_id: int
    class_name: str
    box: BoundingBox
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "class": self.class_name,
            "box": self.box.to_list(),
            "score": self.score,
        }

    @staticmethod
    def from_dict(data: dict) -> "Detection":
        return Detection(
            frame_id=int(data["frame_id"]),
            class_name=data["class"],
            box=BoundingBox.from_list(data["box"]),
            score=float(data["score"]),
        )


@dataclass(frozen=True)
class FocalLossParams:
    gamma: float = 2.0
    alpha: float = 0.25

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


@dataclass(frozen=True)
class ClassCounts:
    true_positives: int
    false_positives: int
    false_negatives: int


@dataclass(frozen=True)
class EvalReport:
    """Per-class APs and their unweighted mean at each IoU threshold.

    ap[class][threshold] is None for classes without ground truth;
    those classes never enter the mAP average.
    """

    thresholds: tuple[float, ...]
    ap: dict[str, dict[float, float | None]]
    counts: dict[str, dict[float, ClassCounts]]
    mean_ap: dict[float, float]

    def to_dict(self) -> dict:
        return {
            "thresholds": list(self.thresholds),
            "classes": {
                name: {
                    str(t): {
                        "ap": self.ap[name][t],
                        "tp": self.counts[name][t].true_positives,
                        "fp": self.counts[name][t].false_positives,
                        "fn": self.counts[name][t].false_negatives,
                    }
                    for t in self.thresholds
                }
                for name in sorted(self.ap)
            },
            "mean_ap": {str(t): self.mean_ap[t] for t in self.thresholds},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        header = ["class"] + [f"AP@{t:g}" for t in self.thresholds]
        writer.writerow(header)
        for name in sorted(self.ap):
            row = [name]
            for t in self.thresholds:
                value = self.ap[name][t]
                row.append("" if value is None else f"{value:.6f}")
            writer.writerow(row)
        writer.writerow(["mAP"] + [f"{self.mean_ap[t]:.6f}"
                                   for t in self.thresholds])
        return out.getvalue()


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection area over union area; 0 for disjoint boxes."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def _detection_order(det: Detection):
    return (-det.score, det.frame_id, det.box.x_min, det.box.y_min,
            det.box.x_max, det.box.y_max)


def match_detections(detections: list[Detection],
                     ground_truths: list[Annotation],
                     threshold: float) -> list[bool]:
    """Greedy matching; returns a TP flag per detection in rank order.

    Each detection, visited in descending score, claims the unmatched
    ground truth of its frame with the highest IoU, if that IoU meets
    the threshold.
    """
    by_frame: dict[int, list[tuple[int, Annotation]]] = {}
    for index, gt in enumerate(ground_truths):
        by_frame.setdefault(gt.frame_id, []).append((index, gt))
    matched: set[int] = set()
    flags = []
    for det in sorted(detections, key=_detection_order):
        best_iou = -1.0
        best_index = -1
        for index, gt in by_frame.get(det.frame_id, ()):
            if index in matched:
                continue
            value = iou(det.box, gt.box)
            if value > best_iou:
                best_iou = value
                best_index = index
        if best_index >= 0 and best_iou >= threshold:
            matched.add(best_index)
            flags.append(True)
        else:
            flags.append(False)
    return flags


def average_precision(detections: list[Detection],
                      ground_truths: list[Annotation],
                      threshold: float) -> float | None:
    """All-point interpolated AP; None when there is no ground truth."""
    n_gt = len(ground_truths)
    if n_gt == 0:
        return None
    if not detections:
        return 0.0
    flags = np.array(match_detections(detections, ground_truths, threshold))
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / n_gt
    precision = tp / (tp + fp)
    # precision envelope: best precision at this recall or beyond
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    prev_recall = 0.0
    ap = 0.0
    for r, p, is_tp in zip(recall, envelope, flags):
        if is_tp:
            ap += (r - prev_recall) * p
            prev_recall = r
    return float(ap)


def mean_ap(detections: list[Detection],
            ground_truths: list[Annotation],
            thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS) -> EvalReport:
    """Per-class AP and mAP at each threshold.

    mAP averages only over classes that have ground truth. Raises
    EvalError when the ground-truth set is empty.
    """
    if not ground_truths:
        raise EvalError("cannot evaluate against an empty ground-truth set")
    classes = sorted({gt.class_name for gt in ground_truths}
                     | {det.class_name for det in detections})
    ap: dict[str, dict[float, float | None]] = {}
    counts: dict[str, dict[float, ClassCounts]] = {}
    for name in classes:
        dets = [d for d in detections if d.class_name == name]
        gts = [g for g in ground_truths if g.class_name == name]
        ap[name] = {}
        counts[name] = {}
        for t in thresholds:
            ap[name][t] = average_precision(dets, gts, t)
            n_tp = sum(match_detections(dets, gts, t))
            counts[name][t] = ClassCounts(
                true_positives=n_tp,
                false_positives=len(dets) - n_tp,
                false_negatives=len(gts) - n_tp,
            )
    means = {}
    for t in thresholds:
        values = [ap[name][t] for name in classes if ap[name][t] is not None]
        means[t] = float(np.mean(values))
    return EvalReport(thresholds=tuple(thresholds), ap=ap, counts=counts,
                      mean_ap=means)


def focal_loss(p, positive: bool,
               params: FocalLossParams = FocalLossParams(),
               eps: float = 1e-12):
    """Focal loss -alpha_t (1 - p_t)^gamma ln(p_t) for one prediction.

    `p` is the predicted probability of the positive class; p_t is p
    for positives and 1-p for negatives; alpha_t is alpha for positives
    and 1-alpha for negatives. Accepts scalars or arrays.
    """
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("probability outside [0, 1]")
    p_t = p if positive else 1.0 - p
    alpha_t = params.alpha if positive else 1.0 - params.alpha
    p_t = np.clip(p_t, eps, 1.0)
    loss = -alpha_t * (1.0 - p_t) ** params.gamma * np.log(p_t)
    return float(loss) if loss.ndim == 0 else loss


def smooth_l1(prediction, target, beta: float = 1.0):
    """0.5 d^2 / beta inside |d| < beta, |d| - 0.5 beta outside."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    d = np.abs(np.asarray(prediction, dtype=np.float64)
               - np.asarray(target, dtype=np.float64))
    loss = np.where(d < beta, 0.5 * d * d / beta, d - 0.5 * beta)
    return float(loss) if loss.ndim == 0 else loss


def save_detections(detections: list[Detection], path: str | Path) -> None:
    data = {"detections": [d.to_dict() for d in detections]}
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def load_detections(path: str | Path) -> list[Detection]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EvalError(f"{path}: not a valid detections file: {exc}") from exc
    try:
        records = data["detections"]
    except (TypeError, KeyError) as exc:
        raise EvalError(f"{path}: missing 'detections' array") from exc
    return [Detection.from_dict(r) for r in records]
