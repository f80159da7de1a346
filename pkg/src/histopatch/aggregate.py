"""Image-level decision: majority vote over patch labels.

Ties at the maximal count resolve by danger-ordered precedence (invasive,
in situ, benign, normal) so a tie never trades a more dangerous diagnosis
for a less dangerous one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .classify import CLASS_ORDER, ClassLabel
from .errors import EmptyVoteError


@dataclass(frozen=True)
class ImageDecision:
    """Vote outcome for one image."""

    label: ClassLabel
    vote_counts: Mapping[ClassLabel, int]
    n_patches: int
    tie_broken: bool

    def to_record(self) -> dict:
        return {
            "label": self.label.token,
            "vote_counts": {label.token: self.vote_counts[label] for label in CLASS_ORDER},
            "n_patches": self.n_patches,
            "tie_broken": self.tie_broken,
        }


def majority_vote(labels: Sequence[ClassLabel]) -> ImageDecision:
    """Pick the most frequent label; precedence breaks exact count ties.

    Raises:
        EmptyVoteError: no labels to vote over (unreachable in-pipeline,
            the tiler fallback guarantees at least one patch).
    """
    if not labels:
        raise EmptyVoteError("cannot vote over an empty label list")
    counter = Counter(labels)
    counts = {label: counter.get(label, 0) for label in CLASS_ORDER}
    top = max(counts.values())
    tied = [label for label in CLASS_ORDER if counts[label] == top]
    winner = min(tied, key=lambda label: label.precedence)
    return ImageDecision(
        label=winner,
        vote_counts=counts,
        n_patches=len(labels),
        tie_broken=len(tied) >= 2,
    )
