"""Class taxonomy: 5 furniture classes split into 21 sub-classes.

sink    -> 3 small + 3 large + 2 double  = 8
toilet  -> 2 cornered + 4 rounded        = 6
urinal  -> 2 with lid + 1 without        = 3
bidet   -> 3 similar variants            = 3
tap     -> 8 models merged into 1        = 1

The external-validation remap collapses the sanitary classes onto the
two labels shared with generic indoor datasets: sink stays sink, and
toilet, urinal and bidet all become toilet. tap has no counterpart and
is deliberately absent from the table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CLASS_NAMES = ("sink", "toilet", "urinal", "bidet", "tap")

SUB_CLASSES: dict[str, tuple[str, ...]] = {
    "sink": (
        "sink_small_1", "sink_small_2", "sink_small_3",
        "sink_large_1", "sink_large_2", "sink_large_3",
        "sink_double_1", "sink_double_2",
    ),
    "toilet": (
        "toilet_cornered_1", "toilet_cornered_2",
        "toilet_rounded_1", "toilet_rounded_2", "toilet_rounded_3", "toilet_rounded_4",
    ),
    "urinal": ("urinal_lid_1", "urinal_lid_2", "urinal_nolid_1"),
    "bidet": ("bidet_1", "bidet_2", "bidet_3"),
    "tap": ("tap",),
}

EXTERNAL_REMAP = {
    "sink": "sink",
    "toilet": "toilet",
    "urinal": "toilet",
    "bidet": "toilet",
}


@dataclass(frozen=True)
class ClassTaxonomy:
    """The class/sub-class hierarchy plus the external-validation remap table."""

    sub_classes: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(SUB_CLASSES))
    remap: dict[str, str] = field(default_factory=lambda: dict(EXTERNAL_REMAP))

    def __post_init__(self):
        if set(self.sub_classes) != set(CLASS_NAMES):
            raise ValueError(f"taxonomy must have exactly the classes {CLASS_NAMES}")
        n_sub = sum(len(v) for v in self.sub_classes.values())
        if n_sub != 21:
            raise ValueError(f"taxonomy must have exactly 21 sub-classes, got {n_sub}")
        # canonical class order regardless of input ordering
        ordered = {name: tuple(self.sub_classes[name]) for name in CLASS_NAMES}
        object.__setattr__(self, "sub_classes", ordered)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(self.sub_classes)

    def all_sub_classes(self) -> tuple[str, ...]:
        return tuple(s for subs in self.sub_classes.values() for s in subs)

    def class_of(self, sub_class: str) -> str:
        for cls, subs in self.sub_classes.items():
            if sub_class in subs:
                return cls
        raise KeyError(f"unknown sub-class {sub_class!r}")

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "sub_classes": {k: list(v) for k, v in self.sub_classes.items()},
            "remap": dict(self.remap),
        }

    @staticmethod
    def from_dict(data: dict) -> "ClassTaxonomy":
        return ClassTaxonomy(
            sub_classes={k: tuple(v) for k, v in data["sub_classes"].items()},
            remap=dict(data["remap"]),
        )


DEFAULT_TAXONOMY = ClassTaxonomy()

# The six classes of the first-study configuration (RA/DR/MLT-DR); each
# maps onto a (class, sub-class) pair of the full taxonomy.
SIX_CLASS_STUDY = (
    ("toilet", "toilet", "toilet_rounded_1"),
    ("bidet", "bidet", "bidet_1"),
    ("urinal", "urinal", "urinal_lid_1"),
    ("double_sink", "sink", "sink_double_1"),
    ("small_sink", "sink", "sink_small_1"),
    ("large_sink", "sink", "sink_large_1"),
)
