import json

import pytest

from reflectgen.taxonomy import (CLASS_NAMES, DEFAULT_TAXONOMY, EXTERNAL_REMAP,
                                 SIX_CLASS_STUDY, ClassTaxonomy)


def test_five_classes_twentyone_sub_classes():
    assert DEFAULT_TAXONOMY.classes == CLASS_NAMES
    assert len(CLASS_NAMES) == 5
    assert len(DEFAULT_TAXONOMY.all_sub_classes()) == 21


def test_sub_class_split():
    sizes = {k: len(v) for k, v in DEFAULT_TAXONOMY.sub_classes.items()}
    assert sizes == {"sink": 8, "toilet": 6, "urinal": 3, "bidet": 3, "tap": 1}


def test_remap_table():
    assert EXTERNAL_REMAP == {"sink": "sink", "toilet": "toilet",
                              "urinal": "toilet", "bidet": "toilet"}
    assert "tap" not in EXTERNAL_REMAP


def test_class_of():
    assert DEFAULT_TAXONOMY.class_of("urinal_lid_2") == "urinal"
    assert DEFAULT_TAXONOMY.class_of("tap") == "tap"
    with pytest.raises(KeyError):
        DEFAULT_TAXONOMY.class_of("bathtub_1")


def test_round_trip():
    again = ClassTaxonomy.from_dict(DEFAULT_TAXONOMY.to_dict())
    assert again == DEFAULT_TAXONOMY


def test_round_trip_survives_key_sorting():
    text = json.dumps(DEFAULT_TAXONOMY.to_dict(), sort_keys=True)
    again = ClassTaxonomy.from_dict(json.loads(text))
    assert again.classes == CLASS_NAMES
    assert again == DEFAULT_TAXONOMY


def test_missing_class_rejected():
    subs = {k: v for k, v in DEFAULT_TAXONOMY.sub_classes.items() if k != "tap"}
    with pytest.raises(ValueError, match="exactly the classes"):
        ClassTaxonomy(sub_classes=subs)


def test_wrong_sub_class_count_rejected():
    subs = dict(DEFAULT_TAXONOMY.sub_classes)
    subs["tap"] = ("tap", "tap_2")
    with pytest.raises(ValueError, match="21 sub-classes"):
        ClassTaxonomy(sub_classes=subs)


def test_six_class_study_consistent():
    assert len(SIX_CLASS_STUDY) == 6
    for _, class_name, sub in SIX_CLASS_STUDY:
        assert DEFAULT_TAXONOMY.class_of(sub) == class_name
