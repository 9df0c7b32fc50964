import pytest

from reflectgen.config import (FRAME_DIMENSIONS, ConfigError, DrConfig,
                               MltDrConfig, ModelEntry, PreStudyConfig,
                               Protocol, ProtocolConfig, config_from_dict,
                               config_to_dict, default_config, load_config,
                               save_config, six_class_models,
                               sub_class_models)


def test_default_config_every_protocol():
    for protocol in Protocol:
        config = default_config(protocol)
        assert config.protocol is protocol
        assert config.n_classes >= 1


def test_six_class_models():
    models = six_class_models()
    assert [m.name for m in models] == [
        "toilet", "bidet", "urinal", "double_sink", "small_sink", "large_sink"]
    assert all(m.size > 0 for m in models)


def test_sc_uses_all_sub_classes():
    config = default_config(Protocol.SC)
    assert config.n_classes == 21
    assert {m.sub_class_name for m in config.classes} == \
        {m.sub_class_name for m in sub_class_models()}


def test_round_trip_via_dict():
    config = default_config(Protocol.MLTDR)
    again = config_from_dict(config_to_dict(config))
    assert again == config


def test_round_trip_via_file(tmp_path):
    config = default_config(Protocol.DR)
    path = tmp_path / "config.json"
    save_config(config, path)
    assert load_config(path) == config


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(path)


def test_missing_protocol_rejected():
    with pytest.raises(ConfigError, match="protocol"):
        config_from_dict({})


def test_unknown_protocol_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"protocol": "KITCHEN"})


def test_default_dimensions():
    assert default_config(Protocol.DR).dimensions == FRAME_DIMENSIONS


def test_model_entry_size_positive():
    with pytest.raises(ConfigError, match="size"):
        ModelEntry("toilet", "asset:toilet_rounded_1", "toilet",
                   "toilet_rounded_1", size=0.0)


def test_duplicate_class_names_rejected():
    entry = six_class_models()[0]
    with pytest.raises(ConfigError, match="duplicate"):
        ProtocolConfig(protocol=Protocol.RA, classes=(entry, entry))


def test_empty_classes_rejected():
    with pytest.raises(ConfigError, match="at least one"):
        ProtocolConfig(protocol=Protocol.RA, classes=())


def test_prestudy_validation():
    with pytest.raises(ConfigError, match="radii"):
        PreStudyConfig(radii=())
    with pytest.raises(ConfigError, match="reflection mode"):
        PreStudyConfig(reflection_mode="SOMETIMES")
    with pytest.raises(ConfigError, match="background mode"):
        PreStudyConfig(background_mode="PLAID")


def test_dr_validation():
    with pytest.raises(ConfigError, match="occluder types"):
        DrConfig(occluder_types=("box",))
    with pytest.raises(ConfigError, match="occluder count"):
        DrConfig(occluder_count=(0, 5))


def test_mltdr_validation():
    with pytest.raises(ConfigError, match="light count"):
        MltDrConfig(light_count=(0, 5))
    with pytest.raises(ConfigError, match="reflectivity_range"):
        MltDrConfig(reflectivity_range=(0.5, 0.2))


def test_dimension_set_non_empty():
    with pytest.raises(ConfigError, match="dimension"):
        default_config(Protocol.DR, dimensions=())


def test_section_overrides_from_dict():
    data = {"protocol": "MLTDR", "mltdr": {"light_count": [2, 4]}}
    config = config_from_dict(data)
    assert config.mltdr.light_count == (2, 4)
    assert config.mltdr.roughness == 0.2


def test_default_palette_accessor():
    assert len(default_config(Protocol.RA).palette()) == 75
