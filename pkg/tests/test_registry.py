from __future__ import annotations

import dataclasses
import itertools
import json
import random

import pytest

from stereorig.registry import (
    CapabilityProfile,
    DeviceSpec,
    RegistryError,
    lookup,
    negotiate,
    parse_device_specs,
    serialize_device_specs,
)

from oracles import negotiate_oracle, random_spec, validate_spec_dict


def _one_device(**overrides) -> str:
    entry = {
        "model_id": "unit-fixture",
        "body_width": 78.0,
        "body_length": 152.0,
        "body_thickness": 8.0,
        "camera_center": [39.0, 10.0],
        "screen_width_px": 720,
        "screen_height_px": 1480,
        "pixel_density": 10.0,
        "resolutions": [[1280, 720]],
        "frame_rates": [30],
        "focus_modes": ["auto"],
        "capture_modes": ["video"],
    }
    entry.update(overrides)
    return json.dumps([entry])


class TestParse:
    def test_single_device_round(self):
        specs = parse_device_specs(_one_device())
        assert len(specs) == 1
        s = specs[0]
        assert (s.body_width, s.body_length, s.body_thickness) == (78.0, 152.0, 8.0)
        assert s.camera_center == (39.0, 10.0)
        # cross-check against the raw-dict validator
        assert validate_spec_dict(json.loads(_one_device())[0]) == []

    def test_empty_list(self):
        assert parse_device_specs("[]") == []

    def test_camera_outside_body_errors(self):
        with pytest.raises(RegistryError, match="outside"):
            parse_device_specs(_one_device(camera_center=[90.0, 10.0]))

    def test_camera_below_body_errors(self):
        with pytest.raises(RegistryError, match="outside"):
            parse_device_specs(_one_device(camera_center=[39.0, 160.0]))

    def test_negative_width_errors(self):
        with pytest.raises(RegistryError, match="positive"):
            parse_device_specs(_one_device(body_width=-1.0))

    def test_empty_frame_rates_errors(self):
        with pytest.raises(RegistryError, match="non-empty"):
            parse_device_specs(_one_device(frame_rates=[]))

    def test_empty_resolutions_errors(self):
        with pytest.raises(RegistryError, match="non-empty"):
            parse_device_specs(_one_device(resolutions=[]))

    def test_missing_field_errors(self):
        entry = json.loads(_one_device())[0]
        del entry["pixel_density"]
        with pytest.raises(RegistryError, match="pixel_density"):
            parse_device_specs(json.dumps([entry]))

    def test_duplicate_model_id_errors(self):
        entry = json.loads(_one_device())[0]
        with pytest.raises(RegistryError, match="duplicate"):
            parse_device_specs(json.dumps([entry, entry]))

    def test_malformed_json_errors(self):
        with pytest.raises(RegistryError, match="malformed"):
            parse_device_specs("{not json")

    def test_non_array_document_errors(self):
        with pytest.raises(RegistryError, match="array"):
            parse_device_specs('{"model_id": "x"}')

    def test_metadata_key_ignored(self):
        specs = parse_device_specs(_one_device(metadata={"notes": "anything"}))
        assert specs[0].model_id == "unit-fixture"

    def test_packaged_catalog_passes_independent_validator(self, registry):
        for spec in registry:
            raw = json.loads(serialize_device_specs([spec]))[0]
            assert validate_spec_dict(raw) == []

    def test_round_trip_identity(self, registry):
        text = serialize_device_specs(registry)
        again = parse_device_specs(text)
        assert again == registry
        assert serialize_device_specs(again) == text


class TestLookup:
    def test_known_id(self, registry):
        assert lookup(registry, "J7-fixture").body_width == 78.0

    def test_unknown_id_lists_catalog(self, registry):
        with pytest.raises(RegistryError, match="J7-fixture"):
            lookup(registry, "no-such-device")

    def test_order_independent(self, registry):
        for perm in itertools.permutations(registry):
            assert lookup(list(perm), "A5-fixture").model_id == "A5-fixture"


class TestNegotiate:
    def test_j7_a5_common_values(self, j7, a5):
        prof = negotiate(j7, a5)
        assert prof.frame_rate == 30.0
        assert prof.resolution == (1920, 1080)
        assert prof.focus_modes == frozenset({"auto"})
        assert prof.capture_modes == frozenset({"video"})

    def test_disjoint_sets_take_lower_of_maxima(self, j7):
        a = dataclasses.replace(
            j7, frame_rates=frozenset({30.0}), resolutions=frozenset({(1920, 1080)})
        )
        b = dataclasses.replace(
            j7, frame_rates=frozenset({60.0}), resolutions=frozenset({(3840, 2160)})
        )
        prof = negotiate(a, b)
        assert prof.frame_rate == 30.0
        assert prof.resolution == (1920, 1080)

    def test_common_maximum_wins(self, j7):
        a = dataclasses.replace(j7, frame_rates=frozenset({24.0, 30.0}))
        b = dataclasses.replace(j7, frame_rates=frozenset({30.0, 60.0}))
        assert negotiate(a, b).frame_rate == 30.0

    def test_self_negotiation_is_own_maxima(self, a5):
        prof = negotiate(a5, a5)
        assert prof.frame_rate == max(a5.frame_rates)
        assert prof.resolution == (3840, 2160)
        assert prof.focus_modes == a5.focus_modes
        assert prof.capture_modes == a5.capture_modes

    def test_mode_intersections_may_be_empty(self, j7):
        a = dataclasses.replace(j7, focus_modes=frozenset({"macro"}))
        b = dataclasses.replace(j7, focus_modes=frozenset({"infinity"}))
        prof = negotiate(a, b)
        assert prof.focus_modes == frozenset()

    def test_resolution_tie_broken_by_width(self, j7):
        wide = (2560, 810)   # same pixel count as (1920, 1080)
        tall = (1920, 1080)
        a = dataclasses.replace(j7, resolutions=frozenset({wide, tall}))
        prof = negotiate(a, a)
        assert prof.resolution == wide

    def test_random_pairs_match_brute_force(self, j7):
        rng = random.Random(2024)
        for i in range(300):
            a = random_spec(rng, f"ra-{i}")
            b = random_spec(rng, f"rb-{i}")
            prof = negotiate(a, b)
            fps, res = negotiate_oracle(a, b)
            assert prof.frame_rate == fps
            assert prof.resolution == res
            assert prof.focus_modes == a.focus_modes & b.focus_modes
            assert prof.capture_modes == a.capture_modes & b.capture_modes
            # commutativity + the membership invariant
            assert negotiate(b, a) == prof
            if prof.frame_rate in a.frame_rates and prof.frame_rate in b.frame_rates:
                pass
            else:
                assert not (a.frame_rates & b.frame_rates)

    def test_profile_is_a_plain_value(self):
        p = CapabilityProfile(resolution=(1, 1), frame_rate=1.0)
        assert p == CapabilityProfile(resolution=(1, 1), frame_rate=1.0)


def test_spec_is_immutable(j7):
    with pytest.raises(dataclasses.FrozenInstanceError):
        j7.body_width = 1.0


def test_random_specs_validate(j7):
    rng = random.Random(7)
    for i in range(100):
        spec = random_spec(rng, f"gen-{i}")
        spec.validate()
        assert isinstance(spec, DeviceSpec)
