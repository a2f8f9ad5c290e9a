"""Device catalog: load phone specs from JSON and negotiate shared capture settings.

A catalog document is a JSON array of device objects.  All lengths are in
millimetres, the camera center is measured from the top-left corner of the
back face in portrait orientation, and capability fields are unordered sets.
Unknown keys inside an optional ``metadata`` object are accepted and ignored
so vendors can annotate entries without breaking older readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class RegistryError(ValueError):
    """Raised for malformed catalog documents or invariant violations."""


@dataclass(frozen=True)
class DeviceSpec:
    model_id: str
    body_width: float
    body_length: float
    body_thickness: float
    camera_center: tuple[float, float]
    screen_width_px: int
    screen_height_px: int
    pixel_density: float
    resolutions: frozenset[tuple[int, int]]
    frame_rates: frozenset[float]
    focus_modes: frozenset[str]
    capture_modes: frozenset[str]

    def validate(self) -> None:
        if not self.model_id:
            raise RegistryError("model_id must be a non-empty string")
        for name in ("body_width", "body_length", "body_thickness", "pixel_density"):
            if not getattr(self, name) > 0:
                raise RegistryError(f"{self.model_id}: {name} must be positive")
        if self.screen_width_px <= 0 or self.screen_height_px <= 0:
            raise RegistryError(f"{self.model_id}: screen dimensions must be positive")
        cx, cy = self.camera_center
        if not (0 <= cx <= self.body_width and 0 <= cy <= self.body_length):
            raise RegistryError(
                f"{self.model_id}: camera_center ({cx}, {cy}) lies outside the "
                f"{self.body_width} x {self.body_length} body"
            )
        for name in ("resolutions", "frame_rates"):
            if not getattr(self, name):
                raise RegistryError(f"{self.model_id}: {name} must be non-empty")
        for w, h in self.resolutions:
            if w <= 0 or h <= 0:
                raise RegistryError(f"{self.model_id}: resolution {w}x{h} is not positive")
        for fps in self.frame_rates:
            if fps <= 0:
                raise RegistryError(f"{self.model_id}: frame rate {fps} is not positive")


@dataclass(frozen=True)
class CapabilityProfile:
    """Settings both devices of a rig can run simultaneously."""

    resolution: tuple[int, int]
    frame_rate: float
    focus_modes: frozenset[str] = field(default_factory=frozenset)
    capture_modes: frozenset[str] = field(default_factory=frozenset)


_REQUIRED_FIELDS = (
    "model_id",
    "body_width",
    "body_length",
    "body_thickness",
    "camera_center",
    "screen_width_px",
    "screen_height_px",
    "pixel_density",
    "resolutions",
    "frame_rates",
    "focus_modes",
    "capture_modes",
)


def _spec_from_dict(entry: dict) -> DeviceSpec:
    if not isinstance(entry, dict):
        raise RegistryError(f"device entry must be an object, got {type(entry).__name__}")
    missing = [name for name in _REQUIRED_FIELDS if name not in entry]
    if missing:
        raise RegistryError(f"device entry missing required fields: {', '.join(missing)}")
    try:
        cam = entry["camera_center"]
        spec = DeviceSpec(
            model_id=str(entry["model_id"]),
            body_width=float(entry["body_width"]),
            body_length=float(entry["body_length"]),
            body_thickness=float(entry["body_thickness"]),
            camera_center=(float(cam[0]), float(cam[1])),
            screen_width_px=int(entry["screen_width_px"]),
            screen_height_px=int(entry["screen_height_px"]),
            pixel_density=float(entry["pixel_density"]),
            resolutions=frozenset((int(w), int(h)) for w, h in entry["resolutions"]),
            frame_rates=frozenset(float(f) for f in entry["frame_rates"]),
            focus_modes=frozenset(str(m) for m in entry["focus_modes"]),
            capture_modes=frozenset(str(m) for m in entry["capture_modes"]),
        )
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise RegistryError(f"malformed device entry: {exc}") from exc
    spec.validate()
    return spec


def parse_device_specs(text: str) -> list[DeviceSpec]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"malformed catalog document: {exc}") from exc
    if not isinstance(doc, list):
        raise RegistryError("catalog document must be a JSON array of device objects")
    specs = [_spec_from_dict(entry) for entry in doc]
    seen: set[str] = set()
    for spec in specs:
        if spec.model_id in seen:
            raise RegistryError(f"duplicate model_id: {spec.model_id}")
        seen.add(spec.model_id)
    return specs


def load_registry(path: str) -> list[DeviceSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_device_specs(fh.read())


def _spec_to_dict(spec: DeviceSpec) -> dict:
    return {
        "model_id": spec.model_id,
        "body_width": spec.body_width,
        "body_length": spec.body_length,
        "body_thickness": spec.body_thickness,
        "camera_center": list(spec.camera_center),
        "screen_width_px": spec.screen_width_px,
        "screen_height_px": spec.screen_height_px,
        "pixel_density": spec.pixel_density,
        "resolutions": sorted([w, h] for w, h in spec.resolutions),
        "frame_rates": sorted(spec.frame_rates),
        "focus_modes": sorted(spec.focus_modes),
        "capture_modes": sorted(spec.capture_modes),
    }


def serialize_device_specs(specs: Iterable[DeviceSpec]) -> str:
    return json.dumps([_spec_to_dict(s) for s in specs], indent=2, sort_keys=True) + "\n"


def lookup(specs: Sequence[DeviceSpec], model_id: str) -> DeviceSpec:
    for spec in specs:
        if spec.model_id == model_id:
            return spec
    known = ", ".join(sorted(s.model_id for s in specs)) or "(none)"
    raise RegistryError(f"unknown model_id {model_id!r}; catalog has: {known}")


def _resolution_rank(res: tuple[int, int]) -> tuple[int, int]:
    w, h = res
    return (w * h, w)


def negotiate(a: DeviceSpec, b: DeviceSpec) -> CapabilityProfile:
    """Pick the best capture settings both devices support.

    Frame rate is the highest rate common to both; when the sets are
    disjoint, the lower of the two per-device maxima is used.  Resolution is
    ranked by pixel count (width breaks ties) under the same rule.  Mode
    sets simply intersect and may come out empty.
    """
    common_fps = a.frame_rates & b.frame_rates
    if common_fps:
        fps = max(common_fps)
    else:
        fps = min(max(a.frame_rates), max(b.frame_rates))

    common_res = a.resolutions & b.resolutions
    if common_res:
        res = max(common_res, key=_resolution_rank)
    else:
        res = min(
            max(a.resolutions, key=_resolution_rank),
            max(b.resolutions, key=_resolution_rank),
            key=_resolution_rank,
        )

    return CapabilityProfile(
        resolution=res,
        frame_rate=fps,
        focus_modes=a.focus_modes & b.focus_modes,
        capture_modes=a.capture_modes & b.capture_modes,
    )
