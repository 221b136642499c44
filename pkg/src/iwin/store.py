"""Study store: parsed images + masks + cached auto windows, optionally on disk.

Persistence is a flat directory of ``{id}/`` folders holding the original
upload bytes, the current mask as PGM, and a small meta.json: inspectable
and diff-able. Everything derivable (real image, auto windows) is recomputed
deterministically on reload, so a restarted service serves byte-identical
renders.

Locking: the store dict has its own lock; each study carries a lock that
serializes mask replacement and cache updates against renders of that study.
Renders snapshot the immutable image/mask references under the study lock and
do the pixel work outside it.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import RealImage, StoredImage, rescale_to_real
from .dicom import extract_image, parse_dicom
from .errors import EmptySelection, IwinError
from .pgm import parse_pgm, read_pgm, write_pgm
from .suppress import (
    BinaryMask,
    SuppressionParams,
    load_external_mask,
    mask_to_pgm_samples,
    suppress_background,
)
from .window import AutoWindowStrategy, WindowSettings, auto_window

PROVENANCE_BUILTIN = "builtin-pipeline"
PROVENANCE_EXTERNAL = "external"


@dataclass
class StudyRecord:
    id: str
    source_kind: str  # "dicom" | "pgm"
    stored: StoredImage
    image: RealImage
    photometric: str
    mask: Optional[BinaryMask] = None
    mask_provenance: Optional[str] = None
    embedded_window: Optional[WindowSettings] = None
    warnings: list[str] = field(default_factory=list)
    cached_auto: dict = field(default_factory=dict)  # (strategy key, suppress) -> (settings, warnings)
    mask_version: int = 0  # bumped by put_mask; guards against caching stale windows
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def summary(self) -> dict:
        return {
            "id": self.id,
            "source_kind": self.source_kind,
            "width": self.image.width,
            "height": self.image.height,
            "value_min": self.image.value_min,
            "value_max": self.image.value_max,
            "photometric": self.photometric,
            "embedded_window": (
                {"ww": self.embedded_window.width, "wl": self.embedded_window.level}
                if self.embedded_window
                else None
            ),
            "has_mask": self.mask is not None,
            "mask_provenance": self.mask_provenance,
            "warnings": list(self.warnings),
        }


def ingest_bytes(data: bytes, declared_format: Optional[str] = None):
    """Parse upload bytes as DICOM or PGM.

    Returns (source_kind, stored, real_image, photometric, embedded_window,
    warnings). When no format is declared, PGM is recognized by its magic and
    everything else goes down the DICOM path.
    """
    fmt = declared_format
    if fmt is None:
        fmt = "pgm" if data[:2] == b"P5" else "dicom"
    if fmt == "pgm":
        stored = read_pgm(data)
        image = rescale_to_real(stored)
        return "pgm", stored, image, stored.photometric, None, []
    if fmt == "dicom":
        rec = parse_dicom(data)
        extracted = extract_image(rec)
        image = rescale_to_real(extracted.image, extracted.rescale)
        return (
            "dicom",
            extracted.image,
            image,
            extracted.image.photometric,
            extracted.window,
            list(extracted.warnings),
        )
    raise ValueError(f"unknown declared format {fmt!r}")


class StudyStore:
    """In-memory study registry with optional directory persistence."""

    def __init__(self, store_dir: Optional[Path] = None,
                 suppression: SuppressionParams = SuppressionParams()):
        self._studies: dict[str, StudyRecord] = {}
        self._lock = threading.Lock()
        self._dir = Path(store_dir) if store_dir else None
        self._suppression = suppression
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self) -> None:
        for entry in sorted(self._dir.iterdir()):
            meta_path = entry / "meta.json"
            if not meta_path.is_file():
                continue
            meta = json.loads(meta_path.read_text())
            data = (entry / "original.bin").read_bytes()
            record = self._build_record(data, meta["source_kind"], study_id=meta["id"])
            mask_path = entry / "mask.pgm"
            if mask_path.is_file():
                pgm = parse_pgm(mask_path.read_bytes())
                record.mask = load_external_mask(record.image.values.shape, pgm)
                record.mask_provenance = meta.get("mask_provenance")
            record.warnings = list(meta.get("warnings", []))
            self._studies[record.id] = record

    def _build_record(self, data: bytes, declared_format: Optional[str],
                      study_id: Optional[str] = None) -> StudyRecord:
        kind, stored, image, photometric, window, warnings = ingest_bytes(data, declared_format)
        return StudyRecord(
            id=study_id or self._new_id(),
            source_kind=kind,
            stored=stored,
            image=image,
            photometric=photometric,
            embedded_window=window,
            warnings=warnings,
        )

    def _new_id(self) -> str:
        while True:
            study_id = secrets.token_urlsafe(6)
            if study_id not in self._studies:
                return study_id

    def _persist(self, record: StudyRecord, data: bytes) -> None:
        if self._dir is None:
            return
        folder = self._dir / record.id
        folder.mkdir(parents=True, exist_ok=True)
        (folder / "original.bin").write_bytes(data)
        self._persist_meta(record)
        if record.mask is not None:
            (folder / "mask.pgm").write_bytes(write_pgm(mask_to_pgm_samples(record.mask)))

    def _persist_meta(self, record: StudyRecord) -> None:
        if self._dir is None:
            return
        meta = {
            "id": record.id,
            "source_kind": record.source_kind,
            "mask_provenance": record.mask_provenance,
            "warnings": record.warnings,
        }
        (self._dir / record.id / "meta.json").write_text(json.dumps(meta, indent=1))

    def upload(self, data: bytes, declared_format: Optional[str] = None) -> StudyRecord:
        """Ingest bytes, eagerly compute the builtin mask, persist, register."""
        record = self._build_record(data, declared_format)
        try:
            record.mask = suppress_background(record.image, self._suppression)
            record.mask_provenance = PROVENANCE_BUILTIN
        except IwinError as e:
            record.warnings.append(f"builtin suppression failed: {type(e).__name__}")
        with self._lock:
            self._studies[record.id] = record
        self._persist(record, data)
        return record

    def get(self, study_id: str) -> Optional[StudyRecord]:
        with self._lock:
            return self._studies.get(study_id)

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._studies)

    def put_mask(self, record: StudyRecord, pgm_bytes: bytes) -> None:
        """Replace the mask from PGM bytes; invalidates cached auto windows."""
        pgm = parse_pgm(pgm_bytes)
        mask = load_external_mask(record.image.values.shape, pgm)
        with record.lock:
            record.mask = mask
            record.mask_provenance = PROVENANCE_EXTERNAL
            record.mask_version += 1
            record.cached_auto.clear()
        if self._dir is not None:
            (self._dir / record.id / "mask.pgm").write_bytes(
                write_pgm(mask_to_pgm_samples(mask))
            )
            self._persist_meta(record)

    def auto_window_for(
        self, record: StudyRecord, suppress: bool, strategy: AutoWindowStrategy
    ) -> tuple[WindowSettings, list[str]]:
        """Cached auto window for (strategy, suppress).

        A suppressed request without a usable mask falls back to the
        full-image window and reports a warning instead of failing.
        """
        key = (strategy.key(), suppress)
        with record.lock:
            if key in record.cached_auto:
                return record.cached_auto[key]
            mask = record.mask
            version = record.mask_version
        warnings: list[str] = []
        if suppress:
            if mask is None:
                settings = auto_window(record.image, None, strategy)
                warnings.append("no mask available; used full-image window")
            else:
                try:
                    settings = auto_window(record.image, mask, strategy)
                except EmptySelection:
                    settings = auto_window(record.image, None, strategy)
                    warnings.append("EmptySelection: mask is empty; used full-image window")
        else:
            settings = auto_window(record.image, None, strategy)
        with record.lock:
            if record.mask_version == version:  # do not cache across a mask swap
                record.cached_auto[key] = (settings, warnings)
        return settings, warnings
