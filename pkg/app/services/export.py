import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO

import pandas as pd

from app.config import settings
from app.exceptions import DomainError

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "text", "xlsx")


def meta_record(command: str, spec_label: str, options: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "meta": {
            "tool": settings.app_name,
            "version": settings.app_version,
            "command": command,
            "spec": spec_label,
            "options": {key: value for key, value in sorted(options.items()) if value is not None},
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
    }


def _default(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


class RecordWriter:
    """
    Writes records as JSON lines, CSV, plain text or an Excel sheet

    JSON and text are written record by record so long streams can be cut off by the
    consumer; CSV goes out in chunks through pandas; XLSX is assembled at close.
    """

    def __init__(
        self,
        output_format: str = "json",
        stream: Optional[TextIO] = None,
        output_path: Optional[Path] = None,
        chunk_size: int = 1000,
        sheet_name: str = "records",
    ):
        if output_format not in FORMATS:
            raise DomainError(f"unknown output format '{output_format}', expected one of {', '.join(FORMATS)}")
        if output_format == "xlsx" and output_path is None:
            raise DomainError("xlsx output requires an output path")
        self.output_format = output_format
        self.output_path = output_path
        self.chunk_size = chunk_size
        self.sheet_name = sheet_name
        self._owns_stream = output_path is not None and output_format != "xlsx"
        if self._owns_stream:
            self.stream: Optional[TextIO] = open(output_path, "w", encoding="utf-8", newline="")  # type: ignore[arg-type]
        else:
            self.stream = stream if stream is not None else sys.stdout
        self._pending: List[Dict[str, Any]] = []
        self._header_written = False
        self.count = 0

    def __enter__(self) -> "RecordWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.close()
        elif self._owns_stream and self.stream is not None:
            self.stream.close()

    def write_meta(self, record: Dict[str, Any]) -> None:
        if self.output_format == "json":
            self.stream.write(json.dumps(record, default=_default) + "\n")  # type: ignore[union-attr]

    def write(self, record: Dict[str, Any], text: Optional[str] = None) -> None:
        """Emit one record; text, when given, is what the plain-text format prints"""
        self.count += 1
        if self.output_format == "json":
            self.stream.write(json.dumps(record, ensure_ascii=False, default=_default) + "\n")  # type: ignore[union-attr]
        elif self.output_format == "text":
            if text is None:
                text = " ".join(f"{key}={value}" for key, value in record.items())
            self.stream.write(f"{text}\n")  # type: ignore[union-attr]
        else:
            self._pending.append(record)
            if self.output_format == "csv" and len(self._pending) >= self.chunk_size:
                self._flush_csv()

    def write_many(self, records: Iterable[Dict[str, Any]]) -> None:
        for record in records:
            self.write(record)

    def write_frame(self, frame: pd.DataFrame) -> None:
        self.write_many(frame.to_dict(orient="records"))

    def _flush_csv(self) -> None:
        if not self._pending:
            return
        frame = pd.DataFrame(self._pending)
        frame.to_csv(self.stream, header=not self._header_written, index=False, lineterminator="\n")
        self._header_written = True
        self._pending = []

    def close(self) -> None:
        if self.output_format == "csv":
            self._flush_csv()
        elif self.output_format == "xlsx":
            frame = pd.DataFrame(self._pending)
            frame.to_excel(self.output_path, sheet_name=self.sheet_name, index=False, engine="openpyxl")
            logger.info("wrote %d rows to %s", len(frame), self.output_path)
            self._pending = []
        if self.stream is not None:
            self.stream.flush()
            if self._owns_stream:
                self.stream.close()
