"""On-disk count tables: a header line, then one `m n value` line per entry"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from app.services.counting import CountTable, QAbstractionTable

logger = logging.getLogger(__name__)

CACHE_VERSION = 1
TOP_ROW = "inf"

Table = Union[CountTable, QAbstractionTable]


class CountCache:
    """
    Persists count tables keyed by (spec, family, parameters)

    Unreadable or mismatched files are ignored and rebuilt on the next save.
    """

    def __init__(self, cache_dir: Path):
        self.cache_dir = Path(cache_dir)

    @staticmethod
    def _params_text(table: Table) -> str:
        params = table.params
        return ",".join(f"{key}={value}" for key, value in sorted(params.items())) or "-"

    def header(self, table: Table) -> str:
        return (
            f"spec={table.spec.label} family={table.family.value} "
            f"params={self._params_text(table)} version={CACHE_VERSION}"
        )

    def path_for(self, table: Table) -> Path:
        spec = "-".join(str(w) for w in table.spec.weights)
        params = self._params_text(table).replace("=", "").replace(",", "_")
        return self.cache_dir / f"{table.family.value}_{spec}_{params}.txt"

    def save(self, table: Table) -> Path:
        """
        Write every entry of the table

        Args:
            table: A populated count table

        Returns:
            Path of the cache file
        """
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(table)
        lines = [self.header(table)]
        if isinstance(table, QAbstractionTable):
            for m, n, value, q in table.entries():
                lines.append(f"{m} {n} {value} {q}")
        else:
            for level, n, value in table.entries():
                lines.append(f"{TOP_ROW if level is None else level} {n} {value}")
        tmp = path.with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="ascii")
        tmp.replace(path)
        logger.info("saved %d entries to %s", len(lines) - 1, path)
        return path

    def load(self, table: Table) -> bool:
        """Fill the table from its cache file; False when there is nothing usable"""
        path = self.path_for(table)
        if not path.exists():
            return False
        try:
            text = path.read_text(encoding="ascii").splitlines()
            if not text or text[0].strip() != self.header(table):
                logger.warning("ignoring %s: header does not match %r", path, self.header(table))
                return False
            if isinstance(table, QAbstractionTable):
                table.load_entries(self._parse_q_rows(text[1:]))
            else:
                table.load_entries(self._parse_rows(text[1:]))
        except (OSError, ValueError) as exc:
            logger.warning("ignoring unreadable cache file %s: %s", path, exc)
            return False
        logger.info("loaded count table from %s", path)
        return True

    @staticmethod
    def _append(rows: Dict, key, n: int, value: int) -> None:
        row: List[int] = rows.setdefault(key, [])
        if n != len(row):
            raise ValueError(f"entry n={n} out of order for row {key}")
        row.append(value)

    def _parse_rows(self, lines: List[str]) -> Dict[Optional[int], List[int]]:
        rows: Dict[Optional[int], List[int]] = {}
        for line in lines:
            if not line.strip():
                continue
            level, n, value = line.split()
            self._append(rows, None if level == TOP_ROW else int(level), int(n), int(value))
        return rows

    def _parse_q_rows(self, lines: List[str]) -> Dict[Tuple[int, int], List[int]]:
        rows: Dict[Tuple[int, int], List[int]] = {}
        for line in lines:
            if not line.strip():
                continue
            m, n, value, q = line.split()
            self._append(rows, (int(m), int(q)), int(n), int(value))
        return rows
