# lib/reports.py
# -----------------------------------------------------------------------------
# Registros de verificação e escrita de relatórios (CSV / JSON).
# - JSON canônico via orjson (chaves ordenadas) -> digests estáveis
# - CSV com linha de cabeçalho "# rdlab ..." levando versão e digest da config
# - Nada de timestamps aqui: relatórios idênticos para config idêntica
# -----------------------------------------------------------------------------

from __future__ import annotations

import csv
import hashlib
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import orjson
from pydantic import BaseModel, Field

from lib.errors import CheckFailedError

FORMAT_VERSION = 1

_JSON_OPTS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def _default(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def canonical_json(obj: Any, indent: bool = False) -> bytes:
    opts = _JSON_OPTS | (orjson.OPT_INDENT_2 if indent else 0)
    return orjson.dumps(obj, default=_default, option=opts)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj)).hexdigest()


def form_text(form: Sequence[int]) -> str:
    """Canonical form as comma-joined decimals (arbitrary precision safe)."""
    return ",".join(str(int(v)) for v in form)


def parse_form(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


class CheckReport(BaseModel):
    """
    Resultado de uma verificação exata.
    ``witness`` carries the first counterexample in printable form.
    """
    name: str = Field(..., description="Check identifier (ex.: 'mult_in_coords')")
    ok: bool = True
    checked: int = Field(0, ge=0)
    mismatches: int = Field(0, ge=0)
    witness: Optional[Any] = None
    details: Dict[str, Any] = Field(default_factory=dict)

    def record(self, good: bool, witness: Any = None) -> bool:
        self.checked += 1
        if not good:
            self.mismatches += 1
            self.ok = False
            if self.witness is None:
                self.witness = witness
        return good

    def raise_for_status(self) -> "CheckReport":
        if not self.ok:
            raise CheckFailedError(
                f"{self.name}: {self.mismatches} mismatch(es), witness={self.witness!r}",
                report=self,
            )
        return self

    def summary_line(self) -> str:
        return f"{self.name}: checked {self.checked}, mismatches: {self.mismatches}"


def _meta_line(config_digest: Optional[str]) -> str:
    return f"# rdlab format_version={FORMAT_VERSION} config_digest={config_digest or '-'}"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config_digest: Optional[str] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(_meta_line(config_digest) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path: Path, payload: Dict[str, Any], config_digest: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"format_version": FORMAT_VERSION, "config_digest": config_digest, **payload}
    path.write_bytes(canonical_json(body, indent=True) + b"\n")
    return path


def read_csv_rows(path: Path) -> List[List[str]]:
    """Rows of a report CSV without the metadata line (header included)."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [row for row in csv.reader(lines)]
