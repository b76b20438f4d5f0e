# config.py
# -----------------------------------------------------------------------------
# Lê .env e expõe:
# - Config: ajustes de processo (cache de bolas, orçamento de elementos, log)
# - ExperimentConfig: configuração de experimento (pydantic), carregada de um
#   arquivo JSON5 com seções; precedência defaults < arquivo < flags da CLI
# O digest da config ignora run.output_dir (mesmo experimento, outra pasta).
# -----------------------------------------------------------------------------

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import json5
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from lib.errors import ConfigError
from lib.reports import canonical_json, digest


# --------------------- carregamento do .env ---------------------
def load_env(env_path: Path = Path(__file__).resolve().parent / ".env") -> bool:
    """Carrega .env da raiz do projeto; variáveis já definidas no ambiente prevalecem."""
    if not env_path.exists():
        return False
    return load_dotenv(env_path, override=False)


load_env()


# --------------------- helpers ---------------------
def _get_bool(name: str, default: bool = False) -> bool:
    v = os.environ.get(name)
    if v is None:
        return default
    return str(v).strip().lower() in {"1", "true", "t", "yes", "y", "on"}


def _get_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    if v is None or str(v).strip() == "":
        return default
    try:
        return int(v)
    except ValueError:
        return default


def _get_path(name: str) -> Optional[Path]:
    v = (os.environ.get(name) or "").strip()
    return Path(v).expanduser() if v else None


# --------------------- Config (processo) ---------------------
class Config:
    # Cache em disco das bolas (None = sem cache em disco)
    CACHE_DIR: Optional[Path] = _get_path("RDLAB_CACHE_DIR")

    # Orçamento de elementos por tabela de bola
    MAX_ELEMENTS: int = _get_int("RDLAB_MAX_ELEMENTS", 10_000_000)

    # Logging / progresso
    LOG_LEVEL: str = (os.environ.get("RDLAB_LOG_LEVEL") or "INFO").strip().upper()
    PROGRESS: bool = _get_bool("RDLAB_PROGRESS", False)


# --------------------- ExperimentConfig ---------------------
class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GroupSection(_Section):
    name: str = "Heisenberg"
    params: Dict[str, Any] = Field(default_factory=dict)


class RadiiSection(_Section):
    ball: int = Field(8, ge=0, description="growth: raio da bola")
    section: int = Field(8, ge=0, description="raio Q da seção geodésica")
    multiplication: int = Field(3, ge=0, description="B_R x B_R nas coordenadas")
    decompose: int = Field(2, ge=0, description="suporte de f, g aleatórias")
    length: int = Field(8, ge=1, description="desigualdade de fator 3")
    cocycles: int = Field(6, ge=1)
    distortion: int = Field(12, ge=1)
    rd: int = Field(7, ge=1, description="n máximo do perfil RD")
    aut: int = Field(10, ge=1, description="K: |k| <= K no perfil do automorfismo")


class EstimatorSection(_Section):
    m: int = Field(8, ge=0, description="raio de truncamento")
    tol: float = Field(1e-9, gt=0)
    max_iter: int = Field(10_000, ge=1)
    function: Literal["ball", "sphere", "delta"] = "ball"
    function_radius: int = Field(1, ge=0)
    # None: adaptativo para grupos amenáveis de crescimento exponencial
    adaptive: Optional[bool] = None
    adaptive_floor: int = Field(1, ge=0, description="m_n = max(adaptive_floor, n) no modo adaptativo")


class ChecksSection(_Section):
    pairs: int = Field(100, ge=1)
    words: int = Field(200, ge=1)
    word_length: int = Field(10, ge=1)
    aut_pairs: int = Field(50, ge=1)
    axioms_radius: int = Field(2, ge=0)


class ThresholdsSection(_Section):
    classify_ratio: float = Field(0.5, gt=0, lt=1)
    fit_min_radius: int = Field(6, ge=1)


class RunSection(_Section):
    seed: int = 0
    output_dir: str = "rdlab-out"
    report_format: Literal["csv", "json"] = "csv"


class ExperimentConfig(_Section):
    """Configuração completa de um experimento (todas as seções com defaults)."""
    group: GroupSection = Field(default_factory=GroupSection)
    radii: RadiiSection = Field(default_factory=RadiiSection)
    estimator: EstimatorSection = Field(default_factory=EstimatorSection)
    checks: ChecksSection = Field(default_factory=ChecksSection)
    thresholds: ThresholdsSection = Field(default_factory=ThresholdsSection)
    run: RunSection = Field(default_factory=RunSection)

    def digest(self) -> str:
        data = self.model_dump(mode="json")
        data["run"].pop("output_dir", None)
        return digest(data)

    def to_text(self) -> str:
        """Config resolvida como JSON (válido também como JSON5)."""
        return canonical_json(self.model_dump(mode="json"), indent=True).decode() + "\n"

    def with_overrides(
        self,
        seed: Optional[int] = None,
        out: Optional[Path] = None,
        report_format: Optional[str] = None,
        radius: Optional[Dict[str, int]] = None,
        group: Optional[str] = None,
    ) -> "ExperimentConfig":
        data = self.model_dump(mode="json")
        if seed is not None:
            data["run"]["seed"] = seed
        if out is not None:
            data["run"]["output_dir"] = str(out)
        if report_format is not None:
            data["run"]["report_format"] = report_format
        if group is not None:
            data["group"] = {"name": group, "params": {}}
        for key, value in (radius or {}).items():
            data["radii" if key in RadiiSection.model_fields else "estimator"][key] = value
        return validate_config(data)


def _diagnostics(err: ValidationError) -> List[str]:
    out = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e.get("loc", ()))
        out.append(f"{loc or '<root>'}: {e.get('msg')}")
    return out


def validate_config(data: Any) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be an object with sections", [f"<root>: got {type(data).__name__}"])
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError("invalid experiment config", _diagnostics(e)) from e


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        data = json5.loads(text)
    except ValueError as e:
        # json5 já informa linha/coluna na mensagem
        raise ConfigError(f"cannot parse {source}", [str(e)]) from e
    return validate_config(data)


def load_experiment_config(path: Optional[Path]) -> ExperimentConfig:
    """Defaults quando ``path`` é None; senão o arquivo JSON5 validado."""
    if path is None:
        return ExperimentConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(encoding="utf-8"), source=p.as_posix())
