# db.py
# -----------------------------------------------------------------------------
# Cache em disco das tabelas de bolas (SQLite via SQLAlchemy 2.0).
# - Um registro de cabeçalho por (digest da marcação, raio, versão do formato)
# - Registros por esfera com as formas canônicas em texto (inteiros grandes ok)
# - Arrays (pai, gerador do pai, tabela de passos) como blobs int64
# - Registro corrompido ou ausente -> o chamador reconstrói em silêncio
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from sqlalchemy import (
    CheckConstraint,
    ForeignKey,
    Integer,
    LargeBinary,
    String,
    Text,
    UniqueConstraint,
    create_engine,
    select,
)
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, Mapped, Session, mapped_column, relationship

logger = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1
CACHE_FILENAME = "balls.sqlite"


class Base(DeclarativeBase):
    pass


# -----------------------------------------------------------------------------
# MODELOS
# -----------------------------------------------------------------------------

class BallRecord(Base):
    """
    Cabeçalho de uma tabela de bola cacheada.
    Unicidade por (marking_digest, radius, format_version).
    """
    __tablename__ = "balls"
    __table_args__ = (
        UniqueConstraint("marking_digest", "radius", "format_version", name="uq_ball_key"),
        CheckConstraint("radius >= 0", name="ck_ball_radius_nonneg"),
        CheckConstraint("element_count >= 1", name="ck_ball_nonempty"),
    )

    id: Mapped[int] = mapped_column(primary_key=True)
    marking_digest: Mapped[str] = mapped_column(String(64), nullable=False, index=True)
    radius: Mapped[int] = mapped_column(Integer, nullable=False)
    format_version: Mapped[int] = mapped_column(Integer, nullable=False, default=CACHE_FORMAT_VERSION)
    descriptor_text: Mapped[str] = mapped_column(Text, nullable=False)
    generator_count: Mapped[int] = mapped_column(Integer, nullable=False)
    element_count: Mapped[int] = mapped_column(Integer, nullable=False)
    parents: Mapped[bytes] = mapped_column(LargeBinary, nullable=False)
    parent_generators: Mapped[bytes] = mapped_column(LargeBinary, nullable=False)
    steps: Mapped[bytes] = mapped_column(LargeBinary, nullable=False)

    created_at: Mapped[datetime] = mapped_column(default=datetime.utcnow, nullable=False)

    spheres: Mapped[List["SphereRecord"]] = relationship(
        "SphereRecord",
        back_populates="ball",
        lazy="selectin",
        cascade="all, delete-orphan",
        order_by="SphereRecord.n",
    )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "marking_digest": self.marking_digest,
            "radius": self.radius,
            "format_version": self.format_version,
            "generator_count": self.generator_count,
            "element_count": self.element_count,
            "sphere_sizes": [s.size for s in self.spheres],
        }

    def __repr__(self) -> str:
        return f"<BallRecord digest={self.marking_digest[:12]} R={self.radius} N={self.element_count}>"


class SphereRecord(Base):
    """Formas canônicas da esfera n, uma por linha, na ordem BFS."""
    __tablename__ = "spheres"
    __table_args__ = (
        UniqueConstraint("ball_id", "n", name="uq_sphere_ball_n"),
        CheckConstraint("size >= 0", name="ck_sphere_size_nonneg"),
    )

    id: Mapped[int] = mapped_column(primary_key=True)
    ball_id: Mapped[int] = mapped_column(
        ForeignKey("balls.id", ondelete="CASCADE"), nullable=False, index=True
    )
    n: Mapped[int] = mapped_column(Integer, nullable=False)
    size: Mapped[int] = mapped_column(Integer, nullable=False)
    forms: Mapped[str] = mapped_column(Text, nullable=False, default="")

    ball: Mapped[BallRecord] = relationship("BallRecord", back_populates="spheres")

    def __repr__(self) -> str:
        return f"<SphereRecord n={self.n} size={self.size}>"


# -----------------------------------------------------------------------------
# ENGINE / SESSÃO
# -----------------------------------------------------------------------------

_ENGINES: Dict[str, Engine] = {}


def get_engine(cache_dir: Path) -> Engine:
    """Engine SQLite em ``cache_dir/balls.sqlite`` (criado sob demanda)."""
    path = Path(cache_dir).expanduser().resolve()
    key = path.as_posix()
    engine = _ENGINES.get(key)
    if engine is None:
        path.mkdir(parents=True, exist_ok=True)
        engine = create_engine(f"sqlite:///{(path / CACHE_FILENAME).as_posix()}", future=True)
        Base.metadata.create_all(engine)
        _ENGINES[key] = engine
    return engine


def load_ball_record(cache_dir: Path, marking_digest: str, radius: int) -> Optional[Dict[str, Any]]:
    """
    Payload cru do cache, ou None (ausente / banco ilegível).
    Validation of the payload itself is the caller's job.
    """
    try:
        with Session(get_engine(cache_dir)) as session:
            rec = session.execute(
                select(BallRecord).where(
                    BallRecord.marking_digest == marking_digest,
                    BallRecord.radius == radius,
                    BallRecord.format_version == CACHE_FORMAT_VERSION,
                )
            ).scalar_one_or_none()
            if rec is None:
                return None
            return {
                "descriptor_text": rec.descriptor_text,
                "generator_count": rec.generator_count,
                "element_count": rec.element_count,
                "parents": rec.parents,
                "parent_generators": rec.parent_generators,
                "steps": rec.steps,
                "spheres": [(s.n, s.size, s.forms) for s in rec.spheres],
            }
    except Exception as e:  # arquivo corrompido, schema antigo etc.
        logger.warning("ball cache unreadable (%s): %s", cache_dir, e)
        return None


def store_ball_record(
    cache_dir: Path,
    marking_digest: str,
    radius: int,
    descriptor_text: str,
    generator_count: int,
    parents: bytes,
    parent_generators: bytes,
    steps: bytes,
    spheres: List[List[str]],
) -> bool:
    """Grava (substituindo) a tabela; retorna False se o cache não pôde ser escrito."""
    try:
        with Session(get_engine(cache_dir)) as session, session.begin():
            stale = session.execute(
                select(BallRecord).where(
                    BallRecord.marking_digest == marking_digest,
                    BallRecord.radius == radius,
                    BallRecord.format_version == CACHE_FORMAT_VERSION,
                )
            ).scalars().all()
            for old in stale:
                session.delete(old)  # cascade apaga as esferas
            session.flush()
            rec = BallRecord(
                marking_digest=marking_digest,
                radius=radius,
                format_version=CACHE_FORMAT_VERSION,
                descriptor_text=descriptor_text,
                generator_count=generator_count,
                element_count=sum(len(s) for s in spheres),
                parents=parents,
                parent_generators=parent_generators,
                steps=steps,
            )
            rec.spheres = [
                SphereRecord(n=n, size=len(forms), forms="\n".join(forms))
                for n, forms in enumerate(spheres)
            ]
            session.add(rec)
        return True
    except Exception as e:
        logger.warning("could not write ball cache (%s): %s", cache_dir, e)
        return False
