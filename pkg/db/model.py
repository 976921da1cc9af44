from sqlalchemy import (
    Integer,
    String,
    Text,
    Index,
    Boolean,
    DateTime,
    ForeignKey,
    UniqueConstraint,
    BigInteger,
    func,
)
from sqlalchemy.orm import mapped_column, relationship
from datetime import datetime
from .base import Base


class RunRecord(Base):
    """One experiment run, mirrored from its JSON manifest."""
    __tablename__ = "runs"

    id = mapped_column(Integer, primary_key=True, autoincrement=True)
    experiment = mapped_column(String(64), nullable=False)
    config_hash = mapped_column(String(64), nullable=False)
    seed = mapped_column(BigInteger, nullable=False)
    tool_version = mapped_column(String(32), nullable=False)
    out_dir = mapped_column(String(1024), nullable=False)
    started_at = mapped_column(DateTime, nullable=False, default=datetime.utcnow, server_default=func.current_timestamp())
    finished_at = mapped_column(DateTime, nullable=True)
    passed = mapped_column(Boolean, nullable=True)
    summary = mapped_column(Text, nullable=True)  # JSON pass/fail summary

    outputs = relationship("RunOutput", back_populates="run", cascade="all, delete-orphan")

    __table_args__ = (
        Index("idx_runs_config_seed", "config_hash", "seed"),
    )


class RunOutput(Base):
    """A file written by a run, with its content digest."""
    __tablename__ = "run_outputs"

    id = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id = mapped_column(Integer, ForeignKey("runs.id", ondelete="CASCADE"), nullable=False, index=True)
    path = mapped_column(String(1024), nullable=False)
    kind = mapped_column(String(16), nullable=False)
    sha256 = mapped_column(String(64), nullable=False)

    run = relationship("RunRecord", back_populates="outputs")

    __table_args__ = (UniqueConstraint("run_id", "path"),)
