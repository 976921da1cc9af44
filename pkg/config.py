import os
from pathlib import Path
from dotenv import load_dotenv
from sqlalchemy.engine import make_url

# Load environment variables from the .env file in the current directory
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent


def _resolve_sqlite_path(url: str | None) -> str | None:
    """Resolve relative SQLite URLs against the project root."""
    if not url:
        return url

    try:
        parsed = make_url(url)
    except Exception:
        return url

    if not parsed.drivername.startswith("sqlite"):
        return url

    database = parsed.database
    if not database:
        return url

    db_path = Path(database)
    if db_path.is_absolute():
        return url

    absolute_path = (PROJECT_ROOT / db_path).resolve()
    updated = parsed.set(database=absolute_path.as_posix())
    return str(updated)


def _env_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}") from None


def _env_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


_output_dir = Path(os.getenv("IGEOM_OUTPUT_DIR", "runs"))
OUTPUT_DIR = _output_dir if _output_dir.is_absolute() else (PROJECT_ROOT / _output_dir).resolve()

# Empty RUNS_DATABASE_URL disables the run registry
RUNS_DATABASE_URL = _resolve_sqlite_path(os.getenv("RUNS_DATABASE_URL", "sqlite:///runs/registry.db"))

JOBS = _env_int("IGEOM_JOBS", "1")
LOG_LANGUAGE = os.getenv("LOG_LANGUAGE", "en")
SAMPLER = os.getenv("IGEOM_SAMPLER", "cholesky").strip().lower()
STEP_FACTOR = _env_float("IGEOM_STEP_FACTOR", "0.5")
SEED_STRIDE = _env_int("IGEOM_SEED_STRIDE", "5")
COLLISION_FACTOR = _env_float("IGEOM_COLLISION_FACTOR", "3.0")
SWALLOW_CUTOFF = _env_float("IGEOM_SWALLOW_CUTOFF", "1e-6")
CONFORMAL_TOL = _env_float("IGEOM_CONFORMAL_TOL", "1e-9")
MICRO_GAP_LOG = _env_float("IGEOM_MICRO_GAP_LOG", "-12")

# Validation
if JOBS < 1:
    raise ValueError("IGEOM_JOBS must be at least 1.")

if SAMPLER not in {"cholesky", "spectral"}:
    raise ValueError(f"IGEOM_SAMPLER must be 'cholesky' or 'spectral', got {SAMPLER!r}.")

if STEP_FACTOR <= 0:
    raise ValueError("IGEOM_STEP_FACTOR must be positive.")

if SEED_STRIDE < 1:
    raise ValueError("IGEOM_SEED_STRIDE must be at least 1.")

if COLLISION_FACTOR <= 0 or SWALLOW_CUTOFF <= 0 or CONFORMAL_TOL <= 0:
    raise ValueError("IGEOM_COLLISION_FACTOR, IGEOM_SWALLOW_CUTOFF and IGEOM_CONFORMAL_TOL must be positive.")

if MICRO_GAP_LOG >= 0:
    raise ValueError("IGEOM_MICRO_GAP_LOG must be negative.")
