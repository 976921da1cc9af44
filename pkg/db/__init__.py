from .base import Base
from .model import RunOutput, RunRecord
