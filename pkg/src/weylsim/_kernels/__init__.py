from .paths import step_chunk
from .loggas import loggas_sweeps

__all__ = ["step_chunk", "loggas_sweeps"]
