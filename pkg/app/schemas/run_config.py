from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

OutputFormat = Literal["json", "csv", "dot", "text"]


class RunConfig(BaseModel):
    """One CLI invocation: parsed flags merged over settings."""

    model_config = ConfigDict(extra="forbid")

    command: str
    specs: List[str] = []
    shards: Optional[int] = Field(default=None, gt=0)
    budget_ms: Optional[float] = Field(default=None, gt=0)
    format: Optional[OutputFormat] = None
    seed: int = 0
    strategy: Literal["naive", "zbased"] = "zbased"
    use_cache: bool = True
    subspace: Optional[str] = None
    mode: Literal["exhaustive", "sampled"] = "exhaustive"
    level: Literal["structural", "full"] = "structural"
    timing: bool = False
    archive: bool = False
    label: Optional[str] = None
    candidate_budget: Optional[int] = Field(default=None, gt=0)
