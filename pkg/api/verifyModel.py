from typing import Optional, List, Dict, Literal

from pydantic import BaseModel, Field, validator, root_validator

from config import Config

_train = Config['train']
_refine = Config['refine']
_inject = Config['inject']

CenterMode = Literal['init', 'update', 'train']
Variant = Literal['full', 'loc_only', 'glo_only', 'no_reg', 'pur_only', 'aug_only', 'neg_weights']
StoppingMode = Literal['val_auroc', 'train_loss']


class TrainConfig(BaseModel):
    lambda_loc: float = Field(default=_train['lambda_loc'], ge=0)
    lambda_clu: float = Field(default=_train['lambda_clu'], ge=0)
    num_clusters: int = Field(default=_train['num_clusters'], ge=2)
    center_mode: CenterMode = _train['center_mode']
    hidden_dim: int = Field(default=_train['hidden_dim'], ge=1)
    num_layers: int = Field(default=_train['num_layers'], ge=1)
    tau: float = Field(default=_refine['tau'], ge=0, le=1)
    delta: float = Field(default=_refine['delta'], gt=0, le=1)
    max_graphlet_size: int = Field(default=_refine['max_graphlet_size'])
    learning_rate: float = Field(default=_train['learning_rate'], gt=0)
    weight_decay: float = Field(default=_train['weight_decay'], ge=0)
    max_epochs: int = Field(default=_train['max_epochs'], ge=1)
    patience: int = Field(default=_train['patience'], ge=1)
    seed: int = _train['seed']
    split_ratios: List[float] = Field(default_factory=lambda: list(_train['split_ratios']))
    stratify: bool = _train['stratify']
    variant: Variant = _train['variant']
    stopping_mode: StoppingMode = _train['stopping_mode']

    class Config:
        extra = 'forbid'
        validate_assignment = True
        # defaults go through the validators too, so YAML ints come out as floats
        validate_all = True

    @validator('max_graphlet_size')
    def graphlet_size(cls, v):
        if v not in (3, 4):
            raise ValueError('max_graphlet_size must be 3 or 4')
        return v

    @validator('split_ratios', pre=True, always=True)
    def ratios(cls, v):
        v = [float(r) for r in v]
        if len(v) != 3 or any(r < 0 for r in v) or sum(v) <= 0:
            raise ValueError('split_ratios must be three non-negative numbers with a positive sum')
        return v

    @root_validator(skip_on_failure=True)
    def consistent(cls, values):
        if values['patience'] > values['max_epochs']:
            raise ValueError('patience must not exceed max_epochs')
        if values['variant'] == 'loc_only' and values['lambda_loc'] == 0:
            raise ValueError('loc_only scores by the local loss alone, lambda_loc must be > 0')
        return values

    @property
    def weights(self) -> tuple[float, float, float]:
        """(glo, loc, clu) coefficients of the total loss after the variant is applied"""
        glo = 0.0 if self.variant == 'loc_only' else 1.0
        loc = 0.0 if self.variant == 'glo_only' else self.lambda_loc
        return glo, loc, self.lambda_clu

    def refine_params(self) -> dict:
        return dict(tau=self.tau, max_graphlet_size=self.max_graphlet_size, delta=self.delta)


class InjectionSpec(BaseModel):
    kind: Literal['structural', 'contextual', 'mixed']
    clique_size: int = Field(default=_inject['clique_size'], ge=2)
    num_cliques: int = Field(default=0, ge=0)
    num_contextual: int = Field(default=0, ge=0)
    candidate_pool_size: int = Field(default=_inject['pool_size'], ge=1)
    seed: int = 0
    anomalies: List[int] = Field(default_factory=list)

    @root_validator(skip_on_failure=True)
    def counts(cls, values):
        expected = values['num_cliques'] * values['clique_size'] + values['num_contextual']
        if len(values['anomalies']) > expected:
            raise ValueError(f"{len(values['anomalies'])} anomalies recorded, parameters allow at most {expected}")
        return values


class MetricReport(BaseModel):
    auroc: float = Field(ge=0, le=1)
    aupr: float = Field(ge=0, le=1)
    num_pos: int = Field(ge=0)
    num_neg: int = Field(ge=0)


class ResourceSnapshot(BaseModel):
    cpu_logical: int
    cpu_physical: Optional[int]
    memory_total: int
    memory_available: int


class PipelineManifest(BaseModel):
    stage: str
    inputs: Dict[str, str] = Field(default_factory=dict)
    config_hash: str = ''
    outputs: List[str] = Field(default_factory=list)
    wall_time: float = 0.0
    resources: Optional[ResourceSnapshot] = None


class TensorEntry(BaseModel):
    name: str
    shape: List[int]
    offset: int = Field(ge=0)


class CheckpointManifest(BaseModel):
    format_version: int
    tensors: List[TensorEntry]
    config: TrainConfig
    config_hash: str
    epoch: int = Field(ge=0)
    center_mode: CenterMode
    num_features: int = Field(ge=1)
