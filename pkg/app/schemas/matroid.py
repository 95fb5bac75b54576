from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field


class FieldSchema(BaseModel):
    p: int
    m: int = 1
    modulus: Optional[List[int]] = None  # constant term first


class SubspaceSchema(BaseModel):
    rows: List[List[int]] = []


class RankedSubspaceSchema(SubspaceSchema):
    rank: int


class FamilySchema(BaseModel):
    q: int
    n: int
    members: List[RankedSubspaceSchema]


class SpecBase(BaseModel):
    label: Optional[str] = None


class RepresentableSpec(SpecBase):
    kind: Literal["representable"] = "representable"
    q: int
    ext: FieldSchema
    G: List[List[Union[int, str]]]  # "0", "1", "w5" or integer indices
    n: Optional[int] = None  # only needed when G has no rows


class UniformSpec(SpecBase):
    kind: Literal["uniform"] = "uniform"
    q: int
    n: int
    k: int


class ZDefinedSpec(SpecBase):
    kind: Literal["zdefined"] = "zdefined"
    q: int
    n: int
    flats: List[RankedSubspaceSchema]


class SpreadSpec(SpecBase):
    kind: Literal["spread"] = "spread"
    q: int
    n: int = 4
    spread: List[SubspaceSchema]


class TableSpec(SpecBase):
    kind: Literal["table"] = "table"
    q: int
    n: int
    ranks: List[RankedSubspaceSchema]


class DualSpec(SpecBase):
    kind: Literal["dual"] = "dual"
    of: "MatroidSpec"


class DsumSpec(SpecBase):
    kind: Literal["dsum"] = "dsum"
    parts: List["MatroidSpec"] = Field(min_length=2)
    strategy: Literal["naive", "zbased"] = "zbased"


class UnionSpec(SpecBase):
    kind: Literal["union"] = "union"
    parts: List["MatroidSpec"] = Field(min_length=2, max_length=2)


class RestrictSpec(SpecBase):
    kind: Literal["restrict"] = "restrict"
    of: "MatroidSpec"
    X: SubspaceSchema


class ContractSpec(SpecBase):
    kind: Literal["contract"] = "contract"
    of: "MatroidSpec"
    X: SubspaceSchema


MatroidSpec = Annotated[
    Union[
        RepresentableSpec,
        UniformSpec,
        ZDefinedSpec,
        SpreadSpec,
        TableSpec,
        DualSpec,
        DsumSpec,
        UnionSpec,
        RestrictSpec,
        ContractSpec,
    ],
    Field(discriminator="kind"),
]

for _model in (DualSpec, DsumSpec, UnionSpec, RestrictSpec, ContractSpec):
    _model.model_rebuild()
