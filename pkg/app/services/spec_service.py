import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import TypeAdapter, ValidationError

from app.core.exceptions import QMatroidError, SpecError
from app.schemas.matroid import (
    ContractSpec,
    DsumSpec,
    DualSpec,
    FamilySchema,
    MatroidSpec,
    RepresentableSpec,
    RestrictSpec,
    SpreadSpec,
    SubspaceSchema,
    TableSpec,
    UniformSpec,
    UnionSpec,
    ZDefinedSpec,
)
from app.services import dsum_service, qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.field_service import create_field, parse_element
from app.services.subspace_service import Subspace
from app.services.zflats_service import CyclicFlatFamily, to_schema

logger = logging.getLogger(__name__)

_adapter = TypeAdapter(MatroidSpec)

Source = Union[str, Path, Dict[str, Any]]


def _read_json(source: Source) -> Any:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e


def parse_spec(data: Union[str, Dict[str, Any]]):
    """A spec from a dict or a JSON string."""
    try:
        if isinstance(data, str):
            return _adapter.validate_json(data)
        return _adapter.validate_python(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first["loc"])
        raise SpecError(f"invalid spec at {where or 'top level'}: {first['msg']}") from e


def load_spec(source: Source):
    return parse_spec(_read_json(source))


def dump_spec(spec) -> Dict[str, Any]:
    return spec.model_dump(mode="json", exclude_none=True)


def dump_spec_json(spec) -> str:
    return json.dumps(dump_spec(spec), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def spec_digest(spec) -> str:
    return hashlib.sha256(dump_spec_json(spec).encode("utf-8")).hexdigest()


def subspace_from(q: int, n: int, schema: SubspaceSchema) -> Subspace:
    return ss.span(q, n, schema.rows)


def build_oracle(spec) -> qm.RankOracle:
    """Build the rank oracle a spec describes; the oracle keeps the spec."""
    try:
        oracle = _build(spec)
    except QMatroidError:
        raise
    except (TypeError, ValueError, IndexError) as e:
        raise SpecError(f"cannot build {spec.kind} q-matroid: {e}") from e
    oracle.spec = spec
    return oracle


def _build(spec) -> qm.RankOracle:
    if isinstance(spec, RepresentableSpec):
        field = create_field(spec.ext.p, spec.ext.m, spec.ext.modulus)
        G = [[parse_element(field, x) for x in row] for row in spec.G]
        return qm.from_representation(field, G, q=spec.q, n=spec.n, spec=spec)
    if isinstance(spec, UniformSpec):
        return qm.uniform(spec.q, spec.n, spec.k)
    if isinstance(spec, ZDefinedSpec):
        family = [(ss.span(spec.q, spec.n, f.rows), f.rank) for f in spec.flats]
        return qm.from_cyclic_flats(spec.q, spec.n, family, spec=spec)
    if isinstance(spec, SpreadSpec):
        spread = [subspace_from(spec.q, spec.n, s) for s in spec.spread]
        return qm.from_spread(spec.q, spread, n=spec.n, spec=spec)
    if isinstance(spec, TableSpec):
        table = {ss.span(spec.q, spec.n, r.rows): r.rank for r in spec.ranks}
        return qm.from_table(spec.q, spec.n, table, spec=spec)
    if isinstance(spec, DualSpec):
        return qm.dual(build_oracle(spec.of))
    if isinstance(spec, DsumSpec):
        parts = [build_oracle(p) for p in spec.parts]
        return dsum_service.direct_sum_all(parts, spec.strategy, spec=spec)
    if isinstance(spec, UnionSpec):
        first, second = (build_oracle(p) for p in spec.parts)
        return dsum_service.union(first, second)
    if isinstance(spec, (RestrictSpec, ContractSpec)):
        inner = build_oracle(spec.of)
        x = subspace_from(inner.q, inner.n, spec.X)
        if isinstance(spec, RestrictSpec):
            return qm.restriction(inner, x)
        return qm.contraction(inner, x)
    raise SpecError(f"unsupported spec kind {getattr(spec, 'kind', None)!r}")


def load_oracle(source: Source) -> qm.RankOracle:
    return build_oracle(load_spec(source))


def parse_subspace(q: int, n: int, data: Union[str, List[List[int]]]) -> Subspace:
    """Rows given as a JSON string like "[[1,0,1]]" or as a list."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise SpecError(f"subspace rows are not JSON: {e.msg}") from e
    if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
        raise SpecError("subspace rows must be a list of lists")
    return ss.span(q, n, data)


def load_family(source: Source) -> Tuple[int, int, List[Tuple[Subspace, int]]]:
    try:
        schema = FamilySchema.model_validate(_read_json(source))
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecError(f"invalid family file: {first['msg']}") from e
    members = [(ss.span(schema.q, schema.n, m.rows), m.rank) for m in schema.members]
    return schema.q, schema.n, members


def dump_family(family: CyclicFlatFamily) -> Dict[str, Any]:
    return to_schema(family).model_dump(mode="json")
