"""
JSON input/output for channels, stochastic matrices and MPS tensors, plus the
deterministic report encoder.

Complex entries are written as [re, im] pairs in input files and as
{"re": ..., "im": ...} objects in reports.
"""

import hashlib
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from qprim.channel import KrausChannel, StochasticMatrix
from qprim.errors import InvalidInput
from qprim.mps import MpsTensor
from qprim.numerics import DEFAULT_POLICY, TolerancePolicy

logger = logging.getLogger(__name__)

Loaded = Union[KrausChannel, StochasticMatrix, MpsTensor]


def digest(data: Union[bytes, str]) -> str:
    if isinstance(data, str):
        data = data.encode('utf-8')
    return 'sha256:' + hashlib.sha256(data).hexdigest()


def parse_json(text: str, source: str = '<input>') -> Dict:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{source}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(payload, dict):
        raise InvalidInput(f"{source}: top-level JSON value must be an object")
    return payload


def read_json(path: Union[str, Path]) -> Tuple[Dict, str]:
    """Payload and content digest of a JSON input file."""
    path = Path(path)
    logger.info(f"Loading {path}")
    if not path.exists():
        raise InvalidInput(f"Input file {path} not found")
    try:
        raw = path.read_bytes()
        text = raw.decode('utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise InvalidInput(f"Cannot read {path}: {e}") from e
    return parse_json(text, str(path)), digest(raw)


def _require(payload: Dict, key: str, kind: str):
    if key not in payload:
        raise InvalidInput(f"{kind} JSON is missing the field {key!r}")
    return payload[key]


def _positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InvalidInput(f"{name} must be a positive integer, got {value!r}")
    return value


def _complex_matrix(raw, D: int, name: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != D:
        raise InvalidInput(f"{name} must have {D} rows")
    out = np.zeros((D, D), dtype=np.complex128)
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != D:
            raise InvalidInput(f"{name}, row {r} must have {D} entries")
        for c, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
                raise InvalidInput(f"{name}[{r}][{c}] must be a [re, im] pair of numbers")
            out[r, c] = complex(entry[0], entry[1])
    return out


def channel_from_payload(payload: Dict, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    D = _positive_int(_require(payload, 'D', 'Channel'), 'D')
    kraus = _require(payload, 'kraus', 'Channel')
    if not isinstance(kraus, list) or not kraus:
        raise InvalidInput("kraus must be a nonempty list of matrices")
    tp = payload.get('tp')
    if tp is not None and not isinstance(tp, bool):
        raise InvalidInput(f"tp must be a boolean, got {tp!r}")
    ops = [_complex_matrix(A, D, f"kraus[{k}]") for k, A in enumerate(kraus)]
    return KrausChannel.from_kraus(ops, pol, tp=tp)


def stochastic_from_payload(payload: Dict, pol: TolerancePolicy = DEFAULT_POLICY) -> StochasticMatrix:
    D = _positive_int(_require(payload, 'D', 'Stochastic'), 'D')
    S = StochasticMatrix.from_entries(_require(payload, 'entries', 'Stochastic'), pol)
    if S.dim_D != D:
        raise InvalidInput(f"entries is {S.dim_D}x{S.dim_D} but D = {D}")
    return S


def tensor_from_payload(payload: Dict, pol: TolerancePolicy = DEFAULT_POLICY) -> MpsTensor:
    d = _positive_int(_require(payload, 'd', 'Tensor'), 'd')
    D = _positive_int(_require(payload, 'D', 'Tensor'), 'D')
    matrices = _require(payload, 'matrices', 'Tensor')
    if not isinstance(matrices, list) or len(matrices) != d:
        raise InvalidInput(f"matrices must hold d = {d} matrices")
    return MpsTensor.from_matrices([_complex_matrix(A, D, f"matrices[{i}]") for i, A in enumerate(matrices)], pol)


def from_payload(payload: Dict, pol: TolerancePolicy = DEFAULT_POLICY) -> Loaded:
    """Dispatch on the distinguishing field: kraus, entries or matrices."""
    if 'kraus' in payload:
        return channel_from_payload(payload, pol)
    if 'entries' in payload:
        return stochastic_from_payload(payload, pol)
    if 'matrices' in payload:
        return tensor_from_payload(payload, pol)
    raise InvalidInput("JSON object has none of the fields 'kraus', 'entries', 'matrices'")


def load_channel(path, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    return channel_from_payload(read_json(path)[0], pol)


def load_stochastic(path, pol: TolerancePolicy = DEFAULT_POLICY) -> StochasticMatrix:
    return stochastic_from_payload(read_json(path)[0], pol)


def load_tensor(path, pol: TolerancePolicy = DEFAULT_POLICY) -> MpsTensor:
    return tensor_from_payload(read_json(path)[0], pol)


def _pairs(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def to_payload(obj: Loaded) -> Dict:
    if isinstance(obj, KrausChannel):
        return {'D': obj.dim_D, 'kraus': [_pairs(A) for A in obj.kraus], 'tp': obj.is_tp}
    if isinstance(obj, StochasticMatrix):
        return {'D': obj.dim_D, 'entries': obj.entries.tolist()}
    if isinstance(obj, MpsTensor):
        return {'d': obj.phys_d, 'D': obj.bond_D, 'matrices': [_pairs(A) for A in obj.matrices]}
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def dump(obj: Loaded, path: Union[str, Path]):
    Path(path).write_text(encode(to_payload(obj)) + '\n')
    logger.info(f"Wrote {type(obj).__name__} to {path}")


def format_float(x: float) -> str:
    """Shortest round-trip representation with an uppercase exponent; null for non-finite values."""
    x = float(x)
    if not math.isfinite(x):
        return 'null'
    return repr(x).replace('e', 'E')


def encode(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, repr floats, complex as {"re", "im"}."""
    pad = ' ' * (indent * (_level + 1))
    end = ' ' * (indent * _level)
    if obj is None:
        return 'null'
    if isinstance(obj, Enum):
        return encode(obj.value, indent, _level)
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode({'re': float(obj.real), 'im': float(obj.imag)}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f"{pad}{json.dumps(str(k))}: {encode(v, indent, _level + 1)}" for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        return '[\n' + ',\n'.join(pad + encode(v, indent, _level + 1) for v in obj) + '\n' + end + ']'
    raise TypeError(f"Object of type {type(obj).__name__} is not serializable")
