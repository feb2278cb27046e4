"""JSON and text emission with a fixed 17-significant-digit real format.

All reals written by this package go through :func:`format_real`, which is
enough digits for a float64 to round-trip bit-exactly through text.
"""

import math

import numpy as np

from .errors import ContractViolation


def format_real(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ContractViolation("refusing to serialize non-finite real %r" % x)
    return format(x, ".17g")


def json_dumps(obj) -> str:
    """Serialize nested dicts/lists/scalars to JSON text.

    Unlike :func:`json.dumps`, reals are always written at 17 significant
    digits so serialized output is reproducible and exact.
    """
    out = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(_escape(str(k)))
            out.append(": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, v in enumerate(seq):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    elif hasattr(obj, "to_json_dict"):
        _emit(obj.to_json_dict(), out)
    else:
        raise TypeError("cannot serialize %r" % type(obj))


_ESCAPES = {
    '"': '\\"',
    "\\": "\\\\",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _escape(s: str) -> str:
    parts = ['"']
    for ch in s:
        if ch in _ESCAPES:
            parts.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            parts.append("\\u%04x" % ord(ch))
        else:
            parts.append(ch)
    parts.append('"')
    return "".join(parts)
