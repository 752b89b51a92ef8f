"""Text encodings shared by the snapshot format and the wire protocol."""

from __future__ import annotations

from urllib.parse import quote, unquote

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# property value kind tags used in the snapshot format
TYPE_TAGS = {int: "i", float: "f", bool: "b", str: "s"}


def percent_encode(s: str) -> str:
    """UTF-8 percent-encoding; only RFC 3986 unreserved characters stay literal."""
    return quote(s, safe="")


def percent_decode(s: str) -> str:
    return unquote(s, errors="strict")


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def value_kind(v) -> str:
    """'i', 'f', 'b' or 's' for a property value."""
    # bool before int: bool is an int subclass
    if isinstance(v, bool):
        return "b"
    if isinstance(v, int):
        return "i"
    if isinstance(v, float):
        return "f"
    if isinstance(v, str):
        return "s"
    raise TypeError(f"unsupported property value {v!r}")


def encode_value(v) -> str:
    kind = value_kind(v)
    if kind == "b":
        return "true" if v else "false"
    if kind == "i":
        return str(v)
    if kind == "f":
        return format_float(v)
    return percent_encode(v)


def decode_value(kind: str, text: str):
    if kind == "i":
        v = int(text)
        if not INT64_MIN <= v <= INT64_MAX:
            raise ValueError(f"integer {text} out of int64 range")
        return v
    if kind == "f":
        return float(text)
    if kind == "b":
        if text == "true":
            return True
        if text == "false":
            return False
        raise ValueError(f"bad boolean {text!r}")
    if kind == "s":
        return percent_decode(text)
    raise ValueError(f"unknown value type {kind!r}")


def encode_props(props: dict) -> str:
    """``key:type:value`` items joined by ';', keys sorted."""
    return ";".join(f"{k}:{value_kind(v)}:{encode_value(v)}" for k, v in sorted(props.items()))


def decode_props(text: str) -> dict:
    props = {}
    if not text:
        return props
    for item in text.split(";"):
        key, kind, raw = item.split(":", 2)
        if not key:
            raise ValueError("empty property key")
        if key in props:
            raise ValueError(f"duplicate property key {key!r}")
        props[key] = decode_value(kind, raw)
    return props
