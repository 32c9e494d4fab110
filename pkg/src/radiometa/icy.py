"""Length-prefixed stream-metadata frames: 1 length byte, then 16*L bytes.

The payload is NUL-padded text carrying ``StreamTitle='...';``. Decoding is
lossy UTF-8 because real encoders emit mixed encodings and collection must
never abort on a bad frame.
"""

from __future__ import annotations

import re

MAX_PAYLOAD_BYTES = 255 * 16  # 4080; titles up to 4064 bytes fit with the key overhead

# Value runs to the last "';" unless a later "key='" pair follows; blocks with
# several keys then still yield just the title.
_TITLE_RE = re.compile(r"StreamTitle='(.*?)';(?=(?:\w+='.*)?\Z)", re.DOTALL)


class IcyFrameError(ValueError):
    """Raised for frames shorter than their length byte promises."""


def encode_metadata_block(title: str) -> bytes:
    """Encode a title as one metadata frame (empty title -> empty frame)."""
    if title == "":
        return b"\x00"
    payload = f"StreamTitle='{title}';".encode("utf-8")
    if len(payload) > MAX_PAYLOAD_BYTES:
        raise ValueError(
            f"title needs {len(payload)} payload bytes, frame maximum is {MAX_PAYLOAD_BYTES}"
        )
    padded_len = -(-len(payload) // 16) * 16
    return bytes([padded_len // 16]) + payload.ljust(padded_len, b"\x00")


def parse_metadata_block(block: bytes) -> str | None:
    """Extract the stream title from a raw frame.

    Returns "" for a zero-length frame, None when the payload carries no
    ``StreamTitle`` key (distinct from a malformed frame), and raises
    :class:`IcyFrameError` when the frame is shorter than its length byte
    promises. Trailing bytes beyond the declared payload are ignored.
    """
    if not block:
        raise IcyFrameError("empty block: missing length byte")
    length = block[0] * 16
    if length == 0:
        return ""
    body = block[1 : 1 + length]
    if len(body) < length:
        raise IcyFrameError(
            f"truncated frame: length byte promises {length} payload bytes, got {len(body)}"
        )
    text = body.decode("utf-8", errors="replace").rstrip("\x00")
    m = _TITLE_RE.search(text)
    if m is None:
        return None
    return m.group(1)
