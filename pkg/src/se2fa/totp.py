"""Time-based one-time passwords (HMAC-SHA1 truncation per RFC 6238)."""

from __future__ import annotations

import hashlib
import hmac
import struct

__all__ = ["hotp_code", "totp_code"]


def hotp_code(seed: bytes, counter: int, digits: int = 6) -> str:
    """Counter-based code: HMAC-SHA1 dynamic truncation, zero-padded."""
    if digits not in (6, 8):
        raise ValueError("digits must be 6 or 8")
    if counter < 0:
        raise ValueError("counter must be non-negative")
    mac = hmac.new(seed, struct.pack(">Q", counter), hashlib.sha1).digest()
    offset = mac[-1] & 0x0F
    binary = struct.unpack(">I", mac[offset : offset + 4])[0] & 0x7FFFFFFF
    return str(binary % (10 ** digits)).zfill(digits)


def totp_code(seed: bytes, at: float, step: int = 30, digits: int = 6) -> str:
    """Code for the time window containing ``at`` (epoch seconds)."""
    if step <= 0:
        raise ValueError("step must be positive")
    return hotp_code(seed, int(at // step), digits=digits)
