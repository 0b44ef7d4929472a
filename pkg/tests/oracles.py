"""Independent reference implementations used to check the real ones.

Everything here favors obviousness over speed: the byte-at-a-time carvers
are straight transcriptions of the definition of a maximal printable run,
and the numpy carver is a separately-derived vectorization.  The two
agree with each other by construction of the tests, and the production
carver must agree with both.
"""

from __future__ import annotations

import numpy as np

ASCII = "ascii"
UTF16LE = "utf16le"

_SAFE = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789*_.-")


def _printable(b: int) -> bool:
    return 0x20 <= b <= 0x7E


def _emit_capped(offset, chars, unit, min_len, cap, out):
    # Long runs split into cap-sized pieces; a final fragment shorter
    # than min_len is dropped, matching the length invariant.  `chars`
    # is a list of single characters or an already-joined string.
    for k in range(0, len(chars), cap):
        piece = chars[k : k + cap]
        if len(piece) >= min_len:
            text = piece if isinstance(piece, str) else "".join(piece)
            out.append((offset + unit * k, text, UTF16LE if unit == 2 else ASCII))


def carve_ascii_bruteforce(data: bytes, min_len: int = 4, cap: int = 4096):
    """One byte at a time: collect maximal printable runs."""
    out: list[tuple[int, str, str]] = []
    run: list[str] = []
    start = 0
    for i, b in enumerate(data):
        if _printable(b):
            if not run:
                start = i
            run.append(chr(b))
        elif run:
            _emit_capped(start, run, 1, min_len, cap, out)
            run = []
    if run:
        _emit_capped(start, run, 1, min_len, cap, out)
    return out


def carve_utf16_bruteforce(data: bytes, min_len: int = 4, cap: int = 4096):
    """Maximal chains of (printable, NUL) byte pairs at any alignment."""
    out: list[tuple[int, str, str]] = []
    n = len(data)

    def pair_at(i: int) -> bool:
        return i + 1 < n and _printable(data[i]) and data[i + 1] == 0

    for i in range(n):
        if not pair_at(i):
            continue
        if i >= 2 and pair_at(i - 2):
            continue  # interior of a chain found earlier
        chars = []
        j = i
        while pair_at(j):
            chars.append(chr(data[j]))
            j += 2
        _emit_capped(i, chars, 2, min_len, cap, out)
    out.sort(key=lambda t: t[0])
    return out


def carve_bruteforce(data: bytes, min_len: int = 4, cap: int = 4096):
    """Both encodings merged the way the carver orders them."""
    rows = carve_ascii_bruteforce(data, min_len, cap) + carve_utf16_bruteforce(
        data, min_len, cap
    )
    rows.sort(key=lambda t: (t[0], 0 if t[2] == ASCII else 1))
    return rows


def _runs_from_mask(mask: np.ndarray, keep_min: int = 1):
    """(start, length) of each maximal True run.

    Runs shorter than keep_min are skipped while still vectorized; a run
    below min_len can never contribute output (every cap piece of it is
    also below min_len), so callers pass min_len to avoid materializing
    the noise.
    """
    if mask.size == 0:
        return []
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    lens = np.flatnonzero(edges == -1) - starts
    if keep_min > 1:
        keep = lens >= keep_min
        starts, lens = starts[keep], lens[keep]
    return list(zip(starts.tolist(), lens.tolist()))


def carve_numpy(data: bytes, min_len: int = 4, cap: int = 4096):
    """Vectorized reference: run edges via mask diffs, per parity for
    UTF-16LE."""
    a = np.frombuffer(data, dtype=np.uint8)
    printable = (a >= 0x20) & (a <= 0x7E)
    narrow: list[tuple[int, str, str]] = []
    wide: list[tuple[int, str, str]] = []

    for start, length in _runs_from_mask(printable, min_len):
        chars = data[start : start + length].decode("latin-1")
        _emit_capped(start, chars, 1, min_len, cap, narrow)

    if a.size >= 2:
        pair = printable[:-1] & (a[1:] == 0)
        for parity in (0, 1):
            sub = pair[parity::2]
            for s, length in _runs_from_mask(sub, min_len):
                off = parity + 2 * s
                chars = data[off : off + 2 * length : 2].decode("latin-1")
                _emit_capped(off, chars, 2, min_len, cap, wide)
        wide.sort(key=lambda t: t[0])  # the two parity streams interleave

    # Merge the sorted encodings, ASCII first on an exact-offset tie.
    out: list[tuple[int, str, str]] = []
    i = j = 0
    while i < len(narrow) and j < len(wide):
        if narrow[i][0] <= wide[j][0]:
            out.append(narrow[i])
            i += 1
        else:
            out.append(wide[j])
            j += 1
    out += narrow[i:]
    out += wide[j:]
    return out


def percent_encode(text: str, plus_for_space: bool = False) -> str:
    """Escape every character outside the safe set; ordinal must fit one
    byte.  Inverse of the decoder over that domain."""
    out = []
    for ch in text:
        if ch in _SAFE:
            out.append(ch)
        elif ch == " " and plus_for_space:
            out.append("+")
        else:
            o = ord(ch)
            if o > 0xFF:
                raise ValueError(f"cannot single-byte encode {ch!r}")
            out.append(f"%{o:02X}")
    return "".join(out)


def random_buffer(seed_parts, size: int, density: float) -> bytes:
    """Density-controlled random bytes, same recipe family as the
    fabricator's filler but independent of it."""
    rng = np.random.default_rng(seed_parts)
    mask = rng.random(size) < density
    printable = rng.integers(0x20, 0x7F, size, dtype=np.uint8)
    other = rng.integers(0, 0xA1, size, dtype=np.uint8)
    other = np.where(other < 0x20, other, other + 0x5F).astype(np.uint8)
    return np.where(mask, printable, other).tobytes()


def strings_tuples(extracted) -> list[tuple[int, str, str]]:
    """Project ExtractedString objects onto oracle rows.

    The encoding enum subclasses str and compares equal to its value, so
    the member can stand in for the "ascii"/"utf16le" labels directly;
    going through .value costs a descriptor call per row.
    """
    return [(s.offset, s.text, s.encoding) for s in extracted]
