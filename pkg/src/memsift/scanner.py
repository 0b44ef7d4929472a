"""End-to-end credential scan over carved strings.

The scan streams the carver output once.  Signature keywords are rare, so
the engine only materialises work around them: a keyword hit opens a region
spanning the context window either side of the hit, overlapping regions
merge, and a region is matched as a unit once the stream has safely passed
it.  Strings outside any region are dropped as soon as they fall behind the
window, which keeps peak memory proportional to the densest keyword
neighbourhood rather than to image size.

Within a region every signature is tried in both modes.  Where two
applications share keywords (IRCTC and SBI both post ``userName`` and
``password``), the login-page URL seen nearby is what tells them apart, so
dominated duplicates are dropped: a candidate loses only to one that
matched at least as much (username, context confirmation) and strictly
more of it.  Candidates that tie stay side by side; ambiguity is evidence.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .carver import (
    BOTH_ENCODINGS,
    DEFAULT_CAP,
    DEFAULT_MIN_LEN,
    Encoding,
    ExtractedString,
    carve_strings,
)
from .corpus import DEFAULT_CHUNK_SIZE, ImageManifest, MemoryImage, open_image
from .decoding import classify_value
from .errors import UnknownLabelError
from .procmap import Attribution, ProcessMap, ProcessMapEntry
from .signatures import (
    DEFAULT_DELTA,
    DEFAULT_WINDOW,
    AdjacentBinder,
    CredentialSignature,
    MatchMode,
    SignatureMatch,
    builtin_catalog,
    combine_bindings,
    cookie_username_offset,
    extract_cookie_username,
    match_inline,
    parse_form_pairs,
)

HIGH = "HIGH"
LOW = "LOW"

# Table-style column layout: one column per application/browser pairing that
# can actually produce findings (the Firefox Gmail signature is
# Firefox-specific, its Chrome sibling Chrome-specific).
MF = "MF"
GC = "GC"
STANDARD_COLUMNS: tuple[tuple[str, str], ...] = (
    ("sonicwall", MF),
    ("sonicwall", GC),
    ("facebook", MF),
    ("facebook", GC),
    ("gmail-ff", MF),
    ("gmail-gc", GC),
    ("irctc", MF),
    ("irctc", GC),
    ("sbi", MF),
    ("sbi", GC),
)

# Which OS process implies which browser column.
BROWSER_PROCESSES: Mapping[str, str] = {"firefox.exe": MF, "chrome.exe": GC}


def browser_tag(name: str | None) -> str | None:
    """Normalise a free-text browser name to a column tag, if recognised."""
    if not name:
        return None
    folded = name.strip().lower()
    if folded in ("mf", "firefox", "mozilla firefox") or "firefox" in folded:
        return MF
    if folded in ("gc", "chrome", "google chrome") or "chrome" in folded:
        return GC
    return None

_SNIPPET_LIMIT = 256


@dataclass(frozen=True)
class ScanOptions:
    min_len: int = DEFAULT_MIN_LEN
    encodings: tuple[Encoding, ...] = BOTH_ENCODINGS
    delta: int = DEFAULT_DELTA
    window: int = DEFAULT_WINDOW
    chunk_size: int = DEFAULT_CHUNK_SIZE
    cap: int = DEFAULT_CAP
    case_sensitive: bool = True


@dataclass(frozen=True)
class CredentialFinding:
    """One credential sighting.  Never deduplicated: each copy of the same
    password at a different offset is its own row of evidence."""

    app_id: str
    image_label: str
    username: str | None
    password_raw: str | None
    password_decoded: str | None
    encrypted: bool
    match_mode: str
    offset: int
    confidence: str
    context_snippet: str
    attributions: tuple[Attribution, ...] = ()
    # Value offsets let findings be re-verified against the raw image.
    username_offset: int | None = None
    password_offset: int | None = None

    def __post_init__(self) -> None:
        if self.username is None and self.password_raw is None:
            raise ValueError("finding must carry a username or a password")
        if self.encrypted and self.password_decoded is not None:
            raise ValueError("suspected-encrypted values must not be decoded")


def assign_confidence(
    anchor: int,
    context: Sequence[ExtractedString],
    sig: CredentialSignature,
    window: int = DEFAULT_WINDOW,
) -> str:
    """HIGH iff one of the signature's context URLs occurs in a carved
    string whose offset lies within [anchor-window, anchor+window]."""
    lo, hi = anchor - window, anchor + window
    for s in context:
        if lo <= s.offset <= hi and any(u in s.text for u in sig.context_urls):
            return HIGH
    return LOW


class _Region:
    __slots__ = ("start", "end")

    def __init__(self, start: int, end: int):
        self.start = start
        self.end = end


def _prefilter(catalog: Sequence[CredentialSignature], case_sensitive: bool) -> re.Pattern:
    tokens: set[str] = set()
    for sig in catalog:
        tokens.update(sig.username_keys)
        tokens.update(sig.password_keys)
        if sig.username_marker:
            tokens.add(sig.username_marker)
    ordered = sorted(tokens, key=len, reverse=True)
    flags = 0 if case_sensitive else re.IGNORECASE
    return re.compile("|".join(re.escape(t) for t in ordered), flags)


def _attach_cookie_usernames(
    matches: list[SignatureMatch],
    strings: Sequence[ExtractedString],
    sig: CredentialSignature,
    window: int,
) -> None:
    """Bind marker-style usernames (the GAUSR cookie) to this signature's
    password matches; a cookie nothing claimed becomes username evidence of
    its own."""
    cookies: list[tuple[int, str, ExtractedString]] = []
    for s in strings:
        name = extract_cookie_username(s.text, sig.username_marker)
        if name is not None:
            off = cookie_username_offset(s, sig.username_marker)
            assert off is not None
            cookies.append((off, name, s))
    if not cookies:
        return
    claimed: set[int] = set()
    for i, m in enumerate(matches):
        if (
            m.signature.app_id != sig.app_id
            or m.password_raw is None
            or m.username_raw is not None
        ):
            continue
        best = None
        for j, (coff, _name, _src) in enumerate(cookies):
            if abs(coff - m.anchor_offset) > window:
                continue
            if best is None or abs(coff - m.anchor_offset) < abs(
                cookies[best][0] - m.anchor_offset
            ):
                best = j
        if best is not None:
            coff, name, src = cookies[best]
            claimed.add(best)
            unit = 2 if src.encoding is Encoding.UTF16LE else 1
            matches[i] = SignatureMatch(
                signature=m.signature,
                mode=m.mode,
                username_raw=name,
                username_offset=coff + unit * len(sig.username_marker),
                username_key_offset=coff,
                password_raw=m.password_raw,
                password_offset=m.password_offset,
                password_key_offset=m.password_key_offset,
                context_text=m.context_text,
            )
    for j, (coff, name, src) in enumerate(cookies):
        if j in claimed:
            continue
        unit = 2 if src.encoding is Encoding.UTF16LE else 1
        matches.append(
            SignatureMatch(
                signature=sig,
                mode=MatchMode.INLINE,
                username_raw=name,
                username_offset=coff + unit * len(sig.username_marker),
                username_key_offset=coff,
                context_text=src.text,
            )
        )


def _match_region(
    strings: Sequence[ExtractedString],
    catalog: Sequence[CredentialSignature],
    opts: ScanOptions,
    hit_re: re.Pattern,
) -> list[tuple[int, str, SignatureMatch]]:
    """All signature matches inside one closed region, with the dominated
    shared-keyword duplicates removed.  Returns (catalog order, confidence,
    match) triples."""
    sig_order = {sig.app_id: i for i, sig in enumerate(catalog)}
    matches: list[SignatureMatch] = []

    # Inline: each carved string treated as a form body.
    for s in strings:
        if "=" not in s.text or not hit_re.search(s.text):
            continue
        pairs = parse_form_pairs(s)
        if not pairs:
            continue
        for sig in catalog:
            m = match_inline(s, sig, case_sensitive=opts.case_sensitive, pairs=pairs)
            if m is not None:
                matches.append(m)

    # Adjacent: key and value carved as separate neighbouring strings.
    binder = AdjacentBinder(catalog, opts.delta, opts.case_sensitive)
    bindings = []
    for s in strings:
        bindings.extend(binder.push(s))
    for sig in catalog:
        matches.extend(combine_bindings(bindings, sig, opts.window))

    for sig in catalog:
        if sig.username_marker:
            _attach_cookie_usernames(matches, strings, sig, opts.window)

    # Shared-keyword arbitration.  Group candidates claiming the very same
    # value bytes; within a group drop anything strictly dominated on
    # (matched a username, context-confirmed).  The URL context is exactly
    # what associates an ambiguous userName/password pair with one site.
    groups: dict[tuple, list[tuple[tuple[bool, bool], int, str, SignatureMatch]]] = {}
    for m in matches:
        if m.password_raw is not None:
            key = (m.mode, "pw", m.password_offset)
        else:
            key = (m.mode, "user", m.username_offset)
        conf = assign_confidence(m.anchor_offset, strings, m.signature, opts.window)
        score = (m.username_raw is not None, conf == HIGH)
        groups.setdefault(key, []).append(
            (score, sig_order[m.signature.app_id], conf, m)
        )
    kept: list[tuple[int, str, SignatureMatch]] = []
    for members in groups.values():
        for score, order, conf, m in members:
            dominated = any(
                other[0] != score
                and other[0][0] >= score[0]
                and other[0][1] >= score[1]
                for other in members
            )
            if not dominated:
                kept.append((order, conf, m))
    return kept


class _StreamScanner:
    """Carve-order consumer that opens, merges and closes hit regions."""

    def __init__(self, catalog: Sequence[CredentialSignature], opts: ScanOptions):
        self.catalog = catalog
        self.opts = opts
        self.hit_re = _prefilter(catalog, opts.case_sensitive)
        # Reach past a hit that can still interact with it: context window
        # plus adjacency gap plus a little for key text itself.
        self.reach = opts.window + opts.delta + 256
        self.buffer: deque[ExtractedString] = deque()
        self.region: _Region | None = None
        self.results: list[tuple[int, str, SignatureMatch]] = []

    def _close_region(self) -> None:
        region = self.region
        assert region is not None
        batch = [s for s in self.buffer if region.start <= s.offset <= region.end]
        self.results.extend(_match_region(batch, self.catalog, self.opts, self.hit_re))
        self.region = None

    def _evict(self, frontier: int) -> None:
        floor = frontier - self.reach
        if self.region is not None:
            floor = min(floor, self.region.start)
        while self.buffer and (
            self.buffer[0].offset + self.buffer[0].byte_length < floor
        ):
            self.buffer.popleft()

    def push(self, s: ExtractedString) -> None:
        hit = self.hit_re.search(s.text) is not None
        if self.region is not None:
            if hit and s.offset - self.reach <= self.region.end:
                self.region.end = max(
                    self.region.end, s.offset + s.byte_length + self.reach
                )
            elif s.offset > self.region.end:
                self._close_region()
        if self.region is None and hit:
            self.region = _Region(
                s.offset - self.reach, s.offset + s.byte_length + self.reach
            )
        self.buffer.append(s)
        self._evict(s.offset)

    def finish(self) -> list[tuple[int, str, SignatureMatch]]:
        if self.region is not None:
            self._close_region()
        return self.results


def scan_image(
    image: MemoryImage,
    catalog: Sequence[CredentialSignature] | None = None,
    options: ScanOptions | None = None,
    process_map: Sequence[ProcessMapEntry] | ProcessMap | None = None,
) -> list[CredentialFinding]:
    """Scan one image and return findings sorted by offset.

    Zero findings is a result, not an error: on a timeline, the image taken
    after logout proving the password gone matters as much as the one where
    it was present.
    """
    catalog = list(catalog) if catalog is not None else builtin_catalog()
    opts = options or ScanOptions()
    pmap: ProcessMap | None = None
    if process_map is not None:
        pmap = (
            process_map
            if isinstance(process_map, ProcessMap)
            else ProcessMap(process_map)
        )

    engine = _StreamScanner(catalog, opts)
    for s in carve_strings(
        image,
        opts.min_len,
        opts.encodings,
        chunk_size=opts.chunk_size,
        cap=opts.cap,
    ):
        engine.push(s)

    return [
        _to_finding(m, conf, image.label, pmap)
        for _order, conf, m in sorted(
            engine.finish(), key=lambda t: (t[2].anchor_offset, t[0])
        )
    ]


def _to_finding(
    m: SignatureMatch,
    confidence: str,
    label: str,
    pmap: ProcessMap | None,
) -> CredentialFinding:
    sig = m.signature
    password_decoded = None
    encrypted = False
    if m.password_raw is not None:
        dv = classify_value(
            m.password_raw,
            sig.value_encoding,
            plus_as_space=(m.mode == MatchMode.INLINE),
        )
        encrypted = dv.encrypted
        password_decoded = None if encrypted else dv.decoded
    anchor = m.anchor_offset
    attributions = tuple(pmap.lookup(anchor)) if pmap is not None else ()
    return CredentialFinding(
        app_id=sig.app_id,
        image_label=label,
        username=m.username_raw,
        password_raw=m.password_raw,
        password_decoded=password_decoded,
        encrypted=encrypted,
        match_mode=m.mode,
        offset=anchor,
        confidence=confidence,
        context_snippet=m.context_text[:_SNIPPET_LIMIT],
        attributions=attributions,
        username_offset=m.username_offset,
        password_offset=m.password_offset,
    )


def scan_manifest(
    manifest: ImageManifest,
    catalog: Sequence[CredentialSignature] | None = None,
    options: ScanOptions | None = None,
    process_map: Sequence[ProcessMapEntry] | ProcessMap | None = None,
) -> dict[str, list[CredentialFinding]]:
    """Scan every manifest entry; keys follow manifest order."""
    out: dict[str, list[CredentialFinding]] = {}
    for entry in manifest:
        out[entry.label] = scan_image(open_image(entry), catalog, options, process_map)
    return out


@dataclass(frozen=True)
class PresenceMatrix:
    """Yes/No grid: did image X still hold a password for column Y."""

    rows: tuple[str, ...]
    columns: tuple[tuple[str, str], ...]
    cells: tuple[tuple[str, ...], ...]

    def cell(self, label: str, app_id: str, browser: str) -> str:
        r = self.rows.index(label)
        c = self.columns.index((app_id, browser))
        return self.cells[r][c]


def _finding_browsers(
    f: CredentialFinding,
    session_browser: str | None,
    browser_processes: Mapping[str, str],
    all_tags: frozenset[str],
) -> frozenset[str]:
    if f.attributions:
        tags = {
            browser_processes[a.process_name.lower()]
            for a in f.attributions
            if a.process_name.lower() in browser_processes
        }
        if tags:
            return frozenset(tags)
    if session_browser:
        return frozenset({session_browser})
    return all_tags


def build_presence_matrix(
    rows: ImageManifest | Sequence[str],
    findings_by_image: Mapping[str, Sequence[CredentialFinding]],
    columns: Sequence[tuple[str, str]] = STANDARD_COLUMNS,
    *,
    session_browser: str | None = None,
    browser_processes: Mapping[str, str] = BROWSER_PROCESSES,
) -> PresenceMatrix:
    """Reduce findings to the password-presence grid.

    A cell is Yes iff at least one finding for that application in that
    image still carries the password bytes; encrypted counts, the password
    was present even if unreadable.  Which browser column a finding feeds
    comes from its process attribution when one names a known browser, else
    from the session metadata, else it counts for every column of its
    application (the conservative reading).
    """
    if isinstance(rows, ImageManifest):
        labels = tuple(rows.labels())
        if session_browser is None and rows.session_meta is not None:
            session_browser = browser_tag(rows.session_meta[0])
    else:
        labels = tuple(rows)
    known = set(labels)
    for label in findings_by_image:
        if label not in known:
            raise UnknownLabelError(f"findings reference unknown image label {label!r}")
    all_tags = frozenset(tag for _, tag in columns)
    grid: list[tuple[str, ...]] = []
    for label in labels:
        row: list[str] = []
        per_image = findings_by_image.get(label, ())
        for app_id, tag in columns:
            yes = any(
                f.app_id == app_id
                and f.password_raw is not None
                and tag
                in _finding_browsers(f, session_browser, browser_processes, all_tags)
                for f in per_image
            )
            row.append("Yes" if yes else "No")
        grid.append(tuple(row))
    return PresenceMatrix(rows=labels, columns=tuple(columns), cells=tuple(grid))
