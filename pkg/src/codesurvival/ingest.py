"""Load version snapshots from disk and digest them into comparable form.

A corpus is an ordered list of version snapshots (directories or tar
archives prepared externally, one per release).  Scanning a version
produces, per extension group, the list of file records (basename,
relative path, content digest) and the set of unique line digests
pooled across all files of the group.  Duplicate lines are discarded;
a line is the exact byte content after CRLF normalization, with no
whitespace trimming and no special treatment of comments.

Lines and file contents are represented by fixed-width digests so that
corpora with billions of lines stay tractable.  The digest algorithm is
stamped into every store file header; loading a store written with a
different algorithm is refused rather than silently comparing
incompatible sets.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
import re
import tarfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence
from urllib.parse import quote, unquote

from .errors import (
    DigestMismatchError,
    DuplicateVersionError,
    ManifestError,
    MissingSourceError,
    StoreFormatError,
)

__all__ = [
    "DEFAULT_DIGEST",
    "DIGEST_ALGORITHMS",
    "ExtensionGroup",
    "VersionEntry",
    "CorpusManifest",
    "FileRecord",
    "GroupPayload",
    "VersionSnapshot",
    "load_manifest",
    "normalize_lines",
    "scan_version",
    "scan_corpus",
    "store_snapshot",
    "load_snapshot",
    "store_ordinals",
    "load_all_snapshots",
]

STORE_FORMAT_VERSION = 1

_TAR_SUFFIXES = (".tar", ".tar.gz", ".tgz", ".tar.bz2", ".tar.xz")
_GROUP_NAME_RE = re.compile(r"^[A-Za-z0-9_+.-]+$")


def _blake2b_128(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=16).digest()


def _sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


#: Registered digest algorithms; all are at least 128 bits wide.
DIGEST_ALGORITHMS: Mapping[str, Callable[[bytes], bytes]] = {
    "blake2b-128": _blake2b_128,
    "sha256": _sha256,
}

DEFAULT_DIGEST = "blake2b-128"


def _digest_fn(algorithm: str) -> Callable[[bytes], bytes]:
    try:
        return DIGEST_ALGORITHMS[algorithm]
    except KeyError:
        raise DigestMismatchError(
            f"unknown digest algorithm {algorithm!r}; known: {sorted(DIGEST_ALGORITHMS)}"
        ) from None


@dataclass(frozen=True)
class ExtensionGroup:
    """A named set of filename suffixes, e.g. ("cpp", (".cpp",)).

    Suffix matching is case sensitive.  When several groups could match
    one filename (".h" vs ".inc.h"), the longest matching suffix wins,
    so a file contributes to at most one group.
    """

    name: str
    extensions: tuple[str, ...]

    def __post_init__(self) -> None:
        if not _GROUP_NAME_RE.match(self.name):
            raise ManifestError(f"invalid group name {self.name!r}")
        object.__setattr__(self, "extensions", tuple(self.extensions))
        if not self.extensions:
            raise ManifestError(f"group {self.name!r} has no extensions")
        if len(set(self.extensions)) != len(self.extensions):
            raise ManifestError(f"group {self.name!r} has duplicate extensions")
        for ext in self.extensions:
            if not ext.startswith("."):
                raise ManifestError(
                    f"group {self.name!r}: extension {ext!r} must include the leading dot"
                )


def _check_groups_disjoint(groups: Sequence[ExtensionGroup]) -> None:
    seen: dict[str, str] = {}
    names = set()
    for group in groups:
        if group.name in names:
            raise ManifestError(f"duplicate group name {group.name!r}")
        names.add(group.name)
        for ext in group.extensions:
            if ext in seen:
                raise ManifestError(
                    f"extension {ext!r} appears in groups {seen[ext]!r} and {group.name!r}"
                )
            seen[ext] = group.name


@dataclass(frozen=True)
class VersionEntry:
    label: str
    ordinal: int
    source: Path
    release_date: datetime.date | None = None


@dataclass(frozen=True)
class CorpusManifest:
    software: str
    versions: tuple[VersionEntry, ...]
    groups: tuple[ExtensionGroup, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "versions", tuple(self.versions))
        object.__setattr__(self, "groups", tuple(self.groups))
        labels = [v.label for v in self.versions]
        for label in labels:
            if labels.count(label) > 1:
                raise DuplicateVersionError(f"duplicate version label {label!r}")
        for i, version in enumerate(self.versions):
            if version.ordinal != i:
                raise ManifestError(
                    f"ordinals must be contiguous from 0; version {version.label!r} "
                    f"has ordinal {version.ordinal} at position {i}"
                )
        _check_groups_disjoint(self.groups)


@dataclass(frozen=True)
class FileRecord:
    """One file of a snapshot: basename, root-relative path, content digest."""

    basename: str
    relpath: str
    content_digest: bytes

    def __post_init__(self) -> None:
        if self.relpath.split("/")[-1] != self.basename:
            raise ValueError(f"basename {self.basename!r} does not end {self.relpath!r}")


@dataclass(frozen=True)
class GroupPayload:
    """Digested content of one extension group within one version."""

    files: tuple[FileRecord, ...]
    uloc: frozenset[bytes]
    skipped_files: int = 0

    @property
    def uloc_count(self) -> int:
        return len(self.uloc)

    @property
    def file_count(self) -> int:
        return len(self.files)


@dataclass(frozen=True)
class VersionSnapshot:
    """Immutable digested content of one software version."""

    version_label: str
    ordinal: int
    digest_algorithm: str
    groups: Mapping[str, GroupPayload] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", dict(self.groups))

    def group(self, name: str) -> GroupPayload:
        try:
            return self.groups[name]
        except KeyError:
            raise KeyError(
                f"snapshot {self.version_label!r} has no group {name!r}; "
                f"available: {sorted(self.groups)}"
            ) from None


def load_manifest(path: str | Path) -> CorpusManifest:
    """Parse and validate a corpus manifest (JSON).

    Schema: ``{"software": str, "groups": [{"name": str, "extensions":
    [".ext", ...]}, ...], "versions": [{"label": str, "path": str,
    "date": "YYYY-MM-DD"?}, ...]}``.  Version paths are resolved
    relative to the manifest's directory; each must exist.  Ordinals are
    assigned in listed order.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ManifestError(f"cannot parse manifest {path}: {exc}") from exc
    for key in ("software", "groups", "versions"):
        if key not in raw:
            raise ManifestError(f"manifest {path} is missing field {key!r}")

    try:
        groups = tuple(
            ExtensionGroup(name=g["name"], extensions=tuple(g["extensions"]))
            for g in raw["groups"]
        )
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"manifest {path}: malformed group entry ({exc})") from exc

    base = path.parent
    versions = []
    for i, entry in enumerate(raw["versions"]):
        try:
            label = entry["label"]
            source = Path(entry["path"])
        except (KeyError, TypeError) as exc:
            raise ManifestError(f"manifest {path}: malformed version entry {i} ({exc})") from exc
        if not source.is_absolute():
            source = base / source
        date = None
        if entry.get("date") is not None:
            try:
                date = datetime.date.fromisoformat(entry["date"])
            except ValueError as exc:
                raise ManifestError(
                    f"manifest {path}: version {label!r} has invalid date {entry['date']!r}"
                ) from exc
        if not (source.is_dir() or (source.is_file() and _is_tar(source))):
            raise MissingSourceError(
                f"version {label!r}: snapshot source {source} does not exist "
                "(expected a directory or tar archive)"
            )
        versions.append(VersionEntry(label=label, ordinal=i, source=source, release_date=date))
    return CorpusManifest(software=raw["software"], versions=tuple(versions), groups=groups)


def _is_tar(path: Path) -> bool:
    return any(path.name.endswith(suffix) for suffix in _TAR_SUFFIXES)


def normalize_lines(data: bytes, algorithm: str = DEFAULT_DIGEST) -> list[bytes]:
    """Split raw bytes into line digests.

    Content is split on LF; one trailing CR per line is removed, so CRLF
    and LF files digest identically.  A trailing final newline adds no
    empty line, and a missing final newline changes nothing.  No other
    normalization is applied; non-UTF-8 bytes are digested as-is.
    """
    digest = _digest_fn(algorithm)
    if not data:
        return []
    lines = data.split(b"\n")
    if lines[-1] == b"":
        lines.pop()
    return [digest(line[:-1] if line.endswith(b"\r") else line) for line in lines]


def _match_group(name: str, groups: Sequence[ExtensionGroup]) -> ExtensionGroup | None:
    best: ExtensionGroup | None = None
    best_len = 0
    for group in groups:
        for ext in group.extensions:
            if name.endswith(ext) and len(ext) > best_len:
                best = group
                best_len = len(ext)
    return best


def _walk_directory(source: Path) -> Iterator[tuple[str, Callable[[], bytes]]]:
    for root, dirnames, filenames in os.walk(source, followlinks=False):
        dirnames.sort()
        for filename in sorted(filenames):
            full = Path(root) / filename
            if full.is_symlink() or not full.is_file():
                continue
            rel = full.relative_to(source).as_posix()
            yield rel, full.read_bytes


def _walk_tar(source: Path) -> Iterator[tuple[str, Callable[[], bytes]]]:
    with tarfile.open(source) as tar:
        members = sorted(
            (m for m in tar.getmembers() if m.isreg()), key=lambda m: m.name
        )
        for member in members:
            rel = member.name.lstrip("./")
            fileobj = tar.extractfile(member)
            if fileobj is None:
                continue
            data = fileobj.read()
            yield rel, (lambda d=data: d)


def scan_version(
    source: str | Path,
    groups: Sequence[ExtensionGroup],
    *,
    label: str | None = None,
    ordinal: int = 0,
    algorithm: str = DEFAULT_DIGEST,
) -> VersionSnapshot:
    """Digest one version directory (or tar archive) into a snapshot.

    Every regular file whose name ends with a group suffix is digested
    into that group; symbolic links are not followed.  The group's uloc
    set pools the line digests of all its files, so duplicate lines
    within or across files collapse to one member.  Unreadable files are
    skipped and counted per group; a missing source is a hard error.
    """
    source = Path(source)
    _check_groups_disjoint(groups)
    digest = _digest_fn(algorithm)
    if source.is_dir():
        walker = _walk_directory(source)
    elif source.is_file() and _is_tar(source):
        walker = _walk_tar(source)
    else:
        raise MissingSourceError(f"snapshot source {source} does not exist")

    files: dict[str, list[FileRecord]] = {g.name: [] for g in groups}
    uloc: dict[str, set[bytes]] = {g.name: set() for g in groups}
    skipped: dict[str, int] = {g.name: 0 for g in groups}

    for relpath, read in walker:
        basename = relpath.split("/")[-1]
        group = _match_group(basename, groups)
        if group is None:
            continue
        try:
            data = read()
        except OSError:
            skipped[group.name] += 1
            continue
        files[group.name].append(
            FileRecord(basename=basename, relpath=relpath, content_digest=digest(data))
        )
        uloc[group.name].update(normalize_lines(data, algorithm))

    payloads = {
        g.name: GroupPayload(
            files=tuple(sorted(files[g.name], key=lambda r: r.relpath)),
            uloc=frozenset(uloc[g.name]),
            skipped_files=skipped[g.name],
        )
        for g in groups
    }
    return VersionSnapshot(
        version_label=label if label is not None else source.name,
        ordinal=ordinal,
        digest_algorithm=algorithm,
        groups=payloads,
    )


def scan_corpus(
    manifest: CorpusManifest,
    store: str | Path | None = None,
    *,
    algorithm: str = DEFAULT_DIGEST,
) -> Iterator[VersionSnapshot]:
    """Scan every version of a manifest in order, optionally persisting.

    Yields each snapshot as it is completed so callers can report
    per-version counts without holding the whole corpus in memory.
    """
    for entry in manifest.versions:
        snapshot = scan_version(
            entry.source,
            manifest.groups,
            label=entry.label,
            ordinal=entry.ordinal,
            algorithm=algorithm,
        )
        if store is not None:
            store_snapshot(snapshot, store)
        yield snapshot


# --- snapshot store -------------------------------------------------------
#
# One newline-delimited text file per version per group:
#   H <format> <algorithm> <ordinal> <label> <group> <skipped>
#   F <basename> <relpath> <content_digest_hex>     (sorted by relpath)
#   L <line_digest_hex>                             (sorted by hex)
# Basename, relpath and label are percent-encoded so embedded spaces
# cannot break the record format.


def _store_filename(ordinal: int, group: str) -> str:
    return f"{ordinal:05d}_{group}.snap"


def store_snapshot(snapshot: VersionSnapshot, store: str | Path) -> None:
    """Write one snapshot to the store directory, one file per group.

    The write order is canonical (files by relpath, line digests by hex
    value), so re-scanning an unchanged corpus reproduces the store byte
    for byte.
    """
    store = Path(store)
    store.mkdir(parents=True, exist_ok=True)
    for group_name in sorted(snapshot.groups):
        payload = snapshot.groups[group_name]
        out: list[str] = [
            "H {} {} {} {} {} {}".format(
                STORE_FORMAT_VERSION,
                snapshot.digest_algorithm,
                snapshot.ordinal,
                quote(snapshot.version_label, safe=""),
                group_name,
                payload.skipped_files,
            )
        ]
        for record in payload.files:
            out.append(
                f"F {quote(record.basename, safe='')} "
                f"{quote(record.relpath, safe='/')} {record.content_digest.hex()}"
            )
        out.extend(f"L {h}" for h in sorted(d.hex() for d in payload.uloc))
        out.append("")
        (store / _store_filename(snapshot.ordinal, group_name)).write_text(
            "\n".join(out), encoding="utf-8"
        )


def _parse_store_file(path: Path, algorithm: str | None) -> tuple[str, int, str, str, GroupPayload]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("H "):
        raise StoreFormatError(f"{path}: missing header line")
    header = lines[0].split(" ")
    if len(header) != 7:
        raise StoreFormatError(f"{path}: malformed header {lines[0]!r}")
    _, fmt, algo, ordinal, label, group, skipped = header
    if int(fmt) != STORE_FORMAT_VERSION:
        raise StoreFormatError(f"{path}: unsupported store format version {fmt}")
    if algorithm is not None and algo != algorithm:
        raise DigestMismatchError(
            f"{path}: store uses digest {algo!r} but {algorithm!r} was requested"
        )
    files: list[FileRecord] = []
    uloc: set[bytes] = set()
    for line in lines[1:]:
        if line.startswith("F "):
            parts = line.split(" ")
            if len(parts) != 4:
                raise StoreFormatError(f"{path}: malformed file record {line!r}")
            files.append(
                FileRecord(
                    basename=unquote(parts[1]),
                    relpath=unquote(parts[2]),
                    content_digest=bytes.fromhex(parts[3]),
                )
            )
        elif line.startswith("L "):
            uloc.add(bytes.fromhex(line[2:]))
        elif line:
            raise StoreFormatError(f"{path}: unknown record {line!r}")
    payload = GroupPayload(files=tuple(files), uloc=frozenset(uloc), skipped_files=int(skipped))
    return algo, int(ordinal), unquote(label), group, payload


def load_snapshot(
    store: str | Path, ordinal: int, *, algorithm: str | None = None
) -> VersionSnapshot:
    """Load one version (all groups) back from the store.

    Passing ``algorithm`` enforces that the store was written with that
    digest; a mismatch is a hard error so digests from different
    algorithms are never intersected.
    """
    store = Path(store)
    paths = sorted(store.glob(f"{ordinal:05d}_*.snap"))
    if not paths:
        raise StoreFormatError(f"store {store} has no snapshot for ordinal {ordinal}")
    groups: dict[str, GroupPayload] = {}
    label = ""
    algo = ""
    for path in paths:
        algo, ord_, label, group, payload = _parse_store_file(path, algorithm)
        if ord_ != ordinal:
            raise StoreFormatError(f"{path}: header ordinal {ord_} != filename ordinal {ordinal}")
        groups[group] = payload
    return VersionSnapshot(
        version_label=label, ordinal=ordinal, digest_algorithm=algo, groups=groups
    )


def store_ordinals(store: str | Path) -> list[int]:
    """Sorted list of version ordinals present in a store directory."""
    store = Path(store)
    return sorted({int(p.name.split("_", 1)[0]) for p in store.glob("*.snap")})


def load_all_snapshots(
    store: str | Path, *, algorithm: str | None = None
) -> list[VersionSnapshot]:
    """Load every version in the store, ordered by ordinal."""
    return [load_snapshot(store, o, algorithm=algorithm) for o in store_ordinals(store)]
