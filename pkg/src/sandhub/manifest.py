"""Application manifests: the typed contract between authors, the hub, and the runner.

A manifest is a JSON document with a fixed schema:

    {
      "name": "...", "version": "1.0.0", "runtime": "python" | "r" | "javascript",
      "short_description": "...", "long_description": "...",
      "tags": ["..."],
      "source": {"inline": "..."} | {"url": "https://..."},
      "entry_point": {
        "function": "...", "returns": "html" | "file",
        "parameters": [{"name", "kind", "description", "default"?}, ...]
      }
    }

Validation collects *every* violation with its field path rather than
stopping at the first, so submission forms can anchor errors to fields.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Union

from .netpolicy import EXTERNAL_ORIGINS, origin_allowed


class Runtime(str, Enum):
    PYTHON = "python"
    R = "r"
    JAVASCRIPT = "javascript"


class ParamKind(str, Enum):
    PATH = "path"
    STRING = "string"
    INTEGER = "integer"
    FLOAT = "float"
    BOOLEAN = "boolean"


class ReturnKind(str, Enum):
    HTML = "html"
    FILE = "file"


# Neutral starting value when a parameter declares no default.
NEUTRAL_DEFAULTS = {
    ParamKind.PATH: "",
    ParamKind.STRING: "",
    ParamKind.INTEGER: 0,
    ParamKind.FLOAT: 0.0,
    ParamKind.BOOLEAN: False,
}

MAX_SHORT_DESCRIPTION = 280

_VERSION_RE = re.compile(r"^\d+(\.\d+)*$")
# Dots permitted: R function names routinely contain them.
_IDENTIFIER_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")

_TOP_LEVEL_KEYS = (
    "name",
    "version",
    "runtime",
    "short_description",
    "long_description",
    "tags",
    "source",
    "entry_point",
)


class MalformedDocument(Exception):
    """Input is not parseable as a structured document at all."""


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class ValidationReport:
    """Every rule the candidate document broke, with field paths."""

    violations: list[Violation] = field(default_factory=list)

    def add(self, path: str, message: str) -> None:
        self.violations.append(Violation(path, message))

    def paths(self) -> list[str]:
        return [v.path for v in self.violations]

    def __str__(self) -> str:
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class SourceRef:
    """Where the application code lives: inline text or a whitelisted URL."""

    inline: Optional[str] = None
    url: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.inline is None) == (self.url is None):
            raise ValueError("exactly one of inline/url must be set")


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    kind: ParamKind
    description: str
    default: Optional[object] = None


@dataclass(frozen=True)
class EntryPointSpec:
    function_name: str
    parameters: tuple[ParameterSpec, ...]
    return_kind: ReturnKind


@dataclass(frozen=True)
class ApplicationManifest:
    name: str
    version: str
    runtime: Runtime
    short_description: str
    long_description: str
    tags: frozenset[str]
    entry_point: EntryPointSpec
    source: SourceRef


def version_key(version: str) -> tuple[int, ...]:
    """Numeric segment-wise ordering key for dotted versions."""
    return tuple(int(part) for part in version.split("."))


def _check_str(value: Any, path: str, report: ValidationReport) -> Optional[str]:
    if not isinstance(value, str):
        report.add(path, f"expected a string, got {type(value).__name__}")
        return None
    return value


def _default_matches_kind(value: Any, kind: ParamKind) -> bool:
    if kind is ParamKind.BOOLEAN:
        return isinstance(value, bool)
    if kind is ParamKind.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind is ParamKind.FLOAT:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str)  # path and string defaults are strings


def _validate_parameter(
    raw: Any, path: str, report: ValidationReport
) -> Optional[ParameterSpec]:
    if not isinstance(raw, Mapping):
        report.add(path, f"expected an object, got {type(raw).__name__}")
        return None
    for key in set(raw) - {"name", "kind", "description", "default"}:
        report.add(f"{path}.{key}", "unknown key")
    for key in ("name", "kind", "description"):
        if key not in raw:
            report.add(f"{path}.{key}", "required key is missing")

    name = _check_str(raw["name"], f"{path}.name", report) if "name" in raw else None
    if name is not None and not _IDENTIFIER_RE.match(name):
        report.add(f"{path}.name", f"not a valid identifier: {name!r}")
        name = None

    kind: Optional[ParamKind] = None
    if "kind" in raw:
        kind_raw = raw["kind"]
        allowed = ", ".join(k.value for k in ParamKind)
        if not isinstance(kind_raw, str) or kind_raw not in ParamKind._value2member_map_:
            report.add(
                f"{path}.kind",
                f"kind must be one of the five permitted kinds: {allowed} (got {kind_raw!r})",
            )
        else:
            kind = ParamKind(kind_raw)

    description = _check_str(raw["description"], f"{path}.description", report) if "description" in raw else None

    default = raw.get("default")
    if "default" in raw and kind is not None:
        if not _default_matches_kind(default, kind):
            report.add(
                f"{path}.default",
                f"default {default!r} does not match kind {kind.value!r}",
            )
            default = None
        elif kind is ParamKind.FLOAT:
            default = float(default)

    if name is None or kind is None or description is None:
        return None
    return ParameterSpec(name=name, kind=kind, description=description, default=default if "default" in raw else None)


def _validate_entry_point(
    raw: Any, report: ValidationReport
) -> Optional[EntryPointSpec]:
    path = "entry_point"
    if not isinstance(raw, Mapping):
        report.add(path, f"expected an object, got {type(raw).__name__}")
        return None
    for key in set(raw) - {"function", "returns", "parameters"}:
        report.add(f"{path}.{key}", "unknown key")
    for key in ("function", "returns", "parameters"):
        if key not in raw:
            report.add(f"{path}.{key}", "required key is missing")

    function = _check_str(raw["function"], f"{path}.function", report) if "function" in raw else None
    if function is not None and not _IDENTIFIER_RE.match(function):
        report.add(f"{path}.function", f"not a valid identifier: {function!r}")
        function = None

    return_kind: Optional[ReturnKind] = None
    if "returns" in raw:
        returns_raw = raw["returns"]
        if not isinstance(returns_raw, str) or returns_raw not in ReturnKind._value2member_map_:
            report.add(
                f"{path}.returns",
                f"returns must be 'html' or 'file' (got {returns_raw!r})",
            )
        else:
            return_kind = ReturnKind(returns_raw)

    parameters: list[ParameterSpec] = []
    params_ok = True
    params_raw = raw.get("parameters")
    if "parameters" in raw:
        if not isinstance(params_raw, list):
            report.add(f"{path}.parameters", f"expected an array, got {type(params_raw).__name__}")
            params_ok = False
        else:
            seen: set[str] = set()
            for i, item in enumerate(params_raw):
                spec = _validate_parameter(item, f"{path}.parameters[{i}]", report)
                if spec is None:
                    params_ok = False
                    continue
                if spec.name in seen:
                    report.add(f"{path}.parameters[{i}].name", f"duplicate parameter name {spec.name!r}")
                    params_ok = False
                seen.add(spec.name)
                parameters.append(spec)
    else:
        params_ok = False

    if function is None or return_kind is None or not params_ok:
        return None
    return EntryPointSpec(
        function_name=function, parameters=tuple(parameters), return_kind=return_kind
    )


def _validate_source(
    raw: Any, allowed_origins: tuple[str, ...], report: ValidationReport
) -> Optional[SourceRef]:
    path = "source"
    if not isinstance(raw, Mapping):
        report.add(path, f"expected an object, got {type(raw).__name__}")
        return None
    for key in set(raw) - {"inline", "url"}:
        report.add(f"{path}.{key}", "unknown key")
    has_inline = "inline" in raw
    has_url = "url" in raw
    if has_inline == has_url:
        report.add(path, "exactly one of 'inline' or 'url' must be present")
        return None
    if has_inline:
        inline = _check_str(raw["inline"], f"{path}.inline", report)
        return SourceRef(inline=inline) if inline is not None else None
    url = _check_str(raw["url"], f"{path}.url", report)
    if url is None:
        return None
    if not origin_allowed(url, allowed_origins):
        report.add(
            f"{path}.url",
            f"origin of {url!r} is not on the distribution whitelist",
        )
        return None
    return SourceRef(url=url)


def validate_manifest(
    candidate: Any,
    allowed_origins: Iterable[str] | None = None,
) -> Union[ApplicationManifest, ValidationReport]:
    """Validate a parsed manifest document.

    Returns a fully-typed ApplicationManifest when every rule holds, otherwise
    a ValidationReport carrying every violation. The report is a value, not an
    exception. ``allowed_origins`` is the whitelist URL sources are checked
    against; it defaults to the fixed external origins.
    """
    origins = tuple(allowed_origins) if allowed_origins is not None else EXTERNAL_ORIGINS
    report = ValidationReport()
    if not isinstance(candidate, Mapping):
        report.add("$", f"expected an object, got {type(candidate).__name__}")
        return report

    for key in set(candidate) - set(_TOP_LEVEL_KEYS):
        report.add(key, "unknown top-level key")
    for key in _TOP_LEVEL_KEYS:
        if key not in candidate:
            report.add(key, "required key is missing")

    name = _check_str(candidate.get("name"), "name", report) if "name" in candidate else None
    if name is not None and not name.strip():
        report.add("name", "must be a non-empty string")
        name = None

    version = _check_str(candidate.get("version"), "version", report) if "version" in candidate else None
    if version is not None and not _VERSION_RE.match(version):
        report.add("version", f"must be dotted-numeric like '1.0.2' (got {version!r})")
        version = None

    runtime: Optional[Runtime] = None
    if "runtime" in candidate:
        runtime_raw = candidate.get("runtime")
        if not isinstance(runtime_raw, str) or runtime_raw not in Runtime._value2member_map_:
            report.add(
                "runtime",
                f"runtime must be one of: python, r, javascript (got {runtime_raw!r})",
            )
        else:
            runtime = Runtime(runtime_raw)

    short_description = (
        _check_str(candidate.get("short_description"), "short_description", report)
        if "short_description" in candidate
        else None
    )
    if short_description is not None and len(short_description) > MAX_SHORT_DESCRIPTION:
        report.add(
            "short_description",
            f"must be at most {MAX_SHORT_DESCRIPTION} characters (got {len(short_description)})",
        )
        short_description = None

    long_description = (
        _check_str(candidate.get("long_description"), "long_description", report)
        if "long_description" in candidate
        else None
    )

    tags: Optional[frozenset[str]] = None
    if "tags" in candidate:
        tags_raw = candidate.get("tags")
        if not isinstance(tags_raw, list):
            report.add("tags", f"expected an array, got {type(tags_raw).__name__}")
        else:
            collected: list[str] = []
            ok = True
            for i, tag in enumerate(tags_raw):
                if (
                    not isinstance(tag, str)
                    or not tag
                    or tag != tag.lower()
                    or any(c.isspace() for c in tag)
                ):
                    report.add(
                        f"tags[{i}]",
                        f"tags must be lowercase, non-empty, without whitespace (got {tag!r})",
                    )
                    ok = False
                elif tag in collected:
                    report.add(f"tags[{i}]", f"duplicate tag {tag!r}")
                    ok = False
                else:
                    collected.append(tag)
            if ok:
                tags = frozenset(collected)

    entry_point = (
        _validate_entry_point(candidate.get("entry_point"), report)
        if "entry_point" in candidate
        else None
    )
    source = (
        _validate_source(candidate.get("source"), origins, report)
        if "source" in candidate
        else None
    )

    if report.violations:
        return report
    assert (
        name is not None
        and version is not None
        and runtime is not None
        and short_description is not None
        and long_description is not None
        and tags is not None
        and entry_point is not None
        and source is not None
    )
    return ApplicationManifest(
        name=name,
        version=version,
        runtime=runtime,
        short_description=short_description,
        long_description=long_description,
        tags=tags,
        entry_point=entry_point,
        source=source,
    )


def parse_manifest(
    text: str | bytes, allowed_origins: Iterable[str] | None = None
) -> Union[ApplicationManifest, ValidationReport]:
    """Parse JSON text and validate it. Unparseable input raises MalformedDocument."""
    try:
        candidate = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    return validate_manifest(candidate, allowed_origins)


def serialize_manifest(manifest: ApplicationManifest) -> dict:
    """The manifest as a plain document; reparses to an equal manifest."""
    doc: dict[str, Any] = {
        "name": manifest.name,
        "version": manifest.version,
        "runtime": manifest.runtime.value,
        "short_description": manifest.short_description,
        "long_description": manifest.long_description,
        "tags": sorted(manifest.tags),
        "source": (
            {"inline": manifest.source.inline}
            if manifest.source.inline is not None
            else {"url": manifest.source.url}
        ),
        "entry_point": {
            "function": manifest.entry_point.function_name,
            "returns": manifest.entry_point.return_kind.value,
            "parameters": [
                {
                    "name": p.name,
                    "kind": p.kind.value,
                    "description": p.description,
                    **({"default": p.default} if p.default is not None else {}),
                }
                for p in manifest.entry_point.parameters
            ],
        },
    }
    return doc


def manifest_to_json(manifest: ApplicationManifest) -> str:
    return json.dumps(serialize_manifest(manifest), indent=2, sort_keys=False) + "\n"


# Definition-site patterns per runtime. A heuristic lint: textual presence of
# a definition introducing the entry-point name, never execution.
def _definition_patterns(runtime: Runtime, name: str) -> list[re.Pattern]:
    n = re.escape(name)
    if runtime is Runtime.PYTHON:
        return [re.compile(rf"^\s*(?:async\s+)?def\s+{n}\s*\(", re.MULTILINE)]
    if runtime is Runtime.R:
        return [
            re.compile(rf"^\s*`?{n}`?\s*(?:<<?-|=)\s*(?:function\s*\(|\\\()", re.MULTILINE),
            re.compile(rf"""assign\(\s*["']{n}["']\s*,\s*function""", re.MULTILINE),
        ]
    return [
        re.compile(rf"\bfunction\s+{n}\s*\("),
        re.compile(rf"\b(?:const|let|var)\s+{n}\s*=\s*(?:async\s+)?function\b"),
        re.compile(rf"\b(?:const|let|var)\s+{n}\s*=\s*(?:async\s*)?\([^)\n]*\)\s*=>"),
        re.compile(rf"\b(?:const|let|var)\s+{n}\s*=\s*(?:async\s+)?[\w$]+\s*=>"),
    ]


def entry_point_defined(manifest: ApplicationManifest, source_text: str) -> bool:
    """True when a runtime-appropriate definition of the entry point appears in the source."""
    patterns = _definition_patterns(manifest.runtime, manifest.entry_point.function_name)
    return any(p.search(source_text) for p in patterns)


def render_parameter_defaults(manifest: ApplicationManifest) -> list[tuple[str, object]]:
    """Initial form values: declared default, else the kind's neutral value."""
    return [
        (p.name, p.default if p.default is not None else NEUTRAL_DEFAULTS[p.kind])
        for p in manifest.entry_point.parameters
    ]
