"""Canonical Android API identity model.

Every list format the toolkit reads (signature text, restriction-flag CSV,
api-versions XML, compiled archives, DEX tables, device dumps) is reduced
to the same three identities:

* a class, named by its binary name (dotted packages, ``$`` between nested
  parts: ``android.view.View$OnClickListener``);
* a field, identified by declaring class and name;
* a method, identified by declaring class, name, and the ordered list of
  *erased* parameter types. The return type is deliberately not part of
  the identity, matching how runtime reflection looks members up.

Constructors are methods named ``<init>``. Class initializers
(``<clinit>``) are compiler artifacts and are never stored in snapshots.

The module also owns the text interchange format (one line per API,
bytewise sortable), JNI descriptor decoding, package-prefix
categorization, and the heuristics for compiler-synthesized member names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from aalkit import _scan
from aalkit.errors import MalformedDescriptorError, MalformedLineError

PRIMITIVE_NAMES = frozenset(
    ("boolean", "byte", "char", "short", "int", "long", "float", "double", "void")
)

VISIBILITIES = ("public", "protected", "package", "private")

# Class-name segments may contain '$' (nested/anonymous classes) but none of
# the characters that carry structure in descriptors or canonical lines.
_SEGMENT = r"[^\s./,()\[\]<>]+"
_CLASS_NAME_RE = re.compile(rf"{_SEGMENT}(?:\.{_SEGMENT})*\Z")
_MEMBER_NAME_RE = re.compile(r"[^\s.,()\[\]<>]+\Z")
_SPECIAL_METHODS = ("<init>", "<clinit>")


class Kind(Enum):
    """API variant; the value is the canonical line's leading letter."""

    CLASS = "C"
    FIELD = "F"
    METHOD = "M"


class SourceKind(Enum):
    """Which list format a snapshot was extracted from."""

    JAR = "JAR"
    XML = "XML"
    TXT = "TXT"
    CSV = "CSV"
    DEVICE = "DEVICE"


class NamespaceCategory(Enum):
    ANDROID_CORE = "android-core"
    JDK = "jdk"
    APACHE_HTTP = "apache-http"
    KHRONOS = "khronos"
    TEST = "test"
    INTERNAL = "internal"
    ANDROIDX_SUPPORT = "androidx-support"
    OTHER = "other"


def is_valid_class_name(name: str) -> bool:
    return bool(_CLASS_NAME_RE.match(name))


@dataclass(frozen=True, slots=True)
class TypeName:
    """A canonical erased type: primitive or class base plus array dims."""

    base: str
    dims: int = 0

    def __post_init__(self):
        if self.dims < 0:
            raise ValueError(f"negative array dimensions: {self.dims}")
        if self.base == "void":
            if self.dims:
                raise ValueError("void cannot be an array")
        elif self.base not in PRIMITIVE_NAMES and not is_valid_class_name(self.base):
            raise ValueError(f"invalid type name: {self.base!r}")

    @property
    def is_primitive(self) -> bool:
        return self.base in PRIMITIVE_NAMES

    def __str__(self) -> str:
        return self.base + "[]" * self.dims

    @classmethod
    def from_text(cls, text: str) -> "TypeName":
        """Parse canonical text such as ``java.lang.Object[]``."""
        dims = 0
        while text.endswith("[]"):
            text = text[:-2]
            dims += 1
        return cls(text, dims)


@dataclass(frozen=True, slots=True)
class ApiRef:
    """One API identity: a class, a field, or a method."""

    kind: Kind
    class_name: str
    member: str = ""
    params: tuple[TypeName, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not is_valid_class_name(self.class_name):
            raise ValueError(f"invalid class name: {self.class_name!r}")
        if self.kind is Kind.CLASS:
            if self.member or self.params:
                raise ValueError("class refs carry no member or params")
        elif self.member in _SPECIAL_METHODS:
            if self.kind is not Kind.METHOD:
                raise ValueError(f"{self.member} is a method name")
        else:
            if not _MEMBER_NAME_RE.match(self.member):
                raise ValueError(f"invalid member name: {self.member!r}")
            if self.kind is Kind.FIELD and self.params:
                raise ValueError("field refs carry no params")

    @property
    def short_class_name(self) -> str:
        return self.class_name.rsplit(".", 1)[-1]

    def __lt__(self, other: "ApiRef") -> bool:
        return canonical_format(self) < canonical_format(other)

    def __le__(self, other: "ApiRef") -> bool:
        return canonical_format(self) <= canonical_format(other)

    def __gt__(self, other: "ApiRef") -> bool:
        return canonical_format(self) > canonical_format(other)

    def __ge__(self, other: "ApiRef") -> bool:
        return canonical_format(self) >= canonical_format(other)


def class_ref(class_name: str) -> ApiRef:
    return ApiRef(Kind.CLASS, class_name)


def field_ref(class_name: str, name: str) -> ApiRef:
    return ApiRef(Kind.FIELD, class_name, name)


def method_ref(class_name: str, name: str, params: Iterable[TypeName] = ()) -> ApiRef:
    return ApiRef(Kind.METHOD, class_name, name, tuple(params))


def canonical_format(api: ApiRef) -> str:
    """Render one API as its canonical line (no trailing whitespace)."""
    if api.kind is Kind.CLASS:
        return f"C {api.class_name}"
    if api.kind is Kind.FIELD:
        return f"F {api.class_name} {api.member}"
    joined = ",".join(str(t) for t in api.params)
    return f"M {api.class_name} {api.member} ({joined})"


def parse_canonical_line(line: str) -> ApiRef:
    """Inverse of :func:`canonical_format`; rejects anything else.

    Raises :class:`MalformedLineError` carrying the line and a 1-based
    column of the offending part.
    """
    if not line or line.startswith("#"):
        raise MalformedLineError("empty or comment line", line)
    tokens = line.split(" ")
    if any(t == "" for t in tokens):
        col = len(" ".join(tokens[: tokens.index("") + 1])) + 1
        raise MalformedLineError("stray or repeated space", line, col)
    head = tokens[0]
    try:
        if head == "C":
            if len(tokens) != 2:
                raise MalformedLineError("expected 'C <class>'", line)
            return class_ref(tokens[1])
        if head == "F":
            if len(tokens) != 3:
                raise MalformedLineError("expected 'F <class> <name>'", line)
            return field_ref(tokens[1], tokens[2])
        if head == "M":
            if len(tokens) != 4:
                raise MalformedLineError("expected 'M <class> <name> (<params>)'", line)
            plist = tokens[3]
            if not (plist.startswith("(") and plist.endswith(")")):
                col = line.rindex(plist) + 1
                raise MalformedLineError("parameter list must be parenthesized", line, col)
            inner = plist[1:-1]
            params = []
            if inner:
                offset = line.rindex(plist) + 1
                for tok in inner.split(","):
                    if not tok:
                        raise MalformedLineError("empty type token", line, offset + 1)
                    try:
                        params.append(TypeName.from_text(tok))
                    except ValueError as exc:
                        raise MalformedLineError(str(exc), line, offset + 1) from None
                    offset += len(tok) + 1
            return method_ref(tokens[1], tokens[2], params)
    except ValueError as exc:
        raise MalformedLineError(str(exc), line) from None
    raise MalformedLineError(f"unknown record kind {head!r}", line)


@lru_cache(maxsize=65536)
def jni_type_to_typename(desc: str) -> TypeName:
    """Convert a JNI field descriptor (``[Ljava/lang/String;``) to a TypeName."""
    try:
        base, dims = _scan.parse_field_desc(desc)
        return TypeName(base, dims)
    except ValueError as exc:
        raise MalformedDescriptorError(str(exc), desc) from None


@lru_cache(maxsize=65536)
def jni_method_descriptor(desc: str) -> tuple[tuple[TypeName, ...], TypeName]:
    """Convert a JNI method descriptor to (parameter types, return type)."""
    try:
        raw_params, (ret_base, ret_dims) = _scan.parse_method_desc(desc)
        params = tuple(TypeName(b, d) for b, d in raw_params)
        return params, TypeName(ret_base, ret_dims)
    except ValueError as exc:
        raise MalformedDescriptorError(str(exc), desc) from None


def jni_method_params(desc: str) -> tuple[TypeName, ...]:
    return jni_method_descriptor(desc)[0]


_CATEGORY_PREFIXES = (
    (("android.test.", "junit."), NamespaceCategory.TEST),
    (("com.android.internal.",), NamespaceCategory.INTERNAL),
    (("androidx.", "android.support."), NamespaceCategory.ANDROIDX_SUPPORT),
    (("android.",), NamespaceCategory.ANDROID_CORE),
    (("javax.microedition.khronos.",), NamespaceCategory.KHRONOS),
    (("java.", "javax."), NamespaceCategory.JDK),
    (("org.apache.http.",), NamespaceCategory.APACHE_HTTP),
)


def namespace_category(class_name: str) -> NamespaceCategory:
    """Categorize a class by package prefix; first matching rule wins."""
    for prefixes, category in _CATEGORY_PREFIXES:
        if class_name.startswith(prefixes):
            return category
    return NamespaceCategory.OTHER


# Compiler-synthesized member naming patterns. The lambda patterns cover the
# javac metafactory names (lambda$outer$0), desugared lambda classes
# (-$$Lambda$Cls$hash / Cls$$Lambda$17), and the D8 ExternalSyntheticLambda0
# style, where some '$'-separated segment ends in Lambda<digits>.
_LAMBDA_CONTAINS_RE = re.compile(r"\$\$Lambda\$\d+")
_LAMBDA_SEGMENT_RE = re.compile(r"(?:^|\$)[^$]*Lambda\d+(?=\$|$)")
_ACCESSOR_RE = re.compile(r"access\$\d+\Z")


class SynthesizedFilter:
    """Predicate for compiler-generated API names.

    The default rules match class initializers, lambda artifacts, and
    synthetic accessors; extra regular expressions may be supplied and are
    tested against both the class short name and the member name.
    """

    def __init__(self, extra_patterns: Iterable[str] = ()):
        self.extra = tuple(re.compile(p) for p in extra_patterns)

    @staticmethod
    def _lambda_named(name: str) -> bool:
        return bool(_LAMBDA_CONTAINS_RE.search(name) or _LAMBDA_SEGMENT_RE.search(name))

    def __call__(self, api: ApiRef) -> bool:
        short = api.short_class_name
        if self._lambda_named(short):
            return True
        if api.kind is Kind.METHOD:
            if api.member == "<clinit>":
                return True
            if api.member.startswith("lambda$") or self._lambda_named(api.member):
                return True
        if api.kind is not Kind.CLASS and _ACCESSOR_RE.match(api.member):
            return True
        for pattern in self.extra:
            if pattern.search(short) or (api.member and pattern.search(api.member)):
                return True
        return False


_DEFAULT_SYNTH_FILTER = SynthesizedFilter()


def is_synthesized(api: ApiRef) -> bool:
    """True for APIs whose names mark them as compiler-generated."""
    return _DEFAULT_SYNTH_FILTER(api)


class PolicyCategory(Enum):
    PUBLIC = "public"
    CONDITIONALLY_BLOCKED = "conditionally-blocked"
    BLOCKED = "blocked"
    UNSUPPORTED = "unsupported"
    OTHER = "other"


@dataclass(frozen=True)
class RestrictionPolicy:
    """The set of restriction flags attached to one API in a CSV list."""

    flags: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "flags", frozenset(self.flags))

    @property
    def category(self) -> PolicyCategory:
        # First matching rule wins; unknown flag vocabularies fall to OTHER.
        if "public-api" in self.flags or "sdk" in self.flags:
            return PolicyCategory.PUBLIC
        if any(f.startswith("max-target-") for f in self.flags):
            return PolicyCategory.CONDITIONALLY_BLOCKED
        if "blocked" in self.flags or "blacklist" in self.flags:
            return PolicyCategory.BLOCKED
        if "unsupported" in self.flags or "greylist" in self.flags:
            return PolicyCategory.UNSUPPORTED
        return PolicyCategory.OTHER


@dataclass(frozen=True)
class Lifetime:
    """API-level lifetime recorded by the versions list."""

    since: int
    deprecated: int | None = None
    removed: int | None = None

    def __post_init__(self):
        if self.since < 1:
            raise ValueError(f"since must be >= 1, got {self.since}")
        if self.deprecated is not None and self.deprecated < self.since:
            raise ValueError("deprecated level precedes since")
        if self.removed is not None and self.removed < self.since:
            raise ValueError("removed level precedes since")


@dataclass(frozen=True)
class AalSnapshot:
    """One API list at one API level.

    ``apis`` is the identity set; the three sidecar maps carry per-API
    metadata that only some sources provide (policies for CSV, lifetimes
    for XML, visibility for JAR and device dumps). Instances are immutable
    and safe to share.
    """

    kind: SourceKind
    api_level: int
    apis: frozenset[ApiRef]
    policy: Mapping[ApiRef, RestrictionPolicy] = field(default_factory=dict)
    lifetime: Mapping[ApiRef, Lifetime] = field(default_factory=dict)
    visibility: Mapping[ApiRef, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "apis", frozenset(self.apis))
        if self.api_level < 1:
            raise ValueError(f"api_level must be >= 1, got {self.api_level}")
        for api in self.apis:
            if api.member == "<clinit>":
                raise ValueError("snapshots never contain <clinit> methods")
        for name, sidecar in (
            ("policy", self.policy),
            ("lifetime", self.lifetime),
            ("visibility", self.visibility),
        ):
            for key in sidecar:
                if key not in self.apis:
                    raise ValueError(f"{name} key {canonical_format(key)!r} not in apis")
        for value in self.visibility.values():
            if value not in VISIBILITIES:
                raise ValueError(f"invalid visibility {value!r}")

    def refs_of(self, kind: Kind) -> frozenset[ApiRef]:
        return frozenset(a for a in self.apis if a.kind is kind)

    @property
    def classes(self) -> frozenset[ApiRef]:
        return self.refs_of(Kind.CLASS)

    @property
    def fields(self) -> frozenset[ApiRef]:
        return self.refs_of(Kind.FIELD)

    @property
    def methods(self) -> frozenset[ApiRef]:
        return self.refs_of(Kind.METHOD)

    def counts(self) -> dict[Kind, int]:
        out = {k: 0 for k in Kind}
        for api in self.apis:
            out[api.kind] += 1
        return out

    def sorted_lines(self) -> Iterator[str]:
        """Canonical lines in bytewise order (UTF-8 order == code point order)."""
        return iter(sorted(canonical_format(a) for a in self.apis))
