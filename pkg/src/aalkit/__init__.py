"""aalkit: one canonical model over the official Android API list files.

Four list formats ship with the platform or SDK and each records a
different slice of the API surface: stub archives (``android.jar``), the
versions database (``api-versions.xml``), signature text (``current.txt``),
and restriction-flag lists (``hiddenapi-flags.csv``). This package parses
all of them into a single erased-identity model, compares lists across
sources and releases, checks them against on-device inventories, and
classifies APK usage against any union of lists.
"""

from aalkit.model import (
    AalSnapshot,
    ApiRef,
    Kind,
    Lifetime,
    NamespaceCategory,
    PolicyCategory,
    RestrictionPolicy,
    SourceKind,
    SynthesizedFilter,
    TypeName,
    canonical_format,
    class_ref,
    field_ref,
    is_synthesized,
    jni_method_params,
    jni_type_to_typename,
    method_ref,
    namespace_category,
    parse_canonical_line,
)

__version__ = "0.1.0"

__all__ = [
    "AalSnapshot",
    "ApiRef",
    "Kind",
    "Lifetime",
    "NamespaceCategory",
    "PolicyCategory",
    "RestrictionPolicy",
    "SourceKind",
    "SynthesizedFilter",
    "TypeName",
    "canonical_format",
    "class_ref",
    "field_ref",
    "is_synthesized",
    "jni_method_params",
    "jni_type_to_typename",
    "method_ref",
    "namespace_category",
    "parse_canonical_line",
    "__version__",
]
