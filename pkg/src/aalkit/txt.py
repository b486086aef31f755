"""Parser for signature text lists (the ``current.txt`` family).

These files record *source-level* declarations: generic types, wildcards,
varargs, nullability marks, and nested classes written with dots. To make
the result comparable with bytecode-derived lists, every parameter type is
erased on the way in:

* type arguments (``<...>``) are deleted at every nesting depth;
* a bare identifier bound by a type-parameter declaration becomes its
  bound (first bound of an intersection), an unbounded one becomes
  ``java.lang.Object``;
* ``...`` adds one trailing array dimension;
* nullability suffixes and ``@Annotation`` marks are dropped;
* simple names are expanded: known ``java.lang`` types first, then nested
  classes of the enclosing class, then classes declared elsewhere in the
  file; anything still unresolved is kept verbatim and reported in the
  diagnostics list.

Nested class names (``Notification.Builder``) normalize to binary form
(``Notification$Builder``). Dotted references to classes not declared in
the file fall back to a case heuristic: nesting starts at the first
capitalized segment.

The grammar is line oriented: ``package NAME {`` blocks containing class
headers (``class``/``interface``/``enum``/``@interface``, all recorded
plainly as classes) whose bodies hold one ``ctor``/``method``/``field``/
``enum_constant`` declaration per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from aalkit.errors import TxtSyntaxError, UnknownMemberKeywordError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    PRIMITIVE_NAMES,
    SourceKind,
    SynthesizedFilter,
    TypeName,
    class_ref,
    field_ref,
    method_ref,
)

_PUNCT = frozenset("<>(){};,=@&")
_QUOTES = frozenset("\"'")

_MODIFIER_WORDS = frozenset(
    (
        "public",
        "protected",
        "private",
        "abstract",
        "static",
        "final",
        "native",
        "synchronized",
        "strictfp",
        "transient",
        "volatile",
        "default",
        "deprecated",
        "sealed",
        "non-sealed",
        "open",
        "operator",
        "inline",
        "infix",
        "suspend",
    )
)

_CLASS_KEYWORDS = frozenset(("class", "interface", "enum"))
_MEMBER_KEYWORDS = frozenset(("ctor", "method", "field", "enum_constant"))

# Simple names that signature files leave unqualified because java.lang is
# implicit. Kept to the types that actually occur in framework signatures.
_JAVA_LANG_SIMPLE = frozenset(
    (
        "Appendable",
        "ArithmeticException",
        "ArrayIndexOutOfBoundsException",
        "AssertionError",
        "AutoCloseable",
        "Boolean",
        "Byte",
        "CharSequence",
        "Character",
        "Class",
        "ClassCastException",
        "ClassLoader",
        "ClassNotFoundException",
        "CloneNotSupportedException",
        "Cloneable",
        "Comparable",
        "Deprecated",
        "Double",
        "Enum",
        "Error",
        "Exception",
        "Float",
        "FunctionalInterface",
        "IllegalAccessException",
        "IllegalArgumentException",
        "IllegalStateException",
        "IndexOutOfBoundsException",
        "InstantiationException",
        "Integer",
        "InterruptedException",
        "Iterable",
        "Long",
        "Math",
        "NoSuchFieldException",
        "NoSuchMethodException",
        "NullPointerException",
        "Number",
        "NumberFormatException",
        "Object",
        "Override",
        "Package",
        "Process",
        "ProcessBuilder",
        "Readable",
        "Runnable",
        "Runtime",
        "RuntimeException",
        "SafeVarargs",
        "SecurityException",
        "SecurityManager",
        "Short",
        "StackOverflowError",
        "StackTraceElement",
        "StrictMath",
        "String",
        "StringBuffer",
        "StringBuilder",
        "SuppressWarnings",
        "System",
        "Thread",
        "ThreadGroup",
        "ThreadLocal",
        "Throwable",
        "UnsupportedOperationException",
        "Void",
    )
)


@dataclass
class _Token:
    kind: str  # WORD | PUNCT | STR
    text: str
    col: int


def _lex_line(text: str, line_no: int) -> list[_Token]:
    """Tokenize one line; strips // comments outside string literals."""
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            break
        if c in _QUOTES:
            j = i + 1
            while j < n and text[j] != c:
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise TxtSyntaxError("unterminated literal", line_no, i + 1)
            tokens.append(_Token("STR", text[i : j + 1], i + 1))
            i = j + 1
            continue
        if c in _PUNCT:
            tokens.append(_Token("PUNCT", c, i + 1))
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _PUNCT and text[j] not in _QUOTES:
            j += 1
        tokens.append(_Token("WORD", text[i:j], i + 1))
        i = j
    return tokens


def _strip_type_suffixes(word: str) -> tuple[str, int]:
    """Remove [] / ... / nullability suffixes, counting array dims."""
    dims = 0
    while True:
        if word.endswith("[]"):
            word = word[:-2]
            dims += 1
        elif word.endswith("..."):
            word = word[:-3]
            dims += 1
        elif word and word[-1] in "?!":
            word = word[:-1]
        else:
            return word, dims


def _only_suffix_chars(word: str) -> bool:
    return bool(word) and all(c in "[].?!" for c in word)


def _uppercase_nesting(dotted: str) -> str:
    """Binary name for a dotted reference: nesting starts at the first
    capitalized segment (``java.util.Map.Entry`` -> ``java.util.Map$Entry``)."""
    segments = dotted.split(".")
    for i, seg in enumerate(segments):
        if seg[:1].isupper():
            head = segments[: i + 1]
            tail = segments[i + 1 :]
            return ".".join(head) + ("$" + "$".join(tail) if tail else "")
    return dotted


class _TxtParser:
    def __init__(self, diagnostics: list[str] | None):
        self.diagnostics = diagnostics
        self.package: str | None = None
        self.class_binary: str | None = None
        self.class_bounds: dict[str, TypeName] = {}
        self.apis: set[ApiRef] = set()
        # source-dotted name -> binary name, across the whole file
        self.index: dict[str, str] = {}
        self.packages: set[str] = set()
        self.binaries: set[str] = set()

    def _diag(self, message: str) -> None:
        if self.diagnostics is not None:
            self.diagnostics.append(message)

    # ---- first pass: declared-class index -------------------------------

    def scan_declarations(self, lines: list[str]) -> None:
        # Over-approximating is harmless here: the index only answers
        # lookups; malformed lines are reported by the second pass.
        package = None
        for line_no, raw in enumerate(lines, 1):
            try:
                tokens = _lex_line(raw, line_no)
                if not tokens:
                    continue
                if tokens[0].text == "package" and tokens[0].kind == "WORD":
                    package = self._package_name(tokens, line_no)
                    self.packages.add(package)
                elif tokens[-1].kind == "PUNCT" and tokens[-1].text == "{" and package:
                    parsed = self._try_header_name(tokens, line_no)
                    if parsed is not None:
                        dotted = f"{package}.{parsed}"
                        self.index[dotted] = f"{package}.{parsed.replace('.', '$')}"
                        self.binaries.add(self.index[dotted])
            except TxtSyntaxError:
                continue

    def _package_name(self, tokens: list[_Token], line_no: int) -> str:
        i = self._skip_annotations_and_modifiers(tokens, 1, line_no)
        if i >= len(tokens) or tokens[i].kind != "WORD":
            raise TxtSyntaxError("package name expected", line_no, tokens[-1].col)
        return tokens[i].text

    def _try_header_name(self, tokens: list[_Token], line_no: int) -> str | None:
        """Class path of a class-like header line, or None if not one."""
        i = self._skip_annotations_and_modifiers(tokens, 0, line_no, stop_at_interface=True)
        if i >= len(tokens):
            return None
        tok = tokens[i]
        if tok.kind == "PUNCT" and tok.text == "@":
            if i + 1 < len(tokens) and tokens[i + 1].text == "interface":
                i += 2
            else:
                return None
        elif tok.kind == "WORD" and tok.text in _CLASS_KEYWORDS:
            i += 1
        else:
            return None
        if i >= len(tokens) or tokens[i].kind != "WORD":
            return None
        return tokens[i].text

    # ---- shared token helpers -------------------------------------------

    def _skip_annotations_and_modifiers(
        self,
        tokens: list[_Token],
        i: int,
        line_no: int,
        stop_at_interface: bool = False,
    ) -> int:
        n = len(tokens)
        while i < n:
            tok = tokens[i]
            if tok.kind == "PUNCT" and tok.text == "@":
                if stop_at_interface and i + 1 < n and tokens[i + 1].text == "interface":
                    return i
                i = self._skip_annotation(tokens, i, line_no)
            elif tok.kind == "WORD" and tok.text in _MODIFIER_WORDS:
                i += 1
            else:
                return i
        return i

    def _skip_annotation(self, tokens: list[_Token], i: int, line_no: int) -> int:
        # tokens[i] is '@'
        n = len(tokens)
        if i + 1 >= n or tokens[i + 1].kind != "WORD":
            raise TxtSyntaxError("annotation name expected after '@'", line_no, tokens[i].col)
        i += 2
        if i < n and tokens[i].kind == "PUNCT" and tokens[i].text == "(":
            depth = 0
            while i < n:
                t = tokens[i].text
                if tokens[i].kind == "PUNCT" and t == "(":
                    depth += 1
                elif tokens[i].kind == "PUNCT" and t == ")":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                i += 1
            raise TxtSyntaxError("unbalanced '(' in annotation", line_no, tokens[-1].col)
        return i

    def _skip_angles(self, tokens: list[_Token], i: int, line_no: int) -> int:
        # tokens[i] is '<'
        depth = 0
        n = len(tokens)
        while i < n:
            if tokens[i].kind == "PUNCT":
                if tokens[i].text == "<":
                    depth += 1
                elif tokens[i].text == ">":
                    depth -= 1
                    if depth == 0:
                        return i + 1
            i += 1
        raise TxtSyntaxError("unbalanced '<' in type", line_no, tokens[-1].col)

    def _read_type(
        self, tokens: list[_Token], i: int, line_no: int
    ) -> tuple[str, int, int]:
        """Consume one source type expression; return (name, dims, next_i)."""
        n = len(tokens)
        i = self._skip_annotations_and_modifiers(tokens, i, line_no)
        if i >= n or tokens[i].kind != "WORD":
            col = tokens[min(i, n - 1)].col if tokens else 1
            raise TxtSyntaxError("type expected", line_no, col)
        name, dims = _strip_type_suffixes(tokens[i].text)
        if not name:
            raise TxtSyntaxError("type expected", line_no, tokens[i].col)
        i += 1
        while i < n:
            tok = tokens[i]
            if tok.kind == "PUNCT" and tok.text == "<":
                i = self._skip_angles(tokens, i, line_no)
                # Outer<Arg>.Inner continuation
                if (
                    i < n
                    and tokens[i].kind == "WORD"
                    and tokens[i].text.startswith(".")
                ):
                    cont, extra = _strip_type_suffixes(tokens[i].text)
                    name += cont
                    dims += extra
                    i += 1
            elif tok.kind == "WORD" and _only_suffix_chars(tok.text):
                _, extra = _strip_type_suffixes(tok.text)
                dims += extra
                i += 1
            else:
                break
        return name, dims, i

    # ---- erasure resolution ----------------------------------------------

    def _resolve(
        self,
        name: str,
        dims: int,
        scopes: tuple[Mapping[str, TypeName], ...],
        line_no: int,
    ) -> TypeName:
        if name in PRIMITIVE_NAMES:
            return TypeName(name, dims)
        if "." in name:
            binary = self.index.get(name)
            if binary is None:
                binary = _uppercase_nesting(name)
            return TypeName(binary, dims)
        for scope in scopes:
            bound = scope.get(name)
            if bound is not None:
                return TypeName(bound.base, bound.dims + dims)
        if name in _JAVA_LANG_SIMPLE:
            return TypeName(f"java.lang.{name}", dims)
        if self.class_binary:
            prefix = self.class_binary
            while prefix:
                candidate = f"{prefix}${name}"
                if candidate in self.binaries:
                    return TypeName(candidate, dims)
                prefix, _, _ = prefix.rpartition("$")
        candidates = []
        if self.package:
            candidates.append(self.package)
        candidates.extend(sorted(self.packages - {self.package or ""}))
        for pkg in candidates:
            binary = self.index.get(f"{pkg}.{name}")
            if binary is not None:
                return TypeName(binary, dims)
        self._diag(f"line {line_no}: unresolved type name {name!r} kept verbatim")
        return TypeName(name, dims)

    def _parse_type_params(
        self,
        tokens: list[_Token],
        i: int,
        outer: tuple[Mapping[str, TypeName], ...],
        line_no: int,
    ) -> tuple[dict[str, TypeName], int]:
        """Parse ``<T, U extends Bound & Extra>`` into a bounds map."""
        bounds: dict[str, TypeName] = {}
        n = len(tokens)
        i += 1  # consume '<'
        while True:
            if i >= n:
                raise TxtSyntaxError("unbalanced '<' in type parameters", line_no, tokens[-1].col)
            i = self._skip_annotations_and_modifiers(tokens, i, line_no)
            if i >= n or tokens[i].kind != "WORD":
                raise TxtSyntaxError("type parameter name expected", line_no, tokens[min(i, n - 1)].col)
            param = tokens[i].text
            i += 1
            if i < n and tokens[i].kind == "WORD" and tokens[i].text == "extends":
                name, dims, i = self._read_type(tokens, i + 1, line_no)
                bounds[param] = self._resolve(name, dims, (bounds,) + outer, line_no)
                while i < n and tokens[i].kind == "PUNCT" and tokens[i].text == "&":
                    _, _, i = self._read_type(tokens, i + 1, line_no)
            else:
                bounds[param] = TypeName("java.lang.Object")
            if i >= n:
                raise TxtSyntaxError("unbalanced '<' in type parameters", line_no, tokens[-1].col)
            if tokens[i].kind == "PUNCT" and tokens[i].text == ",":
                i += 1
                continue
            if tokens[i].kind == "PUNCT" and tokens[i].text == ">":
                return bounds, i + 1
            raise TxtSyntaxError(
                f"',' or '>' expected in type parameters, got {tokens[i].text!r}",
                line_no,
                tokens[i].col,
            )

    def _parse_params(
        self,
        tokens: list[_Token],
        i: int,
        scopes: tuple[Mapping[str, TypeName], ...],
        line_no: int,
    ) -> tuple[list[TypeName], int]:
        """Parse a parenthesized parameter-type list; tokens[i] is '('."""
        n = len(tokens)
        params: list[TypeName] = []
        i += 1
        while True:
            if i >= n:
                raise TxtSyntaxError("unbalanced '(' in parameter list", line_no, tokens[-1].col)
            if tokens[i].kind == "PUNCT" and tokens[i].text == ")":
                return params, i + 1
            name, dims, i = self._read_type(tokens, i, line_no)
            # tolerate an optional parameter name after the type
            if i < n and tokens[i].kind == "WORD" and not _only_suffix_chars(tokens[i].text):
                i += 1
            params.append(self._resolve(name, dims, scopes, line_no))
            if i < n and tokens[i].kind == "PUNCT" and tokens[i].text == ",":
                i += 1
                continue
            if i < n and tokens[i].kind == "PUNCT" and tokens[i].text == ")":
                return params, i + 1
            col = tokens[min(i, n - 1)].col
            raise TxtSyntaxError("',' or ')' expected in parameter list", line_no, col)

    # ---- second pass: declarations ---------------------------------------

    def feed(self, tokens: list[_Token], line_no: int) -> None:
        if not tokens:
            return
        first, last = tokens[0], tokens[-1]
        if first.kind == "PUNCT" and first.text == "}" and len(tokens) == 1:
            if self.class_binary is not None:
                self.class_binary = None
                self.class_bounds = {}
            elif self.package is not None:
                self.package = None
            else:
                raise TxtSyntaxError("stray '}'", line_no, first.col)
            return
        if self.package is None:
            if first.kind == "WORD" and first.text == "package":
                if not (last.kind == "PUNCT" and last.text == "{"):
                    raise TxtSyntaxError("'{' expected at end of package line", line_no, last.col)
                self.package = self._package_name(tokens, line_no)
                return
            raise TxtSyntaxError(f"package declaration expected, got {first.text!r}", line_no, first.col)
        if self.class_binary is None:
            self._parse_class_header(tokens, line_no)
            return
        self._parse_member(tokens, line_no)

    def _parse_class_header(self, tokens: list[_Token], line_no: int) -> None:
        last = tokens[-1]
        if not (last.kind == "PUNCT" and last.text == "{"):
            raise TxtSyntaxError("'{' expected at end of class header", line_no, last.col)
        i = self._skip_annotations_and_modifiers(tokens, 0, line_no, stop_at_interface=True)
        n = len(tokens)
        if i < n and tokens[i].kind == "PUNCT" and tokens[i].text == "@":
            if i + 1 >= n or tokens[i + 1].text != "interface":
                raise TxtSyntaxError("class keyword expected", line_no, tokens[i].col)
            i += 2
        elif i < n and tokens[i].kind == "WORD" and tokens[i].text in _CLASS_KEYWORDS:
            i += 1
        else:
            col = tokens[min(i, n - 1)].col
            raise TxtSyntaxError("class keyword expected", line_no, col)
        if i >= n or tokens[i].kind != "WORD":
            raise TxtSyntaxError("class name expected", line_no, tokens[min(i, n - 1)].col)
        path = tokens[i].text
        i += 1
        self.class_binary = f"{self.package}.{path.replace('.', '$')}"
        self.class_bounds = {}
        if i < n and tokens[i].kind == "PUNCT" and tokens[i].text == "<":
            self.class_bounds, i = self._parse_type_params(tokens, i, (), line_no)
        # extends/implements clauses carry no identities; skip to '{'
        self.apis.add(class_ref(self.class_binary))

    def _parse_member(self, tokens: list[_Token], line_no: int) -> None:
        first, last = tokens[0], tokens[-1]
        if first.kind != "WORD" or first.text not in _MEMBER_KEYWORDS:
            raise UnknownMemberKeywordError(
                f"unknown member keyword {first.text!r}", line_no, first.col
            )
        if not (last.kind == "PUNCT" and last.text == ";"):
            raise TxtSyntaxError("';' expected at end of declaration", line_no, last.col)
        keyword = first.text
        i = self._skip_annotations_and_modifiers(tokens, 1, line_no)
        n = len(tokens)
        method_bounds: dict[str, TypeName] = {}
        scopes: tuple[Mapping[str, TypeName], ...] = (self.class_bounds,)
        if keyword in ("ctor", "method") and i < n and tokens[i].kind == "PUNCT" and tokens[i].text == "<":
            method_bounds, i = self._parse_type_params(tokens, i, scopes, line_no)
            scopes = (method_bounds, self.class_bounds)

        assert self.class_binary is not None
        if keyword == "ctor":
            # constructor name repeats the class path; skip it
            if i >= n or tokens[i].kind != "WORD":
                raise TxtSyntaxError("constructor name expected", line_no, tokens[min(i, n - 1)].col)
            i += 1
            if i >= n or tokens[i].text != "(":
                raise TxtSyntaxError("'(' expected after constructor name", line_no, tokens[min(i, n - 1)].col)
            params, i = self._parse_params(tokens, i, scopes, line_no)
            self._add(method_ref(self.class_binary, "<init>", params), line_no)
            return
        if keyword == "method":
            _, _, i = self._read_type(tokens, i, line_no)  # return type, not identity
            if i >= n or tokens[i].kind != "WORD":
                raise TxtSyntaxError("method name expected", line_no, tokens[min(i, n - 1)].col)
            name = tokens[i].text
            i += 1
            if i >= n or tokens[i].text != "(":
                raise TxtSyntaxError("'(' expected after method name", line_no, tokens[min(i, n - 1)].col)
            params, i = self._parse_params(tokens, i, scopes, line_no)
            self._add(method_ref(self.class_binary, name, params), line_no)
            return
        # field / enum_constant: one type expression then the name; a bare
        # name with no type occurs in minimal vintages of enum constants.
        start = i
        type_name, _, i = self._read_type(tokens, i, line_no)
        if i < n and tokens[i].kind == "WORD":
            name = tokens[i].text
            i += 1
        elif "." not in type_name and tokens[start].text == type_name:
            name = type_name
        else:
            raise TxtSyntaxError("field name expected", line_no, tokens[min(i, n - 1)].col)
        self._add(field_ref(self.class_binary, name), line_no)

    def _add(self, api: ApiRef, line_no: int) -> None:
        self.apis.add(api)


def parse_txt(
    source: str | IO[str],
    level: int,
    filter_synth: bool = True,
    extra_synth_patterns: Iterable[str] = (),
    diagnostics: list[str] | None = None,
) -> AalSnapshot:
    """Parse a signature text file into a snapshot at ``level``."""
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    parser = _TxtParser(diagnostics)
    parser.scan_declarations(lines)
    for line_no, raw in enumerate(lines, 1):
        tokens = _lex_line(raw, line_no)
        try:
            parser.feed(tokens, line_no)
        except ValueError as exc:  # invalid identity built from parsed parts
            raise TxtSyntaxError(str(exc), line_no) from None
    if parser.package is not None or parser.class_binary is not None:
        raise TxtSyntaxError("unexpected end of file: unclosed block", len(lines))
    apis = parser.apis
    if filter_synth:
        synth = SynthesizedFilter(extra_synth_patterns)
        apis = {a for a in apis if not synth(a)}
    return AalSnapshot(kind=SourceKind.TXT, api_level=level, apis=frozenset(apis))


def erase_type(
    src: str,
    bounds: Mapping[str, TypeName] | None = None,
    diagnostics: list[str] | None = None,
) -> TypeName:
    """Erase one source-level type expression to its canonical type.

    ``bounds`` maps in-scope type-parameter names to their erased bounds.
    Raises :class:`TxtSyntaxError` for unbalanced generics.
    """
    parser = _TxtParser(diagnostics)
    tokens = _lex_line(src, 1)
    name, dims, i = parser._read_type(tokens, 0, 1)
    if i != len(tokens):
        raise TxtSyntaxError("trailing tokens after type", 1, tokens[i].col)
    return parser._resolve(name, dims, (dict(bounds or {}),), 1)
