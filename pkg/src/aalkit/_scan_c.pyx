# cython: language_level=3
"""Compiled signature-scanning kernel.

Twin of ``aalkit._scan_py`` with typed inner loops; behaviour (results and
error messages) must match the pure-Python module exactly. Keep the two in
lockstep when editing either.
"""

IMPLEMENTATION = "cython"

cdef dict _PRIMITIVE_CODES = {
    "Z": "boolean",
    "B": "byte",
    "C": "char",
    "S": "short",
    "I": "int",
    "J": "long",
    "F": "float",
    "D": "double",
    "V": "void",
}


cdef tuple _scan_type(str desc, Py_ssize_t pos, Py_ssize_t n):
    cdef Py_ssize_t i = pos
    cdef Py_ssize_t dims, j
    cdef str c, prim
    while i < n and desc[i] == "[":
        i += 1
    dims = i - pos
    if i >= n:
        raise ValueError("truncated descriptor %r at %d" % (desc, i))
    c = desc[i]
    if c == "L":
        j = desc.find(";", i + 1)
        if j < 0:
            raise ValueError("unterminated class descriptor %r at %d" % (desc, i))
        if j == i + 1:
            raise ValueError("empty class name in descriptor %r at %d" % (desc, i + 1))
        return desc[i + 1 : j].replace("/", "."), dims, j + 1
    prim = _PRIMITIVE_CODES.get(c)
    if prim is None:
        raise ValueError("unknown type code %r in descriptor %r at %d" % (c, desc, i))
    if prim == "void" and dims:
        raise ValueError("array of void in descriptor %r at %d" % (desc, pos))
    return prim, dims, i + 1


def parse_field_desc(str desc):
    """Decode a single JVM field descriptor into a (base, dims) pair."""
    cdef Py_ssize_t n = len(desc)
    base, dims, end = _scan_type(desc, 0, n)
    if end != n:
        raise ValueError("trailing characters in descriptor %r at %d" % (desc, end))
    return base, dims


def parse_method_desc(str desc):
    """Decode a JVM method descriptor into ((param, ...), return_type)."""
    cdef Py_ssize_t n = len(desc)
    cdef Py_ssize_t i
    cdef list params
    if n == 0 or desc[0] != "(":
        raise ValueError("method descriptor %r does not start with '('" % (desc,))
    params = []
    i = 1
    while True:
        if i >= n:
            raise ValueError("unterminated parameter list in descriptor %r" % (desc,))
        if desc[i] == ")":
            i += 1
            break
        base, dims, i = _scan_type(desc, i, n)
        if base == "void":
            raise ValueError("void parameter in descriptor %r" % (desc,))
        params.append((base, dims))
    ret, dims, end = _scan_type(desc, i, n)
    if end != n:
        raise ValueError("trailing characters in descriptor %r at %d" % (desc, end))
    return tuple(params), (ret, dims)


def parse_member_sig(str sig):
    """Split a JNI member signature into (kind, class, member, params).

    ``kind`` is ``"F"`` or ``"M"``. Field signatures look like
    ``Lpkg/Cls;->NAME:I`` and methods like ``Lpkg/Cls;->name(I)V``; params
    is ``None`` for fields, a tuple of (base, dims) pairs for methods. The
    field type and method return type are validated but not returned: they
    are not part of the API identity.
    """
    cdef Py_ssize_t sep, paren, colon
    cdef str class_name, rest, name
    sep = sig.find(";->")
    if sep < 0:
        raise ValueError("missing ';->' separator in signature %r" % (sig,))
    if sig[0] != "L":
        raise ValueError("signature %r does not start with a class descriptor" % (sig,))
    if sep == 1:
        raise ValueError("empty class name in signature %r" % (sig,))
    class_name = sig[1:sep].replace("/", ".")
    rest = sig[sep + 3 :]
    paren = rest.find("(")
    if paren >= 0:
        name = rest[:paren]
        if not name:
            raise ValueError("empty member name in signature %r" % (sig,))
        params, _ret = parse_method_desc(rest[paren:])
        return "M", class_name, name, params
    colon = rest.find(":")
    if colon < 0:
        raise ValueError("field signature %r has no ':' type separator" % (sig,))
    name = rest[:colon]
    if not name:
        raise ValueError("empty member name in signature %r" % (sig,))
    parse_field_desc(rest[colon + 1 :])
    return "F", class_name, name, None
