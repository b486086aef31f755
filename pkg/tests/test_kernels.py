"""The two scanning kernels must be indistinguishable, errors included."""

import pytest
from hypothesis import given, strategies as st

from aalkit import _scan_py

try:
    from aalkit import _scan_c
except ImportError:
    _scan_c = None


class TestFieldDescriptors:
    def test_primitives(self, kernel):
        assert kernel.parse_field_desc("I") == ("int", 0)
        assert kernel.parse_field_desc("Z") == ("boolean", 0)
        assert kernel.parse_field_desc("V") == ("void", 0)

    def test_reference(self, kernel):
        assert kernel.parse_field_desc("Ljava/lang/String;") == ("java.lang.String", 0)

    def test_nested_dollar_preserved(self, kernel):
        base, dims = kernel.parse_field_desc("Landroid/view/View$OnClickListener;")
        assert base == "android.view.View$OnClickListener"
        assert dims == 0

    def test_arrays(self, kernel):
        assert kernel.parse_field_desc("[[B") == ("byte", 2)
        assert kernel.parse_field_desc("[Ljava/lang/Object;") == ("java.lang.Object", 1)

    @pytest.mark.parametrize(
        "bad",
        ["", "L", "Lfoo", "L;", "X", "I garbage", "II", "[V", "[", "Ljava/lang/String;X"],
    )
    def test_rejects(self, kernel, bad):
        with pytest.raises(ValueError):
            kernel.parse_field_desc(bad)


class TestMethodDescriptors:
    def test_empty(self, kernel):
        assert kernel.parse_method_desc("()V") == ((), ("void", 0))

    def test_mixed(self, kernel):
        params, ret = kernel.parse_method_desc("(I[Ljava/lang/Object;)Ljava/lang/String;")
        assert params == (("int", 0), ("java.lang.Object", 1))
        assert ret == ("java.lang.String", 0)

    @pytest.mark.parametrize("bad", ["", "I", "(", "(I", "()", "(V)V", "()VX"])
    def test_rejects(self, kernel, bad):
        with pytest.raises(ValueError):
            kernel.parse_method_desc(bad)


class TestMemberSignatures:
    def test_field(self, kernel):
        got = kernel.parse_member_sig("Landroid/content/Context;->MODE_WORLD_READABLE:I")
        assert got == ("F", "android.content.Context", "MODE_WORLD_READABLE", None)

    def test_method(self, kernel):
        got = kernel.parse_member_sig("Landroid/app/Activity;->canStartActivityForResult()Z")
        assert got == ("M", "android.app.Activity", "canStartActivityForResult", ())

    def test_method_params(self, kernel):
        got = kernel.parse_member_sig("La/B;->f(I[Ljava/lang/String;)V")
        assert got == ("M", "a.B", "f", (("int", 0), ("java.lang.String", 1)))

    @pytest.mark.parametrize(
        "bad",
        [
            "",
            "a.B->f:I",
            "La/B;f:I",
            "La/B;->:I",
            "La/B;->f",
            "La/B;->f(I",
            "L;->f:I",
            "La/B;->f:Q",
        ],
    )
    def test_rejects(self, kernel, bad):
        with pytest.raises(ValueError):
            kernel.parse_member_sig(bad)


_segment = st.text(
    alphabet="abcXYZ09$_", min_size=1, max_size=6
)
_class_desc = st.builds(
    lambda segs: "L" + "/".join(segs) + ";",
    st.lists(_segment, min_size=1, max_size=3),
)
valid_type = st.builds(
    lambda dims, core: "[" * dims + core,
    st.integers(0, 3),
    st.one_of(st.sampled_from(list("ZBCSIJFD")), _class_desc),
)
any_text = st.text(
    alphabet="[LZBCSIJFDV;/$()->:x", max_size=24
)


@pytest.mark.skipif(_scan_c is None, reason="compiled kernel not built")
class TestParity:
    """Outcome equivalence of the compiled and fallback kernels."""

    @staticmethod
    def _outcome(fn, arg):
        try:
            return ("ok", fn(arg))
        except ValueError as exc:
            return ("err", str(exc))

    @given(valid_type)
    def test_valid_field_descs(self, desc):
        assert _scan_py.parse_field_desc(desc) == _scan_c.parse_field_desc(desc)

    @given(any_text)
    def test_field_desc_outcomes(self, text):
        assert self._outcome(_scan_py.parse_field_desc, text) == self._outcome(
            _scan_c.parse_field_desc, text
        )

    @given(st.lists(valid_type, max_size=4), valid_type)
    def test_valid_method_descs(self, params, ret):
        desc = "(" + "".join(p for p in params if not p.endswith("V")) + ")" + ret
        assert _scan_py.parse_method_desc(desc) == _scan_c.parse_method_desc(desc)

    @given(any_text)
    def test_method_desc_outcomes(self, text):
        assert self._outcome(_scan_py.parse_method_desc, text) == self._outcome(
            _scan_c.parse_method_desc, text
        )

    @given(any_text)
    def test_member_sig_outcomes(self, text):
        assert self._outcome(_scan_py.parse_member_sig, text) == self._outcome(
            _scan_c.parse_member_sig, text
        )
