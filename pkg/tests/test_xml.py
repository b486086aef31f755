"""Versions-document parsing: lifetimes, inheritance, availability views."""

import pytest
from hypothesis import given, strategies as st

from aalkit.apiversions import (
    dumps_lifetime_sidecar,
    loads_lifetime_sidecar,
    parse_api_versions,
    snapshot_at,
)
from aalkit.errors import XmlDocumentError
from aalkit.model import Lifetime, TypeName, class_ref, field_ref, method_ref

SERVICE_XML = """\
<api version="2">
\t<class name="android/app/Service" since="1">
\t\t<extends name="android/content/Context"/>
\t\t<implements name="android/content/ComponentCallbacks2" since="14"/>
\t\t<method name="&lt;init&gt;()V"/>
\t\t<method name="getString(I[Ljava/lang/Object;)Ljava/lang/String;"/>
\t\t<field name="START_STICKY" since="5" deprecated="30"/>
\t\t<field name="OLD_FLAG" removed="31"/>
\t</class>
</api>
"""


class TestParseApiVersions:
    def test_class_entry(self):
        model = parse_api_versions(SERVICE_XML)
        assert model.entries[class_ref("android.app.Service")] == Lifetime(since=1)

    def test_member_since_inherits_class(self):
        model = parse_api_versions(SERVICE_XML)
        assert model.entries[method_ref("android.app.Service", "<init>")].since == 1

    def test_member_own_since_and_deprecated(self):
        model = parse_api_versions(SERVICE_XML)
        life = model.entries[field_ref("android.app.Service", "START_STICKY")]
        assert life == Lifetime(since=5, deprecated=30)

    def test_removed_retained_in_raw_model(self):
        model = parse_api_versions(SERVICE_XML)
        life = model.entries[field_ref("android.app.Service", "OLD_FLAG")]
        assert life.removed == 31

    def test_descriptor_split_into_params(self):
        model = parse_api_versions(SERVICE_XML)
        api = method_ref(
            "android.app.Service",
            "getString",
            (TypeName("int"), TypeName("java.lang.Object", 1)),
        )
        assert api in model.entries

    def test_supertypes_kept_for_diagnostics_not_identities(self):
        model = parse_api_versions(SERVICE_XML)
        assert model.supertypes["android.app.Service"] == (
            "android.content.Context",
            "android.content.ComponentCallbacks2",
        )
        assert class_ref("android.content.Context") not in model.entries

    def test_nested_class_names(self):
        xml = '<api><class name="android/view/View$OnClickListener" since="1"/></api>'
        model = parse_api_versions(xml)
        assert class_ref("android.view.View$OnClickListener") in model.entries

    def test_clinit_dropped(self):
        xml = (
            '<api><class name="a/B" since="1">'
            '<method name="&lt;clinit&gt;()V"/></class></api>'
        )
        model = parse_api_versions(xml)
        assert list(model.entries) == [class_ref("a.B")]

    def test_synth_filter_on_by_default(self):
        xml = '<api><class name="a/B$$Lambda$1" since="1"/></api>'
        assert not parse_api_versions(xml).entries
        assert parse_api_versions(xml, filter_synth=False).entries

    def test_document_syntax_error(self):
        with pytest.raises(XmlDocumentError):
            parse_api_versions("<api><class></api>")

    def test_wrong_root(self):
        with pytest.raises(XmlDocumentError):
            parse_api_versions("<apis/>")

    def test_descriptor_error_carries_element_path(self):
        xml = '<api><class name="a/B" since="1"><method name="f(Q)V"/></class></api>'
        with pytest.raises(XmlDocumentError) as err:
            parse_api_versions(xml)
        assert "a/B" in str(err.value)
        assert "method" in str(err.value)

    def test_method_without_descriptor_rejected(self):
        xml = '<api><class name="a/B" since="1"><method name="f"/></class></api>'
        with pytest.raises(XmlDocumentError):
            parse_api_versions(xml)

    def test_non_integer_since(self):
        xml = '<api><class name="a/B" since="x"/></api>'
        with pytest.raises(XmlDocumentError):
            parse_api_versions(xml)


class TestSnapshotAt:
    def test_included_when_alive(self):
        model = parse_api_versions(SERVICE_XML)
        snap = snapshot_at(model, 33)
        assert field_ref("android.app.Service", "START_STICKY") in snap.apis

    def test_removed_excluded_at_later_level(self):
        model = parse_api_versions(SERVICE_XML)
        assert field_ref("android.app.Service", "OLD_FLAG") not in snapshot_at(model, 33).apis
        assert field_ref("android.app.Service", "OLD_FLAG") in snapshot_at(model, 30).apis

    def test_not_yet_introduced_excluded(self):
        model = parse_api_versions(SERVICE_XML)
        assert field_ref("android.app.Service", "START_STICKY") not in snapshot_at(model, 4).apis

    def test_deprecated_remains_included(self):
        model = parse_api_versions(SERVICE_XML)
        assert field_ref("android.app.Service", "START_STICKY") in snapshot_at(model, 31).apis

    def test_lifetime_sidecar_restricted_to_included(self):
        model = parse_api_versions(SERVICE_XML)
        snap = snapshot_at(model, 33)
        assert set(snap.lifetime) == set(snap.apis)

    def test_filtering_never_adds(self):
        model = parse_api_versions(SERVICE_XML)
        for level in (1, 5, 30, 31, 33):
            assert snapshot_at(model, level).apis <= model.apis

    @given(st.integers(1, 40), st.integers(1, 40))
    def test_monotonic_introduction(self, low, high):
        low, high = sorted((low, high))
        model = parse_api_versions(SERVICE_XML)
        # an API absent at `high` because since > high is absent at `low` too
        for api, life in model.entries.items():
            if life.since > high:
                assert api not in snapshot_at(model, low).apis


class TestLifetimeSidecar:
    def test_round_trip(self):
        snap = snapshot_at(parse_api_versions(SERVICE_XML), 30)
        text = dumps_lifetime_sidecar(snap)
        assert loads_lifetime_sidecar(text) == dict(snap.lifetime)

    def test_fields_rendered_only_when_present(self):
        snap = snapshot_at(parse_api_versions(SERVICE_XML), 30)
        text = dumps_lifetime_sidecar(snap)
        line = next(l for l in text.splitlines() if "OLD_FLAG" in l)
        assert line.endswith("since=1,removed=31")
        line = next(l for l in text.splitlines() if "<init>" in l)
        assert line.endswith("since=1")
