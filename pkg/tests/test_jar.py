"""Archive-level extraction: entry selection, diagnostics, visibility."""

import io
import zipfile

import pytest

import classfile_builder as cb
from aalkit.errors import ArchiveError
from aalkit.jar import parse_archive
from aalkit.model import Kind, class_ref, field_ref, method_ref


def make_jar(entries: dict[str, bytes]) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as z:
        for name, data in entries.items():
            z.writestr(name, data)
    return buf.getvalue()


SERVICE = cb.build_class(
    "android/app/Service",
    fields=[("START_STICKY", "I", cb.ACC_PUBLIC | cb.ACC_STATIC | cb.ACC_FINAL)],
    methods=[
        ("getApplication", "()Landroid/app/Application;", cb.ACC_PUBLIC),
        ("onBind", "(Landroid/content/Intent;)Landroid/os/IBinder;", cb.ACC_PUBLIC),
    ],
)


class TestParseArchive:
    def test_service_stub_counts(self):
        snap = parse_archive(make_jar({"android/app/Service.class": SERVICE}), 33)
        assert len(snap.classes) == 1
        assert len(snap.fields) == 1
        assert len(snap.methods) == 2

    def test_memberless_interface(self):
        empty = cb.build_class(
            "java/io/Serializable",
            access=cb.ACC_PUBLIC | cb.ACC_INTERFACE | cb.ACC_ABSTRACT,
        )
        snap = parse_archive(make_jar({"java/io/Serializable.class": empty}), 33)
        assert snap.apis == frozenset({class_ref("java.io.Serializable")})

    def test_empty_archive(self):
        snap = parse_archive(make_jar({}), 33)
        assert snap.apis == frozenset()

    def test_meta_inf_and_resources_ignored(self):
        snap = parse_archive(
            make_jar(
                {
                    "META-INF/MANIFEST.MF": b"Manifest-Version: 1.0\n",
                    "META-INF/services/x.class": b"not really",
                    "res/icon.png": b"\x89PNG",
                    "android/app/Service.class": SERVICE,
                }
            ),
            33,
        )
        assert len(snap.classes) == 1

    def test_nested_classes_are_own_entries(self):
        inner = cb.build_class(
            "a/Outer$Inner", methods=[("poke", "()V", cb.ACC_PUBLIC)]
        )
        outer = cb.build_class("a/Outer")
        snap = parse_archive(
            make_jar({"a/Outer.class": outer, "a/Outer$Inner.class": inner}), 33
        )
        assert class_ref("a.Outer") in snap.apis
        assert class_ref("a.Outer$Inner") in snap.apis
        assert method_ref("a.Outer$Inner", "poke") in snap.apis

    def test_corrupt_entry_collected_not_fatal(self):
        diagnostics = []
        snap = parse_archive(
            make_jar({"bad.class": b"junk", "android/app/Service.class": SERVICE}),
            33,
            diagnostics=diagnostics,
        )
        assert len(snap.classes) == 1
        assert any("bad.class" in d for d in diagnostics)

    def test_class_count_equals_parsed_entries(self):
        entries = {
            f"p/C{i}.class": cb.build_class(f"p/C{i}", methods=[("m", "()V", 1)])
            for i in range(7)
        }
        snap = parse_archive(make_jar(entries), 33)
        assert len(snap.classes) == 7

    def test_every_member_class_present(self):
        snap = parse_archive(make_jar({"android/app/Service.class": SERVICE}), 33)
        classes = {c.class_name for c in snap.classes}
        for api in snap.apis:
            if api.kind is not Kind.CLASS:
                assert api.class_name in classes

    def test_default_constructor_not_suppressed(self):
        stub = cb.build_class("a/Plain", methods=[("<init>", "()V", cb.ACC_PUBLIC)])
        snap = parse_archive(make_jar({"a/Plain.class": stub}), 33)
        assert method_ref("a.Plain", "<init>") in snap.apis

    def test_visibility_sidecar(self):
        stub = cb.build_class(
            "a/Mix",
            fields=[
                ("PUB", "I", cb.ACC_PUBLIC),
                ("PROT", "I", cb.ACC_PROTECTED),
                ("PRIV", "I", cb.ACC_PRIVATE),
                ("PKG", "I", 0),
            ],
        )
        snap = parse_archive(make_jar({"a/Mix.class": stub}), 33)
        vis = {api.member: v for api, v in snap.visibility.items() if api.member}
        assert vis == {
            "PUB": "public",
            "PROT": "protected",
            "PRIV": "private",
            "PKG": "package",
        }

    def test_synth_filter_drops_lambda_class(self):
        lam = cb.build_class(
            "a/B$$Lambda$7", methods=[("run", "()V", cb.ACC_PUBLIC | cb.ACC_SYNTHETIC)]
        )
        jar = make_jar({"a/B$$Lambda$7.class": lam})
        assert parse_archive(jar, 33).apis == frozenset()
        kept = parse_archive(jar, 33, filter_synth=False)
        assert class_ref("a.B$$Lambda$7") in kept.apis

    def test_not_a_zip(self):
        with pytest.raises(ArchiveError):
            parse_archive(b"definitely not a zip", 33)

    def test_deterministic_across_entry_insert_order(self):
        a = make_jar({"a/A.class": cb.build_class("a/A"), "a/B.class": cb.build_class("a/B")})
        b = make_jar({"a/B.class": cb.build_class("a/B"), "a/A.class": cb.build_class("a/A")})
        assert parse_archive(a, 33).apis == parse_archive(b, 33).apis
