"""Synthetic corpus generation: determinism, token freedom, ground truth."""

import json

import pytest

from memsift import (
    FabricationPlan,
    MemoryImage,
    PlannedImage,
    ProcessMap,
    builtin_templates,
    fabricate,
    load_manifest,
    load_plan,
    save_plan,
    scan_image,
    table1_preset,
    template_by_id,
)
from memsift.errors import OverlapError, PlacementOutOfBoundsError
from memsift.fabricator import MIN_PLACEMENT_GAP, _filler_block, _has_token

from conftest import SMALL_PMAP, small_plan


class TestTemplates:
    def test_eight_templates_exist(self):
        ids = [t.template_id for t in builtin_templates()]
        assert ids == [
            "sonicwall-inline", "facebook-ff-inline", "facebook-gc-adjacent",
            "gmail-ff-cookie-inline", "gmail-gc-adjacent", "irctc-inline",
            "sbi-gc-inline", "sbi-ff-isolated",
        ]

    def test_unknown_id_rejected(self):
        with pytest.raises(ValueError):
            template_by_id("no-such-template")

    def test_render_has_nul_guards(self):
        for t in builtin_templates():
            data = t.render()
            assert data[0] == 0 and data[-1] == 0
            assert len(data) == t.byte_length

    def test_every_template_scans_to_its_expectation(self):
        # the whole point of a template: planted bytes produce exactly
        # the declared findings
        for t in builtin_templates():
            base = 4096
            buf = bytearray(b"\x00" * 16384)
            data = t.render()
            buf[base : base + len(data)] = data
            findings = scan_image(MemoryImage.from_bytes(bytes(buf), label="x"))
            got = [
                (f.app_id, f.username, f.password_raw, f.match_mode,
                 f.offset - base, f.confidence)
                for f in findings
            ]
            want = [
                (e.app_id, e.username, e.password_raw, e.match_mode,
                 e.rel_offset, e.confidence)
                for e in t.expected
            ]
            assert got == want, t.template_id


class TestPlanValidation:
    def test_placement_must_fit(self):
        plan = FabricationPlan(
            image_size=4096, seed=1,
            images=(PlannedImage("A", 2, "", (("irctc-inline", 3000),)),),
        )
        with pytest.raises(PlacementOutOfBoundsError):
            plan.validate()

    def test_placements_too_close_rejected(self):
        t = template_by_id("sonicwall-inline")
        second = 100 + t.byte_length + MIN_PLACEMENT_GAP - 1
        plan = FabricationPlan(
            image_size=1 << 20, seed=1,
            images=(PlannedImage("A", 2, "", (
                ("sonicwall-inline", 100),
                ("sonicwall-inline", second),
            )),),
        )
        with pytest.raises(OverlapError) as err:
            plan.validate()
        assert "sonicwall-inline" in str(err.value)

    def test_gap_exactly_at_minimum_accepted(self):
        t = template_by_id("sonicwall-inline")
        second = 100 + t.byte_length + MIN_PLACEMENT_GAP
        plan = FabricationPlan(
            image_size=1 << 20, seed=1,
            images=(PlannedImage("A", 2, "", (
                ("sonicwall-inline", 100),
                ("sonicwall-inline", second),
            )),),
        )
        plan.validate()

    def test_bad_density_rejected(self):
        with pytest.raises(ValueError):
            FabricationPlan(image_size=4096, seed=1, images=(), printable_density=1.0)


def test_plan_save_load_round_trip(tmp_path):
    plan = small_plan()
    p = tmp_path / "plan.json"
    save_plan(plan, p)
    assert load_plan(p) == plan


class TestFiller:
    def test_deterministic(self):
        a = _filler_block(1, 2, 3, 8192, 0.3)
        b = _filler_block(1, 2, 3, 8192, 0.3)
        assert a == b
        assert _filler_block(1, 2, 4, 8192, 0.3) != a

    def test_density_controls_printable_fraction(self):
        for density in (0.1, 0.7):
            block = _filler_block(9, 0, 0, 1 << 16, density)
            frac = sum(0x20 <= b <= 0x7E for b in block) / len(block)
            assert abs(frac - density) < 0.02

    def test_token_check_both_encodings(self):
        assert _has_token(b"xx irctc.co.in yy")
        assert _has_token(b"\x00" + "pass".encode("utf-16-le"))
        assert not _has_token(b"nothing of note")


class TestFabricate(object):
    def test_outputs_exist(self, small_corpus):
        plan, result = small_corpus
        assert result.manifest_path.is_file()
        assert result.process_map_path.is_file()
        assert result.ground_truth_path.is_file()
        for p in result.image_paths:
            assert p.stat().st_size == plan.image_size

    def test_manifest_loads_with_session(self, small_corpus):
        plan, result = small_corpus
        man = load_manifest(result.manifest_path)
        assert man.labels() == ["A", "B", "C"]
        assert man.session_meta == plan.session_meta

    def test_ground_truth_file_mirrors_memory(self, small_corpus):
        _plan, result = small_corpus
        doc = json.loads(result.ground_truth_path.read_text())
        by_label = {img["label"]: img["findings"] for img in doc["images"]}
        for label, findings in result.ground_truth.items():
            assert len(by_label[label]) == len(findings)
            for fd, f in zip(by_label[label], findings):
                assert fd["app_id"] == f.app_id
                assert fd["offset"] == f.offset
                assert fd["password_raw"] == f.password_raw

    def test_byte_deterministic(self, tmp_path):
        plan = small_plan(seed=77)
        r1 = fabricate(plan, tmp_path / "one")
        r2 = fabricate(plan, tmp_path / "two")
        for p1, p2 in zip(r1.image_paths, r2.image_paths):
            assert p1.read_bytes() == p2.read_bytes()

    def test_seed_changes_filler_but_not_truth(self, tmp_path):
        r1 = fabricate(small_plan(seed=1), tmp_path / "one")
        r2 = fabricate(small_plan(seed=2), tmp_path / "two")
        assert r1.image_paths[0].read_bytes() != r2.image_paths[0].read_bytes()
        assert r1.ground_truth == r2.ground_truth

    def test_filler_is_token_free_outside_placements(self, small_corpus):
        plan, result = small_corpus
        by_label = {img.label: img for img in plan.images}
        for path in result.image_paths:
            img = by_label[path.stem]
            data = bytearray(path.read_bytes())
            for tid, off in img.placements:
                t = template_by_id(tid)
                data[off : off + t.byte_length] = bytes(t.byte_length)
            assert not _has_token(bytes(data) + b"\x00")

    def test_scan_equals_ground_truth(self, small_corpus):
        plan, result = small_corpus
        pmap = ProcessMap(SMALL_PMAP)
        for path in result.image_paths:
            img = MemoryImage.from_file(path, label=path.stem)
            assert tuple(scan_image(img, process_map=pmap)) == result.ground_truth[path.stem]


class TestPreset:
    def test_thirteen_images_even_steps(self):
        plan = table1_preset(image_size=1 << 20)
        assert [img.label for img in plan.images] == [f"Img{n}" for n in range(1, 14)]
        assert [img.step_index for img in plan.images] == list(range(2, 27, 2))
        plan.validate()

    def test_browser_processes_present(self):
        plan = table1_preset(image_size=1 << 20)
        names = {e.name for e in plan.process_map}
        assert {"firefox.exe", "chrome.exe"} <= names

    def test_placements_fall_inside_browser_ranges(self):
        plan = table1_preset(image_size=1 << 20)
        pmap = ProcessMap(plan.process_map)
        for img in plan.images:
            for _tid, off in img.placements:
                owners = {a.process_name for a in pmap.lookup(off)}
                assert owners & {"firefox.exe", "chrome.exe"}

    def test_rejects_tiny_images(self):
        with pytest.raises(ValueError):
            table1_preset(image_size=1 << 19)

    def test_empty_and_loaded_images(self):
        plan = table1_preset(image_size=1 << 20)
        n_placed = {img.label: len(img.placements) for img in plan.images}
        assert n_placed["Img1"] == 0
        assert n_placed["Img2"] == 0
        assert n_placed["Img4"] == 10
        assert n_placed["Img10"] == 0
