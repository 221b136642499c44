"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the verdict lines.
Thresholds are fixed here, not tuned at runtime.
"""

import json
import random
import subprocess
import sys
import time

import numpy as np
from fastapi.testclient import TestClient

from iwin import (
    AutoWindowStrategy,
    BinaryMask,
    FormatError,
    Histogram,
    PhantomSpec,
    RealImage,
    StructuringElement,
    WindowSettings,
    apply_window,
    auto_window,
    closing,
    dice,
    dilate,
    erode,
    extract_image,
    fill_holes,
    generate,
    opening,
    otsu_threshold,
    parse_dicom,
    suppress_background,
    to_stored_values,
    window_bias,
    write_pgm,
)
from iwin.cli import main as cli_main
from iwin.service import ServiceConfig, create_app

from dicom_fixtures import EXPLICIT_LE, IMPLICIT_LE, build_dicom
from test_suppress import ref_fill_holes, ref_otsu
from test_window import ref_lut_scalar, ref_percentile


def report(criterion: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"\n[ACCEPTANCE {criterion}] {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"acceptance criterion {criterion} ({name}) failed: {detail}"


def test_criterion_1_phantom_segmentation():
    start = time.perf_counter()
    scores = []
    for seed in range(1, 21):
        img, truth = generate(PhantomSpec(seed=seed))
        mask = suppress_background(img)
        scores.append(dice(mask, truth).value)
    elapsed = time.perf_counter() - start
    ok = all(s >= 0.95 for s in scores) and elapsed < 5.0
    report(
        1,
        "phantom segmentation",
        ok,
        f"(dice mean={np.mean(scores):.4f} min={min(scores):.4f} max={max(scores):.4f}, "
        f"{elapsed:.2f}s for 20 phantoms)",
    )


def test_criterion_2_background_bias(phantom_corpus):
    ratios = []
    levels = []
    for _, img, _truth in phantom_corpus:
        mask = suppress_background(img)
        ratios.append(window_bias(img, mask, AutoWindowStrategy.min_max()).width_ratio)
        levels.append(auto_window(img, mask, AutoWindowStrategy.percentile(1, 99)).level)
    ok_ratio = all(r >= 1.3 for r in ratios)
    ok_level = all(750.0 <= wl <= 850.0 for wl in levels)
    report(
        2,
        "background-bias demonstration",
        ok_ratio and ok_level,
        f"(min width_ratio={min(ratios):.2f}, suppressed WL in "
        f"[{min(levels):.1f}, {max(levels):.1f}])",
    )


def test_criterion_3_mask_sufficiency():
    rng = np.random.default_rng(20250809)
    strategies = (
        AutoWindowStrategy.min_max(),
        AutoWindowStrategy.percentile(1, 99),
        AutoWindowStrategy.mean_std(2),
    )
    trials = 0
    for _ in range(100):
        h, w = int(rng.integers(4, 32)), int(rng.integers(4, 32))
        values = rng.uniform(-1000, 1000, size=(h, w))
        bits = rng.random((h, w)) < rng.uniform(0.2, 0.8)
        if not bits.any():
            bits[rng.integers(h), rng.integers(w)] = True
        mask = BinaryMask(bits)
        baseline = [
            auto_window(RealImage.from_values(values), mask, s) for s in strategies
        ]
        mutated = values.copy()
        outside = ~bits
        mutated[outside] = rng.uniform(-1e9, 1e9, size=int(outside.sum()))
        for s, expected in zip(strategies, baseline):
            got = auto_window(RealImage.from_values(mutated), mask, s)
            assert (got.level, got.width) == (expected.level, expected.width), (
                f"strategy {s.key()} changed under background mutation"
            )
        trials += 1
    report(3, "mask-sufficiency invariance", trials == 100, f"({trials} trials, 3 strategies)")


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(41)

    for _ in range(200):  # Otsu vs exhaustive rational search, exact index equality
        bins = int(rng.integers(2, 192))
        counts = rng.integers(0, 60, size=bins)
        if (counts > 0).sum() < 2:
            counts[0] += 1
            counts[-1] += 1
        h = Histogram(0.0, float(bins), counts.astype(np.int64))
        assert otsu_threshold(h) == ref_otsu([int(c) for c in counts])

    for _ in range(100):  # dice vs brute-force set counting
        shape = (int(rng.integers(1, 16)), int(rng.integers(1, 16)))
        a = BinaryMask(rng.random(shape) < rng.uniform(0, 1))
        b = BinaryMask(rng.random(shape) < rng.uniform(0, 1))
        na = nb = ni = 0
        for y in range(shape[0]):
            for x in range(shape[1]):
                na += bool(a.bits[y, x])
                nb += bool(b.bits[y, x])
                ni += bool(a.bits[y, x] and b.bits[y, x])
        score = dice(a, b)
        assert (score.a_count, score.b_count, score.intersection) == (na, nb, ni)
        expected = 1.0 if na + nb == 0 else 2 * ni / (na + nb)
        assert score.value == expected

    for _ in range(100):  # percentile strategy vs sort-and-index
        n = int(rng.integers(1, 500))
        values = rng.uniform(-1e4, 1e4, size=n)
        p_low = float(rng.integers(0, 199)) / 2
        p_high = float(rng.integers(int(2 * p_low) + 1, 201)) / 2
        s = auto_window(
            RealImage.from_values(values.reshape(1, -1)),
            None,
            AutoWindowStrategy.percentile(p_low, p_high),
        )
        ww, wl = ref_percentile(values, p_low, p_high)
        assert (s.width, s.level) == (ww, wl)

    for _ in range(50):  # fill_holes vs border flood fill
        shape = (int(rng.integers(2, 24)), int(rng.integers(2, 24)))
        m = BinaryMask(rng.random(shape) < rng.uniform(0.3, 0.7))
        assert np.array_equal(fill_holes(m).bits, ref_fill_holes(m.bits))

    report(4, "oracle equivalence", True, "(otsu x200, dice x100, percentile x100, fill_holes x50)")


def test_criterion_5_lut_conformance():
    rng = np.random.default_rng(52)

    for _ in range(40):  # apply_window equals direct per-pixel formula, bit-exact
        wl = float(rng.uniform(-4000, 4000))
        ww = float(rng.choice([1.0, float(rng.uniform(1, 4000))]))
        img = RealImage.from_values(rng.uniform(wl - ww, wl + ww, size=(7, 9)))
        for photometric in ("MONOCHROME2", "MONOCHROME1"):
            got = apply_window(img, WindowSettings(level=wl, width=ww), photometric).samples
            expected = np.array(
                [[ref_lut_scalar(x, wl, ww) for x in row] for row in img.values],
                dtype=np.int64,
            )
            if photometric == "MONOCHROME1":
                expected = 255 - expected
            assert np.array_equal(got.astype(np.int64), expected), (wl, ww, photometric)

    from iwin import build_lut

    for _ in range(1000):  # monotonicity across random settings
        wl = float(rng.uniform(-1e5, 1e5))
        ww = float(rng.uniform(1, 1e5))
        lut = build_lut(WindowSettings(level=wl, width=ww))
        xs = np.sort(rng.uniform(wl - ww, wl + ww, size=16))
        ys = lut(xs)
        assert (np.diff(ys) >= 0).all()

    mid = build_lut(WindowSettings(level=2048, width=4096))(2048.0)
    threshold_lut = build_lut(WindowSettings(level=100, width=1))
    ok = mid == 128 and threshold_lut(99.0) == 0 and threshold_lut(100.0) == 255
    report(5, "LUT conformance", ok, f"(midpoint example -> {mid}, WW=1 thresholds)")


def test_criterion_6_morphology_algebra():
    rng = np.random.default_rng(66)
    elements = [StructuringElement.square(s) for s in (1, 3, 5, 7)] + [
        StructuringElement.disk(r) for r in (0, 1, 1.5, 2, 3)
    ]
    for _ in range(200):
        shape = (int(rng.integers(2, 28)), int(rng.integers(2, 28)))
        m = BinaryMask(rng.random(shape) < rng.uniform(0.1, 0.9))
        se = elements[int(rng.integers(len(elements)))]

        er, di = erode(m, se), dilate(m, se)
        assert not (er.bits & ~m.bits).any(), "erosion must be anti-extensive"
        assert not (m.bits & ~di.bits).any(), "dilation must be extensive"

        op, cl = opening(m, se), closing(m, se)
        assert np.array_equal(opening(op, se).bits, op.bits), "opening must be idempotent"
        assert np.array_equal(closing(cl, se).bits, cl.bits), "closing must be idempotent"

        complement = BinaryMask(~m.bits)
        assert np.array_equal(di.bits, ~erode(complement, se).bits), "duality must hold"

    report(6, "morphology algebra", True, "(200 random masks/elements, 4 laws each)")


def test_criterion_7_dicom_round_trip_and_fuzz():
    for syntax in (EXPLICIT_LE, IMPLICIT_LE):
        data = build_dicom(
            transfer_syntax=syntax,
            rows=4,
            columns=4,
            pixels=list(range(16)),
            window_center="40\\400",
            window_width="80\\800",
            rescale_slope="2",
            rescale_intercept="-1000",
            include_sequence=(syntax == EXPLICIT_LE),
        )
        rec = parse_dicom(data)
        assert rec.extracted.rows == 4 and rec.extracted.columns == 4
        assert rec.extracted.window_center == "40" and rec.extracted.window_width == "80"
        extracted = extract_image(rec)
        assert extracted.image.values.ravel().tolist() == list(range(16))
        assert (extracted.rescale.slope, extracted.rescale.intercept) == (2.0, -1000.0)
        assert (extracted.window.level, extracted.window.width) == (40.0, 80.0)

    bases = [
        build_dicom(transfer_syntax=EXPLICIT_LE, window_center="40", window_width="80",
                    rescale_slope="1", rescale_intercept="0", include_sequence=True),
        build_dicom(transfer_syntax=IMPLICIT_LE, window_center="40", window_width="80",
                    rescale_slope="1", rescale_intercept="0"),
    ]
    rng = random.Random(20250809)
    start = time.perf_counter()
    outcomes = {"ok": 0, "rejected": 0}
    for i in range(10_000):
        data = bytearray(bases[i % 2])
        for _ in range(rng.randint(1, 10)):
            op = rng.randrange(4)
            if op == 0 and data:
                data[rng.randrange(len(data))] = rng.randrange(256)
            elif op == 1 and data:
                del data[rng.randrange(len(data)) :]
            elif op == 2 and data:
                pos = rng.randrange(len(data))
                del data[pos : pos + rng.randint(1, 6)]
            else:
                pos = rng.randrange(len(data) + 1)
                data[pos:pos] = bytes(rng.randrange(256) for _ in range(rng.randint(1, 6)))
        try:
            extract_image(parse_dicom(bytes(data)))
            outcomes["ok"] += 1
        except FormatError:
            outcomes["rejected"] += 1
        # anything else escapes and fails the test
    elapsed = time.perf_counter() - start
    ok = elapsed < 10.0 and sum(outcomes.values()) == 10_000
    report(
        7,
        "DICOM round-trip + fuzz totality",
        ok,
        f"(10k mutations in {elapsed:.2f}s: {outcomes['ok']} parsed, {outcomes['rejected']} rejected)",
    )


def test_criterion_8_stack_agreement(tmp_path, capsys):
    strategies = ("minmax", "percentile:1,99")
    store_dir = tmp_path / "store"
    client = TestClient(create_app(ServiceConfig(store_dir=store_dir)))

    study_ids = {}
    checked = 0
    for seed in range(1, 21):
        img, _ = generate(PhantomSpec(seed=seed))
        pgm_path = tmp_path / f"phantom_{seed}.pgm"
        pgm_path.write_bytes(write_pgm(to_stored_values(img)))

        upload = client.post("/api/studies", content=pgm_path.read_bytes(),
                             headers={"X-Format": "pgm"})
        assert upload.status_code == 201
        study_ids[seed] = upload.json()["id"]

        from iwin import read_pgm, rescale_to_real

        image = rescale_to_real(read_pgm(pgm_path.read_bytes()))
        mask = suppress_background(image)
        for strategy_text in strategies:
            strategy = AutoWindowStrategy.parse(strategy_text)
            lib = auto_window(image, mask, strategy)

            code = cli_main([
                "window", "--input", str(pgm_path), "--auto-segment",
                "--strategy", strategy_text, "--json",
            ])
            cli_doc = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
            assert code == 0
            assert cli_doc["ww"] == lib.width and cli_doc["wl"] == lib.level

            endpoint = client.get(
                f"/api/studies/{study_ids[seed]}/auto-window",
                params={"suppress": "true", "strategy": strategy_text},
            ).json()
            assert endpoint["ww"] == lib.width and endpoint["wl"] == lib.level
            checked += 1

    # the installed console entry point agrees too (one subprocess probe)
    probe = subprocess.run(
        [sys.executable, "-m", "iwin.cli", "window", "--input",
         str(tmp_path / "phantom_1.pgm"), "--auto-segment", "--strategy", "minmax", "--json"],
        capture_output=True, text=True, timeout=120,
    )
    assert probe.returncode == 0, probe.stderr
    img1, _ = generate(PhantomSpec(seed=1))
    from iwin import read_pgm, rescale_to_real

    image1 = rescale_to_real(read_pgm((tmp_path / "phantom_1.pgm").read_bytes()))
    lib1 = auto_window(image1, suppress_background(image1), AutoWindowStrategy.min_max())
    sub_doc = json.loads(probe.stdout)
    assert sub_doc["ww"] == lib1.width and sub_doc["wl"] == lib1.level

    render_params = {"suppress": "true", "strategy": "percentile:1,99"}
    before = {
        seed: client.get(f"/api/studies/{sid}/render", params=render_params)
        for seed, sid in study_ids.items()
    }
    restarted = TestClient(create_app(ServiceConfig(store_dir=store_dir)))
    identical = 0
    for seed, sid in study_ids.items():
        after = restarted.get(f"/api/studies/{sid}/render", params=render_params)
        assert after.status_code == 200
        assert after.content == before[seed].content
        assert after.headers["X-WW"] == before[seed].headers["X-WW"]
        identical += 1

    report(
        8,
        "stack agreement",
        checked == 40 and identical == 20,
        f"({checked} CLI/endpoint/library triples agree bit-exactly; "
        f"{identical}/20 renders identical across restart)",
    )
