"""Tour of the HTTP API, driven in-process (no sockets, no setup).

Uses the test client against a throwaway store directory; the byte traffic is
exactly what the real server produces. Needs the `test` extra (httpx).

Run:  python demos/05_service_tour.py
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from iwin import PhantomSpec, generate, parse_pgm, to_stored_values, write_pgm
from iwin.service import ServiceConfig, create_app

store_dir = Path(tempfile.mkdtemp(prefix="iwin_demo_"))
client = TestClient(create_app(ServiceConfig(store_dir=store_dir)))
print("store directory:", store_dir)

print("\nGET /healthz ->", client.get("/healthz").text)

# Upload a phantom as PGM. The service parses it, runs the builtin
# suppression eagerly, and persists everything under the store directory.
image, truth = generate(PhantomSpec(seed=1))
upload = client.post(
    "/api/studies",
    content=write_pgm(to_stored_values(image)),
    headers={"X-Format": "pgm"},
)
summary = upload.json()
print(f"\nPOST /api/studies -> {upload.status_code}")
for key in ("id", "width", "height", "value_min", "value_max", "mask_provenance"):
    print(f"  {key}: {summary[key]}")
study = summary["id"]

# Auto windows, with and without suppression.
for suppress in ("false", "true"):
    doc = client.get(
        f"/api/studies/{study}/auto-window",
        params={"suppress": suppress, "strategy": "percentile:1,99"},
    ).json()
    print(f"\nGET auto-window suppress={suppress} -> ww={doc['ww']:.1f} wl={doc['wl']:.1f} "
          f"fg={doc['foreground_fraction']:.3f}")

# Renders come back as PGM with the applied window echoed in headers.
render = client.get(f"/api/studies/{study}/render", params={"suppress": "true"})
pgm = parse_pgm(render.content)
print(f"\nGET render suppress=true -> {render.headers['content-type']}, "
      f"{pgm.width}x{pgm.height}, ww={render.headers['X-WW']} wl={render.headers['X-WL']}")
print("   background pixels all black:", bool((pgm.samples[~truth.bits] == 0).all()))

# Manual windowing: pass ww/wl explicitly (a viewer's slider does this).
manual = client.get(f"/api/studies/{study}/render", params={"ww": 300, "wl": 800})
print(f"GET render ww=300 wl=800 -> X-WW={manual.headers['X-WW']}")

# The histogram endpoint backs a viewer's overlay plot.
hist = client.get(f"/api/studies/{study}/histogram",
                  params={"suppress": "true", "bins": 12}).json()
print(f"\nGET histogram suppress=true bins=12 -> range "
      f"[{hist['range_min']:.0f}, {hist['range_max']:.0f}], counts={hist['counts']}")

# Masks are plain PGMs: download the builtin one, or PUT your own (e.g. from
# an external learned segmenter); uploads invalidate cached windows.
mask_response = client.get(f"/api/studies/{study}/mask")
print(f"\nGET mask -> {len(mask_response.content)} bytes, "
      f"provenance={mask_response.headers['X-Mask-Provenance']}")

put = client.put(f"/api/studies/{study}/mask", content=mask_response.content)
print(f"PUT mask -> {put.status_code}; provenance now:",
      client.get(f"/api/studies/{study}").json()["mask_provenance"])

print("\non-disk layout:")
for path in sorted(store_dir.rglob("*")):
    if path.is_file():
        print("  ", path.relative_to(store_dir), f"({path.stat().st_size} bytes)")
