"""Any grayscale image as a target density.

A synthetic coin-like image is normalized into a piecewise-constant density
and sampled two ways.  The coordinate-wise translation construction with
shifts 0.6 and 0.2 is shown for what it is: those are the rationals 3/5 and
1/5, the cube orbit has period five, and the histogram collapses onto bands
no matter how long it runs.  A mixing map (here the baker's) fills the
image; so does any irrational shift.
"""

from pathlib import Path

import ergomap as em
from ergomap.synthimage import synthetic_coin

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

image_path = OUT / "coin_input.pgm"
em.write_pgm(synthetic_coin(64), image_path, maxval=255)
model = em.load_image_density(image_path)
transform = em.build_transform(model)
print(f"target: {image_path} ({model.shape[1]}x{model.shape[0]} cells)")

for name, spec, note in (
    ("rational", "product(translation:0.6, translation:0.2)",
     "rational shifts: period-5 orbit, banded"),
    ("irrational", "product(translation:0.6180339887498949, translation:0.4142135623730951)",
     "irrational shifts: lattice-like fill"),
    ("baker", "baker", "mixing map: fills the image"),
):
    u = em.make_uniform(spec)
    m = em.factorize(transform, u)
    orb = em.orbit(m, (0.3, 0.3), 1_000_000)
    hist = em.histogram(orb, (64, 64))
    tv = em.tv_distance(hist, model)
    em.histogram_to_pgm(hist, OUT / f"coin_{name}.pgm")
    print(f"  {spec}\n    TV = {tv:.4f}  -- {note}")

print(f"\nhistogram images written to {OUT}")
