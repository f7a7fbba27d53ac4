#!/usr/bin/env python3
"""Why training with the asymmetric loss inflates boxes: the quantile law.

A regressor trained on noisy size targets under the asymmetric loss does
not settle at the median of the noise: the minimizer balances an
undershoot slope of sqrt(alpha) against an overshoot slope of 1/sqrt(alpha)
and lands at the alpha/(1+alpha) quantile. Sweeping alpha on a synthetic
dataset shows the fraction of oversized predictions climbing along that law
while AP falls, mirroring what fine-tuning a real detector does. Writes
demo_output/alpha_sweep.png.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from boxalign import Box
from boxalign.coco_io import DatasetBundle, GroundTruthObject, ImageRecord
from boxalign.geometry import ImageSize, size_category
from boxalign.losses import AsymmetricLossParams
from boxalign.regression import NoiseConfig, simulate_detector

os.makedirs("demo_output", exist_ok=True)

objects = []
ann = 0
for col, (w, h) in enumerate(((20, 24), (50, 60), (120, 150))):
    for row in range(10):
        ann += 1
        box = Box(300 + 900 * col, 250 + 300 * row, w, h)
        objects.append(
            GroundTruthObject(ann, 1, 1, box, size_category(box))
        )
bundle = DatasetBundle(
    images=(ImageRecord(1, "synthetic.jpg", ImageSize(3000, 3400)),),
    ground_truth=tuple(objects),
    categories={1: "object"},
)

noise = NoiseConfig("uniform", 0.25, seed=7)
alphas = (1.0, 2.0, 4.0, 10.0, 30.0, 100.0)

print(f"{'alpha':>7} {'frac larger':>12} {'law a/(1+a)':>12} {'mean ratio':>11} {'AP':>7}")
fracs, aps, ratios = [], [], []
for alpha in alphas:
    outcome = simulate_detector(
        bundle, noise, AsymmetricLossParams(alpha=alpha, beta=0.5)
    )
    fracs.append(outcome.fraction_larger)
    ratios.append(outcome.mean_scale_ratio)
    aps.append(outcome.ap_report.ap)
    print(
        f"{alpha:>7g} {outcome.fraction_larger:>12.3f} {alpha / (1 + alpha):>12.3f} "
        f"{outcome.mean_scale_ratio:>11.3f} {outcome.ap_report.ap:>7.3f}"
    )

print("\nper-size mean area ratio at alpha=10. With purely relative noise and")
print("no clipping pressure the inflation is nearly uniform across sizes;")
print("real detectors inflate small objects more because enlarged large")
print("boxes run into the image border:")
outcome = simulate_detector(bundle, noise, AsymmetricLossParams(10.0, 0.5))
for cat, breakdown in outcome.per_size.items():
    print(f"  {cat.value:>7}: x{breakdown.mean_scale_ratio:.3f} over {breakdown.count} objects")

fig, ax1 = plt.subplots(figsize=(7, 4.5))
ax1.plot(fracs, aps, "o-", color="tab:blue")
for alpha, fx, ap in zip(alphas, fracs, aps):
    ax1.annotate(f"a={alpha:g}", (fx, ap), textcoords="offset points", xytext=(6, 4))
ax1.set_xlabel("fraction of predictions larger than their target")
ax1.set_ylabel("AP@[0.5:0.95]")
ax1.set_title("Larger alpha: more oversized boxes, lower AP")
ax1.grid(alpha=0.3)
fig.tight_layout()
fig.savefig("demo_output/alpha_sweep.png", dpi=120)
print("\nwrote demo_output/alpha_sweep.png")
