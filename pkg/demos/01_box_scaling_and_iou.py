#!/usr/bin/env python3
"""Box area scaling and the IoU it costs.

Scaling a box's area by f about its center (and clipping at the image
border) moves its IoU with the original to exactly min(f, 1/f) as long as
the border is not hit. This single geometric fact is why re-scaled
detections lose AP so quickly: a factor 2 leaves IoU 0.5, the edge of the
usual correctness threshold.
"""

from boxalign import Box, ImageSize, area, iou, scale_box

img = ImageSize(640, 480)
box = Box(200, 150, 120, 90)

print(f"image {img.width:.0f}x{img.height:.0f}, box {box}")
print(f"area = {area(box):.0f} px^2, center = {box.center}\n")

print(f"{'factor':>8} {'new area':>10} {'IoU with original':>18}")
for factor in (0.5, 0.67, 1.0, 1.5, 2.0):
    scaled = scale_box(box, factor, img)
    print(f"{factor:>8} {area(scaled):>10.0f} {iou(box, scaled):>18.4f}")

print("\nWith clipping the law bends: a box against the border cannot grow.")
corner_box = Box(0, 0, 120, 90)
for factor in (1.5, 2.0):
    scaled = scale_box(corner_box, factor, img)
    print(
        f"  corner box, factor {factor}: area ratio "
        f"{area(scaled) / area(corner_box):.3f} (unclipped would be {factor})"
    )
