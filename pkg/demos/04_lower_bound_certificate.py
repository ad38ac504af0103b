"""
Lower-bound certificates from good rectangles
=============================================

Good zag rectangles have empty interiors, and per orientation family they
admit a marking scheme: pick the rectangle at the extreme key, thread a
vertical line through it that crosses no other remaining rectangle, and
record the adjacent pair of points straddling the line.  Distinct pairs with
at most one input point each force any satisfied superset to carry at least
one extra point per rectangle -- so |X u OPT| >= |GR|/2 + |X|.
"""

from arboral import (
    brute_force_opt,
    certificate_to_csv,
    classify_all,
    extract_certificate,
    good_rectangles,
    greedy_sweep,
    verify_goodbound,
)

perm = [3, 1, 2, 5, 4]
aug = greedy_sweep(perm)
_, records = classify_all(aug)
fam_back, fam_slash = good_rectangles(records, aug)
print(f"families: backslash = {len(fam_back)}, slash = {len(fam_slash)}")

opt = brute_force_opt(perm)
print(f"exact OPT adds {opt.size} points: {list(opt.y)}")

for fam in (fam_back, fam_slash):
    cert = extract_certificate(fam, opt.superset)
    print(f"{fam.orientation}: {len(cert)} markings against X u OPT")
    for m in cert.markings:
        print(f"  rect {m.rect_q}-{m.rect_p}  line at x = {m.line_x2 / 2}  pair {m.a} | {m.b}")

print()
print(certificate_to_csv([extract_certificate(fam_back, aug.point_set()),
                          extract_certificate(fam_slash, aug.point_set())]))

print("lower bound check:", verify_goodbound(perm))
