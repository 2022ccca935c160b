"""
Country density reports
=======================

For a target goods or services sector, a country's density is the share
of the target's incoming AI weight that comes from AI sectors the country
is specialized in today.  High density marks a feasible next step.
"""

import prognet as pn
from prognet.pipeline import demo_config, load_inputs
from prognet.config import make_config

panel, _ = load_inputs(make_config(demo_config()))
net = pn.build_progression(panel, 3, null_cfg=pn.NullConfig(seed=7))
labels = pn.label_specializations(panel)

for country in ("BRA", "KOR"):
    rep = pn.country_report(panel, net, labels, country, top_k=5)
    print(country, rep.year)
    for r in rep.rows:
        related = ", ".join(s.code for s in r.related_ai) or "-"
        print(f"  {r.target.id:12s} D={r.density:.2f}  {r.status.value:12s} "
              f"{r.application.value:10s} via {related}")

###############################################################################
# The country's own strongest specializations, per layer.

for layer, ranked in pn.top_specializations(panel, "KOR", top_k=3).items():
    print(layer.value, [(s.code, round(v, 2)) for s, v in ranked])
