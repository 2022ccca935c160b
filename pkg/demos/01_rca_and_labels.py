"""
Revealed comparative advantage and specialization labels
=========================================================

Load the bundled synthetic panels, compute Balassa RCA for one year and
label each country's specializations by comparing an early and a late
sub-period.
"""

from collections import Counter

import numpy as np

import prognet as pn
from prognet.pipeline import demo_dir

d = demo_dir()
tax = pn.load_taxonomy(d / "taxonomy.csv")
panel = pn.align([pn.load_panel(d / "ai.csv", pn.Layer.AI, tax),
                  pn.load_panel(d / "goods.csv", pn.Layer.GOODS, tax),
                  pn.load_panel(d / "services.csv", pn.Layer.SERVICES, tax)])
print(len(panel.countries), "countries,", len(panel.sectors), "sectors,",
      panel.years[0], "-", panel.years[-1])

###############################################################################
# RCA is computed within each layer, so AI investment and goods exports
# never mix in a denominator.

spec = pn.compute_rca(panel, 2019)
print("diversification:", dict(zip(spec.countries, spec.diversification.tolist())))

# world-share weighted RCA sums to one for every country and layer
for layer in panel.layers:
    s = pn.world_shares(panel, 2019, layer)
    print(layer.value, np.round(spec.rca[:, panel.layer_slice(layer)] @ s, 12)[:4])

###############################################################################
# Labels use mean RCA over 2010-2014 against 2017-2019.

labels = pn.label_specializations(panel)
print(Counter(lab.label.value for lab in labels))
for lab in labels:
    if lab.country == "DEU" and lab.sector.layer == pn.Layer.AI and lab.label.value != "Absent":
        print(f"  {lab.sector.code:32s} {lab.label.value:13s} "
              f"{lab.early_avg_rca:.2f} -> {lab.late_avg_rca:.2f}")
