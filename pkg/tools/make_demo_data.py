"""Generate the bundled synthetic demo panels.

Run once; the CSVs under src/prognet/data/demo/ are committed and the
tests read them directly.

Layout: 12 countries x (10 AI + 20 goods + 8 services) x 2010-2019.

Background: every country/sector pair has a persistent log-normal base
level with 10% yearly noise, so specializations are sticky over time.

Planted structure, three AI -> goods dependencies with a 3-year lag:

    image-recognition-visual-search -> G03 (Garments)
    agtech                          -> G07 (Agrochemicals)
    drone-satellite                 -> G12 (Oil)

For each, four countries adopt the AI sector at a staggered year in
2010-2012 (investment x6 from then on) and become exporters of the
goods community exactly three years later (exports x8).  No other
country is specialized in the planted goods communities.  About 3% of
background cells are left unreported.
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "prognet" / "data" / "demo"
SEED = 20240611
YEARS = list(range(2010, 2020))
COUNTRIES = ["BRA", "CHN", "DEU", "FRA", "GBR", "IND", "ITA", "JPN", "KOR", "MEX", "NGA", "USA"]

AI = {  # code: (name, raw labels used in the panel file)
    "advertising": ("Advertising", ["Programmatic", "Mobile advertising"]),
    "agtech": ("AgTech", ["Agriculture", "Crop"]),
    "drone-satellite": ("Drone, Satellite", ["Drone", "Remote sensing"]),
    "education": ("Education", ["Edtech", "Student"]),
    "fraud-detection-money-laundering": ("Fraud Detection, Money Laundering",
                                         ["Fraud detection", "Laundering"]),
    "image-recognition-visual-search": ("Image Recognition, Visual Search",
                                        ["Visual search", "Fashion"]),
    "insuretech": ("Insuretech", ["Insurtech", "Underwriting"]),
    "medical-technology": ("Medical Technology", ["Medical device", "Hospital"]),
    "network-security": ("Network Security", ["Cybersecurity", "Threat"]),
    "robotic-automation": ("Robotic Automation", ["Ai robotics", "Rpa"]),
}
GOODS = {
    "G01": "Agricultural products", "G02": "Chemicals and health products", "G03": "Garments",
    "G04": "Cotton, rice and tropical crops", "G05": "Electronics", "G06": "Food processing",
    "G07": "Agrochemicals", "G08": "Fruit", "G09": "Home and office products",
    "G10": "Leather", "G11": "Machinery", "G12": "Oil", "G13": "Petrochemicals",
    "G14": "Milk and cheese", "G15": "Construction materials", "G16": "Coal",
    "G17": "Inorganic salts and acids", "G18": "Aircraft", "G19": "Boilers", "G20": "Textiles",
}
SERVICES = {
    "SC": "Transport", "SD": "Travel", "SE": "Construction", "SF": "Insurance and pension",
    "SG": "Financial", "SH": "Charges for the use of intellectual property",
    "SI": "Telecommunications, computer and information", "SJ": "Other business services",
}
PLANTED = [
    ("image-recognition-visual-search", "G03", ["FRA", "ITA", "KOR", "MEX"]),
    ("agtech", "G07", ["BRA", "IND", "NGA", "USA"]),
    ("drone-satellite", "G12", ["CHN", "DEU", "GBR", "JPN"]),
]


def sitc_codes(community: str) -> list[str]:
    n = int(community[1:])
    return [f"{n:02d}{k}1" for k in (1, 2)]


def main():
    rng = np.random.default_rng(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    ai_codes = sorted(AI)
    goods_codes = sorted(GOODS)
    serv_codes = sorted(SERVICES)

    def base(n_sectors, sigma):
        size = rng.lognormal(0.0, 1.0, len(COUNTRIES))[:, None]
        return size * rng.lognormal(0.0, sigma, (len(COUNTRIES), n_sectors))

    ai = base(len(ai_codes), 0.9)[..., None] * np.ones(len(YEARS))
    goods = base(len(goods_codes), 0.9)[..., None] * np.ones(len(YEARS))
    serv = base(len(serv_codes), 0.6)[..., None] * np.ones(len(YEARS))

    for a, g, adopters in PLANTED:
        ai_col, g_col = ai_codes.index(a), goods_codes.index(g)
        goods[:, g_col] *= 0.1  # planted communities stay rare elsewhere
        ai[:, ai_col] *= 0.3
        for c in adopters:
            ci = COUNTRIES.index(c)
            start = int(rng.integers(2010, 2013))
            for ti, y in enumerate(YEARS):
                if y >= start:
                    ai[ci, ai_col, ti] *= 20.0
                if y >= start + 3:
                    goods[ci, g_col, ti] *= 80.0

    for arr in (ai, goods, serv):
        arr *= rng.lognormal(0.0, 0.1, arr.shape)

    planted_cells = {(COUNTRIES.index(c), "AI", ai_codes.index(a)) for a, _, cs in PLANTED for c in cs}
    planted_cells |= {(COUNTRIES.index(c), "Goods", goods_codes.index(g)) for _, g, cs in PLANTED for c in cs}

    def emit(path, arr, layer, labels_for, scale):
        with (OUT / path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["country", "sector", "year", "value"])
            for ci, c in enumerate(COUNTRIES):
                for xi in range(arr.shape[1]):
                    for ti, y in enumerate(YEARS):
                        if (ci, layer, xi) not in planted_cells and rng.random() < 0.03:
                            continue
                        labels = labels_for(xi)
                        shares = rng.dirichlet(np.ones(len(labels)))
                        for lab, sh in zip(labels, shares):
                            w.writerow([c, lab, y, f"{arr[ci, xi, ti] * sh * scale:.2f}"])

    emit("ai.csv", ai, "AI", lambda i: AI[ai_codes[i]][1], 1e7)
    emit("goods.csv", goods, "Goods", lambda i: sitc_codes(goods_codes[i]), 1e8)
    emit("services.csv", serv, "Services", lambda i: [serv_codes[i]], 1e8)

    with (OUT / "taxonomy.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["layer", "raw_label", "code", "name"])
        for code in ai_codes:
            name, labels = AI[code]
            for lab in labels:
                w.writerow(["AI", lab, code, name])
        for code in goods_codes:
            for lab in sitc_codes(code):
                w.writerow(["Goods", lab, code, GOODS[code]])
        for code in serv_codes:
            w.writerow(["Services", "", code, SERVICES[code]])

    with (OUT / "planted.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source_layer", "source", "target_layer", "target", "delay"])
        for a, g, _ in PLANTED:
            w.writerow(["AI", a, "Goods", g, 3])


if __name__ == "__main__":
    main()
