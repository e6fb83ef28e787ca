#!/usr/bin/env python3
"""Regenerates the synthetic 120-language fixture under data/fixture/.

Counts are heavily skewed and 50 languages (over 40%) have no coverage in any
source. Run `lodcov ingest --config data/fixture/profile.ini` afterwards to
rebuild snapshot.json from the stats files.
"""
import csv
import math
import os
import random
import string

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "fixture")
N = 120
ZERO = 50

FAMILIES = {
    "Indo-European": ["Romance", "Germanic", "Slavic", "Indic"],
    "Austronesian": ["Oceanic", "Malayo-Sumbawan", "Philippine"],
    "Niger-Congo": ["Bantoid", "Kwa", "Gur"],
    "Afro-Asiatic": ["Semitic", "Cushitic", "Chadic"],
    "Sino-Tibetan": ["Chinese", "Bodic"],
    "Uralic": ["Finnic", "Ugric"],
    "Quechuan": ["Quechua"],
    "Pama-Nyungan": ["Western Pama-Nyungan", "Paman"],
}
AREA = {
    "Indo-European": "Eurasia", "Austronesian": "Papunesia", "Niger-Congo": "Africa",
    "Afro-Asiatic": "Africa", "Sino-Tibetan": "Eurasia", "Uralic": "Eurasia",
    "Quechuan": "South America", "Pama-Nyungan": "Australia",
}
FEATURES = ["1A", "2A", "3A", "13A", "81A", "87A"]
CLASS_NAMES = ["0 Left-Behinds", "1 Scrapping-Bys", "2 Hopefuls", "3 Rising Stars",
               "4 Underdogs", "5 Winners"]


def main():
    rng = random.Random(20240601)
    taken = {"nap", "lad"}

    def fresh():
        while True:
            c = "".join(rng.choice(string.ascii_lowercase) for _ in range(3))
            if c not in taken:
                taken.add(c)
                return c

    langs = [
        dict(wals="nap", iso="nap", name="Neapolitan", family="Indo-European",
             genus="Romance"),
        dict(wals="lad", iso="lad", name="Ladino", family="Indo-European", genus="Romance"),
    ]
    while len(langs) < N:
        family = rng.choice(sorted(FAMILIES))
        langs.append(dict(wals=fresh(), iso=fresh(), name=f"Lang {len(langs):03d}",
                          family=family, genus=rng.choice(FAMILIES[family])))
    for l in langs:
        l["area"] = AREA[l["family"]]
        l["features"] = {f: (str(rng.randint(1, 4)) if rng.random() < 0.8 else "")
                         for f in FEATURES}

    # Coverage: a zero block, then log-normal counts spanning several decades.
    order = list(range(N))
    rng.shuffle(order)
    zero = set(order[:ZERO])
    for i, l in enumerate(langs):
        if i in zero:
            l.update(articles=0, dbp=0, dbp_rel=0, wd=0, wd_rel=0)
            continue
        level = rng.uniform(3.0, 15.5)
        l["articles"] = int(math.exp(level))
        l["dbp"] = int(math.exp(level + rng.gauss(-0.4, 0.9)))
        l["dbp_rel"] = int(math.exp(0.55 * level + rng.gauss(0, 0.5)))
        l["wd"] = int(math.exp(level + 0.8 + rng.gauss(0, 0.6)))
        l["wd_rel"] = int(math.exp(0.6 * level + rng.gauss(0, 0.4)))

    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "catalog.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["wals_code", "iso639_3", "name", "family", "genus", "macroarea"] + FEATURES)
        for l in sorted(langs, key=lambda l: l["wals"]):
            w.writerow([l["wals"], l["iso"], l["name"], l["family"], l["genus"], l["area"]]
                       + [l["features"][f] for f in FEATURES])

    # A few two-letter edition codes on top of the ISO codes.
    curated = [l for l in langs if l["wals"] not in ("nap", "lad")][:6]
    with open(os.path.join(OUT, "mappings.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["external_code", "wals_code", "confidence"])
        for l in curated:
            l["edition"] = l["iso"][:2] + "x"
            w.writerow([l["edition"], l["wals"], "manual"])

    def edition(l):
        return l.get("edition", l["iso"])

    def stats(name, cols, get):
        with open(os.path.join(OUT, name), "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["language"] + cols)
            for l in sorted(langs, key=edition):
                w.writerow([edition(l)] + get(l))

    stats("wikipedia.csv", ["entity_count", "article_count"], lambda l: ["", l["articles"]])
    stats("dbpedia.csv", ["entity_count", "relation_count"], lambda l: [l["dbp"], l["dbp_rel"]])
    stats("wikidata.csv", ["entity_count", "relation_count"], lambda l: [l["wd"], l["wd_rel"]])

    # Reference classes from a noisy resource level, keyed by ISO code.
    with open(os.path.join(OUT, "taxonomy.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["code", "class", "class_name"])
        for l in sorted(langs, key=lambda l: l["iso"]):
            level = math.log1p(l["articles"]) + rng.gauss(0, 1.0)
            c = 0 if level < 1.5 else min(5, 1 + int((level - 1.5) / 3.0))
            w.writerow([l["iso"], c, CLASS_NAMES[c]])

    with open(os.path.join(OUT, "profile.ini"), "w") as f:
        f.write("""; Synthetic 120-language fixture.
[run]
catalog = catalog.csv
mappings = mappings.csv
taxonomy = taxonomy.csv
snapshot = snapshot.json
output_dir = out
k = 6
seed = 42

[source.wikipedia]
kind = stats_file
locator = wikipedia.csv

[source.dbpedia]
kind = stats_file
locator = dbpedia.csv

[source.wikidata]
kind = stats_file
locator = wikidata.csv
""")


if __name__ == "__main__":
    main()
