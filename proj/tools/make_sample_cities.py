#!/usr/bin/env python3
"""Writes data/sample_cities_1000.csv: 1000 synthetic cities in 20 countries.

Positions scatter around real country centers; populations are log-uniform.
Deterministic for a given --seed.
"""
import argparse
import csv
import math
import random

COUNTRIES = [
    # name, iso2, lat, lon, spread (deg), share
    ("Argentina", "AR", -34.0, -64.0, 6.0, 45),
    ("Australia", "AU", -27.0, 135.0, 9.0, 40),
    ("Brazil", "BR", -12.0, -50.0, 8.0, 80),
    ("Canada", "CA", 52.0, -100.0, 9.0, 45),
    ("China", "CN", 33.0, 108.0, 8.0, 110),
    ("Egypt", "EG", 28.0, 30.0, 3.0, 30),
    ("Fiji", "FJ", -17.8, 179.2, 0.9, 15),
    ("France", "FR", 46.5, 2.5, 3.0, 50),
    ("Germany", "DE", 51.0, 10.0, 2.5, 55),
    ("India", "IN", 22.0, 79.0, 7.0, 100),
    ("Indonesia", "ID", -3.0, 115.0, 6.0, 55),
    ("Japan", "JP", 36.0, 138.0, 3.0, 50),
    ("Kenya", "KE", 0.0, 37.5, 2.5, 25),
    ("Mexico", "MX", 23.0, -102.0, 5.0, 55),
    ("Nigeria", "NG", 9.0, 8.0, 3.5, 45),
    ("Norway", "NO", 63.0, 11.0, 3.5, 20),
    ("Russia", "RU", 58.0, 60.0, 14.0, 70),
    ("South Africa", "ZA", -29.0, 25.0, 4.0, 30),
    ("United Kingdom", "GB", 53.5, -2.0, 2.0, 45),
    ("United States", "US", 39.0, -98.0, 10.0, 35),
]

SYLLABLES = ["an", "bel", "cor", "dun", "el", "far", "gar", "hol", "is", "jen", "kal", "lor",
             "mar", "nor", "os", "pel", "quin", "ros", "sal", "tor", "ul", "ven", "wes", "yar"]


def wrap_lon(lon):
    lon = (lon + 180.0) % 360.0 - 180.0
    return 180.0 if lon == -180.0 else lon


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--output", default="data/sample_cities_1000.csv")
    args = ap.parse_args()
    rng = random.Random(args.seed)

    assert sum(c[5] for c in COUNTRIES) == 1000
    rows = []
    used = set()
    for name, iso2, lat0, lon0, spread, count in COUNTRIES:
        for _ in range(count):
            while True:
                city = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 3))).capitalize()
                if (city, name) not in used:
                    used.add((city, name))
                    break
            if rng.random() < 0.05:
                city += ", " + rng.choice(["North", "South", "Old Town", "Harbour"])
            lat = max(-89.0, min(89.0, lat0 + rng.gauss(0.0, spread / 2.0)))
            lon = wrap_lon(lon0 + rng.gauss(0.0, spread / 2.0) / max(0.2, math.cos(math.radians(lat))))
            pop = round(math.exp(rng.uniform(math.log(2e3), math.log(5e6))))
            rows.append((city, round(lat, 4), round(lon, 4), name, iso2, pop))

    with open(args.output, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["city", "lat", "lng", "country", "iso2", "population"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
