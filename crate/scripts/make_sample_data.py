#!/usr/bin/env python3
"""Regenerate the synthetic sample dataset in data/sample/.

The series are synthetic but follow the CoinGecko / FRED / FDIC export
layouts. Each coin has 200 daily rows spanning the March 2023 banking stress.
"""

import csv
import datetime as dt
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "sample"
START = dt.date(2022, 11, 1)
DAYS = 200

COINS = {
    # phi, noise sd, mean dev, volume scale, volume log-sd, market cap, volume impact
    "usdc": (0.60, 0.0006, 0.0, 4.0e9, 0.35, 4.3e10, -8.0e-14),
    "dai": (0.75, 0.0012, 0.0, 2.8e8, 0.45, 5.5e9, -1.5e-12),
    "usdt": (0.70, 0.0005, 0.0003, 2.5e10, 0.30, 7.0e10, -1.0e-14),
}

# Prices pinned on and after 2023-03-10.
EVENT = {
    "usdc": [0.9000, 0.8700, 0.9600, 0.9900, 0.9970],
    "dai": [0.9300, 0.9050, 0.9700, 0.9930, 0.9980],
    "usdt": [1.0040, 1.0080, 1.0060, 1.0020, 1.0010],
}
EVENT_DATE = dt.date(2023, 3, 10)
DAI_GAP = {dt.date(2022, 11, 20), dt.date(2022, 11, 21)}


def coin_rows(coin, rng):
    phi, sd, mean, vscale, vsd, mcap, impact = COINS[coin]
    dev = mean
    rows = []
    for i in range(DAYS):
        day = START + dt.timedelta(days=i)
        vol = vscale * math.exp(rng.gauss(0.0, vsd) - 0.5 * vsd * vsd)
        k = (day - EVENT_DATE).days
        if 0 <= k < len(EVENT[coin]):
            vol *= 4.0 - 0.5 * k
            dev = EVENT[coin][k] - 1.0
        else:
            dev = mean + phi * (dev - mean) + impact * (vol - vscale) + rng.gauss(0.0, sd)
        cap = mcap * (1.0 - 0.0004 * i) * (0.9 if 0 <= k < 10 else 1.0)
        if coin == "dai" and day in DAI_GAP:
            continue
        rows.append((day, 1.0 + dev, cap, vol))
    return rows


def write_coin(coin, rows):
    with open(OUT / f"{coin}.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["snapped_at", "price", "market_cap", "total_volume"])
        for day, price, cap, vol in rows:
            w.writerow([f"{day} 00:00:00 UTC", f"{price:.6f}", f"{cap:.2f}", f"{vol:.2f}"])


def write_macro(rng):
    with open(OUT / "DFF.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["observation_date", "DFF"])
        rate = 3.08
        for i in range(DAYS):
            day = START + dt.timedelta(days=i)
            if day in (dt.date(2022, 11, 3), dt.date(2022, 12, 15), dt.date(2023, 2, 2), dt.date(2023, 3, 23), dt.date(2023, 5, 4)):
                rate += 0.5 if day.year == 2022 and day.month == 11 else 0.25
            w.writerow([day.isoformat(), f"{rate:.2f}"])
    with open(OUT / "M2REAL.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["observation_date", "M2REAL"])
        level = 7150.0
        for m in range(10, 18):
            y, mo = 2022 + (m - 1) // 12, (m - 1) % 12 + 1
            level -= abs(rng.gauss(25.0, 10.0))
            w.writerow([f"{y}-{mo:02d}-01", "." if (y, mo) == (2023, 1) else f"{level:.1f}"])


FAILURES = [
    ("Washington Mutual Bank", "Henderson", "NV", 32633, "JP Morgan Chase Bank", "25-Sep-08"),
    ("Enloe State Bank", "Cooper", "TX", 10716, "Legend Bank, N.A.", "31-May-19"),
    ("Louisa Community Bank", "Louisa", "KY", 58112, "Kentucky Farmers Bank Corporation", "25-Oct-19"),
    ("Resolute Bank", "Maumee", "OH", 58317, "Buckeye State Bank", "25-Oct-19"),
    ("City National Bank of New Jersey", "Newark", "NJ", 21111, "Industrial Bank", "1-Nov-19"),
    ("Ericson State Bank", "Ericson", "NE", 18265, "Farmers and Merchants Bank", "14-Feb-20"),
    ("First State Bank", "Barboursville", "WV", 14361, "MVB Bank, Inc.", "3-Apr-20"),
    ("First City Bank of Florida", "Fort Walton Beach", "FL", 16748, "United Fidelity Bank, fsb", "16-Oct-20"),
    ("Almena State Bank", "Almena", "KS", 15426, "Equity Bank", "23-Oct-20"),
    ("Silicon Valley Bank", "Santa Clara", "CA", 24735, "First-Citizens Bank & Trust Company", "10-Mar-23"),
    ("Signature Bank", "New York", "NY", 57053, "Flagstar Bank, N.A.", "12-Mar-23"),
    ("First Republic Bank", "San Francisco", "CA", 59017, "JPMorgan Chase Bank, N.A.", "1-May-23"),
    ("Heartland Tri-State Bank", "Elkhart", "KS", 25851, "Dream First Bank, N.A.", "28-Jul-23"),
    ("Citizens Bank", "Sac City", "IA", 8758, "Iowa Trust & Savings Bank", "3-Nov-23"),
    ("Republic First Bank", "Philadelphia", "PA", 27332, "Fulton Bank, National Association", "26-Apr-24"),
    ("The First National Bank of Lindsay", "Lindsay", "OK", 4134, "First Bank & Trust Co.", "18-Oct-24"),
    ("Pulaski Savings Bank", "Chicago", "IL", 28611, "Millennium Bank", "17-Jan-25"),
]

TOTALS = {2019: 5177, 2020: 5002, 2021: 4839, 2022: 4706, 2023: 4587, 2024: 4487, 2025: 4421}


def write_banks():
    with open(OUT / "failed_banks.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["Bank Name ", "City ", "State ", "Cert ", "Acquiring Institution ", "Closing Date ", "Fund"])
        for i, row in enumerate(sorted(FAILURES, key=lambda r: dt.datetime.strptime(r[5], "%d-%b-%y"), reverse=True)):
            w.writerow([*row, 10500 + i])
    with open(OUT / "total_banks.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["year", "total_banks"])
        for y, n in TOTALS.items():
            w.writerow([y, n])


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20230310)
    for coin in COINS:
        write_coin(coin, coin_rows(coin, rng))
    write_macro(rng)
    write_banks()


if __name__ == "__main__":
    main()
