#!/usr/bin/env python3
# Copyright 2026 The vdaudit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reduces ProPublica's compas-scores-two-years.csv to the columns in compas.schema.json.

Applies the usual ProPublica row filter (screening within 30 days of arrest,
known recidivism flag, ordinary charge degree, scored assessment).

usage: prepare_compas.py compas-scores-two-years.csv > compas.csv
"""
import csv
import sys

COLUMNS = ["sex", "age", "age_cat", "race", "juv_fel_count", "juv_misd_count",
           "juv_other_count", "priors_count", "c_charge_degree", "c_charge_desc",
           "two_year_recid"]


def main(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    # The upstream header repeats some names; the first occurrence wins.
    index = {}
    for i, name in enumerate(header):
        index.setdefault(name, i)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(COLUMNS)
    for row in rows[1:]:
        get = lambda name: row[index[name]]
        days = get("days_b_screening_arrest")
        if days == "" or abs(int(float(days))) > 30:
            continue
        if get("is_recid") == "-1" or get("c_charge_degree") == "O":
            continue
        if get("score_text") == "N/A":
            continue
        out.writerow([get(c) for c in COLUMNS])


if __name__ == "__main__":
    main(sys.argv[1])
