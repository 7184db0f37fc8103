#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# risloc: RIS-assisted radio localization simulator and solvers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Regenerate gallery/*.json: one seeded generic scene per identifiability
table row, plus the two-RIS 60 GHz beam-sweep replica.

    python3 tools/make_gallery.py [--out gallery]
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

C = 299792458.0
CARRIER = 28e9
LAM = C / CARRIER

# row: (name, n_bs, n_ris, WB?, bs array?, ue array?, measurement mix)
ROWS = {
    1: ("siso_0ris_4bs", 4, 0, True, False, False, ["ToA", "Doppler"]),
    2: ("siso_1ris_1bs", 1, 1, True, False, False, ["ToA", "AoD", "Doppler"]),
    3: ("siso_2ris_1bs", 1, 2, False, False, False, ["AoD", "Doppler"]),
    4: ("siso_1ris_0bs", 0, 1, True, False, False, ["RTT", "AoD", "Doppler"]),
    5: ("miso_0ris_2bs", 2, 0, False, True, False, ["AoD", "Doppler"]),
    6: ("miso_1ris_1bs", 1, 1, False, True, False, ["AoD", "Doppler"]),
    7: ("simo_0ris_3bs", 3, 0, False, False, True, ["AoA", "Doppler"]),
    8: ("simo_1ris_1bs", 1, 1, False, False, True, ["AoA", "AoD", "Doppler"]),
    9: ("mimo_0ris_2bs", 2, 0, False, True, True, ["AoD", "AoA", "Doppler"]),
    10: ("mimo_1ris_1bs", 1, 1, False, True, True, ["AoD", "AoA", "Doppler"]),
}


def yaw_facing(frm, to, jitter):
    d = np.asarray(to) - np.asarray(frm)
    return math.atan2(d[1], d[0]) + jitter


def wrap(a):
    return math.remainder(a, 2 * math.pi)


def ris_euler_facing(center, target, jitter):
    # Rz(alpha) Rx(-pi/2) takes the local +z boresight to (-sin a, cos a, 0).
    d = np.asarray(target) - np.asarray(center)
    a = math.atan2(-d[0], d[1]) + jitter
    return [wrap(a), 0.0, -math.pi / 2]


def far_enough(p, others, dmin):
    return all(np.linalg.norm(p - q) >= dmin for q in others)


def random_point(rng, lo, hi, others, dmin=3.0):
    while True:
        p = rng.uniform(lo, hi)
        if far_enough(p, others, dmin):
            return p


def row_scene(row, seed):
    name, n_bs, n_ris, wb, bs_array, ue_array, mix = ROWS[row]
    rng = np.random.default_rng(seed)
    ue = rng.uniform([6.0, 6.0, 1.0], [14.0, 14.0, 2.0])
    placed = [ue]
    bss = []
    for k in range(n_bs):
        p = random_point(rng, [0.0, 0.0, 2.5], [20.0, 20.0, 8.0], placed)
        placed.append(p)
        ant = {"type": "array", "nx": 4, "ny": 4, "spacing": LAM / 2} if bs_array else {"type": "single"}
        bss.append({
            "id": f"bs{k + 1}",
            "position": p.round(3).tolist(),
            "orientation": [wrap(yaw_facing(p, ue, rng.uniform(-0.4, 0.4))), 0.0, 0.0],
            "antenna": ant,
        })
    riss = []
    for k in range(n_ris):
        p = random_point(rng, [0.0, 0.0, 1.5], [20.0, 20.0, 4.0], placed)
        placed.append(p)
        riss.append({
            "id": f"ris{k + 1}",
            "center": p.round(3).tolist(),
            "orientation": ris_euler_facing(p, ue, rng.uniform(-0.4, 0.4)),
            "grid": [8, 8],
            "spacing": LAM / 2,
        })
    ue_state = {
        "position": ue.round(3).tolist(),
        "velocity": rng.normal(0.0, 1.5, 3).round(3).tolist(),
        "clock_bias": float(round(rng.uniform(-50e-9, 50e-9), 12)) if wb else 0.0,
        "orientation": [float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(-0.6, 0.6)),
                        float(rng.uniform(-0.6, 0.6))] if ue_array else [0.0, 0.0, 0.0],
    }
    return {
        "name": name,
        "table_row": row,
        "carrier_hz": CARRIER,
        "signaling": {"kind": "WB", "bandwidth_hz": 400e6} if wb else {"kind": "NB"},
        "ue_antenna": {"type": "array", "nx": 4, "ny": 4, "spacing": LAM / 2} if ue_array else {"type": "single"},
        "measurement_mix": mix,
        "los_blocked": [],
        "bss": bss,
        "riss": riss,
        "ue": ue_state,
    }


def replica():
    # Desk-scale stand-in for the two-RIS 60 GHz laboratory layout.
    f = 60e9
    lam = C / f
    ue = [0.45, 0.6, 0.0]
    riss = []
    for k, x in enumerate([0.0, 0.9]):
        riss.append({
            "id": f"ris{k + 1}",
            "center": [x, 0.0, 0.0],
            "orientation": [0.0, 0.0, -math.pi / 2],
            "grid": [8, 3],
            "spacing": lam / 2,
        })
    return {
        "name": "experiment_replica",
        "table_row": 0,
        "carrier_hz": f,
        "signaling": {"kind": "NB"},
        "ue_antenna": {"type": "single"},
        "measurement_mix": ["AoD"],
        "los_blocked": [],
        "bss": [{"id": "tx", "position": [0.45, 1.4, 0.0], "orientation": [-math.pi / 2, 0.0, 0.0],
                 "antenna": {"type": "single"}}],
        "riss": riss,
        "ue": {"position": ue, "velocity": [0.0, 0.0, 0.0], "clock_bias": 0.0, "orientation": [0.0, 0.0, 0.0]},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "gallery"))
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for row, spec in ROWS.items():
        doc = row_scene(row, args.seed + row)
        (out / f"row{row:02d}_{spec[0]}.json").write_text(json.dumps(doc, indent=2) + "\n")
    (out / "experiment_replica.json").write_text(json.dumps(replica(), indent=2) + "\n")


if __name__ == "__main__":
    main()
