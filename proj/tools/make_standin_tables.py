# Copyright 2026 The hybridbo Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Writes the two bundled 2-D response tables in data/.

Both are synthetic response surfaces on a 21 x 21 grid over [0, 1]^2,
shaped like smooth lab measurements (one broad optimum, a secondary bump,
gentle trend). They exercise the surrogate loader; they are not real data.
"""

import math
import pathlib


def anode(x, y):
    main = 0.9 * math.exp(-((x - 0.68) ** 2 + (y - 0.35) ** 2) / 0.045)
    side = 0.55 * math.exp(-((x - 0.22) ** 2 + (y - 0.78) ** 2) / 0.025)
    return main + side + 0.15 * x * (1.0 - y)


def growth(x, y):
    ridge = math.exp(-((y - 0.55 - 0.25 * math.sin(3.0 * x)) ** 2) / 0.02)
    peak = 0.4 * math.exp(-((x - 0.85) ** 2 + (y - 0.15) ** 2) / 0.01)
    return (0.4 + 0.6 * x * (1.0 - x) * 4.0) * ridge + peak


def write(path, f, n=21):
    with open(path, "w", encoding="utf-8") as out:
        out.write("x1,x2,y\n")
        for i in range(n):
            for j in range(n):
                x, y = i / (n - 1), j / (n - 1)
                out.write(f"{x:.6f},{y:.6f},{f(x, y):.6f}\n")


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent / "data"
    root.mkdir(exist_ok=True)
    write(root / "anode_response.csv", anode)
    write(root / "growth_response.csv", growth)
