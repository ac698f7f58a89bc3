#!/usr/bin/env python3
"""Regenerate the bundled ingredient certificates in fixtures/ingredients.

The certificates are produced by the package's own providers (explicit
constructions and seeded search) and re-verified on write; they make the
end-to-end acceptance run self-contained even if the in-process providers
are disabled or out of budget.
"""

import json
import sys
from pathlib import Path

from hwpkit.factor import factorization_to_json, verify_factorization
from hwpkit.hwp import (provide_equipartite_factorization,
                        provide_uniform_factorization)

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "ingredients"

WANTED = [
    ("uniform", dict(vp=32, c=4)),
    ("uniform", dict(vp=32, c=8)),
    ("uniform", dict(vp=16, c=4)),
    ("equipartite", dict(t=3, z=4, c=4)),
    ("equipartite", dict(t=3, z=8, c=8)),
]


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for kind, params in WANTED:
        if kind == "uniform":
            tf = provide_uniform_factorization(params["vp"], params["c"], seed=42)
            name = f"uniform_v{params['vp']}_c{params['c']}.json"
        else:
            tf = provide_equipartite_factorization(params["t"], params["z"],
                                                   params["c"], seed=42)
            name = f"equipartite_t{params['t']}_z{params['z']}_c{params['c']}.json"
        chk = verify_factorization(tf.graph, tf)
        if not chk:
            print(f"refusing to write invalid {name}: {chk.reason}", file=sys.stderr)
            return 1
        path = OUT / name
        path.write_text(json.dumps(factorization_to_json(tf, include_labels=False),
                                   sort_keys=True, separators=(",", ":")) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
