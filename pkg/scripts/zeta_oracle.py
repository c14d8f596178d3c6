"""Regenerate the stored table of zeta_K(1 - k) for K = Q(sqrt 5).

Values come from the diagonal-restriction route, which uses only SL_2(Z)
q-expansions and ideal divisor sums; the Bernoulli-number route is used as
a cross-check and the script aborts on any disagreement.

    python scripts/zeta_oracle.py [--k-max 40]
"""

import argparse
import json
from pathlib import Path

from bergmanlab.hilbert2.forms import dedekind_zeta_neg, zeta_from_restriction

OUT = Path(__file__).resolve().parents[1] / "src" / "bergmanlab" / "hilbert2" / "zeta_q5.json"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=40)
    args = ap.parse_args()
    table = {}
    for k in range(2, args.k_max + 1, 2):
        z = zeta_from_restriction(k)
        if z != dedekind_zeta_neg(k):
            raise SystemExit(f"routes disagree at k={k}")
        table[str(k)] = str(z)
    OUT.write_text(json.dumps({"field": "Q(sqrt5)", "zeta_1_minus_k": table}, indent=1) + "\n")
    print(f"wrote {len(table)} values to {OUT}")


if __name__ == "__main__":
    main()
