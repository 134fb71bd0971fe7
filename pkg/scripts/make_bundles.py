"""Regenerate the sample JSON bundles in bundles/."""

import json
import sys
from pathlib import Path

from cctlab.algkit import algebra_to_dict, dual_numbers, ground_field, split_pair, upper_triangular
from cctlab.diagram import module_to_dict, regular_diag_module
from cctlab.exalg import QQ
from cctlab.fincat import category_to_dict, chain_category, discrete_category, parallel_pair
from cctlab.instances import curated_diagrams, square_poset

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "bundles")


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    dump("p2.json", {"objects": ["0", "1"], "relations": [["0", "1"]]})
    dump("chain3.json", category_to_dict(chain_category(3)))
    dump("square.json", category_to_dict(square_poset()))
    dump("parallel_pair.json", category_to_dict(parallel_pair()))
    dump("discrete2.json", category_to_dict(discrete_category(2)))
    dump("point.json", {"objects": ["*"]})

    dump("k.json", algebra_to_dict(ground_field(QQ)))
    dump("dual_numbers.json", algebra_to_dict(dual_numbers(QQ)))
    dump("split_pair.json", algebra_to_dict(split_pair(QQ)))
    dump("t2.json", algebra_to_dict(upper_triangular(QQ)))
    # basis 1, x, y with xx = y, yx = x, xy = yy = 0: (xx)x = x but x(xx) = 0
    e = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    mul = [{"i": 0, "j": b, "coeffs": e[b]} for b in range(3)] + [{"i": a, "j": 0, "coeffs": e[a]} for a in (1, 2)]
    mul += [{"i": 1, "j": 1, "coeffs": e[2]}, {"i": 2, "j": 1, "coeffs": e[1]}]
    bad = {"field": "QQ", "dim": 3, "unit": e[0], "mul": mul, "name": "nonassociative"}
    dump("nonassociative.json", bad)

    dump("p2_const_k.json", {"field": "QQ", "category": "p2.json",
                             "algebras": {"0": "k.json", "1": "k.json"}, "homs": {"0<1": [["1"]]}})
    dump("p2_dual_to_k.json", {"field": "QQ", "category": "p2.json",
                               "algebras": {"0": "dual_numbers.json", "1": "k.json"},
                               "homs": {"0<1": [["1"], ["0"]]}})
    dump("point_dual.json", {"field": "QQ", "category": "point.json", "algebras": {"*": "dual_numbers.json"}})
    dump("discrete2_k.json", {"field": "QQ", "category": "discrete2.json",
                              "algebras": {"0": "k.json", "1": "k.json"}})
    dump("parallel_pair_const_k.json", {"field": "QQ", "category": "parallel_pair.json",
                                        "algebras": {o: "k.json" for o in parallel_pair().objects},
                                        "homs": {m: [["1"]] for m in parallel_pair().non_identity()}})
    A = curated_diagrams(QQ)["dual-to-k-P2"]
    reg = module_to_dict(regular_diag_module(A, True))
    reg["diagram"] = "p2_dual_to_k.json"
    dump("p2_dual_to_k.regular.json", reg)


if __name__ == "__main__":
    main()
