"""Walk through the five-gene example: validate, solve, explain, extend.

    python demos/fig1_walkthrough.py
"""

from pathlib import Path

from dicosat import (
    RuleOrder,
    build_cotree,
    extend_to_full,
    format_relations,
    parse_relations,
    serialize_cotree,
    validate,
)
from dicosat.satisfiability import FIXED_ORDERS, rule_graphs

inst = parse_relations((Path(__file__).parent / "data" / "fig1.rel").read_text())
print("vertices:", " ".join(inst.vertices))
print("violations:", validate(inst) or "none")

# which rule fires at the root?  G0 and G1 stay connected, GX splits
g0, g1, gx = rule_graphs(inst)
print("G0 arcs:", len(g0.arcs), " G1 arcs:", len(g1.arcs), " GX arcs:", len(gx.arcs))

out = build_cotree(inst, verify=True)
print("cotree:", serialize_cotree(out.cotree))

full = extend_to_full(inst)
print("\nfull extension:")
print(format_relations(type(inst)(inst.vertices, full)), end="")

# every rule order finds a cotree; the trees may differ but all explain the input
print("\nby rule order:")
for order in FIXED_ORDERS + (RuleOrder.parse("rand:7"),):
    print(f"  {order!s:>8}  {serialize_cotree(build_cotree(inst, order).cotree)}")
