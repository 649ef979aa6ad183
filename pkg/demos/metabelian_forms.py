"""Several identities that cut out the metabelian variety, compared degree by degree.

Run: python demos/metabelian_forms.py
"""

from lievar import VarietySpec, parse_identity, relatively_free
from lievar.coeffring import CoeffDomain
from lievar.variety import variety_equal

Z = CoeffDomain(0)


def show(sizes):
    """Invariant factor lists as Z^r plus torsion, e.g. {3: 'Z^20'}."""
    out = {}
    for d, fs in sizes.items():
        free = fs.count(0)
        tors = [f for f in fs if f]
        parts = ([f"Z^{free}"] if free else []) + [f"Z/{f}" for f in tors]
        out[d] = " + ".join(parts) or "0"
    return out

metabelian = VarietySpec([parse_identity("(x1,x2;x3,x4) = 0")], Z)
swap_tail = VarietySpec([parse_identity("(x1,x2,x3,x4) = (x1,x2,x4,x3)")], Z)

print("tail swap vs metabelian, rank 4 class 5:", variety_equal(swap_tail, metabelian, 4, 5))

R = relatively_free(metabelian, 4, 5)
print("metabelian quotient over Z:", show(R.quotient_sizes()))
for step in R.derived_series().steps:
    print(f"  L^({step['step']}):", show(step["sizes"]))
print("solvable length:", R.solvable_length().value)

# the center of the rank-2 metabelian ring at class 5
R2 = relatively_free(metabelian, 2, 5)
print("rank 2 center by degree:", show(R2.subspace_sizes(R2.center())))
