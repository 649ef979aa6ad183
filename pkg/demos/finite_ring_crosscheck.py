"""Export a relatively free quotient as a finite ring and check it by brute force.

Run: python demos/finite_ring_crosscheck.py
"""

from lievar import VarietySpec, parse_identity, relatively_free
from lievar.coeffring import CoeffDomain
from lievar.oracle import (
    agreement_check,
    from_relatively_free,
    heisenberg,
    series_by_spans,
    sl2,
    validate_structure,
)

R = relatively_free(VarietySpec([parse_identity("(x,y,x) = 0")], CoeffDomain(3)), 2, 3)
F = from_relatively_free(R)
print(f"quotient has {F.dim} basis elements, order {F.order}: {F.labels}")
print("valid structure:", validate_structure(F)[0])
lc, der = series_by_spans(F)
print("lower central orders by spans:", lc.orders)
print("engine sizes per term:", [sum(R.subspace_sizes(t).values()) for t in R.lower_central_terms()])

for ring, text in [(F, "(x,y,x) = 0"), (F, "(x,y,z) = 0"), (heisenberg(3), "(x,y;x,z) = 0"), (sl2(3), "(x1,x2;x3,x4) = 0")]:
    a = agreement_check(ring, parse_identity(text), cap=ring.order**4)
    print(f"{ring.name or 'quotient':18} {text:22} brute={a.brute!s:5} structural={a.structural!s:5} agree={a.agree}")
