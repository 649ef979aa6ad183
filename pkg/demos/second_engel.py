"""How the 2-Engel identity (x,y,x) = 0 behaves over different coefficients.

Run: python demos/second_engel.py
"""

from lievar import VarietySpec, parse_identity, relatively_free
from lievar.coeffring import CoeffDomain

ident = parse_identity("(x,y,x) = 0")

for text in ("zmod:5", "zmod:3", "int"):
    dom = CoeffDomain.parse(text)
    R = relatively_free(VarietySpec([ident], dom), 4, 4)
    print(f"over {dom}:")
    for d, size in R.quotient_sizes().items():
        print(f"  degree {d}: ambient {R.ctx.dimension(d):3d}  quotient {size}")
    b = R.nilpotency_exponent()
    print(f"  nilpotency exponent {b.value} (full certificate: {b.full_certificate})")
    print()

# Over Z the degree-3 quotient is pure 3-torsion: a nonzero element survives
# but three times it lies in the ideal.
R = relatively_free(VarietySpec([ident], CoeffDomain(0)), 3, 3)
w = R.ctx.left_normed(R.ctx.generators())
print("over Z, (x1,x2,x3) is zero in the quotient:", R.is_zero(w))
print("over Z, 3*(x1,x2,x3) is zero in the quotient:", R.is_zero(3 * w))
