"""The GF(16)/GF(2) instance: M = D0 as a (D0, k)-bimodule, so the dual
tower alternates between D0 and k and the pieces are D0- or k-spaces.

    python demos/field_extension.py
"""

from ncsym import IndexedAlgebra, Tilting, preset
from ncsym.beilinson import hilbert_function, verify_serre_duality
from ncsym.tilting import build_DA, verify_DA


cfg = preset("field-extension p=2 d=4")
M = cfg.bimodule
print(f"{cfg.name}: dims {M.dims}, witness hypothesis holds: {cfg.hypothesis}")

S = IndexedAlgebra(M, cfg.witness)
for i in (0, 1):
    dims = [S.dim(i, j) for j in range(i, i + 7)]
    deg = S.field(i).degree
    print(f"row {i}: k-dims {dims}, over D_{i}: {[d // deg for d in dims]}")

# the Euler sequence closes up: cokernel only in column i-2
rep = S.verify_euler_module_sequence(2, 5)
print("Euler module sequence for e_2 S:", "pass" if rep.passed else "FAIL")

T = Tilting(S)
da = verify_DA(build_DA(T.ring))
print("DA injective, End(DA) ~ A:", "pass" if da.passed else "FAIL")

samples = [(f"L{j}", T.L(j)) for j in range(-1, 2)]
print("Serre duality on L-1, L0, L1:", "pass" if verify_serre_duality(T, samples, -1, 1).passed else "FAIL")

# h(L0) counts S_0i over D_i for i >= -1
print("h(L0) on -4..4:", hilbert_function(T, T.L(0)).as_list())
