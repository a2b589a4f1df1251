import time
from bianchilab.field import *
from bianchilab.presentations import presentation
from bianchilab.congruence import *
from bianchilab.modules import *
from bianchilab.homology import *

F = make_field(-1)
p = presentation(F)
t0 = time.time()
three = principal_ideal(F, F.element(3))
tab = coset_table(p, LevelStructure(three, PRINCIPAL))
sub = rewrite_subgroup(p, tab)
m20 = build_module(F, WeightPair(2, 0))
h0m, h1m = group_homology(sub, m20)
print("Gamma((3)) (2,0): H0 %s" % h0m, flush=True)
print("H1 %s" % h1m, flush=True)
print("total %.1fs" % (time.time() - t0), flush=True)
