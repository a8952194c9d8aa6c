"""
Printed versus corrected relations
==================================

Every relation is evaluated twice: in the form it is usually printed and in
a corrected form.  The verdict says which one matches the curvature computed
directly from the metric.
"""

import numpy as np

from subcurv import build_example, eval_oneill, eval_scalar

hopf = build_example("hopf").spec
x = hopf.sample(np.random.default_rng(3), 1)[0]

for index in range(1, 7):
    rec = eval_oneill(index, hopf, x, seed=0)
    corr = "-" if rec.rel_corrected is None else f"{rec.rel_corrected:.1e}"
    print(f"relation {index}: lhs={rec.lhs:+.6f} printed rel={rec.rel_printed:.1e} "
          f"corrected rel={corr}  -> {rec.verdict.value}")

rec = eval_scalar(hopf, x)
print("scalar curvature", rec.lhs, "block rhs", rec.extras["rhs_block"],
      "full rhs", rec.extras["rhs_full"], "->", rec.extras["matching_conventions"])
