"""Sample labelled 6-cycles with the final heuristic and compare with the 60 exact ones."""

from swapchain.bench import uniformity_suite
from swapchain.shuffle import FINAL

r = uniformity_suite([2] * 6, 12_000, heuristic=FINAL, seed=3)
print(f"{r.realizations} realizations, counts {min(r.counts)}..{max(r.counts)} "
      f"(expected {r.runs / r.realizations:.0f} each), chi2={r.chi2:.1f}, p={r.p_value:.3f}")
