"""Print the word-count model over degree and grid size, plus break-even steps."""
from bfs2d.costmodel import ModelParams, breakeven_sb, ratio

print(f"{'k':>4} {'p_c':>6} {'ratio s_b=3':>12} {'ratio s_b=4':>12} {'break-even s_b':>15}")
for k in (4, 8, 16, 32, 64):
    for p_c in (4, 16, 64, 128, 512):
        r3 = ratio(ModelParams.square(k, p_c, 3))
        r4 = ratio(ModelParams.square(k, p_c, 4))
        print(f"{k:>4} {p_c:>6} {r3:>12.2f} {r4:>12.2f} {breakeven_sb(k, p_c):>15.2f}")
