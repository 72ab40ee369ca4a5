"""Pure-Python twin of the compiled nested-sum kernel.

Same fixed point representation (Python ints scaled by ``2**(64*frac_limbs)``)
and the same truncating division, so results agree bit for bit.
"""

from __future__ import annotations


def nested_sums(compositions, d_max: int, weak: bool, frac_limbs: int, checkpoints):
    one = 1 << (64 * frac_limbs)
    marks = sorted(set(int(c) for c in checkpoints))
    results = []
    for comp in compositions:
        comp = tuple(int(x) for x in comp)
        k = len(comp)
        state = [0] * k + [one]
        vals = {}
        mi = 0
        while mi < len(marks) and marks[mi] <= 0:
            vals[marks[mi]] = state[0]
            mi += 1
        order = range(k - 1, -1, -1) if weak else range(k)
        for d in range(1, d_max + 1):
            for j in order:
                state[j] += state[j + 1] // d ** comp[j]
            while mi < len(marks) and marks[mi] == d:
                vals[d] = state[0]
                mi += 1
        results.append([vals.get(c) for c in checkpoints])
    return results
