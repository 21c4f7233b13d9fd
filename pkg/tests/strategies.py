"""Hypothesis strategies for valid towers."""

from hypothesis import strategies as st

from kflag.tower import make_tower
from kflag.weyl import Stage


@st.composite
def stages(draw, families=("A", "C", "B_spin"), max_m=3, parabolic=True):
    family = draw(st.sampled_from(families))
    if family == "A":
        m = draw(st.integers(1, max_m))
        blocks = ()
        if parabolic and m > 1 and draw(st.booleans()):
            cut = draw(st.integers(1, m - 1))
            blocks = (cut, m - cut)
        return Stage("A", m, blocks)
    return Stage(family, draw(st.integers(1, min(max_m, 2))))


@st.composite
def matrices(draw, target: Stage, source: Stage, bound=2):
    mat = []
    blocks = source.block_ranges()
    for _ in range(target.m):
        row = [0] * source.m
        for block in blocks:
            val = draw(st.integers(-bound, bound))
            for s in block:
                row[s] = val
        mat.append(row)
    if target.is_spin:
        # make the column sums admissible by shifting the last row blockwise
        want = draw(st.integers(0, 1)) if source.is_spin else 0
        for block in blocks:
            total = sum(mat[i][block[0]] for i in range(target.m))
            if total % 2 != want:
                for s in block:
                    mat[-1][s] += 1
    return mat


@st.composite
def towers(draw, max_stages=3, families=("A", "C", "B_spin"), max_m=3, parabolic=True):
    r = draw(st.integers(1, max_stages))
    ss = [draw(stages(families, max_m, parabolic)) for _ in range(r)]
    maps = {}
    for j in range(2, r + 1):
        for l in range(1, j):
            if draw(st.booleans()):
                maps[(j, l)] = draw(matrices(ss[j - 1], ss[l - 1]))
    return make_tower(ss, maps)


def type_a_towers(max_stages=3, max_m=3):
    return towers(max_stages=max_stages, families=("A",), max_m=max_m, parabolic=False)
