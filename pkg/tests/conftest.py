import numpy as np
from hypothesis import strategies as st


@st.composite
def parent_lists(draw, min_n=1, max_n=10):
    """Random recursive-tree parent lists [p2..pn] with p_i in 1..i-1."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    return [draw(st.integers(min_value=1, max_value=i - 1)) for i in range(2, n + 1)]


def full_parent_array(parent_list):
    arr = np.zeros(len(parent_list) + 2, dtype=np.int64)
    arr[2:] = parent_list
    return arr
