from hypothesis import given, settings
from hypothesis import strategies as st

from sepcover.heap import IndexedMinHeap


def test_ties_resolve_to_smaller_id():
    h = IndexedMinHeap({3: 1.0, 1: 1.0, 2: 5.0}.items())
    assert h.peek() == (1.0, 1)
    h.update(1, 2.0)
    assert h.peek() == (1.0, 3)


def test_push_pop_order():
    h = IndexedMinHeap()
    for i, k in enumerate([5, 3, 9, 1]):
        h.push(i, k)
    assert [h.pop()[1] for _ in range(4)] == [3, 1, 0, 2]
    assert h.peek() is None


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 19), st.integers(-50, 50)), max_size=80))
def test_updates_against_dict(ops):
    keys = {i: 0 for i in range(20)}
    h = IndexedMinHeap(keys.items())
    for i, k in ops:
        keys[i] = k
        h.update(i, k)
        assert h.peek() == min((v, j) for j, v in keys.items())
        assert h.check()
