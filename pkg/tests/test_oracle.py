import random

import pytest

from oreach.errors import ResourceLimitError, ValidationError
from oreach.logic import Signature
from oreach.ontology import standard_translate
from oreach.oracle import (
    FiniteInterpretation,
    Morphism,
    amalgamate,
    check_model,
    enumerate_models,
    is_embedding,
    random_model,
    set_partitions,
)
from oreach.parsing import parse_onto


def count(text, n, **kw):
    return sum(1 for _ in enumerate_models(standard_translate(parse_onto(text)), n, **kw))


def test_model_counts():
    sig = Signature(frozenset({"A"}))
    # one free concept: 2^n extensions
    assert sum(1 for _ in enumerate_models(standard_translate(parse_onto("")), 2, signature=sig)) == 4
    # A <= not B: each element is in A, in B, or in neither
    assert count("A <= not B", 2) == 9
    assert count("A <= not B", 3) == 27
    # plus a constant in A: 3 images, and that element has only one choice
    assert count("A <= not B\nA(a)", 2) == 2 * 3
    assert count("A <= not B\nA(a)", 3) == 3 * 9


def test_domain_bound():
    with pytest.raises(ResourceLimitError):
        list(enumerate_models(standard_translate(parse_onto("A <= B")), 5))


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


def base():
    return FiniteInterpretation(("a",), {"A": {"a"}}, {"r": set()}, {"c": "a"})


def test_embeddings():
    I0 = base()
    I1 = FiniteInterpretation(("a", "b"), {"A": {"a"}}, {"r": {("a", "b")}}, {"c": "a"})
    assert is_embedding(Morphism(I0, I1, {"a": "a"}))
    I2 = FiniteInterpretation(("a", "b"), {"A": {"a"}}, {"r": {("a", "a")}}, {"c": "a"})
    assert not is_embedding(Morphism(I0, I2, {"a": "a"}))
    assert not is_embedding(Morphism(I1, I1, {"a": "a", "b": "a"}))


def test_amalgam_of_models():
    T = standard_translate(parse_onto("exists r <= A\nexists r- <= B\nA <= not B\nA(c)"))
    rng = random.Random(2)
    I0 = random_model(T, ("c",), {"c": "c"}, rng)
    I1 = random_model(T, ("c", "p"), {"c": "c"}, rng, fixed=I0)
    I2 = random_model(T, ("c", "q"), {"c": "c"}, rng, fixed=I0)
    A = amalgamate(I1, I2, I0)
    assert check_model(A, T)
    assert set(A.domain) == {"c", "p", "q"}


def test_amalgam_rejects_overlap():
    I0 = base()
    with pytest.raises(ValidationError):
        amalgamate(I0, FiniteInterpretation(("a",), {"A": set()}, {"r": set()}, {"c": "a"}), I0)


def test_interpretation_validation():
    with pytest.raises(ValidationError):
        FiniteInterpretation(("a",), {"A": {"b"}})
