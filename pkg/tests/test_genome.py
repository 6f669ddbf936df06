import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sosarch.errors import FormatError
from sosarch.genome import (Genome, GenomeLayout, contributions, genome_from_string, genome_to_string,
                            interface_bit_index, read_genomes)


def test_interface_positions():
    assert interface_bit_index(GenomeLayout(4), 1, 2) == 4
    assert interface_bit_index(GenomeLayout(4), 2, 3) == 7
    big = GenomeLayout(22)
    assert interface_bit_index(big, 21, 22) == 252
    assert big.total_bits == 253


@pytest.mark.parametrize("j,jp", [(2, 2), (3, 2), (0, 1), (1, 5)])
def test_interface_index_rejects_bad_pairs(j, jp):
    with pytest.raises(IndexError):
        interface_bit_index(GenomeLayout(4), j, jp)


def test_interface_index_is_a_bijection():
    for n in range(1, 31):
        layout = GenomeLayout(n)
        positions = [interface_bit_index(layout, j, jp)
                     for j in range(1, n + 1) for jp in range(j + 1, n + 1)]
        assert sorted(positions) == list(range(n, layout.total_bits))
        # enumeration order is the bit order
        assert positions == sorted(positions)
        a, b = layout.pair_endpoints()
        assert [layout.pair_at(p) for p in positions] == list(zip(a + 1, b + 1))


def test_string_examples():
    t3 = GenomeLayout(3)
    g = genome_from_string(t3, "101010")
    assert g.systems.tolist() == [1, 0, 1]
    assert g.bits[interface_bit_index(t3, 1, 3)] == 1
    assert g.interfaces.tolist() == [0, 1, 0]
    assert genome_to_string(g) == "101010"
    assert str(g) == "101010"
    with pytest.raises(FormatError):
        genome_from_string(t3, "10")
    with pytest.raises(FormatError):
        genome_from_string(t3, "10a010")
    with pytest.raises(FormatError):
        Genome(t3, [0, 1, 2, 0, 0, 0])


@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=GenomeLayout(n).total_bits,
                                             max_size=GenomeLayout(n).total_bits))))
def test_string_round_trip(case):
    n, bits = case
    layout = GenomeLayout(n)
    g = Genome(layout, bits)
    back = genome_from_string(layout, genome_to_string(g))
    assert back == g and hash(back) == hash(g)
    assert back.bits.tolist() == bits


def test_genomes_are_immutable_values():
    g = Genome.zeros(GenomeLayout(3))
    with pytest.raises(ValueError):
        g.bits[0] = 1
    h = g.with_bit(0, 1)
    assert g.bits[0] == 0 and h.bits[0] == 1
    assert len({g, h, Genome.zeros(GenomeLayout(3))}) == 2


def test_contribution_examples():
    t3 = GenomeLayout(3)
    assert contributions(Genome.ones(t3)) == (1.0, 1.0)
    assert contributions(Genome.zeros(t3)) == (0.0, 0.0)
    assert contributions(genome_from_string(t3, "101010")) == (2 / 3, 1 / 3)
    assert contributions(Genome.ones(GenomeLayout(1))) == (1.0, 0.0)


@given(st.integers(2, 10), st.data())
def test_contributions_depend_only_on_counts(n, data):
    layout = GenomeLayout(n)
    bits = np.array(data.draw(st.lists(st.integers(0, 1), min_size=layout.total_bits,
                                       max_size=layout.total_bits)), dtype=np.uint8)
    perm_s = np.array(data.draw(st.permutations(range(n))))
    perm_i = n + np.array(data.draw(st.permutations(range(layout.n_pairs))))
    shuffled = bits.copy()
    shuffled[:n] = bits[perm_s]
    shuffled[n:] = bits[perm_i]
    sc, ic = contributions(Genome(layout, bits))
    assert (sc, ic) == contributions(Genome(layout, shuffled))
    assert 0.0 <= sc <= 1.0 and 0.0 <= ic <= 1.0


def test_read_genomes(tmp_path):
    (tmp_path / "g.txt").write_text("# seeds\n101010\n\n000000  # empty\n")
    got = read_genomes(tmp_path / "g.txt", GenomeLayout(3))
    assert [str(g) for g in got] == ["101010", "000000"]
