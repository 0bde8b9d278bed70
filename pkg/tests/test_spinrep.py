import pytest

from onsk.field import Scalar, make_params, sample_params
from onsk.linalg import Operator
from onsk.spinrep import (
    FAMILIES,
    RangeError,
    check_defining_relations,
    generators,
    global_flip,
    local_spin,
    make_family,
)

ONE = Scalar(1)


def test_family_aliases_and_bounds():
    assert make_family("a", 3).tag == "A1"
    assert make_family("bt1", 4).tag == "BT1"
    assert make_family("D2", 2).n == 2
    with pytest.raises(RangeError):
        make_family("A1", 2)
    with pytest.raises(RangeError):
        make_family("D2", 1)
    with pytest.raises(RangeError):
        make_family("B1", 2)
    with pytest.raises(RangeError):
        make_family("E8", 3)


def test_cartan_a1():
    assert make_family("A1", 3).cartan == ((2, -1, -1), (-1, 2, -1), (-1, -1, 2))
    c4 = make_family("A1", 4).cartan
    assert c4[0] == (2, -1, 0, -1)
    assert c4[2] == (0, -1, 2, -1)


def test_cartan_d2():
    assert make_family("D2", 2).cartan == ((2, -2, 0), (-1, 2, -1), (0, -2, 2))


def test_cartan_b1():
    assert make_family("B1", 3).cartan == (
        (2, 0, -1, 0),
        (0, 2, -1, 0),
        (-1, -1, 2, -1),
        (0, 0, -2, 2),
    )


def test_cartan_bt1():
    assert make_family("BT1", 3).cartan == (
        (2, -2, 0, 0),
        (-1, 2, -1, -1),
        (0, -1, 2, 0),
        (0, -1, 0, 2),
    )


def test_cartan_d1_small_cycle():
    # n = 3 closes into a 4-cycle; n = 4 has a degree-4 middle node
    assert make_family("D1", 3).cartan == (
        (2, 0, -1, -1),
        (0, 2, -1, -1),
        (-1, -1, 2, 0),
        (-1, -1, 0, 2),
    )
    c = make_family("D1", 4).cartan
    assert c[2] == (-1, -1, 2, -1, -1)
    assert sum(1 for x in c[2] if x == -1) == 4


def test_cartan_symmetrizable():
    # pexp symmetrizes the Cartan matrix: pexp[i] a[i][j] = pexp[j] a[j][i]
    for tag, n in (("A1", 4), ("D2", 3), ("B1", 3), ("BT1", 3), ("D1", 4)):
        fam = make_family(tag, n)
        m = fam.nprime + 1
        for i in range(m):
            for j in range(m):
                assert fam.pexp[i] * fam.cartan[i][j] == fam.pexp[j] * fam.cartan[j][i]


def test_pexp():
    assert make_family("A1", 3).pexp == (2, 2, 2)
    assert make_family("D2", 2).pexp == (1, 2, 1)
    assert make_family("B1", 3).pexp == (2, 2, 2, 1)
    assert make_family("BT1", 3).pexp == (1, 2, 2, 2)
    assert make_family("D1", 3).pexp == (2, 2, 2, 2)


def test_local_spin_actions():
    # state |10> is integer 1: bit i-1 holds the spin at site i
    sz1 = local_spin("z", 1, 2)
    assert sz1.apply({1: ONE}) == {1: ONE}
    assert sz1.apply({2: ONE}) == {2: -ONE}
    assert local_spin("+", 2, 2).apply({3: ONE}) == {}
    assert local_spin("+", 2, 2).apply({1: ONE}) == {3: ONE}
    assert local_spin("-", 1, 2).apply({1: ONE}) == {0: ONE}
    assert global_flip(2).apply({1: ONE}) == {2: ONE}
    with pytest.raises(RangeError):
        local_spin("z", 0, 2)
    with pytest.raises(RangeError):
        local_spin("z", 3, 2)
    with pytest.raises(RangeError):
        local_spin("w", 1, 2)


def test_pauli_algebra():
    i = Scalar(0, 1, 1)
    for site, n in ((1, 2), (2, 3)):
        x = local_spin("x", site, n)
        y = local_spin("y", site, n)
        z = local_spin("z", site, n)
        sp = local_spin("+", site, n)
        sm = local_spin("-", site, n)
        dim = 1 << n
        eye = Operator.identity(dim)
        assert x @ x == eye and y @ y == eye and z @ z == eye
        assert x @ y == z.scale(i)
        assert sp == (x + y.scale(i)).scale(Scalar(1, 0, 2))
        assert sm == (x - y.scale(i)).scale(Scalar(1, 0, 2))
        assert sp @ sm - sm @ sp == z


def test_generator_examples():
    params = make_params(Scalar(2, 0, 5), Scalar(3, 0, 7))
    z, p = params.z, params.p

    a1 = generators(make_family("A1", 3), params)
    assert a1.e[1].apply({1: ONE}) == {2: ONE}          # e1 |100> = |010>
    assert a1.e[0].apply({4: ONE}) == {1: z}            # e0 |001> = z |100>
    assert a1.kplus[0].get(1, 1) == p ** 2              # k0 on |100>
    assert a1.kplus[2].get(4, 4) == p ** 2              # k2 on |001>

    d2 = generators(make_family("D2", 2), params)
    assert d2.kplus[0].get(2, 2) == p ** -1             # k0 |01> = p^{-1} |01>
    assert d2.e[0].apply({0: ONE}) == {1: z}            # e0 |00> = z |10>
    assert d2.e[2].apply({2: ONE}) == {0: ONE}          # e2 |01> = |00>
    assert d2.f[2].apply({0: ONE}) == {2: ONE}

    b1 = generators(make_family("B1", 3), params)
    assert b1.e[0].apply({0: ONE}) == {3: z ** 2}       # e0 |000> = z^2 |110>
    assert b1.kplus[0].get(0, 0) == p ** -2

    d1 = generators(make_family("D1", 3), params)
    assert d1.f[3].apply({0: ONE}) == {6: ONE}          # f3 |000> = |011>
    assert d1.e[3].apply({6: ONE}) == {0: ONE}
    assert d1.kplus[3].get(0, 0) == p ** 2


def test_k_inverses_and_f_transpose():
    params = sample_params(3)
    for tag, n in (("A1", 3), ("D2", 2), ("BT1", 3)):
        fam = make_family(tag, n)
        gens = generators(fam, params)
        dim = 1 << n
        eye = Operator.identity(dim)
        for node in range(fam.nprime + 1):
            assert gens.kplus[node] @ gens.kminus[node] == eye
    # f is the transpose of e up to the spectral weight
    a1 = generators(make_family("A1", 3), params)
    z = params.z
    assert a1.f[0] == a1.e[0].transpose().scale(z ** -2)
    assert a1.f[1] == a1.e[1].transpose()


def test_defining_relations_all_families():
    for tag in FAMILIES:
        n = 2 if tag == "D2" else 3
        fam = make_family(tag, n)
        for seed in (0, 1):
            params = sample_params(seed)
            rep = check_defining_relations(fam, generators(fam, params), params)
            assert rep.passed, rep.failures()


def test_defining_relations_negative_control():
    fam = make_family("A1", 3)
    params = sample_params(0)
    gens = generators(fam, params)
    broken = list(gens.e)
    broken[1] = broken[1].scale(Scalar(2))
    from onsk.spinrep import GeneratorSet

    bad = GeneratorSet(fam, gens.z, broken, gens.f, gens.kplus, gens.kminus)
    rep = check_defining_relations(fam, bad, params)
    assert not rep.passed
    assert any("e1 f1" in c.name for c in rep.failures())
