from app.services.cache import CountCache
from app.services.counting import BetaNormalTable, MOpenTable, NormalFormTable, QAbstractionTable, SuperclassTable


def test_round_trip_m_open(tmp_path, natural):
    cache = CountCache(tmp_path)
    table = MOpenTable(natural)
    expected = table.value(0, 30)
    path = cache.save(table)
    assert path.name == "m-open_1-1-1-1_-.txt"
    assert path.read_text(encoding="ascii").splitlines()[0] == "spec=1,1,1,1 family=m-open params=- version=1"

    restored = MOpenTable(natural)
    assert cache.load(restored)
    assert restored.top == table.top
    assert restored.rows == table.rows
    assert restored.value(0, 30) == expected
    assert restored.value(0, 40) == MOpenTable(natural).value(0, 40)


def test_missing_file(tmp_path, natural):
    assert not CountCache(tmp_path / "absent").load(MOpenTable(natural))


def test_parameters_are_part_of_the_key(tmp_path, natural):
    cache = CountCache(tmp_path)
    table = SuperclassTable(natural, 4)
    table.value(0, 12)
    cache.save(table)
    assert "N=4" in cache.path_for(table).read_text(encoding="ascii").splitlines()[0]
    assert not cache.load(SuperclassTable(natural, 5))
    assert cache.load(SuperclassTable(natural, 4))


def test_mismatched_header_is_ignored(tmp_path, natural, binary):
    cache = CountCache(tmp_path)
    table = MOpenTable(natural)
    table.value(0, 10)
    path = cache.save(table)
    path.write_text(path.read_text(encoding="ascii").replace("version=1", "version=0"), encoding="ascii")
    assert not cache.load(MOpenTable(natural))


def test_corrupt_file_is_ignored(tmp_path, natural):
    cache = CountCache(tmp_path)
    table = MOpenTable(natural)
    table.value(0, 10)
    path = cache.save(table)
    path.write_text(cache.header(table) + "\ninf 0 0\ninf 5 7\n", encoding="ascii")
    restored = MOpenTable(natural)
    assert not cache.load(restored)
    assert restored.top == []


def test_q_abstraction_rows(tmp_path, natural):
    cache = CountCache(tmp_path)
    table = QAbstractionTable(natural)
    expected = table.value(1, 2, 14)
    cache.save(table)
    restored = QAbstractionTable(natural)
    assert cache.load(restored)
    assert restored.rows == table.rows
    assert restored.value(1, 2, 14) == expected


def test_normal_form_tables_keep_extending(tmp_path, binary):
    cache = CountCache(tmp_path)
    for family in (NormalFormTable, BetaNormalTable):
        table = family(binary)
        table.value(0, 20)
        cache.save(table)
        restored = family(binary)
        assert cache.load(restored)
        assert restored.value(0, 20) == table.value(0, 20)
        assert restored.value(1, 35) == family(binary).value(1, 35)
