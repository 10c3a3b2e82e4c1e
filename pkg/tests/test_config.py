from chordwalk.core.config import Settings


def test_defaults():
    s = Settings()
    assert s.VERIFY_SIZES == [10, 12, 15, 20, 31, 50, 100]
    assert s.TRAP_METHOD == "expm"
    assert s.OUTPUT_PRECISION == 12


def test_sizes_from_environment(monkeypatch):
    monkeypatch.setenv("CHORDWALK_VERIFY_SIZES", "10, 20,30")
    monkeypatch.setenv("CHORDWALK_TRAP_PLATEAU_M", "[6, 26]")
    monkeypatch.setenv("CHORDWALK_MAX_WORKERS", "2")
    s = Settings()
    assert s.VERIFY_SIZES == [10, 20, 30]
    assert s.TRAP_PLATEAU_M == [6, 26]
    assert s.MAX_WORKERS == 2
