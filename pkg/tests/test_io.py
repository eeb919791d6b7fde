import numpy as np
import pytest

from countstats import counting, io, trajectory
from countstats.errors import ConfigError
from countstats.models import CavityParams, angular
from countstats.trajectory import PulseProtocol


@pytest.fixture
def record():
    p = CavityParams.from_detuning(angular(1.0), angular(10.0), angular(2.7), angular(1.5))
    return trajectory.simulate_pulsed(p, PulseProtocol.default_for(p, 3000, 0.6), 2**63 + 5)


def test_click_record_round_trip_is_bit_exact(tmp_path, record):
    path = io.write_click_record(tmp_path / "clicks.tsv", record)
    back = io.read_click_record(path)
    assert back == record
    assert back.offset.tobytes() == record.offset.tobytes()
    io.write_click_record(tmp_path / "again.tsv", back)
    assert (tmp_path / "again.tsv").read_bytes() == path.read_bytes()


def test_click_record_layout(tmp_path, record):
    lines = io.write_click_record(tmp_path / "c.tsv", record).read_text().splitlines()
    header = [line for line in lines if line.startswith("#")]
    assert header[0].startswith("# version=")
    assert any(line == f"# seed={record.seed}" for line in header)
    body = lines[len(header):]
    assert body[0] == "cycle\toffset_us\tchannel\tdetected"
    assert len(body) == len(record) + 1
    assert body[1].split("\t")[2] in ("CAVITY", "OTHER_MODES")


def test_adjusted_round_trip(tmp_path, record):
    adj = counting.time_adjust(record)
    back, meta = io.read_adjusted_record(io.write_adjusted_record(tmp_path / "a.tsv", adj))
    assert back == adj
    assert meta["source"] == adj.source


def test_csv_round_trip(tmp_path):
    rows = [(0.1, 1 / 3, -2e-300), (1e300, 0.0, 7.0)]
    meta, cols, data = io.read_csv(io.write_csv(tmp_path / "t.csv", ["a", "b", "c"], rows, {"seed": 3}))
    assert cols == ["a", "b", "c"] and meta["seed"] == "3"
    assert np.array_equal(data, np.array(rows))


def test_wrong_format_rejected(tmp_path, record):
    path = io.write_click_record(tmp_path / "c.tsv", record)
    with pytest.raises(ConfigError):
        io.read_adjusted_record(path)
    with pytest.raises(ConfigError):
        io.read_click_record(tmp_path / "missing.tsv")


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError):
        io.ensure_dir(blocker / "sub")
