import numpy as np
import pytest

from ergomap.errors import ParseError
from ergomap.pgm import read_pgm, write_pgm


def test_reads_ascii_p2():
    data = b"P2\n# a comment\n2 2\n255\n0 64\n128 255\n"
    grid = read_pgm(data)
    assert grid.tolist() == [[0, 64], [128, 255]]


def test_reads_binary_p5_8bit():
    data = b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255])
    assert read_pgm(data).tolist() == [[0, 64], [128, 255]]


def test_reads_binary_p5_16bit_big_endian():
    data = b"P5\n2 1\n65535\n" + (258).to_bytes(2, "big") + (65535).to_bytes(2, "big")
    assert read_pgm(data).tolist() == [[258, 65535]]


def test_header_comments_and_whitespace():
    data = b"P2 # fmt\n#c\n 2\t1 #c\n 7\n3 7\n"
    assert read_pgm(data).tolist() == [[3, 7]]


@pytest.mark.parametrize(
    "data",
    [
        b"P6\n1 1\n255\n\x00\x00\x00",  # wrong magic
        b"P5\n2 2\n255\n\x00\x01",  # truncated payload
        b"P2\n2 2\n255\n1 2 3\n",  # truncated samples
        b"P5\n2 2\n",  # truncated header
        b"P5\n2 x\n255\n\x00\x00\x00\x00",  # non-numeric field
        b"P2\n1 1\n70000\n1\n",  # maxval too large
        b"P2\n1 1\n255\n900\n",  # sample above maxval
    ],
)
def test_malformed_streams_raise(data):
    with pytest.raises(ParseError):
        read_pgm(data)


@pytest.mark.parametrize("maxval,binary", [(255, True), (65535, True), (255, False)])
def test_write_read_round_trip(tmp_path, maxval, binary):
    rng = np.random.default_rng(7)
    grid = rng.integers(0, maxval + 1, size=(5, 9))
    path = tmp_path / "img.pgm"
    write_pgm(grid, path, maxval=maxval, binary=binary)
    assert np.array_equal(read_pgm(path), grid)


def test_read_from_file_object(tmp_path):
    path = tmp_path / "img.pgm"
    write_pgm(np.array([[1, 2], [3, 4]]), path, maxval=255)
    with open(path, "rb") as fh:
        assert read_pgm(fh).tolist() == [[1, 2], [3, 4]]
