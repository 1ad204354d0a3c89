import io
import struct

import numpy as np
import pytest

from relieforge.heightfield import HeightGrid
from relieforge.mesh import TriangleMesh, close_solid, tessellate_top, validate
from relieforge.stl_io import (
    AsciiStlError,
    StlTruncationError,
    read_stl,
    write_ascii_stl,
    write_binary_stl,
)


def box_mesh(h=3.0):
    return close_solid(HeightGrid.from_spacing(np.full((2, 2), h)))


def one_triangle():
    return TriangleMesh(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([[0, 1, 2]]),
        np.array([[0.0, 0.0, 1.0]]),
    )


def empty_mesh():
    return TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), int), np.zeros((0, 3)))


class TestWriteBinary:
    def test_box_is_684_bytes(self, tmp_path):
        path = tmp_path / "box.stl"
        n = write_binary_stl(box_mesh(), path)
        assert n == 684
        assert path.stat().st_size == 684

    def test_size_law(self):
        for g in (np.ones((2, 2)), np.ones((3, 5)), np.ones((4, 4)) * 2):
            mesh = close_solid(HeightGrid.from_spacing(g))
            buf = io.BytesIO()
            n = write_binary_stl(mesh, buf)
            assert n == 84 + 50 * mesh.triangle_count == len(buf.getvalue())

    def test_empty_mesh(self):
        buf = io.BytesIO()
        assert write_binary_stl(empty_mesh(), buf) == 84
        data = buf.getvalue()
        assert struct.unpack_from("<I", data, 80)[0] == 0

    def test_count_field_little_endian(self):
        buf = io.BytesIO()
        mesh = tessellate_top(HeightGrid.from_spacing(np.ones((2, 2))))
        write_binary_stl(mesh, buf)
        assert buf.getvalue()[80:84] == b"\x02\x00\x00\x00"

    def test_header_never_says_solid(self):
        buf = io.BytesIO()
        write_binary_stl(box_mesh(), buf)
        assert not buf.getvalue().startswith(b"solid")
        assert buf.getvalue()[:10] == b"relieforge"

    def test_attribute_bytes_zero(self):
        buf = io.BytesIO()
        write_binary_stl(one_triangle(), buf)
        assert buf.getvalue()[-2:] == b"\x00\x00"


class TestWriteAscii:
    def test_structure_single_triangle(self):
        buf = io.BytesIO()
        write_ascii_stl(one_triangle(), buf)
        text = buf.getvalue().decode()
        assert text.count("facet normal") == 1
        assert text.count("vertex") == 3
        assert text.startswith("solid ") and text.rstrip().endswith("endsolid relieforge")

    def test_empty_mesh_named_x(self):
        buf = io.BytesIO()
        write_ascii_stl(empty_mesh(), buf, name="x")
        assert buf.getvalue() == b"solid x\nendsolid x\n"

    def test_newline_in_name_rejected(self):
        with pytest.raises(ValueError):
            write_ascii_stl(empty_mesh(), io.BytesIO(), name="two\nlines")

    def test_shortest_roundtrip_formatting(self):
        mesh = TriangleMesh(
            np.array([[0.1, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
            np.array([[0, 1, 2]]),
            np.array([[0.0, 0.0, 1.0]]),
        )
        buf = io.BytesIO()
        write_ascii_stl(mesh, buf)
        text = buf.getvalue().decode()
        assert "vertex 0.1 0.0 0.0" in text
        # and "0.1" reparses to the identical binary32
        assert np.float32("0.1") == np.float32(0.1)


class TestReadStl:
    def test_binary_round_trip_bitwise(self):
        mesh = close_solid(
            HeightGrid.from_spacing(
                np.random.default_rng(3).uniform(0.5, 7, size=(5, 6)),
                dx=80 / 5,
                dy=28 / 4,
            )
        )
        buf = io.BytesIO()
        write_binary_stl(mesh, buf)
        back = read_stl(buf.getvalue())
        assert back.triangle_count == mesh.triangle_count
        narrowed = mesh.vertices[mesh.triangles].astype(np.float32).astype(np.float64)
        assert np.array_equal(back.vertices[back.triangles], narrowed)

    def test_second_round_trip_is_identity(self):
        mesh = box_mesh()
        buf1 = io.BytesIO()
        write_binary_stl(mesh, buf1)
        once = read_stl(buf1.getvalue())
        buf2 = io.BytesIO()
        write_binary_stl(once, buf2)
        assert buf1.getvalue()[84:] == buf2.getvalue()[84:]

    def test_ascii_binary_agreement(self):
        mesh = close_solid(
            HeightGrid.from_spacing(
                np.random.default_rng(9).uniform(0.5, 7, size=(4, 4)), dx=0.7, dy=1.3
            )
        )
        bin_buf, asc_buf = io.BytesIO(), io.BytesIO()
        write_binary_stl(mesh, bin_buf)
        write_ascii_stl(mesh, asc_buf)
        from_bin = read_stl(bin_buf.getvalue())
        from_asc = read_stl(asc_buf.getvalue())
        assert np.array_equal(from_bin.vertices, from_asc.vertices)
        assert np.array_equal(from_bin.triangles, from_asc.triangles)

    def test_round_trip_stays_watertight(self):
        buf = io.BytesIO()
        write_binary_stl(box_mesh(), buf)
        assert validate(read_stl(buf.getvalue())).watertight

    def test_83_byte_file(self):
        with pytest.raises(StlTruncationError):
            read_stl(b"\x00" * 83)

    def test_length_count_mismatch(self):
        buf = io.BytesIO()
        write_binary_stl(box_mesh(), buf)
        with pytest.raises(StlTruncationError, match="12 triangles"):
            read_stl(buf.getvalue()[:-10])

    def test_missing_endfacet_names_line(self):
        text = (
            "solid t\n"
            "  facet normal 0 0 1\n"
            "    outer loop\n"
            "      vertex 0 0 0\n"
            "      vertex 1 0 0\n"
            "      vertex 0 1 0\n"
            "    endloop\n"
            "endsolid t\n"
        )
        with pytest.raises(AsciiStlError, match="line 8") as e:
            read_stl(text.encode())
        assert e.value.line == 8

    def test_bad_ascii_number_names_line(self):
        text = "solid t\n  facet normal 0 0 squid\n"
        with pytest.raises(AsciiStlError, match="line 2"):
            read_stl(text.encode())

    def test_solid_prefixed_binary_falls_back(self):
        buf = io.BytesIO()
        write_binary_stl(one_triangle(), buf)
        data = bytearray(buf.getvalue())
        data[:5] = b"solid"  # hostile header that defeats sniffing
        mesh = read_stl(bytes(data))
        assert mesh.triangle_count == 1

    def test_solid_prefix_both_parses_fail_raises_ascii_error(self):
        with pytest.raises(AsciiStlError):
            read_stl(b"solid nope\n  facet normal garbage\n")

    def test_empty_ascii_solid(self):
        mesh = read_stl(b"solid x\nendsolid x\n")
        assert mesh.triangle_count == 0

    def test_ascii_floats_narrowed_to_binary32(self):
        text = (
            "solid t\n"
            "  facet normal 0 0 1\n"
            "    outer loop\n"
            "      vertex 0.30000001192092896 0 0\n"
            "      vertex 1 0 0\n"
            "      vertex 0 1 0\n"
            "    endloop\n"
            "  endfacet\n"
            "endsolid t\n"
        )
        mesh = read_stl(text.encode())
        assert float(np.float32(0.3)) in mesh.vertices[:, 0]

    def test_stored_normals_retained(self):
        text = (
            "solid t\n"
            "  facet normal 0 0 -1\n"  # wrong on purpose; must be kept
            "    outer loop\n"
            "      vertex 0 0 0\n"
            "      vertex 1 0 0\n"
            "      vertex 0 1 0\n"
            "    endloop\n"
            "  endfacet\n"
            "endsolid t\n"
        )
        mesh = read_stl(text.encode())
        assert np.array_equal(mesh.normals, [[0.0, 0.0, -1.0]])

    def test_read_from_path(self, tmp_path):
        path = tmp_path / "t.stl"
        write_binary_stl(box_mesh(), path)
        assert read_stl(path).triangle_count == 12
