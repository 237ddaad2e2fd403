#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string_view>

#include "eqlab/errors.hpp"

// Little-endian primitives shared by the pool, checkpoint and feature formats.
// All formats start with a 4-byte magic followed by a uint32 version.

namespace eqlab::binary {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw ParseError("unexpected end of file");
    return value;
}

inline void put_magic(std::ostream& out, std::string_view magic, std::uint32_t version) {
    out.write(magic.data(), 4);
    put<std::uint32_t>(out, version);
}

/// Reads and checks the magic; returns the version.
inline std::uint32_t expect_magic(std::istream& in, std::string_view magic) {
    std::array<char, 4> buf{};
    in.read(buf.data(), 4);
    if (in.gcount() != 4 || std::string_view(buf.data(), 4) != magic)
        throw ParseError("bad magic, expected " + std::string(magic));
    return get<std::uint32_t>(in);
}

/// Writes a matrix row-major.
inline void put_rows(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

inline Eigen::MatrixXd get_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
    return m;
}

}  // namespace eqlab::binary
