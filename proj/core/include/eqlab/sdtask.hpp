#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "eqlab/rng.hpp"

namespace eqlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// The L fixed training symbols, one per row, each drawn N(0, I/d).
struct SymbolPool {
    Matrix symbols;
    std::uint64_t seed = 0;

    int L() const { return static_cast<int>(symbols.rows()); }
    int d() const { return static_cast<int>(symbols.cols()); }
};

/// Observation noise eta ~ N(0, sigma2 I / d).
struct NoiseSpec {
    double sigma2 = 0.0;
};

struct SDExample {
    Vector x;  // (z1; z2), length 2d
    int y = 0;
};

/// A batch of examples stored column-wise: inputs is D x N.
struct Batch {
    Matrix inputs;
    std::vector<int> labels;
    /// Pool indices (u, v) per column for training batches; empty for test batches.
    std::vector<std::pair<int, int>> symbol_ids;

    Index size() const { return inputs.cols(); }
    Index dim() const { return inputs.rows(); }
    SDExample example(Index j) const { return {inputs.col(j), labels[static_cast<std::size_t>(j)]}; }
};

SymbolPool sample_symbol_pool(int L, int d, std::uint64_t seed);

/// 1 iff the two pool indices name the same symbol.
int label(const SymbolPool& pool, int i, int j);

/// N/2 same pairs then N/2 different pairs drawn from the pool.
/// Different pairs: u uniform over [L], v uniform over [L] \ {u}.
/// Each slot receives its own noise draw.
Batch make_train_batch(const SymbolPool& pool, int N, NoiseSpec noise, Rng& rng);

/// Balanced batch built from freshly drawn symbols.
Batch make_test_batch(int N, int d, NoiseSpec noise, Rng& rng);

// Flat binary dumps for inspection.
// Layout: "EQSD", u32 version=1, u32 kind (0 pool, 1 batch), u64 rows, u64 cols,
// f64 sigma2, u64 seed, rows x cols f64 row-major; batches append rows x i32 labels.
void write_pool(const std::filesystem::path& path, const SymbolPool& pool, NoiseSpec noise = {});
void write_batch(const std::filesystem::path& path, const Batch& batch, NoiseSpec noise, std::uint64_t seed);
SymbolPool read_pool(const std::filesystem::path& path);
Batch read_batch(const std::filesystem::path& path);

}  // namespace eqlab
