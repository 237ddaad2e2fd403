#include "eqlab/sdtask.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "eqlab/binary_io.hpp"

namespace eqlab {

namespace {

constexpr std::uint32_t kDumpVersion = 1;

void fill_gaussian(Eigen::Ref<Vector> v, double stddev, Rng& rng) {
    for (Index i = 0; i < v.size(); ++i) v[i] = stddev * rng.normal();
}

void require_even(int N) {
    if (N <= 0 || N % 2 != 0) throw std::invalid_argument("batch size must be positive and even, got " + std::to_string(N));
}

// Writes z = s + eta into one half of column j.
void put_slot(Matrix& inputs, Index j, int slot, const Eigen::Ref<const Vector>& s, double noise_sd, Rng& rng) {
    const Index d = s.size();
    auto dst = inputs.col(j).segment(slot * d, d);
    dst = s;
    if (noise_sd > 0.0)
        for (Index i = 0; i < d; ++i) dst[i] += noise_sd * rng.normal();
}

double noise_sd(NoiseSpec noise, int d) {
    if (noise.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be nonnegative");
    return std::sqrt(noise.sigma2 / d);
}

}  // namespace

SymbolPool sample_symbol_pool(int L, int d, std::uint64_t seed) {
    if (L < 2) throw std::invalid_argument("symbol pool needs L >= 2, got " + std::to_string(L));
    if (d < 1) throw std::invalid_argument("symbol dimension must be >= 1");
    Rng rng(seed);
    SymbolPool pool{Matrix(L, d), seed};
    const double sd = 1.0 / std::sqrt(static_cast<double>(d));
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < d; ++c) pool.symbols(r, c) = sd * rng.normal();
    return pool;
}

int label(const SymbolPool& pool, int i, int j) {
    if (i < 0 || j < 0 || i >= pool.L() || j >= pool.L()) throw std::invalid_argument("symbol index out of range");
    return i == j ? 1 : 0;
}

Batch make_train_batch(const SymbolPool& pool, int N, NoiseSpec noise, Rng& rng) {
    require_even(N);
    const int L = pool.L();
    const int d = pool.d();
    if (L < 2) throw std::invalid_argument("pool must hold at least two symbols");
    const double sd = noise_sd(noise, d);

    Batch batch{Matrix(2 * d, N), std::vector<int>(static_cast<std::size_t>(N)), {}};
    batch.symbol_ids.resize(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const bool same = j < N / 2;
        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
        int v = u;
        if (!same) {
            v = static_cast<int>(rng.below(static_cast<std::uint64_t>(L - 1)));
            if (v >= u) ++v;
        }
        put_slot(batch.inputs, j, 0, pool.symbols.row(u).transpose(), sd, rng);
        put_slot(batch.inputs, j, 1, pool.symbols.row(v).transpose(), sd, rng);
        batch.labels[static_cast<std::size_t>(j)] = same ? 1 : 0;
        batch.symbol_ids[static_cast<std::size_t>(j)] = {u, v};
    }
    return batch;
}

Batch make_test_batch(int N, int d, NoiseSpec noise, Rng& rng) {
    require_even(N);
    if (d < 1) throw std::invalid_argument("symbol dimension must be >= 1");
    const double sd = noise_sd(noise, d);
    const double symbol_sd = 1.0 / std::sqrt(static_cast<double>(d));

    Batch batch{Matrix(2 * d, N), std::vector<int>(static_cast<std::size_t>(N)), {}};
    Vector s1(d);
    Vector s2(d);
    for (int j = 0; j < N; ++j) {
        const bool same = j < N / 2;
        fill_gaussian(s1, symbol_sd, rng);
        if (same) {
            s2 = s1;
        } else {
            fill_gaussian(s2, symbol_sd, rng);
        }
        put_slot(batch.inputs, j, 0, s1, sd, rng);
        put_slot(batch.inputs, j, 1, s2, sd, rng);
        batch.labels[static_cast<std::size_t>(j)] = same ? 1 : 0;
    }
    return batch;
}

void write_pool(const std::filesystem::path& path, const SymbolPool& pool, NoiseSpec noise) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    binary::put_magic(out, "EQSD", kDumpVersion);
    binary::put<std::uint32_t>(out, 0);
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(pool.L()));
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(pool.d()));
    binary::put<double>(out, noise.sigma2);
    binary::put<std::uint64_t>(out, pool.seed);
    binary::put_rows(out, pool.symbols);
}

void write_batch(const std::filesystem::path& path, const Batch& batch, NoiseSpec noise, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    binary::put_magic(out, "EQSD", kDumpVersion);
    binary::put<std::uint32_t>(out, 1);
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(batch.size()));
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(batch.dim()));
    binary::put<double>(out, noise.sigma2);
    binary::put<std::uint64_t>(out, seed);
    binary::put_rows(out, batch.inputs.transpose());
    for (int y : batch.labels) binary::put<std::int32_t>(out, y);
}

namespace {

struct DumpHeader {
    std::uint32_t kind;
    std::uint64_t rows;
    std::uint64_t cols;
    double sigma2;
    std::uint64_t seed;
};

DumpHeader read_header(std::istream& in) {
    if (binary::expect_magic(in, "EQSD") != kDumpVersion) throw ParseError("unsupported EQSD version");
    DumpHeader h{};
    h.kind = binary::get<std::uint32_t>(in);
    h.rows = binary::get<std::uint64_t>(in);
    h.cols = binary::get<std::uint64_t>(in);
    h.sigma2 = binary::get<double>(in);
    h.seed = binary::get<std::uint64_t>(in);
    if (h.rows > (1ULL << 32) || h.cols > (1ULL << 32)) throw ParseError("implausible EQSD dimensions");
    return h;
}

}  // namespace

SymbolPool read_pool(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const auto h = read_header(in);
    if (h.kind != 0) throw ParseError("file holds a batch, not a pool");
    return {binary::get_rows(in, static_cast<Index>(h.rows), static_cast<Index>(h.cols)), h.seed};
}

Batch read_batch(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const auto h = read_header(in);
    if (h.kind != 1) throw ParseError("file holds a pool, not a batch");
    Batch b;
    b.inputs = binary::get_rows(in, static_cast<Index>(h.rows), static_cast<Index>(h.cols)).transpose();
    b.labels.resize(h.rows);
    for (auto& y : b.labels) y = binary::get<std::int32_t>(in);
    return b;
}

}  // namespace eqlab
