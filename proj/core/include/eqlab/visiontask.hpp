#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eqlab/rng.hpp"
#include "eqlab/sdtask.hpp"

namespace eqlab {

enum class Split { train, test };

/// Flattened grayscale image in [0, 1], row-major.
struct ImageExample {
    Vector pixels;
    int y = 0;
};

// ---------------------------------------------------------------- PSVRT

struct PsvrtConfig {
    int patch_px = 5;
    int patches_per_side = 5;
    int n_train_patterns = 64;
    std::uint64_t seed = 0;

    int side_px() const { return patch_px * patches_per_side; }
    int image_size() const { return side_px() * side_px(); }
};

/// Bit patterns are masks over patch_px^2 bits, bit (r * patch_px + c) for pixel (r, c).
struct PsvrtPatterns {
    std::vector<std::uint64_t> train;
    std::unordered_set<std::uint64_t> train_set;
    int bits = 0;
};

/// Draws the training pool: n_train_patterns distinct nonzero masks from cfg.seed.
PsvrtPatterns make_psvrt_patterns(const PsvrtConfig& cfg);

/// N/2 same images then N/2 different images. Each image holds two patterns
/// in two distinct patches. Train images use only pool patterns; test images
/// use only masks outside the pool.
Batch generate_psvrt_batch(const PsvrtConfig& cfg, const PsvrtPatterns& patterns, Split split, int N, Rng& rng);
Batch generate_psvrt_batch(const PsvrtConfig& cfg, Split split, int N, Rng& rng);

// ------------------------------------------------------------ Pentomino

using Cell = std::pair<int, int>;  // (row, col)
using CellSet = std::array<Cell, 5>;

/// One one-sided pentomino. `cells` is the canonical orientation: the
/// lexicographically smallest sorted cell list among its rotations, translated
/// so the minimum row and column are 0. `rotations` lists the distinct
/// rotations in the same normal form (1, 2 or 4 entries), canonical first.
struct Pentomino {
    CellSet cells{};
    std::vector<CellSet> rotations;
};

/// The 18 one-sided pentominoes, ordered by canonical cell list.
const std::vector<Pentomino>& pentomino_shapes();

/// Index of the one-sided shape whose rotation orbit contains `cells`
/// (any translation), or -1.
int pentomino_index(const CellSet& cells);

struct PentominoConfig {
    int patch_px = 7;
    int patches_per_side = 2;
    std::vector<int> train_shapes;  // indices into pentomino_shapes(); test = the rest
    double blur_sigma = 0.5;
    double blur_prob = 0.5;
    std::uint64_t seed = 0;

    int side_px() const { return patch_px * patches_per_side; }
    int image_size() const { return side_px() * side_px(); }
};

/// A random subset of n_train shape indices (sorted), drawn from `seed`.
std::vector<int> choose_train_shapes(int n_train, std::uint64_t seed);

/// Per-example metadata kept for label re-derivation in tests.
struct PentominoPlacement {
    int shape1 = 0, shape2 = 0;
    int patch1 = 0, patch2 = 0;
    bool blurred = false;
};

/// N/2 same images (one shape, two independent rotations) then N/2 different
/// images (two distinct shapes). Each shape's bounding box is centered in its
/// patch. Train images are blurred with probability blur_prob, test images never.
Batch generate_pentomino_batch(const PentominoConfig& cfg, Split split, int N, Rng& rng,
                               std::vector<PentominoPlacement>* placements = nullptr);

// ------------------------------------------------------- feature files

/// Precomputed feature vectors with class labels, one vector per column.
struct FeatureDataset {
    Matrix features;  // d x n
    std::vector<int> classes;
    int n_classes = 0;

    int d() const { return static_cast<int>(features.rows()); }
    int n() const { return static_cast<int>(features.cols()); }
};

// Layout: "EQFT", u32 version=1, u64 n, u64 d, u64 n_classes,
// n x d f64 row-major (one vector per row), n x i32 class index in [0, n_classes).
void write_feature_dataset(const std::filesystem::path& path, const FeatureDataset& data);

/// Reads the file; when `normalize` is set every vector is scaled by 1/sqrt(d).
FeatureDataset load_feature_dataset(const std::filesystem::path& path, bool normalize = true);

/// Balanced SD batch over feature vectors: same pairs take two vectors of one
/// class, different pairs vectors of two distinct classes. Only classes in
/// `allowed` are used.
Batch make_feature_batch(const FeatureDataset& data, const std::vector<int>& allowed, int N, Rng& rng);

// ----------------------------------------------------------- inspection

/// Writes a binary PGM (P5, 8-bit) of a side x side image with values in [0, 1].
void write_pgm(const std::filesystem::path& path, const Eigen::Ref<const Vector>& pixels, int side);

}  // namespace eqlab
