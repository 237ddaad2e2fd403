#include "eqlab/visiontask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "eqlab/binary_io.hpp"

namespace eqlab {

namespace {

void require_even_batch(int N) {
    if (N <= 0 || N % 2 != 0) throw std::invalid_argument("batch size must be positive and even, got " + std::to_string(N));
}

void require_board(int patch_px, int patches_per_side) {
    if (patch_px < 1) throw std::invalid_argument("patch_px must be >= 1");
    if (patches_per_side < 1 || patches_per_side * patches_per_side < 2)
        throw std::invalid_argument("board needs at least two patches");
}

// Two distinct patch indices.
std::pair<int, int> pick_patches(int n_patches, Rng& rng) {
    const int p1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_patches)));
    int p2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_patches - 1)));
    if (p2 >= p1) ++p2;
    return {p1, p2};
}

// Index pair (u, v) with u != v from [0, n).
std::pair<int, int> pick_distinct(int n, Rng& rng) { return pick_patches(n, rng); }

std::uint64_t random_mask(int bits, Rng& rng) {
    const std::uint64_t full = (bits == 64) ? ~0ULL : ((1ULL << bits) - 1);
    for (;;) {
        const std::uint64_t m = rng.next_u64() & full;
        if (m != 0) return m;
    }
}

std::uint64_t random_test_mask(const PsvrtPatterns& pats, Rng& rng) {
    for (;;) {
        const std::uint64_t m = random_mask(pats.bits, rng);
        if (!pats.train_set.contains(m)) return m;
    }
}

void draw_pattern(Matrix& inputs, Index col, int side, int patch_px, int patches_per_side, int patch,
                  std::uint64_t mask) {
    const int pr = patch / patches_per_side;
    const int pc = patch % patches_per_side;
    for (int r = 0; r < patch_px; ++r)
        for (int c = 0; c < patch_px; ++c)
            if ((mask >> (r * patch_px + c)) & 1ULL)
                inputs((pr * patch_px + r) * side + pc * patch_px + c, col) = 1.0;
}

// ---- pentomino helpers

CellSet normalized(CellSet cells) {
    int r0 = cells[0].first, c0 = cells[0].second;
    for (auto [r, c] : cells) {
        r0 = std::min(r0, r);
        c0 = std::min(c0, c);
    }
    for (auto& [r, c] : cells) {
        r -= r0;
        c -= c0;
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

CellSet rotated(const CellSet& cells) {
    CellSet out = cells;
    for (auto& [r, c] : out) {
        const int nr = c;
        const int nc = -r;
        r = nr;
        c = nc;
    }
    return normalized(out);
}

std::vector<CellSet> rotation_orbit(const CellSet& cells) {
    std::vector<CellSet> orbit;
    CellSet cur = normalized(cells);
    for (int k = 0; k < 4; ++k) {
        if (std::find(orbit.begin(), orbit.end(), cur) == orbit.end()) orbit.push_back(cur);
        cur = rotated(cur);
    }
    return orbit;
}

std::vector<Pentomino> enumerate_pentominoes() {
    // Grow every fixed polyomino cell by cell up to five cells.
    using Poly = std::set<Cell>;
    std::set<Poly> layer{{Cell{0, 0}}};
    for (int size = 1; size < 5; ++size) {
        std::set<Poly> next;
        for (const auto& p : layer)
            for (auto [r, c] : p)
                for (auto [dr, dc] : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
                    Cell n{r + dr, c + dc};
                    if (p.contains(n)) continue;
                    Poly q = p;
                    q.insert(n);
                    // translate to the origin so equal shapes compare equal
                    int r0 = q.begin()->first, c0 = q.begin()->second;
                    for (auto [qr, qc] : q) {
                        r0 = std::min(r0, qr);
                        c0 = std::min(c0, qc);
                    }
                    Poly t;
                    for (auto [qr, qc] : q) t.insert({qr - r0, qc - c0});
                    next.insert(std::move(t));
                }
        layer = std::move(next);
    }

    std::map<CellSet, Pentomino> by_canonical;
    for (const auto& p : layer) {
        CellSet cells;
        std::copy(p.begin(), p.end(), cells.begin());
        auto orbit = rotation_orbit(cells);
        const CellSet canon = *std::min_element(orbit.begin(), orbit.end());
        if (by_canonical.contains(canon)) continue;
        std::stable_partition(orbit.begin(), orbit.end(), [&](const CellSet& c) { return c == canon; });
        by_canonical[canon] = Pentomino{canon, std::move(orbit)};
    }
    std::vector<Pentomino> out;
    for (auto& [k, v] : by_canonical) out.push_back(std::move(v));
    return out;
}

void draw_shape(Matrix& inputs, Index col, const PentominoConfig& cfg, int patch, const CellSet& cells) {
    int h = 0, w = 0;
    for (auto [r, c] : cells) {
        h = std::max(h, r + 1);
        w = std::max(w, c + 1);
    }
    const int side = cfg.side_px();
    const int pr = patch / cfg.patches_per_side;
    const int pc = patch % cfg.patches_per_side;
    const int r0 = pr * cfg.patch_px + (cfg.patch_px - h) / 2;
    const int c0 = pc * cfg.patch_px + (cfg.patch_px - w) / 2;
    for (auto [r, c] : cells) inputs((r0 + r) * side + c0 + c, col) = 1.0;
}

// Separable Gaussian blur restricted to one patch (zero outside it).
void blur_patch(Matrix& inputs, Index col, const PentominoConfig& cfg, int patch) {
    const int P = cfg.patch_px;
    const int side = cfg.side_px();
    const int radius = static_cast<int>(std::ceil(3.0 * cfg.blur_sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (cfg.blur_sigma * cfg.blur_sigma));
        ksum += k[static_cast<std::size_t>(i + radius)];
    }
    for (auto& v : k) v /= ksum;

    const int pr = patch / cfg.patches_per_side;
    const int pc = patch % cfg.patches_per_side;
    Matrix img(P, P), tmp(P, P);
    for (int r = 0; r < P; ++r)
        for (int c = 0; c < P; ++c) img(r, c) = inputs((pr * P + r) * side + pc * P + c, col);
    for (int r = 0; r < P; ++r)
        for (int c = 0; c < P; ++c) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                if (c + i >= 0 && c + i < P) s += k[static_cast<std::size_t>(i + radius)] * img(r, c + i);
            tmp(r, c) = s;
        }
    for (int r = 0; r < P; ++r)
        for (int c = 0; c < P; ++c) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                if (r + i >= 0 && r + i < P) s += k[static_cast<std::size_t>(i + radius)] * tmp(r + i, c);
            inputs((pr * P + r) * side + pc * P + c, col) = s;
        }
}

}  // namespace

// ---------------------------------------------------------------- PSVRT

PsvrtPatterns make_psvrt_patterns(const PsvrtConfig& cfg) {
    require_board(cfg.patch_px, cfg.patches_per_side);
    const int bits = cfg.patch_px * cfg.patch_px;
    if (bits > 63) throw std::invalid_argument("patch_px^2 must be <= 63");
    const double n_masks = std::ldexp(1.0, bits) - 1.0;
    if (cfg.n_train_patterns < 2 || cfg.n_train_patterns > n_masks - 2)
        throw std::invalid_argument("n_train_patterns must lie in [2, 2^bits - 3]");

    PsvrtPatterns pats;
    pats.bits = bits;
    Rng rng(derive_seed(cfg.seed, {0x50535652}));
    while (static_cast<int>(pats.train.size()) < cfg.n_train_patterns) {
        const std::uint64_t m = random_mask(bits, rng);
        if (pats.train_set.insert(m).second) pats.train.push_back(m);
    }
    return pats;
}

Batch generate_psvrt_batch(const PsvrtConfig& cfg, const PsvrtPatterns& pats, Split split, int N, Rng& rng) {
    require_board(cfg.patch_px, cfg.patches_per_side);
    require_even_batch(N);
    if (pats.bits != cfg.patch_px * cfg.patch_px) throw std::invalid_argument("pattern pool does not match patch size");
    const int side = cfg.side_px();
    const int n_patches = cfg.patches_per_side * cfg.patches_per_side;
    const int n_train = static_cast<int>(pats.train.size());

    Batch batch{Matrix::Zero(cfg.image_size(), N), std::vector<int>(static_cast<std::size_t>(N)), {}};
    for (int j = 0; j < N; ++j) {
        const bool same = j < N / 2;
        std::uint64_t m1 = 0, m2 = 0;
        if (split == Split::train) {
            if (same) {
                m1 = m2 = pats.train[rng.below(static_cast<std::uint64_t>(n_train))];
            } else {
                auto [u, v] = pick_distinct(n_train, rng);
                m1 = pats.train[static_cast<std::size_t>(u)];
                m2 = pats.train[static_cast<std::size_t>(v)];
            }
        } else {
            m1 = random_test_mask(pats, rng);
            if (same) {
                m2 = m1;
            } else {
                do m2 = random_test_mask(pats, rng);
                while (m2 == m1);
            }
        }
        auto [p1, p2] = pick_patches(n_patches, rng);
        draw_pattern(batch.inputs, j, side, cfg.patch_px, cfg.patches_per_side, p1, m1);
        draw_pattern(batch.inputs, j, side, cfg.patch_px, cfg.patches_per_side, p2, m2);
        batch.labels[static_cast<std::size_t>(j)] = same ? 1 : 0;
    }
    return batch;
}

Batch generate_psvrt_batch(const PsvrtConfig& cfg, Split split, int N, Rng& rng) {
    return generate_psvrt_batch(cfg, make_psvrt_patterns(cfg), split, N, rng);
}

// ------------------------------------------------------------ Pentomino

const std::vector<Pentomino>& pentomino_shapes() {
    static const std::vector<Pentomino> shapes = enumerate_pentominoes();
    return shapes;
}

int pentomino_index(const CellSet& cells) {
    const CellSet n = normalized(cells);
    const auto& shapes = pentomino_shapes();
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (const auto& r : shapes[i].rotations)
            if (r == n) return static_cast<int>(i);
    return -1;
}

std::vector<int> choose_train_shapes(int n_train, std::uint64_t seed) {
    const int total = static_cast<int>(pentomino_shapes().size());
    if (n_train < 1 || n_train > total) throw std::invalid_argument("n_train must lie in [1, 18]");
    std::vector<int> idx(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng(derive_seed(seed, {0x50454e54}));
    for (int i = total - 1; i > 0; --i)
        std::swap(idx[static_cast<std::size_t>(i)], idx[rng.below(static_cast<std::uint64_t>(i + 1))]);
    idx.resize(static_cast<std::size_t>(n_train));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Batch generate_pentomino_batch(const PentominoConfig& cfg, Split split, int N, Rng& rng,
                               std::vector<PentominoPlacement>* placements) {
    require_board(cfg.patch_px, cfg.patches_per_side);
    require_even_batch(N);
    if (cfg.patch_px < 7) throw std::invalid_argument("patch_px must be >= 7 to leave a border around a pentomino");
    if (cfg.blur_sigma < 0.0) throw std::invalid_argument("blur_sigma must be nonnegative");
    const int total = static_cast<int>(pentomino_shapes().size());
    std::vector<bool> in_train(static_cast<std::size_t>(total), false);
    for (int s : cfg.train_shapes) {
        if (s < 0 || s >= total) throw std::invalid_argument("shape index out of range");
        if (in_train[static_cast<std::size_t>(s)]) throw std::invalid_argument("duplicate shape index");
        in_train[static_cast<std::size_t>(s)] = true;
    }
    std::vector<int> pool;
    for (int s = 0; s < total; ++s)
        if (in_train[static_cast<std::size_t>(s)] == (split == Split::train)) pool.push_back(s);
    if (pool.empty()) throw std::invalid_argument("shape split is empty");
    if (pool.size() < 2) throw std::invalid_argument("shape split needs at least two shapes for different pairs");

    const auto& shapes = pentomino_shapes();
    const int n_patches = cfg.patches_per_side * cfg.patches_per_side;
    const int n_pool = static_cast<int>(pool.size());
    auto random_rotation = [&](int s) -> const CellSet& {
        const auto& rots = shapes[static_cast<std::size_t>(s)].rotations;
        return rots[rng.below(rots.size())];
    };

    Batch batch{Matrix::Zero(cfg.image_size(), N), std::vector<int>(static_cast<std::size_t>(N)), {}};
    if (placements) placements->assign(static_cast<std::size_t>(N), {});
    for (int j = 0; j < N; ++j) {
        const bool same = j < N / 2;
        int s1 = 0, s2 = 0;
        if (same) {
            s1 = s2 = pool[rng.below(static_cast<std::uint64_t>(n_pool))];
        } else {
            auto [u, v] = pick_distinct(n_pool, rng);
            s1 = pool[static_cast<std::size_t>(u)];
            s2 = pool[static_cast<std::size_t>(v)];
        }
        const CellSet& r1 = random_rotation(s1);
        const CellSet& r2 = random_rotation(s2);
        auto [p1, p2] = pick_patches(n_patches, rng);
        draw_shape(batch.inputs, j, cfg, p1, r1);
        draw_shape(batch.inputs, j, cfg, p2, r2);
        bool blurred = false;
        if (split == Split::train && cfg.blur_sigma > 0.0 && rng.uniform() < cfg.blur_prob) {
            blur_patch(batch.inputs, j, cfg, p1);
            blur_patch(batch.inputs, j, cfg, p2);
            blurred = true;
        }
        batch.labels[static_cast<std::size_t>(j)] = same ? 1 : 0;
        if (placements) (*placements)[static_cast<std::size_t>(j)] = {s1, s2, p1, p2, blurred};
    }
    return batch;
}

// ------------------------------------------------------- feature files

void write_feature_dataset(const std::filesystem::path& path, const FeatureDataset& data) {
    if (static_cast<Index>(data.classes.size()) != data.features.cols())
        throw std::invalid_argument("one class label per feature vector required");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    binary::put_magic(out, "EQFT", 1);
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(data.n()));
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(data.d()));
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(data.n_classes));
    binary::put_rows(out, data.features.transpose());
    for (int c : data.classes) binary::put<std::int32_t>(out, c);
}

FeatureDataset load_feature_dataset(const std::filesystem::path& path, bool normalize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    if (binary::expect_magic(in, "EQFT") != 1) throw ParseError("unsupported EQFT version");
    const auto n = binary::get<std::uint64_t>(in);
    const auto d = binary::get<std::uint64_t>(in);
    const auto k = binary::get<std::uint64_t>(in);
    if (n == 0 || d == 0 || n > (1ULL << 31) || d > (1ULL << 31) || k > (1ULL << 31))
        throw ParseError("implausible EQFT header");
    if (k < 2) throw std::invalid_argument("feature dataset needs at least two classes");

    FeatureDataset data;
    data.n_classes = static_cast<int>(k);
    data.features = binary::get_rows(in, static_cast<Index>(n), static_cast<Index>(d)).transpose();
    data.classes.resize(n);
    for (auto& c : data.classes) {
        c = binary::get<std::int32_t>(in);
        if (c < 0 || static_cast<std::uint64_t>(c) >= k) throw ParseError("class index out of range");
    }
    if (normalize) data.features /= std::sqrt(static_cast<double>(d));
    return data;
}

Batch make_feature_batch(const FeatureDataset& data, const std::vector<int>& allowed, int N, Rng& rng) {
    require_even_batch(N);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(data.n_classes));
    for (int i = 0; i < data.n(); ++i) members[static_cast<std::size_t>(data.classes[static_cast<std::size_t>(i)])].push_back(i);
    std::vector<int> usable;
    for (int c : allowed) {
        if (c < 0 || c >= data.n_classes) throw std::invalid_argument("class index out of range");
        if (!members[static_cast<std::size_t>(c)].empty()) usable.push_back(c);
    }
    if (usable.size() < 2) throw std::invalid_argument("need at least two populated classes");

    const int d = data.d();
    const int n_usable = static_cast<int>(usable.size());
    auto pick = [&](int c) {
        const auto& m = members[static_cast<std::size_t>(c)];
        return m[rng.below(m.size())];
    };
    Batch batch{Matrix(2 * d, N), std::vector<int>(static_cast<std::size_t>(N)), {}};
    for (int j = 0; j < N; ++j) {
        const bool same = j < N / 2;
        int i1 = 0, i2 = 0;
        if (same) {
            const int c = usable[rng.below(static_cast<std::uint64_t>(n_usable))];
            const auto& m = members[static_cast<std::size_t>(c)];
            if (m.size() >= 2) {
                auto [a, b] = pick_distinct(static_cast<int>(m.size()), rng);
                i1 = m[static_cast<std::size_t>(a)];
                i2 = m[static_cast<std::size_t>(b)];
            } else {
                i1 = i2 = m[0];
            }
        } else {
            auto [a, b] = pick_distinct(n_usable, rng);
            i1 = pick(usable[static_cast<std::size_t>(a)]);
            i2 = pick(usable[static_cast<std::size_t>(b)]);
        }
        batch.inputs.col(j) << data.features.col(i1), data.features.col(i2);
        batch.labels[static_cast<std::size_t>(j)] = same ? 1 : 0;
    }
    return batch;
}

// ----------------------------------------------------------- inspection

void write_pgm(const std::filesystem::path& path, const Eigen::Ref<const Vector>& pixels, int side) {
    if (side < 1 || pixels.size() != static_cast<Index>(side) * side)
        throw std::invalid_argument("pixel count does not match side^2");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "P5\n" << side << ' ' << side << "\n255\n";
    for (Index i = 0; i < pixels.size(); ++i) {
        const double v = std::clamp(pixels[i], 0.0, 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
}

}  // namespace eqlab
