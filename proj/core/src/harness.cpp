#include "eqlab/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "detail/parallel.hpp"
#include "eqlab/analysis.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/theory.hpp"

namespace eqlab {

namespace {

constexpr double kLazyGamma = 1e-5;
constexpr int kRichnessInputs = 1000;

std::string fmt_real(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

std::string key_of(const std::vector<std::string>& cells) {
    // task, gamma, L, d, sigma2, seed
    return cells[0] + ',' + cells[1] + ',' + cells[2] + ',' + cells[3] + ',' + cells[4] + ',' + cells[6];
}

bool two_halves(TaskKind t) { return t == TaskKind::sd || t == TaskKind::sd_noisy || t == TaskKind::features; }

// Reads completed run keys and drops a trailing partial line, if any.
std::unordered_set<std::string> completed_keys(const std::filesystem::path& out) {
    std::unordered_set<std::string> keys;
    if (!std::filesystem::exists(out) || std::filesystem::file_size(out) == 0) return keys;

    std::string text;
    {
        std::ifstream in(out, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + out.string());
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    if (text.back() != '\n') {
        const auto cut = text.find_last_of('\n');
        if (cut == std::string::npos) throw ParseError(out.string() + ": no complete header line");
        std::filesystem::resize_file(out, cut + 1);
        text.resize(cut + 1);
    }
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    if (line != csv_header()) throw ParseError(out.string() + ": header does not match the run record columns");
    const auto ncol = run_record_columns().size();
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != ncol) throw ParseError(out.string() + ": row with " + std::to_string(cells.size()) + " columns");
        keys.insert(key_of(cells));
    }
    return keys;
}

struct Sources {
    BatchSource train;
    BatchSource test;
};

Sources make_sources(const SweepSpec& spec, const GridPoint& p, std::uint64_t rs, const FeatureDataset* features) {
    const int batch = spec.train.batch;
    const int test_size = spec.train.test_size;
    switch (spec.task) {
        case TaskKind::sd:
        case TaskKind::sd_noisy: {
            auto pool = std::make_shared<SymbolPool>(sample_symbol_pool(p.L, p.d, derive_seed(rs, {1})));
            const NoiseSpec noise{p.sigma2};
            const int d = p.d;
            return {[pool, batch, noise](Rng& g) { return make_train_batch(*pool, batch, noise, g); },
                    [d, test_size, noise](Rng& g) { return make_test_batch(test_size, d, noise, g); }};
        }
        case TaskKind::psvrt: {
            PsvrtConfig cfg;
            cfg.patches_per_side = p.d;
            cfg.n_train_patterns = p.L;
            cfg.seed = rs;
            auto pats = std::make_shared<PsvrtPatterns>(make_psvrt_patterns(cfg));
            return {[cfg, pats, batch](Rng& g) { return generate_psvrt_batch(cfg, *pats, Split::train, batch, g); },
                    [cfg, pats, test_size](Rng& g) { return generate_psvrt_batch(cfg, *pats, Split::test, test_size, g); }};
        }
        case TaskKind::pentomino: {
            PentominoConfig cfg;
            cfg.patches_per_side = p.d;
            cfg.train_shapes = choose_train_shapes(p.L, rs);
            cfg.seed = rs;
            return {[cfg, batch](Rng& g) { return generate_pentomino_batch(cfg, Split::train, batch, g); },
                    [cfg, test_size](Rng& g) { return generate_pentomino_batch(cfg, Split::test, test_size, g); }};
        }
        case TaskKind::features: {
            std::vector<int> classes(static_cast<std::size_t>(features->n_classes));
            for (int c = 0; c < features->n_classes; ++c) classes[static_cast<std::size_t>(c)] = c;
            Rng g(derive_seed(rs, {4}));
            for (int i = features->n_classes - 1; i > 0; --i)
                std::swap(classes[static_cast<std::size_t>(i)], classes[g.below(static_cast<std::uint64_t>(i + 1))]);
            std::vector<int> train_cls(classes.begin(), classes.begin() + p.L);
            std::vector<int> test_cls(classes.begin() + p.L, classes.end());
            return {[features, train_cls, batch](Rng& r) { return make_feature_batch(*features, train_cls, batch, r); },
                    [features, test_cls, test_size](Rng& r) { return make_feature_batch(*features, test_cls, test_size, r); }};
        }
    }
    throw std::logic_error("unhandled task kind");
}

}  // namespace

std::string_view to_string(TaskKind t) {
    switch (t) {
        case TaskKind::sd: return "sd";
        case TaskKind::sd_noisy: return "sd_noisy";
        case TaskKind::psvrt: return "psvrt";
        case TaskKind::pentomino: return "pentomino";
        case TaskKind::features: return "features";
    }
    return "?";
}

TaskKind parse_task_kind(std::string_view s) {
    for (auto t : {TaskKind::sd, TaskKind::sd_noisy, TaskKind::psvrt, TaskKind::pentomino, TaskKind::features})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown task '" + std::string(s) + "'");
}

double GammaValue::resolve(int d) const { return per_sqrt_d ? value / std::sqrt(static_cast<double>(d)) : value; }

std::string GammaValue::label() const {
    if (per_sqrt_d && value == kLazyGamma) return "lazy";
    return per_sqrt_d ? fmt_real(value) + "/sqrtd" : fmt_real(value);
}

GammaValue parse_gamma(std::string_view s) {
    if (s == "lazy") return {kLazyGamma, true};
    GammaValue g;
    std::string body(s);
    if (const auto pos = body.find("/sqrtd"); pos != std::string::npos && pos + 6 == body.size()) {
        g.per_sqrt_d = true;
        body.resize(pos);
    }
    std::size_t used = 0;
    try {
        g.value = std::stod(body, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != body.size() || !(g.value > 0.0) || !std::isfinite(g.value))
        throw std::invalid_argument("gamma must be 'lazy', '<x>/sqrtd' or a positive number, got '" + std::string(s) + "'");
    return g;
}

SweepSpec default_spec(TaskKind task) {
    SweepSpec s;
    s.task = task;
    switch (task) {
        case TaskKind::sd:
        case TaskKind::sd_noisy:
            s.train.alpha0 = 0.1;
            s.train.output_scale = OutputScale::inv_sqrt_d;
            break;
        case TaskKind::psvrt:
        case TaskKind::pentomino:
            s.train.alpha0 = 0.5;
            s.train.output_scale = OutputScale::unit;
            break;
        case TaskKind::features:
            s.train.alpha0 = 0.01;
            s.train.output_scale = OutputScale::inv_sqrt_d;
            s.d_list = {0};
            break;
    }
    return s;
}

void validate(const SweepSpec& spec) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (spec.gamma_list.empty()) fail("gamma_list is empty");
    if (spec.L_list.empty()) fail("L_list is empty");
    if (spec.d_list.empty()) fail("d_list is empty");
    if (spec.sigma2_list.empty()) fail("sigma2_list is empty");
    if (spec.seeds < 1) fail("seeds must be >= 1");
    for (const auto& g : spec.gamma_list)
        if (!(g.value > 0.0) || !std::isfinite(g.value)) fail("gamma values must be positive");
    for (double s2 : spec.sigma2_list) {
        if (!(s2 >= 0.0) || !std::isfinite(s2)) fail("sigma2 values must be nonnegative");
        if (spec.task != TaskKind::sd_noisy && s2 != 0.0) fail("sigma2 must be 0 unless the task is sd_noisy");
    }
    const auto& t = spec.train;
    if (t.width < 1 || t.batch < 2 || t.batch % 2 || t.steps < 1 || t.eval_every < 1 || t.test_size < 2 || t.test_size % 2)
        fail("train config needs width >= 1, even batch and test_size >= 2, steps >= 1, eval_every >= 1");
    if (!(t.alpha0 > 0.0)) fail("alpha0 must be positive");

    for (int L : spec.L_list) {
        switch (spec.task) {
            case TaskKind::sd:
            case TaskKind::sd_noisy:
            case TaskKind::psvrt:
                if (L < 2) fail("L must be >= 2");
                break;
            case TaskKind::pentomino:
                if (L < 2 || L > 16) fail("pentomino L (training shapes) must lie in [2, 16]");
                break;
            case TaskKind::features:
                if (L < 2) fail("features L (training classes) must be >= 2");
                break;
        }
    }
    for (int d : spec.d_list) {
        switch (spec.task) {
            case TaskKind::sd:
            case TaskKind::sd_noisy:
                if (d < 1) fail("d must be >= 1");
                break;
            case TaskKind::psvrt:
            case TaskKind::pentomino:
                if (d < 2) fail("patches per side must be >= 2");
                break;
            case TaskKind::features:
                if (spec.d_list.size() != 1) fail("features takes a single d entry (the file fixes the dimension)");
                break;
        }
    }
    if (spec.task == TaskKind::features && spec.features_path.empty()) fail("features task needs features_path");
}

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
    std::vector<GridPoint> out;
    for (const auto& g : spec.gamma_list)
        for (int L : spec.L_list)
            for (int d : spec.d_list)
                for (double s2 : spec.sigma2_list)
                    for (int k = 0; k < spec.seeds; ++k) out.push_back({g, L, d, s2, k});
    return out;
}

std::uint64_t run_seed(const SweepSpec& spec, const GridPoint& p) {
    return derive_seed(spec.master_seed,
                       {static_cast<std::uint64_t>(spec.task), std::bit_cast<std::uint64_t>(p.gamma.value),
                        static_cast<std::uint64_t>(p.gamma.per_sqrt_d), static_cast<std::uint64_t>(p.L),
                        static_cast<std::uint64_t>(p.d), std::bit_cast<std::uint64_t>(p.sigma2),
                        static_cast<std::uint64_t>(p.seed_index)});
}

const std::vector<std::string>& run_record_columns() {
    static const std::vector<std::string> cols{
        "task",          "gamma",           "L",             "d",              "sigma2",
        "m",             "seed",            "steps",         "best_test_acc",  "final_train_acc",
        "readout_ratio", "mean_pos_align",  "mean_neg_align", "richness_metric", "wall_time_s"};
    return cols;
}

std::string csv_header() {
    std::string h;
    for (const auto& c : run_record_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

std::string to_csv_row(const RunRecord& r) {
    std::string s = r.task;
    for (const auto& cell :
         {fmt_real(r.gamma), std::to_string(r.L), std::to_string(r.d), fmt_real(r.sigma2), std::to_string(r.m),
          std::to_string(r.seed), std::to_string(r.steps), fmt_real(r.best_test_acc), fmt_real(r.final_train_acc),
          fmt_real(r.readout_ratio), fmt_real(r.mean_pos_align), fmt_real(r.mean_neg_align),
          fmt_real(r.richness_metric), fmt_real(r.wall_time_s)})
        s += ',' + cell;
    return s;
}

RunRecord run_point(const SweepSpec& spec, const GridPoint& p, const FeatureDataset* features, TrainResult* result) {
    const auto t0 = std::chrono::steady_clock::now();
    std::unique_ptr<FeatureDataset> owned;
    if (spec.task == TaskKind::features) {
        if (!features) {
            owned = std::make_unique<FeatureDataset>(load_feature_dataset(spec.features_path));
            features = owned.get();
        }
        if (p.L > features->n_classes - 2)
            throw std::invalid_argument("features L leaves fewer than two test classes");
    }
    const int d = spec.task == TaskKind::features ? features->d() : p.d;
    const std::uint64_t rs = run_seed(spec, p);
    const Sources src = make_sources(spec, p, rs, features);

    TrainConfig cfg = spec.train;
    cfg.gamma = p.gamma.resolve(d);
    cfg.seed = derive_seed(rs, {2});
    const TrainResult res = train(cfg, src.train, src.test);

    RunRecord r;
    r.task = std::string(to_string(spec.task));
    r.gamma = cfg.gamma;
    r.L = p.L;
    r.d = d;
    r.sigma2 = p.sigma2;
    r.m = cfg.width;
    r.seed = p.seed_index;
    r.steps = cfg.steps;
    r.best_test_acc = res.best_test_acc;
    r.final_train_acc = res.history.empty() ? std::nan("") : res.history.back().train_acc;
    try {
        r.readout_ratio = readout_ratio(res.params_final);
    } catch (const UndefinedQuantity&) {
        r.readout_ratio = std::nan("");
    }
    if (two_halves(spec.task)) {
        const auto rep = alignment_report(res.params_final);
        r.mean_pos_align = rep.summary.mean_pos_align;
        r.mean_neg_align = rep.summary.mean_neg_align;
    } else {
        r.mean_pos_align = r.mean_neg_align = std::nan("");
    }
    {
        Rng g(derive_seed(rs, {3}));
        const Batch probe = src.test(g);
        const Index n = std::min<Index>(probe.size(), kRichnessInputs);
        // keep both labels: the test batch is ordered same-then-different
        Matrix X(probe.dim(), n);
        for (Index j = 0; j < n; ++j) X.col(j) = probe.inputs.col((j * probe.size()) / n);
        try {
            r.richness_metric = richness_metric(res.snapshot.as_params(res.params_final), res.params_final, X);
        } catch (const UndefinedQuantity&) {
            r.richness_metric = std::nan("");
        }
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (result) *result = res;
    return r;
}

SweepReport run_sweep(const SweepSpec& spec, const std::filesystem::path& out,
                      const std::function<void(const RunRecord&)>& on_row) {
    validate(spec);
    std::unique_ptr<FeatureDataset> features;
    if (spec.task == TaskKind::features)
        features = std::make_unique<FeatureDataset>(load_feature_dataset(spec.features_path));

    const auto done = completed_keys(out);
    const bool fresh = !std::filesystem::exists(out) || std::filesystem::file_size(out) == 0;

    SweepReport report;
    std::vector<GridPoint> todo;
    for (const auto& p : expand_grid(spec)) {
        // the key is built from the same formatting the row uses
        RunRecord probe;
        probe.task = std::string(to_string(spec.task));
        probe.gamma = p.gamma.resolve(features ? features->d() : p.d);
        probe.L = p.L;
        probe.d = features ? features->d() : p.d;
        probe.sigma2 = p.sigma2;
        probe.seed = p.seed_index;
        if (done.contains(key_of(split_csv(to_csv_row(probe))))) {
            ++report.rows_skipped;
            continue;
        }
        todo.push_back(p);
    }

    std::ofstream file(out, std::ios::app | std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + out.string() + " for appending");
    if (fresh) {
        file << csv_header() << '\n';
        file.flush();
        if (!file) throw std::runtime_error("cannot write header to " + out.string());
    }

    std::mutex write_mutex;
    try {
        detail::parallel_for(
            todo.size(),
            [&](std::size_t i) {
                const RunRecord r = run_point(spec, todo[i], features.get());
                const std::string line = to_csv_row(r) + '\n';
                std::lock_guard lock(write_mutex);
                file.write(line.data(), static_cast<std::streamsize>(line.size()));
                file.flush();
                if (!file) throw std::runtime_error("write to " + out.string() + " failed");
                ++report.rows_written;
                if (on_row) on_row(r);
            },
            spec.workers);
    } catch (const std::exception& e) {
        throw std::runtime_error("sweep stopped after " + std::to_string(report.rows_written) +
                                 " completed rows: " + e.what());
    }
    return report;
}

std::vector<std::pair<int, double>> theory_overlay(const std::vector<int>& L_list, double rho) {
    std::vector<std::pair<int, double>> rows;
    rows.reserve(L_list.size());
    for (int L : L_list) rows.emplace_back(L, rich_accuracy_prediction(L, rho));
    return rows;
}

void write_theory_overlay(const std::filesystem::path& out, const std::vector<std::pair<int, double>>& rows) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + out.string());
    file << "L,predicted_acc\n";
    for (auto [L, acc] : rows) file << L << ',' << fmt_real(acc) << '\n';
    if (!file) throw std::runtime_error("write to " + out.string() + " failed");
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1c", "fig1bf", "fig2", "fig3bc", "fig3ef"};
    return names;
}

SweepSpec preset(std::string_view name) {
    auto gammas = [](std::initializer_list<std::string_view> xs) {
        std::vector<GammaValue> out;
        for (auto x : xs) out.push_back(parse_gamma(x));
        return out;
    };
    SweepSpec s;
    if (name == "fig1c") {
        // accuracy vs L across richness, d = 64 instead of 256
        s = default_spec(TaskKind::sd);
        s.gamma_list = gammas({"lazy", "0.01", "0.1", "1"});
        s.L_list = {2, 3, 4, 8, 16, 32, 64, 128};
        s.d_list = {64};
    } else if (name == "fig1bf") {
        // dimension sensitivity, rich vs lazy
        s = default_spec(TaskKind::sd);
        s.gamma_list = gammas({"lazy", "1"});
        s.L_list = {4, 8, 16, 32, 64};
        s.d_list = {16, 64, 256};
    } else if (name == "fig2") {
        s = default_spec(TaskKind::sd_noisy);
        s.gamma_list = gammas({"lazy", "0.1", "1"});
        s.L_list = {2, 4, 8, 16, 32, 64};
        s.d_list = {64};
        s.sigma2_list = {1e-4, 0.1, 0.5, 1.0};  // 1e-4 stands in for the noiseless case
    } else if (name == "fig3bc") {
        s = default_spec(TaskKind::psvrt);
        s.gamma_list = gammas({"0.01", "0.1", "1"});
        s.L_list = {16, 64, 256, 1024};
        s.d_list = {5};
        s.train.steps = 4000;
    } else if (name == "fig3ef") {
        s = default_spec(TaskKind::pentomino);
        s.gamma_list = gammas({"0.01", "0.1", "1"});
        s.L_list = {4, 8, 12, 14};
        s.d_list = {2};
        s.train.steps = 4000;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    s.seeds = 6;
    s.train.width = 1024;
    if (s.task == TaskKind::sd || s.task == TaskKind::sd_noisy) s.train.steps = 2000;
    s.train.eval_every = 100;
    s.train.test_size = 2000;
    return s;
}

}  // namespace eqlab
