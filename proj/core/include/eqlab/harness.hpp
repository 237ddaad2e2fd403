#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqlab/mlp.hpp"
#include "eqlab/visiontask.hpp"

namespace eqlab {

enum class TaskKind { sd, sd_noisy, psvrt, pentomino, features };

std::string_view to_string(TaskKind t);
TaskKind parse_task_kind(std::string_view s);

/// A richness value, either absolute or divided by sqrt(d) at run time.
/// "lazy" is 1e-5 / sqrt(d).
struct GammaValue {
    double value = 1.0;
    bool per_sqrt_d = false;

    double resolve(int d) const;
    std::string label() const;
};

/// Accepts "lazy", "<x>/sqrtd" or a plain positive number.
GammaValue parse_gamma(std::string_view s);

/// Grid axes by task:
///   sd, sd_noisy: L = training symbols, d = symbol dimension
///   psvrt:        L = training patterns, d = patches per side (5-px patches)
///   pentomino:    L = training shapes,   d = patches per side (7-px patches)
///   features:     L = training classes,  d_list must hold one entry and is
///                 replaced by the file's feature dimension in the output
/// sigma2 must be 0 for every task except sd_noisy.
struct SweepSpec {
    TaskKind task = TaskKind::sd;
    std::vector<GammaValue> gamma_list;
    std::vector<int> L_list;
    std::vector<int> d_list;
    std::vector<double> sigma2_list{0.0};
    int seeds = 6;
    std::uint64_t master_seed = 0;
    /// Width, alpha0, batch, steps, eval_every, test_size and output_scale are
    /// used as given; gamma and seed are set per run.
    TrainConfig train;
    std::filesystem::path features_path;
    unsigned workers = 0;  // 0 = hardware concurrency
};

/// Spec with the per-task training defaults: sd tasks alpha0 0.1 and the
/// 1/sqrt(d) prefactor, image tasks alpha0 0.5 and the unit prefactor,
/// feature files alpha0 0.01 and the 1/sqrt(d) prefactor.
SweepSpec default_spec(TaskKind task);

/// Throws std::invalid_argument on an empty axis or a value the task cannot use.
void validate(const SweepSpec& spec);

struct GridPoint {
    GammaValue gamma;
    int L = 0;
    int d = 0;
    double sigma2 = 0.0;
    int seed_index = 0;
};

/// Every (gamma, L, d, sigma2, seed) combination, in axis order.
std::vector<GridPoint> expand_grid(const SweepSpec& spec);

/// derive_seed(master, {task, gamma bits, gamma mode, L, d, sigma2 bits, seed index}).
/// Depends only on the point itself, so growing a grid leaves existing runs unchanged.
std::uint64_t run_seed(const SweepSpec& spec, const GridPoint& point);

struct RunRecord {
    std::string task;
    double gamma = 0.0;  // resolved
    int L = 0;
    int d = 0;
    double sigma2 = 0.0;
    int m = 0;
    int seed = 0;  // seed index within the fan
    int steps = 0;
    double best_test_acc = 0.0;
    double final_train_acc = 0.0;
    double readout_ratio = 0.0;    // nan when all readouts share a sign
    double mean_pos_align = 0.0;   // nan for image tasks
    double mean_neg_align = 0.0;   // nan for image tasks
    double richness_metric = 0.0;  // over up to 1000 test inputs
    double wall_time_s = 0.0;
};

const std::vector<std::string>& run_record_columns();
std::string csv_header();
/// One CSV line without the trailing newline. Reals use %.10g.
std::string to_csv_row(const RunRecord& r);

/// Trains one grid point. `features` may be null for non-feature tasks, or to
/// load spec.features_path on demand. `result` receives the full training result.
RunRecord run_point(const SweepSpec& spec, const GridPoint& point, const FeatureDataset* features = nullptr,
                    TrainResult* result = nullptr);

struct SweepReport {
    int rows_written = 0;
    int rows_skipped = 0;  // already present in the output file
};

/// Runs the grid on a worker pool and appends one row per finished run. An
/// existing file must start with the same header; runs whose key columns
/// (task, gamma, L, d, sigma2, seed) are already present are skipped, so an
/// interrupted sweep resumes. Failures are rethrown as std::runtime_error
/// naming the completed-row count.
SweepReport run_sweep(const SweepSpec& spec, const std::filesystem::path& out,
                      const std::function<void(const RunRecord&)>& on_row = {});

/// (L, predicted rich accuracy) for each L.
std::vector<std::pair<int, double>> theory_overlay(const std::vector<int>& L_list, double rho = 1.5);
/// Writes "L,predicted_acc" rows.
void write_theory_overlay(const std::filesystem::path& out, const std::vector<std::pair<int, double>>& rows);

/// Desk-scale presets: fig1c, fig1bf, fig2, fig3bc, fig3ef.
const std::vector<std::string>& preset_names();
SweepSpec preset(std::string_view name);

}  // namespace eqlab
