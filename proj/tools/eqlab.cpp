// eqlab command-line tool. Every subcommand accepts --config <file> with
// "key = value" lines named after its long flags; flags on the command line win.

#include <CLI11.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/analysis.hpp"
#include "eqlab/bayes.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/harness.hpp"
#include "eqlab/markov.hpp"
#include "eqlab/mlp.hpp"
#include "eqlab/theory.hpp"
#include "eqlab/visiontask.hpp"

namespace fs = std::filesystem;
using namespace eqlab;

namespace {

// Unsectioned config keys belong to whichever subcommand was invoked.
class SubcommandConfig : public CLI::ConfigINI {
public:
    explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigINI::from_config(input);
        const auto subs = app_->get_subcommands();
        if (!subs.empty())
            for (auto& item : items)
                if (item.parents.empty()) item.parents = {subs.front()->get_name()};
        return items;
    }

private:
    const CLI::App* app_;
};

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Writes to `path`, or stdout when it is empty.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open " + path);
        }
    }
    std::ostream& operator*() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

template <class T>
double accuracy_where(const Vector& logits, const std::vector<int>& labels, T keep) {
    int n = 0, hit = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (!keep(labels[j])) continue;
        ++n;
        hit += (logits[static_cast<Index>(j)] > 0.0) == (labels[j] == 1);
    }
    return n ? static_cast<double>(hit) / n : std::nan("");
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string task = "sd", gamma = "1", out, checkpoint, features, scale;
    int L = 16, d = 64, m = 1024, steps = 2000, batch = 128, eval_every = 100, test_size = 2000;
    double sigma2 = 0.0, alpha0 = 0.0;
    std::uint64_t seed = 0;
};

void add_train(CLI::App& app) {
    auto args = std::make_shared<TrainArgs>();
    auto* sub = app.add_subcommand("train", "Train one network and report its run record")->fallthrough();
    sub->add_option("--task", args->task, "sd | sd_noisy | psvrt | pentomino | features")->capture_default_str();
    sub->add_option("--gamma", args->gamma, "richness: number, <x>/sqrtd or lazy")->capture_default_str();
    sub->add_option("--L", args->L, "training symbols / patterns / shapes / classes")->capture_default_str();
    sub->add_option("--d", args->d, "symbol dimension, or patches per side for image tasks")->capture_default_str();
    sub->add_option("--m", args->m, "hidden width")->capture_default_str();
    sub->add_option("--sigma2", args->sigma2, "observation noise (sd_noisy)")->capture_default_str();
    sub->add_option("--steps", args->steps)->capture_default_str();
    sub->add_option("--alpha0", args->alpha0, "base learning rate (0 = task default)");
    sub->add_option("--batch", args->batch)->capture_default_str();
    sub->add_option("--eval-every", args->eval_every)->capture_default_str();
    sub->add_option("--test-size", args->test_size)->capture_default_str();
    sub->add_option("--output-scale", args->scale, "inv_sqrt_d | unit (default by task)");
    sub->add_option("--features", args->features, "feature file for --task features");
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--out", args->out, "history CSV (step, train_acc, test_acc)");
    sub->add_option("--checkpoint", args->checkpoint, "write final parameters here");
    sub->callback([args] {
        SweepSpec spec = default_spec(parse_task_kind(args->task));
        spec.gamma_list = {parse_gamma(args->gamma)};
        spec.L_list = {args->L};
        if (spec.task != TaskKind::features) spec.d_list = {args->d};
        spec.sigma2_list = {args->sigma2};
        spec.seeds = 1;
        spec.master_seed = args->seed;
        spec.features_path = args->features;
        spec.train.width = args->m;
        spec.train.steps = args->steps;
        spec.train.batch = args->batch;
        spec.train.eval_every = args->eval_every;
        spec.train.test_size = args->test_size;
        if (args->alpha0 > 0.0) spec.train.alpha0 = args->alpha0;
        if (!args->scale.empty()) spec.train.output_scale = parse_output_scale(args->scale);
        validate(spec);

        TrainResult result;
        const RunRecord rec = run_point(spec, expand_grid(spec).front(), nullptr, &result);
        if (!args->out.empty()) {
            Output out(args->out);
            *out << "step,train_acc,test_acc\n";
            for (const auto& h : result.history) *out << h.step << ',' << fmt(h.train_acc) << ',' << fmt(h.test_acc) << '\n';
        }
        if (!args->checkpoint.empty()) write_checkpoint(args->checkpoint, result.params_final, result.snapshot);
        std::cout << csv_header() << '\n' << to_csv_row(rec) << '\n';
    });
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    std::string preset, task = "sd", out, overlay, features;
    std::vector<std::string> gamma;
    std::vector<int> L, d;
    std::vector<double> sigma2;
    int seeds = 6, m = 0, steps = 0, batch = 0, eval_every = 0, test_size = 0;
    unsigned workers = 0;
    double alpha0 = 0.0, rho = 1.5;
    std::uint64_t seed = 0;
};

void add_sweep(CLI::App& app) {
    auto args = std::make_shared<SweepArgs>();
    auto* sub = app.add_subcommand("sweep", "Run a grid of trainings and append rows to a CSV")->fallthrough();
    sub->add_option("--preset", args->preset, "fig1c | fig1bf | fig2 | fig3bc | fig3ef");
    sub->add_option("--task", args->task)->capture_default_str();
    sub->add_option("--gamma", args->gamma, "comma-separated gammas")->delimiter(',');
    sub->add_option("--L", args->L)->delimiter(',');
    sub->add_option("--d", args->d)->delimiter(',');
    sub->add_option("--sigma2", args->sigma2)->delimiter(',');
    auto* seeds_opt = sub->add_option("--seeds", args->seeds, "runs per grid point")->capture_default_str();
    auto* seed_opt = sub->add_option("--seed", args->seed, "master seed")->capture_default_str();
    sub->add_option("--m", args->m);
    sub->add_option("--steps", args->steps);
    sub->add_option("--alpha0", args->alpha0);
    sub->add_option("--batch", args->batch);
    sub->add_option("--eval-every", args->eval_every);
    sub->add_option("--test-size", args->test_size);
    sub->add_option("--workers", args->workers, "0 = hardware concurrency");
    sub->add_option("--features", args->features);
    sub->add_option("--out", args->out, "CSV to append to")->required();
    sub->add_option("--overlay", args->overlay, "also write the rich theory curve over the L grid here");
    sub->add_option("--rho", args->rho, "readout ratio for --overlay")->capture_default_str();
    sub->callback([args, seeds_opt, seed_opt] {
        SweepSpec spec;
        if (!args->preset.empty()) {
            spec = preset(args->preset);
        } else {
            spec = default_spec(parse_task_kind(args->task));
            spec.train.steps = 2000;
            spec.train.eval_every = 100;
            spec.train.test_size = 2000;
        }
        if (!args->gamma.empty()) {
            spec.gamma_list.clear();
            for (const auto& g : args->gamma) spec.gamma_list.push_back(parse_gamma(g));
        }
        if (!args->L.empty()) spec.L_list = args->L;
        if (!args->d.empty()) spec.d_list = args->d;
        if (!args->sigma2.empty()) spec.sigma2_list = args->sigma2;
        if (seeds_opt->count() || args->preset.empty()) spec.seeds = args->seeds;
        if (seed_opt->count()) spec.master_seed = args->seed;
        if (args->m) spec.train.width = args->m;
        if (args->steps) spec.train.steps = args->steps;
        if (args->alpha0 > 0.0) spec.train.alpha0 = args->alpha0;
        if (args->batch) spec.train.batch = args->batch;
        if (args->eval_every) spec.train.eval_every = args->eval_every;
        if (args->test_size) spec.train.test_size = args->test_size;
        if (!args->features.empty()) spec.features_path = args->features;
        spec.workers = args->workers;

        const auto total = expand_grid(spec).size();
        const auto rep = run_sweep(spec, args->out, [&](const RunRecord& r) {
            std::cerr << "[" << to_string(spec.task) << "] gamma=" << fmt(r.gamma) << " L=" << r.L << " d=" << r.d
                      << " sigma2=" << fmt(r.sigma2) << " seed=" << r.seed << " acc=" << fmt(r.best_test_acc) << '\n';
        });
        if (!args->overlay.empty()) {
            if (spec.task != TaskKind::sd) throw std::invalid_argument("--overlay applies to the sd task");
            write_theory_overlay(args->overlay, theory_overlay(spec.L_list, args->rho));
        }
        std::cout << "wrote " << rep.rows_written << " rows, skipped " << rep.rows_skipped << " of " << total << '\n';
    });
}

// ----------------------------------------------------------------- markov

void add_markov(CLI::App& app) {
    struct A {
        int L = 16, batch = 512, seeds = 1;
        std::int64_t steps = 500;
        std::string sign = "positive", out;
        std::uint64_t seed = 0;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("markov", "Simulate the integer walker process")->fallthrough();
    sub->add_option("--L", args->L)->capture_default_str();
    sub->add_option("--batch", args->batch)->capture_default_str();
    sub->add_option("--steps", args->steps, "batches per run")->capture_default_str();
    sub->add_option("--sign", args->sign, "positive | negative")->capture_default_str();
    sub->add_option("--seeds", args->seeds, "independent runs")->capture_default_str();
    sub->add_option("--seed", args->seed, "master seed")->capture_default_str();
    sub->add_option("--out", args->out, "CSV path (default stdout)");
    sub->callback([args] {
        const auto sign = parse_readout_sign(args->sign);
        Output out(args->out);
        *out << "seed,mu_hat,mu_se,eligible,final_alignment,n_plus_final\n";
        for (int k = 0; k < args->seeds; ++k) {
            auto [ens, stats] = run_markov(args->L, args->batch, args->steps, sign, derive_seed(args->seed, {static_cast<std::uint64_t>(k)}));
            double align = std::nan("");
            try {
                align = limiting_alignment(ens);
            } catch (const UndefinedQuantity&) {
            }
            const double mu = stats.mu.eligible >= 1000 ? stats.mu.mu_hat : std::nan("");
            *out << k << ',' << fmt(mu) << ',' << fmt(stats.mu.standard_error) << ',' << stats.mu.eligible << ','
                 << fmt(align) << ',' << (stats.n_plus_trace.empty() ? 0 : stats.n_plus_trace.back()) << '\n';
        }
    });
}

// ------------------------------------------------------------------ bayes

void add_bayes(CLI::App& app) {
    struct A {
        std::string prior = "generalizing", out;
        std::vector<double> sigma2{0.1};
        std::vector<int> L{64};
        int d = 64;
        std::int64_t n = 100000;
        std::uint64_t seed = 0;
        bool csv = false;
        unsigned workers = 0;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("bayes", "Monte-Carlo accuracy of the Bayes classifiers")->fallthrough();
    sub->add_option("--prior", args->prior, "generalizing | memorizing")->capture_default_str();
    sub->add_option("--sigma2", args->sigma2)->delimiter(',')->capture_default_str();
    sub->add_option("--L", args->L, "pool sizes for the memorizing prior")->delimiter(',')->capture_default_str();
    sub->add_option("--d", args->d)->capture_default_str();
    sub->add_option("--n", args->n, "test samples")->capture_default_str();
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--workers", args->workers);
    sub->add_flag("--csv", args->csv, "one CSV row per (sigma2, L)");
    sub->add_option("--out", args->out, "CSV path (implies --csv)");
    sub->callback([args] {
        const auto kind = parse_prior_kind(args->prior);
        const bool csv = args->csv || !args->out.empty();
        Output out(args->out);
        if (csv) *out << "prior,sigma2,d,L,accuracy,standard_error,half_width,n\n";
        const std::vector<int> Ls = kind == PriorKind::memorizing ? args->L : std::vector<int>{0};
        for (double s2 : args->sigma2)
            for (int L : Ls) {
                std::optional<SymbolPool> pool;
                if (kind == PriorKind::memorizing)
                    pool = sample_symbol_pool(L, args->d, derive_seed(args->seed, {0x706f6f6c, static_cast<std::uint64_t>(L)}));
                const auto est = bayes_accuracy_mc(kind, s2, args->d, pool, args->n, args->seed, args->workers);
                if (csv) {
                    *out << to_string(kind) << ',' << fmt(s2) << ',' << args->d << ',' << L << ',' << fmt(est.accuracy) << ','
                         << fmt(est.standard_error) << ',' << fmt(est.half_width) << ',' << est.n << '\n';
                } else {
                    *out << to_string(kind) << " sigma2=" << fmt(s2) << " d=" << args->d;
                    if (kind == PriorKind::memorizing) *out << " L=" << L;
                    *out << ": accuracy " << fmt(est.accuracy) << " +- " << fmt(est.half_width) << " (95%, n=" << est.n
                         << ")\n";
                }
            }
    });
}

// ----------------------------------------------------------------- kernel

void add_kernel(CLI::App& app) {
    struct A {
        int grid = 41;
        std::string out;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("kernel", "Tabulate the ReLU NTK on [-1, 1]")->fallthrough();
    sub->add_option("--grid", args->grid, "number of evenly spaced u values")->capture_default_str();
    sub->add_option("--out", args->out);
    sub->callback([args] {
        if (args->grid < 2) throw std::invalid_argument("--grid must be >= 2");
        Output out(args->out);
        *out << "u,K\n";
        for (int i = 0; i < args->grid; ++i) {
            const double u = -1.0 + 2.0 * i / (args->grid - 1);
            *out << fmt(u) << ',' << fmt(ntk_kernel(u)) << '\n';
        }
    });
}

// ----------------------------------------------------------------- margin

void add_margin(CLI::App& app) {
    struct A {
        int L = 64, d = 16, P = 3000;
        std::uint64_t seed = 0;
        std::string out = "margin.csv", eigen_out;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("margin", "Empirical margin matrix of a training set")->fallthrough();
    sub->add_option("--L", args->L)->capture_default_str();
    sub->add_option("--d", args->d)->capture_default_str();
    sub->add_option("--P", args->P, "training examples")->capture_default_str();
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--out", args->out, "matrix CSV")->capture_default_str();
    sub->add_option("--eigen-out", args->eigen_out, "eigenvalue CSV (default: <out stem>_eigenvalues.csv)");
    sub->callback([args] {
        const auto pool = sample_symbol_pool(args->L, args->d, derive_seed(args->seed, {1}));
        Rng rng(derive_seed(args->seed, {2}));
        const Batch batch = make_train_batch(pool, args->P, {}, rng);
        const MarginMatrix mm = empirical_margin_matrix(batch);
        {
            Output out(args->out);
            for (Index i = 0; i < mm.X.rows(); ++i) {
                for (Index j = 0; j < mm.X.cols(); ++j) *out << (j ? "," : "") << fmt(mm.X(i, j));
                *out << '\n';
            }
        }
        std::string eig = args->eigen_out;
        if (eig.empty()) {
            fs::path p(args->out);
            eig = (p.parent_path() / (p.stem().string() + "_eigenvalues.csv")).string();
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(mm.X, Eigen::EigenvaluesOnly);
        Output out(eig);
        *out << "index,eigenvalue\n";
        for (Index i = 0; i < es.eigenvalues().size(); ++i) *out << i << ',' << fmt(es.eigenvalues()[i]) << '\n';
    });
}

// ---------------------------------------------------------------- analyze

void add_analyze(CLI::App& app) {
    struct A {
        std::string checkpoint, out;
        double top = 0.1;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("analyze", "Per-unit alignment report for a checkpoint")->fallthrough();
    sub->add_option("--checkpoint", args->checkpoint)->required();
    sub->add_option("--top-fraction", args->top, "share of largest |a| units for the sign-match rate")->capture_default_str();
    sub->add_option("--out", args->out);
    sub->callback([args] {
        const auto [params, snap] = read_checkpoint(args->checkpoint);
        const auto rep = alignment_report(params, args->top);
        double ratio = std::nan("");
        try {
            ratio = readout_ratio(params);
        } catch (const UndefinedQuantity&) {
        }
        Output out(args->out);
        *out << "unit,a,cos_align,norm1,norm2,excluded,mean_pos_align,mean_neg_align,mean_abs_align,sign_match_rate,"
                "readout_ratio\n";
        for (std::size_t i = 0; i < rep.units.size(); ++i) {
            const auto& u = rep.units[i];
            *out << i << ',' << fmt(u.a) << ',' << (u.excluded ? "nan" : fmt(u.cos_align)) << ',' << fmt(u.norm1) << ','
                 << fmt(u.norm2) << ',' << u.excluded << ",,,,,\n";
        }
        const auto& s = rep.summary;
        *out << "summary,,,,," << s.n_excluded << ',' << fmt(s.mean_pos_align) << ',' << fmt(s.mean_neg_align) << ','
             << fmt(s.mean_abs_align) << ',' << fmt(s.sign_match_rate) << ',' << fmt(ratio) << '\n';
    });
}

// ------------------------------------------------------ image generators

void dump_images(const Batch& batch, int side, const std::string& dir, const std::string& prefix) {
    fs::create_directories(dir);
    std::ofstream labels(fs::path(dir) / "labels.csv");
    if (!labels) throw std::runtime_error("cannot write labels.csv in " + dir);
    labels << "file,label\n";
    for (Index j = 0; j < batch.size(); ++j) {
        const std::string name = prefix + std::to_string(j) + ".pgm";
        write_pgm(fs::path(dir) / name, batch.inputs.col(j), side);
        labels << name << ',' << batch.labels[static_cast<std::size_t>(j)] << '\n';
    }
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw std::invalid_argument("split must be train or test");
}

void add_psvrt(CLI::App& app) {
    struct A {
        PsvrtConfig cfg;
        std::string split = "train", out = "psvrt";
        int N = 16;
        std::uint64_t seed = 0;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("psvrt", "Write PSVRT example images as PGM files")->fallthrough();
    sub->add_option("--patch-px", args->cfg.patch_px)->capture_default_str();
    sub->add_option("--patches-per-side", args->cfg.patches_per_side)->capture_default_str();
    sub->add_option("--n-train-patterns", args->cfg.n_train_patterns)->capture_default_str();
    sub->add_option("--split", args->split)->capture_default_str();
    sub->add_option("--N", args->N, "images (even)")->capture_default_str();
    sub->add_option("--seed", args->seed, "pattern pool and sampling seed")->capture_default_str();
    sub->add_option("--out", args->out, "output directory")->capture_default_str();
    sub->callback([args] {
        args->cfg.seed = args->seed;
        Rng rng(derive_seed(args->seed, {1}));
        const Batch b = generate_psvrt_batch(args->cfg, parse_split(args->split), args->N, rng);
        dump_images(b, args->cfg.side_px(), args->out, "psvrt_");
        std::cout << "wrote " << b.size() << " images to " << args->out << '\n';
    });
}

void add_pentomino(CLI::App& app) {
    struct A {
        PentominoConfig cfg;
        std::string split = "train", out = "pentomino";
        int N = 16, n_train = 14;
        std::uint64_t seed = 0;
        bool list = false;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("pentomino", "Write Pentomino example images as PGM files")->fallthrough();
    sub->add_option("--patches-per-side", args->cfg.patches_per_side)->capture_default_str();
    sub->add_option("--train-shapes", args->n_train, "number of training shapes")->capture_default_str();
    sub->add_option("--blur-sigma", args->cfg.blur_sigma)->capture_default_str();
    sub->add_option("--blur-prob", args->cfg.blur_prob)->capture_default_str();
    sub->add_option("--split", args->split)->capture_default_str();
    sub->add_option("--N", args->N, "images (even)")->capture_default_str();
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--out", args->out, "output directory")->capture_default_str();
    sub->add_flag("--list", args->list, "print the shape table and exit");
    sub->callback([args] {
        if (args->list) {
            const auto& shapes = pentomino_shapes();
            std::cout << "index,rotations,cells\n";
            for (std::size_t i = 0; i < shapes.size(); ++i) {
                std::cout << i << ',' << shapes[i].rotations.size() << ',';
                for (auto [r, c] : shapes[i].cells) std::cout << '(' << r << ' ' << c << ')';
                std::cout << '\n';
            }
            return;
        }
        args->cfg.seed = args->seed;
        args->cfg.train_shapes = choose_train_shapes(args->n_train, args->seed);
        Rng rng(derive_seed(args->seed, {1}));
        const Batch b = generate_pentomino_batch(args->cfg, parse_split(args->split), args->N, rng);
        dump_images(b, args->cfg.side_px(), args->out, "pentomino_");
        std::cout << "wrote " << b.size() << " images to " << args->out << '\n';
    });
}

// ------------------------------------------------------------ handcrafted

void add_handcrafted(CLI::App& app) {
    struct A {
        int d = 64;
        std::vector<double> rho{0.5, 1.0, 2.0, 10.0};
        int n = 100000;
        std::uint64_t seed = 0;
        std::string out;
    };
    auto args = std::make_shared<A>();
    auto* sub = app.add_subcommand("handcrafted", "Accuracy of the four-unit network against (2/pi) atan(rho)")->fallthrough();
    sub->add_option("--d", args->d)->capture_default_str();
    sub->add_option("--rho", args->rho)->delimiter(',')->capture_default_str();
    sub->add_option("--n", args->n, "test examples (half same, half different)")->capture_default_str();
    sub->add_option("--seed", args->seed)->capture_default_str();
    sub->add_option("--out", args->out);
    sub->callback([args] {
        if (args->n < 2 || args->n % 2) throw std::invalid_argument("--n must be even and >= 2");
        Output out(args->out);
        *out << "rho,same_acc,diff_acc,predicted_diff_acc\n";
        Rng rng(args->seed);
        const Batch b = make_test_batch(args->n, args->d, {}, rng);
        for (double rho : args->rho) {
            const Vector f = forward_batch(build_handcrafted(args->d, rho), b.inputs);
            *out << fmt(rho) << ',' << fmt(accuracy_where(f, b.labels, [](int y) { return y == 1; })) << ','
                 << fmt(accuracy_where(f, b.labels, [](int y) { return y == 0; })) << ','
                 << fmt(handcrafted_diff_accuracy(rho)) << '\n';
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Same-different learning experiments with two-layer ReLU networks", "eqlab"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags override it");
    app.config_formatter(std::make_shared<SubcommandConfig>(&app));
    app.allow_config_extras(CLI::config_extras_mode::error);

    add_train(app);
    add_sweep(app);
    add_markov(app);
    add_bayes(app);
    add_kernel(app);
    add_margin(app);
    add_analyze(app);
    add_psvrt(app);
    add_pentomino(app);
    add_handcrafted(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "eqlab: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
