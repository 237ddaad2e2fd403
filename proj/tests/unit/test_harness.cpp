#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqlab/errors.hpp"
#include "eqlab/harness.hpp"

using namespace eqlab;
namespace fs = std::filesystem;

namespace {

SweepSpec tiny_spec() {
    SweepSpec s = default_spec(TaskKind::sd);
    s.gamma_list = {parse_gamma("lazy"), parse_gamma("1")};
    s.L_list = {4, 8};
    s.d_list = {8};
    s.seeds = 2;
    s.master_seed = 5;
    s.train.width = 32;
    s.train.batch = 16;
    s.train.steps = 20;
    s.train.eval_every = 10;
    s.train.test_size = 100;
    s.workers = 1;
    return s;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Drops the wall_time_s column so rows from separate runs compare equal.
std::string without_wall_time(const std::string& row) {
    return row.substr(0, row.rfind(','));
}

std::vector<std::string> metric_rows(const fs::path& p) {
    auto rows = lines_of(p);
    rows.erase(rows.begin());
    for (auto& r : rows) r = without_wall_time(r);
    std::sort(rows.begin(), rows.end());
    return rows;
}

class SweepFiles : public ::testing::Test {
protected:
    fs::path dir = fs::temp_directory_path() / ("eqlab_harness_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    void SetUp() override { fs::create_directories(dir); }
    void TearDown() override { fs::remove_all(dir); }
};

}  // namespace

TEST(Gamma, Parsing) {
    const auto lazy = parse_gamma("lazy");
    EXPECT_TRUE(lazy.per_sqrt_d);
    EXPECT_DOUBLE_EQ(lazy.resolve(64), 1e-5 / 8);
    EXPECT_EQ(lazy.label(), "lazy");
    const auto g = parse_gamma("0.5/sqrtd");
    EXPECT_DOUBLE_EQ(g.resolve(16), 0.125);
    EXPECT_DOUBLE_EQ(parse_gamma("0.01").resolve(1000), 0.01);
    EXPECT_THROW(parse_gamma("abc"), std::invalid_argument);
    EXPECT_THROW(parse_gamma("-1"), std::invalid_argument);
    EXPECT_THROW(parse_gamma("1x"), std::invalid_argument);
}

TEST(Spec, Validation) {
    auto s = tiny_spec();
    EXPECT_NO_THROW(validate(s));
    s.gamma_list.clear();
    EXPECT_THROW(validate(s), std::invalid_argument);
    s = tiny_spec();
    s.sigma2_list = {0.1};
    EXPECT_THROW(validate(s), std::invalid_argument);
    s.task = TaskKind::sd_noisy;
    EXPECT_NO_THROW(validate(s));
    s = tiny_spec();
    s.train.batch = 15;
    EXPECT_THROW(validate(s), std::invalid_argument);
    s = tiny_spec();
    s.L_list = {1};
    EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(Spec, TaskNames) {
    for (auto t : {TaskKind::sd, TaskKind::sd_noisy, TaskKind::psvrt, TaskKind::pentomino, TaskKind::features})
        EXPECT_EQ(parse_task_kind(to_string(t)), t);
    EXPECT_THROW(parse_task_kind("mnist"), std::invalid_argument);
}

TEST(Grid, ExpansionAndSeedStability) {
    auto s = tiny_spec();
    const auto grid = expand_grid(s);
    EXPECT_EQ(grid.size(), 2u * 2 * 1 * 1 * 2);
    std::set<std::uint64_t> seeds;
    for (const auto& p : grid) seeds.insert(run_seed(s, p));
    EXPECT_EQ(seeds.size(), grid.size());

    auto bigger = s;
    bigger.L_list = {2, 4, 8, 16};
    bigger.seeds = 4;
    bigger.gamma_list.insert(bigger.gamma_list.begin(), parse_gamma("0.1"));
    for (const auto& p : grid) {
        bool found = false;
        for (const auto& q : expand_grid(bigger))
            if (q.gamma.value == p.gamma.value && q.gamma.per_sqrt_d == p.gamma.per_sqrt_d && q.L == p.L &&
                q.d == p.d && q.seed_index == p.seed_index) {
                EXPECT_EQ(run_seed(bigger, q), run_seed(s, p));
                found = true;
            }
        EXPECT_TRUE(found);
    }
    auto other = s;
    other.master_seed = 6;
    EXPECT_NE(run_seed(other, grid[0]), run_seed(s, grid[0]));
}

TEST(Csv, HeaderAndRow) {
    EXPECT_EQ(csv_header(),
              "task,gamma,L,d,sigma2,m,seed,steps,best_test_acc,final_train_acc,readout_ratio,mean_pos_align,"
              "mean_neg_align,richness_metric,wall_time_s");
    RunRecord r;
    r.task = "sd";
    r.gamma = 0.1;
    r.L = 4;
    r.d = 8;
    r.readout_ratio = std::nan("");
    const auto row = to_csv_row(r);
    EXPECT_EQ(row.substr(0, 11), "sd,0.1,4,8,");
    EXPECT_NE(row.find(",nan,"), std::string::npos);
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 14);
}

TEST(RunPoint, DeterministicMetrics) {
    const auto s = tiny_spec();
    const auto p = expand_grid(s)[3];
    auto a = run_point(s, p);
    auto b = run_point(s, p);
    a.wall_time_s = b.wall_time_s = 0;
    EXPECT_EQ(to_csv_row(a), to_csv_row(b));
    EXPECT_EQ(a.m, 32);
    EXPECT_EQ(a.steps, 20);
    EXPECT_GE(a.best_test_acc, 0.0);
    EXPECT_LE(a.best_test_acc, 1.0);
}

TEST(RunPoint, ImageTasksLeaveAlignmentEmpty) {
    auto s = default_spec(TaskKind::pentomino);
    s.gamma_list = {parse_gamma("1")};
    s.L_list = {4};
    s.d_list = {2};
    s.seeds = 1;
    s.train.width = 16;
    s.train.batch = 16;
    s.train.steps = 5;
    s.train.eval_every = 5;
    s.train.test_size = 50;
    const auto r = run_point(s, expand_grid(s)[0]);
    EXPECT_TRUE(std::isnan(r.mean_pos_align));
    EXPECT_TRUE(std::isnan(r.mean_neg_align));
    EXPECT_EQ(r.task, "pentomino");
}

TEST_F(SweepFiles, WritesEveryRowAndResumes) {
    const auto s = tiny_spec();
    const auto out = dir / "runs.csv";
    int seen = 0;
    const auto rep = run_sweep(s, out, [&](const RunRecord&) { ++seen; });
    EXPECT_EQ(rep.rows_written, 8);
    EXPECT_EQ(seen, 8);
    const auto lines = lines_of(out);
    ASSERT_EQ(lines.size(), 9u);
    EXPECT_EQ(lines[0], csv_header());

    const auto again = run_sweep(s, out);
    EXPECT_EQ(again.rows_written, 0);
    EXPECT_EQ(again.rows_skipped, 8);
    EXPECT_EQ(lines_of(out), lines);

    // drop the last two rows and leave half a line behind
    {
        std::ofstream f(out, std::ios::trunc);
        for (std::size_t i = 0; i < 7; ++i) f << lines[i] << '\n';
        f << lines[7].substr(0, 10);
    }
    const auto resumed = run_sweep(s, out);
    EXPECT_EQ(resumed.rows_skipped, 6);
    EXPECT_EQ(resumed.rows_written, 2);
    EXPECT_EQ(metric_rows(out).size(), 8u);

    // a fresh file gives the same metrics
    const auto fresh = dir / "fresh.csv";
    run_sweep(s, fresh);
    EXPECT_EQ(metric_rows(out), metric_rows(fresh));
}

TEST_F(SweepFiles, WorkerCountDoesNotChangeResults) {
    auto s = tiny_spec();
    run_sweep(s, dir / "serial.csv");
    s.workers = 3;
    run_sweep(s, dir / "parallel.csv");
    EXPECT_EQ(metric_rows(dir / "serial.csv"), metric_rows(dir / "parallel.csv"));
}

TEST_F(SweepFiles, ForeignHeaderRejected) {
    const auto out = dir / "other.csv";
    std::ofstream(out) << "a,b,c\n1,2,3\n";
    EXPECT_THROW(run_sweep(tiny_spec(), out), ParseError);
}

TEST_F(SweepFiles, TheoryOverlay) {
    const auto rows = theory_overlay({2, 3, 5});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].first, 2);
    EXPECT_DOUBLE_EQ(rows[0].second, 0.75);
    EXPECT_NEAR(rows[1].second, 0.9078654127, 1e-9);
    EXPECT_NEAR(rows[2].second, 0.9748387036, 1e-9);
    const auto many = theory_overlay({2, 3, 4, 8, 16, 32, 64, 128});
    for (std::size_t i = 1; i < many.size(); ++i) EXPECT_GE(many[i].second, many[i - 1].second);

    write_theory_overlay(dir / "overlay.csv", rows);
    const auto lines = lines_of(dir / "overlay.csv");
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "L,predicted_acc");
    EXPECT_EQ(lines[1], "2,0.75");
}

TEST(Presets, AllValidate) {
    for (const auto& name : preset_names()) {
        const auto s = preset(name);
        EXPECT_NO_THROW(validate(s)) << name;
        EXPECT_EQ(s.seeds, 6) << name;
    }
    EXPECT_THROW(preset("fig9"), std::invalid_argument);
}
