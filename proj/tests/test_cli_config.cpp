// test_cli_config.cpp: configuration parsing and command artifacts.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace natcorr::cli {
namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("natcorr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(RunConfig, DefaultsAreTheReferenceParameters) {
    const RunConfig c = load_config(std::nullopt, {});
    EXPECT_DOUBLE_EQ(c.model.epsilon, 1.0);
    EXPECT_DOUBLE_EQ(c.bath.omega_cutoff, 1.0);
    EXPECT_DOUBLE_EQ(c.bath.beta, 1.0);
    EXPECT_DOUBLE_EQ(c.lambda, 0.5);
    EXPECT_EQ(c.scan.grid_n, 201u);
    EXPECT_EQ(c.entries.at("lambda"), "0.5");
}

TEST(RunConfig, FileThenOverrides) {
    const auto dir = scratch_dir("config");
    const auto path = dir / "run.conf";
    std::ofstream(path) << "# comment\nlambda = 0.25   # trailing\n\nscan.grid_n = 11\n";
    const RunConfig c = load_config(path.string(), {"lambda=0.3", "bath.modes = 0.5:0.1, 1.2:0.2"});
    EXPECT_DOUBLE_EQ(c.lambda, 0.3);
    EXPECT_EQ(c.scan.grid_n, 11u);
    ASSERT_EQ(c.bath.modes.size(), 2u);
    EXPECT_DOUBLE_EQ(c.bath.modes[1].coupling, 0.2);
    EXPECT_EQ(c.entries.at("lambda"), "0.3");
}

TEST(RunConfig, RejectsInvalidInput) {
    EXPECT_THROW(load_config(std::nullopt, {"nonsense=1"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"lambda"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"lambda=abc"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"scan.grid_n=200"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"bath.beta=-1"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"initial.x=1", "initial.y=1"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"bath.type=discrete"}), ConfigError);
    EXPECT_THROW(load_config(std::nullopt, {"propagation.mode=euler"}), ConfigError);
    EXPECT_THROW(load_config(std::string("/nonexistent/natcorr.conf"), {}), ConfigError);
}

TEST(RunConfig, TimeWindow) {
    const RunConfig c = load_config(std::nullopt, {"scan.t_window=0.01:20"});
    ASSERT_TRUE(c.scan.t_lo.has_value());
    EXPECT_DOUBLE_EQ(*c.scan.t_lo, 0.01);
    EXPECT_DOUBLE_EQ(*c.scan.t_hi, 20.0);
    EXPECT_THROW(load_config(std::nullopt, {"scan.t_window=20:0.01"}), ConfigError);
}

TEST(Commands, BathCorrelationFromTinyTimes) {
    const auto dir = scratch_dir("bath");
    const RunConfig c = load_config(std::nullopt, {"quadrature.t_min=1e-6", "quadrature.n_points=12",
                                                   "output.directory=" + dir.string()});
    cmd_bath_correlation(c, CommandOptions{});
    std::ifstream in(dir / "bath_correlation.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,re_series,im_series,re_quadrature,im_quadrature,residual");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.find("nan"), std::string::npos);
        EXPECT_EQ(line.find("inf"), std::string::npos);
        const double residual = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_LT(residual, 1e-8);
    }
    EXPECT_EQ(rows, 12);
    const auto meta = nlohmann::json::parse(slurp(dir / "bath_correlation.json"));
    EXPECT_EQ(meta["rows"].get<int>(), 12);
    EXPECT_TRUE(meta.contains("config"));
    EXPECT_TRUE(meta["environment"].contains("REDFIELD_SLIPPAGE_SEED"));
}

TEST(Commands, DiagnoseReportsConsistentBound) {
    const auto dir = scratch_dir("diagnose");
    const RunConfig c = load_config(std::nullopt, {"output.directory=" + dir.string()});
    cmd_diagnose(c, CommandOptions{});
    const auto doc = nlohmann::json::parse(slurp(dir / "diagnose.json"));
    EXPECT_TRUE(doc["in_U_prime"].get<bool>());
    const double p0 = doc["p0"].get<double>();
    const double sup = doc["variational"]["sup_value"].get<double>();
    EXPECT_NEAR(doc["bound"].get<double>(), p0 - 0.25 * sup, 1e-15);
    EXPECT_TRUE(doc["slipped_initial_condition"].contains("slipped"));
}

TEST(Commands, PropagateAtZeroCouplingIsPureRotation) {
    const auto dir = scratch_dir("propagate");
    const RunConfig c = load_config(std::nullopt, {"lambda=0", "initial.x=0.6", "initial.z=0.8",
                                                   "output.directory=" + dir.string()});
    cmd_propagate(c, CommandOptions{});
    std::ifstream in(dir / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,x,y,z,min_eig,trace_err");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 4; ++i) std::getline(ss, field, ',');
        EXPECT_NEAR(std::stod(field), 0.8, 1e-12);
    }
    EXPECT_EQ(rows, 201);
}

TEST(Commands, MarkovianTrajectoryFromXLosesPositivity) {
    const auto dir = scratch_dir("markov");
    const RunConfig c = load_config(std::nullopt, {"output.directory=" + dir.string()});
    cmd_propagate(c, CommandOptions{});
    const auto meta = nlohmann::json::parse(slurp(dir / "trajectory.json"));
    EXPECT_LT(meta["min_eigenvalue_on_grid"].get<double>(), 0.0);
}

}  // namespace
}  // namespace natcorr::cli
