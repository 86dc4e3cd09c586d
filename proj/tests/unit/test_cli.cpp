#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "workreal_cli/config.hpp"
#include "workreal_cli/csv.hpp"
#include "workreal_cli/runner.hpp"

using namespace workreal::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("workreal_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double parse_back(const std::string& text) {
    double v = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), v);
    return v;
}

}  // namespace

TEST(GridSpec, RangesListsAndPi) {
    const auto g = parse_grid_spec("theta=0:2pi:5; r1=0.01,0.02");
    ASSERT_EQ(g.at("theta").size(), 5u);
    EXPECT_DOUBLE_EQ(g.at("theta")[2], M_PI);
    EXPECT_DOUBLE_EQ(g.at("theta")[4], 2.0 * M_PI);
    EXPECT_EQ(g.at("r1"), (std::vector<double>{0.01, 0.02}));
    EXPECT_EQ(parse_grid_spec("r=0.3:0.3:1").at("r"), (std::vector<double>{0.3}));
}

TEST(GridSpec, Malformed) {
    EXPECT_THROW(parse_grid_spec("theta"), ConfigError);
    EXPECT_THROW(parse_grid_spec("theta=0:1"), ConfigError);
    EXPECT_THROW(parse_grid_spec("theta=0:1:1"), ConfigError);
    EXPECT_THROW(parse_grid_spec("theta=0:x:3"), ConfigError);
    EXPECT_THROW(parse_grid_spec("theta=1;theta=2"), ConfigError);
}

TEST(ConfigFile, ParsesKeysAndComments) {
    SweepConfig c;
    load_config_text("# header\nexperiment = squeeze-grid\nbeta = 0.1  # trailing\n\nn-max = 127\ngrid = r=0:0.1:3\n", c);
    EXPECT_EQ(c.experiment, Experiment::SqueezeGrid);
    EXPECT_EQ(*c.beta, 0.1);
    EXPECT_EQ(c.n_max, 127u);
    EXPECT_EQ(c.grids.at("r").size(), 3u);
    EXPECT_NO_THROW(c.validate());
}

TEST(ConfigFile, ErrorsNameLineAndField) {
    SweepConfig c;
    try {
        load_config_text("experiment = tls-theta\n\nbeta = hot\n", c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.field(), "beta");
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    SweepConfig d;
    try {
        load_config_text("colour = blue\n", d);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.field(), "colour");
    }
    EXPECT_THROW(load_config_text("beta 1\n", d), ConfigError);
    EXPECT_THROW(load_config_text("entropy_base = 10\n", d), ConfigError);
    EXPECT_THROW(load_config_text("degeneracy = coarse\n", d), ConfigError);
    EXPECT_THROW(load_config_text("beta = -1\n", d), ConfigError);
}

TEST(ConfigFile, ValidateChecksAxesAndSeed) {
    SweepConfig c;
    c.set("experiment", "tls-theta");
    c.set("grid", "r1=0.1,0.2");
    EXPECT_THROW(c.validate(), ConfigError);
    SweepConfig m;
    m.set("experiment", "mc-crosscheck");
    EXPECT_THROW(m.validate(), ConfigError);
    m.set("seed", "5");
    EXPECT_NO_THROW(m.validate());
}

TEST(Csv, FormatRoundTrips) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        EXPECT_EQ(parse_back(format_double(v)), v) << format_double(v);
    }
    for (double v : {0.0, -0.0, 1e-300, 5e-324, 0.1, 1.0 / 3.0}) EXPECT_EQ(parse_back(format_double(v)), v);
}

TEST(Csv, WriteAndReadBack) {
    const auto dir = scratch("csv");
    {
        CsvWriter w(dir / "t.csv", {{"beta", "0.5"}}, {"a", "b"});
        w.row(std::vector<double>{1.5, -2.0});
        w.close();
    }
    const auto text = slurp(dir / "t.csv");
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const auto t = read_csv(dir / "t.csv");
    EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.number(0, t.column("b")), -2.0);
    EXPECT_EQ(t.manifest.at(0).second, "0.5");
}

TEST(Runner, TlsThetaDefaultGrid) {
    SweepConfig c;
    c.experiment = Experiment::TlsTheta;
    c.out = scratch("tls");
    std::ostringstream log;
    const auto r = run(c, log);
    ASSERT_EQ(r.exit_code, kExitOk) << log.str();
    const auto t = read_csv(c.out / "tls-theta.csv");
    EXPECT_EQ(t.rows.size(), 721u);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"theta", "k_cor", "k_cor_flipped", "k_en_fine", "k_en_grouped"}));
    EXPECT_TRUE(fs::exists(c.out / "tls-theta.summary.jsonl"));
    bool has_budget = false;
    for (const auto& [k, v] : t.manifest) has_budget |= k == "truncation_budget";
    EXPECT_TRUE(has_budget);
}

TEST(Runner, McCrosscheckIsDeterministic) {
    std::string first;
    for (int pass = 0; pass < 2; ++pass) {
        SweepConfig c;
        c.set("experiment", "mc-crosscheck");
        c.set("seed", "42");
        c.set("samples", "20000");
        c.set("threads", pass == 0 ? "1" : "4");
        c.out = scratch("mc" + std::to_string(pass));
        std::ostringstream log;
        ASSERT_EQ(run(c, log).exit_code, kExitOk) << log.str();
        const auto text = slurp(c.out / "mc-crosscheck.csv");
        if (pass == 0)
            first = text;
        else
            EXPECT_EQ(text, first);
    }
}

TEST(Runner, ExitCodes) {
    SweepConfig missing_seed;
    missing_seed.experiment = Experiment::JarzynskiCheck;
    missing_seed.out = scratch("seed");
    std::ostringstream log;
    EXPECT_EQ(run(missing_seed, log).exit_code, kExitInvalidConfig);

    SweepConfig truncated;
    truncated.set("experiment", "squeeze-grid");
    truncated.set("beta", "0.1");
    truncated.set("n_max", "15");
    truncated.set("grid", "r=0.01,0.02");
    truncated.out = scratch("trunc");
    EXPECT_EQ(run(truncated, log).exit_code, kExitTruncation);
}

TEST(Runner, ThreadResolution) {
    EXPECT_EQ(resolve_threads(3, "8"), 3u);
    EXPECT_EQ(resolve_threads(std::nullopt, "8"), 8u);
    EXPECT_EQ(resolve_threads(std::nullopt, nullptr), 0u);
    EXPECT_EQ(resolve_threads(std::nullopt, ""), 0u);
    EXPECT_THROW(resolve_threads(std::nullopt, "many"), ConfigError);
}
