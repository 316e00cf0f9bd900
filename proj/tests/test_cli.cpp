#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "wgqed/cli.hpp"

namespace fs = std::filesystem;
using namespace wgqed;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wgqed_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = "cd '" + dir_.string() + "' && '" WGQED_CLI_PATH "' " + args + " > log.txt 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    bool exists(const std::string& name) const { return fs::exists(dir_ / name); }

    fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(CliParse, NumbersGridsAndRanges) {
    EXPECT_DOUBLE_EQ(cli::parse_double("x", "1e-3"), 1e-3);
    EXPECT_THROW(cli::parse_double("x", "1e-3abc"), ConfigError);
    EXPECT_THROW(cli::parse_double("x", "nan"), ConfigError);
    EXPECT_EQ(cli::parse_integer("n", "12"), 12);
    EXPECT_THROW(cli::parse_integer("n", "1.5"), ConfigError);
    EXPECT_TRUE(std::isinf(cli::parse_chi("inf")));
    EXPECT_DOUBLE_EQ(cli::parse_chi("1e4"), 1e4);
    EXPECT_EQ(cli::parse_int_range("r", "2:5"), (std::vector<int>{2, 3, 4, 5}));
    EXPECT_THROW(cli::parse_int_range("r", "5:2"), ConfigError);
    const auto g = cli::parse_grid("g", "-1:1:5");
    EXPECT_EQ(cli::grid_values(g), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
    EXPECT_THROW(cli::parse_grid("g", "-1:1"), ConfigError);
    EXPECT_THROW(cli::parse_grid("g", "-1:1:0"), ConfigError);
}

TEST(CliFormat, ScientificTwelveDigitsAndSpecialValues) {
    EXPECT_EQ(format_number(1.0), "1.00000000000e+00");
    EXPECT_EQ(format_number(-0.0), "0.00000000000e+00");
    EXPECT_EQ(format_number(-1.5e-7), "-1.50000000000e-07");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    CsvTable t({"a", "b"});
    t.add({"1", "2"});
    EXPECT_THROW(t.add({"1"}), std::logic_error);
    EXPECT_EQ(t.str(), "a,b\n1,2\n");
}

TEST_F(CliTest, ModesWritesCsvAndManifest) {
    ASSERT_EQ(run("modes --n 4 --phi 0.1 --chi inf --out m.csv"), 0) << read("log.txt");
    const auto rows = lines(read("m.csv"));
    ASSERT_EQ(rows.size(), 1u + 4u + 6u);
    EXPECT_EQ(rows[0], "sector,index,re_detuning,im,gamma,class,sum_abs_d2,abs_sum_d2");
    const std::regex number(R"(-?\d\.\d{11}e[+-]\d{2}|nan)");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = cli::split(rows[r], ',');
        ASSERT_EQ(cells.size(), 8u);
        for (std::size_t c : {2u, 3u, 4u, 6u, 7u}) EXPECT_TRUE(std::regex_match(cells[c], number)) << cells[c];
    }
    const auto manifest = nlohmann::json::parse(read("m.csv.manifest.json"));
    for (const char* key : {"tool", "version", "command", "args", "config", "grids", "tolerances", "units",
                            "wall_clock_seconds"})
        EXPECT_TRUE(manifest.contains(key)) << key;
    EXPECT_EQ(manifest["command"], "modes");
    EXPECT_EQ(manifest["results"]["census"]["subradiant"], 2);
}

TEST_F(CliTest, ThresholdMarksUndefinedCellsAsNan) {
    ASSERT_EQ(run("threshold --m-range 1:3 --n-range 1:4 --out t.csv"), 0) << read("log.txt");
    const auto rows = lines(read("t.csv"));
    ASSERT_EQ(rows.size(), 1u + 12u);
    bool saw_nan = false;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto c = cli::split(rows[r], ',');
        const bool undefined = std::stoi(c[1]) < std::stoi(c[0]);
        EXPECT_EQ(c[3], undefined ? "0" : "1");
        if (undefined) {
            EXPECT_EQ(c[2], "nan");
            saw_nan = true;
        }
    }
    EXPECT_TRUE(saw_nan);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("modes --no-such-flag 1"), 2);
    EXPECT_EQ(run("nonsense"), 2);
    EXPECT_EQ(run("modes --n 0"), 2);
    EXPECT_EQ(run("modes --phi -1"), 2);
    EXPECT_EQ(run("scatter --kind sideways"), 2);
    EXPECT_EQ(run("threshold --m-range 10:12 --n-range 1:30"), 2);
    EXPECT_EQ(run("modes --out no_such_dir/m.csv"), 1);
    EXPECT_EQ(run("scatter --kind cut --eps-range -0.2:0:3 --tol 1e-300 --out q.csv"), 3);
    EXPECT_FALSE(exists("q.csv"));
    EXPECT_FALSE(exists("q.csv.manifest.json"));
    EXPECT_EQ(run("--version"), 0);
}

TEST_F(CliTest, ReplayFromManifestIsByteIdentical) {
    const std::vector<std::string> commands = {
        "modes --n 5 --sweep-n 3:6",
        "scatter --kind w1w2 --w1-range -0.3:0.1:4 --w2-range -0.3:0.1:3 --normalize",
        "threshold --m-range 1:2 --n-range 1:5",
        "decay --t-range 1e-2:1e2:7",
        "g2 --eps-range -0.5:0.5:3 --t-range 1e-2:1e2:5",
        "xy --xy-range 0:10:6"};
    for (std::size_t k = 0; k < commands.size(); ++k) {
        const std::string a = "a" + std::to_string(k) + ".csv";
        const std::string b = "b" + std::to_string(k) + ".csv";
        ASSERT_EQ(run(commands[k] + " --out " + a), 0) << commands[k] << "\n" << read("log.txt");
        ASSERT_EQ(run("--config " + a + ".manifest.json --out " + b), 2) << "config must follow the subcommand";
        const std::string name = cli::split(commands[k], ' ')[0];
        ASSERT_EQ(run(name + " --config " + a + ".manifest.json --out " + b), 0) << read("log.txt");
        EXPECT_EQ(read(a), read(b)) << commands[k];
    }
}

TEST_F(CliTest, ParallelJobsDoNotChangeOutput) {
    ASSERT_EQ(run("scatter --kind cut --eps-range -0.3:0.1:9 --out one.csv --jobs 1"), 0);
    ASSERT_EQ(run("scatter --kind cut --eps-range -0.3:0.1:9 --out two.csv --jobs 3"), 0);
    EXPECT_EQ(read("one.csv"), read("two.csv"));
}

TEST_F(CliTest, CommandLineOverridesConfigFile) {
    {
        std::ofstream cfg(dir_ / "base.cfg");
        cfg << "# defaults\nn = 3\nphi = 0.2\nchi = inf\n";
    }
    ASSERT_EQ(run("modes --config base.cfg --out f.csv"), 0) << read("log.txt");
    ASSERT_EQ(run("modes --config base.cfg --n 5 --out g.csv"), 0);
    const auto f = nlohmann::json::parse(read("f.csv.manifest.json"));
    const auto g = nlohmann::json::parse(read("g.csv.manifest.json"));
    EXPECT_EQ(f["config"]["n_qubits"], 3);
    EXPECT_EQ(g["config"]["n_qubits"], 5);
    EXPECT_EQ(g["config"]["phi"], 0.2);
    {
        std::ofstream cfg(dir_ / "bad.cfg");
        cfg << "colour = blue\n";
    }
    EXPECT_EQ(run("modes --config bad.cfg"), 2);
}
