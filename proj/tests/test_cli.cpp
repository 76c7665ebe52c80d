#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace {

std::string cli_path() {
    const char* p = std::getenv("FUNIFORM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string work_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/funiform_cli_XXXXXX";
        char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

/// Parses a numeric CSV with a header line into columns.
std::vector<std::vector<double>> csv_columns(const std::string& path, std::size_t n_cols) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line)); // header
    std::vector<std::vector<double>> cols(n_cols);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; c < n_cols; ++c) {
            REQUIRE(std::getline(ls, cell, ','));
            cols[c].push_back(std::stod(cell));
        }
    }
    return cols;
}

} // namespace

TEST_CASE("exit codes") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("lattice --help") == 0);
    CHECK(run_cli("no-such-command") == 1);
    CHECK(run_cli("lattice --metric euclid --no-such-flag 3") == 1);
    // an epsilon larger than allowed is an input error
    CHECK(run_cli("lattice --metric euclid --eps 0 --interval 0,1 --out " + work_dir() +
                  "/bad.csv") == 1);
    CHECK(run_cli("fit --data " + work_dir() + "/missing.csv --out " + work_dir() + "/f.csv") == 1);
}

TEST_CASE("lattice command") {
    const std::string out = work_dir() + "/lat.csv";
    REQUIRE(run_cli("lattice --metric euclid --eps 0.25 --interval 0,1 --out " + out) == 0);
    const auto cols = csv_columns(out, 1);
    REQUIRE(cols[0].size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(cols[0][i] == Catch::Approx(0.25 * static_cast<double>(i)).margin(1e-9));
    CHECK(exists(out + ".manifest.json"));
}

TEST_CASE("prior evaluation command") {
    const std::string out = work_dir() + "/emax_prior.csv";
    REQUIRE(run_cli("prior eval --model emax --grid 200 --out " + out) == 0);
    const auto cols = csv_columns(out, 3);
    REQUIRE(cols[0].size() == 200);

    // the normalized column integrates to one on the emitted grid
    double z = 0.0;
    for (std::size_t i = 0; i + 1 < cols[0].size(); ++i)
        z += 0.5 * (cols[2][i] + cols[2][i + 1]) * (cols[0][i + 1] - cols[0][i]);
    CHECK(z == Catch::Approx(1.0).margin(1e-3));

    // normalized and unnormalized columns differ by one global constant
    const double ratio = cols[1][0] / cols[2][0];
    for (std::size_t i = 1; i < cols[0].size(); ++i)
        CHECK(cols[1][i] / cols[2][i] == Catch::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("prior sampling is reproducible byte for byte") {
    const std::string a = work_dir() + "/s_a.csv", b = work_dir() + "/s_b.csv";
    const std::string flags = "prior sample --model power --n 500 --seed 11 --out ";
    REQUIRE(run_cli(flags + a) == 0);
    REQUIRE(run_cli(flags + b) == 0);
    CHECK(slurp(a) == slurp(b));
    const auto cols = csv_columns(a, 1);
    CHECK(cols[0].size() == 500);
    CHECK(exists(a + ".meta.json"));
    const auto meta = nlohmann::json::parse(slurp(a + ".meta.json"));
    CHECK(meta.contains("log_norm_const"));
    CHECK(meta.contains("grid_checksum"));
}

TEST_CASE("fit command round trip") {
    const std::string data = work_dir() + "/counts.csv";
    {
        std::ofstream out(data);
        out << "x,n,s\n0,20,4\n0.05,20,9\n0.2,20,11\n0.6,20,14\n1,20,16\n";
    }
    const std::string out = work_dir() + "/post.csv";
    REQUIRE(run_cli("fit --data " + data +
                    " --model power --likelihood binomial --prior functional-uniform"
                    " --draws 300 --burnin 100 --thin 1 --seed 3 --out " +
                    out) == 0);
    const auto cols = csv_columns(out, 3);
    CHECK(cols[0].size() == 300);
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
        CHECK(cols[0][i] >= 0.0);
        CHECK(cols[1][i] >= 0.0);
        CHECK(cols[0][i] + cols[1][i] <= 1.0);
        CHECK(cols[2][i] >= 0.05);
        CHECK(cols[2][i] <= 20.0);
    }
    const auto diag = nlohmann::json::parse(slurp(out + ".diag.json"));
    CHECK(diag.contains("acceptance_rate"));
    CHECK(diag.contains("ess"));

    // header/likelihood mismatch is refused
    CHECK(run_cli("fit --data " + data + " --model power --likelihood normal --out " + work_dir() +
                  "/mismatch.csv") == 1);
}

TEST_CASE("design optimization is reproducible byte for byte") {
    const std::string a = work_dir() + "/d_a.json", b = work_dir() + "/d_b.json";
    const std::string flags =
        "design optimize --model exponential --prior functional-uniform --theta-range 0,5"
        " --x-range 0,10 --max-points 3 --starts 6 --seed 19 --threads 2 --out ";
    REQUIRE(run_cli(flags + a) == 0);
    REQUIRE(run_cli(flags + b) == 0);
    CHECK(slurp(a) == slurp(b));

    const auto d = nlohmann::json::parse(slurp(a));
    REQUIRE(d.contains("points"));
    REQUIRE(d.contains("weights"));
    REQUIRE(d.contains("criterion"));
    double wsum = 0.0;
    for (double w : d["weights"]) wsum += w;
    CHECK(wsum == Catch::Approx(1.0).margin(1e-9));

    // efficiency profile over a small theta grid
    const std::string eff = work_dir() + "/eff.csv";
    REQUIRE(run_cli("design efficiency --design " + a + " --theta-grid 0.1,5,40 --out " + eff) == 0);
    const auto cols = csv_columns(eff, 3);
    REQUIRE(cols[0].size() == 40);
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
        CHECK(cols[2][i] > 0.0);
        CHECK(cols[2][i] <= 1.0 + 1e-10);
        CHECK(cols[1][i] >= 0.0);
        CHECK(cols[1][i] <= 1.0);
    }
}

TEST_CASE("simulate command emits finite metrics") {
    const std::string out = work_dir() + "/cells.csv";
    REQUIRE(run_cli("simulate --scenario linear --prior uniform --reps 2 --seed 1 --draws 400"
                    " --burnin 100 --thin 1 --threads 2 --out " +
                    out) == 0);
    std::ifstream in(out);
    std::string header, row;
    REQUIRE(std::getline(in, header));
    CHECK(header == "prior,scenario,mae1,mae2,cp,ile");
    REQUIRE(std::getline(in, row));
    std::istringstream ls(row);
    std::string prior, scenario, cell;
    std::getline(ls, prior, ',');
    std::getline(ls, scenario, ',');
    CHECK(prior == "uniform");
    CHECK(scenario == "linear");
    for (int c = 0; c < 4; ++c) {
        REQUIRE(std::getline(ls, cell, ','));
        const double v = std::stod(cell);
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("reproduction bundle for the prior figures") {
    const std::string dir = work_dir() + "/fig3";
    REQUIRE(run_cli("repro --target fig3 --out-dir " + dir) == 0);
    const std::string manifest_path = dir + "/repro_fig3.manifest.json";
    REQUIRE(exists(manifest_path));
    const auto manifest = nlohmann::json::parse(slurp(manifest_path));
    REQUIRE(manifest.contains("outputs"));
    REQUIRE(manifest["outputs"].size() == 3);
    for (const auto& entry : manifest["outputs"]) {
        const std::string path = entry["path"].get<std::string>();
        CHECK(exists(path));
        CHECK_FALSE(entry["checksum"].get<std::string>().empty());
    }
    CHECK(manifest.contains("duration_seconds"));
    CHECK(manifest.contains("command_line"));
}
