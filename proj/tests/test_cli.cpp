#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef EDP_CLI_BIN
#error "EDP_CLI_BIN must point at the command line binary"
#endif
#ifndef EDP_DATA_DIR
#error "EDP_DATA_DIR must point at the data directory"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(EDP_CLI_BIN) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) result.stdout_text += buf;
    const int status = pclose(pipe);
    result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("edp_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("spectrum subcommand emits deformed oscillator levels") {
    TempDir tmp;
    const auto out = tmp.path / "spec.csv";
    const auto r = run_cli("spectrum --system ho --q 2 --lambda -1 --n-max 3 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "n,base_energy,energy,valid,branch");
    const std::array<double, 4> expected = {0.6, 2.5 / 3.5, 3.5 / 4.5, 4.5 / 5.5};
    for (int n = 0; n < 4; ++n) {
        const auto fields = split_csv(lines[n + 1]);
        REQUIRE(fields.size() == 5);
        CHECK(fields[0] == std::to_string(n));
        CHECK(std::stod(fields[2]) == doctest::Approx(expected[n]).epsilon(1e-9));
        CHECK(fields[3] == "true");
        CHECK(fields[4] == "unique");
    }
}

TEST_CASE("spectrum base case and saturation tail") {
    TempDir tmp;
    const auto out = tmp.path / "spec.csv";
    auto r = run_cli("spectrum --system ho --q 1 --lambda 0 --n-max 1 --out " + out.string());
    CHECK(r.exit_code == 0);
    auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 3);
    CHECK(std::stod(split_csv(lines[1])[2]) == doctest::Approx(1.5));
    CHECK(std::stod(split_csv(lines[2])[2]) == doctest::Approx(2.5));

    r = run_cli("spectrum --system ho --q 2 --lambda -0.5 --n-max 4000 --out " + out.string());
    CHECK(r.exit_code == 0);
    lines = lines_of(slurp(out));
    const auto tail = split_csv(lines.back());
    CHECK(std::stod(tail[2]) == doctest::Approx(2.0).epsilon(1e-3));  // -1/lambda
}

TEST_CASE("hydrogen spectrum starts at n = 1") {
    TempDir tmp;
    const auto out = tmp.path / "hyd.csv";
    const auto r = run_cli("spectrum --system hydrogen --q 2 --lambda -1 --n-max 3 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 4);  // header + n = 1..3
    const auto first = split_csv(lines[1]);
    CHECK(first[0] == "1");
    // e0 = -0.5, q = 2: E = e0/(1 - lambda*e0) = -0.5/0.5
    CHECK(std::stod(first[2]) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(run_cli("spectrum --system hydrogen --n-max 0 --out " + out.string()).exit_code == 2);
}

TEST_CASE("masses subcommand mirrors the reference layout") {
    TempDir tmp;
    const auto out = tmp.path / "masses.csv";
    const auto r = run_cli("masses --system ccbar --lambda 0 --lambda -0.2 --lambda -0.4 "
                           "--data " EDP_DATA_DIR " --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    CHECK(lines[0] == "state,lambda,mass_GeV,experimental_GeV,deviation");
    // 9 states per lambda plus a saturation footer for each negative lambda
    REQUIRE(lines.size() == 1 + 9 * 3 + 2);

    // lambda = -0.4 block reproduces the reference column
    const int row = 1 + 9 + (9 + 1);  // header, lambda=0 block, -0.2 block+footer
    const auto first = split_csv(lines[row]);
    CHECK(first[0] == "1S");
    CHECK(std::stod(first[2]) == doctest::Approx(3.097).epsilon(1e-3));
    CHECK(std::stod(first[3]) == doctest::Approx(3.096));
    const auto footer = split_csv(lines.back());
    CHECK(footer[0] == "saturation");
    CHECK(std::stod(footer[2]) == doctest::Approx(5.894).epsilon(1e-9));
    CHECK(footer[3].empty());

    // deviation column is filled exactly where experiment exists
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 5);
        CHECK(fields[3].empty() == fields[4].empty());
    }

    // at lambda = 0 the fit pins the splittings, so the deviations of the
    // states entering one splitting agree to the fit tolerance
    const auto dev = [&](int line_idx) { return std::stod(split_csv(lines[line_idx])[4]); };
    CHECK(std::abs(dev(2) - dev(1)) < 1e-6);  // 2S vs 1S
    CHECK(std::abs(dev(4) - dev(3)) < 1e-6);  // 4S vs 3S
}

TEST_CASE("explicit quarkonia parameters bypass the fit") {
    TempDir tmp;
    const auto cfg = tmp.path / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"system":"ccbar","q":1.0,"lambda":[-0.4],"n_max":2,"quarkonia":{"k":1.0,"p":0.0}})";
    }
    const auto out = tmp.path / "qq.csv";
    const auto r = run_cli("spectrum --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 4);
    // beta(0) = -1: E = beta/(16 - lambda*beta) = -1/15.6
    CHECK(std::stod(split_csv(lines[1])[2]) == doctest::Approx(-1.0 / 15.6).epsilon(1e-9));
    CHECK(std::stod(split_csv(lines[1])[1]) == doctest::Approx(-1.0 / 16.0).epsilon(1e-9));
}

TEST_CASE("masses default lambda grids match the published columns") {
    TempDir tmp;
    const auto out = tmp.path / "defaults.csv";
    const auto r = run_cli("masses --system bbbar --data " EDP_DATA_DIR " --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    // lambdas 0, -0.3, -0.6: 9 rows each plus two saturation footers
    REQUIRE(lines.size() == 1 + 9 * 3 + 2);
    CHECK(split_csv(lines[1])[1] == "0");
    CHECK(split_csv(lines[1 + 9])[1] == "-0.3");
}

TEST_CASE("fit subcommand reports converged parameters") {
    TempDir tmp;
    const auto out = tmp.path / "fit.csv";
    const auto r = run_cli("fit --system bbbar --lambda -0.6 --data " EDP_DATA_DIR " --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 2);
    const auto fields = split_csv(lines[1]);
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "bbbar");
    CHECK(std::stod(fields[2]) == doctest::Approx(-3.13512173).epsilon(1e-6));
    CHECK(fields[6] == "true");
}

TEST_CASE("xform-check passes for both canonical systems") {
    TempDir tmp;
    for (const std::string system : {"ho", "hydrogen"}) {
        const auto out = tmp.path / (system + ".csv");
        const auto r = run_cli("xform-check --system " + system + " --out " + out.string());
        CHECK(r.exit_code == 0);
        CHECK(r.stdout_text.find("max_dev_W=") != std::string::npos);
        const auto lines = lines_of(slurp(out));
        CHECK(lines[0] == "u,W_numeric,W_closed,v_numeric,v_closed");
        CHECK(lines.back().rfind("# max_dev_W=", 0) == 0);
    }
    // default hydrogen parameters (k = 2, unit mass) put the extracted
    // constant at -k^2/8 = -0.5
    const auto r = run_cli("xform-check --system hydrogen --out " +
                           (tmp.path / "h2.csv").string());
    CHECK(r.stdout_text.find("E_closed=-0.5") != std::string::npos);
}

TEST_CASE("config file merge is idempotent") {
    TempDir tmp;
    const auto out_a = tmp.path / "a.csv";
    const auto out_b = tmp.path / "b.csv";
    const auto cfg = tmp.path / "effective.json";

    auto r = run_cli("masses --system ccbar --lambda -0.4 --n-max 5 --data " EDP_DATA_DIR
                     " --out " + out_a.string() + " --emit-effective-config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    r = run_cli("masses --config " + cfg.string() + " --out " + out_b.string());
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(out_a) == slurp(out_b));  // byte-identical
}

TEST_CASE("flags override config values") {
    TempDir tmp;
    const auto cfg = tmp.path / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"system":"ho","q":2.0,"lambda":[-1.0],"n_max":3})";
    }
    const auto out_a = tmp.path / "a.csv";
    const auto out_b = tmp.path / "b.csv";
    auto r = run_cli("spectrum --config " + cfg.string() + " --out " + out_a.string());
    REQUIRE(r.exit_code == 0);
    r = run_cli("spectrum --config " + cfg.string() + " --n-max 1 --out " + out_b.string());
    REQUIRE(r.exit_code == 0);
    CHECK(lines_of(slurp(out_a)).size() == 5);
    CHECK(lines_of(slurp(out_b)).size() == 3);
}

TEST_CASE("environment variable points at the data directory") {
    TempDir tmp;
    const auto out = tmp.path / "m.csv";
    const std::string cmd = std::string("EDP_DATA_DIR=") + EDP_DATA_DIR + " " + EDP_CLI_BIN +
                            " masses --system bbbar --lambda -0.3 --out " + out.string() +
                            " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(out));
}

TEST_CASE("usage errors exit with code 2") {
    TempDir tmp;
    const auto out = (tmp.path / "x.csv").string();
    CHECK(run_cli("spectrum --system nosuch --out " + out).exit_code == 2);
    CHECK(run_cli("masses --system ho --out " + out).exit_code == 2);
    CHECK(run_cli("spectrum --system ho").exit_code == 2);  // no --out
    CHECK(run_cli("xform-check --system ho --points 0 --out " + out).exit_code == 2);
    CHECK(run_cli("nosuchcommand").exit_code == 2);
    CHECK(run_cli("spectrum --system ho --lambda -1 --lambda -2 --out " + out).exit_code == 2);
}

TEST_CASE("per-level failures keep spectrum exit at 0") {
    TempDir tmp;
    const auto out = (tmp.path / "x.csv").string();
    // the continuation walks into the pole for some levels; those rows are
    // flagged invalid but the run still succeeds
    const auto r = run_cli("spectrum --system ho --q 3 --lambda 0.9 --n-max 3 --out " + out);
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp(out));
    bool any_invalid = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv(lines[i]);
        if (fields[3] == "false") {
            any_invalid = true;
            CHECK(fields[2].empty());
        }
    }
    CHECK(any_invalid);
}

TEST_CASE("numerical failures exit with code 3") {
    TempDir tmp;
    const auto cfg = tmp.path / "cfg.json";
    {
        std::ofstream out(cfg);
        // grid reaching far below the resolvable region: the finite
        // difference stencil leaves the mapped domain
        out << R"({"system":"ho","xform":{"u_min":1e-6,"u_max":5.0,"points":16}})";
    }
    const auto out = (tmp.path / "x.csv").string();
    const auto r = run_cli("xform-check --config " + cfg.string() + " --out " + out);
    CHECK(r.exit_code == 3);
}
