#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Exercises the installed command-line surface end to end: exit codes,
// artifact layout and byte determinism. MLSG_CLI_PATH is injected by CMake.

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return MLSG_CLI_PATH; }

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(cli_path()) + " " + args +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "mlsg_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream os(p, std::ios::binary);
    os << body;
}

std::string baseline_config(const fs::path& out, const std::string& extra_model = "",
                            const std::string& extra_top = "") {
    std::ostringstream os;
    os << R"({
  "model": {
    "beta_p": 0.1, "beta_w": 0.2, "delta": 0.1,
    "beta_x": 0.1, "gamma_p": 0.1, "gamma_w": 0.0001, "gamma_x": 0.1,
    "alpha": 1.0, "c0": 1.0, "r": 0.05, "horizon": 1.0)"
       << extra_model << R"(
  },
  "mesh": {"n_steps": 1000},
  "sim": {"n_paths": 500, "n_steps": 100, "seed": 11, "x0": 1.0, "sigma_scale": 1.0},
  "sweep": {"parameter": "c0", "values": [1, 1.5, 2, 2.5], "outputs": ["w_x", "w_0", "I_s0", "I_b0"]},
  "output_dir": ")"
       << out.string() << '"' << extra_top << "\n}\n";
    return os.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("solve writes the documented artifacts and exits zero") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_solve";
    const fs::path cfg = dir / "solve.json";
    write(cfg, baseline_config(out));
    CHECK(run_cli("solve --config " + cfg.string() + " --quiet") == 0);

    const std::string csv = slurp(out / "riccati.csv");
    CHECK(csv.rfind("t,P2,P1,P0,N2,N1,N0\n0,", 0) == 0);
    // terminal row is all zeros in the coefficient columns
    const std::string last_line = csv.substr(csv.rfind("\n1,") + 1);
    CHECK(last_line == "1,0,0,0,0,0,0\n");
    CHECK(fs::exists(out / "strategies.csv"));
    CHECK(fs::exists(out / "existence.json"));
    CHECK(fs::exists(out / "value_probes.csv"));
}

TEST_CASE("invalid parameters exit 64 naming the violated invariant") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "bad.json";
    std::string body = baseline_config(dir / "out_bad");
    const auto pos = body.find("\"gamma_w\": 0.0001");
    body.replace(pos, 17, "\"gamma_w\": 0.0");
    write(cfg, body);

    const std::string cmd = std::string(cli_path()) + " solve --config " + cfg.string() +
                            " 2> " + (dir / "stderr.txt").string();
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 64);
    CHECK(slurp(dir / "stderr.txt").find("gamma_w") != std::string::npos);
}

TEST_CASE("blow-up regimes exit 2 with the existence window in the report") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_blowup";
    const fs::path cfg = dir / "blowup.json";
    std::string body = baseline_config(out);
    const auto pos = body.find("\"delta\": 0.1");
    body.replace(pos, 12, "\"delta\": 1000.0");
    write(cfg, body);
    CHECK(run_cli("solve --config " + cfg.string() + " --quiet") == 2);
    const std::string rep = slurp(out / "existence.json");
    CHECK(rep.find("\"existence_ok\": false") != std::string::npos);
    CHECK(rep.find("\"eta\"") != std::string::npos);
}

TEST_CASE("missing output_dir exits 64") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "noout.json";
    std::string body = baseline_config(dir / "unused");
    const auto pos = body.find("\"output_dir\"");
    body = body.substr(0, pos) + "\"unused\": \"x\"\n}\n";
    write(cfg, body);
    CHECK(run_cli("simulate --config " + cfg.string()) == 64);
}

TEST_CASE("verify passes on the baseline and fails on a corrupted solution") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_verify";
    const fs::path cfg = dir / "verify.json";
    // no sim block: keep the battery fast
    std::string body = baseline_config(out);
    auto pos = body.find("\"sim\":");
    body.erase(pos, body.find("\"sweep\":") - pos);
    write(cfg, body);
    CHECK(run_cli("verify --config " + cfg.string() + " --quiet") == 0);
    CHECK(slurp(out / "verify_report.json").find("\"pass\": true") != std::string::npos);

    // Corrupt the solved trajectories and verify against the file.
    CHECK(run_cli("solve --config " + cfg.string() + " --quiet") == 0);
    std::string csv = slurp(out / "riccati.csv");
    const auto row = csv.find("\n0.5,");
    REQUIRE(row != std::string::npos);
    const auto comma = csv.find(',', row + 1);
    csv.replace(comma + 1, csv.find(',', comma + 1) - comma - 1, "0.25");
    write(dir / "corrupt.csv", csv);

    std::string vbody = baseline_config(out);
    pos = vbody.find("\"sim\":");
    vbody.erase(pos, vbody.find("\"sweep\":") - pos);
    pos = vbody.rfind("\n}");
    vbody = vbody.substr(0, pos) + ",\n  \"solution_csv\": \"" +
            (dir / "corrupt.csv").string() + "\"\n}\n";
    write(dir / "verify_corrupt.json", vbody);
    CHECK(run_cli("verify --config " + (dir / "verify_corrupt.json").string() +
                  " --quiet") == 1);
}

TEST_CASE("verify passes on the state-independent degenerate game") {
    // gamma_x = 0: strategies lose their state dependence and per-path
    // profits are deterministic, so the profit-bracket check must lean on
    // its discretisation allowance rather than the vanishing standard error.
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_gx0";
    const fs::path cfg = dir / "gx0.json";
    std::string body = baseline_config(out);
    const auto pos = body.find("\"gamma_x\": 0.1");
    body.replace(pos, 14, "\"gamma_x\": 0.0");
    write(cfg, body);
    CHECK(run_cli("verify --config " + cfg.string() + " --quiet") == 0);
    CHECK(slurp(out / "verify_report.json").find("\"pass\": true") != std::string::npos);
}

TEST_CASE("single-path noiseless simulation is deterministic") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_sim1";
    const fs::path cfg = dir / "sim1.json";
    std::string body = baseline_config(out);
    const auto pos = body.find("\"sigma_scale\": 1.0");
    body.replace(pos, 18, "\"sigma_scale\": 0.0");
    const auto pos2 = body.find("\"n_paths\": 500");
    body.replace(pos2, 14, "\"n_paths\": 1");
    write(cfg, body);
    CHECK(run_cli("simulate --config " + cfg.string() + " --quiet") == 0);
    const std::string first_json = slurp(out / "sim_result.json");
    const std::string first_paths = slurp(out / "paths.csv");
    CHECK(first_paths.rfind("path,t,x,w,I_s,p,I_b,D\n0,0,1,", 0) == 0);
    CHECK(run_cli("simulate --config " + cfg.string() + " --quiet") == 0);
    CHECK(slurp(out / "sim_result.json") == first_json);
    CHECK(slurp(out / "paths.csv") == first_paths);
}

TEST_CASE("seed and worker count do or do not change artifacts as contracted") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_threads";
    const fs::path cfg = dir / "threads.json";
    write(cfg, baseline_config(out));
    CHECK(run_cli("simulate --config " + cfg.string() + " --quiet",
                  "MLSG_THREADS=1") == 0);
    const std::string one = slurp(out / "sim_result.json");
    CHECK(run_cli("simulate --config " + cfg.string() + " --quiet",
                  "MLSG_THREADS=2") == 0);
    CHECK(slurp(out / "sim_result.json") == one);
    CHECK(run_cli("simulate --config " + cfg.string() + " --quiet --seed 12",
                  "MLSG_THREADS=2") == 0);
    CHECK(slurp(out / "sim_result.json") != one);
}

TEST_CASE("sweep writes one csv and one plot per coefficient") {
    const fs::path dir = work_dir();
    const fs::path out = dir / "out_sweep";
    const fs::path cfg = dir / "sweep.json";
    write(cfg, baseline_config(out));
    CHECK(run_cli("sweep --config " + cfg.string() + " --quiet") == 0);
    CHECK(fs::exists(out / "sweep_c0.csv"));
    for (const char* name : {"fig_w_x_c0.svg", "fig_w_0_c0.svg", "fig_I_s0_c0.svg",
                             "fig_I_b0_c0.svg"})
        CHECK(fs::exists(out / name));
    // four value groups in the csv
    const std::string csv = slurp(out / "sweep_c0.csv");
    for (const char* v : {"\n1,", "\n1.5,", "\n2,", "\n2.5,"})
        CHECK(csv.find(v) != std::string::npos);
}

} // TEST_SUITE
