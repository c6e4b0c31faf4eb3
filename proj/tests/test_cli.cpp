#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

const fs::path& sandbox() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "sse_cli_suite";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_file = sandbox() / ("stdout_" + std::to_string(counter));
    const fs::path err_file = sandbox() / ("stderr_" + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string(SSE_CLI_PATH) + " " + args + " >" + out_file.string() +
                            " 2>" + err_file.string();
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(out_file), slurp(err_file)};
}

// Small problem, deterministic init, fast in every estimator mode.
std::string base_config(const std::string& mode, const std::string& extra = "") {
    return "[problem]\n"
           "n = 3\n"
           "onsite_seed = 5\n"
           "[init]\n"
           "type = ground_perturbed\n"
           "perturbation = 0.3\n"
           "[filter]\n"
           "keep_k = 10\n"
           "[estimator]\n"
           "mode = " + mode + "\n" +
           extra +
           "[seeds]\n"
           "vqe = 21\n"
           "shadows = 22\n"
           "noise = 23\n"
           "[output]\n"
           "prefix = t\n";
}

}  // namespace

TEST_CASE("run verb succeeds and is byte-stable across reruns") {
    const fs::path cfg = sandbox() / "run.ini";
    write_file(cfg, base_config("gauss:1e-3"));
    const fs::path out_a = sandbox() / "a";
    const fs::path out_b = sandbox() / "b";

    CliResult first = run_cli("run --config " + cfg.string() + " --out " + out_a.string());
    INFO(first.err);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out.find("E_reported=") != std::string::npos);
    CHECK(first.out.find("wrote ") != std::string::npos);

    CliResult second = run_cli("run --config " + cfg.string() + " --out " + out_b.string());
    REQUIRE(second.exit_code == 0);

    for (const char* name : {"t_result.json", "t_levels.csv", "t_spectrum.csv"}) {
        const std::string a = slurp(out_a / name);
        const std::string b = slurp(out_b / name);
        INFO(name);
        CHECK(!a.empty());
        CHECK(a == b);
    }

    const auto j = nlohmann::json::parse(slurp(out_a / "t_result.json"));
    CHECK(j.at("command") == "run");
    CHECK(j.at("n") == 3);
    CHECK(j.at("mode").get<std::string>().rfind("gauss", 0) == 0);
    CHECK(j.at("filter").at("kept") == 10);
    CHECK_FALSE(j.at("exact_energy").is_null());
    // reported energy never sits above the direct estimate
    CHECK(j.at("E_reported").get<double>() <= j.at("E_direct").get<double>() + 1e-12);
}

TEST_CASE("mode and seed overrides reach the pipeline") {
    const fs::path cfg = sandbox() / "override.ini";
    write_file(cfg, base_config("exact"));
    const fs::path out_a = sandbox() / "ov_a";
    const fs::path out_b = sandbox() / "ov_b";

    CliResult a = run_cli("run --config " + cfg.string() + " --out " + out_a.string() +
                          " --mode gauss:1e-2 --seed-override 99");
    REQUIRE(a.exit_code == 0);
    CliResult b = run_cli("run --config " + cfg.string() + " --out " + out_b.string() +
                          " --mode gauss:1e-2 --seed-override 100");
    REQUIRE(b.exit_code == 0);

    const auto ja = nlohmann::json::parse(slurp(out_a / "t_result.json"));
    const auto jb = nlohmann::json::parse(slurp(out_b / "t_result.json"));
    CHECK(ja.at("mode").get<std::string>().rfind("gauss", 0) == 0);
    CHECK(ja.at("seeds").at("noise") == 99);
    CHECK(jb.at("seeds").at("noise") == 100);
    // different noise streams must give different noisy estimates
    CHECK(ja.at("E_sse").get<double>() != jb.at("E_sse").get<double>());

    CliResult bad = run_cli("run --config " + cfg.string() + " --seed-override 12x");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("--seed-override") != std::string::npos);
}

TEST_CASE("sweep and report verbs write their artifacts") {
    const fs::path out = sandbox() / "verbs";
    const fs::path cfg = sandbox() / "verbs.ini";
    write_file(cfg, base_config("gauss:1e-2",
                                "[sweep]\n"
                                "k_values = 4, 8\n"
                                "noise_values = 1e-2, 1e-3\n"
                                "replicas = 2\n"));

    CHECK(run_cli("sweep-k --config " + cfg.string() + " --out " + out.string()).exit_code == 0);
    CHECK(run_cli("sweep-noise --config " + cfg.string() + " --out " + out.string()).exit_code ==
          0);
    CHECK(run_cli("spectrum --config " + cfg.string() + " --out " + out.string()).exit_code == 0);
    CHECK(run_cli("filter-report --config " + cfg.string() + " --out " + out.string()).exit_code ==
          0);

    const std::string sweep_k = slurp(out / "t_sweep_k.csv");
    CHECK(sweep_k.rfind("K,K_effective,replica,seed,", 0) == 0);
    // 2 K values x 2 replicas = 4 data rows
    CHECK(std::count(sweep_k.begin(), sweep_k.end(), '\n') == 5);

    const std::string sweep_noise = slurp(out / "t_sweep_noise.csv");
    CHECK(sweep_noise.rfind("level,replica,seed,", 0) == 0);
    CHECK(sweep_noise.find("# level ") != std::string::npos);
    CHECK(sweep_noise.find("median_abs_error") != std::string::npos);

    const std::string spectrum = slurp(out / "t_spectrum.csv");
    CHECK(spectrum.rfind("index,eigenvalue", 0) == 0);
    CHECK(spectrum.find("# above_floor") != std::string::npos);

    const std::string filter = slurp(out / "t_filter.csv");
    CHECK(filter.rfind("rank,word,delta_e,kept", 0) == 0);
    CHECK(filter.find("III") != std::string::npos);
}

TEST_CASE("gate-noise verb runs a density-matrix sweep") {
    const fs::path out = sandbox() / "gate";
    const fs::path cfg = sandbox() / "gate.ini";
    // gate-noise needs a circuit-producing init, so no base_config here
    write_file(cfg,
               "[problem]\n"
               "n = 3\n"
               "onsite_seed = 5\n"
               "[init]\n"
               "type = vqe\n"
               "layers = 1\n"
               "steps = 5\n"
               "[filter]\n"
               "keep_k = 8\n"
               "[estimator]\n"
               "mode = shadowvar:100000\n"
               "[sweep]\n"
               "lambda_values = 0.1, 0.5\n"
               "[seeds]\n"
               "vqe = 21\n"
               "shadows = 22\n"
               "noise = 23\n"
               "[output]\n"
               "prefix = t\n");
    CliResult r = run_cli("gate-noise --config " + cfg.string() + " --out " + out.string());
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out / "t_gate_noise.csv");
    CHECK(csv.rfind("lambda,p1,replica,seed,", 0) == 0);
    CHECK(csv.find("# lambda ") != std::string::npos);
    CHECK(csv.find("fault_rate") != std::string::npos);
}

TEST_CASE("config problems exit with code 2 and a located message") {
    CliResult missing = run_cli("run --config " + (sandbox() / "absent.ini").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("config error") != std::string::npos);
    CHECK(missing.err.find("cannot open config file") != std::string::npos);

    const fs::path bad_ini = sandbox() / "bad.ini";
    write_file(bad_ini, "not a section\n");
    CliResult malformed = run_cli("run --config " + bad_ini.string());
    CHECK(malformed.exit_code == 2);
    CHECK(malformed.err.find("bad.ini:1") != std::string::npos);

    const fs::path ham = sandbox() / "h_bad.txt";
    write_file(ham, "1.0 ZZ\n0.5 QZ\n");
    const fs::path file_cfg = sandbox() / "file.ini";
    write_file(file_cfg,
               "[problem]\ntype = file\nhamiltonian_file = h_bad.txt\n"
               "[filter]\nkeep_k = 4\n"
               "[seeds]\nvqe = 1\nshadows = 2\nnoise = 3\n");
    CliResult bad_ham = run_cli("run --config " + file_cfg.string());
    CHECK(bad_ham.exit_code == 2);
    CHECK(bad_ham.err.find("line 2") != std::string::npos);
    CHECK(bad_ham.err.find("invalid Pauli letter") != std::string::npos);

    const fs::path no_sweep = sandbox() / "nosweep.ini";
    write_file(no_sweep, base_config("exact"));
    CliResult sweep_k = run_cli("sweep-k --config " + no_sweep.string());
    CHECK(sweep_k.exit_code == 2);
    CHECK(sweep_k.err.find("k_values") != std::string::npos);

    const fs::path exact_sweep = sandbox() / "exactsweep.ini";
    write_file(exact_sweep, base_config("exact", "[sweep]\nnoise_values = 1e-2\n"));
    CliResult exact_noise = run_cli("sweep-noise --config " + exact_sweep.string());
    CHECK(exact_noise.exit_code == 2);
    CHECK(exact_noise.err.find("noisy estimator") != std::string::npos);

    CliResult no_verb = run_cli("--config " + no_sweep.string());
    CHECK(no_verb.exit_code == 2);
}

TEST_CASE("simulator limits surface as exit code 3") {
    const fs::path cfg = sandbox() / "big.ini";
    write_file(cfg,
               "[problem]\n"
               "n = 15\n"
               "onsite_seed = 5\n"
               "[init]\n"
               "type = vqe\n"
               "layers = 1\n"
               "steps = 1\n"
               "[filter]\n"
               "keep_k = 4\n"
               "[seeds]\n"
               "vqe = 1\nshadows = 2\nnoise = 3\n");
    CliResult r = run_cli("run --config " + cfg.string() + " --out " + (sandbox() / "big").string());
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("numerical error") != std::string::npos);
    CHECK(r.err.find("dimension too large") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    CliResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("run") != std::string::npos);
}
