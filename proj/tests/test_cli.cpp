// End-to-end checks of the installed CLI. argv[1] is the binary path;
// everything runs in a scratch directory under TMPDIR.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

void expect(bool condition, const std::string& what) {
    if (!condition) {
        std::cerr << "FAILED: " << what << "\n";
        ++g_failures;
    }
}

int run(const std::string& args) {
    const std::string command = g_cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <path-to-imsprep>\n";
        return 64;
    }
    g_cli = argv[1];
    const fs::path work = fs::temp_directory_path() / "imsprep_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string w = work.string();

    // simulate twice with the same seed: byte-identical outputs
    expect(run("simulate --rows 24 --cols 40 --replicates 2 --seed 7 --out " + w + "/sim_a") == 0,
           "simulate run a");
    expect(run("simulate --rows 24 --cols 40 --replicates 2 --seed 7 --out " + w + "/sim_b") == 0,
           "simulate run b");
    for (const char* name : {"clean_000.csv", "noisy_000.csv", "clean_001.csv", "truth_001.json"}) {
        expect(fs::exists(work / "sim_a" / name), std::string("missing ") + name);
        expect(slurp(work / "sim_a" / name) == slurp(work / "sim_b" / name),
               std::string("determinism of ") + name);
    }
    expect(fs::exists(work / "sim_a" / "manifest.json"), "simulate manifest");

    // a different seed changes the data
    expect(run("simulate --rows 24 --cols 40 --replicates 1 --seed 8 --out " + w + "/sim_c") == 0,
           "simulate run c");
    expect(slurp(work / "sim_a" / "clean_000.csv") != slurp(work / "sim_c" / "clean_000.csv"),
           "seed changes output");

    // process denoise (em) writes matrix + report
    expect(run("process denoise --method em --rho 2 --input " + w + "/sim_a/noisy_000.csv --out " + w +
               "/denoised.csv --report " + w + "/denoise_report.json") == 0,
           "process denoise em");
    expect(fs::exists(work / "denoised.csv"), "denoised output exists");
    const std::string report = slurp(work / "denoise_report.json");
    expect(report.find("\"iterations\"") != std::string::npos, "report has iterations");
    expect(report.find("\"omega_b\"") != std::string::npos, "report has omega_b");

    // reference smoothers and baseline corrections run
    expect(run("process denoise --method savitzky_golay --input " + w + "/sim_a/noisy_000.csv --out " +
               w + "/sg.csv") == 0,
           "process denoise savitzky_golay");
    expect(run("process baseline --method median --input " + w + "/sim_a/noisy_000.csv --out " + w +
               "/median.csv") == 0,
           "process baseline median");
    expect(fs::exists(work / "median.csv.report.json"), "default report written next to the output");

    // scenario simulation and clustering
    expect(run("simulate --scenario --scenario-noise --replicates 1 --seed 3 --out " + w + "/scen") == 0,
           "simulate scenario");
    expect(fs::exists(work / "scen" / "peaks_000.csv"), "scenario peaks exist");
    expect(run("process cluster --method em --input " + w + "/scen/peaks_000.csv --out " + w +
               "/clusters.json --report " + w + "/cluster_report.json") == 0,
           "process cluster em");
    const std::string clusters = slurp(work / "clusters.json");
    expect(clusters.find("\"assignments\"") != std::string::npos, "clustering json has assignments");
    expect(run("process cluster --method kmeanspp --input " + w + "/scen/peaks_000.csv --out " + w +
               "/km.json") == 0,
           "process cluster kmeanspp uses labels for k");
    expect(run("process cluster --method dbscan --input " + w + "/scen/peaks_000.csv --out " + w +
               "/db.json") == 0,
           "process cluster dbscan");

    // evaluate: deterministic score tables
    const std::string eval_args = "evaluate clustering --replicates 2 --seed 5 --out ";
    expect(run(eval_args + w + "/eval_a") == 0, "evaluate clustering a");
    expect(run(eval_args + w + "/eval_b") == 0, "evaluate clustering b");
    expect(slurp(work / "eval_a" / "scores.csv") == slurp(work / "eval_b" / "scores.csv"),
           "evaluate determinism");
    const std::string scores = slurp(work / "eval_a" / "scores.csv");
    expect(scores.rfind("replicate,method,score_name,score", 0) == 0, "score csv header");
    expect(scores.find("dbscan,fmi") != std::string::npos, "score csv has dbscan fmi");
    expect(fs::exists(work / "eval_a" / "summary.csv"), "summary exists");
    expect(fs::exists(work / "eval_a" / "histogram.csv"), "histogram exists");
    expect(fs::exists(work / "eval_a" / "manifest.json"), "evaluate manifest");

    // small denoising evaluation exercises all four methods end to end
    expect(run("evaluate denoising --replicates 1 --rows 40 --cols 100 --seed 5 --out " + w +
               "/eval_d") == 0,
           "evaluate denoising");
    expect(slurp(work / "eval_d" / "scores.csv").find("fft_lowpass") != std::string::npos,
           "denoising scores include fft_lowpass");

    // exit codes: 1 for contract violations, 2 for i/o problems
    expect(run("process denoise --method bogus --input " + w + "/sim_a/noisy_000.csv --out " + w +
               "/x.csv") == 1,
           "unknown method exits 1");
    expect(run("process denoise --method em --input " + w + "/missing.csv --out " + w + "/x.csv") == 2,
           "missing input exits 2");
    expect(run("evaluate bogus --out " + w + "/x") == 1, "unknown experiment exits 1");
    expect(run("definitely-not-a-subcommand") == 1, "parse error exits 1");

    if (g_failures == 0) {
        std::cout << "cli checks passed\n";
        fs::remove_all(work);
        return 0;
    }
    std::cerr << g_failures << " cli checks failed (artifacts kept in " << w << ")\n";
    return 1;
}
