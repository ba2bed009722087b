// Drives the built CLI binary: determinism of CSV bytes, exit-status
// contract of verify, and fixture failure reporting.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command) { return std::system(command.c_str()); }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <entlab-binary> <fixtures-dir>\n", argv[0]);
    return 2;
  }
  const std::string tool = argv[1];
  const std::string fixtures = argv[2];
  const fs::path dir = fs::temp_directory_path() / "entlab_cli_check";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // determinism: same config + seed, two runs, two workers, identical bytes
  {
    const std::string base1 = (dir / "run1").string();
    const std::string base2 = (dir / "run2").string();
    const std::string common =
        " estimate --system full_shift:m=2 --eps 0.4 --n 1..10 --seed 7 --output ";
    const int rc1 =
        run("ENTLAB_WORKERS=2 " + tool + common + base1 + " > " + (dir / "o1").string());
    const int rc2 =
        run("ENTLAB_WORKERS=1 " + tool + common + base2 + " > " + (dir / "o2").string());
    check(rc1 == 0 && rc2 == 0, "estimate runs exit 0");
    check(slurp(base1 + ".csv") == slurp(base2 + ".csv"),
          "identical config+seed yields byte-identical CSV across worker counts");
    check(slurp(base1 + ".csv").rfind("system,metric,eps,n,count,log_count,rate_window\n",
                                      0) == 0,
          "CSV header matches the documented column order");
  }

  // config-file path and JSON output
  {
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << R"({"system": "torus:2", "eps": [0.05], "n": "1..8",
                              "delta": 0.0009765625, "estimator": "bowen",
                              "output": ")"
                       << (dir / "torus").string() << R"("})";
    const int rc = run(tool + " estimate --config " + cfg.string() + " > " +
                       (dir / "o3").string());
    check(rc == 0, "config-file estimate exits 0");
    check(fs::exists(dir / "torus.json"), "JSON report written next to the CSV");
  }

  // usage errors exit 2
  {
    const int rc = run(tool + " estimate --system banana --eps 0.4 --n 1..8 2> " +
                       (dir / "err").string());
    check(WEXITSTATUS(rc) == 2, "unknown system is a usage error (exit 2)");
    const int rc2 = run(tool + " verify --suite nonsense 2> " + (dir / "err2").string());
    check(WEXITSTATUS(rc2) == 2, "unknown suite is a usage error (exit 2)");
  }

  // verify covers: exit 0 and per-check lines
  {
    const int rc = run(tool + " verify --suite covers --seed 7 --fixtures " + fixtures +
                       " > " + (dir / "verify_out").string());
    check(WEXITSTATUS(rc) == 0, "verify covers (seed 7) exits 0");
    const std::string out = slurp(dir / "verify_out");
    check(out.find("[PASS] covers/subadditivity") != std::string::npos,
          "verify prints per-check rows");
  }

  // corrupted fixture: exit 1 and the failing check names the file
  {
    const fs::path bad_dir = dir / "bad_fixtures";
    fs::create_directories(bad_dir);
    std::ofstream(bad_dir / "corrupt.json") << "{\"ground_size\": 4, \"members\": [[0,1]]}";
    const int rc = run(tool + " verify --suite covers --seed 7 --fixtures " +
                       bad_dir.string() + " > " + (dir / "verify_bad").string());
    check(WEXITSTATUS(rc) == 1, "corrupted fixture makes verify exit 1");
    const std::string out = slurp(dir / "verify_bad");
    check(out.find("corrupt.json") != std::string::npos,
          "the failing check names the corrupted fixture");
  }

  std::printf("%d failures\n", failures);
  fs::remove_all(dir);
  return failures == 0 ? 0 : 1;
}
