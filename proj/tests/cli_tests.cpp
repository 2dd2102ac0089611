// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Drives the installed command-line binary end to end: dataset synthesis,
// separation runs, artifact inspection, benchmark report and the exit-code
// contract.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* kCli = HLSEP_CLI_PATH;

// Fast factorisation settings so the CLI checks stay snappy.
const std::string kTiny =
    " --set nmf.max_iter=25 --set nmcf.heart_components=6 --set nmcf.lung_components=6"
    " --set nmcf.noise_components=3 --set baseline.shah_components=8"
    " --set baseline.cq_components=19 --set baseline.cq_heart_components=9"
    " --set synth.duration=6";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("hlsep_cli_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, std::string* output = nullptr) {
  const std::string log = (fs::temp_directory_path() / "hlsep_cli_out.txt").string();
  const std::string cmd = std::string(kCli) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(log);
    output->assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("synth + separate + inspect + bench round trip") {
  TempDir data("data");
  TempDir out("runs");

  // dataset with databases and one mixture
  CHECK(run("synth --out " + data.path.string() + " --n 1 --seed 3 --db-items 2" + kTiny) == 0);
  CHECK(fs::exists(data.path / "dataset.json"));
  CHECK(fs::exists(data.path / "db" / "heart" / "manifest.json"));
  CHECK(fs::exists(data.path / "db" / "lung" / "000.wav"));
  CHECK(fs::exists(data.path / "mix000" / "mixture.wav"));
  CHECK(fs::exists(data.path / "mix000" / "manifest.json"));

  // separation run directory contract
  const std::string run_dir = (out.path / "run1").string();
  const std::string sep_args = "separate --in " + (data.path / "mix000" / "mixture.wav").string() +
                               " --heart-db " + (data.path / "db" / "heart").string() +
                               " --lung-db " + (data.path / "db" / "lung").string() +
                               " --out " + run_dir + " --seed 7 --masks" + kTiny;
  CHECK(run(sep_args) == 0);
  for (const char* f : {"heart.wav", "lung.wav", "noise.wav", "cost_trace.csv",
                        "config.json", "factors.bin", "mask_heart.csv"}) {
    CHECK(fs::exists(fs::path(run_dir) / f));
  }

  // byte-identical rerun under the same seed
  const std::string run_dir2 = (out.path / "run2").string();
  std::string sep_args2 = sep_args;
  const auto pos = sep_args2.find(run_dir);
  sep_args2.replace(pos, run_dir.size(), run_dir2);
  CHECK(run(sep_args2) == 0);
  for (const char* f : {"heart.wav", "lung.wav", "noise.wav", "cost_trace.csv"}) {
    CHECK(slurp(fs::path(run_dir) / f) == slurp(fs::path(run_dir2) / f));
  }

  // inspect artifacts
  CHECK(run("inspect --run " + run_dir + " --what masks --format both") == 0);
  CHECK(fs::exists(fs::path(run_dir) / "mask_heart.png"));
  std::string png = slurp(fs::path(run_dir) / "mask_heart.png");
  REQUIRE(png.size() > 8);
  CHECK(static_cast<unsigned char>(png[0]) == 0x89);
  CHECK(png.substr(1, 3) == "PNG");

  CHECK(run("inspect --run " + run_dir + " --what dictionary") == 0);
  CHECK(fs::exists(fs::path(run_dir) / "dictionary.csv"));
  std::string cost_out;
  CHECK(run("inspect --run " + run_dir + " --what cost", &cost_out) == 0);
  CHECK(cost_out.find("iterations:") != std::string::npos);

  CHECK(run("inspect --run " + (out.path / "missing").string() + " --what masks") != 0);

  // spectrogram dump via inspect
  CHECK(run("inspect --what spectrogram --in " + (data.path / "mix000" / "mixture.wav").string() +
            " --out " + out.path.string()) == 0);
  CHECK(fs::exists(out.path / "mixture_spectrogram.csv"));
  std::ifstream sg(out.path / "mixture_spectrogram.csv");
  std::string header;
  std::getline(sg, header);
  CHECK(header.rfind("bin_hz,frame_0", 0) == 0);

  // bench over the single mixture: insufficient-n flag expected
  const std::string rep_dir = (out.path / "report").string();
  CHECK(run("bench --data " + data.path.string() + " --out " + rep_dir +
            " --methods nmcf,shah --seed 5" + kTiny) == 0);
  CHECK(fs::exists(fs::path(rep_dir) / "report.csv"));
  CHECK(fs::exists(fs::path(rep_dir) / "per_mixture.csv"));
  const std::string report_txt = slurp(fs::path(rep_dir) / "report.txt");
  CHECK(report_txt.find("insufficient-n") != std::string::npos);
  const std::string per_mix = slurp(fs::path(rep_dir) / "per_mixture.csv");
  CHECK(per_mix.find("mix000,mixture,") != std::string::npos);
  CHECK(per_mix.find("mix000,nmcf,") != std::string::npos);
  CHECK(per_mix.find("mix000,shah,") != std::string::npos);
}

TEST_CASE("synth determinism produces byte-identical datasets") {
  TempDir a("det_a");
  TempDir b("det_b");
  CHECK(run("synth --out " + a.path.string() + " --n 1 --seed 11 --db-items 1" + kTiny) == 0);
  CHECK(run("synth --out " + b.path.string() + " --n 1 --seed 11 --db-items 1" + kTiny) == 0);
  CHECK(slurp(a.path / "mix000" / "mixture.wav") == slurp(b.path / "mix000" / "mixture.wav"));
  CHECK(slurp(a.path / "db" / "heart" / "000.wav") == slurp(b.path / "db" / "heart" / "000.wav"));
  CHECK(slurp(a.path / "mix000" / "manifest.json") == slurp(b.path / "mix000" / "manifest.json"));
}

TEST_CASE("error reporting and exit codes") {
  TempDir t("errs");

  // missing input file -> data error
  std::string msg;
  CHECK(run("separate --in /no/such.wav --out " + (t.path / "x").string() + kTiny, &msg) == 2);

  // joint method without databases: message names the missing manifest
  CHECK(run("synth --out " + t.path.string() + " --n 1 --db-items 1" + kTiny) == 0);
  const int code = run("separate --in " + (t.path / "mix000" / "mixture.wav").string() +
                       " --out " + (t.path / "y").string() + kTiny, &msg);
  CHECK(code == 2);
  CHECK(msg.find("heart") != std::string::npos);
  CHECK(msg.find("database") != std::string::npos);

  // usage errors
  CHECK(run("separate", &msg) != 0);
  CHECK(run("bogus-subcommand", &msg) != 0);
  CHECK(run("inspect --run " + t.path.string() + " --what nonsense", &msg) == 1);

  // unknown config key is a usage error
  CHECK(run("synth --out " + (t.path / "z").string() + " --n 1 --set bad.key=1" + kTiny,
            &msg) == 1);
}
