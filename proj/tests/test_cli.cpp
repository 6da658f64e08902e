// End-to-end checks of the command line tool.  The binary under test is passed
// with --cli <path> (wired up by CMake); everything runs through a real
// subprocess so exit codes and file outputs are exercised exactly as a user
// would see them.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <hnoma/imaging.hpp>

namespace fs = std::filesystem;

namespace {

std::string g_cli;

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("/tmp/hnoma_cli_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

int data_rows(const std::string& csv) {
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  return lines - 1;  // minus the header
}

// A deliberately small scenario so the whole suite stays fast: static channel,
// capped bit budget, three SNR points.
const char* kFastBer =
    "[run]\n"
    "schemes = tnoma\n"
    "[scenario]\n"
    "users = 2\n"
    "distances = 2 1\n"
    "alphas = 0.92 0.08\n"
    "modulation = 4\n"
    "fading = awgn\n"
    "path_loss_exponent = 0\n"
    "snr_db = 0 4 8\n"
    "seed = 1\n"
    "min_errors = 50\n"
    "max_bits = 20000\n"
    "chunk_blocks = 128\n";

}  // namespace

TEST_CASE("ber subcommand writes curves, a manifest, and is seed-deterministic") {
  const fs::path dir = fresh_dir("ber");
  write_text(dir / "run.cfg", kFastBer);

  const std::string base =
      "ber --config " + (dir / "run.cfg").string() + " --seed 7 --out-dir ";
  RunResult r = run_cli(base + (dir / "a").string());
  CHECK(r.code == 0);

  const std::string csv = read_text(dir / "a" / "ber_curves.csv");
  CHECK(csv.rfind("scheme,user,snr_db,bits,errors,ber,ci_low,ci_high\n", 0) == 0);
  CHECK(data_rows(csv) == 6);  // 2 users x 3 SNR points
  CHECK(csv.find("tnoma,1,") != std::string::npos);
  CHECK(csv.find("tnoma,2,") != std::string::npos);

  const std::string manifest = read_text(dir / "a" / "manifest.json");
  CHECK(manifest.find("\"command\": \"ber\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
  CHECK(manifest.find("ber_curves.csv") != std::string::npos);
  CHECK(manifest.find("\"tool_version\"") != std::string::npos);
  // the manifest echoes the fully resolved configuration
  CHECK(manifest.find("alphas") != std::string::npos);

  RunResult r2 = run_cli(base + (dir / "b").string());
  CHECK(r2.code == 0);
  CHECK(read_text(dir / "b" / "ber_curves.csv") == csv);

  // a different seed must actually change the sampled counts
  RunResult r3 = run_cli("ber --config " + (dir / "run.cfg").string() +
                         " --seed 8 --out-dir " + (dir / "c").string());
  CHECK(r3.code == 0);
  CHECK(read_text(dir / "c" / "ber_curves.csv") != csv);
}

TEST_CASE("configuration problems exit with code 2 and name the offender") {
  const fs::path dir = fresh_dir("badcfg");

  write_text(dir / "missing.cfg",
             "[run]\nschemes = tnoma\n[scenario]\nusers = 2\n"
             "distances = 2 1\nmodulation = 4\nsnr_db = 10\n");
  RunResult r = run_cli("ber --config " + (dir / "missing.cfg").string() +
                        " --out-dir " + (dir / "o1").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("scenario.alphas") != std::string::npos);

  write_text(dir / "badmod.cfg",
             "[run]\nschemes = tnoma\n[scenario]\nusers = 2\n"
             "distances = 2 1\nalphas = 0.7 0.3\nmodulation = 8\nsnr_db = 10\n");
  r = run_cli("ber --config " + (dir / "badmod.cfg").string() + " --out-dir " +
              (dir / "o2").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("modulation orders must be 2, 4, 16, or 64") !=
        std::string::npos);

  write_text(dir / "ok.cfg", kFastBer);
  r = run_cli("ber --config " + (dir / "ok.cfg").string() +
              " --set nonsense --out-dir " + (dir / "o3").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("--set expects section.key=value") != std::string::npos);

  r = run_cli("ber --config " + (dir / "ok.cfg").string() +
              " --set scenario.users=3 --out-dir " + (dir / "o4").string());
  CHECK(r.code == 2);  // overrides go through full validation too

  r = run_cli("ber --config " + (dir / "ok.cfg").string() +
              " --set run.frobnicate=1 --out-dir " + (dir / "o5").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("unknown key") != std::string::npos);
}

TEST_CASE("analytic subcommand emits one row per user per SNR point") {
  const fs::path dir = fresh_dir("analytic");
  write_text(dir / "an.cfg",
             "[run]\nschemes = tnoma\n[scenario]\nusers = 2\n"
             "distances = 6.015 1\nalphas = 0.7 0.3\nmodulation = 4\n"
             "fading = rayleigh\npath_loss_exponent = 2\nsnr_db = 10\n");

  RunResult r = run_cli("analytic --config " + (dir / "an.cfg").string() +
                        " --out-dir " + (dir / "out").string());
  CHECK(r.code == 0);
  const std::string csv = read_text(dir / "out" / "analytic_curves.csv");
  CHECK(data_rows(csv) == 2);
  CHECK(count_occurrences(csv, "analytic,1,10") == 1);
  CHECK(count_occurrences(csv, "analytic,2,10") == 1);

  // the closed forms cover the rayleigh two-user setup only
  write_text(dir / "awgn.cfg",
             "[run]\nschemes = tnoma\n[scenario]\nusers = 2\n"
             "distances = 2 1\nalphas = 0.7 0.3\nmodulation = 4\n"
             "fading = awgn\nsnr_db = 10\n");
  r = run_cli("analytic --config " + (dir / "awgn.cfg").string() +
              " --out-dir " + (dir / "out2").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("rayleigh") != std::string::npos);
}

TEST_CASE("genimg produces parseable synthetic images") {
  const fs::path dir = fresh_dir("genimg");
  RunResult r = run_cli("genimg --pattern gradient --width 8 --height 8 --out " +
                        (dir / "g.pgm").string());
  CHECK(r.code == 0);
  hnoma::GrayImage img = hnoma::read_pgm((dir / "g.pgm").string());
  CHECK(img.width == 8);
  CHECK(img.height == 8);
  CHECK(img.pixels.front() == 0);
  CHECK(img.pixels.back() == 255);

  r = run_cli("genimg --pattern plaid --out " + (dir / "p.pgm").string());
  CHECK(r.code == 2);

  r = run_cli("genimg --pattern checkerboard --width 6 --height 6 --scale 3 "
              "--out " +
              (dir / "c.pgm").string());
  CHECK(r.code == 0);
  img = hnoma::read_pgm((dir / "c.pgm").string());
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[3] == 255);
}

TEST_CASE("image subcommand reconstructs exactly on a clean channel") {
  const fs::path dir = fresh_dir("image");
  REQUIRE(run_cli("genimg --pattern gradient --width 8 --height 8 --out " +
                  (dir / "far.pgm").string())
              .code == 0);
  REQUIRE(run_cli("genimg --pattern checkerboard --width 8 --height 8 "
                  "--scale 2 --out " +
                  (dir / "near.pgm").string())
              .code == 0);

  write_text(dir / "img.cfg",
             "[run]\nschemes = tnoma hnoma\n[scenario]\nusers = 2\n"
             "distances = 2 1\nalphas = 0.92 0.08\nmodulation = 4\n"
             "fading = awgn\npath_loss_exponent = 0\nsnr_db = 60\nseed = 1\n");

  RunResult r = run_cli("image " + (dir / "far.pgm").string() + " " +
                        (dir / "near.pgm").string() + " --config " +
                        (dir / "img.cfg").string() + " --out-dir " +
                        (dir / "out").string());
  CHECK(r.code == 0);

  const std::string psnr = read_text(dir / "out" / "psnr.json");
  // a perfect reconstruction reports an unbounded ratio as the string "inf"
  CHECK(count_occurrences(psnr, "\"inf\"") == 4);
  CHECK(count_occurrences(psnr, "\"bit_errors\": 0") == 4);
  CHECK(psnr.find("\"scheme\": \"tnoma\"") != std::string::npos);
  CHECK(psnr.find("\"scheme\": \"hnoma\"") != std::string::npos);

  // reconstructed files are byte-identical to the canonical sources
  for (const char* scheme : {"tnoma", "hnoma"}) {
    const std::string far =
        read_text(dir / "out" / ("recon_" + std::string(scheme) + "_far.pgm"));
    const std::string near =
        read_text(dir / "out" / ("recon_" + std::string(scheme) + "_near.pgm"));
    CHECK(far == read_text(dir / "far.pgm"));
    CHECK(near == read_text(dir / "near.pgm"));
  }

  // mismatched dimensions are a usage error
  REQUIRE(run_cli("genimg --pattern gradient --width 4 --height 4 --out " +
                  (dir / "small.pgm").string())
              .code == 0);
  r = run_cli("image " + (dir / "far.pgm").string() + " " +
              (dir / "small.pgm").string() + " --config " +
              (dir / "img.cfg").string() + " --out-dir " +
              (dir / "out2").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("image dimensions differ") != std::string::npos);
}

TEST_CASE("plot renders a deterministic SVG with one polyline per curve") {
  const fs::path dir = fresh_dir("plot");
  write_text(dir / "run.cfg", kFastBer);
  REQUIRE(run_cli("ber --config " + (dir / "run.cfg").string() +
                  " --out-dir " + (dir / "sim").string())
              .code == 0);

  const std::string csv_path = (dir / "sim" / "ber_curves.csv").string();
  RunResult r = run_cli("plot " + csv_path + " " + (dir / "a.svg").string());
  CHECK(r.code == 0);
  const std::string svg = read_text(dir / "a.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 2);  // one per user
  CHECK(svg.find("tnoma u1") != std::string::npos);
  CHECK(svg.find("tnoma u2") != std::string::npos);

  REQUIRE(run_cli("plot " + csv_path + " " + (dir / "b.svg").string()).code ==
          0);
  CHECK(read_text(dir / "b.svg") == svg);

  write_text(dir / "empty.csv",
             "scheme,user,snr_db,bits,errors,ber,ci_low,ci_high\n");
  r = run_cli("plot " + (dir / "empty.csv").string() + " " +
              (dir / "c.svg").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("no data rows") != std::string::npos);

  write_text(dir / "badhdr.csv", "a,b,c\n1,2,3\n");
  r = run_cli("plot " + (dir / "badhdr.csv").string() + " " +
              (dir / "d.svg").string());
  CHECK(r.code == 2);
}

TEST_CASE("exit code contract") {
  const fs::path dir = fresh_dir("exitcodes");
  CHECK(run_cli("").code == 2);               // a subcommand is required
  CHECK(run_cli("frobnicate").code == 2);     // unknown subcommand
  CHECK(run_cli("ber").code == 2);            // --config is required
  CHECK(run_cli("ber --config /nonexistent.cfg --out-dir " +
                (dir / "o").string())
            .code == 2);

  RunResult r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(r.output.find("1.0.0") != std::string::npos);

  r = run_cli("--help");
  CHECK(r.code == 0);
  CHECK(r.output.find("ber") != std::string::npos);
  CHECK(r.output.find("plot") != std::string::npos);
}

int main(int argc, char** argv) {
  std::vector<char*> rest;
  for (int i = 0; i < argc; ++i) {
    if (std::string(argv[i]) == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
      continue;
    }
    rest.push_back(argv[i]);
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: hnoma_cli_tests --cli <path-to-binary>\n");
    return 1;
  }
  doctest::Context ctx(static_cast<int>(rest.size()), rest.data());
  return ctx.run();
}
