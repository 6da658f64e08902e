#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hnoma/analytic.hpp"
#include "hnoma/config.hpp"
#include "hnoma/imaging.hpp"
#include "hnoma/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hnoma;

namespace {

constexpr const char* kVersion = "1.0.0";

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_format = true) {
  cmd->add_option("--config", o.config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets,
                  "override a config key, e.g. --set scenario.seed=9");
  cmd->add_option("--out-dir", o.out_dir,
                  "output directory (default: $HNOMA_OUT_DIR or .)");
  if (with_format)
    cmd->add_option("--format", o.format, "curve output format")
        ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "shorthand for --set scenario.seed=N");
  cmd->add_option("--workers", o.workers,
                  "shorthand for --set scenario.workers=N");
}

std::vector<std::pair<std::string, std::string>> overrides_from(
    const CommonOpts& o) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : o.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects section.key=value, got '" +
                                  s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) out.emplace_back("scenario.seed", std::to_string(*o.seed));
  if (o.workers)
    out.emplace_back("scenario.workers", std::to_string(*o.workers));
  return out;
}

fs::path resolve_out_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("HNOMA_OUT_DIR");
             env && *env != '\0') {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(p.string() + ": write failed");
}

class Manifest {
 public:
  Manifest(const char* command, const CommonOpts& o, const RunConfig& cfg)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = command;
    j_["config_path"] = o.config_path;
    j_["config_echo"] = serialize_run_config(cfg);
    j_["seed"] = cfg.scenario.seed;
    j_["workers"] = cfg.scenario.workers;
    j_["tool_version"] = kVersion;
    j_["outputs"] = json::array();
  }
  void add_output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  void write(const fs::path& dir) {
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start_;
    j_["duration_seconds"] = dt.count();
    write_file(dir / "manifest.json", j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

json curve_rows_json(
    const std::vector<std::pair<std::string, std::vector<BerCurve>>>& runs) {
  json rows = json::array();
  for (const auto& [label, curves] : runs)
    for (const BerCurve& c : curves)
      for (const BerPoint& p : c.points)
        rows.push_back({{"scheme", label},
                        {"user", c.user},
                        {"snr_db", p.snr_db},
                        {"bits", p.bits},
                        {"errors", p.errors},
                        {"ber", p.ber},
                        {"ci_low", p.ci_low},
                        {"ci_high", p.ci_high}});
  return rows;
}

int cmd_ber(const CommonOpts& o) {
  const RunConfig cfg = load_run_config(o.config_path, overrides_from(o));
  const fs::path dir = resolve_out_dir(o.out_dir);
  Manifest manifest("ber", o, cfg);

  std::vector<std::pair<std::string, std::vector<BerCurve>>> runs;
  json comparison;
  if (cfg.schemes.size() == 1) {
    runs.emplace_back(scheme_name(cfg.schemes[0]),
                      run_scenario(cfg.scenario));
  } else {
    const SchemeComparison cmp =
        compare_schemes(cfg.scenario, cfg.schemes, cfg.target_ber);
    for (std::size_t i = 0; i < cmp.schemes.size(); ++i)
      runs.emplace_back(scheme_name(cmp.schemes[i]), cmp.curves[i]);
    comparison["target_ber"] = cmp.target_ber;
    comparison["baseline"] = scheme_name(cmp.schemes[0]);
    comparison["snr_gain_vs_first"] = json::object();
    for (std::size_t i = 0; i < cmp.schemes.size(); ++i) {
      json per_user = json::array();
      for (double g : cmp.snr_gain_vs_first[i])
        per_user.push_back(std::isnan(g) ? json(nullptr) : json(g));
      comparison["snr_gain_vs_first"][scheme_name(cmp.schemes[i])] = per_user;
    }
  }

  if (o.format == "csv") {
    const fs::path out = dir / "ber_curves.csv";
    write_file(out, ber_curves_csv(runs));
    manifest.add_output(out);
  } else {
    const fs::path out = dir / "ber_curves.json";
    write_file(out, curve_rows_json(runs).dump(2) + "\n");
    manifest.add_output(out);
  }
  if (!comparison.is_null()) {
    const fs::path out = dir / "comparison.json";
    write_file(out, comparison.dump(2) + "\n");
    manifest.add_output(out);
  }
  manifest.write(dir);
  return 0;
}

int cmd_analytic(const CommonOpts& o) {
  const RunConfig cfg = load_run_config(o.config_path, overrides_from(o));
  const AnalyticConfig an = analytic_from_run(cfg);
  const fs::path dir = resolve_out_dir(o.out_dir);
  Manifest manifest("analytic", o, cfg);

  // emitted in the simulation-curve schema so the plotter accepts both
  std::vector<BerCurve> curves(2);
  curves[0].user = 1;
  curves[1].user = 2;
  if (cfg.halved_tail_average) {
    for (const BerCurvePoint& p : analytic_ber_curve(an)) {
      BerPoint a{}, b{};
      a.snr_db = b.snr_db = p.snr_db;
      a.ber = a.ci_low = a.ci_high = p.ber_user1;
      b.ber = b.ci_low = b.ci_high = p.ber_user2;
      curves[0].points.push_back(a);
      curves[1].points.push_back(b);
    }
  } else {
    for (double db : an.es_over_n0_db_grid) {
      const double esn0 = std::pow(10.0, db / 10.0);
      BerPoint a{}, b{};
      a.snr_db = b.snr_db = db;
      a.ber = user1_average_ber_closed(an, std::pow(an.q1, -an.zeta) * esn0);
      b.ber = user2_average_ber(an, std::pow(an.q2, -an.zeta) * esn0, false);
      a.ci_low = a.ci_high = a.ber;
      b.ci_low = b.ci_high = b.ber;
      curves[0].points.push_back(a);
      curves[1].points.push_back(b);
    }
  }

  const std::vector<std::pair<std::string, std::vector<BerCurve>>> runs = {
      {"analytic", curves}};
  if (o.format == "csv") {
    const fs::path out = dir / "analytic_curves.csv";
    write_file(out, ber_curves_csv(runs));
    manifest.add_output(out);
  } else {
    const fs::path out = dir / "analytic_curves.json";
    write_file(out, curve_rows_json(runs).dump(2) + "\n");
    manifest.add_output(out);
  }
  manifest.write(dir);
  return 0;
}

json psnr_value(double v) {
  return std::isinf(v) ? json("inf") : json(v);
}

int cmd_image(const CommonOpts& o, const std::string& far_path,
              const std::string& near_path) {
  const RunConfig cfg = load_run_config(o.config_path, overrides_from(o));
  GrayImage image_far, image_near;
  try {
    image_far = read_pgm(far_path);
    image_near = read_pgm(near_path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());  // bad inputs are a usage error
  }

  const fs::path dir = resolve_out_dir(o.out_dir);
  Manifest manifest("image", o, cfg);
  json report = json::array();
  for (Scheme s : cfg.schemes) {
    ScenarioConfig sc = cfg.scenario;
    sc.scheme = s;
    const ImagePairResult r = transmit_image_pair(image_far, image_near, sc);
    const std::string tag = scheme_name(s);
    const fs::path f = dir / ("recon_" + tag + "_far.pgm");
    const fs::path n = dir / ("recon_" + tag + "_near.pgm");
    write_pgm(r.recon_far, f.string());
    write_pgm(r.recon_near, n.string());
    manifest.add_output(f);
    manifest.add_output(n);
    report.push_back({{"scheme", tag},
                      {"user", 1},
                      {"psnr_db", psnr_value(r.psnr_far)},
                      {"mse", r.mse_far},
                      {"bit_errors", r.bit_errors_far}});
    report.push_back({{"scheme", tag},
                      {"user", 2},
                      {"psnr_db", psnr_value(r.psnr_near)},
                      {"mse", r.mse_near},
                      {"bit_errors", r.bit_errors_near}});
  }
  const fs::path out = dir / "psnr.json";
  write_file(out, report.dump(2) + "\n");
  manifest.add_output(out);
  manifest.write(dir);
  return 0;
}

struct PlotRow {
  std::string scheme;
  int user;
  double snr_db;
  double ber;
};

std::vector<PlotRow> parse_curve_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) ||
      line != "scheme,user,snr_db,bits,errors,ber,ci_low,ci_high")
    throw std::invalid_argument("unrecognized CSV header");
  std::vector<PlotRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 8)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 8 fields");
    try {
      PlotRow r;
      r.scheme = f[0];
      r.user = std::stoi(f[1]);
      r.snr_db = std::stod(f[2]);
      r.ber = std::stod(f[5]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": unparseable numeric field");
    }
  }
  if (rows.empty()) throw std::invalid_argument("CSV contains no data rows");
  return rows;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string render_svg(const std::vector<PlotRow>& rows) {
  // series keyed (scheme, user) in first-appearance order
  std::vector<std::pair<std::string, std::vector<const PlotRow*>>> series;
  for (const PlotRow& r : rows) {
    const std::string key = r.scheme + " u" + std::to_string(r.user);
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const auto& s) { return s.first == key; });
    if (it == series.end()) {
      series.push_back({key, {}});
      it = std::prev(series.end());
    }
    if (r.ber > 0.0) it->second.push_back(&r);
  }

  double xmin = rows.front().snr_db, xmax = xmin;
  double bmin = 1.0;
  bool any = false;
  for (const PlotRow& r : rows) {
    xmin = std::min(xmin, r.snr_db);
    xmax = std::max(xmax, r.snr_db);
    if (r.ber > 0.0) {
      bmin = std::min(bmin, r.ber);
      any = true;
    }
  }
  if (!any)
    throw std::invalid_argument("no positive error rates to plot");
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  const int dec_lo = int(std::floor(std::log10(bmin)));
  const int dec_hi = 0;  // top of the axis at BER 1

  const double L = 70, T = 30, W = 600, H = 470;
  auto sx = [&](double snr) {
    return L + (snr - xmin) / (xmax - xmin) * W;
  };
  auto sy = [&](double ber) {
    const double l = std::log10(ber);
    return T + (dec_hi - l) / double(dec_hi - dec_lo) * H;
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" "
        "height=\"560\" viewBox=\"0 0 840 560\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"840\" height=\"560\" fill=\"white\"/>\n";

  // decade gridlines and labels
  for (int d = dec_hi; d >= dec_lo; --d) {
    const double y = sy(std::pow(10.0, d));
    os << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(y) << "\" x2=\""
       << fmt2(L + W) << "\" y2=\"" << fmt2(y)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt2(L - 8) << "\" y=\"" << fmt2(y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\" "
          "text-anchor=\"end\">1e"
       << d << "</text>\n";
  }
  // x ticks: ten evenly spaced
  for (int i = 0; i <= 10; ++i) {
    const double snr = xmin + (xmax - xmin) * i / 10.0;
    const double x = sx(snr);
    os << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(T) << "\" x2=\""
       << fmt2(x) << "\" y2=\"" << fmt2(T + H)
       << "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(T + H + 18)
       << "\" font-family=\"sans-serif\" font-size=\"12\" "
          "text-anchor=\"middle\">"
       << fmt2(snr) << "</text>\n";
  }
  os << "<rect x=\"" << fmt2(L) << "\" y=\"" << fmt2(T) << "\" width=\""
     << fmt2(W) << "\" height=\"" << fmt2(H)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt2(L + W / 2) << "\" y=\"552\" "
        "font-family=\"sans-serif\" font-size=\"14\" "
        "text-anchor=\"middle\">Es/N0 (dB)</text>\n";
  os << "<text x=\"16\" y=\"" << fmt2(T + H / 2)
     << "\" font-family=\"sans-serif\" font-size=\"14\" "
        "text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt2(T + H / 2) << ")\">BER</text>\n";

  int idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = kPalette[idx % 8];
    if (!pts.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"2\" points=\"";
      for (const PlotRow* p : pts)
        os << fmt2(sx(p->snr_db)) << ',' << fmt2(sy(p->ber)) << ' ';
      os << "\"/>\n";
    }
    const double ly = T + 16 + 18 * idx;
    os << "<line x1=\"" << fmt2(L + W + 14) << "\" y1=\"" << fmt2(ly - 4)
       << "\" x2=\"" << fmt2(L + W + 38) << "\" y2=\"" << fmt2(ly - 4)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt2(L + W + 44) << "\" y=\"" << fmt2(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << key
       << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw std::runtime_error(in_path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string svg = render_svg(parse_curve_csv(buf.str()));
  write_file(out_path, svg);
  return 0;
}

int cmd_genimg(const std::string& pattern, int width, int height,
               std::uint64_t seed, int scale, const std::string& out_path) {
  SyntheticPattern p;
  if (pattern == "gradient") {
    p = SyntheticPattern::gradient;
  } else if (pattern == "checkerboard") {
    p = SyntheticPattern::checkerboard;
  } else if (pattern == "noise") {
    p = SyntheticPattern::filtered_noise;
  } else {
    throw std::invalid_argument("pattern must be gradient/checkerboard/noise");
  }
  write_pgm(make_synthetic_image(p, width, height, seed, scale), out_path);
  return 0;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-level NOMA simulator and analysis toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts ber_opts;
  CLI::App* ber = app.add_subcommand("ber", "simulate BER curves");
  add_common(ber, ber_opts);

  CommonOpts an_opts;
  CLI::App* an = app.add_subcommand("analytic", "closed-form BER curves");
  add_common(an, an_opts);

  CommonOpts img_opts;
  std::string far_path, near_path;
  CLI::App* img =
      app.add_subcommand("image", "transmit an image pair through a scenario");
  img->add_option("far", far_path, "PGM sent to user 1 (far)")
      ->required()
      ->check(CLI::ExistingFile);
  img->add_option("near", near_path, "PGM sent to user 2 (near)")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(img, img_opts, false);

  std::string plot_in, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "render a curve CSV as SVG");
  plot->add_option("csv", plot_in, "input CSV in the emitted schema")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("svg", plot_out, "output SVG path")->required();

  std::string gi_pattern = "noise", gi_out;
  int gi_width = 512, gi_height = 512, gi_scale = 16;
  std::uint64_t gi_seed = 1;
  CLI::App* gen = app.add_subcommand("genimg", "generate a synthetic PGM");
  gen->add_option("--pattern", gi_pattern, "gradient|checkerboard|noise");
  gen->add_option("--width", gi_width);
  gen->add_option("--height", gi_height);
  gen->add_option("--seed", gi_seed);
  gen->add_option("--scale", gi_scale, "cell edge or blur radius");
  gen->add_option("--out", gi_out, "output PGM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (ber->parsed()) return guarded([&] { return cmd_ber(ber_opts); });
  if (an->parsed()) return guarded([&] { return cmd_analytic(an_opts); });
  if (img->parsed())
    return guarded([&] { return cmd_image(img_opts, far_path, near_path); });
  if (plot->parsed())
    return guarded([&] { return cmd_plot(plot_in, plot_out); });
  if (gen->parsed())
    return guarded([&] {
      return cmd_genimg(gi_pattern, gi_width, gi_height, gi_seed, gi_scale,
                        gi_out);
    });
  return 2;
}
