#include "bohm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bohm/errors.hpp"
#include "bohm/scenario.hpp"

namespace bohm {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;

struct Series {
  bool upper = true;
  std::vector<double> h, v;  // horizontal (Y′) and vertical values
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string render(const std::string& title, const std::string& vlabel, const std::vector<Series>& series) {
  double hlo = std::numeric_limits<double>::infinity(), hhi = -hlo, vlo = hlo, vhi = -hlo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.h.size(); ++i) {
      hlo = std::min(hlo, s.h[i]);
      hhi = std::max(hhi, s.h[i]);
      vlo = std::min(vlo, s.v[i]);
      vhi = std::max(vhi, s.v[i]);
    }
  }
  const auto [h0, h1] = padded_range(hlo, hhi);
  const auto [v0, v1] = padded_range(vlo, vhi);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double h) { return kLeft + (h - h0) / (h1 - h0) * pw; };
  auto py = [&](double v) { return kTop + (v1 - v) / (v1 - v0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double h = h0 + (h1 - h0) * k / 4.0, v = v0 + (v1 - v0) * k / 4.0;
    o << "<text x=\"" << fmt(px(h)) << "\" y=\"" << fmt(kTop + ph + 16) << "\" text-anchor=\"middle\">"
      << tick_label(h) << "</text>\n";
    o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
      << tick_label(v) << "</text>\n";
  }
  if (v0 < 0.0 && v1 > 0.0) {
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << fmt(py(0)) << "\" stroke=\"#bbbbbb\"/>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">Y′</text>\n";
  o << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt(kTop + ph / 2) << ")\">" << vlabel << "</text>\n";

  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << (s.upper ? "#1f4e9c" : "#b2332b") << '"';
    if (!s.upper) o << " stroke-dasharray=\"5,3\"";
    o << " points=\"";
    for (std::size_t i = 0; i < s.h.size(); ++i) {
      if (i) o << ' ';
      o << fmt(px(s.h[i])) << ',' << fmt(py(s.v[i]));
    }
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

template <typename F>
std::vector<Series> collect(std::span<const Trajectory> trajectories, F value) {
  std::vector<Series> out;
  for (const auto& tr : trajectories) {
    Series s;
    s.upper = tr.initial.x >= 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      s.h.push_back(tr.y[i]);
      s.v.push_back(value(tr, i));
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool two_pointer_mode(const ScenarioParams& p) {
  return p.n_particles() == 2 && !p.single_pointer();
}

std::vector<double> split_csv_line(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto comma = line.find(',', pos);
    const auto field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ConfigError("malformed CSV field '" + field + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<SvgPanel> render_panels(std::span<const Trajectory> trajectories, const ScenarioParams& params) {
  std::size_t samples = 0;
  for (const auto& tr : trajectories) samples += tr.size();
  if (trajectories.empty() || samples == 0) throw ConfigError("nothing to plot: the run is empty");

  std::vector<SvgPanel> panels;
  panels.push_back({"test_particle.svg",
                    render("Test particle", "X′", collect(trajectories, [](const Trajectory& t, std::size_t i) {
                             return t.x[i];
                           }))});

  if (two_pointer_mode(params) && trajectories.front().has_pointers()) {
    for (Eigen::Index n = 0; n < 2; ++n) {
      const std::string label = "Z′" + std::to_string(n + 1);
      panels.push_back({"pointer_" + std::to_string(n + 1) + ".svg",
                        render("Pointer " + std::to_string(n + 1), label,
                               collect(trajectories, [n](const Trajectory& t, std::size_t i) {
                                 return t.z(static_cast<Eigen::Index>(i), n);
                               }))});
    }
  } else if (params.n_particles() == 1 && trajectories.front().has_pointers()) {
    panels.push_back({"pointer.svg", render("Pointer", "Z′", collect(trajectories, [](const Trajectory& t, std::size_t i) {
                                              return t.z(static_cast<Eigen::Index>(i), 0);
                                            }))});
  } else if (params.n_particles() > 0) {
    panels.push_back({"pointer.svg", render("Pointer (collective coordinate)", "Σ̂′",
                                            collect(trajectories, [](const Trajectory& t, std::size_t i) {
                                              return t.sigma_hat[i];
                                            }))});
  }
  return panels;
}

std::vector<Trajectory> load_run(const std::filesystem::path& dir, ScenarioParams* params_out) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("manifest.json is not valid JSON: ") + e.what());
  }
  const ScenarioFile scenario = scenario_from_json(manifest.at("scenario"));
  const auto params = share(scenario.params);
  if (params_out) *params_out = scenario.params;

  std::vector<Trajectory> out;
  for (const auto& entry : manifest.at("trajectories")) {
    if (!entry.contains("file")) throw ConfigError("run was written without CSV output");
    std::ifstream csv(dir / entry.at("file").get<std::string>());
    if (!csv) throw ConfigError("missing trajectory file " + entry.at("file").get<std::string>());
    std::string header;
    std::getline(csv, header);
    const bool sigma_only = header.find("Sigma_hat") != std::string::npos;

    Trajectory tr;
    tr.params = params;
    tr.backend = scenario.ensemble.backend;
    tr.initial.x = entry.at("x0").get<double>();
    tr.initial.y = entry.at("y0").get<double>();
    tr.degenerate = entry.at("degenerate").get<bool>();
    const auto n = static_cast<Eigen::Index>(scenario.params.n_particles());
    std::vector<std::vector<double>> zrows;
    std::string line;
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      const std::size_t expect = 3 + (sigma_only ? 1 : static_cast<std::size_t>(n)) + 2;
      if (f.size() != expect) throw ConfigError("unexpected column count in trajectory CSV");
      tr.t.push_back(f[0]);
      tr.x.push_back(f[1]);
      tr.y.push_back(f[2]);
      if (sigma_only) {
        tr.sigma_hat.push_back(f[3]);
      } else {
        zrows.emplace_back(f.begin() + 3, f.begin() + 3 + n);
        double sum = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) sum += f[3 + static_cast<std::size_t>(k)];
        tr.sigma_hat.push_back(n > 0 ? sum / std::sqrt(static_cast<double>(n)) : 0.0);
      }
      tr.log_omega.push_back(f[f.size() - 2]);
      tr.delta_s.push_back(f.back());
    }
    if (!sigma_only && n > 0) {
      tr.z.resize(static_cast<Eigen::Index>(zrows.size()), n);
      for (std::size_t i = 0; i < zrows.size(); ++i) {
        for (Eigen::Index k = 0; k < n; ++k) tr.z(static_cast<Eigen::Index>(i), k) = zrows[i][static_cast<std::size_t>(k)];
      }
      if (!zrows.empty()) tr.initial.z = tr.z.row(0).transpose();
    }
    out.push_back(std::move(tr));
  }
  return out;
}

void write_panels(const std::vector<SvgPanel>& panels, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  for (const auto& p : panels) {
    std::ofstream out(dir / p.file);
    if (!out) throw ConfigError("cannot write " + (dir / p.file).string());
    out << p.svg;
  }
}

}  // namespace bohm
