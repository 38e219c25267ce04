#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "spiral/cli.hpp"
#include "spiral/errors.hpp"

namespace spiral::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// blue for negative, red for positive, white at zero
std::string diverging(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const int fade = int(std::lround(255.0 * (1.0 - std::abs(t))));
  char buf[8];
  if (t >= 0)
    std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
  else
    std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
  return buf;
}

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

void write_svg_contour(const std::filesystem::path& path, const kernels::Grid<double>& g,
                       const std::string& title) {
  const std::size_t nx = g.xs.size(), ny = g.ys.size();
  double peak = 0.0;
  for (double v : g.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) peak = 1.0;
  const double W = 600.0, H = 600.0 * std::min(2.0, double(ny) / double(nx));
  const double cw = W / nx, ch = H / ny;
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H + 30 << "\">\n";
  out << "<text x=\"4\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<g transform=\"translate(0,30)\">\n";
  // signed-log colouring keeps both the core and the far field visible
  const double floor = 1e-6 * peak;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = g.at(i, j);
      const double t = std::abs(v) < floor ? 0.0 : (v > 0 ? 1 : -1) * std::log(std::abs(v) / floor) / std::log(peak / floor);
      out << "<rect x=\"" << i * cw << "\" y=\"" << (ny - 1 - j) * ch << "\" width=\"" << cw + 0.5
          << "\" height=\"" << ch + 0.5 << "\" fill=\"" << diverging(t) << "\"/>\n";
    }
  // zero level by marching squares on cell edges
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  const auto px = [&](double fi) { return (fi + 0.5) * cw; };
  const auto py = [&](double fj) { return (ny - 1 - fj + 0.5) * ch; };
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double c[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
      const double ex[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      std::vector<std::pair<double, double>> hits;
      for (int e = 0; e < 4; ++e) {
        const double a = c[e], b = c[(e + 1) % 4];
        if ((a > 0) == (b > 0)) continue;
        const double s = a / (a - b);
        hits.push_back({i + ex[e][0] + s * (ex[(e + 1) % 4][0] - ex[e][0]),
                        j + ex[e][1] + s * (ex[(e + 1) % 4][1] - ex[e][1])});
      }
      for (std::size_t h = 0; h + 1 < hits.size(); h += 2)
        out << "<line x1=\"" << px(hits[h].first) << "\" y1=\"" << py(hits[h].second) << "\" x2=\""
            << px(hits[h + 1].first) << "\" y2=\"" << py(hits[h + 1].second) << "\"/>\n";
    }
  out << "</g>\n</g>\n</svg>\n";
}

void write_svg_species(const std::filesystem::path& path, const std::vector<double>& X,
                       const std::vector<double>& Y, const std::vector<int>& label, int K,
                       const std::string& title) {
  const double S = 600.0;
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << S << "\" height=\"" << S + 30 << "\">\n";
  out << "<text x=\"4\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << " (K=" << K
      << ")</text>\n<g transform=\"translate(0,30)\">\n";
  out << "<circle cx=\"" << S / 2 << "\" cy=\"" << S / 2 << "\" r=\"" << S / 2 - 2
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (label[i] < 0) continue;
    out << "<circle cx=\"" << S / 2 * (1 + X[i]) << "\" cy=\"" << S / 2 * (1 - Y[i]) << "\" r=\"1.6\" fill=\""
        << kPalette[label[i] % 8] << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace spiral::cli
