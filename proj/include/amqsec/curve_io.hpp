#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "amqsec/analysis.hpp"

namespace amqsec {

#ifndef AMQSEC_VERSION
#define AMQSEC_VERSION "0.1.0"
#endif

inline constexpr const char* kToolVersion = AMQSEC_VERSION;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reproducibility header carried by every emitted curve.
struct CurveManifest {
  Family family = Family::bloom;
  std::uint64_t n = 0;
  std::uint64_t q = 0;
  double eps_prf_log2 = -256;
  std::optional<double> target_log2;
  std::uint64_t seed = 0;
  std::string grid = "default";
};

enum class CurveFormat { csv, svg, json };

inline CurveFormat parse_curve_format(const std::string& s) {
  if (s == "csv") return CurveFormat::csv;
  if (s == "svg") return CurveFormat::svg;
  if (s == "json") return CurveFormat::json;
  throw std::invalid_argument("unknown curve format: " + s);
}

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Family curve_family(const std::vector<CurvePoint>& points) {
  if (points.empty()) throw std::invalid_argument("curve has no points");
  const bool bloom = points.front().pp.family == Family::bloom;
  for (const auto& p : points)
    if ((p.pp.family == Family::bloom) != bloom) throw std::invalid_argument("curve mixes Bloom and Cuckoo points");
  return bloom ? Family::bloom : Family::cuckoo;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points, const CurveManifest& man) {
  const Family fam = detail::curve_family(points);
  os << "# amqsec " << kToolVersion << "\n";
  os << "# family=" << to_string(man.family) << " grid=" << man.grid << "\n";
  os << "# budget n=" << man.n << " q=" << man.q << "\n";
  os << "# eps_prf_log2=" << detail::fmt_g17(man.eps_prf_log2);
  if (man.target_log2) os << " target_log2=" << detail::fmt_g17(*man.target_log2);
  os << " seed=" << man.seed << "\n";
  if (fam == Family::bloom)
    os << "family,m,k,storage_bits,log2_eps_prime,log2_honest_fp\n";
  else
    os << "family,s,lambda_i,lambda_t,storage_bits,log2_eps_prime,log2_honest_fp\n";
  for (const auto& p : points) {
    os << to_string(p.pp.family) << ',';
    if (fam == Family::bloom)
      os << p.pp.m << ',' << p.pp.k << ',';
    else
      os << p.pp.s << ',' << p.pp.lambda_i << ',' << p.pp.lambda_t << ',';
    os << p.storage_bits << ',' << detail::fmt_g17(p.log2_eps_prime) << ',' << detail::fmt_g17(p.log2_honest_fp)
       << '\n';
  }
}

/// Parses a curve CSV; '#' lines are skipped.
inline std::vector<CurvePoint> parse_curve_csv(std::istream& is) {
  std::vector<CurvePoint> points;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) throw std::invalid_argument("CSV row width differs from header");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    CurvePoint p;
    Family f = parse_family(row.at("family"));
    if (f == Family::bloom) {
      p.pp = PlanCandidate::bloom(std::stoull(row.at("m")), static_cast<unsigned>(std::stoul(row.at("k"))));
    } else {
      p.pp = PlanCandidate::cuckoo(static_cast<std::uint32_t>(std::stoul(row.at("s"))),
                                   static_cast<unsigned>(std::stoul(row.at("lambda_i"))),
                                   static_cast<unsigned>(std::stoul(row.at("lambda_t"))));
      p.pp.family = f;
    }
    p.storage_bits = std::stoull(row.at("storage_bits"));
    p.log2_eps_prime = std::stod(row.at("log2_eps_prime"));
    p.log2_honest_fp = std::stod(row.at("log2_honest_fp"));
    points.push_back(p);
  }
  return points;
}

/// Log-log SVG: x = log2(storage bits), y = log2(probability); per series
/// (Bloom: k, Cuckoo: s) a solid adversarial and a dashed honest polyline.
inline std::string render_curve_svg(const std::vector<CurvePoint>& points, const CurveManifest& man) {
  const Family fam = detail::curve_family(points);
  std::map<unsigned, std::vector<const CurvePoint*>> series;
  for (const auto& p : points) series[fam == Family::bloom ? p.pp.k : p.pp.s].push_back(&p);

  double xmin = INFINITY, xmax = -INFINITY, ymin = 0;
  for (const auto& p : points) {
    double x = std::log2(static_cast<double>(std::max<std::uint64_t>(p.storage_bits, 1)));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min({ymin, p.log2_eps_prime, p.log2_honest_fp});
  }
  ymin = std::max(std::floor(ymin), -300.0);
  if (ymin >= 0) ymin = -1;
  if (xmax <= xmin) xmax = xmin + 1;
  const double W = 900, H = 560, L = 80, R = 150, T = 40, B = 60;
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double y) { return T + (std::max(y, ymin) / ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<!-- amqsec " << kToolVersion << " family=" << to_string(man.family) << " n=" << man.n << " q=" << man.q
     << " eps_prf_log2=" << man.eps_prf_log2 << " seed=" << man.seed << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << to_string(fam) << ": adversarial (solid) vs honest (dashed), n=" << man.n << ", q=" << man.q << "</text>\n";
  os << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
     << "\" y2=\"" << H - B << "\"/><line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\"/></g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const int xstep = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / 10)));
  for (int x = static_cast<int>(std::ceil(xmin)); x <= xmax; x += xstep)
    os << "<text x=\"" << sx(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">2^" << x << "</text>\n";
  const int ystep = std::max(1, static_cast<int>(std::ceil(-ymin / 10)));
  for (int y = 0; y >= ymin; y -= ystep)
    os << "<text x=\"" << L - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">2^" << y << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">storage (bits)</text>\n";
  os << "<text x=\"18\" y=\"" << H / 2 << "\" transform=\"rotate(-90 18 " << H / 2
     << ")\" text-anchor=\"middle\">false-positive probability</text>\n</g>\n";

  std::size_t idx = 0;
  for (const auto& [key, pts] : series) {
    const int hue = static_cast<int>((idx * 360) / std::max<std::size_t>(series.size(), 1));
    auto poly = [&](bool adversarial) {
      os << "<polyline class=\"" << (adversarial ? "adversarial" : "honest") << "\" fill=\"none\" stroke=\"hsl("
         << hue << ",70%,40%)\" stroke-width=\"1.5\"";
      if (!adversarial) os << " stroke-dasharray=\"6,4\"";
      os << " points=\"";
      for (const auto* p : pts) {
        double x = std::log2(static_cast<double>(std::max<std::uint64_t>(p->storage_bits, 1)));
        os << sx(x) << ',' << sy(adversarial ? p->log2_eps_prime : p->log2_honest_fp) << ' ';
      }
      os << "\"/>\n";
    };
    poly(true);
    poly(false);
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 * (idx + 1)
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"hsl(" << hue << ",70%,40%)\">"
       << (fam == Family::bloom ? "k=" : "s=") << key << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

inline nlohmann::json curve_json(const std::vector<CurvePoint>& points, const CurveManifest& man) {
  detail::curve_family(points);
  nlohmann::json j;
  j["tool"] = std::string("amqsec ") + kToolVersion;
  j["manifest"] = {{"family", to_string(man.family)}, {"n", man.n},   {"q", man.q},
                   {"eps_prf_log2", man.eps_prf_log2}, {"seed", man.seed}, {"grid", man.grid}};
  if (man.target_log2) j["manifest"]["target_log2"] = *man.target_log2;
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json e = {{"family", to_string(p.pp.family)},
                        {"storage_bits", p.storage_bits},
                        {"log2_eps_prime", p.log2_eps_prime},
                        {"log2_honest_fp", p.log2_honest_fp},
                        {"worst_t", p.worst_t}};
    if (p.pp.family == Family::bloom) {
      e["m"] = p.pp.m;
      e["k"] = p.pp.k;
    } else {
      e["s"] = p.pp.s;
      e["lambda_i"] = p.pp.lambda_i;
      e["lambda_t"] = p.pp.lambda_t;
    }
    j["points"].push_back(e);
  }
  return j;
}

/// Writes the curve to path; throws IoError when the file cannot be written.
inline void emit_curve(const std::vector<CurvePoint>& points, CurveFormat format, const std::string& path,
                       const CurveManifest& man) {
  detail::curve_family(points);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  switch (format) {
    case CurveFormat::csv: write_curve_csv(out, points, man); break;
    case CurveFormat::svg: out << render_curve_svg(points, man); break;
    case CurveFormat::json: out << curve_json(points, man).dump(2) << '\n'; break;
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace amqsec
