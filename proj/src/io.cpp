#include "liewave/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace liewave {

namespace {

using json = nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// --- fields ----------------------------------------------------------------

void write_spectral_json(std::ostream& os, const SpectralField& field) {
  if (!field.dual) throw std::invalid_argument("spectral field without a dual");
  const Dual& dual = *field.dual;
  json j;
  j["group"] = dual.group().name();
  j["bandlimit"] = dual.group().bandlimit;
  j["oversample"] = dual.group().oversample;
  j["real_valued"] = field.real_valued;
  json entries = json::array();
  for (Index r = 0; r < dual.size(); ++r) {
    const auto blk = field.block(r);
    json re = json::array(), im = json::array();
    for (Index i = 0; i < blk.rows(); ++i) {
      json rr = json::array(), ii = json::array();
      for (Index k = 0; k < blk.cols(); ++k) {
        rr.push_back(blk(i, k).real());
        ii.push_back(blk(i, k).imag());
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    entries.push_back({{"label", dual.rep(r).label}, {"re", re}, {"im", im}});
  }
  j["entries"] = entries;
  os << j.dump(1) << '\n';
}

SpectralField read_spectral_json(std::istream& is) {
  const json j = json::parse(is);
  const GroupSpec g = parse_group(j.at("group").get<std::string>(), j.at("bandlimit").get<int>(),
                                  j.value("oversample", 1.0));
  auto dual = std::make_shared<const Dual>(g);
  SpectralField f = SpectralField::zeros(dual, j.value("real_valued", false));
  for (const auto& e : j.at("entries")) {
    const auto label = e.at("label").get<std::vector<int>>();
    const auto r = dual->find(label);
    if (!r) throw std::invalid_argument("label outside the band limit");
    auto blk = f.block(*r);
    const auto& re = e.at("re");
    const auto& im = e.at("im");
    if (static_cast<Index>(re.size()) != blk.rows())
      throw std::invalid_argument("block size does not match the representation");
    for (Index i = 0; i < blk.rows(); ++i)
      for (Index k = 0; k < blk.cols(); ++k)
        blk(i, k) = Complex(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
  }
  return f;
}

void write_grid_csv(std::ostream& os, const GridField& field) {
  os << "re,im\n";
  for (Index i = 0; i < field.size(); ++i)
    os << format_double(field.values[i].real()) << ',' << format_double(field.values[i].imag())
       << '\n';
}

GridField read_grid_csv(std::istream& is) {
  std::string line;
  std::vector<Complex> vals;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find_first_of("0123456789") == std::string::npos) continue;
    }
    const auto comma = line.find(',');
    const double re = std::stod(line.substr(0, comma));
    const double im = comma == std::string::npos ? 0.0 : std::stod(line.substr(comma + 1));
    vals.emplace_back(re, im);
  }
  GridField f{Eigen::VectorXcd(static_cast<Index>(vals.size()))};
  for (size_t i = 0; i < vals.size(); ++i) f.values[static_cast<Index>(i)] = vals[i];
  return f;
}

// --- traces and manifests --------------------------------------------------

void write_trace_csv(std::ostream& os, const NormTrace& trace, const std::string& manifest_hash) {
  os << "# manifest_hash=" << manifest_hash << '\n';
  os << "t,l2,seminorm_alpha,dt_l2,envelope,ratio,x_running\n";
  for (size_t i = 0; i < trace.size(); ++i) {
    os << format_double(trace.times[i]) << ',' << format_double(trace.l2[i]) << ','
       << format_double(trace.seminorm[i]) << ',' << format_double(trace.dt_l2[i]) << ','
       << format_double(trace.envelope[i]) << ','
       << format_double(trace.l2[i] / trace.envelope[i]) << ','
       << format_double(trace.x_norm_running[i]) << '\n';
  }
}

void write_manifest_json(std::ostream& os, const RunManifest& m) {
  json j;
  j["group"] = m.group;
  j["bandlimit"] = m.bandlimit;
  j["alpha"] = m.alpha;
  j["b"] = m.b;
  j["m2"] = m.m2;
  j["p"] = m.p;
  j["dt"] = m.dt;
  j["scheme"] = m.scheme;
  j["seed"] = m.seed;
  j["epsilon"] = m.epsilon;
  j["outcome"] = m.outcome;
  j["final_time"] = number(m.final_time);
  j["manifest_hash"] = m.manifest_hash;
  os << j.dump(2) << '\n';
}

RunManifest read_manifest_json(std::istream& is) {
  const json j = json::parse(is);
  RunManifest m;
  m.group = j.at("group");
  m.bandlimit = j.at("bandlimit");
  m.alpha = j.at("alpha");
  m.b = j.at("b");
  m.m2 = j.at("m2");
  m.p = j.at("p");
  m.dt = j.at("dt");
  m.scheme = j.at("scheme");
  m.seed = j.at("seed");
  m.epsilon = j.value("epsilon", 0.0);
  m.outcome = j.at("outcome");
  const auto& ft = j.at("final_time");
  m.final_time = ft.is_number() ? ft.get<double>() : std::stod(ft.get<std::string>());
  m.manifest_hash = j.at("manifest_hash");
  return m;
}

// --- scans and reports -----------------------------------------------------

void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::string& manifest_hash) {
  os << "# manifest_hash=" << manifest_hash << '\n';
  os << "epsilon,lifespan,method,threshold,flags\n";
  for (const auto& r : scan.records) {
    os << format_double(r.epsilon) << ','
       << (r.lifespan ? format_double(*r.lifespan) : std::string("inf")) << ','
       << to_string(r.method) << ',' << format_double(r.threshold) << ',' << r.flags << '\n';
  }
}

void write_fit_json(std::ostream& os, const ScanResult& scan, double p,
                    const std::string& manifest_hash) {
  json j;
  j["slope"] = number(scan.slope);
  j["intercept"] = number(scan.intercept);
  j["ci"] = number(scan.slope_ci);
  j["p"] = p;
  j["expected_slope"] = scan.expected_slope;
  j["finite_count"] = scan.finite_count;
  j["warnings"] = scan.warnings;
  j["manifest_hash"] = manifest_hash;
  os << j.dump(2) << '\n';
}

void write_report_json(std::ostream& os, const std::vector<CheckReport>& reports,
                       const std::string& manifest_hash) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"worst_ratio", number(r.worst_ratio)},
                   {"worst_case", r.worst_case},
                   {"tolerance", number(r.tolerance)},
                   {"samples", r.samples},
                   {"manifest_hash", manifest_hash}});
  }
  os << arr.dump(2) << '\n';
}

}  // namespace liewave
