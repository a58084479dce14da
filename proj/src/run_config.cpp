#include "liewave/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "liewave/io.hpp"

namespace liewave {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("bad value '" + text + "' for key '" + key + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean '" + text + "' for key '" + key + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{
      "alpha",  "b",          "bandlimit", "dealias",   "dt",   "epsilon", "group",
      "m2",     "nonlinear",  "output_dir", "oversample", "p",  "scheme",  "seed",
      "t_end",  "threshold",  "u0",        "u1"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "group") group = v;
  else if (key == "bandlimit") bandlimit = parse_number<int>(key, v);
  else if (key == "oversample") oversample = parse_number<double>(key, v);
  else if (key == "alpha") alpha = parse_number<double>(key, v);
  else if (key == "b") b = parse_number<double>(key, v);
  else if (key == "m2") m2 = parse_number<double>(key, v);
  else if (key == "p") p = parse_number<double>(key, v);
  else if (key == "epsilon") epsilon = parse_number<double>(key, v);
  else if (key == "t_end") t_end = parse_number<double>(key, v);
  else if (key == "dt") dt = parse_number<double>(key, v);
  else if (key == "scheme") scheme = v;
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "output_dir") output_dir = v;
  else if (key == "u0") u0 = v;
  else if (key == "u1") u1 = v;
  else if (key == "threshold") threshold = parse_number<double>(key, v);
  else if (key == "nonlinear") nonlinear = parse_bool(key, v);
  else if (key == "dealias") dealias = parse_bool(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const {
  try {
    group_spec().validate();
    wave_params().validate();
    scheme_config().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(threshold > 0.0)) throw ConfigError("threshold must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  for (const auto& spec : {u0, u1}) {
    const auto kind = spec.substr(0, spec.find(':'));
    if (kind != "constant" && kind != "mode" && kind != "random")
      throw ConfigError("unknown data builder '" + spec + "'");
  }
}

GroupSpec RunConfig::group_spec() const {
  try {
    return parse_group(group, bandlimit, oversample);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

WaveParams RunConfig::wave_params() const { return WaveParams{alpha, b, m2, p}; }

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig c;
  try {
    c.scheme = parse_scheme(scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.dt = dt;
  c.nonlinear = nonlinear;
  c.dealias = dealias;
  return c;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"alpha", format_double(alpha)},
      {"b", format_double(b)},
      {"bandlimit", std::to_string(bandlimit)},
      {"dealias", dealias ? "true" : "false"},
      {"dt", format_double(dt)},
      {"epsilon", format_double(epsilon)},
      {"group", group},
      {"m2", format_double(m2)},
      {"nonlinear", nonlinear ? "true" : "false"},
      {"oversample", format_double(oversample)},
      {"p", format_double(p)},
      {"scheme", scheme},
      {"seed", std::to_string(seed)},
      {"t_end", format_double(t_end)},
      {"threshold", format_double(threshold)},
      {"u0", u0},
      {"u1", u1}};
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

RunConfig parse_run_config(std::istream& is, RunConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in, std::move(base));
}

GridField build_data(const std::string& spec, const SpectralBasis& basis, double epsilon) {
  const auto parts = split(spec, ':');
  const std::string kind = parts.empty() ? std::string() : parts[0];
  const Index nodes = basis.grid().size();
  if (kind == "constant") {
    if (parts.size() != 2) throw ConfigError("expected constant:c, got '" + spec + "'");
    const double c = parse_number<double>("constant", parts[1]);
    return GridField{Eigen::VectorXcd::Constant(nodes, Complex(epsilon * c, 0.0))};
  }
  if (kind == "mode") {
    if (parts.size() != 3) throw ConfigError("expected mode:k:amp, got '" + spec + "'");
    std::vector<int> label;
    for (const auto& s : split(parts[1], ',')) label.push_back(parse_number<int>("mode", s));
    const double amp = parse_number<double>("mode", parts[2]);
    const auto r = basis.dual()->find(label);
    if (!r) throw ConfigError("mode '" + parts[1] + "' is outside the band limit");
    SpectralField f = SpectralField::zeros(basis.dual());
    const Index d = basis.dual()->rep(*r).dim;
    const Index centre = (d - 1) / 2;
    f.block(*r)(centre, centre) = Complex(epsilon * amp / static_cast<double>(d), 0.0);
    f = enforce_reality(f);
    GridField g = basis.synthesize(f);
    g.values = g.values.real().cast<Complex>();
    return g;
  }
  if (kind == "random") {
    if (parts.size() != 3) throw ConfigError("expected random:seed:decay, got '" + spec + "'");
    const auto seed = parse_number<std::uint64_t>("random", parts[1]);
    const double decay = parse_number<double>("random", parts[2]);
    SpectralField f = random_band_limited(basis.dual(), seed, decay, true);
    f *= Complex(epsilon, 0.0);
    GridField g = basis.synthesize(f);
    g.values = g.values.real().cast<Complex>();
    return g;
  }
  throw ConfigError("unknown data builder '" + spec + "'");
}

}  // namespace liewave
