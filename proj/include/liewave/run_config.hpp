#pragma once

// key=value run configuration with builder-named initial data.
//
//   constant:c            u = c
//   mode:k1,k2,...:amp    real part of amp * (matrix coefficient at the centre
//                         entry of rep k); on the torus amp * cos(k.x)
//   random:seed:decay     random real band-limited field
//
// The stored data are multiplied by epsilon when built.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "liewave/group_harmonics.hpp"
#include "liewave/mode_propagator.hpp"
#include "liewave/semilinear.hpp"

namespace liewave {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string group = "torus2";
  int bandlimit = 8;
  double oversample = 2.0;
  double alpha = 0.5;
  double b = 1.0;
  double m2 = 0.0;
  double p = 2.0;
  double epsilon = 1.0;
  double t_end = 10.0;
  double dt = 1e-2;
  std::string scheme = "midpoint";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::string u0 = "constant:1";
  std::string u1 = "constant:0";
  double threshold = 1e6;
  bool nonlinear = true;
  bool dealias = true;

  // Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  // Throws ConfigError when a field is out of range.
  void validate() const;

  GroupSpec group_spec() const;
  WaveParams wave_params() const;
  SchemeConfig scheme_config() const;

  // Sorted key=value lines of every field except output_dir.
  std::string canonical() const;
  std::string hash() const;

  static const std::vector<std::string>& keys();
};

// Lines "key = value"; '#' starts a comment; blank lines ignored.
RunConfig parse_run_config(std::istream& is, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// epsilon * builder(spec) sampled on the basis grid; real valued.
GridField build_data(const std::string& spec, const SpectralBasis& basis, double epsilon);

}  // namespace liewave
