#pragma once

// Serialization of fields, traces, manifests and scan results. Numbers are
// written with 17 significant digits so identical inputs give identical bytes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "liewave/blowup.hpp"
#include "liewave/group_harmonics.hpp"
#include "liewave/semilinear.hpp"
#include "liewave/verification.hpp"

namespace liewave {

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

std::string format_double(double value);

// {group, bandlimit, oversample, entries: [{label, re, im}]}, re/im as
// row-major nested arrays.
void write_spectral_json(std::ostream& os, const SpectralField& field);
SpectralField read_spectral_json(std::istream& is);

// One "re,im" row per grid node.
void write_grid_csv(std::ostream& os, const GridField& field);
GridField read_grid_csv(std::istream& is);

// Columns t, l2, seminorm_alpha, dt_l2, envelope, ratio, x_running where
// ratio = l2 / envelope.
void write_trace_csv(std::ostream& os, const NormTrace& trace, const std::string& manifest_hash);

struct RunManifest {
  std::string group;
  int bandlimit = 0;
  double alpha = 0.0;
  double b = 0.0;
  double m2 = 0.0;
  double p = 0.0;
  double dt = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  std::string outcome;
  double final_time = 0.0;
  double epsilon = 0.0;
  std::string manifest_hash;
};

void write_manifest_json(std::ostream& os, const RunManifest& manifest);
RunManifest read_manifest_json(std::istream& is);

// Columns epsilon, lifespan, method, threshold, flags; "inf" for no blow-up.
void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::string& manifest_hash);

// {slope, intercept, ci, p, expected_slope, finite_count, warnings}
void write_fit_json(std::ostream& os, const ScanResult& scan, double p,
                    const std::string& manifest_hash);

// JSON array of check reports.
void write_report_json(std::ostream& os, const std::vector<CheckReport>& reports,
                       const std::string& manifest_hash);

}  // namespace liewave
