#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "chern/metric.hpp"

namespace chern {

/// Per-coordinate complex sampling box.
struct CoordinateBox {
  double re_lo = -1.0, re_hi = 1.0;
  double im_lo = -1.0, im_hi = 1.0;
};

struct ExpectedProperties {
  std::optional<bool> kahler;
  std::optional<bool> balanced;
  std::optional<bool> chern_flat;
  std::optional<double> constant_hsc;
};

struct CatalogEntry {
  MetricSpec spec;
  std::vector<CoordinateBox> sample_region;
  ExpectedProperties expected;  // set for builtins only
};

const std::vector<std::string>& builtin_names();

/// Builtins: flat3, fubini_study3, iwasawa, hopf3. Throws ValidationError on
/// unknown names.
CatalogEntry load_builtin(const std::string& name);

/// Loads a user metric from a JSON config (schema documented in README);
/// validates Hermitian symmetry and positive definiteness at 5 sample points.
CatalogEntry load_config(const std::filesystem::path& path);

/// Deterministic points in the entry's sample region; pure function of
/// (seed, point index, coordinate).
std::vector<Eigen::VectorXcd> sample_points(const CatalogEntry& entry, int count,
                                            std::uint64_t seed);

}  // namespace chern
