#include "chern/catalog.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "chern/rng.hpp"
#include "chern/tensor.hpp"

namespace chern {

namespace {

const char* kFsDenom = "(1+z1*w1+z2*w2+z3*w3)";

std::string fs_entry(int i, int j) {
  // g_{i jbar} = delta_ij/(1+s) - w_i z_j/(1+s)^2 with s = sum z_k w_k.
  std::string e;
  if (i == j) e += std::string("1/") + kFsDenom + " - ";
  else e += "-";
  e += "w" + std::to_string(i) + "*z" + std::to_string(j) + "/" + kFsDenom + "^2";
  return e;
}

CatalogEntry builtin_flat3() {
  CatalogEntry entry;
  entry.spec = make_metric_spec("flat3", 3,
                                {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
  entry.sample_region.assign(3, CoordinateBox{-1.0, 1.0, -1.0, 1.0});
  entry.expected.kahler = true;
  entry.expected.balanced = true;
  entry.expected.chern_flat = true;
  entry.expected.constant_hsc = 0.0;
  return entry;
}

CatalogEntry builtin_fubini_study3() {
  std::vector<std::vector<std::string>> g(3, std::vector<std::string>(3));
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) g[i - 1][j - 1] = fs_entry(i, j);
  CatalogEntry entry;
  entry.spec = make_metric_spec("fubini_study3", 3, g);
  entry.sample_region.assign(3, CoordinateBox{-1.0, 1.0, -1.0, 1.0});
  entry.expected.kahler = true;
  entry.expected.balanced = true;
  entry.expected.chern_flat = false;
  entry.expected.constant_hsc = 2.0;
  return entry;
}

CatalogEntry builtin_iwasawa() {
  CatalogEntry entry;
  entry.spec = make_metric_spec(
      "iwasawa", 3,
      {{"1", "0", "0"}, {"0", "1+z1*w1", "-z1"}, {"0", "-w1", "1"}});
  entry.sample_region.assign(3, CoordinateBox{-1.0, 1.0, -1.0, 1.0});
  entry.expected.kahler = false;
  entry.expected.balanced = true;
  entry.expected.chern_flat = true;
  entry.expected.constant_hsc = 0.0;
  return entry;
}

CatalogEntry builtin_hopf3() {
  const std::string inv_s = "1/(z1*w1+z2*w2+z3*w3)";
  CatalogEntry entry;
  entry.spec = make_metric_spec(
      "hopf3", 3, {{inv_s, "0", "0"}, {"0", inv_s, "0"}, {"0", "0", inv_s}});
  // Box with |z_k| in [0.5, 2], so s = sum |z_k|^2 stays in [0.75, 12], well
  // away from the singular origin.
  const double lo = 0.5 / std::sqrt(2.0);
  const double hi = 2.0 / std::sqrt(2.0);
  entry.sample_region.assign(3, CoordinateBox{lo, hi, lo, hi});
  entry.expected.kahler = false;
  entry.expected.balanced = false;
  entry.expected.chern_flat = false;
  return entry;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"flat3", "fubini_study3", "iwasawa", "hopf3"};
  return names;
}

CatalogEntry load_builtin(const std::string& name) {
  if (name == "flat3") return builtin_flat3();
  if (name == "fubini_study3") return builtin_fubini_study3();
  if (name == "iwasawa") return builtin_iwasawa();
  if (name == "hopf3") return builtin_hopf3();
  throw ValidationError("unknown builtin manifold '" + name + "'");
}

CatalogEntry load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config parse error in " + path.string() + ": " + e.what());
  }

  auto require = [&](const char* field) {
    if (!doc.contains(field))
      throw ValidationError("config " + path.string() + ": missing field '" + field + "'");
  };
  require("name");
  require("dimension");
  require("metric");
  require("sample_region");

  const int n = doc.at("dimension").get<int>();
  if (n < 1) throw ValidationError("config: dimension must be positive");
  const auto& metric = doc.at("metric");
  if (!metric.is_array() || static_cast<int>(metric.size()) != n)
    throw ValidationError("config: 'metric' must be an " + std::to_string(n) + "x" +
                          std::to_string(n) + " array of strings");
  std::vector<std::vector<std::string>> sources;
  for (const auto& row : metric) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ValidationError("config: 'metric' rows must have " + std::to_string(n) + " entries");
    sources.push_back(row.get<std::vector<std::string>>());
  }

  CatalogEntry entry;
  entry.spec = make_metric_spec(doc.at("name").get<std::string>(), n, sources);

  const auto& region = doc.at("sample_region");
  if (!region.is_array() || static_cast<int>(region.size()) != n)
    throw ValidationError("config: 'sample_region' must have one box per coordinate");
  for (const auto& box : region) {
    CoordinateBox cb;
    const auto re = box.at("re").get<std::vector<double>>();
    const auto im = box.at("im").get<std::vector<double>>();
    if (re.size() != 2 || im.size() != 2)
      throw ValidationError("config: region boxes need re:[lo,hi], im:[lo,hi]");
    cb.re_lo = re[0];
    cb.re_hi = re[1];
    cb.im_lo = im[0];
    cb.im_hi = im[1];
    if (!(cb.re_lo <= cb.re_hi) || !(cb.im_lo <= cb.im_hi))
      throw ValidationError("config: empty region box");
    entry.sample_region.push_back(cb);
  }

  const auto points = sample_points(entry, 5, 0x5eedc0f16ULL);
  validate_metric(entry.spec, points);
  return entry;
}

std::vector<Eigen::VectorXcd> sample_points(const CatalogEntry& entry, int count,
                                            std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample_points: count must be >= 1");
  const int n = entry.spec.n;
  std::vector<Eigen::VectorXcd> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int idx = 0; idx < count; ++idx) {
    Eigen::VectorXcd z(n);
    for (int c = 0; c < n; ++c) {
      const CoordinateBox& box = entry.sample_region[static_cast<std::size_t>(c)];
      const double re =
          box.re_lo + (box.re_hi - box.re_lo) *
                          keyed_uniform(seed, static_cast<std::uint64_t>(idx),
                                        static_cast<std::uint64_t>(c), 0);
      const double im =
          box.im_lo + (box.im_hi - box.im_lo) *
                          keyed_uniform(seed, static_cast<std::uint64_t>(idx),
                                        static_cast<std::uint64_t>(c), 1);
      z[c] = Complex(re, im);
    }
    points.push_back(std::move(z));
  }
  return points;
}

}  // namespace chern
