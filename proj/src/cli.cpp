#include "chern/cli.hpp"

#include <chrono>
#include <filesystem>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "chern/catalog.hpp"
#include "chern/fd_tensors.hpp"
#include "chern/functionals.hpp"
#include "chern/identities.hpp"
#include "chern/takagi.hpp"

namespace chern {

namespace {

using nlohmann::ordered_json;

ordered_json complex_json(const Complex& v) { return ordered_json::array({v.real(), v.imag()}); }

ordered_json matrix_json(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Eigen::VectorXcd& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

ordered_json tensor3_json(const Tensor<3>& t) {
  const int n = t.dim();
  ordered_json out = ordered_json::array();
  for (int a = 0; a < n; ++a) {
    ordered_json mid = ordered_json::array();
    for (int b = 0; b < n; ++b) {
      ordered_json inner = ordered_json::array();
      for (int c = 0; c < n; ++c) inner.push_back(complex_json(t(a, b, c)));
      mid.push_back(std::move(inner));
    }
    out.push_back(std::move(mid));
  }
  return out;
}

ordered_json tensor4_json(const Tensor<4>& t) {
  const int n = t.dim();
  ordered_json out = ordered_json::array();
  for (int a = 0; a < n; ++a) {
    ordered_json l1 = ordered_json::array();
    for (int b = 0; b < n; ++b) {
      ordered_json l2 = ordered_json::array();
      for (int c = 0; c < n; ++c) {
        ordered_json l3 = ordered_json::array();
        for (int d = 0; d < n; ++d) l3.push_back(complex_json(t(a, b, c, d)));
        l2.push_back(std::move(l3));
      }
      l1.push_back(std::move(l2));
    }
    out.push_back(std::move(l1));
  }
  return out;
}

struct RowSink {
  std::ostream& out;
  std::string manifold;
  bool all_pass = true;

  void emit(int point_index, std::string_view identity, std::string_view variant,
            double residual, const std::vector<int>& argmax, bool pass) {
    ordered_json row;
    row["manifold"] = manifold;
    row["point_index"] = point_index;
    row["identity"] = std::string(identity);
    row["variant"] = std::string(variant);
    row["max_abs_residual"] = residual;
    row["argmax_indices"] = argmax;
    row["pass"] = pass;
    out << row.dump() << "\n";
    all_pass = all_pass && pass;
  }

  void emit(int point_index, const ResidualReport& rep) {
    emit(point_index, identity_name(rep.identity), rep.variant, rep.max_abs_residual,
         rep.argmax_indices, rep.pass);
  }
};

/// Tensor source: the symbolic jet pipeline by default, the all-central-
/// difference field pipeline under --fd.
struct TensorSource {
  std::unique_ptr<MetricJetEngine> symbolic;
  std::unique_ptr<FdTensorEngine> fd;

  PointTensors at(const Eigen::VectorXcd& z) const {
    return fd ? fd->at(z) : compute_point_tensors(symbolic->at(z));
  }
};

TensorSource make_tensor_source(const MetricSpec& spec, bool use_fd, double fd_step) {
  TensorSource src;
  if (use_fd)
    src.fd = std::make_unique<FdTensorEngine>(spec, fd_step);
  else
    src.symbolic = std::make_unique<MetricJetEngine>(spec);
  return src;
}

CatalogEntry load_manifold(const std::string& name) {
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return load_builtin(name);
  if (std::filesystem::exists(name)) return load_config(name);
  throw ValidationError("unknown manifold '" + name + "' (not a builtin, not a config file)");
}

Eigen::VectorXcd point_from_flags(const CatalogEntry& entry, const std::vector<double>& coords,
                                  std::uint64_t seed) {
  if (coords.empty()) return sample_points(entry, 1, seed).front();
  const int n = entry.spec.n;
  if (static_cast<int>(coords.size()) != 2 * n)
    throw ValidationError("--point expects " + std::to_string(2 * n) +
                          " values (re im per coordinate)");
  Eigen::VectorXcd z(n);
  for (int c = 0; c < n; ++c) z[c] = Complex(coords[2 * c], coords[2 * c + 1]);
  return z;
}

/// Smallest-residual variant of a multi-variant identity.
ResidualReport best_variant(IdentityId id, const TorsionAtPoint& t, const CurvatureAtPoint& r,
                            double tol) {
  ResidualReport best;
  bool first = true;
  for (const std::string& variant : identity_variants(id)) {
    ResidualReport rep;
    if (id == IdentityId::B2)
      rep = residual_bianchi(BianchiKind::Second, t, r, variant, tol);
    else
      rep = residual_commutation(CommutationKind::C2, t, r, variant, tol);
    if (first || rep.max_abs_residual < best.max_abs_residual) best = rep;
    first = false;
  }
  return best;
}

struct Functionals {
  double eta_inf = 0.0;
  double r_inf = 0.0;
  std::array<double, 3> ricci_inf = {0.0, 0.0, 0.0};
  double f_min = std::numeric_limits<double>::infinity();
  double f_max = -std::numeric_limits<double>::infinity();
  std::vector<double> q_diag_sum;  // per-point mean of R_{i ibar i ibar}

  void absorb(const PointTensors& pt) {
    eta_inf = std::max(eta_inf, gauduchon_eta(pt.torsion_frame.t).cwiseAbs().maxCoeff());
    r_inf = std::max(r_inf, pt.curvature_frame.r.max_abs());
    for (int kind = 1; kind <= 3; ++kind)
      ricci_inf[kind - 1] = std::max(
          ricci_inf[kind - 1], ricci(pt.curvature_frame.r, kind).cwiseAbs().maxCoeff());
    const double f = torsion_norm(pt.torsion_frame.t);
    f_min = std::min(f_min, f);
    f_max = std::max(f_max, f);
    double c = 0.0;
    for (int i = 0; i < pt.curvature_frame.n; ++i)
      c += pt.curvature_frame.r(i, i, i, i).real();
    q_diag_sum.push_back(c / pt.curvature_frame.n);
  }

  double c_estimate() const {
    double c = 0.0;
    for (double v : q_diag_sum) c += v;
    return q_diag_sum.empty() ? 0.0 : c / static_cast<double>(q_diag_sum.size());
  }
};

int finish(std::ostream& out, std::ostream& err, const RowSink& sink, ordered_json verdicts,
           ordered_json functionals, std::chrono::steady_clock::time_point start) {
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start).count();
  ordered_json summary;
  summary["verdicts"] = std::move(verdicts);
  if (!functionals.is_null()) summary["functionals"] = std::move(functionals);
  summary["duration_ms"] = ms;
  out << summary.dump() << "\n";
  err << (sink.all_pass ? "PASS" : "FAIL") << " " << sink.manifold << " (" << ms << " ms)\n";
  return sink.all_pass ? 0 : 1;
}

int cmd_catalog(std::ostream& out) {
  for (const std::string& name : builtin_names()) {
    const CatalogEntry entry = load_builtin(name);
    ordered_json j;
    j["name"] = name;
    j["dimension"] = entry.spec.n;
    ordered_json props;
    if (entry.expected.kahler) props["kahler"] = *entry.expected.kahler;
    if (entry.expected.balanced) props["balanced"] = *entry.expected.balanced;
    if (entry.expected.chern_flat) props["chern_flat"] = *entry.expected.chern_flat;
    if (entry.expected.constant_hsc) props["constant_hsc"] = *entry.expected.constant_hsc;
    j["expected_properties"] = std::move(props);
    out << j.dump() << "\n";
  }
  return 0;
}

int cmd_identities(std::ostream& out, std::ostream& err, const std::string& manifold, int points,
                   std::uint64_t seed, double tol, bool use_fd, double fd_step, bool lemmas,
                   double lemma_c) {
  const auto start = std::chrono::steady_clock::now();
  const CatalogEntry entry = load_manifold(manifold);
  const TensorSource source = make_tensor_source(entry.spec, use_fd, fd_step);
  const auto pts = sample_points(entry, points, seed);

  RowSink sink{out, entry.spec.name};
  Functionals fn;
  std::vector<PointTensors> tensors;
  tensors.reserve(pts.size());
  for (const auto& z : pts) tensors.push_back(source.at(z));

  for (std::size_t p = 0; p < tensors.size(); ++p) {
    const auto& t = tensors[p].torsion_frame;
    const auto& r = tensors[p].curvature_frame;
    const int pi = static_cast<int>(p);
    sink.emit(pi, residual_bianchi(BianchiKind::First, t, r, "", tol));
    sink.emit(pi, best_variant(IdentityId::B2, t, r, tol));
    sink.emit(pi, residual_commutation(CommutationKind::C1, t, r, "", tol));
    sink.emit(pi, best_variant(IdentityId::C2, t, r, tol));
    sink.emit(pi, residual_commutation(CommutationKind::C3, t, r, "", tol));
    if (lemmas) {
      sink.emit(pi, residual_rbc_constant(r, lemma_c, tol));
      for (const IdentityId id : {IdentityId::EQ32, IdentityId::EQ33, IdentityId::EQ36A,
                                  IdentityId::EQ36B, IdentityId::EQ37, IdentityId::EQ38})
        sink.emit(pi, residual_lemma(id, t, r, lemma_c, tol));
    }
    fn.absorb(tensors[p]);
  }

  // Constant-B probe at the estimated c, for the verdict only.
  const double c_est = fn.c_estimate();
  double c_residual = 0.0;
  for (const auto& pt : tensors)
    c_residual = std::max(
        c_residual, residual_rbc_constant(pt.curvature_frame, c_est, tol).max_abs_residual);

  ordered_json verdicts;
  verdicts["balanced"] = ordered_json{{"holds", fn.eta_inf <= tol}, {"eta_inf", fn.eta_inf}};
  verdicts["chern_flat"] = ordered_json{{"holds", fn.r_inf <= tol}, {"r_inf", fn.r_inf}};
  verdicts["constant_b"] = ordered_json{
      {"holds", c_residual <= tol}, {"c_estimate", c_est}, {"residual", c_residual}};

  ordered_json functionals;
  functionals["eta_inf"] = fn.eta_inf;
  functionals["r_inf"] = fn.r_inf;
  functionals["ricci_inf"] = fn.ricci_inf;
  functionals["f_min"] = fn.f_min;
  functionals["f_max"] = fn.f_max;

  return finish(out, err, sink, std::move(verdicts), std::move(functionals), start);
}

int cmd_flatness(std::ostream& out, std::ostream& err, const std::string& manifold, int points,
                 std::uint64_t seed, double tol) {
  const auto start = std::chrono::steady_clock::now();
  const CatalogEntry entry = load_manifold(manifold);
  MetricJetEngine engine(entry.spec);
  const auto pts = sample_points(entry, points, seed);

  RowSink sink{out, entry.spec.name};
  Functionals fn;
  bool all_balanced = true;
  double p_inf = 0.0, f_min = std::numeric_limits<double>::infinity(), f_max = 0.0;

  for (std::size_t p = 0; p < pts.size(); ++p) {
    const int pi = static_cast<int>(p);
    const PointTensors pt = compute_point_tensors(engine.at(pts[p]));
    fn.absorb(pt);

    const double eta_inf = gauduchon_eta(pt.torsion_frame.t).cwiseAbs().maxCoeff();
    const bool balanced = eta_inf <= tol;
    sink.emit(pi, "ETA_ZERO", "", eta_inf, {}, balanced);
    if (!balanced) {
      all_balanced = false;
      continue;
    }

    const FrameNormalization norm = normalize_frame(pt.frame, pt.torsion_frame, tol);
    double t_diag = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) t_diag = std::max(t_diag, std::abs(norm.torsion.t(i, i, k)));
    sink.emit(pi, "NORMALIZED_TORSION", "", t_diag, {}, t_diag <= 1e-8);

    const ResidualReport pv = p_vanishing_check(norm.torsion);
    sink.emit(pi, pv);

    const BochnerQuantities bq = bochner_quantities(norm.torsion);
    sink.emit(pi, "BOCHNER_P", "", std::abs(bq.p), {}, std::abs(bq.p) <= 1e-8);
    p_inf = std::max(p_inf, std::abs(bq.p));
    f_min = std::min(f_min, bq.f);
    f_max = std::max(f_max, bq.f);

    const double r_inf = pt.curvature_frame.r.max_abs();
    sink.emit(pi, "R_FLAT", "", r_inf, {}, r_inf <= tol);
  }

  ordered_json verdicts;
  verdicts["balanced"] = ordered_json{{"holds", all_balanced}, {"eta_inf", fn.eta_inf}};
  verdicts["chern_flat"] = ordered_json{{"holds", fn.r_inf <= tol}, {"r_inf", fn.r_inf}};

  ordered_json functionals;
  functionals["eta_inf"] = fn.eta_inf;
  functionals["r_inf"] = fn.r_inf;
  functionals["p_inf"] = p_inf;
  functionals["f_min"] = f_min;
  functionals["f_max"] = f_max;

  return finish(out, err, sink, std::move(verdicts), std::move(functionals), start);
}

int cmd_eval(std::ostream& out, const std::string& manifold, const std::vector<double>& coords,
             std::uint64_t seed) {
  const CatalogEntry entry = load_manifold(manifold);
  const Eigen::VectorXcd z = point_from_flags(entry, coords, seed);
  MetricJetEngine engine(entry.spec);
  const MetricJet jet = engine.at(z);
  const PointTensors pt = compute_point_tensors(jet);

  ordered_json j;
  j["manifold"] = entry.spec.name;
  j["point"] = vector_json(z);
  j["g"] = matrix_json(jet.g);
  j["g_inv"] = matrix_json(jet.g_inv);
  j["gamma"] = tensor3_json(pt.conn.gamma);
  j["frame"] = matrix_json(pt.frame.e);
  j["torsion_frame"] = tensor3_json(pt.torsion_frame.t);
  j["curvature_frame"] = tensor4_json(pt.curvature_frame.r);
  j["eta"] = vector_json(gauduchon_eta(pt.torsion_frame.t));
  j["torsion_norm"] = torsion_norm(pt.torsion_frame.t);
  out << j.dump() << "\n";
  return 0;
}

int cmd_normalize(std::ostream& out, std::ostream& err, const std::string& manifold,
                  const std::vector<double>& coords, std::uint64_t seed, double tol) {
  const CatalogEntry entry = load_manifold(manifold);
  const Eigen::VectorXcd z = point_from_flags(entry, coords, seed);
  MetricJetEngine engine(entry.spec);
  const PointTensors pt = compute_point_tensors(engine.at(z));

  const FrameNormalization norm = normalize_frame(pt.frame, pt.torsion_frame, tol);
  double t_diag = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) t_diag = std::max(t_diag, std::abs(norm.torsion.t(i, i, k)));

  ordered_json j;
  j["manifold"] = entry.spec.name;
  j["point"] = vector_json(z);
  j["torsion_matrix"] = matrix_json(torsion_matrix(pt.torsion_frame.t));
  j["rotation"] = matrix_json(norm.rotation);
  j["frame"] = matrix_json(norm.frame.e);
  j["normalized_torsion"] = tensor3_json(norm.torsion.t);
  j["max_diagonal_torsion"] = t_diag;
  out << j.dump() << "\n";
  err << "normalize " << entry.spec.name << ": max |T'^i_{ik}| = " << t_diag << "\n";
  return t_diag <= 1e-8 ? 0 : 1;
}

int cmd_bspectrum(std::ostream& out, std::ostream& err, const std::string& manifold,
                  const std::vector<double>& coords, std::uint64_t seed, int restarts) {
  const CatalogEntry entry = load_manifold(manifold);
  const Eigen::VectorXcd z = point_from_flags(entry, coords, seed);
  MetricJetEngine engine(entry.spec);
  const PointTensors pt = compute_point_tensors(engine.at(z));

  RbcOptions opt;
  if (restarts > 0) opt.restarts = restarts;
  const BisectionalSpectrum spec = rbc_extremes(pt.curvature_frame.r, opt);

  ordered_json j;
  j["manifold"] = entry.spec.name;
  j["point"] = vector_json(z);
  j["min_value"] = spec.min_value;
  j["max_value"] = spec.max_value;
  ordered_json wmin = ordered_json::array(), wmax = ordered_json::array();
  for (int i = 0; i < spec.argmin_weights.size(); ++i) wmin.push_back(spec.argmin_weights[i]);
  for (int i = 0; i < spec.argmax_weights.size(); ++i) wmax.push_back(spec.argmax_weights[i]);
  j["argmin_weights"] = std::move(wmin);
  j["argmax_weights"] = std::move(wmax);
  j["argmin_frame"] = matrix_json(spec.argmin_frame);
  j["argmax_frame"] = matrix_json(spec.argmax_frame);
  j["restarts"] = spec.restarts;
  j["converged"] = spec.converged;
  out << j.dump() << "\n";
  err << "bspectrum " << entry.spec.name << ": [" << spec.min_value << ", " << spec.max_value
      << "]" << (spec.converged ? "" : " (not converged)") << "\n";
  return spec.converged ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chernlab: Chern-connection tensor calculus on Hermitian threefolds"};
  app.require_subcommand(1);

  std::string manifold;
  std::vector<double> point;
  int points = 10;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  bool use_fd = false;
  double fd_step = 1e-4;
  bool lemmas = false;
  double lemma_c = 0.0;
  int restarts = 0;

  CLI::App* c_catalog = app.add_subcommand("catalog", "list builtin manifolds");

  CLI::App* c_eval = app.add_subcommand("eval", "print tensors at a point");
  c_eval->add_option("manifold", manifold)->required();
  c_eval->add_option("--point", point, "2n values: re im per coordinate");
  c_eval->add_option("--seed", seed);

  CLI::App* c_id = app.add_subcommand("identities", "run the residual identity suite");
  c_id->add_option("manifold", manifold)->required();
  c_id->add_option("--points", points);
  c_id->add_option("--seed", seed);
  c_id->add_option("--tol", tol);
  c_id->add_flag("--fd", use_fd, "use finite-difference jets");
  c_id->add_option("--fd-step", fd_step);
  c_id->add_flag("--lemmas", lemmas, "include the constant-B identity suite");
  c_id->add_option("--c", lemma_c, "constant-B value for the lemma suite");

  CLI::App* c_flat = app.add_subcommand("flatness",
                                        "balanced -> normalized frame -> P -> max |R| pipeline");
  c_flat->add_option("manifold", manifold)->required();
  c_flat->add_option("--points", points);
  c_flat->add_option("--seed", seed);
  c_flat->add_option("--tol", tol);

  CLI::App* c_norm = app.add_subcommand("normalize", "torsion frame normalization at a point");
  c_norm->add_option("manifold", manifold)->required();
  c_norm->add_option("--point", point);
  c_norm->add_option("--seed", seed);
  c_norm->add_option("--tol", tol);

  CLI::App* c_bspec = app.add_subcommand("bspectrum", "real bisectional curvature extremes");
  c_bspec->add_option("manifold", manifold)->required();
  c_bspec->add_option("--point", point);
  c_bspec->add_option("--seed", seed);
  c_bspec->add_option("--restarts", restarts);

  std::vector<const char*> argv;
  argv.push_back("chernlab");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_catalog->parsed()) return cmd_catalog(out);
    if (c_eval->parsed()) return cmd_eval(out, manifold, point, seed);
    if (c_id->parsed()) {
      // Looser default tolerance for finite-difference jets (truncation error).
      const double eff_tol = (use_fd && c_id->count("--tol") == 0) ? 1e-3 : tol;
      return cmd_identities(out, err, manifold, points, seed, eff_tol, use_fd, fd_step, lemmas,
                            lemma_c);
    }
    if (c_flat->parsed()) return cmd_flatness(out, err, manifold, points, seed, tol);
    if (c_norm->parsed()) return cmd_normalize(out, err, manifold, point, seed, tol);
    if (c_bspec->parsed()) return cmd_bspectrum(out, err, manifold, point, seed, restarts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace chern
