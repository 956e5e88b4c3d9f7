#include "finsler/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

#include "finsler/classifier.hpp"
#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"

namespace finsler {

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> catalog = {
      {"spray_homogeneity", "Gamma^i_jk y^j y^k = 2 G^i", 1e-8},
      {"euler_fundamental", "g_ij y^i y^j = F^2", 1e-8},
      {"angular_trace", "g^ij h_ij = n - 1", 1e-8},
      {"cartan_symmetry", "C_ijk totally symmetric, C_ijk y^i = 0", 1e-8},
      {"matsumoto_annihilation", "M_ijk y^i = 0", 1e-8},
      {"berwald_symmetry", "B^i_jkl symmetric in j, k, l", 1e-8},
      {"berwald_annihilation", "y^j B^i_jkl = 0", 1e-8},
      {"mean_berwald_annihilation", "y^j E_jk = 0", 1e-8},
      {"douglas_trace", "D^m_jkm = 0", 1e-8},
      {"f_horizontal", "F_|m y^m = 0", 1e-8},
      {"landsberg_two_routes", "y_i B^i_jkl = -2 L_jkl", 1e-6},
      {"mean_landsberg_two_routes", "g^jk L_ijk agrees for both Landsberg routes", 1e-6},
      {"h_curvature_two_routes", "E_ij|m y^m = H_ij (local-coordinates formula)", 1e-6},
      {"h_curvature_symmetry", "H_ij = H_ji, y^i H_ij = 0", 1e-8},
      {"stretch_antisymmetry", "Sigma_ijkl = -Sigma_ijlk, y^i Sigma_ijkl = 0", 1e-8},
      {"bianchi_1", "R^i_jkl|m + R^i_jlm|k + R^i_jmk|l = 0", 1e-5},
      {"bianchi_1_full", "R^i_jkl|m + B^i_jkp R^p_lm + (cyclic in k, l, m) = 0", 1e-5},
      {"bianchi_2", "B^i_jml|k - B^i_jkm|l = R^i_jkl,m", 1e-5},
      {"bianchi_3", "B^i_jkl,m = B^i_jkm,l", 1e-8},
      {"gdw", "h^i_a D^a_jkl|m y^m = 0", 1e-5},
      {"gdw_witness", "D^i_jkl|m y^m = T_jkl y^i, T_jkl = F^-2 y_a D^a_jkl|m y^m", 1e-5},
      {"mu_annihilation", "mu_i y^i = 0", 1e-8},
      {"fit_homogeneity", "lambda(x, 2y) = lambda/2, mu(x, 2y) = mu/4", 1e-8},
      {"landsberg_mu_form", "L_jkl = -F^2/2 (mu_j h_kl + mu_k h_jl + mu_l h_jk)", 1e-5},
      {"mean_landsberg_mu_form", "J_j = -(n+1) F^2 mu_j / 2", 1e-5},
      {"landsberg_equivalence", "L = 0 iff J = 0 (count of violating samples)", 0.0},
      {"lambda_prime", "2 H_jk = (n+1) lambda' h_jk", 1e-5},
      {"mu_prime_isotropic", "mu'_j = 2K/(n+1) I_j for isotropic K", 1e-5},
      {"stretch_mu", "Sigma = 0 implies mu' = 0", 1e-5},
      {"isotropic_riemann", "R^i_jkl = K (g_jl delta^i_k - g_jk delta^i_l)", 1e-5},
      {"isotropic_berwald", "B^i_jml|k y^k = 2 K C_jml y^i", 1e-5},
      {"cartan_reducible_trace", "C = sym(B_i h_jk) implies I_i = (n+1) B_i", 1e-6},
  };
  return catalog;
}

const CheckRecord& CheckReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error("no check named '" + name + "'");
}

namespace {

std::size_t catalog_index(const std::string& name) {
  const auto& cat = check_catalog();
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].name == name) return i;
  throw ValidationError("unknown check '" + name + "'");
}

struct SampleOutcome {
  std::vector<std::optional<double>> residual;
  std::vector<std::string> reason;
  std::vector<Predicate> preds;
  SpecialBerwaldFit fit;
  bool fit_available = false;
  Isotropy iso;
  LandsbergRelations landsberg;
  std::optional<double> lambda_vertical;
  std::exception_ptr error;

  void set(const std::string& name, double r) { residual[catalog_index(name)] = r; }
  void skip(const std::string& name, std::string why) { reason[catalog_index(name)] = std::move(why); }
  void set(const std::string& name, const Conditional& c) {
    if (c.applicable)
      set(name, c.residual);
    else
      skip(name, c.reason);
  }
};

double scalar_residual(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

double symmetry_residual(const Tensor<double>& t, std::initializer_list<std::initializer_list<int>> perms) {
  double r = 0.0;
  for (auto perm : perms) r = std::max(r, rel_residual(t, permute(t, perm)));
  return r;
}

unsigned long long flag_seed(unsigned long long seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index)};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<unsigned long long>(w[0]) << 32) | w[1];
}

SampleOutcome evaluate_sample(const Metric& metric, const EvalPoint& p, unsigned long long iso_seed) {
  const std::size_t count = check_catalog().size();
  SampleOutcome out;
  out.residual.assign(count, std::nullopt);
  out.reason.assign(count, {});
  const int n = metric.dim();
  const Geometry geo(metric, p, kBianchiOrder);

  const Tensor<double> g = value(geo.g());
  const Tensor<double> gi = value(geo.g_inv());
  const Tensor<double> yv = value(geo.y());
  const double f2 = geo.F2().value();

  {
    const SprayData sd = geo.spray_data();
    Tensor<double> twice = sd.G;
    twice *= 2.0;
    out.set("spray_homogeneity", rel_residual(apply(apply(sd.Gamma, 2, yv), 1, yv), twice));
  }
  out.set("euler_fundamental", scalar_residual(p.y.dot(to_matrix(g) * p.y) / f2, 1.0));
  out.set("angular_trace", scalar_residual(value(contract(geo.h(), 0, 1, geo.g_inv()))[0], n - 1.0));

  const Tensor<double> c = value(geo.cartan());
  out.set("cartan_symmetry", std::max(symmetry_residual(c, {{1, 0, 2}, {0, 2, 1}, {2, 1, 0}}), rel_residual_zero(apply(c, 0, yv))));
  out.set("matsumoto_annihilation", rel_residual_zero(apply(value(geo.matsumoto()), 0, yv)));

  const Tensor<double> b = value(geo.berwald());
  out.set("berwald_symmetry", symmetry_residual(b, {{0, 2, 1, 3}, {0, 1, 3, 2}, {0, 3, 2, 1}}));
  out.set("berwald_annihilation",
          std::max({rel_residual_zero(apply(b, 1, yv)), rel_residual_zero(apply(b, 2, yv)), rel_residual_zero(apply(b, 3, yv))}));
  out.set("mean_berwald_annihilation", rel_residual_zero(apply(value(geo.mean_berwald()), 0, yv)));
  out.set("douglas_trace", rel_residual_zero(contract(value(geo.douglas()), 0, 3)));
  out.set("f_horizontal", std::abs(geo.along_spray(geo.scalar(geo.F()))[0].value()) / (1.0 + std::sqrt(f2)));

  const Tensor<double> L = value(geo.landsberg());
  const Tensor<double> Lb = value(geo.landsberg_from_berwald());
  out.set("landsberg_two_routes", rel_residual(Lb, L));
  out.set("mean_landsberg_two_routes", rel_residual(contract(L, 1, 2, gi), contract(Lb, 1, 2, gi)));

  const Tensor<double> H = value(geo.h_curvature());
  out.set("h_curvature_two_routes", rel_residual(H, geo.h_curvature_explicit()));
  out.set("h_curvature_symmetry", std::max(rel_residual(H, permute(H, {1, 0})), rel_residual_zero(apply(H, 0, yv))));

  const Tensor<double> sigma = value(geo.stretch());
  out.set("stretch_antisymmetry",
          std::max(rel_residual(sigma, -1.0 * permute(sigma, {0, 1, 3, 2})), rel_residual_zero(apply(sigma, 0, yv))));

  const BianchiResiduals br = bianchi_residuals(geo);
  out.set("bianchi_1", br.first);
  out.set("bianchi_1_full", br.first_full);
  out.set("bianchi_2", br.second);
  out.set("bianchi_3", br.third);

  out.preds = predicates(geo);
  const bool douglas = out.preds[7].holds;

  if (n >= 2) {
    out.fit = fit_special_berwald(geo);
    out.fit_available = true;
    out.set("mu_annihilation", std::abs(out.fit.mu.dot(p.y)) / (1.0 + out.fit.mu.norm() * p.y.norm()));
    const SpecialBerwaldFit twice = fit_special_berwald(metric, {p.x, 2.0 * p.y});
    const double dl = scalar_residual(twice.lambda, 0.5 * out.fit.lambda);
    const double dm = (twice.mu - 0.25 * out.fit.mu).cwiseAbs().maxCoeff() / (1.0 + out.fit.mu.cwiseAbs().maxCoeff());
    out.set("fit_homogeneity", std::max(dl, dm));
  } else {
    out.skip("mu_annihilation", "needs n >= 2");
    out.skip("fit_homogeneity", "needs n >= 2");
  }
  const bool special = out.fit_available && out.fit.special();

  const GdwResult gdw = gdw_check(geo);
  if (n == 2 || metric.kind() == MetricKind::funk || special || douglas) {
    out.set("gdw", gdw.residual);
    out.set("gdw_witness", gdw.witness_residual);
  } else {
    out.skip("gdw", "no GDW guarantee here (n > 2, not special-Berwald, not Douglas); residual " + std::to_string(gdw.residual));
    out.skip("gdw_witness", "as gdw");
  }

  if (special) {
    out.landsberg = landsberg_relations(geo, out.fit);
    out.lambda_vertical = lambda_vertical_relation(geo);
  }
  out.iso = flag_isotropy(metric, p.x, iso_seed);
  if (n >= 2) {
    out.set("lambda_prime", lambda_prime_check(geo));
    out.set("stretch_mu", stretch_mu_check(geo));
    out.set("mu_prime_isotropic", theorem2_relation(geo, out.iso));
    out.set("cartan_reducible_trace", cartan_reducible_trace(geo));
  } else {
    for (const char* name : {"lambda_prime", "stretch_mu", "mu_prime_isotropic", "cartan_reducible_trace"}) out.skip(name, "needs n >= 2");
  }
  if (out.iso.isotropic) {
    out.set("isotropic_riemann", isotropic_riemann_residual(geo, out.iso.K));
    out.set("isotropic_berwald", isotropic_berwald_residual(geo, out.iso.K));
  } else {
    out.skip("isotropic_riemann", "flag curvature is not isotropic at x");
    out.skip("isotropic_berwald", "flag curvature is not isotropic at x");
  }
  return out;
}

} // namespace

Eigen::VectorXd sample_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-8);
  return v.normalized() * scale(rng);
}

Eigen::VectorXd sample_position(const Metric& metric, std::mt19937_64& rng) {
  const int n = metric.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (auto r = metric.sampling_radius()) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    do {
      for (int i = 0; i < n; ++i) v[i] = normal(rng);
    } while (v.norm() < 1e-8);
    return v.normalized() * (*r * std::pow(unit(rng), 1.0 / n));
  }
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = unit(rng) - 0.5;
  return x;
}

std::vector<EvalPoint> sample_points(const Metric& metric, int count, unsigned long long seed) {
  if (count < 1) throw ValidationError("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<EvalPoint> pts;
  for (int s = 0; s < count; ++s) {
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
      EvalPoint p{sample_position(metric, rng), sample_direction(metric.dim(), rng)};
      if (!metric.is_valid(p)) continue;
      try {
        fundamental_tensor(metric, p);
      } catch (const Error&) {
        continue;
      }
      pts.push_back(std::move(p));
      accepted = true;
    }
    if (!accepted) throw DomainError("no valid sample point after 100 draws");
  }
  return pts;
}

Metric load_metric(const std::string& name_or_path, int dim) {
  if (is_builtin(name_or_path)) return Metric(builtin_spec(name_or_path, dim));
  if (!std::filesystem::exists(name_or_path)) throw ValidationError("'" + name_or_path + "' is neither a built-in metric nor a readable file");
  return Metric(load_metric_spec(name_or_path));
}

CheckReport run_checks(const RunConfig& config) { return run_checks(load_metric(config.metric, config.dim), config); }

CheckReport run_checks(const Metric& metric, const RunConfig& config) {
  const auto& cat = check_catalog();
  for (const auto& [name, tol] : config.tolerances) {
    catalog_index(name);
    if (!(tol >= 0.0)) throw ValidationError("tolerance for '" + name + "' must be non-negative");
  }

  CheckReport rep;
  rep.config = config;
  rep.metric = metric.spec();
  rep.samples = sample_points(metric, config.samples, config.seed);
  const std::size_t ns = rep.samples.size();

  std::vector<SampleOutcome> outcomes(ns);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s; (s = next++) < ns;) {
      try {
        outcomes[s] = evaluate_sample(metric, rep.samples[s], flag_seed(config.seed, s));
      } catch (...) {
        outcomes[s].error = std::current_exception();
      }
    }
  };
  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(ns));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& o : outcomes)
    if (o.error) std::rethrow_exception(o.error);

  // Assemble in sample order.
  for (std::size_t c = 0; c < cat.size(); ++c) {
    CheckRecord rec;
    rec.name = cat[c].name;
    rec.anchor = cat[c].anchor;
    auto it = config.tolerances.find(rec.name);
    rec.tolerance = it != config.tolerances.end() ? it->second : cat[c].tolerance;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& r = outcomes[s].residual[c];
      if (r) {
        ++rec.applicable_samples;
        rec.max_residual = std::max(rec.max_residual, std::isnan(*r) ? INFINITY : *r);
      } else if (rec.note.empty()) {
        rec.note = "sample " + std::to_string(s) + ": " + outcomes[s].reason[c];
      }
    }
    rec.applicable = rec.applicable_samples > 0;
    rep.checks.push_back(rec);
  }

  // L = 0 iff J = 0 is a statement about the whole sample set.
  {
    bool all_special = true;
    std::string why;
    for (std::size_t s = 0; s < ns && all_special; ++s)
      if (!outcomes[s].fit_available || !outcomes[s].fit.special()) {
        all_special = false;
        why = "sample " + std::to_string(s) + " fails the special-Berwald fit";
      }
    for (const char* name : {"landsberg_mu_form", "mean_landsberg_mu_form", "landsberg_equivalence"}) {
      CheckRecord& rec = rep.checks[catalog_index(name)];
      rec.applicable = all_special;
      rec.applicable_samples = all_special ? static_cast<int>(ns) : 0;
      rec.note = why;
    }
    if (all_special) {
      const double shared = rep.checks[catalog_index("landsberg_mu_form")].tolerance;
      for (const auto& o : outcomes) {
        auto& a = rep.checks[catalog_index("landsberg_mu_form")];
        auto& b = rep.checks[catalog_index("mean_landsberg_mu_form")];
        a.max_residual = std::max(a.max_residual, o.landsberg.landsberg_form);
        b.max_residual = std::max(b.max_residual, o.landsberg.mean_landsberg_form);
        if ((o.landsberg.L_norm < shared) != (o.landsberg.J_norm < shared))
          rep.checks[catalog_index("landsberg_equivalence")].max_residual += 1.0;
      }
    }
  }

  rep.pass = true;
  for (auto& rec : rep.checks) {
    rec.pass = !rec.applicable || rec.max_residual <= rec.tolerance;
    if (rec.applicable && !rec.pass) rep.pass = false;
  }

  // Properties: classification, not verdicts.
  nlohmann::json props;
  nlohmann::json preds = nlohmann::json::object();
  for (std::size_t k = 0; k < outcomes.front().preds.size(); ++k) {
    double worst = 0.0;
    bool all = true;
    for (const auto& o : outcomes) {
      worst = std::max(worst, o.preds[k].residual);
      all = all && o.preds[k].holds;
    }
    preds[outcomes.front().preds[k].name] = {{"holds", all}, {"max_residual", worst}};
  }
  props["predicates"] = preds;
  if (metric.dim() >= 2) {
    double worst = 0.0;
    int special = 0;
    std::optional<double> lv;
    for (const auto& o : outcomes) {
      worst = std::max(worst, o.fit.residual);
      special += o.fit.special();
      if (o.lambda_vertical) lv = std::max(lv.value_or(0.0), *o.lambda_vertical);
    }
    props["special_berwald"] = {{"max_residual", worst}, {"special_samples", special}, {"threshold", SpecialBerwaldFit::kThreshold}};
    props["lambda_vertical_relation"] = lv ? nlohmann::json(*lv) : nlohmann::json(nullptr);
  }
  {
    int iso = 0;
    double kmin = INFINITY, kmax = -INFINITY, spread = 0.0;
    for (const auto& o : outcomes) {
      iso += o.iso.isotropic;
      kmin = std::min(kmin, o.iso.K);
      kmax = std::max(kmax, o.iso.K);
      spread = std::max(spread, o.iso.spread);
    }
    props["flag_curvature"] = {{"isotropic_samples", iso}, {"mean_K_min", kmin}, {"mean_K_max", kmax}, {"max_spread", spread}};
  }
  rep.properties = props;
  return rep;
}

namespace {

nlohmann::json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json tensor_json(const Tensor<double>& t) {
  std::string v;
  for (Slot s : t.valence()) v += s == Slot::upper ? 'u' : 'l';
  return {{"valence", v}, {"entries", t.data()}};
}

} // namespace

nlohmann::json to_json(const CheckReport& rep, bool with_metadata) {
  nlohmann::json j;
  j["config"] = {{"metric", rep.config.metric},
                 {"dim", rep.config.dim},
                 {"samples", rep.config.samples},
                 {"seed", rep.config.seed},
                 {"tolerances", rep.config.tolerances}};
  j["metric"] = to_document(rep.metric);
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t s = 0; s < rep.samples.size(); ++s)
    samples.push_back({{"index", s}, {"x", vec(rep.samples[s].x)}, {"y", vec(rep.samples[s].y)}});
  j["samples"] = samples;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json r = {{"name", c.name},
                        {"paper_anchor", c.anchor},
                        {"max_residual", c.max_residual},
                        {"tolerance", c.tolerance},
                        {"applicable", c.applicable},
                        {"applicable_samples", c.applicable_samples},
                        {"pass", c.pass}};
    if (!c.note.empty()) r["note"] = c.note;
    checks.push_back(r);
  }
  j["checks"] = checks;
  j["properties"] = rep.properties;
  j["verdict"] = rep.pass ? "pass" : "fail";
  if (with_metadata) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    j["metadata"] = {{"generated_at", ts.str()}, {"threads", rep.config.threads}};
  }
  return j;
}

std::string format_human(const CheckReport& rep) {
  std::vector<const CheckRecord*> order;
  for (const auto& c : rep.checks) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const CheckRecord* a, const CheckRecord* b) {
    if (a->applicable != b->applicable) return a->applicable;
    return a->max_residual > b->max_residual;
  });
  std::ostringstream out;
  out << "metric " << rep.metric.name << " (" << to_string(rep.metric.kind) << ", n=" << rep.metric.dimension << "), "
      << rep.samples.size() << " samples, seed " << rep.config.seed << "\n\n";
  out << std::left << std::setw(28) << "check" << std::setw(8) << "status" << std::setw(14) << "max residual" << std::setw(10)
      << "tolerance" << "identity\n";
  out << std::scientific << std::setprecision(2);
  for (const CheckRecord* c : order) {
    out << std::setw(28) << c->name << std::setw(8) << (!c->applicable ? "n/a" : c->pass ? "ok" : "FAIL");
    if (c->applicable)
      out << std::setw(14) << c->max_residual << std::setw(10) << c->tolerance;
    else
      out << std::setw(14) << "-" << std::setw(10) << c->tolerance;
    out << c->anchor << "\n";
  }
  out << "\nproperties: " << rep.properties.dump() << "\n";
  out << "verdict: " << (rep.pass ? "pass" : "FAIL") << "\n";
  return out.str();
}

nlohmann::json tensor_dump(const Metric& metric, const EvalPoint& p) {
  const Geometry geo(metric, p, kBianchiOrder);
  nlohmann::json j;
  j["index_order"] =
      "row-major, first written index varies slowest; the upper index of a mixed tensor comes first "
      "(B^i_jkl at ((i*n + j)*n + k)*n + l); valence letters u/l mark upper/lower slots";
  j["metric"] = metric.name();
  j["x"] = vec(p.x);
  j["y"] = vec(p.y);
  j["F"] = std::sqrt(geo.F2().value());
  nlohmann::json t;
  const std::pair<const char*, const Field*> fields[] = {
      {"g", &geo.g()},         {"g_inv", &geo.g_inv()},      {"h", &geo.h()},
      {"G", &geo.spray()},     {"N", &geo.nonlinear_connection()}, {"Gamma", &geo.berwald_connection()},
      {"C", &geo.cartan()},    {"I", &geo.mean_cartan()},    {"M", &geo.matsumoto()},
      {"B", &geo.berwald()},   {"E", &geo.mean_berwald()},   {"D", &geo.douglas()},
      {"L", &geo.landsberg()}, {"J", &geo.mean_landsberg()}, {"R", &geo.riemann()},
      {"R4", &geo.hh_curvature()}, {"H", &geo.h_curvature()}, {"Sigma", &geo.stretch()},
  };
  for (const auto& [name, f] : fields) t[name] = tensor_json(value(*f));
  j["tensors"] = t;
  return j;
}

} // namespace finsler
