#include "finsler/metric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>

#include "finsler/errors.hpp"
#include "finsler/spec_file.hpp"

namespace finsler {

std::string to_string(MetricKind kind) {
  switch (kind) {
  case MetricKind::euclidean: return "euclidean";
  case MetricKind::riemannian: return "riemannian";
  case MetricKind::randers: return "randers";
  case MetricKind::funk: return "funk";
  case MetricKind::custom: return "custom";
  }
  return "unknown";
}

MetricKind metric_kind_from_string(std::string_view name) {
  for (auto k : {MetricKind::euclidean, MetricKind::riemannian, MetricKind::randers, MetricKind::funk, MetricKind::custom})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown metric kind '" + std::string(name) + "'");
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return false;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const double threshold = 1e-10 * m.diagonal().cwiseAbs().maxCoeff();
  const Eigen::VectorXd d = ldlt.vectorD();
  return (d.array() > threshold).all();
}

// ---------------------------------------------------------------------------
// built-in fixtures

namespace {

std::string var(char g, int i) { return std::string(1, g) + std::to_string(i + 1); }

std::vector<std::vector<std::string>> diagonal(int n, const std::string& entry) {
  std::vector<std::vector<std::string>> a(static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n), "0"));
  for (int i = 0; i < n; ++i) a[i][i] = entry;
  return a;
}

} // namespace

std::vector<std::string> builtin_names() {
  return {"euclidean", "conformal", "sphere", "randers", "randers-closed", "randers-twisted", "funk", "berwald-product"};
}

bool is_builtin(std::string_view name) {
  for (const auto& b : builtin_names())
    if (b == name) return true;
  return false;
}

MetricSpec builtin_spec(std::string_view name, int n) {
  if (n < 1 || n > 6) throw ValidationError("dimension must be between 1 and 6");
  MetricSpec s;
  s.name = std::string(name);
  s.dimension = n;
  if (name == "euclidean") {
    s.kind = MetricKind::euclidean;
  } else if (name == "conformal") {
    s.kind = MetricKind::riemannian;
    s.a = diagonal(n, "1 + 0.5*norm2(x)");
  } else if (name == "sphere") {
    // Stereographic chart of the unit sphere: sectional curvature 1.
    s.kind = MetricKind::riemannian;
    s.a = diagonal(n, "1/(1 + 0.25*norm2(x))^2");
  } else if (name == "randers" || name == "randers-closed" || name == "randers-twisted") {
    if (n < 2) throw ValidationError("Randers fixtures need dimension >= 2");
    s.kind = MetricKind::randers;
    s.b.resize(static_cast<std::size_t>(n));
    if (name == "randers") {
      s.a = diagonal(n, "1 + 0.1*norm2(x)");
      s.b[0] = "0.2 - 0.1*x2";
      s.b[1] = "0.1*x1";
      for (int i = 2; i < n; ++i) s.b[i] = "0.05*x1*" + var('x', i);
    } else if (name == "randers-closed") {
      // b = grad(0.1*x1 + 0.05*|x|^2)
      s.a = diagonal(n, "1");
      for (int i = 0; i < n; ++i) s.b[i] = "0.1*" + var('x', i) + (i == 0 ? " + 0.1" : "");
    } else {
      s.a.assign(static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          s.a[i][j] = (i == j ? "1 + " : "") + std::string("0.1*") + var('x', i) + "*" + var('x', j);
      for (int i = 0; i < n; ++i) s.b[i] = "0.15*" + var('x', (i + 1) % n) + " - 0.05*" + var('x', i) + "^2" + (i == 0 ? " + 0.1" : "");
    }
  } else if (name == "funk") {
    s.kind = MetricKind::funk;
    s.domain_radius = 1.0;
  } else if (name == "berwald-product") {
    // Riemannian line times a Minkowski plane: Berwald, not Riemannian.
    if (n < 3) throw ValidationError("berwald-product needs dimension >= 3");
    s.kind = MetricKind::custom;
    std::string quad = "(1 + x1^2)*y1^2";
    std::string quartic;
    for (int i = 1; i < n; ++i) {
      quad += " + " + var('y', i) + "^2";
      quartic += (i > 1 ? " + " : "") + var('y', i) + "^4";
    }
    s.F = "sqrt(" + quad + " + 0.5*sqrt(" + quartic + "))";
  } else {
    throw ValidationError("unknown built-in metric '" + std::string(name) + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// spec documents

MetricSpec metric_spec_from_document(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("metric spec must be a key-value document");
    MetricSpec s;
    s.kind = metric_kind_from_string(doc.at("kind").get<std::string>());
    s.dimension = static_cast<int>(doc.at("dimension").get<double>());
    s.name = doc.value("name", to_string(s.kind));
    auto as_expr = [](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
      }
      throw ValidationError("expected an expression string or number");
    };
    if (doc.contains("a"))
      for (const auto& row : doc.at("a")) {
        std::vector<std::string> r;
        for (const auto& e : row) r.push_back(as_expr(e));
        s.a.push_back(std::move(r));
      }
    if (doc.contains("b"))
      for (const auto& e : doc.at("b")) s.b.push_back(as_expr(e));
    if (doc.contains("F")) s.F = doc.at("F").get<std::string>();
    if (doc.contains("domain_radius")) s.domain_radius = doc.at("domain_radius").get<double>();
    for (const auto& [key, _] : doc.items())
      if (key != "kind" && key != "dimension" && key != "name" && key != "a" && key != "b" && key != "F" && key != "domain_radius")
        throw ValidationError("unknown key '" + key + "' in metric spec");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metric spec: ") + e.what());
  }
}

nlohmann::json to_document(const MetricSpec& s) {
  nlohmann::json doc;
  doc["name"] = s.name;
  doc["kind"] = to_string(s.kind);
  doc["dimension"] = s.dimension;
  if (!s.a.empty()) doc["a"] = s.a;
  if (!s.b.empty()) doc["b"] = s.b;
  if (!s.F.empty()) doc["F"] = s.F;
  if (s.domain_radius) doc["domain_radius"] = *s.domain_radius;
  return doc;
}

MetricSpec load_metric_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open metric spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json doc;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("malformed JSON metric spec: " + std::string(e.what()));
    }
  } else {
    doc = parse_toml_document(text);
  }
  MetricSpec s = metric_spec_from_document(doc);
  if (!doc.contains("name")) {
    auto slash = path.find_last_of('/');
    s.name = slash == std::string::npos ? path : path.substr(slash + 1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Metric

namespace {

template <typename T>
T root(const T& a) {
  if (a < T(0)) throw DomainError("sqrt of a negative value");
  using std::sqrt;
  return sqrt(a);
}

template <>
Jet root(const Jet& a) {
  return sqrt(a);
}

Expression parse_checked(const std::string& text, const std::string& what, int n, bool allow_y) {
  Expression e;
  try {
    e = parse_expression(text);
  } catch (const ParseError& err) {
    throw ValidationError(what + ": " + err.what());
  }
  if (e.max_index(Expression::Group::x) > n || e.max_index(Expression::Group::y) > n)
    throw ValidationError(what + ": variable index exceeds dimension " + std::to_string(n));
  if (!allow_y && e.depends_on(Expression::Group::y)) throw ValidationError(what + ": must depend on x only");
  return e;
}

} // namespace

Metric::Metric(MetricSpec spec) : spec_(std::move(spec)) {
  const int n = spec_.dimension;
  if (n < 1 || n > 6) throw ValidationError("dimension must be between 1 and 6");
  if (spec_.name.empty()) spec_.name = to_string(spec_.kind);
  if (spec_.domain_radius && !(*spec_.domain_radius > 0.0)) throw ValidationError("domain_radius must be positive");

  const bool needs_a = spec_.kind == MetricKind::riemannian || spec_.kind == MetricKind::randers;
  if (needs_a) {
    if (static_cast<int>(spec_.a.size()) != n) throw ValidationError("a must be an n x n matrix of expressions");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(spec_.a[i].size()) != n) throw ValidationError("a must be an n x n matrix of expressions");
      std::vector<Expression> row;
      for (int j = 0; j < n; ++j)
        row.push_back(parse_checked(spec_.a[i][j], "a[" + std::to_string(i) + "][" + std::to_string(j) + "]", n, false));
      a_.push_back(std::move(row));
    }
  } else if (!spec_.a.empty()) {
    throw ValidationError("a is only meaningful for riemannian and randers metrics");
  }
  if (spec_.kind == MetricKind::randers) {
    if (static_cast<int>(spec_.b.size()) != n) throw ValidationError("b must have n expressions");
    for (int i = 0; i < n; ++i) b_.push_back(parse_checked(spec_.b[i], "b[" + std::to_string(i) + "]", n, false));
  } else if (!spec_.b.empty()) {
    throw ValidationError("b is only meaningful for randers metrics");
  }
  if (spec_.kind == MetricKind::custom) {
    if (spec_.F.empty()) throw ValidationError("custom metrics need an F expression");
    f_ = parse_checked(spec_.F, "F", n, true);
  } else if (!spec_.F.empty()) {
    throw ValidationError("F is only meaningful for custom metrics");
  }

  // Probe the metric at the centre and along the axes of the sampling region.
  const double r = 0.5 * sampling_radius().value_or(1.0);
  std::vector<Eigen::VectorXd> probes{Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < n; ++i)
    for (double s : {-r, r}) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x[i] = s;
      probes.push_back(x);
    }
  for (const auto& x : probes) {
    try {
      validate_position(x);
      if (spec_.kind == MetricKind::riemannian) {
        const Eigen::MatrixXd a = a_matrix(x);
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
          throw ValidationError("a(x) is not symmetric");
      }
      if (spec_.kind == MetricKind::custom)
        for (int i = 0; i < n; ++i) {
          EvalPoint p{x, Eigen::VectorXd::Unit(n, i) + 0.3 * Eigen::VectorXd::Ones(n)};
          check_homogeneity(p);
        }
    } catch (const DomainError& e) {
      throw ValidationError("metric '" + spec_.name + "' fails validation: " + e.what());
    }
  }
}

std::optional<double> Metric::domain_radius() const {
  if (spec_.kind == MetricKind::funk) return std::min(1.0, spec_.domain_radius.value_or(1.0));
  return spec_.domain_radius;
}

std::optional<double> Metric::sampling_radius() const {
  if (auto r = domain_radius()) return 0.9 * *r;
  return std::nullopt;
}

Eigen::MatrixXd Metric::a_matrix(const Eigen::VectorXd& x) const {
  const int n = dim();
  if (a_.empty()) return Eigen::MatrixXd::Identity(n, n);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = a_[i][j].evaluate<double>(xs, xs);
  return a;
}

Eigen::VectorXd Metric::b_vector(const Eigen::VectorXd& x) const {
  const int n = dim();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  for (int i = 0; i < static_cast<int>(b_.size()); ++i) b[i] = b_[i].evaluate<double>(xs, xs);
  return b;
}

double Metric::randers_b_norm(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd b = b_vector(x);
  return std::sqrt(b.dot(a_matrix(x).ldlt().solve(b)));
}

void Metric::validate_position(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DomainError("position has dimension " + std::to_string(x.size()) + ", metric has " + std::to_string(dim()));
  if (!x.allFinite()) throw DomainError("position is not finite");
  if (auto r = domain_radius(); r && !(x.norm() < *r))
    throw DomainError("position |x| = " + std::to_string(x.norm()) + " outside the domain ball of radius " + std::to_string(*r));
  if (spec_.kind == MetricKind::riemannian || spec_.kind == MetricKind::randers) {
    if (!is_positive_definite(a_matrix(x))) throw DomainError("a(x) is not positive definite");
  }
  if (spec_.kind == MetricKind::randers) {
    const double b = randers_b_norm(x);
    if (!(b < 1.0)) throw DomainError("Randers condition violated: b = " + std::to_string(b) + " >= 1");
  }
}

void Metric::check_homogeneity(const EvalPoint& p) const {
  const double f = F<double>(std::span<const double>(p.x.data(), p.x.size()), std::span<const double>(p.y.data(), p.y.size()));
  if (!(f > 0.0)) throw DomainError("F is not positive");
  for (double t : {0.5, 2.0, 3.0}) {
    const Eigen::VectorXd ty = t * p.y;
    const double ft = F<double>(std::span<const double>(p.x.data(), p.x.size()), std::span<const double>(ty.data(), ty.size()));
    if (std::abs(ft - t * f) > 1e-10 * t * f) throw DomainError("F is not positively 1-homogeneous in y");
  }
}

void Metric::validate(const EvalPoint& p) const {
  if (p.y.size() != dim()) throw DomainError("direction has the wrong dimension");
  if (!p.y.allFinite() || !(p.y.norm() > 1e-12)) throw DomainError("direction y must be non-zero");
  validate_position(p.x);
  if (spec_.kind == MetricKind::custom) check_homogeneity(p);
}

bool Metric::is_valid(const EvalPoint& p) const noexcept {
  try {
    validate(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

template <typename T>
T Metric::F(std::span<const T> x, std::span<const T> y) const {
  const int n = dim();
  switch (spec_.kind) {
  case MetricKind::euclidean:
  case MetricKind::riemannian:
    return root(F2(x, y));
  case MetricKind::randers: {
    T alpha2(0), beta(0);
    for (int i = 0; i < n; ++i) {
      beta = beta + b_[i].evaluate(x, y) * y[i];
      for (int j = 0; j < n; ++j) alpha2 = alpha2 + a_[i][j].evaluate(x, y) * y[i] * y[j];
    }
    return root(alpha2) + beta;
  }
  case MetricKind::funk: {
    T xx(0), yy(0), xy(0);
    for (int i = 0; i < n; ++i) {
      xx = xx + x[i] * x[i];
      yy = yy + y[i] * y[i];
      xy = xy + x[i] * y[i];
    }
    const T denom = T(1) - xx;
    return (root(yy - (xx * yy - xy * xy)) + xy) / denom;
  }
  case MetricKind::custom:
    return f_.evaluate(x, y);
  }
  throw Error("unknown metric kind");
}

template <typename T>
T Metric::F2(std::span<const T> x, std::span<const T> y) const {
  const int n = dim();
  switch (spec_.kind) {
  case MetricKind::euclidean: {
    T s(0);
    for (int i = 0; i < n; ++i) s = s + y[i] * y[i];
    return s;
  }
  case MetricKind::riemannian: {
    T s(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s = s + a_[i][j].evaluate(x, y) * y[i] * y[j];
    return s;
  }
  default: {
    const T f = F(x, y);
    return f * f;
  }
  }
}

template double Metric::F(std::span<const double>, std::span<const double>) const;
template long double Metric::F(std::span<const long double>, std::span<const long double>) const;
template Jet Metric::F(std::span<const Jet>, std::span<const Jet>) const;
template double Metric::F2(std::span<const double>, std::span<const double>) const;
template long double Metric::F2(std::span<const long double>, std::span<const long double>) const;
template Jet Metric::F2(std::span<const Jet>, std::span<const Jet>) const;

Jet Metric::F2_jet(const EvalPoint& p, int order) const {
  const auto vars = lift_all(p, order);
  std::span<const Jet> all(vars);
  const auto n = static_cast<std::size_t>(dim());
  return F2(all.first(n), all.subspan(n));
}

ScalarField Metric::F2_field() const {
  return [this](std::span<const Jet> vars) {
    const auto n = static_cast<std::size_t>(dim());
    return F2(vars.first(n), vars.subspan(n));
  };
}

double evaluate_F(const Metric& metric, const EvalPoint& p) {
  if (p.x.size() != metric.dim() || p.y.size() != metric.dim()) throw DomainError("point dimension mismatch");
  metric.validate(p);
  std::span<const double> x(p.x.data(), p.x.size()), y(p.y.data(), p.y.size());
  return metric.F(x, y);
}

Tensor<double> fundamental_tensor(const Metric& metric, const EvalPoint& p) {
  metric.validate(p);
  const int n = metric.dim();
  const Jet f2 = metric.F2_jet(p, 2);
  Tensor<double> g(n, valence("ll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 0.5 * f2.partial(y_derivative(n, {i, j}));
  if (!is_positive_definite(to_matrix(g))) throw DegenerateError("fundamental tensor is not positive definite at this point");
  g.anchor(p);
  return g;
}

Tensor<double> angular_metric(const Metric& metric, const EvalPoint& p) {
  const Tensor<double> g = fundamental_tensor(metric, p);
  const int n = metric.dim();
  const Eigen::VectorXd yl = to_matrix(g) * p.y;
  const double f2 = p.y.dot(yl);
  Tensor<double> h = g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) -= yl[i] * yl[j] / f2;
  return h;
}

} // namespace finsler
