// finslab: curvature checks for Finsler metrics on a coordinate chart.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsler/classifier.hpp"
#include "finsler/errors.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/report.hpp"

using namespace finsler;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, numeric_error = 3 };

Eigen::VectorXd to_eigen(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw ValidationError(std::string(what) + " needs " + std::to_string(n) + " components, got " + std::to_string(v.size()));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--tol expects name=value, got '" + item + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("--tol value for '" + item.substr(0, eq) + "' is not a number");
    }
    out[item.substr(0, eq)] = v;
  }
  return out;
}

void emit(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream f(*path);
  if (!f) throw ValidationError("cannot write " + *path);
  f << text;
}

nlohmann::json fit_json(const SpecialBerwaldFit& fit, const EvalPoint& p) {
  return {{"x", std::vector<double>(p.x.data(), p.x.data() + p.x.size())},
          {"y", std::vector<double>(p.y.data(), p.y.data() + p.y.size())},
          {"mu", std::vector<double>(fit.mu.data(), fit.mu.data() + fit.mu.size())},
          {"lambda", fit.lambda},
          {"residual", fit.residual},
          {"special", fit.special()}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finslab: curvature tensors and identity checks for Finsler metrics"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> tol_items;
  std::vector<double> xs, ys, x0, y0;
  double T = 1.0;
  int steps = 2000;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metric, "built-in name or .toml/.json spec file")->required();
    sub->add_option("--dim", cfg.dim, "dimension for built-in metrics")->check(CLI::Range(1, 6));
    sub->add_option("--out", cfg.out, "output file (default stdout)");
  };

  auto* check = app.add_subcommand("check", "run the identity suite over sampled points");
  add_common(check);
  check->add_option("--samples", cfg.samples, "sampled (x, y) points")->check(CLI::PositiveNumber);
  check->add_option("--seed", cfg.seed, "sampling seed");
  check->add_option("--tol", tol_items, "override a tolerance, name=value (repeatable)");
  check->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"human", "json"}));
  check->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");

  auto* tensors = app.add_subcommand("tensors", "dump every curvature tensor at one point as JSON");
  add_common(tensors);
  tensors->add_option("--x", xs)->delimiter(',')->required();
  tensors->add_option("--y", ys)->delimiter(',')->required();

  auto* geo = app.add_subcommand("geodesic", "integrate x'' + 2G(x') = 0 and write t x v F rows");
  add_common(geo);
  geo->add_option("--x0", x0)->delimiter(',')->required();
  geo->add_option("--y0", y0)->delimiter(',')->required();
  geo->add_option("--T", T, "final time");
  geo->add_option("--steps", steps, "RK4 steps")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit-special", "fit mu and lambda at a point or at sampled points");
  add_common(fit);
  fit->add_option("--x", xs)->delimiter(',');
  fit->add_option("--y", ys)->delimiter(',');
  fit->add_option("--samples", cfg.samples, "sampled points when --x/--y are absent")->check(CLI::PositiveNumber);
  fit->add_option("--seed", cfg.seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (check->parsed()) {
      cfg.tolerances = parse_tolerances(tol_items);
      const CheckReport rep = run_checks(cfg);
      emit(cfg.format == "json" ? to_json(rep).dump(2) + "\n" : format_human(rep), cfg.out);
      return rep.pass ? ok : check_failed;
    }
    const Metric metric = load_metric(cfg.metric, cfg.dim);
    const int n = metric.dim();
    if (tensors->parsed()) {
      const EvalPoint p{to_eigen(xs, n, "--x"), to_eigen(ys, n, "--y")};
      emit(tensor_dump(metric, p).dump(2) + "\n", cfg.out);
      return ok;
    }
    if (geo->parsed()) {
      const Trajectory tr = geodesic(metric, to_eigen(x0, n, "--x0"), to_eigen(y0, n, "--y0"), T, steps);
      std::ostringstream rows;
      write_trajectory(rows, tr);
      emit(rows.str(), cfg.out);
      std::ostream& summary = cfg.out ? std::cout : std::cerr;
      summary << "F drift " << std::scientific << std::setprecision(3) << tr.F_drift() << " over t in [0, " << tr.last_valid_t << "]\n";
      if (tr.domain_exit) {
        std::cerr << "domain exit after t = " << tr.last_valid_t << ": " << *tr.domain_exit << "\n";
        return numeric_error;
      }
      return ok;
    }
    if (fit->parsed()) {
      nlohmann::json out = nlohmann::json::array();
      if (!xs.empty() || !ys.empty()) {
        const EvalPoint p{to_eigen(xs, n, "--x"), to_eigen(ys, n, "--y")};
        out.push_back(fit_json(fit_special_berwald(metric, p), p));
      } else {
        for (const auto& p : sample_points(metric, cfg.samples, cfg.seed)) out.push_back(fit_json(fit_special_berwald(metric, p), p));
      }
      emit(out.dump(2) + "\n", cfg.out);
      return ok;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const DomainError& e) {
    std::cerr << "numerical domain error: " << e.what() << "\n";
    return numeric_error;
  } catch (const DegenerateError& e) {
    std::cerr << "numerical domain error: " << e.what() << "\n";
    return numeric_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_error;
  }
  return ok;
}
