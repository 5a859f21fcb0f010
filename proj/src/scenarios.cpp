#include "kclind/scenarios.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace kclind {

namespace {

using nlohmann::json;

// Index-addressed work queue; results land in preallocated slots, so the
// output is identical for any thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Reported times are gamma*t; pick the first positive rate as the unit.
double time_unit(const TwoQubitConfig& m) {
  if (m.gamma_a > 0.0) return m.gamma_a;
  if (m.gamma_b > 0.0) return m.gamma_b;
  return 1.0;
}

// The y-polarized Bloch pair rho_y (x) rho_y used by the undriven
// scenarios: rho_y = (I + lambda sigma_y)/2, i.e. theta = phi = pi/2.
DensityMatrix y_bloch_pair(double lambda) {
  const BlochParams p{lambda, M_PI / 2.0, M_PI / 2.0};
  return product_state(bloch_state(p), bloch_state(p));
}

void append_coherence(std::vector<double>& row, const Matrix& m, Index i, Index j) {
  row.push_back(m(i, j).real());
  row.push_back(m(i, j).imag());
}

std::vector<std::string> correlation_trajectory_columns() {
  return {"gamma_t",       "pop_pp",        "pop_pm",        "pop_mp",
          "pop_mm",        "coh_pp_pm_re",  "coh_pp_pm_im",  "coh_pp_mp_re",
          "coh_pp_mp_im",  "coh_pp_mm_re",  "coh_pp_mm_im",  "coh_pm_mp_re",
          "coh_pm_mp_im",  "coh_pm_mm_re",  "coh_pm_mm_im",  "coh_mp_mm_re",
          "coh_mp_mm_im",  "concurrence",   "classical",     "discord"};
}

json base_summary(const ScenarioConfig& cfg, const CsvTable& table) {
  json j;
  j["scenario"] = scenario_name(cfg.scenario);
  j["rows"] = table.rows.size();
  j["columns"] = table.columns;
  return j;
}

// fig2-style table: populations, coherences and the three correlation
// measures along one trajectory.
ScenarioResult run_correlation_trajectory(const ScenarioConfig& cfg,
                                          const DensityMatrix& initial) {
  const Superoperator liou = build_liouvillian(build_two_qubit_model(cfg.model));
  const Trajectory traj =
      propagate(liou, initial, time_grid(cfg.t_max, cfg.n_points));
  const double unit = time_unit(cfg.model);

  std::vector<CorrelationReport> reports(traj.states.size());
  parallel_for(traj.states.size(), cfg.threads, [&](std::size_t i) {
    reports[i] = correlation_report(traj.states[i], cfg.measurement_side);
  });

  CsvTable table;
  table.columns = correlation_trajectory_columns();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Matrix& m = traj.states[i].matrix();
    std::vector<double> row;
    row.push_back(unit * traj.times[i]);
    for (Index d = 0; d < 4; ++d) row.push_back(m(d, d).real());
    for (Index a = 0; a < 4; ++a) {
      for (Index b = a + 1; b < 4; ++b) append_coherence(row, m, a, b);
    }
    row.push_back(reports[i].concurrence);
    row.push_back(reports[i].classical);
    row.push_back(reports[i].discord);
    table.rows.push_back(std::move(row));
  }

  json j = base_summary(cfg, table);
  j["final_concurrence"] = reports.back().concurrence;
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_fig1(const ScenarioConfig& cfg) {
  const Superoperator liou = build_liouvillian(build_two_qubit_model(cfg.model));
  const std::vector<double> grid = time_grid(cfg.t_max, cfg.n_points);
  const double unit = time_unit(cfg.model);

  CsvTable table;
  table.columns = {"gamma_t", "lambda", "concurrence"};
  json lambdas = json::array();
  for (double lambda : cfg.lambda_grid) {
    const Trajectory traj = propagate(liou, y_bloch_pair(lambda), grid);
    std::vector<double> conc(traj.states.size());
    parallel_for(traj.states.size(), cfg.threads,
                 [&](std::size_t i) { conc[i] = concurrence(traj.states[i]); });
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      table.rows.push_back({unit * traj.times[i], lambda, conc[i]});
    }
    lambdas.push_back(lambda);
  }

  json j = base_summary(cfg, table);
  j["lambda_grid"] = lambdas;
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_fig4(const ScenarioConfig& cfg) {
  const Superoperator liou = build_liouvillian(build_two_qubit_model(cfg.model));
  const Trajectory traj = propagate(liou, build_initial_state(cfg.initial),
                                    time_grid(cfg.t_max, cfg.n_points));
  const double unit = time_unit(cfg.model);

  CsvTable table;
  table.columns = {"gamma_t",
                   "pop_pp",
                   "pop_psi_plus",
                   "pop_psi_minus",
                   "pop_mm",
                   "coh_pp_psi_plus_re",
                   "coh_pp_psi_plus_im",
                   "coh_pp_psi_minus_re",
                   "coh_pp_psi_minus_im",
                   "coh_pp_mm_re",
                   "coh_pp_mm_im",
                   "coh_psi_plus_psi_minus_re",
                   "coh_psi_plus_psi_minus_im",
                   "coh_psi_plus_mm_re",
                   "coh_psi_plus_mm_im",
                   "coh_psi_minus_mm_re",
                   "coh_psi_minus_mm_im"};
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Matrix mc = to_collective_basis(traj.states[i].matrix());
    std::vector<double> row;
    row.push_back(unit * traj.times[i]);
    for (Index d = 0; d < 4; ++d) row.push_back(mc(d, d).real());
    for (Index a = 0; a < 4; ++a) {
      for (Index b = a + 1; b < 4; ++b) append_coherence(row, mc, a, b);
    }
    table.rows.push_back(std::move(row));
  }

  json j = base_summary(cfg, table);
  j["final_pop_pp"] = table.rows.back()[1];
  j["final_coh_pp_mm_re"] = table.rows.back()[9];
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_fig5(const ScenarioConfig& cfg) {
  const Superoperator liou = build_liouvillian(build_two_qubit_model(cfg.model));
  const Trajectory traj = propagate(liou, build_initial_state(cfg.initial),
                                    time_grid(cfg.t_max, cfg.n_points));
  const double unit = time_unit(cfg.model);

  std::vector<CorrelationReport> reports(traj.states.size());
  parallel_for(traj.states.size(), cfg.threads, [&](std::size_t i) {
    reports[i] = correlation_report(traj.states[i], cfg.measurement_side);
  });

  CsvTable table;
  table.columns = {"gamma_t", "concurrence", "classical", "discord"};
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    table.rows.push_back({unit * traj.times[i], reports[i].concurrence,
                          reports[i].classical, reports[i].discord});
  }

  json j = base_summary(cfg, table);
  j["initial"] = cfg.initial.name;
  j["final_concurrence"] = reports.back().concurrence;
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_fig6(const ScenarioConfig& cfg) {
  if (!(cfg.model.omega_a > 0.0)) {
    throw ConfigError("fig6 needs omega_a > 0 (it sets the drive scale)");
  }
  const std::size_t n_omega = static_cast<std::size_t>(cfg.omega_ratio_points);
  const std::size_t total = cfg.gamma_ratios.size() * n_omega;

  std::vector<double> omega_ratio(n_omega);
  for (std::size_t k = 0; k < n_omega; ++k) {
    omega_ratio[k] =
        n_omega == 1
            ? cfg.omega_ratio_min
            : cfg.omega_ratio_min + (cfg.omega_ratio_max - cfg.omega_ratio_min) *
                                        static_cast<double>(k) /
                                        static_cast<double>(n_omega - 1);
  }

  std::vector<double> conc(total);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    const double g_ratio = cfg.gamma_ratios[i / n_omega];
    const double w_ratio = omega_ratio[i % n_omega];
    TwoQubitConfig m = cfg.model;
    m.gamma_b = g_ratio * m.gamma_a;
    m.omega_b = w_ratio * m.omega_a;
    const SteadyStateResult steady = steady_states(build_liouvillian(build_two_qubit_model(m)));
    if (!steady.state) {
      throw ToleranceError("fig6: steady state is not unique at omega ratio " +
                           std::to_string(w_ratio));
    }
    conc[i] = concurrence(*steady.state);
  });

  CsvTable table;
  table.columns = {"omega_b_over_omega_a", "gamma_b_over_gamma_a", "concurrence"};
  for (std::size_t i = 0; i < total; ++i) {
    table.rows.push_back({omega_ratio[i % n_omega], cfg.gamma_ratios[i / n_omega], conc[i]});
  }

  json j = base_summary(cfg, table);
  j["gamma_ratios"] = cfg.gamma_ratios;
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_separable_max(const ScenarioConfig& cfg) {
  const SeparableMaxResult r = separable_max_scan(cfg.lambda_points, cfg.theta_points,
                                                  cfg.phi_points, cfg.lambda_cap, cfg.threads);
  CsvTable table;
  table.columns = {"max_concurrence", "lambda_a", "theta_a", "phi_a",
                   "lambda_b",        "theta_b",  "phi_b"};
  table.rows.push_back({r.max_concurrence, r.a.lambda, r.a.theta, r.a.phi, r.b.lambda,
                        r.b.theta, r.b.phi});

  json j = base_summary(cfg, table);
  j["max_concurrence"] = r.max_concurrence;
  j["argmax"] = {{"lambda_a", r.a.lambda}, {"theta_a", r.a.theta}, {"phi_a", r.a.phi},
                 {"lambda_b", r.b.lambda}, {"theta_b", r.b.theta}, {"phi_b", r.b.phi}};
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_asymmetry(const ScenarioConfig& cfg) {
  if (cfg.model.gamma_a != cfg.model.gamma_b) {
    throw ConfigError("asymmetry_scan assumes gamma_a == gamma_b");
  }
  if (!(cfg.model.omega_a > 0.0)) {
    throw ConfigError("asymmetry_scan needs omega_a > 0 (the mean Rabi frequency)");
  }
  const AsymmetryFitResult fit =
      asymmetry_law_fit(cfg.model.gamma_a, cfg.model.omega_a, cfg.delta_grid);

  CsvTable table;
  table.columns = {"delta_omega", "concurrence", "one_minus_concurrence"};
  for (std::size_t i = 0; i < fit.deltas.size(); ++i) {
    table.rows.push_back({fit.deltas[i], fit.concurrences[i], 1.0 - fit.concurrences[i]});
  }

  json j = base_summary(cfg, table);
  j["kappa"] = fit.kappa;
  j["gamma"] = cfg.model.gamma_a;
  j["omega"] = cfg.model.omega_a;
  return {std::move(table), j.dump(2)};
}

ScenarioResult run_birth_time(const ScenarioConfig& cfg) {
  const Superoperator liou = build_liouvillian(build_two_qubit_model(cfg.model));
  const std::vector<double> grid = time_grid(cfg.t_max, cfg.n_points);
  const double unit = time_unit(cfg.model);

  CsvTable table;
  table.columns = {"lambda", "gamma_tau0", "detected"};
  json per_lambda = json::array();
  for (double lambda : cfg.lambda_grid) {
    const Trajectory traj = propagate(liou, y_bloch_pair(lambda), grid);
    const BirthTimeResult bt =
        birth_time(liou, traj, cfg.birth_threshold, 1e-6 / unit);
    const double gamma_tau = bt.detected ? unit * bt.tau0
                                         : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back({lambda, gamma_tau, bt.detected ? 1.0 : 0.0});
    per_lambda.push_back({{"lambda", lambda},
                          {"detected", bt.detected},
                          {"gamma_tau0", bt.detected ? json(gamma_tau) : json()}});
  }

  json j = base_summary(cfg, table);
  j["birth_times"] = per_lambda;
  return {std::move(table), j.dump(2)};
}

}  // namespace

DensityMatrix build_initial_state(const InitialStateSpec& spec) {
  switch (spec.kind) {
    case InitialStateSpec::Kind::Bloch:
      return product_state(bloch_state(spec.bloch_a), bloch_state(spec.bloch_b));
    case InitialStateSpec::Kind::RawMatrix:
      return DensityMatrix(spec.matrix);
    case InitialStateSpec::Kind::Named:
      break;
  }
  if (spec.name == "mixed") return DensityMatrix::maximally_mixed(4);
  if (spec.name == "bell_phi_plus") return bell_state(Bell::PhiPlus);
  if (spec.name == "bell_phi_minus") return bell_state(Bell::PhiMinus);
  if (spec.name == "bell_psi_plus") return bell_state(Bell::PsiPlus);
  if (spec.name == "bell_psi_minus") return bell_state(Bell::PsiMinus);
  static const std::map<std::string, Index> basis{
      {"pp", 0}, {"pm", 1}, {"mp", 2}, {"mm", 3}};
  const auto it = basis.find(spec.name);
  if (it == basis.end()) {
    throw ConfigError("unknown initial state '" + spec.name + "'");
  }
  Vector v = Vector::Zero(4);
  v[it->second] = 1.0;
  return DensityMatrix::pure(v);
}

BirthTimeResult birth_time(const Superoperator& liouvillian, const Trajectory& trajectory,
                           double threshold, double refine_tol) {
  if (trajectory.states.empty()) {
    throw ConfigError("birth_time: empty trajectory");
  }
  if (!(threshold > 0.0) || !(refine_tol > 0.0)) {
    throw ConfigError("birth_time: threshold and refine_tol must be positive");
  }

  std::size_t first = trajectory.states.size();
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    if (concurrence(trajectory.states[i]) > threshold) {
      first = i;
      break;
    }
  }
  if (first == trajectory.states.size()) {
    return {std::numeric_limits<double>::quiet_NaN(), false, threshold};
  }
  if (first == 0) {
    return {trajectory.times.front(), true, threshold};
  }

  // Bisect between the bracketing grid points, evolving off-grid states from
  // the last sub-threshold one.
  const double t_base = trajectory.times[first - 1];
  const Vector base = vectorize(trajectory.states[first - 1].matrix());
  double lo = t_base, hi = trajectory.times[first];
  while (hi - lo > refine_tol) {
    const double mid = 0.5 * (lo + hi);
    const DensityMatrix rho(
        unvectorize(matrix_exp(liouvillian.matrix() * (mid - t_base)) * base), 1e-9, 1e-9,
        1e-8);
    (concurrence(rho) > threshold ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), true, threshold};
}

SeparableMaxResult separable_max_scan(int lambda_points, int theta_points, int phi_points,
                                      double lambda_cap, int threads) {
  if (lambda_points < 2 || theta_points < 2 || phi_points < 1 || !(lambda_cap > 0.0) ||
      lambda_cap > 1.0) {
    throw ConfigError("separable_max_scan: bad grid");
  }
  const auto nl = static_cast<std::size_t>(lambda_points);
  const auto nt = static_cast<std::size_t>(theta_points);
  const auto np = static_cast<std::size_t>(phi_points);
  const std::size_t per_side = nl * nt * np;
  const std::size_t total = per_side * per_side;

  const auto lambda_at = [&](std::size_t i) {
    return -lambda_cap + 2.0 * lambda_cap * static_cast<double>(i) /
                             static_cast<double>(nl - 1);
  };
  const auto theta_at = [&](std::size_t j) {
    return M_PI * static_cast<double>(j) / static_cast<double>(nt - 1);
  };
  const auto phi_at = [&](std::size_t k) {
    return 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(np);
  };
  const auto unpack = [&](std::size_t side) {
    const std::size_t k = side % np;
    const std::size_t j = (side / np) % nt;
    const std::size_t i = side / (np * nt);
    return BlochParams{lambda_at(i), theta_at(j), phi_at(k)};
  };

  // The undriven stationary state is the X matrix fixed by the conserved
  // pair (p, c); its concurrence is 2|c|. Every so often the full Wootters
  // machinery is run on the same grid point as a cross-check.
  const auto invariants = [](const BlochParams& a, const BlochParams& b) {
    const double p = 0.25 * (1.0 + a.lambda * std::cos(a.theta)) *
                     (1.0 + b.lambda * std::cos(b.theta));
    const Complex c = 0.25 * a.lambda * b.lambda * std::sin(a.theta) * std::sin(b.theta) *
                      std::exp(Complex(0.0, -(a.phi + b.phi)));
    return std::pair<double, Complex>(p, c);
  };

  // The winner is the argmax with exact-value ties resolved toward the
  // lowest flat index; values per index do not depend on scheduling, so the
  // result is identical for any thread count.
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  struct Best {
    double c = -1.0;
    std::size_t flat = 0;
  };
  std::vector<Best> best_per_chunk(workers);

  parallel_for(workers, threads, [&](std::size_t w) {
    Best local;
    for (std::size_t flat = w; flat < total; flat += workers) {
      const BlochParams pa = unpack(flat / per_side);
      const BlochParams pb = unpack(flat % per_side);
      const auto [p, c] = invariants(pa, pb);
      const double conc = 2.0 * std::abs(c);
      if (flat % 997 == 0) {
        AnalyticStationary st;
        st.p = p;
        st.c = c;
        const double reference = concurrence(st.state());
        if (std::abs(reference - conc) > 1e-9) {
          throw ToleranceError("separable_max_scan: closed form disagrees with Wootters route");
        }
      }
      // Strided flats are increasing, so strict > keeps the lowest index.
      if (conc > local.c) local = {conc, flat};
    }
    best_per_chunk[w] = local;
  });

  Best best;
  for (const Best& b : best_per_chunk) {
    if (b.c > best.c || (b.c == best.c && b.flat < best.flat)) best = b;
  }

  SeparableMaxResult result;
  result.max_concurrence = best.c;
  result.a = unpack(best.flat / per_side);
  result.b = unpack(best.flat % per_side);
  return result;
}

AsymmetryFitResult asymmetry_law_fit(double gamma, double omega,
                                     const std::vector<double>& deltas) {
  if (!(gamma > 0.0) || !(omega > 0.0)) {
    throw ConfigError("asymmetry_law_fit: gamma and omega must be positive");
  }
  if (deltas.empty()) {
    throw ConfigError("asymmetry_law_fit: empty delta grid");
  }
  AsymmetryFitResult fit;
  fit.deltas = deltas;
  fit.concurrences.resize(deltas.size());

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    if (std::abs(delta) >= omega) {
      throw ConfigError("asymmetry_law_fit: |delta| must stay below omega");
    }
    TwoQubitConfig m;
    m.gamma_a = m.gamma_b = gamma;
    m.omega_a = omega + delta;
    m.omega_b = omega - delta;
    const SteadyStateResult steady = steady_states(build_liouvillian(build_two_qubit_model(m)));
    if (!steady.state) {
      throw ToleranceError("asymmetry_law_fit: steady state is not unique");
    }
    fit.concurrences[i] = concurrence(*steady.state);
    const double x = delta * delta;
    sxx += x * x;
    sxy += x * (1.0 - fit.concurrences[i]);
  }
  fit.kappa = sxy / sxx;
  return fit;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.scenario) {
    case ScenarioKind::Custom:
      return run_correlation_trajectory(cfg, build_initial_state(cfg.initial));
    case ScenarioKind::Fig1:
      return run_fig1(cfg);
    case ScenarioKind::Fig2:
      return run_correlation_trajectory(cfg, y_bloch_pair(cfg.lambda));
    case ScenarioKind::Fig4:
      return run_fig4(cfg);
    case ScenarioKind::Fig5a:
    case ScenarioKind::Fig5b:
      return run_fig5(cfg);
    case ScenarioKind::Fig6:
      return run_fig6(cfg);
    case ScenarioKind::SeparableMax:
      return run_separable_max(cfg);
    case ScenarioKind::AsymmetryScan:
      return run_asymmetry(cfg);
    case ScenarioKind::BirthTime:
      return run_birth_time(cfg);
  }
  throw ConfigError("run_scenario: unknown scenario");
}

}  // namespace kclind
