#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "jmgh/config.hpp"
#include "jmgh/modelsel.hpp"
#include "jmgh/posterior.hpp"
#include "jmgh/predict.hpp"
#include "jmgh/sampler.hpp"
#include "jmgh/simulate.hpp"
#include "jmgh/summary.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SimulateArgs {
  int scenario = 1;
  int n = 0;
  uint64_t seed = 1;
  double censoring_time = -1.0;
  double censoring_target = -1.0;
  std::string out = ".";
};

struct FitArgs {
  std::string config, longitudinal, survival, out = ".";
  std::string label;
  uint64_t seed = 0;
  bool seed_set = false;
};

struct CompareArgs {
  std::vector<std::string> runs;
  std::string out = "compare.csv";
  uint64_t seed = 1;
};

struct PredictArgs {
  std::string run, out = ".";
  double t_max = 5.0;
  int steps = 100;
};

int run_simulate(const SimulateArgs& a) {
  jmgh::ScenarioConfig cfg = jmgh::scenario_config(a.scenario);
  if (a.n > 0) cfg.n = a.n;
  cfg.seed = a.seed;
  if (a.censoring_time >= 0.0 && a.censoring_target >= 0.0)
    throw jmgh::validation_error("--censoring-time and --censoring-target are exclusive");
  if (a.censoring_time >= 0.0) cfg.admin_censoring = a.censoring_time;
  if (a.censoring_target >= 0.0)
    cfg.admin_censoring = jmgh::calibrate_censoring(cfg, a.censoring_target);

  fs::create_directories(a.out);
  const jmgh::JointDataset data = jmgh::simulate_dataset(cfg);
  const auto lpath = (fs::path(a.out) / "longitudinal.csv").string();
  const auto spath = (fs::path(a.out) / "survival.csv").string();
  jmgh::write_dataset_csv(data, lpath, spath);

  json truth{{"scenario", cfg.name}, {"n", cfg.n}, {"seed", cfg.seed},
             {"admin_censoring", cfg.admin_censoring}, {"parameters", cfg.truth}};
  std::ofstream tout(fs::path(a.out) / "truth.json");
  tout << truth.dump(2) << '\n';

  // Ready-to-fit model config matching the scenario (scenario 0 fits a
  // reduced model on scenario-1 data).
  jmgh::ModelConfig mc;
  mc.long_spec = cfg.long_spec;
  mc.surv = cfg.fit_surv;
  jmgh::write_model_config(mc, (fs::path(a.out) / "model.json").string());

  int n_events = 0;
  for (const auto& s : data.subjects)
    if (s.event.status == jmgh::CensorStatus::Exact) ++n_events;
  std::cout << "simulated " << data.n() << " subjects (" << n_events << " events, "
            << data.n() - n_events << " censored) into " << a.out << "\n";
  return 0;
}

int run_fit(const FitArgs& a) {
  jmgh::ModelConfig cfg = jmgh::read_model_config(a.config);
  if (a.seed_set) cfg.sampler.seed = a.seed;
  jmgh::JointDataset data = jmgh::read_dataset_csv(a.longitudinal, a.survival);
  jmgh::JointModel model =
      jmgh::build_model(cfg.long_spec, cfg.surv, cfg.priors, std::move(data));
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
  jmgh::audit_priors(model);

  const auto chains = jmgh::run_hmc(model, cfg.sampler);
  fs::create_directories(a.out);
  for (const auto& c : chains) {
    const auto path =
        (fs::path(a.out) / ("chain_" + std::to_string(c.chain_index) + ".csv")).string();
    jmgh::write_chain_csv(c, path);
    std::cout << "chain " << c.chain_index << ": accept " << c.accept_rate << ", step "
              << c.step_size << ", divergences " << c.divergences << "\n";
  }
  jmgh::write_summary_csv((fs::path(a.out) / "summary.csv").string(),
                          jmgh::summarize_posterior(model, chains));
  jmgh::write_diagnostics(jmgh::diagnostics(chains),
                          (fs::path(a.out) / "diagnostics.csv").string());

  jmgh::RunInfo info;
  info.config_path = fs::absolute(a.config).string();
  info.longitudinal_path = fs::absolute(a.longitudinal).string();
  info.survival_path = fs::absolute(a.survival).string();
  info.data_hash = jmgh::dataset_hash(a.longitudinal, a.survival);
  info.label = a.label.empty() ? fs::path(a.config).stem().string() : a.label;
  info.chains = static_cast<int>(chains.size());
  info.seed = cfg.sampler.seed;
  jmgh::write_run_info(info, (fs::path(a.out) / "run.json").string());
  std::cout << "fit written to " << a.out << "\n";
  return 0;
}

struct LoadedRun {
  jmgh::RunInfo info;
  jmgh::ModelConfig cfg;
  jmgh::JointModel model;
  std::vector<jmgh::PosteriorChain> chains;
};

LoadedRun load_run(const std::string& dir) {
  LoadedRun r;
  r.info = jmgh::read_run_info((fs::path(dir) / "run.json").string());
  r.cfg = jmgh::read_model_config(r.info.config_path);
  jmgh::JointDataset data =
      jmgh::read_dataset_csv(r.info.longitudinal_path, r.info.survival_path);
  r.model = jmgh::build_model(r.cfg.long_spec, r.cfg.surv, r.cfg.priors, std::move(data));
  for (int c = 0; c < r.info.chains; ++c) {
    const auto path = (fs::path(dir) / ("chain_" + std::to_string(c) + ".csv")).string();
    r.chains.push_back(jmgh::read_chain_csv(path));
  }
  return r;
}

Eigen::MatrixXd stack_draws(const std::vector<jmgh::PosteriorChain>& chains) {
  long rows = 0;
  for (const auto& c : chains) rows += c.draws.rows();
  Eigen::MatrixXd out(rows, chains.front().draws.cols());
  long at = 0;
  for (const auto& c : chains) {
    out.middleRows(at, c.draws.rows()) = c.draws;
    at += c.draws.rows();
  }
  return out;
}

int run_compare(const CompareArgs& a) {
  if (a.runs.size() < 2)
    throw jmgh::validation_error("compare needs at least two run directories");
  std::vector<LoadedRun> runs;
  for (const auto& d : a.runs) runs.push_back(load_run(d));
  for (size_t i = 1; i < runs.size(); ++i)
    if (runs[i].info.data_hash != runs[0].info.data_hash)
      throw jmgh::validation_error("compare: runs were fit on different datasets (hash mismatch: " +
                                   a.runs[0] + " vs " + a.runs[i] + ")");

  std::vector<double> logml;
  std::vector<jmgh::BridgeResult> bridges;
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto br =
        jmgh::log_marginal_bridge(runs[i].model, stack_draws(runs[i].chains), a.seed + i);
    if (!br.converged)
      std::cerr << "warning: bridge iteration did not converge for " << a.runs[i] << "\n";
    bridges.push_back(br);
    logml.push_back(br.log_marginal);
  }
  const auto pmp = jmgh::posterior_model_probs(logml);

  std::ofstream out(a.out);
  if (!out) throw jmgh::validation_error("cannot write " + a.out);
  out << "model,log_marginal,se,pmp,lbf_vs_best\n";
  out.precision(12);
  const double best = *std::max_element(logml.begin(), logml.end());
  for (size_t i = 0; i < runs.size(); ++i) {
    out << runs[i].info.label << ',' << logml[i] << ',' << bridges[i].se << ',' << pmp[i] << ','
        << jmgh::log10_bayes_factor(logml[i], best) << '\n';
    std::cout << runs[i].info.label << ": log-ml " << logml[i] << " (se " << bridges[i].se
              << "), pmp " << pmp[i] << "\n";
  }
  return 0;
}

int run_predict(const PredictArgs& a) {
  LoadedRun r = load_run(a.run);
  if (a.steps < 2 || !(a.t_max > 0.0))
    throw jmgh::validation_error("predict: need t-max > 0 and at least 2 grid steps");
  std::vector<double> grid;  // open at 0 (baseline hazards can be singular there)
  for (int k = 1; k <= a.steps; ++k)
    grid.push_back(a.t_max * static_cast<double>(k) / static_cast<double>(a.steps));

  // Per-cause baseline parameter draws on the constrained scale.
  const Eigen::MatrixXd draws = stack_draws(r.chains);
  const int sd = r.model.layout.shared_dim;
  std::vector<double> u(static_cast<size_t>(sd));
  std::vector<Eigen::MatrixXd> theta;
  std::vector<jmgh::Family> fams;
  for (size_t c = 0; c < r.model.surv.size(); ++c) {
    const auto& cb = r.model.layout.causes[c];
    theta.emplace_back(draws.rows(), cb.theta_dim);
    fams.push_back(r.model.surv[c].baseline);
  }
  for (long i = 0; i < draws.rows(); ++i) {
    for (int k = 0; k < sd; ++k) u[static_cast<size_t>(k)] = draws(i, k);
    const auto x = jmgh::constrain_shared(r.model, u.data());
    for (size_t c = 0; c < r.model.surv.size(); ++c) {
      const auto& cb = r.model.layout.causes[c];
      for (int k = 0; k < cb.theta_dim; ++k)
        theta[c](i, k) = x[static_cast<size_t>(cb.theta_offset + k)];
    }
  }

  fs::create_directories(a.out);
  std::vector<std::string> labels;
  std::vector<const jmgh::CurveSummary*> curves;
  jmgh::CompetingRisksPredictive cr;
  jmgh::BaselinePredictive bp;
  if (r.model.surv.size() > 1) {
    cr = jmgh::cr_predictive(theta, fams, grid);
    labels.push_back("survival");
    curves.push_back(&cr.survival);
    for (size_t c = 0; c < r.model.surv.size(); ++c) {
      labels.push_back("hazard_" + r.model.surv[c].cause);
      curves.push_back(&cr.hazard[c]);
      labels.push_back("cif_" + r.model.surv[c].cause);
      curves.push_back(&cr.cif[c]);
    }
  } else {
    bp = jmgh::predictive_baseline(theta[0], fams[0], grid);
    labels = {"hazard", "survival"};
    curves = {&bp.hazard, &bp.survival};
  }
  const auto path = (fs::path(a.out) / "curves.csv").string();
  jmgh::write_curves_csv(path, labels, curves);
  std::cout << "predictive curves written to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian joint longitudinal-survival models with a general hazard structure"};
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from a shipped scenario");
  sim->add_option("--scenario", sa.scenario, "Scenario preset (0-3)")->check(CLI::Range(0, 3));
  sim->add_option("--n", sa.n, "Number of subjects (overrides the preset)");
  sim->add_option("--seed", sa.seed, "RNG seed");
  sim->add_option("--censoring-time", sa.censoring_time, "Administrative censoring time");
  sim->add_option("--censoring-target", sa.censoring_target,
                  "Calibrate administrative censoring to this proportion");
  sim->add_option("--out", sa.out, "Output directory");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a joint model by HMC");
  fit->add_option("--config", fa.config, "Model config JSON")->required();
  fit->add_option("--longitudinal", fa.longitudinal, "Longitudinal CSV")->required();
  fit->add_option("--survival", fa.survival, "Survival CSV")->required();
  fit->add_option("--out", fa.out, "Output directory");
  fit->add_option("--label", fa.label, "Model label for reports");
  auto* seed_opt = fit->add_option("--seed", fa.seed, "Override the config sampler seed");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Compare fitted models by bridge sampling");
  cmp->add_option("--runs", ca.runs, "Fit output directories")->required()->expected(-2);
  cmp->add_option("--out", ca.out, "Report CSV path");
  cmp->add_option("--seed", ca.seed, "RNG seed for the bridge proposal");

  PredictArgs pa;
  auto* prd = app.add_subcommand("predict", "Posterior-predictive baseline curves");
  prd->add_option("--run", pa.run, "Fit output directory")->required();
  prd->add_option("--t-max", pa.t_max, "Grid upper bound");
  prd->add_option("--steps", pa.steps, "Grid steps");
  prd->add_option("--out", pa.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    fa.seed_set = seed_opt->count() > 0;
    if (sim->parsed()) return run_simulate(sa);
    if (fit->parsed()) return run_fit(fa);
    if (cmp->parsed()) return run_compare(ca);
    if (prd->parsed()) return run_predict(pa);
  } catch (const jmgh::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
