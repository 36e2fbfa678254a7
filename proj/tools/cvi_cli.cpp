// Command-line front end: single runs, multi-trial experiments, summaries and probes.

#include "cvi/diagnostics.hpp"
#include "cvi/errors.hpp"
#include "cvi/gaussian_mixture.hpp"
#include "cvi/harness/config.hpp"
#include "cvi/harness/experiment.hpp"
#include "cvi/harness/model_factory.hpp"
#include "cvi/harness/trace_io.hpp"
#include "cvi/smoothed_map.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace cvi;
using namespace cvi::harness;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunOptions {
  std::string model = "trimodal-mixture";
  double alpha = 0.0;
  long steps = -1;
  std::vector<double> schedule;
  std::uint64_t seed = 0;
  std::vector<double> init;
  double scale = 1.0;
  std::string out;
  long smap_steps = 20000;
  std::vector<double> smap_schedule = {50.0, 0.7};
  int samples = 100;
  bool adam = false;
  double t_init = 1.0;
  long record_every = 100;
};

StepSchedule schedule_from(const std::vector<double>& v, const std::string& flag) {
  if (v.size() != 2) throw ConfigError(flag + " expects C,rho");
  StepSchedule s{v[0], v[1], StepSchedule::Form::shifted_power, false};
  if (v[1] == 0.0) s = StepSchedule::constant(v[0]);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(flag + ": " + e.what());
  }
  return s;
}

MeanInit default_mean_init(const RunOptions& o, const TargetModel& model) {
  MeanInit m;
  if (!o.init.empty()) {
    m.kind = MeanInit::Kind::fixed;
    m.value = Eigen::Map<const Vector>(o.init.data(), static_cast<Eigen::Index>(o.init.size()));
    return m;
  }
  Rng probe = make_rng(0, 0);
  m.kind = model.sample_prior(probe) ? MeanInit::Kind::prior : MeanInit::Kind::uniform;
  return m;
}

void print_summary(const ExperimentReport& report, std::ostream& os) {
  for (const AlgorithmSummary& s : report.algorithms) {
    long ok = 0;
    std::vector<double> elbos;
    for (const SummaryRow& r : s.rows) {
      if (r.status != "ok") continue;
      ++ok;
      if (std::isfinite(r.final_elbo)) elbos.push_back(r.final_elbo);
    }
    os << s.id << " (" << to_string(s.kind) << "): " << ok << "/" << s.rows.size() << " completed";
    if (!elbos.empty()) {
      std::sort(elbos.begin(), elbos.end());
      os << ", median final ELBO " << format_double(elbos[elbos.size() / 2]);
    }
    if (s.capture) os << ", captured " << s.capture->captured << "/" << s.capture->trials;
    os << '\n';
    if (s.rows.size() == 1 && s.rows.front().status == "ok") {
      const SummaryRow& r = s.rows.front();
      os << "  result:";
      for (Eigen::Index i = 0; i < r.moments.size(); ++i) os << ' ' << format_double(r.moments[i]);
      os << (s.kind == AlgorithmKind::smap ? "  (theta)" : "  (mean..., sd...)") << '\n';
    }
  }
  for (const TrialFailure& f : report.failures)
    os << "failure: " << f.algorithm << " trial " << f.trial << ": " << f.message << '\n';
  for (const std::string& p : report.problems) os << "problem: " << p << '\n';
}

int single_run(AlgorithmKind kind, const RunOptions& o) {
  ExperimentConfig cfg;
  cfg.name = to_string(kind);
  cfg.model = parse_model_string(o.model);
  cfg.trials = 1;
  cfg.base_seed = o.seed;
  const auto model = make_model(cfg.model);

  AlgorithmSpec a;
  a.id = to_string(kind);
  a.kind = kind;
  a.record_every = o.record_every;
  a.mean_init = default_mean_init(o, *model);
  a.scale_init.kind = ScaleInit::Kind::fixed;
  a.scale_init.value = o.scale;
  a.adam = o.adam;
  a.alpha = o.alpha;
  a.samples = o.samples;

  const bool needs_smap = o.init.empty() && (kind == AlgorithmKind::csvi ||
                                             kind == AlgorithmKind::csvi_adam ||
                                             kind == AlgorithmKind::cla);
  if (needs_smap) {
    AlgorithmSpec s;
    s.id = "smap";
    s.kind = AlgorithmKind::smap;
    s.alpha = o.alpha;
    s.samples = o.samples;
    s.iterations = o.smap_steps;
    s.schedule = schedule_from(o.smap_schedule, "--smap-schedule");
    s.mean_init = default_mean_init(o, *model);
    s.adam = o.adam;
    s.record_every = o.record_every;
    cfg.algorithms.push_back(s);
    a.mean_init = MeanInit{};
    a.mean_init.kind = MeanInit::Kind::smap;
    a.mean_init.smap_id = "smap";
  }
  switch (kind) {
    case AlgorithmKind::smap:
      a.iterations = o.steps >= 0 ? o.steps : 20000;
      a.schedule = schedule_from(o.schedule.empty() ? o.smap_schedule : o.schedule, "--schedule");
      break;
    case AlgorithmKind::csvi:
    case AlgorithmKind::csvi_adam:
      a.iterations = o.steps >= 0 ? o.steps : 100000;
      a.schedule = schedule_from(o.schedule.empty() ? std::vector<double>{5.0, 1.0} : o.schedule,
                                 "--schedule");
      break;
    case AlgorithmKind::svi:
      a.iterations = o.steps >= 0 ? o.steps : 100000;
      a.schedule = schedule_from(o.schedule.empty() ? std::vector<double>{15.0, 1.0} : o.schedule,
                                 "--schedule");
      break;
    case AlgorithmKind::cla:
    case AlgorithmKind::laplace:
      a.iterations = o.steps >= 0 ? o.steps : 20000;
      a.schedule = StepSchedule::constant(o.t_init);
      a.line_search.t_init = o.t_init;
      break;
  }
  cfg.algorithms.push_back(a);
  cfg.validate();

  const std::string out = o.out.empty() ? (fs::path(default_output_root()) / cfg.name).string() : o.out;
  const ExperimentReport report = run_experiment(cfg, out, 1);
  print_summary(report, std::cout);
  std::cout << "traces written to " << out << '\n';
  return report.failures.empty() ? 0 : kExitRuntime;
}

int probe(const std::string& model_text, const std::vector<double>& center, double radius, int grid,
          bool force_fd, const std::string& density_path, const std::vector<double>& alphas,
          bool vi_objective, double l_center, double l_radius) {
  const auto model = make_model(parse_model_string(model_text));
  Vector c = center.empty() ? Vector::Zero(model->dim())
                            : Vector(Eigen::Map<const Vector>(center.data(), static_cast<Eigen::Index>(center.size())));
  if (c.size() != model->dim()) throw ConfigError("--center has the wrong dimension");

  if (!density_path.empty()) {
    const auto* mixture = dynamic_cast<const GaussianMixtureTarget*>(model.get());
    if (!mixture || mixture->dim() != 1)
      throw ConfigError("--density needs a 1-D gaussian or gaussian-mixture model");
    std::ofstream out(density_path);
    if (!out) throw Error("cannot write " + density_path);
    out << "alpha,x,density\n";
    std::vector<double> list = alphas.empty() ? std::vector<double>{0.0} : alphas;
    for (double alpha : list) {
      const GaussianMixtureTarget smoothed = smoothed_density_oracle(*mixture, alpha);
      for (int i = 0; i < grid; ++i) {
        const double x = grid == 1 ? c[0] : c[0] - radius + 2.0 * radius * i / (grid - 1);
        out << format_double(alpha) << ',' << format_double(x) << ','
            << format_double(std::exp(smoothed.log_density(Vector::Constant(1, x)))) << '\n';
      }
    }
    std::cout << "density grid written to " << density_path << '\n';
    return 0;
  }
  const ConvexityProbe p = vi_objective
                               ? vi_objective_probe_1d(*model, c[0], radius, l_center, l_radius, grid)
                               : hessian_probe(*model, c, radius, grid, force_fd);
  std::cout << "grid points " << p.grid.size() << "\n"
            << "min eigenvalue " << format_double(p.min_eig) << " at";
  for (Eigen::Index i = 0; i < p.argmin_point.size(); ++i) std::cout << ' ' << format_double(p.argmin_point[i]);
  std::cout << "\nmax eigenvalue " << format_double(p.max_eig) << '\n';
  return 0;
}

void add_run_options(CLI::App* cmd, RunOptions& o, AlgorithmKind kind) {
  cmd->add_option("--model", o.model, "model spec, e.g. trimodal-mixture or synthetic-bvm:n=1000")
      ->capture_default_str();
  cmd->add_option("--steps", o.steps, "iterations");
  cmd->add_option("--schedule", o.schedule, "step schedule C,rho for C/(1+k)^rho (rho 0 = constant)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--seed", o.seed, "seed")->capture_default_str();
  cmd->add_option("--init", o.init, "initial mean, comma separated (default: prior draw or U(-50,50))")
      ->delimiter(',');
  cmd->add_option("--out", o.out, "output directory (default: $CVI_OUTPUT_ROOT/<command>)");
  cmd->add_option("--record-every", o.record_every, "trace snapshot cadence")->capture_default_str();
  if (kind == AlgorithmKind::cla || kind == AlgorithmKind::laplace) {
    cmd->add_option("--t-init", o.t_init, "initial line-search step")->capture_default_str();
  }
  if (kind != AlgorithmKind::laplace && kind != AlgorithmKind::svi) {
    cmd->add_option("--alpha", o.alpha, "smoothing variance (0: 10 n^-0.3)")->capture_default_str();
    cmd->add_option("--samples", o.samples, "importance samples per smoothed gradient")->capture_default_str();
  }
  if (kind != AlgorithmKind::smap && kind != AlgorithmKind::laplace && kind != AlgorithmKind::svi) {
    cmd->add_option("--smap-steps", o.smap_steps, "smoothed MAP iterations")->capture_default_str();
    cmd->add_option("--smap-schedule", o.smap_schedule, "smoothed MAP schedule C,rho (default 50,0.7)")
        ->delimiter(',')
        ->expected(2);
  }
  if (kind == AlgorithmKind::csvi || kind == AlgorithmKind::svi || kind == AlgorithmKind::csvi_adam)
    cmd->add_option("--scale", o.scale, "initial L = scale * I")->capture_default_str();
  if (kind == AlgorithmKind::smap || kind == AlgorithmKind::svi)
    cmd->add_flag("--adam", o.adam, "Adam updates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent Gaussian posterior approximation: smoothed MAP, CSVI, CLA and baselines"};
  app.require_subcommand(1);

  std::map<std::string, RunOptions> run_opts;
  const std::vector<std::pair<std::string, AlgorithmKind>> runs = {
      {"smap", AlgorithmKind::smap},       {"csvi", AlgorithmKind::csvi},
      {"csvi-adam", AlgorithmKind::csvi_adam}, {"svi", AlgorithmKind::svi},
      {"cla", AlgorithmKind::cla},         {"laplace", AlgorithmKind::laplace}};
  std::map<std::string, CLI::App*> run_cmds;
  for (const auto& [name, kind] : runs) {
    run_cmds[name] = app.add_subcommand(name, "single " + name + " run");
    add_run_options(run_cmds[name], run_opts[name], kind);
  }

  std::string preset_name, config_path, exp_out;
  long trials = 0;
  int jobs = 1;
  bool dump_config = false;
  auto* exp = app.add_subcommand("experiment", "multi-trial experiment from a preset or config file");
  auto* preset_opt = exp->add_option("--preset", preset_name, "mixture, bvm-smap, sparse-regression-synthetic, gmm-synthetic");
  exp->add_option("--config", config_path, "JSON config file")->excludes(preset_opt);
  exp->add_option("--trials", trials, "override the number of trials");
  exp->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  exp->add_option("--out", exp_out, "output directory (default: $CVI_OUTPUT_ROOT/<name>)");
  exp->add_flag("--dump-config", dump_config, "print the resolved config as JSON and exit");

  std::string summarize_dir;
  auto* sum = app.add_subcommand("summarize", "re-read an experiment directory and rewrite its summaries");
  sum->add_option("dir", summarize_dir, "experiment directory")->required();

  std::string probe_model = "example1";
  std::vector<double> probe_center, probe_alphas;
  double probe_radius = 1.0, l_center = 1.0, l_radius = 0.5;
  int probe_grid = 101;
  bool probe_fd = false, probe_vi = false;
  std::string density_path;
  auto* prb = app.add_subcommand("probe", "Hessian eigenvalue scan or smoothed-density dump");
  prb->add_option("--model", probe_model, "model spec")->capture_default_str();
  prb->add_option("--center", probe_center, "grid center, comma separated")->delimiter(',');
  prb->add_option("--radius", probe_radius, "grid half-width")->capture_default_str();
  prb->add_option("--grid", probe_grid, "points per axis")->capture_default_str();
  prb->add_flag("--fd", probe_fd, "force finite-difference Hessians");
  prb->add_flag("--vi-objective", probe_vi, "scan the (mu, L) Hessian of the 1-D VI objective instead");
  prb->add_option("--l-center", l_center, "L grid center for --vi-objective")->capture_default_str();
  prb->add_option("--l-radius", l_radius, "L grid half-width for --vi-objective")->capture_default_str();
  prb->add_option("--density", density_path, "write alpha,x,density rows of the smoothed density");
  prb->add_option("--alpha", probe_alphas, "smoothing variances for --density (0 = raw)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& [name, kind] : runs)
      if (*run_cmds[name]) return single_run(kind, run_opts[name]);

    if (*exp) {
      if (preset_name.empty() == config_path.empty())
        throw ConfigError("experiment needs exactly one of --preset or --config");
      ExperimentConfig cfg = preset_name.empty() ? load_config(config_path) : preset(preset_name);
      if (trials > 0) cfg.trials = trials;
      if (!exp_out.empty()) cfg.output_dir = exp_out;
      if (cfg.output_dir.empty())
        cfg.output_dir = (fs::path(default_output_root()) / (cfg.name.empty() ? "experiment" : cfg.name)).string();
      cfg.validate();
      if (dump_config) {
        std::cout << to_json(cfg).dump(2) << '\n';
        return 0;
      }
      const ExperimentReport report = run_experiment(cfg, cfg.output_dir, jobs, &std::cerr);
      print_summary(report, std::cout);
      std::cout << "config hash " << report.config_hash << ", artifacts in " << cfg.output_dir << '\n';
      return 0;
    }
    if (*sum) {
      const ExperimentReport report = summarize(summarize_dir);
      write_summaries(report, summarize_dir);
      print_summary(report, std::cout);
      return report.problems.empty() ? 0 : kExitRuntime;
    }
    if (*prb)
      return probe(probe_model, probe_center, probe_radius, probe_grid, probe_fd, density_path,
                   probe_alphas, probe_vi, l_center, l_radius);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
