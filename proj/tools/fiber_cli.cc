// Copyright 2026 The FIBER Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fiber: command-line front end.
//
//   fiber calibrate    --eps 2 --delta 1e-5 --q 0.1 --steps 500
//   fiber attenuation  --omega 0.5 0.9
//   fiber train        --optimizer fiber --model logistic --sigma-dp 1
//   fiber drift-bench  --out drift.csv
//   fiber paired-run   --omega 0.9 --sigma-dp 20
//   fiber audit        --omega 0.9 --sigma-dp 2
//
// Every subcommand accepts --config FILE (flat JSON; keys are flag names
// without the leading dashes). Flags given on the command line win over file
// values. FIBER_SEED sets the default seed. Exit status: 0 ok, 2 invalid
// configuration, 3 numerical failure; errors are one JSON line on stderr.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fiber/fiber.hpp"

namespace {

using fiber::ErrorCode;
using fiber::FiberError;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void ReportError(std::string_view code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

std::uint64_t DefaultSeed() {
  if (const char* env = std::getenv("FIBER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw FiberError(ErrorCode::kInvalidParameter,
                       std::string("FIBER_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

// Options shared by commands that train a model.
struct TrainFlags {
  std::string model = "logistic";
  std::string optimizer = "fiber";
  std::size_t n = 2000;
  std::size_t p = 20;
  std::size_t hidden = 16;
  double label_noise = 0.5;
  int batch_size = 200;
  long steps = 500;
  double clip = 1.0;
  std::optional<double> eps;
  std::optional<double> sigma_dp;
  std::optional<double> delta;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
  double eps_v = 1e-8;
  long warmup = 0;
  double kappa = 0.6;
  double gamma = 0.7;
  double omega = 0.9;
  bool no_correction = false;
  std::uint64_t seed = 0;
  std::string out = "-";

  void Register(CLI::App* app, bool with_optimizer) {
    app->add_option("--model", model, "quadratic|linear|logistic|mlp")
        ->capture_default_str();
    if (with_optimizer) {
      app->add_option("--optimizer", optimizer,
                      "dp_sgd|dp_adamw|disk|disk_corr|fiber|fiber_no_corr|"
                      "fiber_bc_corr")
          ->capture_default_str();
      app->add_flag("--no-correction", no_correction,
                    "FIBER without the A*sigma_w^2 subtraction");
    }
    app->add_option("--n", n, "synthetic dataset size")->capture_default_str();
    app->add_option("--p", p, "feature dimension")->capture_default_str();
    app->add_option("--hidden", hidden, "MLP width")->capture_default_str();
    app->add_option("--label-noise", label_noise)->capture_default_str();
    app->add_option("--batch-size", batch_size)->capture_default_str();
    app->add_option("--steps", steps)->capture_default_str();
    app->add_option("--clip", clip, "per-example clip norm C")
        ->capture_default_str();
    auto* e = app->add_option("--eps", eps, "target epsilon (calibrates sigma)");
    auto* s = app->add_option("--sigma-dp", sigma_dp, "noise multiplier");
    e->excludes(s);
    app->add_option("--delta", delta, "default 1/n^1.1");
    app->add_option("--lr", lr)->capture_default_str();
    app->add_option("--beta1", beta1)->capture_default_str();
    app->add_option("--beta2", beta2)->capture_default_str();
    app->add_option("--adam-eps", adam_eps)->capture_default_str();
    app->add_option("--weight-decay", weight_decay)->capture_default_str();
    app->add_option("--eps-v", eps_v, "variance floor")->capture_default_str();
    app->add_option("--warmup", warmup, "linear warmup steps")
        ->capture_default_str();
    app->add_option("--kappa", kappa)->capture_default_str();
    app->add_option("--gamma", gamma)->capture_default_str();
    app->add_option("--omega", omega)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
  }

  double Delta() const {
    return delta ? *delta : fiber::DefaultDelta(static_cast<double>(n));
  }

  // Resolves sigma_DP, calibrating from --eps when given.
  double NoiseMultiplier(std::optional<fiber::CalibrationResult>* cal) const {
    if (eps.has_value() == sigma_dp.has_value()) {
      throw FiberError(ErrorCode::kInvalidParameter,
                       "give exactly one of --eps and --sigma-dp");
    }
    if (sigma_dp) return *sigma_dp;
    const double q = static_cast<double>(batch_size) / static_cast<double>(n);
    *cal = fiber::CalibrateNoise(*eps, Delta(), q, steps);
    return (*cal)->noise_multiplier;
  }

  fiber::ModelSpec Spec() const {
    fiber::ModelSpec spec{fiber::ParseModelKind(model), p, hidden};
    spec.Validate();
    return spec;
  }

  fiber::OptimizerConfig Optimizer(double noise_multiplier) const {
    fiber::OptimizerConfig cfg;
    cfg.kind = fiber::ParseOptimizerKind(optimizer);
    cfg.adam = {lr, beta1, beta2, adam_eps, weight_decay, eps_v, warmup};
    cfg.dp = {clip, batch_size, noise_multiplier};
    cfg.two_point = {kappa, gamma};
    cfg.omega = omega;
    cfg.subtract_filtered_variance = !no_correction;
    cfg.Validate();
    return cfg;
  }

  json ToJson() const {
    json j = {{"model", model},         {"optimizer", optimizer},
              {"n", n},                 {"p", p},
              {"hidden", hidden},       {"label_noise", label_noise},
              {"batch_size", batch_size}, {"steps", steps},
              {"clip", clip},           {"delta", Delta()},
              {"lr", lr},               {"beta1", beta1},
              {"beta2", beta2},         {"adam_eps", adam_eps},
              {"weight_decay", weight_decay}, {"eps_v", eps_v},
              {"warmup", warmup},       {"kappa", kappa},
              {"gamma", gamma},         {"omega", omega},
              {"no_correction", no_correction}, {"seed", seed}};
    j["eps"] = eps ? json(*eps) : json(nullptr);
    j["sigma_dp"] = sigma_dp ? json(*sigma_dp) : json(nullptr);
    return j;
  }

  fiber::Dataset MakeData() const {
    return fiber::MakeSynthetic(fiber::ParseModelKind(model), n, p, seed,
                                label_noise);
  }
};

const std::vector<std::string> kSubsampling = {
    "integer RDP orders 2..64 only",
    "fixed-size batches accounted with the Poisson-subsampling RDP bound at "
    "q = B/N"};

// ---------------------------------------------------------------------------

struct CalibrateCmd {
  double eps = 0;
  std::optional<double> delta;
  std::optional<double> n;
  double q = 0;
  long long steps = 0;
  std::string out = "-";

  void Register(CLI::App* app) {
    app->add_option("--eps", eps, "target epsilon")->required();
    app->add_option("--delta", delta, "default 1/n^1.1 (needs --n)");
    app->add_option("--n", n, "dataset size, for the default delta");
    app->add_option("--q", q, "sampling rate B/N")->required();
    app->add_option("--steps", steps, "number of steps T")->required();
    app->add_option("--out", out)->capture_default_str();
  }

  int Run() const {
    if (!delta && !n) {
      throw FiberError(ErrorCode::kInvalidParameter,
                       "calibrate needs --delta or --n");
    }
    const double d = delta ? *delta : fiber::DefaultDelta(*n);
    const auto c = fiber::CalibrateNoise(eps, d, q, steps);
    json j = {{"sigma_dp", c.noise_multiplier},
              {"eps_achieved", c.epsilon},
              {"order_argmin", c.order},
              {"deviations", kSubsampling},
              {"config",
               {{"eps", eps}, {"delta", d}, {"q", q}, {"steps", steps}}}};
    fiber::OutputStream os(out);
    fiber::WriteJson(os.get(), j);
    return 0;
  }
};

struct AttenuationCmd {
  std::vector<double> omega{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
  std::string filter = "innovation";
  long mc_steps = 20000;
  int mc_replicas = 8;
  std::uint64_t seed = 0;
  std::string out = "-";

  void Register(CLI::App* app) {
    app->add_option("--omega", omega, "gain grid")->capture_default_str();
    app->add_option("--filter", filter, "innovation|ema")
        ->capture_default_str();
    app->add_option("--mc-steps", mc_steps)->capture_default_str();
    app->add_option("--mc-replicas", mc_replicas)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--out", out)->capture_default_str();
  }

  int Run() const {
    if (filter != "innovation" && filter != "ema") {
      throw FiberError(ErrorCode::kInvalidParameter,
                       "--filter must be innovation or ema");
    }
    const bool ema = filter == "ema";
    json cfg = {{"command", "attenuation"}, {"omega", omega},
                {"filter", filter},         {"mc_steps", mc_steps},
                {"mc_replicas", mc_replicas}, {"seed", seed}};
    fiber::OutputStream os(out);
    fiber::CsvWriter csv(os.get(), cfg,
                         {"omega", "a_closed_form", "a_lyapunov", "a_impulse",
                          "a_monte_carlo", "mc_stderr"});
    for (double w : omega) {
      const double closed = ema ? fiber::AState(w) : fiber::AInnovation(w);
      const auto ss =
          ema ? fiber::EmaRealization(w) : fiber::InnovationRealization(w);
      fiber::MonteCarloOptions mc;
      mc.steps = mc_steps;
      mc.burn_in = std::min<long>(mc_steps / 2, static_cast<long>(50 / w) + 100);
      mc.replicas = mc_replicas;
      mc.seed = seed;
      const auto est =
          ema ? fiber::MonteCarloAttenuation(
                    [w](std::size_t d) { return fiber::EmaFilter(d, w); }, 1.0,
                    mc)
              : fiber::MonteCarloAttenuation(
                    [w](std::size_t d) { return fiber::InnovationFilter(d, w); },
                    1.0, mc);
      csv.Row({w, closed, fiber::AttenuationStateSpace(ss),
               fiber::AttenuationImpulse(ss).attenuation, est.attenuation,
               est.standard_error});
    }
    return 0;
  }
};

struct TrainCmd {
  TrainFlags flags;
  std::string summary;
  std::string checkpoint;

  void Register(CLI::App* app) {
    flags.Register(app, true);
    app->add_option("--summary", summary, "JSON summary path (default stderr)");
    app->add_option("--checkpoint", checkpoint,
                    "write the final optimizer state as JSON");
  }

  int Run() const {
    std::optional<fiber::CalibrationResult> cal;
    const double sigma = flags.NoiseMultiplier(&cal);
    const fiber::ModelSpec spec = flags.Spec();
    const fiber::OptimizerConfig opt = flags.Optimizer(sigma);
    const fiber::Dataset data = flags.MakeData();
    fiber::Trainer trainer(spec, data, opt, flags.seed, flags.seed + 1);

    json cfg = flags.ToJson();
    cfg["command"] = "train";
    cfg["sigma_dp_resolved"] = sigma;
    cfg["sigma_w"] = opt.dp.sigma_w();
    fiber::OutputStream os(flags.out);
    fiber::CsvWriter csv(os.get(), cfg,
                         {"step", "loss", "clamp_mass", "grad_evals"});
    csv.Row({0LL, trainer.Loss(), 0.0, 0LL});
    double last_clamp = 0.0;
    for (long t = 0; t < flags.steps; ++t) {
      const fiber::StepReport rep = trainer.Step();
      last_clamp = rep.clamp_mass;
      const double loss = trainer.Loss();
      if (!std::isfinite(loss)) {
        throw FiberError(ErrorCode::kInstability,
                         "loss diverged at step " + std::to_string(t + 1));
      }
      csv.Row({static_cast<long long>(t + 1), loss, rep.clamp_mass,
               static_cast<long long>(trainer.gradient_evaluations())});
    }
    json s = {{"final_loss", trainer.Loss()},
              {"steps", flags.steps},
              {"gradient_evaluations", trainer.gradient_evaluations()},
              {"final_clamp_mass", last_clamp},
              {"sigma_dp", sigma},
              {"sigma_w", opt.dp.sigma_w()},
              {"config", cfg}};
    if (spec.kind == fiber::ModelKind::kLogistic ||
        spec.kind == fiber::ModelKind::kMlp) {
      s["final_accuracy"] = fiber::Accuracy(spec, trainer.theta(), data);
    }
    if (cal) {
      s["eps_achieved"] = cal->epsilon;
      s["order_argmin"] = cal->order;
      s["deviations"] = kSubsampling;
    }
    if (summary.empty()) {
      std::cerr << s.dump() << "\n";
    } else {
      fiber::OutputStream ss(summary);
      fiber::WriteJson(ss.get(), s);
    }
    if (!checkpoint.empty()) {
      fiber::OutputStream cs(checkpoint);
      fiber::WriteJson(cs.get(), fiber::CheckpointToJson(trainer.state()));
    }
    return 0;
  }
};

struct DriftCmd {
  fiber::DriftBenchmarkConfig cfg;
  std::vector<std::string> models{"CV", "RW"};
  std::string out = "-";
  std::string summary;

  void Register(CLI::App* app) {
    app->add_option("--models", models, "CV and/or RW")->capture_default_str();
    app->add_option("--eps", cfg.epsilons, "privacy levels")
        ->capture_default_str();
    app->add_option("--snr", cfg.snrs, "nominal SNR per configuration")
        ->capture_default_str();
    app->add_option("--seed", cfg.seed_base, "seed of configuration 0")
        ->capture_default_str();
    app->add_option("--dimension", cfg.dimension)->capture_default_str();
    app->add_option("--horizon", cfg.horizon)->capture_default_str();
    app->add_option("--omega", cfg.omega)->capture_default_str();
    app->add_option("--kappa", cfg.kappa)->capture_default_str();
    app->add_option("--out", out)->capture_default_str();
    app->add_option("--summary", summary, "win-rate JSON path");
  }

  int Run() const {
    std::vector<fiber::DriftModel> ms;
    for (const auto& m : models) ms.push_back(fiber::ParseDriftModel(m));
    const auto result = fiber::DriftBenchmark(cfg, ms);
    json c = {{"command", "drift-bench"}, {"models", models},
              {"eps", cfg.epsilons},      {"snr", cfg.snrs},
              {"seed", cfg.seed_base},    {"dimension", cfg.dimension},
              {"horizon", cfg.horizon},   {"omega", cfg.omega},
              {"kappa", cfg.kappa},       {"sigma_w2", "1/eps^2"},
              {"cv_position_scale", cfg.cv_position_scale},
              {"cv_drift_scale", cfg.cv_drift_scale},
              {"cv_initial_drift_scale", cfg.cv_initial_drift_scale},
              {"rw_scale", cfg.rw_scale}};
    fiber::OutputStream os(out);
    fiber::CsvWriter csv(os.get(), c,
                         {"model", "eps", "snr", "seed", "mse_ema",
                          "mse_innov", "improvement", "win"});
    for (const auto& r : result.rows) {
      csv.Row({std::string(fiber::DriftModelName(r.model)), r.eps, r.snr,
               static_cast<long long>(r.seed), r.mse_ema, r.mse_innov,
               r.improvement, static_cast<long long>(r.win)});
    }
    if (!summary.empty()) {
      json rates = json::array();
      for (const auto& w : result.win_rates) {
        rates.push_back({{"model", fiber::DriftModelName(w.model)},
                         {"eps", w.eps},
                         {"wins", w.wins},
                         {"configurations", w.configurations}});
      }
      fiber::OutputStream ss(summary);
      fiber::WriteJson(ss.get(), {{"win_rates", rates}, {"config", c}});
    }
    return 0;
  }
};

struct PairedCmd {
  TrainFlags flags;
  std::size_t probes = 16;
  long burn_in = 200;
  std::string summary;

  void Register(CLI::App* app) {
    flags.steps = 800;
    flags.Register(app, false);
    app->add_option("--probes", probes, "number of projections")
        ->capture_default_str();
    app->add_option("--burn-in", burn_in)->capture_default_str();
    app->add_option("--summary", summary, "JSON summary path (default stderr)");
  }

  fiber::PairedRunConfig Config(double sigma) const {
    fiber::PairedRunConfig cfg;
    cfg.model = flags.Spec();
    TrainFlags f = flags;
    f.optimizer = "fiber";
    cfg.optimizer = f.Optimizer(sigma);
    cfg.steps = flags.steps;
    cfg.burn_in = burn_in;
    cfg.data_seed = flags.seed;
    cfg.noise_seed_a = flags.seed + 1;
    cfg.noise_seed_b = flags.seed + 2;
    return cfg;
  }

  int Run() const {
    std::optional<fiber::CalibrationResult> cal;
    const double sigma = flags.NoiseMultiplier(&cal);
    const auto cfg = Config(sigma);
    const auto data = flags.MakeData();
    const auto probe = fiber::MakeProjectionProbe(
        cfg.model.ParameterCount(), probes, flags.seed);
    const auto r = fiber::PairedRunAttenuation(cfg, data, probe);
    json c = flags.ToJson();
    c.erase("optimizer");
    c["command"] = "paired-run";
    c["probes"] = probes;
    c["burn_in"] = burn_in;
    c["sigma_dp_resolved"] = sigma;
    fiber::OutputStream os(flags.out);
    fiber::CsvWriter csv(os.get(), c, {"step", "rho", "r"});
    for (std::size_t t = 0; t < r.rho.size(); ++t) {
      csv.Row({static_cast<long long>(t + 1), r.rho[t], r.r[t]});
    }
    const json s = {{"rho_bar", r.rho_bar},
                    {"r_bar", r.r_bar},
                    {"a_closed_form", fiber::AInnovation(flags.omega)},
                    {"sigma_w2", r.sigma_w2},
                    {"config", c}};
    if (summary.empty()) {
      std::cerr << s.dump() << "\n";
    } else {
      fiber::OutputStream ss(summary);
      fiber::WriteJson(ss.get(), s);
    }
    return 0;
  }
};

struct AuditCmd {
  PairedCmd base;
  long warmup_steps = 100;
  long window = 100;

  void Register(CLI::App* app) {
    base.flags.steps = 800;
    base.flags.Register(app, false);
    app->add_option("--probes", base.probes, "number of projections")
        ->capture_default_str();
    app->add_option("--audit-warmup", warmup_steps, "steps before statistics")
        ->capture_default_str();
    app->add_option("--window", window, "sliding-window length")
        ->capture_default_str();
  }

  int Run() const {
    std::optional<fiber::CalibrationResult> cal;
    const double sigma = base.flags.NoiseMultiplier(&cal);
    fiber::AuditConfig cfg;
    cfg.run = base.Config(sigma);
    cfg.run.burn_in = 0;
    cfg.warmup = warmup_steps;
    cfg.window = window;
    const auto data = base.flags.MakeData();
    const auto probe = fiber::MakeProjectionProbe(
        cfg.run.model.ParameterCount(), base.probes, base.flags.seed);
    const auto r = fiber::AssumptionAudit(cfg, data, probe);
    json c = base.flags.ToJson();
    c.erase("optimizer");
    c["command"] = "audit";
    c["probes"] = base.probes;
    c["audit_warmup"] = warmup_steps;
    c["window"] = window;
    c["sigma_dp_resolved"] = sigma;
    json per = json::array();
    for (const auto& p : r.per_probe) {
      per.push_back({{"rho_hat", p.rho_hat},
                     {"cross_term_ratio", p.cross_term_ratio},
                     {"cv", p.cv}});
    }
    const json j = {{"omega", r.omega},
                    {"total_steps", r.total_steps},
                    {"warmup_steps", r.warmup_steps},
                    {"steady_steps", r.steady_steps},
                    {"window", r.window},
                    {"rho_hat", r.headline.rho_hat},
                    {"cross_term_ratio", r.headline.cross_term_ratio},
                    {"cv", r.headline.cv},
                    {"per_probe", per},
                    {"config", c}};
    fiber::OutputStream os(base.flags.out);
    fiber::WriteJson(os.get(), j);
    return 0;
  }
};

// Appends "--key value..." for config-file keys the user did not pass.
std::vector<std::string> MergeConfigFile(const std::vector<std::string>& args,
                                         CLI::App& app) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  if (rest.empty()) {
    throw FiberError(ErrorCode::kInvalidParameter,
                     "--config must follow a subcommand");
  }
  CLI::App* sub = app.get_subcommand_no_throw(rest.front());
  if (sub == nullptr) return rest;
  std::ifstream in(path);
  if (!in) throw FiberError(ErrorCode::kIo, "cannot open config " + path);
  const json file = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (!file.is_object()) {
    throw FiberError(ErrorCode::kInvalidParameter,
                     path + ": config must be a flat JSON object");
  }
  std::set<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  }
  for (const auto& [key, value] : file.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (sub->get_option_no_throw(flag) == nullptr) {
      throw FiberError(ErrorCode::kInvalidParameter,
                       "unknown config key '" + key + "'");
    }
    if (given.count(flag)) continue;
    const auto scalar = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_object() || v.is_array() || v.is_null()) {
        throw FiberError(ErrorCode::kInvalidParameter,
                         "config key '" + key + "' must be a scalar or list");
      }
      return v.dump();
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) rest.push_back(flag);
    } else if (value.is_array()) {
      rest.push_back(flag);
      for (const auto& v : value) rest.push_back(scalar(v));
    } else {
      rest.push_back(flag);
      rest.push_back(scalar(value));
    }
  }
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private filtered optimization toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CalibrateCmd calibrate;
  AttenuationCmd attenuation;
  TrainCmd train;
  DriftCmd drift;
  PairedCmd paired;
  AuditCmd audit;

  std::uint64_t seed = 0;
  try {
    seed = DefaultSeed();
  } catch (const FiberError& e) {
    ReportError(fiber::ErrorCodeName(e.code()), e.what());
    return kExitConfig;
  }
  attenuation.seed = seed;
  train.flags.seed = seed;
  drift.cfg.seed_base = seed;
  paired.flags.seed = seed;
  audit.base.flags.seed = seed;

  auto* c1 = app.add_subcommand("calibrate", "noise multiplier for a budget");
  calibrate.Register(c1);
  auto* c2 = app.add_subcommand("attenuation", "attenuation factor sweep");
  attenuation.Register(c2);
  auto* c3 = app.add_subcommand("train", "train one model");
  train.Register(c3);
  auto* c4 = app.add_subcommand("drift-bench", "synthetic drift benchmark");
  drift.Register(c4);
  auto* c5 = app.add_subcommand("paired-run", "paired-replica attenuation");
  paired.Register(c5);
  auto* c6 = app.add_subcommand("audit", "signal/noise assumption audit");
  audit.Register(c6);
  for (auto* sub : {c1, c2, c3, c4, c5, c6}) {
    sub->add_option("--config", "flat JSON config file");
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = MergeConfigFile(args, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ReportError("invalid_argument", e.what());
    return kExitConfig;
  } catch (const FiberError& e) {
    ReportError(fiber::ErrorCodeName(e.code()), e.what());
    return kExitConfig;
  }

  try {
    if (c1->parsed()) return calibrate.Run();
    if (c2->parsed()) return attenuation.Run();
    if (c3->parsed()) return train.Run();
    if (c4->parsed()) return drift.Run();
    if (c5->parsed()) return paired.Run();
    if (c6->parsed()) return audit.Run();
  } catch (const FiberError& e) {
    ReportError(fiber::ErrorCodeName(e.code()), e.what());
    return fiber::IsNumericalFailure(e.code()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    ReportError("internal", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
