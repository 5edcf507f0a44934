// Command-line front end: reference simulations, surrogate training and
// prediction, echo comparisons, and parameter sweeps, all driven by a flat
// config file.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qecho/qecho.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args, const char* out_help) {
  cmd->add_option("--config", args.config_path, "Experiment config file (flat TOML)")
      ->required();
  cmd->add_option("--out", args.out_path, out_help)->required();
  cmd->add_option("--seed", args.seed, "Override the config's training seed");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)");
}

qecho::ExperimentConfig load_with_overrides(const CommonArgs& args) {
  qecho::ExperimentConfig cfg = qecho::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.threads) {
    if (*args.threads < 0) throw qecho::ConfigError("--threads must be non-negative");
    cfg.threads = *args.threads;
  }
  return cfg;
}

void ensure_parent_dir(const fs::path& file) {
  const fs::path dir = file.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

int run_simulate(const CommonArgs& args) {
  const qecho::ExperimentConfig cfg = load_with_overrides(args);
  const qecho::PolarizationTrace trace = qecho::compute_reference(cfg);
  ensure_parent_dir(args.out_path);
  qecho::export_trace(trace, fs::path(args.out_path));
  std::cerr << "qecho: wrote reference trace to " << args.out_path << "\n";
  return 0;
}

int run_train(const CommonArgs& args) {
  const qecho::ExperimentConfig cfg = load_with_overrides(args);
  const qecho::KoopmanModel model = qecho::train_model(cfg);
  ensure_parent_dir(args.out_path);
  qecho::save_model(model, fs::path(args.out_path));
  std::cerr << "qecho: wrote " << cfg.variant << " model to " << args.out_path << "\n";
  return 0;
}

int run_predict(const CommonArgs& args, const std::string& model_path) {
  const qecho::ExperimentConfig cfg = load_with_overrides(args);
  const qecho::KoopmanModel model = qecho::load_model(model_path);
  const qecho::PolarizationTrace trace = qecho::predict_surrogate(model, cfg);
  ensure_parent_dir(args.out_path);
  qecho::export_trace(trace, fs::path(args.out_path));
  std::cerr << "qecho: wrote surrogate trace to " << args.out_path << "\n";
  return 0;
}

int run_echo(const CommonArgs& args) {
  const qecho::ExperimentConfig cfg = load_with_overrides(args);
  const qecho::EchoRunOutputs out = qecho::run_photon_echo(cfg);
  const fs::path dir(args.out_path);
  fs::create_directories(dir);
  qecho::export_trace(out.reference, dir / "reference.csv");
  qecho::export_trace(out.surrogate, dir / "surrogate.csv");
  qecho::save_model(out.model, dir / "model.bin");
  qecho::write_report(qecho::report_entries(cfg, out.report), dir / "report.txt");
  std::cerr << "qecho: l2 = " << qecho::detail::g17(out.report.l2)
            << ", rel_peak = " << qecho::detail::g17(out.report.rel_peak) << "\n";
  std::cerr << "qecho: wrote reference.csv, surrogate.csv, model.bin, report.txt to "
            << args.out_path << "\n";
  return 0;
}

int run_sweep(const CommonArgs& args) {
  const qecho::ExperimentConfig cfg = load_with_overrides(args);
  std::vector<qecho::SweepRow> rows;
  std::string param_name;
  if (cfg.experiment == "range_sweep") {
    rows = qecho::run_range_sweep(cfg);
    param_name = "R";
  } else if (cfg.experiment == "m_sweep") {
    rows = qecho::run_m_sweep(cfg);
    param_name = "m";
  } else if (cfg.experiment == "convergence") {
    rows = qecho::run_convergence_study(cfg);
    param_name = "m";
  } else {
    throw qecho::ConfigError("sweep: config experiment '" + cfg.experiment +
                             "' is not a sweep; use the echo subcommand");
  }
  ensure_parent_dir(args.out_path);
  qecho::write_sweep_csv(rows, param_name, fs::path(args.out_path));
  std::cerr << "qecho: wrote " << rows.size() << " sweep rows to " << args.out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-echo reference simulation and bilinear Koopman surrogates"};
  app.require_subcommand(1);

  CommonArgs simulate_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Integrate the ensemble and export the polarization trace");
  add_common(simulate, simulate_args, "Output trace CSV path");

  CommonArgs train_args;
  CLI::App* train =
      app.add_subcommand("train", "Train the configured surrogate and save it");
  add_common(train, train_args, "Output model file path");

  CommonArgs predict_args;
  std::string model_path;
  CLI::App* predict = app.add_subcommand(
      "predict", "Propagate a saved surrogate over the configured ensemble");
  add_common(predict, predict_args, "Output trace CSV path");
  predict->add_option("--model", model_path, "Saved model file")->required();

  CommonArgs echo_args;
  CLI::App* echo = app.add_subcommand(
      "echo", "Reference + surrogate + error report in one run");
  add_common(echo, echo_args, "Output directory");

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the configured range/m sweep and export rows");
  add_common(sweep, sweep_args, "Output sweep CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (train->parsed()) return run_train(train_args);
    if (predict->parsed()) return run_predict(predict_args, model_path);
    if (echo->parsed()) return run_echo(echo_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const std::exception& e) {
    std::cerr << "qecho: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
