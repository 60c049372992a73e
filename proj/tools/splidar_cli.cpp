#include "splidar/config.hpp"
#include "splidar/io.hpp"
#include "splidar/msl.hpp"
#include "splidar/pipeline.hpp"
#include "splidar/sim.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace splidar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

/// Resolves the IRF selector: "gaussian", "emg", or a CSV path.
Irf resolve_irf(const RunConfig& cfg, int n_t) {
  if (cfg.irf_kind == "gaussian") {
    return make_gaussian_irf(cfg.irf_fwhm, n_t / 2, n_t, cfg.scene.bin_width);
  }
  if (cfg.irf_kind == "emg") {
    return make_emg_irf(cfg.irf_fwhm, n_t / 2, n_t, cfg.scene.bin_width);
  }
  int clamped = 0;
  const ArrayXd raw = read_irf_csv(cfg.irf_kind, &clamped);
  if (clamped > 0) {
    std::cerr << "warning: clamped " << clamped << " negative IRF entries to 0\n";
  }
  return normalize_irf(raw, cfg.scene.bin_width);
}

std::vector<Irf> resolve_band_irfs(const RunConfig& cfg, int n_t) {
  if (cfg.irf_kind != "gaussian" && cfg.irf_kind != "emg") {
    int clamped = 0;
    const auto raws = read_multiband_irf_csv(cfg.irf_kind, &clamped);
    if (clamped > 0) {
      std::cerr << "warning: clamped " << clamped << " negative IRF entries to 0\n";
    }
    std::vector<Irf> irfs;
    for (const auto& raw : raws) irfs.push_back(normalize_irf(raw, cfg.scene.bin_width));
    return irfs;
  }
  // Synthetic band set: alternating symmetric/skewed shapes with spread
  // widths, all peaked at the same bin.
  std::vector<Irf> irfs;
  for (int l = 0; l < cfg.msl_bands; ++l) {
    const double fwhm = cfg.irf_fwhm * (0.8 + 0.15 * l);
    if (l % 2 == 0) {
      irfs.push_back(make_gaussian_irf(fwhm, n_t / 2, n_t, cfg.scene.bin_width));
    } else {
      irfs.push_back(make_emg_irf(fwhm, n_t / 2, n_t, cfg.scene.bin_width));
    }
  }
  return irfs;
}

void write_manifest(const fs::path& path, const RunConfig& cfg,
                    const std::string& command) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "command=" << command << '\n'
      << "format_version=1\n"
      << "seed=" << cfg.seed << '\n'
      << "rows=" << cfg.scene.rows << '\n'
      << "cols=" << cfg.scene.cols << '\n'
      << "frames=" << cfg.scene.n_frames << '\n'
      << "n_t=" << cfg.scene.n_t << '\n'
      << "scenario=" << cfg.scenario << '\n'
      << "irf=" << cfg.irf_kind << '\n'
      << "irf_fwhm=" << cfg.irf_fwhm << '\n'
      << "msc=" << cfg.msc << '\n'
      << "sbr=" << cfg.sbr << '\n';
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_path,
                 const fs::path& truth_path) {
  const Irf irf = resolve_irf(cfg, cfg.scene.n_t);
  SceneSpec spec;
  spec.scenario = scenario_from_string(cfg.scenario);
  spec.rows = cfg.scene.rows;
  spec.cols = cfg.scene.cols;
  spec.n_frames = cfg.scene.n_frames;
  spec.n_t = cfg.scene.n_t;
  spec.msc = cfg.msc;
  spec.sbr = cfg.sbr;
  spec.seed = cfg.seed;
  make_scene_video(spec, irf, out_path, truth_path);
  write_manifest(out_path.string() + ".manifest", cfg, "simulate");
  std::cout << "wrote " << out_path.string() << " (" << spec.n_frames
            << " frames) and " << truth_path.string() << '\n';
  return kExitOk;
}

int cmd_reconstruct(RunConfig cfg, const fs::path& input,
                    const fs::path& out_dir) {
  SplfReader reader(input);
  cfg.scene.rows = reader.header().rows;
  cfg.scene.cols = reader.header().cols;
  cfg.scene.n_t = static_cast<int>(reader.header().n_t);
  const Irf irf = resolve_irf(cfg, cfg.scene.n_t);
  Pipeline pipeline(cfg.scene, irf);
  CsvSink sink(out_dir, cfg.scene.bin_width);
  const SequenceSummary summary =
      run_sequence(reader, pipeline, [&](const FrameResult& r) { sink(r); });
  std::cout << "frames=" << summary.frames
            << " mean_latency_ms=" << summary.mean_latency_ms
            << " detection_rate=" << summary.detection_rate << '\n';
  if (summary.truncated) {
    std::cerr << "warning: input truncated after " << summary.frames
              << " complete frames\n";
  }
  return kExitOk;
}

std::vector<EstimatorSpec> parse_estimators(const std::string& names,
                                            const std::vector<double>& betas,
                                            bool msl) {
  std::vector<EstimatorSpec> out;
  std::stringstream ss(names);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name == "oracle") out.push_back({EstimatorKind::Oracle});
    else if (name == "bf") out.push_back({EstimatorKind::BF});
    else if (name == "hsm" && !msl) out.push_back({EstimatorKind::HSM});
    else if (name == "pb") {
      for (double beta : betas) out.push_back({EstimatorKind::PB, beta});
    } else {
      throw std::invalid_argument("unknown estimator: " + name);
    }
  }
  if (out.empty()) throw std::invalid_argument("no estimators selected");
  return out;
}

int cmd_benchmark(const RunConfig& cfg, const std::string& estimators,
                  const std::vector<double>& betas, const fs::path& out_path) {
  SweepSpec spec = cfg.sweep;
  spec.seed = cfg.seed;
  if (spec.sbr_values.empty()) {
    spec.sbr_values = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  }
  if (spec.msc_values.empty()) {
    spec.msc_values = {10.0, 35.0, 100.0, 300.0, 1000.0};
  }
  std::vector<SweepRow> rows;
  if (cfg.msl_bands > 0) {
    spec.estimators = parse_estimators(estimators, betas, true);
    rows = msl_sweep(spec, resolve_band_irfs(cfg, cfg.scene.n_t));
  } else {
    spec.estimators = parse_estimators(estimators, betas, false);
    rows = sweep(spec, resolve_irf(cfg, cfg.scene.n_t));
  }
  write_sweep_csv(out_path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_path.string() << '\n';
  return kExitOk;
}

int cmd_irf_info(const RunConfig& cfg) {
  const Irf irf = resolve_irf(cfg, cfg.scene.n_t);
  const DepthGrid grid = default_grid(irf);
  std::cout << "bins=" << irf.n_bins() << " peak_bin=" << irf.peak_bin
            << " fwhm_bins=" << irf.fwhm_bins
            << " support=[" << irf.support_begin << ',' << irf.support_end
            << ") grid=[" << grid.d_min << ',' << grid.d_max << "]\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-photon lidar simulation, reconstruction, and benchmarking"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file")
      ->check(CLI::ExistingFile);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--irf", cfg.irf_kind, "gaussian | emg | IRF CSV path");
    sub->add_option("--irf-fwhm", cfg.irf_fwhm, "IRF FWHM in bins");
    sub->add_option("--nt", cfg.scene.n_t, "time bins per histogram");
    sub->add_option("--threads", cfg.scene.threads, "worker threads (0 = all cores)");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic SPLF video");
  fs::path sim_out = "scene.splf", sim_truth = "truth.csv";
  sim_cmd->add_option("--scenario", cfg.scenario, "static | ramp | ball");
  sim_cmd->add_option("--rows", cfg.scene.rows, "pixel rows");
  sim_cmd->add_option("--cols", cfg.scene.cols, "pixel cols");
  sim_cmd->add_option("--frames", cfg.scene.n_frames, "frame count");
  sim_cmd->add_option("--msc", cfg.msc, "mean signal count per pixel");
  sim_cmd->add_option("--sbr", cfg.sbr, "signal-to-background ratio");
  sim_cmd->add_option("--out", sim_out, "output SPLF path");
  sim_cmd->add_option("--truth", sim_truth, "output truth CSV path");
  add_common(sim_cmd);

  auto* rec_cmd = app.add_subcommand("reconstruct", "run the online filter on an SPLF video");
  fs::path rec_in, rec_out = "recon";
  rec_cmd->add_option("--input", rec_in, "input SPLF file")->required();
  rec_cmd->add_option("--out-dir", rec_out, "output directory");
  rec_cmd->add_option("--beta", cfg.scene.beta, "divergence parameter");
  rec_cmd->add_option("--sigma-rw", cfg.scene.sigma_rw, "random-walk std (bins)");
  rec_cmd->add_option("--m", cfg.scene.neighbors, "neighborhood size (1 or 5)");
  rec_cmd->add_option("--nu0", cfg.scene.nu0, "center neighbor weight");
  rec_cmd->add_option("--refl-prior-mean", cfg.scene.refl_prior_mean,
                      "expected signal count when a target is present");
  rec_cmd->add_option("--faulty", cfg.scene.faulty_pixels,
                      "faulty pixel indices (row-major)");
  add_common(rec_cmd);

  auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo p_d sweep");
  fs::path bench_out = "sweep.csv";
  std::string estimators = "oracle,bf,hsm,pb";
  std::vector<double> betas = {0.1, 0.3, 0.5, 0.7, 1.0};
  bench_cmd->add_option("--sbr", cfg.sweep.sbr_values, "SBR values")->delimiter(',');
  bench_cmd->add_option("--msc", cfg.sweep.msc_values, "MSC values")->delimiter(',');
  bench_cmd->add_option("--nmc", cfg.sweep.n_mc, "trials per cell");
  bench_cmd->add_option("--eta", cfg.sweep.eta, "acceptable depth error (bins)");
  bench_cmd->add_option("--prior-mean", cfg.sweep.prior_mean, "depth prior mean");
  bench_cmd->add_option("--prior-var", cfg.sweep.prior_var, "depth prior variance");
  bench_cmd->add_option("--estimators", estimators, "comma list: oracle,bf,hsm,pb");
  bench_cmd->add_option("--beta-list", betas, "beta values for pb")->delimiter(',');
  bench_cmd->add_flag_callback("--msl", [&] { if (cfg.msl_bands == 0) cfg.msl_bands = 4; },
                               "multispectral MLE-only sweep");
  bench_cmd->add_option("--bands", cfg.msl_bands, "number of spectral bands");
  bench_cmd->add_option("--out", bench_out, "output CSV path");
  add_common(bench_cmd);

  auto* info_cmd = app.add_subcommand("irf-info", "print IRF diagnostics");
  add_common(info_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      // Re-apply: config file values, then flags provided on the command
      // line take precedence by re-parsing.
      RunConfig base;
      apply_config_file(config_path, base);
      cfg.scene.bin_width = base.scene.bin_width;  // no flag for this one
      // Flags already wrote into cfg during parse; copy file values only
      // for fields the user did not pass.
      // Simplicity: fields with flags keep their parsed values unless the
      // flag was absent, in which case the file value applies.
      auto take = [&](auto& dst, const auto& file_value, const CLI::App* sub,
                      const std::string& flag) {
        if (sub->count(flag) == 0) dst = file_value;
      };
      CLI::App* active = app.get_subcommands().front();
      take(cfg.seed, base.seed, active, "--seed");
      take(cfg.scene.n_t, base.scene.n_t, active, "--nt");
      take(cfg.scene.threads, base.scene.threads, active, "--threads");
      if (active->get_option_no_throw("--irf")) {
        take(cfg.irf_kind, base.irf_kind, active, "--irf");
        take(cfg.irf_fwhm, base.irf_fwhm, active, "--irf-fwhm");
      }
      if (active == sim_cmd) {
        take(cfg.scenario, base.scenario, active, "--scenario");
        take(cfg.scene.rows, base.scene.rows, active, "--rows");
        take(cfg.scene.cols, base.scene.cols, active, "--cols");
        take(cfg.scene.n_frames, base.scene.n_frames, active, "--frames");
        take(cfg.msc, base.msc, active, "--msc");
        take(cfg.sbr, base.sbr, active, "--sbr");
      } else if (active == rec_cmd) {
        take(cfg.scene.beta, base.scene.beta, active, "--beta");
        take(cfg.scene.sigma_rw, base.scene.sigma_rw, active, "--sigma-rw");
        take(cfg.scene.neighbors, base.scene.neighbors, active, "--m");
        take(cfg.scene.nu0, base.scene.nu0, active, "--nu0");
        take(cfg.scene.refl_prior_mean, base.scene.refl_prior_mean, active,
             "--refl-prior-mean");
        take(cfg.scene.faulty_pixels, base.scene.faulty_pixels, active, "--faulty");
      } else if (active == bench_cmd) {
        take(cfg.sweep.sbr_values, base.sweep.sbr_values, active, "--sbr");
        take(cfg.sweep.msc_values, base.sweep.msc_values, active, "--msc");
        take(cfg.sweep.n_mc, base.sweep.n_mc, active, "--nmc");
        take(cfg.sweep.eta, base.sweep.eta, active, "--eta");
        take(cfg.sweep.prior_mean, base.sweep.prior_mean, active, "--prior-mean");
        take(cfg.sweep.prior_var, base.sweep.prior_var, active, "--prior-var");
        take(cfg.msl_bands, base.msl_bands, active, "--bands");
      }
    }
    validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(cfg, sim_out, sim_truth);
    if (rec_cmd->parsed()) return cmd_reconstruct(cfg, rec_in, rec_out);
    if (bench_cmd->parsed()) return cmd_benchmark(cfg, estimators, betas, bench_out);
    if (info_cmd->parsed()) return cmd_irf_info(cfg);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::runtime_error& e) {
    // I/O-flavored failures (missing/corrupt files) come through here.
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
