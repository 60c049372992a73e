#include "splidar/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splidar {

namespace {

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "rows") cfg.scene.rows = std::stoi(value);
      else if (key == "cols") cfg.scene.cols = std::stoi(value);
      else if (key == "frames") cfg.scene.n_frames = std::stoi(value);
      else if (key == "n_t") cfg.scene.n_t = std::stoi(value);
      else if (key == "bin_width") cfg.scene.bin_width = std::stod(value);
      else if (key == "beta") cfg.scene.beta = std::stod(value);
      else if (key == "sigma_rw") cfg.scene.sigma_rw = std::stod(value);
      else if (key == "neighbors") cfg.scene.neighbors = std::stoi(value);
      else if (key == "nu0") cfg.scene.nu0 = std::stod(value);
      else if (key == "refl_prior_mean") cfg.scene.refl_prior_mean = std::stod(value);
      else if (key == "refl_prior_shape") cfg.scene.refl_prior_shape = std::stod(value);
      else if (key == "faulty_pixels") cfg.scene.faulty_pixels = parse_int_list(value);
      else if (key == "threads") cfg.scene.threads = std::stoi(value);
      else if (key == "scenario") cfg.scenario = value;
      else if (key == "irf") cfg.irf_kind = value;
      else if (key == "irf_fwhm") cfg.irf_fwhm = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "msc") cfg.msc = std::stod(value);
      else if (key == "sbr") cfg.sbr = std::stod(value);
      else if (key == "sbr_values") cfg.sweep.sbr_values = parse_double_list(value);
      else if (key == "msc_values") cfg.sweep.msc_values = parse_double_list(value);
      else if (key == "n_mc") cfg.sweep.n_mc = std::stoi(value);
      else if (key == "eta") cfg.sweep.eta = std::stod(value);
      else if (key == "prior_mean") cfg.sweep.prior_mean = std::stod(value);
      else if (key == "prior_var") cfg.sweep.prior_var = std::stod(value);
      else if (key == "msl_bands") cfg.msl_bands = std::stoi(value);
      else throw std::runtime_error("unknown key '" + key + "'");
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(line_no) + " (" +
                               key + "): " + e.what());
    }
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.scene.rows < 1 || cfg.scene.cols < 1) {
    throw std::invalid_argument("rows and cols must be positive");
  }
  if (cfg.scene.n_t < 2) throw std::invalid_argument("n_t must be >= 2");
  if (cfg.scene.beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (cfg.scene.sigma_rw <= 0.0) {
    throw std::invalid_argument("sigma_rw must be positive");
  }
  if (cfg.scene.nu0 < 0.0 || cfg.scene.nu0 > 1.0) {
    throw std::invalid_argument("nu0 must be in [0,1]");
  }
  if (cfg.scene.neighbors < 1) throw std::invalid_argument("neighbors must be >= 1");
  if (cfg.sweep.n_mc < 1) throw std::invalid_argument("n_mc must be >= 1");
  if (cfg.sweep.eta <= 0.0) throw std::invalid_argument("eta must be positive");
  if (cfg.msc <= 0.0) throw std::invalid_argument("msc must be positive");
  if (cfg.sbr <= 0.0) throw std::invalid_argument("sbr must be positive");
  if (cfg.irf_fwhm <= 0.0) throw std::invalid_argument("irf_fwhm must be positive");
}

}  // namespace splidar
