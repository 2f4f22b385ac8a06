#include "pada/run_config.hpp"

#include <fstream>

#include <json.hpp>

namespace pada {

namespace {

using nlohmann::json;

template <typename T>
T typed(const json& j, const std::string& key, const std::string& origin) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::parse, origin + ": bad value for key '" + key + "'");
  }
}

}  // namespace

void apply_run_config_text(RunConfig& rc, const std::string& text,
                           const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, origin + ": " + e.what());
  }
  require(j.is_object(), ErrorCode::parse,
          origin + ": config must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    if (key == "grid_size") {
      rc.model.grid_size = typed<int>(value, key, origin);
      rc.sim.grid_size = rc.model.grid_size;
    } else if (key == "freq_half") {
      rc.model.freq_half = typed<int>(value, key, origin);
      rc.sim.freq_half = rc.model.freq_half;
    } else if (key == "seed") {
      rc.model.seed = typed<uint64_t>(value, key, origin);
      rc.sim.seed = rc.model.seed;
    } else if (key == "bandwidth_mu") {
      rc.model.bandwidth_mu = typed<double>(value, key, origin);
    } else if (key == "bandwidth_f") {
      rc.model.bandwidth_f = typed<double>(value, key, origin);
    } else if (key == "lag_window") {
      rc.model.lag_window = typed<int>(value, key, origin);
    } else if (key == "components") {
      rc.model.components = typed<int>(value, key, origin);
    } else if (key == "fve") {
      rc.model.fve = typed<double>(value, key, origin);
    } else if (key == "max_components") {
      rc.model.max_components = typed<int>(value, key, origin);
    } else if (key == "epsilon_l") {
      rc.model.epsilon_l = typed<double>(value, key, origin);
    } else if (key == "optimize_phase") {
      rc.model.optimize_phase = typed<bool>(value, key, origin);
    } else if (key == "phase_restarts") {
      rc.model.phase_restarts = typed<int>(value, key, origin);
    } else if (key == "phase_max_iter") {
      rc.model.phase_max_iter = typed<int>(value, key, origin);
    } else if (key == "phase_tol") {
      rc.model.phase_tol = typed<double>(value, key, origin);
    } else if (key == "map_max_iter") {
      rc.model.map_max_iter = typed<int>(value, key, origin);
    } else if (key == "map_tol") {
      rc.model.map_tol = typed<double>(value, key, origin);
    } else if (key == "posterior_dim_guard") {
      rc.model.posterior_dim_guard = typed<long>(value, key, origin);
    } else if (key == "ar_max_order") {
      rc.model.ar_max_order = typed<int>(value, key, origin);
    } else if (key == "band_draws") {
      rc.model.band_draws = typed<int>(value, key, origin);
    } else if (key == "threads") {
      rc.model.threads = typed<int>(value, key, origin);
    } else if (key == "case") {
      int c = typed<int>(value, key, origin);
      require(c == 1 || c == 2, ErrorCode::invalid_argument,
              origin + ": case must be 1 or 2");
      rc.sim.scase = c == 1 ? SimCase::case1 : SimCase::case2;
    } else if (key == "curve_count") {
      rc.sim.curve_count = typed<int>(value, key, origin);
    } else if (key == "future_count") {
      rc.sim.future_count = typed<int>(value, key, origin);
    } else if (key == "n_min") {
      rc.sim.n_min = typed<int>(value, key, origin);
    } else if (key == "n_max") {
      rc.sim.n_max = typed<int>(value, key, origin);
    } else if (key == "rho") {
      rc.sim.rho = typed<double>(value, key, origin);
    } else if (key == "input") {
      rc.input = typed<std::string>(value, key, origin);
    } else if (key == "bundle") {
      rc.bundle = typed<std::string>(value, key, origin);
    } else if (key == "out") {
      rc.out = typed<std::string>(value, key, origin);
    } else if (key == "horizon") {
      rc.horizon = typed<int>(value, key, origin);
    } else if (key == "level") {
      rc.level = typed<double>(value, key, origin);
    } else if (key == "reps") {
      rc.reps = typed<int>(value, key, origin);
    } else if (key == "methods") {
      rc.methods = typed<std::vector<std::string>>(value, key, origin);
    } else {
      fail(ErrorCode::unknown_key, origin + ": unknown key '" + key + "'");
    }
  }
  rc.model.validate();
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  RunConfig rc;
  apply_run_config_text(rc, text, path);
  return rc;
}

}  // namespace pada
