#include "pada/bundle.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace pada {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kFormat = "pada-model";
constexpr int kVersion = 1;

void append_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int b = 0; b < 8; ++b)
    out.push_back(char((bits >> (8 * b)) & 0xff));
}

double decode_f64(const std::string& bytes, size_t i) {
  uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= uint64_t(uint8_t(bytes[8 * i + size_t(b)])) << (8 * b);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string encode_matrix(const MatrixXd& m) {
  std::string out;
  out.reserve(size_t(m.size()) * 8);
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r) append_f64(out, m(r, c));
  return out;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot write " + path);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  f.flush();
  require(f.good(), ErrorCode::io, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

struct ArrayWriter {
  const std::string& dir;
  json entries = json::object();

  void add(const std::string& name, const MatrixXd& m) {
    std::string bytes = encode_matrix(m);
    std::string file = name + ".f64";
    write_file(dir + "/" + file, bytes);
    entries[name] = {
        {"cols", m.cols()},
        {"file", file},
        {"fnv1a64", fnv1a64_hex(
                        reinterpret_cast<const unsigned char*>(bytes.data()),
                        bytes.size())},
        {"rows", m.rows()}};
  }
};

struct ArrayReader {
  const std::string& dir;
  const json& entries;

  MatrixXd get(const std::string& name) const {
    const json& e = entries.at(name);
    long rows = e.at("rows").get<long>();
    long cols = e.at("cols").get<long>();
    std::string path = dir + "/" + e.at("file").get<std::string>();
    std::string bytes = read_file(path);
    require(bytes.size() == size_t(rows * cols) * 8, ErrorCode::checksum,
            "bundle: wrong size for " + path);
    std::string digest = fnv1a64_hex(
        reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    require(digest == e.at("fnv1a64").get<std::string>(), ErrorCode::checksum,
            "bundle: checksum mismatch for " + path);
    MatrixXd m(rows, cols);
    size_t i = 0;
    for (long c = 0; c < cols; ++c)
      for (long r = 0; r < rows; ++r) m(r, c) = decode_f64(bytes, i++);
    return m;
  }
  bool has(const std::string& name) const { return entries.contains(name); }
};

json config_to_json(const ModelConfig& cfg) {
  require(cfg.bandwidth_mu && cfg.bandwidth_f && cfg.lag_window &&
              cfg.components,
          ErrorCode::invalid_argument,
          "bundle: config must carry resolved bandwidths, lag window and "
          "component count");
  return json{{"ar_max_order", cfg.ar_max_order},
              {"band_draws", cfg.band_draws},
              {"bandwidth_f", *cfg.bandwidth_f},
              {"bandwidth_mu", *cfg.bandwidth_mu},
              {"components", *cfg.components},
              {"epsilon_l", cfg.epsilon_l},
              {"freq_half", cfg.freq_half},
              {"fve", cfg.fve},
              {"grid_size", cfg.grid_size},
              {"lag_window", *cfg.lag_window},
              {"map_max_iter", cfg.map_max_iter},
              {"map_tol", cfg.map_tol},
              {"max_components", cfg.max_components},
              {"optimize_phase", cfg.optimize_phase},
              {"phase_max_iter", cfg.phase_max_iter},
              {"phase_restarts", cfg.phase_restarts},
              {"phase_tol", cfg.phase_tol},
              {"posterior_dim_guard", cfg.posterior_dim_guard},
              {"seed", cfg.seed},
              {"threads", cfg.threads}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.grid_size = j.at("grid_size").get<int>();
  cfg.freq_half = j.at("freq_half").get<int>();
  cfg.bandwidth_mu = j.at("bandwidth_mu").get<double>();
  cfg.bandwidth_f = j.at("bandwidth_f").get<double>();
  cfg.lag_window = j.at("lag_window").get<int>();
  cfg.components = j.at("components").get<int>();
  cfg.fve = j.at("fve").get<double>();
  cfg.max_components = j.at("max_components").get<int>();
  cfg.epsilon_l = j.at("epsilon_l").get<double>();
  cfg.optimize_phase = j.at("optimize_phase").get<bool>();
  cfg.phase_restarts = j.at("phase_restarts").get<int>();
  cfg.phase_max_iter = j.at("phase_max_iter").get<int>();
  cfg.phase_tol = j.at("phase_tol").get<double>();
  cfg.map_max_iter = j.at("map_max_iter").get<int>();
  cfg.map_tol = j.at("map_tol").get<double>();
  cfg.posterior_dim_guard = j.at("posterior_dim_guard").get<long>();
  cfg.ar_max_order = j.at("ar_max_order").get<int>();
  cfg.band_draws = j.at("band_draws").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.threads = j.at("threads").get<int>();
  return cfg;
}

json smoother_to_json(const SmootherDiagnostics& d) {
  return json{{"empty_cells", d.empty_cells},
              {"max_bandwidth_used", d.max_bandwidth_used},
              {"widened_cells", d.widened_cells}};
}

SmootherDiagnostics smoother_from_json(const json& j) {
  SmootherDiagnostics d;
  d.empty_cells = j.at("empty_cells").get<int>();
  d.max_bandwidth_used = j.at("max_bandwidth_used").get<double>();
  d.widened_cells = j.at("widened_cells").get<int>();
  return d;
}

std::vector<double> to_std(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), long(v.size()));
}

}  // namespace

std::string fnv1a64_hex(const unsigned char* p, size_t n) {
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= uint64_t(p[i]);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return std::string(buf);
}

void write_model_bundle(const std::string& dir, const ModelBundle& bundle) {
  const FitModel& m = bundle.model;
  const int K = m.bank.component_count();
  const int J = m.scores.curve_count;
  require(m.wspec.component_count() == K &&
              m.scores.component_count() == K,
          ErrorCode::dimension_mismatch,
          "bundle: component counts disagree across bank, spectrum, scores");
  require(bundle.curve_ids.empty() || int(bundle.curve_ids.size()) == J,
          ErrorCode::dimension_mismatch,
          "bundle: curve id count differs from curve count");

  fs::create_directories(dir);
  ArrayWriter arrays{dir};
  arrays.add("mean", m.mean);
  for (int k = 0; k < K; ++k) {
    const FilterComponent& comp = m.bank.comps[size_t(k)];
    std::string base = "comp" + std::to_string(k) + "_";
    arrays.add(base + "filters", comp.filters);
    MatrixXd phase(comp.phase.size(), 2);
    phase.col(0) = comp.phase.real();
    phase.col(1) = comp.phase.imag();
    arrays.add(base + "phase", phase);
    arrays.add(base + "spectrum", comp.spectrum);
    arrays.add(base + "eta", m.wspec.eta[size_t(k)]);
    arrays.add(base + "xi", m.scores.xi[size_t(k)]);
  }
  if (m.scores.joint_cov) arrays.add("joint_cov", *m.scores.joint_cov);

  json comps = json::array();
  for (int k = 0; k < K; ++k) {
    const FilterComponent& comp = m.bank.comps[size_t(k)];
    comps.push_back(json{{"lag_count", comp.lag_count()},
                         {"lag_min", comp.lag_min},
                         {"sup_norm", comp.sup_norm}});
  }

  const FitDiagnostics& d = m.diag;
  json diag{{"alignment_flags", d.alignment_flags},
            {"bandwidth_f", d.bandwidth_f},
            {"bandwidth_mu", d.bandwidth_mu},
            {"component_variance", to_std(d.component_variance)},
            {"exact_scores", d.exact_scores},
            {"fve_achieved", d.fve_achieved},
            {"lag_spans", d.lag_spans},
            {"lag_window", d.lag_window},
            {"mean_smoother", smoother_to_json(d.mean_smoother)},
            {"noise_clamped", d.noise_clamped},
            {"phase_objectives", d.phase_objectives},
            {"small_gap_frequencies", d.small_gap_frequencies},
            {"sup_norms", d.sup_norms},
            {"surface_smoother", smoother_to_json(d.surface_smoother)},
            {"total_variance", d.total_variance}};

  json manifest{{"arrays", arrays.entries},
                {"components", comps},
                {"config", config_to_json(m.cfg)},
                {"curve_count", J},
                {"curve_ids", bundle.curve_ids},
                {"diagnostics", diag},
                {"format", kFormat},
                {"freq_half", m.freqs.half_size()},
                {"grid_size", m.grid.size()},
                {"sigma2", m.sigma2},
                {"version", kVersion}};
  write_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

ModelBundle read_model_bundle(const std::string& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir + "/manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, "bundle: bad manifest in " + dir + ": " + e.what());
  }
  try {
    require(manifest.at("format").get<std::string>() == kFormat,
            ErrorCode::parse, "bundle: not a model bundle");
    require(manifest.at("version").get<int>() == kVersion, ErrorCode::parse,
            "bundle: unsupported version");
    const int G = manifest.at("grid_size").get<int>();
    const int half = manifest.at("freq_half").get<int>();
    const int J = manifest.at("curve_count").get<int>();
    TimeGrid grid = TimeGrid::uniform(G);
    FrequencyGrid freqs(half);
    ArrayReader arrays{dir, manifest.at("arrays")};

    FilterBank bank(grid, freqs);
    WhittleSpectrum wspec;
    wspec.curve_count = J;
    ScoreSet scores;
    scores.curve_count = J;
    const json& comps = manifest.at("components");
    for (size_t k = 0; k < comps.size(); ++k) {
      const json& cj = comps[k];
      std::string base = "comp" + std::to_string(k) + "_";
      FilterComponent comp;
      comp.lag_min = cj.at("lag_min").get<int>();
      comp.sup_norm = cj.at("sup_norm").get<double>();
      comp.filters = arrays.get(base + "filters");
      require(comp.filters.rows() == G &&
                  comp.filters.cols() == cj.at("lag_count").get<long>(),
              ErrorCode::dimension_mismatch,
              "bundle: filter shape disagrees with manifest");
      MatrixXd phase = arrays.get(base + "phase");
      require(phase.rows() == freqs.size() && phase.cols() == 2,
              ErrorCode::dimension_mismatch, "bundle: bad phase shape");
      comp.phase = phase.col(0) + cplx(0.0, 1.0) * phase.col(1);
      comp.spectrum = arrays.get(base + "spectrum");
      require(comp.spectrum.size() == freqs.size(),
              ErrorCode::dimension_mismatch, "bundle: bad spectrum length");
      wspec.eta.push_back(arrays.get(base + "eta"));
      VectorXd xi = arrays.get(base + "xi");
      scores.lag_span.push_back(comp.lag_span());
      require(xi.size() == J + 2 * comp.lag_span(),
              ErrorCode::dimension_mismatch, "bundle: bad score length");
      scores.xi.push_back(std::move(xi));
      bank.comps.push_back(std::move(comp));
    }
    if (arrays.has("joint_cov")) scores.joint_cov = arrays.get("joint_cov");
    scores.validate();
    wspec.validate();

    VectorXd mean = arrays.get("mean");
    require(mean.size() == G, ErrorCode::dimension_mismatch,
            "bundle: bad mean length");

    const json& dj = manifest.at("diagnostics");
    FitDiagnostics diag;
    diag.bandwidth_mu = dj.at("bandwidth_mu").get<double>();
    diag.bandwidth_f = dj.at("bandwidth_f").get<double>();
    diag.lag_window = dj.at("lag_window").get<int>();
    diag.component_variance =
        to_eigen(dj.at("component_variance").get<std::vector<double>>());
    diag.total_variance = dj.at("total_variance").get<double>();
    diag.fve_achieved = dj.at("fve_achieved").get<double>();
    diag.phase_objectives =
        dj.at("phase_objectives").get<std::vector<double>>();
    diag.lag_spans = dj.at("lag_spans").get<std::vector<int>>();
    diag.sup_norms = dj.at("sup_norms").get<std::vector<double>>();
    diag.noise_clamped = dj.at("noise_clamped").get<bool>();
    diag.exact_scores = dj.at("exact_scores").get<bool>();
    diag.small_gap_frequencies = dj.at("small_gap_frequencies").get<int>();
    diag.alignment_flags = dj.at("alignment_flags").get<int>();
    diag.mean_smoother = smoother_from_json(dj.at("mean_smoother"));
    diag.surface_smoother = smoother_from_json(dj.at("surface_smoother"));

    FitModel model{std::move(grid),
                   std::move(freqs),
                   std::move(mean),
                   std::move(bank),
                   std::move(wspec),
                   manifest.at("sigma2").get<double>(),
                   std::move(scores),
                   diag,
                   config_from_json(manifest.at("config"))};
    std::vector<long> ids =
        manifest.at("curve_ids").get<std::vector<long>>();
    require(ids.empty() || int(ids.size()) == J,
            ErrorCode::dimension_mismatch,
            "bundle: curve id count differs from curve count");
    return ModelBundle{std::move(model), std::move(ids)};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse,
         "bundle: manifest field error in " + dir + ": " + e.what());
  }
}

}  // namespace pada
