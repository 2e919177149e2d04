#include "qcdma/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qcdma/csv.hpp"
#include "qcdma/spectral.hpp"

namespace qcdma::scenario {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string iso_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", &tm);
  return buf;
}

// Chunked deterministic parallel map: results land by index, so the output
// is independent of the number of workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int n_workers = std::max(1, threads);
  if (n_workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Config parsing

void parse_duffing(const json& j, chaos::DuffingParams& p, std::vector<std::string>& errors) {
  p.omega0 = j.value("omega0", p.omega0);
  p.mu = j.value("mu", p.mu);
  p.gamma = j.value("gamma", p.gamma);
  p.f_d = j.value("f_d", p.f_d);
  p.omega_d = j.value("omega_d", p.omega_d);
  p.k_I = j.value("k_I", p.k_I);
  p.g_fo = j.value("g_fo", p.g_fo);
  p.divergence_bound = j.value("divergence_bound", p.divergence_bound);
  if (j.contains("well")) {
    const std::string well = j["well"];
    if (well == "single")
      p.well = chaos::WellShape::SingleSoftening;
    else if (well == "double")
      p.well = chaos::WellShape::DoubleWell;
    else
      errors.push_back("duffing.well must be \"single\" or \"double\"");
  }
}

chaos::OscState parse_state(const json& j, const char* name, std::vector<std::string>& errors) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    errors.push_back(std::string(name) + " must be a [x, p] number pair");
    return {};
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> names = {"chaos", "sync", "spectrum",
                                                 "fidelity-sweep", "p0-sweep", "capacity"};
  return names;
}

}  // namespace

ValidationResult validate_config(const std::string& raw_text) {
  ValidationResult result;
  json root;
  try {
    root = json::parse(raw_text);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("parse failure: ") + e.what());
    return result;
  }
  if (!root.is_object()) {
    result.errors.push_back("config root must be a JSON object");
    return result;
  }

  auto& errors = result.errors;
  ScenarioConfig cfg;
  cfg.raw_text = raw_text;

  static const std::vector<std::string> known_keys = {
      "schema", "scenario", "seed",    "duffing",        "integration", "spectral",
      "sim",    "channel",  "sweep",   "capacity_sweep", "output",      "threads",
      "p0"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(known_keys.begin(), known_keys.end(), it.key()) == known_keys.end())
      errors.push_back("unknown top-level key: " + it.key());
  }

  const std::string schema = root.value("schema", std::string(kConfigSchema));
  if (schema != kConfigSchema)
    errors.push_back("unsupported schema \"" + schema + "\" (expected " + kConfigSchema + ")");

  if (!root.contains("scenario") || !root["scenario"].is_string()) {
    errors.push_back("scenario is required");
  } else {
    cfg.scenario = root["scenario"];
    const auto& names = known_scenarios();
    if (std::find(names.begin(), names.end(), cfg.scenario) == names.end())
      errors.push_back("unknown scenario \"" + cfg.scenario + "\"");
  }

  if (!root.contains("seed") || !root["seed"].is_number_unsigned()) {
    errors.push_back("seed is required and must be a non-negative integer");
  } else {
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  try {
    if (root.contains("duffing")) parse_duffing(root["duffing"], cfg.duffing, errors);
    cfg.duffing.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }

  if (root.contains("integration")) {
    const json& j = root["integration"];
    cfg.integration.dt_periods = j.value("dt_periods", cfg.integration.dt_periods);
    cfg.integration.transient_periods =
        j.value("transient_periods", cfg.integration.transient_periods);
    cfg.integration.horizon_periods = j.value("horizon_periods", cfg.integration.horizon_periods);
    cfg.integration.output_stride = j.value("output_stride", cfg.integration.output_stride);
    if (j.contains("init_a")) cfg.integration.init_a = parse_state(j["init_a"], "integration.init_a", errors);
    if (j.contains("init_b")) cfg.integration.init_b = parse_state(j["init_b"], "integration.init_b", errors);
    if (!(cfg.integration.dt_periods > 0)) errors.push_back("integration.dt_periods must be > 0");
    if (!(cfg.integration.horizon_periods > 0)) errors.push_back("integration.horizon_periods must be > 0");
    if (cfg.integration.transient_periods < 0) errors.push_back("integration.transient_periods must be >= 0");
    if (cfg.integration.output_stride < 1) errors.push_back("integration.output_stride must be >= 1");
  }

  if (root.contains("spectral")) {
    const json& j = root["spectral"];
    cfg.spectral.segments = j.value("segments", cfg.spectral.segments);
    cfg.spectral.band_threshold = j.value("band_threshold", cfg.spectral.band_threshold);
    cfg.spectral.rect_window = j.value("rect_window", cfg.spectral.rect_window);
    if (cfg.spectral.segments < 1) errors.push_back("spectral.segments must be >= 1");
    if (!(cfg.spectral.band_threshold > 0)) errors.push_back("spectral.band_threshold must be > 0");
  }

  if (root.contains("sim")) {
    const json& j = root["sim"];
    cfg.sim.dim = j.value("dim", cfg.sim.dim);
    cfg.sim.n_samples = j.value("n_samples", cfg.sim.n_samples);
    cfg.sim.decorrelation_gap = j.value("decorrelation_gap", cfg.sim.decorrelation_gap);
    cfg.sim.working_dim = j.value("working_dim", cfg.sim.working_dim);
    cfg.sim.leak_tol = j.value("leak_tol", cfg.sim.leak_tol);
    cfg.sim.paper_asymmetry = j.value("paper_asymmetry", cfg.sim.paper_asymmetry);
    cfg.sim.detrend_delta = j.value("detrend_delta", cfg.sim.detrend_delta);
    try {
      cfg.sim.validate();
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  if (root.contains("channel")) {
    const json& j = root["channel"];
    cfg.channel.eta = j.value("eta", cfg.channel.eta);
    cfg.channel.n_mean = j.value("n_mean", cfg.channel.n_mean);
    cfg.channel.n_pairs = j.value("N", cfg.channel.n_pairs);
    cfg.channel.M = j.value("M", cfg.channel.M);
    cfg.channel.bw_ratio = j.value("bw_ratio", cfg.channel.bw_ratio);
    cfg.channel.gain = j.value("gain", cfg.channel.gain);
    cfg.channel.split_energy = j.value("split_energy", cfg.channel.split_energy);
    try {
      cfg.channel.validate();
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  if (root.contains("capacity_sweep")) {
    const json& j = root["capacity_sweep"];
    if (j.contains("n_grid")) cfg.capacity_sweep.n_grid = j["n_grid"].get<std::vector<int>>();
    if (j.contains("eta_grid"))
      cfg.capacity_sweep.eta_grid = j["eta_grid"].get<std::vector<double>>();
    for (int n : cfg.capacity_sweep.n_grid)
      if (n < 1) errors.push_back("capacity_sweep.n_grid entries must be >= 1");
  }

  if (root.contains("sweep")) {
    const json& j = root["sweep"];
    cfg.sweep.parameter = j.value("parameter", cfg.sweep.parameter);
    cfg.sweep.start = j.value("start", cfg.sweep.start);
    cfg.sweep.stop = j.value("stop", cfg.sweep.stop);
    cfg.sweep.steps = j.value("steps", cfg.sweep.steps);
    if (cfg.sweep.steps < 1) errors.push_back("sweep.steps must be >= 1");
    static const std::vector<std::string> sweepable = {"f_d", "omega_d", "gamma",
                                                       "mu", "k_I", "g_fo", "p0"};
    if (std::find(sweepable.begin(), sweepable.end(), cfg.sweep.parameter) == sweepable.end())
      errors.push_back("sweep.parameter \"" + cfg.sweep.parameter + "\" is not sweepable");
  }

  if (root.contains("output")) {
    const json& j = root["output"];
    cfg.out_dir = j.value("directory", cfg.out_dir.string());
    cfg.plots = j.value("plots", cfg.plots);
  }
  cfg.threads = root.value("threads", cfg.threads);
  if (cfg.threads < 1) errors.push_back("threads must be >= 1");
  cfg.p0 = root.value("p0", cfg.p0);
  if (!(cfg.p0 >= 0.0 && cfg.p0 <= 1.0)) errors.push_back("p0 must lie in [0, 1]");

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string default_config_text(const std::string& scenario_name) {
  json j;
  j["schema"] = kConfigSchema;
  j["scenario"] = scenario_name;
  j["seed"] = 1;
  j["duffing"] = {{"omega0", 1.0}, {"mu", 0.25},  {"gamma", 0.1},
                  {"f_d", 36.0},   {"omega_d", 0.9}, {"k_I", 10.0},
                  {"g_fo", 0.03},  {"well", "double"}};
  j["integration"] = {{"dt_periods", 1e-3},
                      {"transient_periods", 300},
                      {"horizon_periods", 2500},
                      {"init_a", {0.1, 0.0}},
                      {"init_b", {0.11, 0.0}},
                      {"output_stride", 25}};
  j["spectral"] = {{"segments", 8}, {"band_threshold", 1e-6}};
  j["sim"] = {{"dim", 8}, {"n_samples", 400}, {"decorrelation_gap", 5}};
  j["p0"] = 0.6;
  j["threads"] = 1;
  j["output"] = {{"directory", "out"}, {"plots", false}};
  if (scenario_name == "fidelity-sweep")
    j["sweep"] = {{"parameter", "f_d"}, {"start", 1.0}, {"stop", 40.0}, {"steps", 27}};
  else if (scenario_name == "p0-sweep")
    j["sweep"] = {{"parameter", "p0"}, {"start", 0.0}, {"stop", 1.0}, {"steps", 21}};
  else if (scenario_name == "sync")
    j["integration"]["horizon_periods"] = 500;
  else if (scenario_name == "capacity") {
    j["channel"] = {{"eta", 1.0}, {"n_mean", 1.0}, {"N", 2},
                    {"M", 0.01},  {"bw_ratio", 0.2}, {"gain", 4.0},
                    {"split_energy", true}};
    j["capacity_sweep"] = {{"n_grid", {1, 2, 3, 4, 5, 6, 7, 8}}};
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Scenario execution

namespace {

struct OscAnalysis {
  chaos::Trajectory traj;  // post-transient, time re-zeroed
  double delta_mean = 0.0;
  spectral::PowerSpectrum psd;
  double M = 1.0;
  double omega_lo = 0.0, omega_hi = 0.0;
  std::complex<double> phase_avg{1.0, 0.0};
  chaos::LyapunovEstimate lyap;
  bool has_lyap = false;
};

chaos::Trajectory drop_transient(const chaos::Trajectory& full, double t_start) {
  const auto skip = static_cast<std::size_t>(std::llround(t_start / full.dt));
  chaos::Trajectory out;
  out.dt = full.dt;
  const std::size_t n = full.size() - std::min(skip, full.size() - 1);
  out.t.resize(n);
  out.x.resize(n);
  out.p.resize(n);
  out.delta.resize(n);
  out.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = full.t[skip + i] - full.t[skip];
    out.x[i] = full.x[skip + i];
    out.p[i] = full.p[skip + i];
    out.delta[i] = full.delta[skip + i];
    out.theta[i] = full.theta[skip + i] - full.theta[skip];
  }
  return out;
}

OscAnalysis analyze_oscillator(const chaos::DuffingParams& params, chaos::OscState init,
                               const IntegrationBlock& integ, const SpectralBlock& spec,
                               bool with_lyapunov) {
  OscAnalysis a;
  const double dt = integ.dt_periods * kTwoPi / params.omega0;
  const double t_drive = kTwoPi / params.omega_d;
  const double transient = integ.transient_periods * t_drive;
  const double horizon = integ.horizon_periods * t_drive;

  const chaos::Trajectory full = chaos::integrate(params, init, transient + horizon, dt);
  a.traj = drop_transient(full, transient);

  double mean = 0.0;
  for (double d : a.traj.delta) mean += d;
  mean /= static_cast<double>(a.traj.delta.size());
  a.delta_mean = mean;

  std::vector<double> detrended(a.traj.delta.size());
  for (std::size_t i = 0; i < detrended.size(); ++i) detrended[i] = a.traj.delta[i] - mean;

  a.psd = spectral::estimate_psd(detrended, dt, spec.segments,
                                 spec.rect_window ? spectral::Window::Rect
                                                  : spectral::Window::Hann);
  const auto band = spectral::default_band(a.psd, spec.band_threshold);
  a.omega_lo = band.first;
  a.omega_hi = band.second;
  const auto cf = spectral::correction_factor(a.psd, band.first, band.second);
  a.M = cf.M;

  const auto theta = spectral::accumulate_phase(detrended, dt);
  a.phase_avg = spectral::empirical_phase_average(theta);

  if (with_lyapunov) {
    chaos::LyapunovSettings ls;
    ls.dt = dt;
    ls.transient = transient;
    ls.horizon = horizon;
    ls.renorm_interval = 1.0 / params.omega0;
    a.lyap = chaos::max_lyapunov(params, init, ls);
    a.has_lyap = true;
  }
  return a;
}

void write_trajectory_csv(const std::filesystem::path& path, const chaos::Trajectory& traj,
                          int stride) {
  csv::Writer w(path, {"t", "x", "p", "delta", "theta"});
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride))
    w.row_values({traj.t[i], traj.x[i], traj.p[i], traj.delta[i], traj.theta[i]});
  w.close();
}

void write_psd_csv(const std::filesystem::path& path, const spectral::PowerSpectrum& psd) {
  csv::Writer w(path, {"omega", "density"});
  for (std::size_t i = 0; i < psd.omega.size(); ++i)
    w.row_values({psd.omega[i], psd.density[i]});
  w.close();
}

// Minimal SVG polyline plot; purely a convenience rendering of CSV content.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<double>& x,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  if (x.size() < 2) return;
  const double width = 720, height = 440, ml = 60, mr = 20, mt = 36, mb = 42;
  double xmin = x.front(), xmax = x.front(), ymin = 0, ymax = 0;
  bool first = true;
  for (double v : x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
  for (const auto& [name, ys] : series)
    for (double v : ys) {
      if (!std::isfinite(v)) continue;
      if (first) { ymin = ymax = v; first = false; }
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad; ymax += pad;
  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto sy = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(static_cast<int>(width)) +
         "\" height=\"" + std::to_string(static_cast<int>(height)) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + csv::format_double(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
  out += "<line x1=\"" + csv::format_double(ml) + "\" y1=\"" + csv::format_double(height - mb) +
         "\" x2=\"" + csv::format_double(width - mr) + "\" y2=\"" + csv::format_double(height - mb) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + csv::format_double(ml) + "\" y1=\"" + csv::format_double(mt) +
         "\" x2=\"" + csv::format_double(ml) + "\" y2=\"" + csv::format_double(height - mb) +
         "\" stroke=\"black\"/>\n";
  int ci = 0;
  double legend_y = mt + 4;
  for (const auto& [name, ys] : series) {
    const char* color = colors[ci % 5];
    std::string pts;
    for (std::size_t i = 0; i < x.size() && i < ys.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      pts += csv::format_double(sx(x[i])) + "," + csv::format_double(sy(ys[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    out += "<text x=\"" + csv::format_double(width - mr - 120) + "\" y=\"" +
           csv::format_double(legend_y) + "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
           color + "\">" + name + "</text>\n";
    legend_y += 16;
    ++ci;
  }
  out += "</svg>\n";
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

struct OutputCollector {
  std::filesystem::path dir;
  std::vector<std::string> files;

  std::filesystem::path reserve(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

chaos::DuffingParams with_parameter(chaos::DuffingParams base, const std::string& name,
                                    double value) {
  if (name == "f_d") base.f_d = value;
  else if (name == "omega_d") base.omega_d = value;
  else if (name == "gamma") base.gamma = value;
  else if (name == "mu") base.mu = value;
  else if (name == "k_I") base.k_I = value;
  else if (name == "g_fo") base.g_fo = value;
  else throw std::invalid_argument("unsupported sweep parameter: " + name);
  return base;
}

std::vector<double> sweep_grid(const SweepSpec& sweep) {
  std::vector<double> grid;
  if (sweep.steps == 1) {
    grid.push_back(sweep.start);
    return grid;
  }
  const double step = (sweep.stop - sweep.start) / static_cast<double>(sweep.steps - 1);
  for (int i = 0; i < sweep.steps; ++i) grid.push_back(sweep.start + step * i);
  return grid;
}

struct FidelityPoint {
  double value = 0.0;  // swept parameter
  double lambda = 0.0;
  bool converged = false;
  double M = 1.0;
  double F1 = 0.0, F2 = 0.0;
  std::string regime = "unclassified";
};

// One fidelity evaluation at fixed oscillator parameters: trajectories for
// the two senders, correction factor from sender 1's spectrum, Monte-Carlo
// transmission, receiver absorption, fidelities.
FidelityPoint evaluate_fidelity_point(const ScenarioConfig& cfg,
                                      const chaos::DuffingParams& params, double p0) {
  FidelityPoint pt;
  OscAnalysis a = analyze_oscillator(params, cfg.integration.init_a, cfg.integration,
                                     cfg.spectral, /*with_lyapunov=*/true);
  OscAnalysis b = analyze_oscillator(params, cfg.integration.init_b, cfg.integration,
                                     cfg.spectral, /*with_lyapunov=*/false);
  pt.lambda = a.lyap.lambda;
  pt.converged = a.lyap.converged;
  pt.M = a.M;

  fock::SimConfig sim = cfg.sim;
  sim.drive_period = kTwoPi / params.omega_d;
  const fock::QubitSpec q1{p0}, q2{1.0 - p0};
  auto [rho3, rho4] = fock::monte_carlo_transmission(a.traj, b.traj, q1, q2, sim);
  pt.F1 = fock::fidelity(fock::receive_qubit(rho3), q1);
  pt.F2 = fock::fidelity(fock::receive_qubit(rho4), q2);

  if (pt.converged) {
    try {
      pt.regime = chaos::to_string(chaos::classify_regime(a.lyap, std::min(1.0, pt.M)));
    } catch (const std::exception&) {
      pt.regime = "unclassified";
    }
  }
  return pt;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["schema"] = "qcdma-manifest/1";
  j["tool_version"] = m.tool_version;
  j["config_sha256"] = m.config_sha256;
  j["seed"] = m.seed;
  j["scenario"] = m.scenario;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = json::array();
  for (const auto& e : m.outputs)
    j["outputs"].push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  return j;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  RunResult result;
  result.manifest.tool_version = QCDMA_VERSION;
  result.manifest.config_sha256 = csv::sha256_hex(config.raw_text);
  result.manifest.seed = config.seed;
  result.manifest.scenario = config.scenario;
  result.manifest.started_at = iso_utc_now();

  OutputCollector out{config.out_dir, {}};
  std::filesystem::create_directories(config.out_dir);

  try {
    if (config.scenario == "chaos") {
      const OscAnalysis a = analyze_oscillator(config.duffing, config.integration.init_a,
                                               config.integration, config.spectral, true);
      write_trajectory_csv(out.reserve("trajectory.csv"), a.traj, config.integration.output_stride);
      write_psd_csv(out.reserve("psd.csv"), a.psd);
      csv::Writer s(out.reserve("summary.csv"),
                    {"f_d", "lambda", "converged", "M", "omega_lo", "omega_hi",
                     "phase_avg_abs", "delta_mean"});
      s.row({csv::format_double(config.duffing.f_d), csv::format_double(a.lyap.lambda),
             a.lyap.converged ? "1" : "0", csv::format_double(a.M),
             csv::format_double(a.omega_lo), csv::format_double(a.omega_hi),
             csv::format_double(std::abs(a.phase_avg)), csv::format_double(a.delta_mean)});
      s.close();
      if (config.plots)
        write_svg_plot(out.reserve("trajectory.svg"), "x(t)", a.traj.t, {{"x", a.traj.x}});
      if (!a.lyap.converged) {
        result.status = RunStatus::Unconverged;
        result.message = "Lyapunov estimate did not converge";
      }
    } else if (config.scenario == "sync") {
      const double dt = config.integration.dt_periods * kTwoPi / config.duffing.omega0;
      const double t_drive = kTwoPi / config.duffing.omega_d;
      const double horizon = config.integration.horizon_periods * t_drive;
      auto [ta, tb] = chaos::integrate_synchronized_pair(
          config.duffing, config.integration.init_a, config.integration.init_b, horizon, dt);
      const double err = chaos::sync_error(ta, tb, horizon / 2.0, horizon);
      write_trajectory_csv(out.reserve("trajectory_a.csv"), ta, config.integration.output_stride);
      write_trajectory_csv(out.reserve("trajectory_b.csv"), tb, config.integration.output_stride);
      csv::Writer s(out.reserve("summary.csv"), {"k_I", "sync_error", "window_lo", "window_hi"});
      s.row_values({config.duffing.k_I, err, horizon / 2.0, horizon});
      s.close();
      if (config.plots) {
        std::vector<double> diff(ta.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ta.x[i] - tb.x[i];
        write_svg_plot(out.reserve("sync.svg"), "x_a - x_b", ta.t, {{"x_a - x_b", diff}});
      }
    } else if (config.scenario == "spectrum") {
      const OscAnalysis a = analyze_oscillator(config.duffing, config.integration.init_a,
                                               config.integration, config.spectral, false);
      write_psd_csv(out.reserve("psd.csv"), a.psd);
      const double sqrt_m = std::sqrt(a.M);
      const double emp = std::abs(a.phase_avg);
      csv::Writer s(out.reserve("summary.csv"),
                    {"f_d", "M", "sqrt_M", "phase_avg_abs", "relative_gap", "omega_lo",
                     "omega_hi", "delta_mean"});
      s.row_values({config.duffing.f_d, a.M, sqrt_m, emp,
                    sqrt_m > 0 ? (emp - sqrt_m) / sqrt_m : 0.0, a.omega_lo, a.omega_hi,
                    a.delta_mean});
      s.close();
      if (config.plots)
        write_svg_plot(out.reserve("psd.svg"), "S_delta(omega)", a.psd.omega,
                       {{"density", a.psd.density}});
    } else if (config.scenario == "fidelity-sweep") {
      const std::vector<double> grid = sweep_grid(config.sweep);
      std::vector<FidelityPoint> points(grid.size());
      parallel_for(grid.size(), config.threads, [&](std::size_t i) {
        const auto params = with_parameter(config.duffing, config.sweep.parameter, grid[i]);
        points[i] = evaluate_fidelity_point(config, params, config.p0);
        points[i].value = grid[i];
      });
      csv::Writer w(out.reserve("fidelity_sweep.csv"), {"f_d", "lambda", "M", "F1", "F2", "Fbar"});
      for (const auto& pt : points)
        w.row_values({pt.value, pt.lambda, pt.M, pt.F1, pt.F2, 0.5 * (pt.F1 + pt.F2)});
      w.close();
      csv::Writer r(out.reserve("regimes.csv"), {"f_d", "lambda", "converged", "M", "regime"});
      for (const auto& pt : points)
        r.row({csv::format_double(pt.value), csv::format_double(pt.lambda),
               pt.converged ? "1" : "0", csv::format_double(pt.M), pt.regime});
      r.close();
      if (config.plots) {
        std::vector<double> f1s, f2s;
        for (const auto& pt : points) { f1s.push_back(pt.F1); f2s.push_back(pt.F2); }
        write_svg_plot(out.reserve("fidelity_sweep.svg"), "F vs " + config.sweep.parameter, grid,
                       {{"F1", f1s}, {"F2", f2s}});
      }
    } else if (config.scenario == "p0-sweep") {
      if (config.sweep.parameter != "p0")
        throw std::invalid_argument("p0-sweep requires sweep.parameter == \"p0\"");
      // One oscillator run serves the whole p0 grid.
      OscAnalysis a = analyze_oscillator(config.duffing, config.integration.init_a,
                                         config.integration, config.spectral, true);
      OscAnalysis b = analyze_oscillator(config.duffing, config.integration.init_b,
                                         config.integration, config.spectral, false);
      fock::SimConfig sim = config.sim;
      sim.drive_period = kTwoPi / config.duffing.omega_d;

      const std::vector<double> grid = sweep_grid(config.sweep);
      struct Row { double p0, F1, F2; };
      std::vector<Row> rows(grid.size());
      parallel_for(grid.size(), config.threads, [&](std::size_t i) {
        const fock::QubitSpec q1{grid[i]}, q2{1.0 - grid[i]};
        auto [rho3, rho4] = fock::monte_carlo_transmission(a.traj, b.traj, q1, q2, sim);
        rows[i] = {grid[i], fock::fidelity(fock::receive_qubit(rho3), q1),
                   fock::fidelity(fock::receive_qubit(rho4), q2)};
      });
      csv::Writer w(out.reserve("p0_sweep.csv"), {"p0", "F1", "F2", "Fbar"});
      for (const auto& r : rows) w.row_values({r.p0, r.F1, r.F2, 0.5 * (r.F1 + r.F2)});
      w.close();
      csv::Writer s(out.reserve("summary.csv"), {"f_d", "lambda", "M", "phase_avg_abs"});
      s.row_values({config.duffing.f_d, a.lyap.lambda, a.M, std::abs(a.phase_avg)});
      s.close();
      if (config.plots) {
        std::vector<double> f1s, f2s, fbars;
        for (const auto& r : rows) {
          f1s.push_back(r.F1); f2s.push_back(r.F2); fbars.push_back(0.5 * (r.F1 + r.F2));
        }
        write_svg_plot(out.reserve("p0_sweep.svg"), "F vs p0", grid,
                       {{"F1", f1s}, {"F2", f2s}, {"Fbar", fbars}});
      }
    } else if (config.scenario == "capacity") {
      capacity::SweepConfig sc = config.capacity_sweep;
      sc.n_mean = config.channel.n_mean;
      sc.M = config.channel.M;
      sc.bw_ratio = config.channel.bw_ratio;
      const auto points = capacity::rate_sweep(sc);
      csv::Writer w(out.reserve("capacity.csv"),
                    {"kind", "N", "eta", "classical_rate", "quantum_rate"});
      for (const auto& p : points)
        w.row({capacity::to_string(p.kind), std::to_string(p.n_pairs),
               csv::format_double(p.eta), csv::format_double(p.classical),
               csv::format_double(p.quantum)});
      w.close();
    } else {
      result.status = RunStatus::InvalidConfig;
      result.message = "unknown scenario " + config.scenario;
      return result;
    }
  } catch (const chaos::DivergenceError& e) {
    result.status = RunStatus::Divergence;
    result.message = e.what();
    return result;
  } catch (const fock::TruncationError& e) {
    result.status = RunStatus::Unconverged;
    result.message = e.what();
    return result;
  }

  for (const std::string& name : out.files) {
    const auto path = config.out_dir / name;
    if (!std::filesystem::exists(path)) continue;
    ManifestEntry e;
    e.path = name;
    e.sha256 = csv::sha256_file_hex(path);
    e.bytes = std::filesystem::file_size(path);
    result.manifest.outputs.push_back(std::move(e));
  }
  result.manifest.finished_at = iso_utc_now();

  std::ofstream mf(config.out_dir / "run_manifest.json", std::ios::binary | std::ios::trunc);
  mf << manifest_to_json(result.manifest).dump(2) << "\n";
  return result;
}

}  // namespace qcdma::scenario
