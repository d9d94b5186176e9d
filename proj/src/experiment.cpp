#include "xlra/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "xlra/version.hpp"

namespace xlra {

namespace {

using nlohmann::json;

[[noreturn]] void fail_key(const std::string& key, const std::string& what) {
  throw std::invalid_argument(key + ": " + what);
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail_key(key, "expected an integer");
  return v.get<int>();
}

double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) fail_key(key, "expected a number");
  return v.get<double>();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object())
    throw std::invalid_argument("config: expected a flat key-value object");
  ScenarioConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "M") cfg.M = get_int(value, key);
    else if (key == "B") cfg.B = get_int(value, key);
    else if (key == "M_b") fail_key(key, "derived from M/B, not settable");
    else if (key == "array_length_m") cfg.array_length_m = get_real(value, key);
    else if (key == "cell_side_m") cfg.cell_side_m = get_real(value, key);
    else if (key == "K") cfg.K = get_int(value, key);
    else if (key == "P_a") cfg.P_a = get_real(value, key);
    else if (key == "tau_p") cfg.tau_p = get_int(value, key);
    else if (key == "P_b") cfg.P_b = get_real(value, key);
    else if (key == "rho") cfg.rho = get_real(value, key);
    else if (key == "q") cfg.q = get_real(value, key);
    else if (key == "sigma2") cfg.sigma2 = get_real(value, key);
    else if (key == "kappa") cfg.kappa = get_real(value, key);
    else if (key == "g_dB") cfg.g_dB = get_real(value, key);
    else if (key == "sigma_sf_dB") cfg.sigma_sf_dB = get_real(value, key);
    else if (key == "r") cfg.r = get_real(value, key);
    else if (key == "delta") cfg.delta = get_real(value, key);
    else if (key == "retry_prob") cfg.retry_prob = get_real(value, key);
    else if (key == "max_attempts") cfg.max_attempts = get_int(value, key);
    else if (key == "n_blocks") cfg.n_blocks = get_int(value, key);
    else if (key == "vr_mode") {
      if (!value.is_string()) fail_key(key, "expected \"bernoulli\" or \"full\"");
      const std::string s = value.get<std::string>();
      if (s == "bernoulli") cfg.vr_mode = VrMode::bernoulli;
      else if (s == "full") cfg.vr_mode = VrMode::full;
      else fail_key(key, "expected \"bernoulli\" or \"full\", got \"" + s + "\"");
    } else {
      fail_key(key, "unknown configuration key");
    }
  }
  cfg.finalize();
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  json doc;
  in >> doc;
  return parse_config(doc);
}

json config_to_json(const ScenarioConfig& cfg) {
  return json{{"M", cfg.M},
              {"B", cfg.B},
              {"array_length_m", cfg.array_length_m},
              {"cell_side_m", cfg.cell_side_m},
              {"K", cfg.K},
              {"P_a", cfg.P_a},
              {"tau_p", cfg.tau_p},
              {"P_b", cfg.P_b},
              {"rho", cfg.rho},
              {"q", cfg.q},
              {"sigma2", cfg.sigma2},
              {"kappa", cfg.kappa},
              {"g_dB", cfg.g_dB},
              {"sigma_sf_dB", cfg.sigma_sf_dB},
              {"r", cfg.r},
              {"delta", cfg.delta},
              {"retry_prob", cfg.retry_prob},
              {"max_attempts", cfg.max_attempts},
              {"n_blocks", cfg.n_blocks},
              {"vr_mode", cfg.vr_mode == VrMode::full ? "full" : "bernoulli"}};
}

std::vector<std::string> preset_names() {
  return {"fig3a_prc_nmse_vs_B", "fig3b_prc_vs_Pb", "fig4_attempts_vs_K",
          "fig5_accepted_vs_B_and_K", "appendix_convergence"};
}

namespace {

SweepPoint point_from(const ScenarioConfig& base, const std::string& param,
                      double value) {
  SweepPoint p;
  p.cfg = base;
  p.param = param;
  p.value = value;
  if (param == "B") p.cfg.B = static_cast<int>(value);
  else if (param == "K") p.cfg.K = static_cast<int>(value);
  else if (param == "P_b") p.cfg.P_b = value;
  p.cfg.finalize();
  p.cfg.validate();
  return p;
}

}  // namespace

ExperimentPreset make_preset(const std::string& name,
                             const ScenarioConfig& base, bool paper_scale) {
  ExperimentPreset preset;
  preset.name = name;

  ScenarioConfig cfg = base;
  cfg.M = paper_scale ? 500 : 100;
  cfg.n_blocks = paper_scale ? 10000 : 1000;
  const std::vector<double> b_grid = {1, 2, 5, 10, 25, 50, 100};

  if (name == "fig3a_prc_nmse_vs_B") {
    cfg.vr_mode = VrMode::full;
    for (double b : b_grid) preset.points.push_back(point_from(cfg, "B", b));
    preset.modes = {ProtocolMode::sucre_xl, ProtocolMode::baseline};
    preset.channels = {CorrelationMode::iid, CorrelationMode::exponential};
  } else if (name == "fig3b_prc_vs_Pb") {
    cfg.vr_mode = VrMode::bernoulli;
    cfg.B = 20;
    cfg.finalize();
    for (double pb : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})
      preset.points.push_back(point_from(cfg, "P_b", pb));
    preset.modes = {ProtocolMode::sucre_xl, ProtocolMode::baseline};
    preset.channels = {CorrelationMode::iid};
  } else if (name == "fig4_attempts_vs_K") {
    cfg.vr_mode = VrMode::bernoulli;
    cfg.P_b = 0.5;
    for (double b : {1.0, 5.0, 20.0}) {
      cfg.B = static_cast<int>(b);
      cfg.finalize();
      for (double k : {500.0, 1000.0, 2000.0})
        preset.points.push_back(point_from(cfg, "K", k));
    }
    preset.modes = {ProtocolMode::sucre_xl, ProtocolMode::baseline};
    preset.channels = {CorrelationMode::iid};
  } else if (name == "fig5_accepted_vs_B_and_K") {
    cfg.vr_mode = VrMode::bernoulli;
    cfg.P_b = 0.5;
    for (double b : b_grid) preset.points.push_back(point_from(cfg, "B", b));
    for (double b : {1.0, 5.0, 20.0}) {
      cfg.B = static_cast<int>(b);
      cfg.finalize();
      for (double k : {500.0, 1000.0, 2000.0})
        preset.points.push_back(point_from(cfg, "K", k));
    }
    preset.modes = {ProtocolMode::sucre_xl, ProtocolMode::baseline};
    preset.channels = {CorrelationMode::iid};
  } else if (name == "appendix_convergence") {
    preset.convergence_only = true;
    preset.points.push_back(point_from(cfg, "M_b", 0));
    preset.modes = {ProtocolMode::sucre_xl};
    preset.channels = {CorrelationMode::iid};
    preset.n_seeds = 1;
    return preset;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  preset.n_seeds = paper_scale ? 10 : 10;
  return preset;
}

namespace {

struct Job {
  std::size_t point = 0;
  ProtocolMode mode = ProtocolMode::sucre_xl;
  CorrelationMode channel = CorrelationMode::iid;
  std::uint64_t seed = 0;
};

void write_line(std::ofstream& os, const std::string& line) {
  os << line << "\r\n";
}

std::string detail_header() {
  return "preset,sweep_param,sweep_value,B,K,P_b,mode,channel,seed,blocks,"
         "prc,prc_step3,nmse,nmse_single,avg_attempts,failed_fraction,xi,"
         "lambda,admitted_total,failed_total,still_backlogged,attempter_total,"
         "collisions,resolved,case_i,case_ii,case_iii,case_iv";
}

std::string detail_row(const MetricRow& row) {
  const MetricAccumulator& acc = row.result.metrics;
  const AccessStats st = access_stats(acc, row.K, row.P_a,
                                      row.result.n_blocks);
  std::string line;
  line += row.preset;
  line += "," + row.param;
  line += "," + format_double(row.value);
  line += "," + std::to_string(row.B);
  line += "," + std::to_string(row.K);
  line += "," + format_double(row.P_b);
  line += std::string(",") + to_string(row.mode);
  line += std::string(",") + to_string(row.channel);
  line += "," + std::to_string(row.seed);
  line += "," + std::to_string(row.result.n_blocks);
  line += "," + opt_field(prc(acc));
  line += "," + opt_field(prc_step3(acc));
  line += "," + opt_field(nmse(acc));
  line += "," + opt_field(nmse_single_contender(acc));
  line += "," + opt_field(st.avg_attempts);
  line += "," + opt_field(st.failed_fraction);
  line += "," + opt_field(st.xi);
  line += "," + opt_field(st.lambda);
  line += "," + std::to_string(acc.admitted_total);
  line += "," + std::to_string(acc.failed_total);
  line += "," + std::to_string(row.result.still_backlogged);
  line += "," + std::to_string(acc.attempter_total);
  line += "," + std::to_string(acc.collision_count);
  line += "," + std::to_string(acc.resolved_count);
  for (int c = 0; c < 4; ++c) line += "," + std::to_string(acc.case_count[c]);
  return line;
}

struct SummaryCell {
  std::vector<double> prc, nmse, avg_attempts, failed_fraction, xi, lambda;
};

void push_opt(std::vector<double>& dst, const std::optional<double>& v) {
  if (v) dst.push_back(*v);
}

std::string mean_ci(const std::vector<double>& xs) {
  if (xs.empty()) return ",";
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double halfwidth =
      xs.size() > 1
          ? 1.96 * std::sqrt(var / (xs.size() - 1) / xs.size())
          : 0.0;
  return format_double(mean) + "," + format_double(halfwidth);
}

}  // namespace

json campaign_result_to_json(const CampaignResult& res,
                             const ScenarioConfig& cfg) {
  const MetricAccumulator& acc = res.metrics;
  const AccessStats st = access_stats(acc, cfg.K, cfg.P_a, res.n_blocks);
  json j;
  j["seed"] = res.seed;
  j["mode"] = to_string(res.mode);
  j["channel"] = to_string(res.channel);
  j["blocks"] = res.n_blocks;
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  j["prc"] = opt(prc(acc));
  j["prc_step3"] = opt(prc_step3(acc));
  j["nmse"] = opt(nmse(acc));
  j["nmse_single"] = opt(nmse_single_contender(acc));
  j["avg_attempts"] = opt(st.avg_attempts);
  j["failed_fraction"] = opt(st.failed_fraction);
  j["xi"] = opt(st.xi);
  j["lambda"] = opt(st.lambda);
  j["admitted_total"] = acc.admitted_total;
  j["failed_total"] = acc.failed_total;
  j["attempter_total"] = acc.attempter_total;
  j["arrival_total"] = acc.arrival_total;
  j["still_backlogged"] = res.still_backlogged;
  j["collisions"] = acc.collision_count;
  j["resolved"] = acc.resolved_count;
  j["cases"] = {acc.case_count[0], acc.case_count[1], acc.case_count[2],
                acc.case_count[3]};
  j["attempts_hist"] = acc.attempts_hist;
  j["s_t_hist"] = acc.s_t_hist;
  return j;
}

json block_trace_to_json(const BlockTrace& trace) {
  json pilots = json::array();
  for (const PilotTrace& pt : trace.pilots) {
    json jp;
    jp["pilot"] = pt.pilot + 1;
    jp["contenders"] = pt.contenders;
    jp["alpha_true"] = pt.alpha_true;
    jp["alpha_hat"] = pt.alpha_hat;
    jp["verdicts"] = pt.verdicts;
    jp["repeaters"] = pt.repeaters;
    jp["case"] = to_string(pt.kase);
    jp["admitted"] = pt.admitted;
    pilots.push_back(std::move(jp));
  }
  return json{{"block", trace.block}, {"pilots", std::move(pilots)}};
}

int run_experiment(const ExperimentPreset& preset, const ScenarioConfig& base,
                   const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(opts.out_dir);

  const auto path = [&](const std::string& suffix) {
    return opts.out_dir / (preset.name + suffix);
  };

  json manifest;
  manifest["preset"] = preset.name;
  manifest["version"] = kVersion;
  manifest["seed_base"] = opts.seed_base;
  manifest["paper_scale"] = opts.paper_scale;
  manifest["config"] = config_to_json(base);
  std::vector<std::string> outputs;

  if (preset.convergence_only) {
    // Appendix check: fixed large-scale slice, M_b sweep, fresh channels.
    ConvergenceSlice slice;
    slice.beta = {{2.0e-11, 1.5e-11, 0.0, 3.0e-12},
                  {5.0e-12, 0.0, 8.0e-12, 1.0e-12},
                  {1.0e-11, 1.0e-11, 1.0e-11, 1.0e-11}};
    slice.rho = base.rho;
    slice.sigma2 = base.sigma2;
    slice.tau_p = base.tau_p;
    const std::vector<int> grid = {10, 100, 1000};
    const int trials = 1000;
    Rng rng(Rng::derive(opts.seed_base, 0xc0471));
    const auto table = verify_sum_gain_convergence(slice, grid, trials, rng);

    std::ofstream os(path("_convergence.csv"), std::ios::binary);
    write_line(os, "M_b,mean_rel_error,trials");
    for (const auto& pt : table)
      write_line(os, std::to_string(pt.M_b) + "," +
                         format_double(pt.mean_rel_error) + "," +
                         std::to_string(trials));
    outputs.push_back(path("_convergence.csv").filename().string());
    manifest["trials"] = trials;
    manifest["mb_grid"] = grid;
  } else {
    const int n_seeds = opts.n_seeds.value_or(preset.n_seeds);
    std::vector<ProtocolMode> modes =
        opts.mode_filter.empty() ? preset.modes : opts.mode_filter;
    std::vector<CorrelationMode> channels =
        opts.channel_filter.empty() ? preset.channels : opts.channel_filter;

    std::vector<Job> jobs;
    for (std::size_t p = 0; p < preset.points.size(); ++p)
      for (ProtocolMode m : modes)
        for (CorrelationMode c : channels)
          for (int s = 0; s < n_seeds; ++s)
            jobs.push_back({p, m, c, opts.seed_base + s});

    std::vector<MetricRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    const unsigned n_threads =
        opts.threads > 0 ? opts.threads
                         : std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        const Job& job = jobs[i];
        ScenarioConfig cfg = preset.points[job.point].cfg;
        if (opts.n_blocks) cfg.n_blocks = *opts.n_blocks;
        CorrelationSpec corr{job.channel, cfg.r};
        TraceSink sink;
        std::ofstream trace_file;
        if (opts.trace) {
          const std::string name = preset.name + "_trace_p" +
                                   std::to_string(job.point) + "_" +
                                   to_string(job.mode) + "_" +
                                   to_string(job.channel) + "_s" +
                                   std::to_string(job.seed) + ".jsonl";
          trace_file.open(opts.out_dir / name, std::ios::binary);
          sink = [&trace_file](const BlockTrace& bt) {
            trace_file << block_trace_to_json(bt).dump() << "\n";
          };
        }
        MetricRow row;
        row.preset = preset.name;
        row.param = preset.points[job.point].param;
        row.value = preset.points[job.point].value;
        row.mode = job.mode;
        row.channel = job.channel;
        row.seed = job.seed;
        row.K = cfg.K;
        row.P_a = cfg.P_a;
        row.B = cfg.B;
        row.P_b = cfg.P_b;
        row.result = run_campaign(cfg, corr, job.mode, job.seed, sink);
        rows[i] = std::move(row);
      }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    std::ofstream detail(path("_metrics.csv"), std::ios::binary);
    write_line(detail, detail_header());
    for (const MetricRow& row : rows) write_line(detail, detail_row(row));
    outputs.push_back(path("_metrics.csv").filename().string());

    // Aggregate over seeds in deterministic job order.
    std::ofstream summary(path("_summary.csv"), std::ios::binary);
    write_line(summary,
               "preset,sweep_param,sweep_value,B,K,P_b,mode,channel,seed_base,"
               "n_seeds,prc,prc_ci,nmse,nmse_ci,avg_attempts,avg_attempts_ci,"
               "failed_fraction,failed_fraction_ci,xi,xi_ci,lambda,lambda_ci");
    for (std::size_t p = 0; p < preset.points.size(); ++p) {
      for (ProtocolMode m : modes) {
        for (CorrelationMode c : channels) {
          SummaryCell cell;
          const MetricRow* sample = nullptr;
          for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (jobs[i].point != p || jobs[i].mode != m || jobs[i].channel != c)
              continue;
            sample = &rows[i];
            const MetricAccumulator& acc = rows[i].result.metrics;
            const AccessStats st = access_stats(acc, rows[i].K, rows[i].P_a,
                                                rows[i].result.n_blocks);
            push_opt(cell.prc, prc(acc));
            push_opt(cell.nmse, nmse(acc));
            push_opt(cell.avg_attempts, st.avg_attempts);
            push_opt(cell.failed_fraction, st.failed_fraction);
            push_opt(cell.xi, st.xi);
            push_opt(cell.lambda, st.lambda);
          }
          if (!sample) continue;
          std::string line = preset.name;
          line += "," + sample->param;
          line += "," + format_double(sample->value);
          line += "," + std::to_string(sample->B);
          line += "," + std::to_string(sample->K);
          line += "," + format_double(sample->P_b);
          line += std::string(",") + to_string(m);
          line += std::string(",") + to_string(c);
          line += "," + std::to_string(opts.seed_base);
          line += "," + std::to_string(n_seeds);
          line += "," + mean_ci(cell.prc);
          line += "," + mean_ci(cell.nmse);
          line += "," + mean_ci(cell.avg_attempts);
          line += "," + mean_ci(cell.failed_fraction);
          line += "," + mean_ci(cell.xi);
          line += "," + mean_ci(cell.lambda);
          write_line(summary, line);
        }
      }
    }
    outputs.push_back(path("_summary.csv").filename().string());

    manifest["n_seeds"] = n_seeds;
    json points = json::array();
    for (const SweepPoint& pt : preset.points)
      points.push_back({{"param", pt.param},
                        {"value", pt.value},
                        {"B", pt.cfg.B},
                        {"K", pt.cfg.K},
                        {"P_b", pt.cfg.P_b},
                        {"n_blocks", opts.n_blocks.value_or(pt.cfg.n_blocks)}});
    manifest["points"] = std::move(points);
    json jmodes = json::array(), jchannels = json::array();
    for (ProtocolMode m : modes) jmodes.push_back(to_string(m));
    for (CorrelationMode c : channels) jchannels.push_back(to_string(c));
    manifest["modes"] = std::move(jmodes);
    manifest["channels"] = std::move(jchannels);
  }

  manifest["outputs"] = outputs;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ofstream mf(path("_manifest.json"), std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return 0;
}

}  // namespace xlra
