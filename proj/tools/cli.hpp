#pragma once

// physioedge command-line front end. run() holds all logic so tests can
// drive it in-process; main.cpp only forwards argv.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "physioedge/physioedge.hpp"
#include "physioedge/report.hpp"

namespace physioedge::cli {

enum exit_code : int { ok = 0, usage = 2, runtime = 3 };

inline constexpr const char* seed_env_var = "PHYSIOEDGE_SEED";

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Flat key=value file. Blank lines and lines starting with '#' are ignored.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::file_unreadable, "config not found: " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw error(errc::invalid_argument, "config line " + std::to_string(lineno) + " is not key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

inline std::uint32_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    throw error(errc::invalid_argument, "seed must be an unsigned 32-bit integer");
  }
  if (used != text.size() || v > 0xFFFFFFFFull) {
    throw error(errc::invalid_argument, "seed must be an unsigned 32-bit integer");
  }
  if (v == 0) throw error(errc::invalid_argument, "seed must be nonzero");
  return static_cast<std::uint32_t>(v);
}

/// Flag value if given, else PHYSIOEDGE_SEED, else `fallback`.
inline std::uint32_t resolve_seed(const CLI::Option* opt, const std::string& flag_value, std::uint32_t fallback) {
  if (opt->count() > 0) return parse_seed(flag_value);
  if (const char* env = std::getenv(seed_env_var); env && *env) return parse_seed(env);
  return fallback;
}

inline std::filesystem::path with_extension(std::filesystem::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

inline int exit_for(errc code) {
  switch (code) {
    case errc::invalid_argument:
    case errc::ill_posed:
    case errc::file_unreadable: return usage;
    default: return runtime;
  }
}

}  // namespace detail

struct CompressArgs {
  std::string input, output, policy = "mean_exact", channel = "generic", seed;
  unsigned cr = 10;
  unsigned channel_index = 0;
  std::size_t chunk = 1024;
  CLI::Option* seed_opt = nullptr;
};

struct ReconstructArgs {
  std::string input, output, algo = "cosamp", metrics_against, metrics_csv, diagnostics, id, embed_seed;
  std::size_t k = 64, block = 1024, max_iter = 50, embeddings = default_embedding_count,
              grid_len = default_grid_len;
  double tol = 1e-9;
  unsigned bits = 16;
  CLI::Option* embed_seed_opt = nullptr;
};

struct SyncArgs {
  std::string output, jitter = "gaussian:2.65,2.06", parse_latency_ms = "0.1,10", summary, svg, seed;
  std::size_t nodes = 2;
  double minutes = 10.0, interval = 5.0, fs = 8000.0;
  std::vector<double> ppm{0.0};
  std::vector<double> phase{0.0};
  CLI::Option* seed_opt = nullptr;
};

struct BudgetArgs {
  std::string transport = "bluetooth";
  double cr = 1.0;
};

inline int cmd_compress(const CompressArgs& a, std::ostream& out) {
  const std::uint32_t seed = detail::resolve_seed(a.seed_opt, a.seed, 1);
  const auto channel = channel_from_string(a.channel);
  if (!channel) throw error(errc::invalid_argument, "unknown channel '" + a.channel + "'");
  if (a.cr < 2 || a.cr > 0xFFFF) throw error(errc::invalid_argument, "cr must be in [2, 65535]");
  const StepPolicy policy(static_cast<std::uint16_t>(a.cr),
                          a.policy == "literal_eq1" ? StepMode::literal_eq1 : StepMode::mean_exact);

  const auto signal = load_signal(a.input, *channel, a.channel_index);
  const auto rec = compress(signal, seed, policy, a.chunk);
  save_record(a.output, rec);
  out << "retained=" << rec.values.size() << " of " << rec.original_len << '\n';
  out << "achieved_cr=" << detail::fmt("%.4f", rec.achieved_cr()) << '\n';
  out << "effective_rate_kbps=" << detail::fmt("%.1f", effective_rate(baseline_rate_bps, rec.achieved_cr()) / 1e3)
      << '\n';
  out << "seed=" << seed << " policy=" << to_string(policy.mode()) << '\n';
  return ok;
}

inline int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  Algorithm algo;
  if (a.algo == "cosamp") {
    algo = Algorithm::cosamp;
  } else if (a.algo == "omp") {
    algo = Algorithm::omp;
  } else {
    algo = Algorithm::external;
  }
  if (a.k < 1) throw error(errc::invalid_argument, "k must be >= 1");
  const auto rec = load_record(a.input);

  if (algo == Algorithm::external) {
    const std::uint32_t embed_seed = detail::resolve_seed(a.embed_seed_opt, a.embed_seed, 1);
    const auto set = make_embeddings(rec, a.embeddings, embed_seed, a.grid_len);
    std::ofstream csv(a.output, std::ios::trunc);
    if (!csv) throw error(errc::io_failure, "cannot write " + a.output);
    write_embeddings_csv(csv, set);
    out << "handoff: wrote " << set.n_embeddings << " embeddings of " << set.grid_len() << " samples to "
        << a.output << " for an external reconstructor\n";
    return ok;
  }

  ReconstructorChoice choice{algo, a.k, a.max_iter, a.tol, a.block};
  std::optional<Signal> reference;
  if (!a.metrics_against.empty()) {
    reference = load_signal(a.metrics_against, rec.channel);
    if (reference->size() != rec.original_len) {
      throw error(errc::length_mismatch, "reference has " + std::to_string(reference->size()) +
                                             " samples, record has " + std::to_string(rec.original_len));
    }
  }
  const auto result = reconstruct_detailed(rec, choice);
  write_signal(a.output, result.signal, a.bits);

  std::size_t unconverged = 0, ridge = 0;
  for (const auto& b : result.blocks) {
    unconverged += b.solution.converged ? 0 : 1;
    ridge += b.solution.ridge_fallback ? 1 : 0;
  }
  out << "reconstructed " << result.signal.size() << " samples in " << result.blocks.size() << " block(s) with "
      << to_string(algo) << ", K=" << a.k << '\n';
  if (unconverged) out << "warning: " << unconverged << " block(s) stopped before reaching tol\n";
  if (ridge) out << "warning: " << ridge << " block(s) used the ridge fallback\n";

  if (!a.diagnostics.empty()) {
    std::ofstream diag(a.diagnostics, std::ios::trunc);
    if (!diag) throw error(errc::io_failure, "cannot write " + a.diagnostics);
    write_diagnostics_csv(diag, result);
  }
  if (reference) {
    const auto m = evaluate(*reference, result.signal, rec.achieved_cr());
    const std::string id = a.id.empty() ? std::filesystem::path(a.input).stem().string() : a.id;
    if (a.metrics_csv.empty()) {
      report::write_metrics_header(out);
      report::write_metrics_row(out, id, m);
    } else {
      const bool fresh = !std::filesystem::exists(a.metrics_csv);
      std::ofstream csv(a.metrics_csv, std::ios::app);
      if (!csv) throw error(errc::io_failure, "cannot write " + a.metrics_csv);
      if (fresh) report::write_metrics_header(csv);
      report::write_metrics_row(csv, id, m);
      out << "rrmse=" << detail::fmt("%.6g", m.rrmse) << " cc=" << detail::fmt("%.6g", m.cc) << '\n';
    }
  }
  return ok;
}

inline int cmd_syncsim(const SyncArgs& a, std::ostream& out) {
  sync::SimConfig cfg;
  cfg.n_edge_nodes = a.nodes;
  cfg.sync_interval_s = a.interval;
  cfg.duration_s = a.minutes * 60.0;
  cfg.rng_seed = detail::resolve_seed(a.seed_opt, a.seed, 1);
  cfg.sample_rate_hz = static_cast<std::uint32_t>(a.fs);
  if (!(a.fs >= 1.0)) throw error(errc::invalid_argument, "fs must be >= 1 Hz");

  sync::JitterModel jitter;
  jitter.detect_jitter = sync::parse_distribution_us(a.jitter);
  {
    const auto comma = a.parse_latency_ms.find(',');
    if (comma == std::string::npos) throw error(errc::invalid_argument, "parse latency must be MIN,MAX in ms");
    try {
      jitter.parse_latency_min_s = std::stod(a.parse_latency_ms.substr(0, comma)) * 1e-3;
      jitter.parse_latency_max_s = std::stod(a.parse_latency_ms.substr(comma + 1)) * 1e-3;
    } catch (const std::exception&) {
      throw error(errc::invalid_argument, "parse latency must be MIN,MAX in ms");
    }
  }
  if (a.ppm.empty() || a.phase.empty()) throw error(errc::invalid_argument, "ppm and phase need values");
  std::vector<sync::ClockModel> clocks(a.nodes);
  for (std::size_t i = 0; i < a.nodes; ++i) {
    clocks[i].ppm_offset = a.ppm[i % a.ppm.size()];
    clocks[i].phase_offset_s = a.phase[i % a.phase.size()];
  }
  sync::validate(cfg, clocks, jitter);

  const auto trace = sync::run_simulation(cfg, clocks, jitter);
  const auto summary = sync::summarize(trace, a.fs);

  const std::filesystem::path csv_path(a.output);
  {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw error(errc::io_failure, "cannot write " + a.output);
    report::write_trace_csv(csv, trace);
  }
  const auto json_path = a.summary.empty() ? detail::with_extension(csv_path, ".json") : std::filesystem::path(a.summary);
  {
    std::ofstream js(json_path, std::ios::trunc);
    if (!js) throw error(errc::io_failure, "cannot write " + json_path.string());
    js << report::summary_json(summary, a.fs).dump(2) << '\n';
  }
  const auto svg_path = a.svg.empty() ? detail::with_extension(csv_path, ".svg") : std::filesystem::path(a.svg);
  {
    std::vector<double> us;
    us.reserve(trace.pairwise_err_s.size());
    for (double e : trace.pairwise_err_s) us.push_back(e * 1e6);
    std::ofstream svg(svg_path, std::ios::trunc);
    if (!svg) throw error(errc::io_failure, "cannot write " + svg_path.string());
    report::write_histogram_svg(svg, us, "Pairwise timestamp disagreement", "disagreement (us)");
  }

  out << "broadcasts=" << trace.response_diff_s.size() << " events=" << trace.pairwise_err_s.size() << '\n';
  out << "median_us=" << detail::fmt("%.3f", summary.median_s * 1e6)
      << " std_us=" << detail::fmt("%.3f", summary.std_s * 1e6)
      << " max_us=" << detail::fmt("%.3f", summary.max_s * 1e6) << '\n';
  out << "max_err_us=" << detail::fmt("%.3f", summary.margin.max_err_s * 1e6) << " max_fs_khz="
      << (std::isfinite(summary.margin.max_fs_hz) ? detail::fmt("%.2f", summary.margin.max_fs_hz / 1e3)
                                                  : std::string("inf"))
      << '\n';
  out << "single_sample@" << detail::fmt("%.0f", a.fs) << "Hz=" << (summary.margin.pass ? "pass" : "fail") << '\n';
  return ok;
}

inline int cmd_budget(const BudgetArgs& a, std::ostream& out) {
  const auto transport = transport_from_string(a.transport);
  if (!transport) throw error(errc::invalid_argument, "transport must be wifi or bluetooth");
  const auto profile = LinkProfile::measured();
  const double rate = effective_rate(profile.baseline_rate_bps, a.cr);
  const auto p = power_lookup(profile, *transport, a.cr);
  out << "transport=" << to_string(*transport) << " cr=" << detail::fmt("%g", a.cr) << '\n';
  out << "rate=" << detail::fmt("%.1f", rate / 1e3) << " kbps\n";
  if (p.source == PowerSource::unavailable) {
    out << "power=unavailable\n";
  } else {
    out << "power=" << detail::fmt(p.source == PowerSource::measured ? "%.1f" : "%.2f", p.power_mw) << " mW ("
        << to_string(p.source) << ")\n";
  }
  return ok;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"physioedge: pseudo-random decimation, sparse reconstruction and sync simulation", "physioedge"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  CompressArgs ca;
  auto* compress_cmd = app.add_subcommand("compress", "decimate a WAV file into a PECS record");
  compress_cmd->add_option("input", ca.input, "input WAV (16/32-bit PCM)")->required();
  compress_cmd->add_option("output", ca.output, "output .pecs record")->required();
  compress_cmd->add_option("--cr", ca.cr, "compression ratio")->capture_default_str();
  ca.seed_opt = compress_cmd->add_option("--seed", ca.seed, "nonzero 32-bit seed (fallback: $PHYSIOEDGE_SEED, then 1)");
  compress_cmd->add_option("--policy", ca.policy, "step policy")
      ->check(CLI::IsMember({"mean_exact", "literal_eq1"}))
      ->capture_default_str();
  compress_cmd->add_option("--channel", ca.channel, "channel label")->capture_default_str();
  compress_cmd->add_option("--channel-index", ca.channel_index, "stereo channel index")->capture_default_str();
  compress_cmd->add_option("--chunk", ca.chunk, "streaming chunk length (0 = whole file)")->capture_default_str();
  compress_cmd->add_option("--config", config_path, "key=value file; flags override it");

  ReconstructArgs ra;
  auto* recon_cmd = app.add_subcommand("reconstruct", "rebuild a signal from a PECS record");
  recon_cmd->add_option("input", ra.input, "input .pecs record")->required();
  recon_cmd->add_option("output", ra.output, "output WAV (or embedding CSV for --algo external)")->required();
  recon_cmd->add_option("--algo", ra.algo, "solver")
      ->check(CLI::IsMember({"cosamp", "omp", "external"}))
      ->capture_default_str();
  recon_cmd->add_option("--k", ra.k, "nonzero DCT coefficients per block")->capture_default_str();
  recon_cmd->add_option("--block", ra.block, "transform block length (0 = whole record)")->capture_default_str();
  recon_cmd->add_option("--max-iter", ra.max_iter, "CoSaMP iteration cap")->capture_default_str();
  recon_cmd->add_option("--tol", ra.tol, "relative residual target")->capture_default_str();
  recon_cmd->add_option("--bits", ra.bits, "output PCM depth")->check(CLI::IsMember({16, 32}))->capture_default_str();
  recon_cmd->add_option("--metrics-against", ra.metrics_against, "reference WAV for CR/RRMSE/CC");
  recon_cmd->add_option("--metrics-csv", ra.metrics_csv, "append the metrics row here instead of stdout");
  recon_cmd->add_option("--diagnostics", ra.diagnostics, "write solver residual history CSV");
  recon_cmd->add_option("--id", ra.id, "signal id for the metrics row (default: input stem)");
  recon_cmd->add_option("--embeddings", ra.embeddings, "embedding count for external handoff")->capture_default_str();
  ra.embed_seed_opt = recon_cmd->add_option("--embed-seed", ra.embed_seed, "embedding seed for external handoff");
  recon_cmd->add_option("--grid-len", ra.grid_len, "embedding grid length")->capture_default_str();
  recon_cmd->add_option("--config", config_path, "key=value file; flags override it");

  SyncArgs sa;
  auto* sync_cmd = app.add_subcommand("syncsim", "simulate multi-node clock synchronization");
  sync_cmd->add_option("output", sa.output, "trace CSV (summary .json and .svg written alongside)")->required();
  sync_cmd->add_option("--nodes", sa.nodes, "edge node count")->capture_default_str();
  sync_cmd->add_option("--minutes", sa.minutes, "simulated duration")->capture_default_str();
  sync_cmd->add_option("--interval", sa.interval, "sync broadcast interval in seconds")->capture_default_str();
  sync_cmd->add_option("--ppm", sa.ppm, "per-node ppm offsets, cycled over nodes")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  sync_cmd->add_option("--phase", sa.phase, "per-node clock phase offsets in seconds, cycled")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  sync_cmd->add_option("--jitter", sa.jitter, "detect jitter: none | uniform:LO,HI | gaussian:MEAN,SIGMA (us)")
      ->capture_default_str();
  sync_cmd->add_option("--parse-latency", sa.parse_latency_ms, "parse latency MIN,MAX in ms")->capture_default_str();
  sync_cmd->add_option("--fs", sa.fs, "sample rate for the single-sample check")->capture_default_str();
  sa.seed_opt = sync_cmd->add_option("--seed", sa.seed, "nonzero seed (fallback: $PHYSIOEDGE_SEED, then 1)");
  sync_cmd->add_option("--summary", sa.summary, "summary JSON path");
  sync_cmd->add_option("--svg", sa.svg, "histogram SVG path");
  sync_cmd->add_option("--config", config_path, "key=value file; flags override it");

  BudgetArgs ba;
  auto* budget_cmd = app.add_subcommand("budget", "data rate and radio power for a compression ratio");
  budget_cmd->add_option("--transport", ba.transport, "wifi | bluetooth")->capture_default_str();
  budget_cmd->add_option("--cr", ba.cr, "compression ratio (1 = uncompressed)")->capture_default_str();
  budget_cmd->add_option("--config", config_path, "key=value file; flags override it");

  try {
    // Config entries become flags placed ahead of the user's, so that
    // TakeLast lets explicit flags win.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      std::vector<std::string> injected;
      for (const auto& [key, value] : detail::read_config(config_path)) {
        injected.push_back("--" + key);
        injected.push_back(value);
      }
      auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
        return s == "compress" || s == "reconstruct" || s == "syncsim" || s == "budget";
      });
      if (sub != args.end()) args.insert(sub + 1, injected.begin(), injected.end());
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out, err);
        return ok;
      }
      err << "error: " << e.what() << '\n';
      return usage;
    }

    if (*compress_cmd) return cmd_compress(ca, out);
    if (*recon_cmd) return cmd_reconstruct(ra, out);
    if (*sync_cmd) return cmd_syncsim(sa, out);
    if (*budget_cmd) return cmd_budget(ba, out);
    return usage;
  } catch (const physioedge::error& e) {
    err << "error: " << e.what() << '\n';
    return detail::exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime;
  }
}

}  // namespace physioedge::cli
