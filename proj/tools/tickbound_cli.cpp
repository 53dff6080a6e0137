// tickbound: command-line frontend for windowed market-based statistics.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 numeric degeneracy (strict mode).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tickbound/tickbound.hpp"

namespace fs = std::filesystem;
using namespace tickbound;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "250ms", "60s", "5m", "1.5h", "1d" or a bare number of seconds.
double parse_duration(const std::string& text, const char* flag) {
  static const std::vector<std::pair<std::string, double>> units = {
      {"ms", 1e-3}, {"min", 60.0}, {"s", 1.0}, {"m", 60.0}, {"h", 3600.0}, {"d", 86400.0}};
  std::string number = text;
  double scale = 1.0;
  for (const auto& [suffix, factor] : units) {
    if (text.size() > suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
      number = text.substr(0, text.size() - suffix.size());
      scale = factor;
      break;
    }
  }
  double x = 0.0;
  const auto res = std::from_chars(number.data(), number.data() + number.size(), x);
  if (res.ec != std::errc() || res.ptr != number.data() + number.size() || !std::isfinite(x) || !(x > 0.0)) {
    throw UsageError(std::string(flag) + ": invalid duration '" + text + "' (expected a positive number with optional unit ms|s|m|h|d)");
  }
  return x * scale;
}

unsigned default_threads() {
  if (const char* env = std::getenv("TICKBOUND_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Per-window report sink: a directory of numbered JSON files, or JSON Lines
/// to a file or stdout.
class ReportSink {
 public:
  explicit ReportSink(const std::string& path) {
    if (path.empty() || path == "-") {
      out_ = &std::cout;
      lines_ = true;
    } else if (path.size() > 6 && path.ends_with(".jsonl")) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
      out_ = file_.get();
      lines_ = true;
    } else {
      std::error_code ec;
      fs::create_directories(path, ec);
      if (ec) throw Error(ErrorCode::io, "cannot create directory '" + path + "': " + ec.message());
      dir_ = path;
    }
  }

  void write(const AnalysisReport& report) {
    if (lines_) {
      *out_ << to_canonical_json_line(to_json(report)) << '\n';
      if (!*out_) throw Error(ErrorCode::io, "report write failed");
    } else {
      std::ostringstream name;
      name << "window-" << std::setw(6) << std::setfill('0') << count_ << ".json";
      write_report(report, (fs::path(dir_) / name.str()).string());
    }
    ++count_;
  }

  void close() {
    if (out_) out_->flush();
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }

 private:
  std::ostream* out_ = nullptr;
  std::unique_ptr<std::ofstream> file_;
  std::string dir_;
  bool lines_ = false;
  std::size_t count_ = 0;
};

/// Contents of `<input>.meta.json` written by `simulate`, if present.
Json sidecar_provenance(const std::string& input) {
  const std::string meta = input + ".meta.json";
  if (input == "-" || !fs::exists(meta)) return nullptr;
  return read_json_file(meta);
}

// ---------------------------------------------------------------------------
// analyze / returns

struct AnalyzeArgs {
  std::string input;
  std::string window = "";
  std::string lag;
  double origin = 0.0;
  std::string output = "-";
  std::string schema;
  unsigned threads = 0;
  bool strict = false;
  bool gap = false;
};

int run_analyze(const AnalyzeArgs& args, const char* command) {
  AnalyzeOptions opts;
  opts.width = parse_duration(args.window, "--window");
  opts.origin = args.origin;
  if (!args.lag.empty()) opts.lag = parse_duration(args.lag, "--lag");
  opts.gap_metrics = args.gap;
  std::optional<TickSchema> schema;
  if (!args.schema.empty()) {
    try {
      schema = parse_schema(args.schema);
    } catch (const Error& e) {
      throw UsageError(std::string("--schema: ") + e.what());
    }
  }
  const unsigned threads = args.threads > 0 ? args.threads : default_threads();

  std::ifstream file;
  std::istream* in = &std::cin;
  if (args.input != "-") {
    file = open_input(args.input);
    in = &file;
  }
  const Json provenance = sidecar_provenance(args.input);
  TickReader reader(*in, args.input == "-" ? FileFormat::csv : format_for_path(args.input), schema);
  WindowAnalyzer analyzer(opts);
  ReportSink sink(args.output);
  std::size_t degenerate_windows = 0;

  const auto emit = [&](WindowOutcome outcome) {
    outcome.report.command = command;
    outcome.report.provenance = provenance;
    if (outcome.degenerate) {
      ++degenerate_windows;
      if (args.strict) {
        throw StrictFailure("window centered at " + format_double(outcome.report.window->center()) +
                            " is degenerate: " +
                            (outcome.report.warnings.empty() ? std::string("no resolvable past price")
                                                             : outcome.report.warnings.front()));
      }
    }
    sink.write(outcome.report);
  };

  std::deque<std::future<WindowOutcome>> pending;
  const auto drain = [&](std::size_t keep) {
    while (pending.size() > keep) {
      auto outcome = pending.front().get();
      pending.pop_front();
      emit(std::move(outcome));
    }
  };
  const auto submit = [&](WindowState state) {
    if (threads <= 1) {
      emit(finalize(state));
      return;
    }
    pending.push_back(std::async(std::launch::async, [s = std::move(state)] { return finalize(s); }));
    drain(2 * threads);
  };

  // Reader errors already carry their line number; analyzer errors do not.
  while (true) {
    std::optional<TradeTick> tick;
    try {
      tick = reader.next();
    } catch (const Error& e) {
      throw Error(e.code(), args.input + ": " + e.what());
    }
    if (!tick) break;
    std::optional<WindowState> closed;
    try {
      closed = analyzer.push(*tick);
    } catch (const Error& e) {
      throw Error(e.code(), args.input + ": line " + std::to_string(reader.line()) + ": " + e.what());
    }
    if (closed) submit(std::move(*closed));
  }
  if (auto last = analyzer.finish()) submit(std::move(*last));
  drain(0);
  sink.close();

  if (analyzer.ticks_seen() == 0) {
    std::cerr << "tickbound: " << args.input << ": no ticks\n";
    return kExitData;
  }
  std::cerr << "tickbound: " << analyzer.ticks_seen() << " ticks, " << sink.count() << " window report(s)";
  if (degenerate_windows > 0) std::cerr << ", " << degenerate_windows << " degenerate (warnings in reports)";
  std::cerr << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// aggregate

struct AggregateArgs {
  std::string input;
  std::string window;
  double origin = 0.0;
  std::string output = "-";
  bool strict = false;
};

AnalysisReport aggregate_report(const DealPool& pool, bool strict) {
  AnalysisReport r;
  r.command = "aggregate";
  r.window = pool.window();
  r.aggregate = aggregate(pool);
  if (r.aggregate->agg_cv_sq && r.aggregate->deal_cv_sq) {
    r.cv_transfer = cv_transfer_check(pool);
  } else {
    if (strict) throw StrictFailure("deal mean is zero; coefficient of variation undefined");
    r.warnings.push_back("deal mean is zero; coefficient of variation undefined");
  }
  r.gaussians.emplace("aggregate", gaussian_with_floor(r.aggregate->agg_mean, r.aggregate->agg_volatility,
                                                       r.aggregate->agg_second));
  return r;
}

int run_aggregate(const AggregateArgs& args) {
  const double width = parse_duration(args.window, "--window");
  const auto deals = read_deals(args.input);
  if (deals.empty()) {
    std::cerr << "tickbound: " << args.input << ": no deals\n";
    return kExitData;
  }
  for (std::size_t i = 1; i < deals.size(); ++i) {
    if (deals[i].time < deals[i - 1].time) {
      throw Error(ErrorCode::unsorted_input, args.input + ": deal index " + std::to_string(i) + " precedes its predecessor");
    }
  }
  const Json provenance = sidecar_provenance(args.input);
  ReportSink sink(args.output);
  std::vector<Deal> current;
  long long index = 0;
  const auto flush = [&] {
    if (current.empty()) return;
    auto report = aggregate_report(DealPool(std::move(current), WindowSpec::grid(args.origin, width, index)), args.strict);
    report.provenance = provenance;
    sink.write(report);
    current.clear();
  };
  for (const auto& d : deals) {
    const long long k = window_index(d.time, width, args.origin);
    if (!current.empty() && k != index) flush();
    index = k;
    current.push_back(d);
  }
  flush();
  sink.close();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// composite

struct CompositeArgs {
  std::string spec;
  std::string output = "-";
  std::optional<std::uint64_t> mc_draws;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

int run_composite(const CompositeArgs& args) {
  auto spec = parse_composite_spec(read_json_file(args.spec));
  if (args.mc_draws) spec.mc_draws = args.mc_draws;
  if (args.seed) spec.mc_seed = *args.seed;

  AnalysisReport r;
  r.command = "composite";
  CompositeSection c;
  c.moments = composite_moments(spec.components, spec.corr);
  if (c.moments.mean != 0.0) {
    c.stats = composite_stats(spec.components, spec.corr);
    c.normalization = weight_normalization(*c.stats);
    c.cv_sq_decomposed = cv_sq_decomposed(*c.stats);
  } else {
    if (args.strict) throw StrictFailure("composite mean is zero; coefficient of variation undefined");
    r.warnings.push_back("composite mean is zero; coefficient of variation undefined");
  }
  if (spec.mc_draws) {
    c.monte_carlo = monte_carlo_composite_oracle(spec.components, spec.corr, *spec.mc_draws, spec.mc_seed);
    r.provenance = {{"generator", kGeneratorId}, {"seed", spec.mc_seed}};
  }
  r.gaussians.emplace("composite", gaussian_with_floor(c.moments.mean, c.moments.volatility,
                                                       c.moments.volatility + c.moments.mean * c.moments.mean));
  r.composite = c;
  if (args.output == "-") {
    write_report(r, std::cout);
  } else {
    write_report(r, args.output);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string genspec;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ticks;
  std::string output = "-";
  unsigned threads = 0;
  std::size_t agents = 0;
  std::uint64_t agent_seed = 0;
};

int run_simulate(const SimulateArgs& args) {
  auto spec = parse_genspec(read_json_file(args.genspec));
  if (args.seed) spec.seed = *args.seed;
  if (args.ticks) spec.n_ticks = *args.ticks;
  const unsigned threads = args.threads > 0 ? args.threads : default_threads();

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (args.output != "-") {
    file.open(args.output, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::io, "cannot open '" + args.output + "' for writing");
    out = &file;
  }

  if (args.agents > 0) {
    const auto pool = agent_pool(spec, args.agents, args.agent_seed);
    write_deals_csv(*out, pool.deals());
  } else {
    const TickGenerator gen(spec);
    constexpr std::size_t kChunk = 1 << 16;
    std::vector<TradeTick> buf;
    *out << "time,value,volume\n";
    for (std::size_t begin = 0; begin < spec.n_ticks; begin += kChunk) {
      const std::size_t n = std::min(kChunk, spec.n_ticks - begin);
      buf.resize(n);
      if (threads <= 1) {
        gen.fill(begin, buf);
      } else {
        std::vector<std::jthread> pool;
        const std::size_t per = (n + threads - 1) / threads;
        for (std::size_t b = 0; b < n; b += per) {
          const std::size_t e = std::min(n, b + per);
          pool.emplace_back([&, b, e] { gen.fill(begin + b, std::span(buf).subspan(b, e - b)); });
        }
      }
      write_ticks_csv(*out, buf, false);
    }
  }
  out->flush();
  if (!*out) throw Error(ErrorCode::io, "write to '" + args.output + "' failed");

  if (args.output != "-") {
    Json meta{{"generator", kGeneratorId},
              {"engine_version", kEngineVersion},
              {"seed", spec.seed},
              {"genspec", genspec_to_json(spec)}};
    if (args.agents > 0) meta["agents"] = {{"count", args.agents}, {"seed", args.agent_seed}};
    std::ofstream m(args.output + ".meta.json", std::ios::binary | std::ios::trunc);
    m << to_canonical_json(meta);
    if (!m) throw Error(ErrorCode::io, "cannot write '" + args.output + ".meta.json'");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
  std::string input;
  std::string kind;
  std::string schema;
};

int run_check(const CheckArgs& args) {
  std::string kind = args.kind;
  if (kind.empty()) kind = args.input.ends_with(".json") ? "json" : "ticks";
  if (kind == "json") {
    const auto j = read_json_file(args.input);
    const std::string tag = j.is_object() ? j.value("schema", std::string()) : std::string();
    if (tag == kGenSpecSchema) kind = "genspec";
    else if (tag == kCompositeSchema) kind = "composite";
    else throw Error(ErrorCode::schema, args.input + ": unrecognized document (no known 'schema' tag)");
  }
  if (kind == "ticks") {
    std::optional<TickSchema> schema;
    if (!args.schema.empty()) schema = parse_schema(args.schema);
    auto in = open_input(args.input);
    TickReader reader(in, format_for_path(args.input), schema);
    std::size_t n = 0;
    double last = 0.0;
    try {
      while (auto t = reader.next()) {
        if (n > 0 && t->time < last) {
          throw Error(ErrorCode::unsorted_input, "line " + std::to_string(reader.line()) + ": tick index " +
                                                     std::to_string(n) + " precedes its predecessor");
        }
        last = t->time;
        ++n;
      }
    } catch (const Error& e) {
      throw Error(e.code(), args.input + ": " + e.what());
    }
    if (n == 0) {
      std::cerr << "tickbound: " << args.input << ": no ticks\n";
      return kExitData;
    }
    std::cout << "ok: " << n << " ticks (" << to_string(*reader.schema()) << " schema)\n";
  } else if (kind == "deals") {
    const auto deals = read_deals(args.input);
    std::cout << "ok: " << deals.size() << " deals\n";
  } else if (kind == "genspec") {
    const auto spec = parse_genspec(read_json_file(args.input));
    const TickGenerator gen(spec);
    std::cout << "ok: genspec for " << spec.n_ticks << " ticks (latent correlation " << gen.latent_rho() << ")\n";
  } else if (kind == "composite") {
    const auto spec = parse_composite_spec(read_json_file(args.input));
    (void)composite_moments(spec.components, spec.corr);
    std::cout << "ok: composite spec with " << spec.components.size() << " components\n";
  } else {
    throw UsageError("--kind must be one of ticks, deals, genspec, composite");
  }
  return kExitOk;
}

int exit_code_for(const Error& e, bool strict) {
  return strict && e.is_degeneracy() ? kExitDegenerate : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tickbound: market-based moments, volatilities and coefficients of variation of trade streams"};
  app.set_version_flag("--version", std::string("tickbound ") + std::string(kEngineVersion) + " (report schema " +
                                        std::string(kReportSchema) + ")");
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  const auto add_analyze_flags = [](CLI::App* sub, AnalyzeArgs& a, bool lag_required) {
    sub->add_option("input", a.input, "Tick file (CSV or .jsonl), '-' for stdin")->required();
    sub->add_option("-w,--window", a.window, "Window width, e.g. 60s, 5m")->required();
    auto* lag = sub->add_option("--lag", a.lag, "Return lag tau, e.g. 5s");
    if (lag_required) lag->required();
    sub->add_option("--origin", a.origin, "Window grid origin in seconds");
    sub->add_option("-o,--output", a.output, "Output directory, .jsonl file, or '-' for stdout");
    sub->add_option("--schema", a.schema, "Expected tick schema: value or price");
    sub->add_option("--threads", a.threads, "Worker threads (default: TICKBOUND_THREADS or hardware)");
    sub->add_flag("--strict", a.strict, "Fail with exit 4 on numeric degeneracy");
    sub->add_flag("--gap", a.gap, "Retain prices and report Gaussian gap metrics");
  };
  auto* analyze = app.add_subcommand("analyze", "Per-window price (and optional return) statistics");
  add_analyze_flags(analyze, analyze_args, false);
  AnalyzeArgs returns_args;
  auto* returns = app.add_subcommand("returns", "Per-window return statistics (lag required)");
  add_analyze_flags(returns, returns_args, true);

  AggregateArgs aggregate_args;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Aggregate-variable statistics of a deal file per window");
  aggregate_cmd->add_option("input", aggregate_args.input, "Deal file: CSV agent,time,value or .jsonl")->required();
  aggregate_cmd->add_option("-w,--window", aggregate_args.window, "Window width")->required();
  aggregate_cmd->add_option("--origin", aggregate_args.origin, "Window grid origin in seconds");
  aggregate_cmd->add_option("-o,--output", aggregate_args.output, "Output directory, .jsonl file, or '-'");
  aggregate_cmd->add_flag("--strict", aggregate_args.strict, "Fail with exit 4 on numeric degeneracy");

  CompositeArgs composite_args;
  auto* composite_cmd = app.add_subcommand("composite", "Uncertainty of a linear combination of components");
  composite_cmd->add_option("--spec", composite_args.spec, "Composite spec (JSON)")->required();
  composite_cmd->add_option("-o,--output", composite_args.output, "Report path or '-'");
  composite_cmd->add_option("--mc-draws", composite_args.mc_draws, "Run the Monte Carlo oracle with this many draws");
  composite_cmd->add_option("--seed", composite_args.seed, "Monte Carlo seed");
  composite_cmd->add_flag("--strict", composite_args.strict, "Fail with exit 4 on numeric degeneracy");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic tick (or deal) stream");
  simulate->add_option("--genspec", simulate_args.genspec, "Generator spec (JSON)")->required();
  simulate->add_option("--seed", simulate_args.seed, "Override the spec seed");
  simulate->add_option("--ticks", simulate_args.ticks, "Override the number of ticks");
  simulate->add_option("-o,--output", simulate_args.output, "Output CSV path or '-'");
  simulate->add_option("--threads", simulate_args.threads, "Generator threads");
  simulate->add_option("--agents", simulate_args.agents, "Emit a deal file split over this many agents");
  simulate->add_option("--agent-seed", simulate_args.agent_seed, "Seed of the agent split");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Validate an input file without computing");
  check->add_option("input", check_args.input, "File to validate")->required();
  check->add_option("--kind", check_args.kind, "ticks, deals, genspec or composite (default: by extension)");
  check->add_option("--schema", check_args.schema, "Expected tick schema: value or price");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return run_analyze(analyze_args, "analyze");
    if (*returns) return run_analyze(returns_args, "returns");
    if (*aggregate_cmd) return run_aggregate(aggregate_args);
    if (*composite_cmd) return run_composite(composite_args);
    if (*simulate) return run_simulate(simulate_args);
    if (*check) return run_check(check_args);
  } catch (const UsageError& e) {
    std::cerr << "tickbound: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StrictFailure& e) {
    std::cerr << "tickbound: strict: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const Error& e) {
    std::cerr << "tickbound: " << e.what() << '\n';
    const bool strict = analyze_args.strict || returns_args.strict || aggregate_args.strict || composite_args.strict;
    return exit_code_for(e, strict);
  }
  return kExitUsage;
}
