#pragma once

// Tick and deal files (CSV or JSON Lines), tick CSV output, and the JSON
// configuration documents for generator and composite specs.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tickbound/canonical_json.hpp"
#include "tickbound/composite_var.hpp"
#include "tickbound/error.hpp"
#include "tickbound/macro_agg.hpp"
#include "tickbound/synth_gen.hpp"
#include "tickbound/trade_core.hpp"
#include "tickbound/version.hpp"

namespace tickbound {

/// Column schema of a tick file: (time, value, volume) or (time, price, volume).
enum class TickSchema { value, price };

enum class FileFormat { csv, jsonl };

[[nodiscard]] inline std::string_view to_string(TickSchema s) noexcept {
  return s == TickSchema::value ? "value" : "price";
}

[[nodiscard]] inline TickSchema parse_schema(std::string_view s) {
  if (s == "value") return TickSchema::value;
  if (s == "price") return TickSchema::price;
  throw Error(ErrorCode::schema, "unknown tick schema '" + std::string(s) + "' (expected value or price)");
}

[[nodiscard]] inline FileFormat format_for_path(const std::string& path) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".jsonl") || ends_with(".ndjson") ? FileFormat::jsonl : FileFormat::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string at_line(std::size_t line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

inline double parse_number(std::string_view field, std::size_t line, std::string_view name) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::parse, at_line(line, "cannot parse " + std::string(name) + " '" + std::string(field) + "'"));
  }
  if (!std::isfinite(x)) throw Error(ErrorCode::parse, at_line(line, std::string(name) + " is not finite"));
  return x;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<TickSchema> header_schema(std::string_view line) {
  const auto cols = split_csv(line);
  if (cols.size() != 3 || trim(cols[0]) != "time" || trim(cols[2]) != "volume") return std::nullopt;
  if (trim(cols[1]) == "value") return TickSchema::value;
  if (trim(cols[1]) == "price") return TickSchema::price;
  return std::nullopt;
}

inline TradeTick finish_tick(double time, double second, double volume, TickSchema schema, std::size_t line) {
  if (!(volume > 0.0)) throw Error(ErrorCode::invalid_tick, at_line(line, "volume must be positive"));
  TradeTick t{time, schema == TickSchema::price ? second * volume : second, volume};
  if (!std::isfinite(t.value)) throw Error(ErrorCode::invalid_tick, at_line(line, "value overflows"));
  return t;
}

}  // namespace detail

/// Streaming tick reader. Ticks come back in file order; nothing is retained.
class TickReader {
 public:
  TickReader(std::istream& in, FileFormat format, std::optional<TickSchema> expected = std::nullopt)
      : in_(in), format_(format), expected_(expected) {}

  /// Next tick, or nullopt at end of input.
  [[nodiscard]] std::optional<TradeTick> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      const auto text = detail::trim(raw);
      if (text.empty()) continue;
      saw_content_ = true;
      if (format_ == FileFormat::csv) {
        if (auto t = parse_csv(text)) return t;
      } else {
        return parse_jsonl(text);
      }
    }
    if (format_ == FileFormat::csv && saw_content_ && !schema_) {
      throw Error(ErrorCode::schema, "missing header (expected time,value,volume or time,price,volume)");
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::optional<TickSchema> schema() const noexcept { return schema_; }

 private:
  void adopt(TickSchema s) {
    if (expected_ && *expected_ != s) {
      throw Error(ErrorCode::schema, detail::at_line(line_, "file uses the " + std::string(to_string(s)) +
                                                                " schema but " + std::string(to_string(*expected_)) +
                                                                " was requested"));
    }
    if (schema_ && *schema_ != s) {
      throw Error(ErrorCode::schema, detail::at_line(line_, "mixed schemas in one file"));
    }
    schema_ = s;
  }

  std::optional<TradeTick> parse_csv(std::string_view text) {
    if (auto h = detail::header_schema(text)) {
      adopt(*h);
      return std::nullopt;
    }
    if (!schema_) {
      throw Error(ErrorCode::schema,
                  detail::at_line(line_, "expected header time,value,volume or time,price,volume"));
    }
    const auto cols = detail::split_csv(text);
    if (cols.size() != 3) {
      throw Error(ErrorCode::parse, detail::at_line(line_, "expected 3 fields, found " + std::to_string(cols.size())));
    }
    const double time = detail::parse_number(cols[0], line_, "time");
    const double second = detail::parse_number(cols[1], line_, to_string(*schema_));
    const double volume = detail::parse_number(cols[2], line_, "volume");
    return detail::finish_tick(time, second, volume, *schema_, line_);
  }

  TradeTick parse_jsonl(std::string_view text) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::parse, detail::at_line(line_, e.what()));
    }
    if (!j.is_object()) throw Error(ErrorCode::parse, detail::at_line(line_, "expected a JSON object"));
    const bool has_value = j.contains("value"), has_price = j.contains("price");
    if (has_value == has_price) {
      throw Error(ErrorCode::schema, detail::at_line(line_, "record needs exactly one of value or price"));
    }
    adopt(has_value ? TickSchema::value : TickSchema::price);
    const auto num = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_number()) {
        throw Error(ErrorCode::parse, detail::at_line(line_, std::string("missing numeric field '") + key + "'"));
      }
      const double x = j[key].get<double>();
      if (!std::isfinite(x)) throw Error(ErrorCode::parse, detail::at_line(line_, std::string(key) + " is not finite"));
      return x;
    };
    return detail::finish_tick(num("time"), num(has_value ? "value" : "price"), num("volume"), *schema_, line_);
  }

  std::istream& in_;
  FileFormat format_;
  std::optional<TickSchema> expected_;
  std::optional<TickSchema> schema_;
  std::size_t line_ = 0;
  bool saw_content_ = false;
};

[[nodiscard]] inline std::vector<TradeTick> read_ticks(std::istream& in, FileFormat format = FileFormat::csv,
                                                       std::optional<TickSchema> schema = std::nullopt) {
  TickReader reader(in, format, schema);
  std::vector<TradeTick> ticks;
  while (auto t = reader.next()) ticks.push_back(*t);
  return ticks;
}

[[nodiscard]] inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return in;
}

[[nodiscard]] inline std::vector<TradeTick> read_ticks(const std::string& path,
                                                       std::optional<TickSchema> schema = std::nullopt) {
  auto in = open_input(path);
  try {
    return read_ticks(in, format_for_path(path), schema);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

/// CSV `time,value,volume` with shortest round-trip numbers.
inline void write_ticks_csv(std::ostream& out, std::span<const TradeTick> ticks, bool header = true) {
  if (header) out << "time,value,volume\n";
  std::string line;
  for (const auto& t : ticks) {
    line.clear();
    line += format_double(t.time);
    line += ',';
    line += format_double(t.value);
    line += ',';
    line += format_double(t.volume);
    line += '\n';
    out << line;
  }
}

/// Deal file: CSV `agent,time,value` or JSON Lines with the same keys.
[[nodiscard]] inline std::vector<Deal> read_deals(std::istream& in, FileFormat format = FileFormat::csv) {
  std::vector<Deal> deals;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (text.empty()) continue;
    if (format == FileFormat::jsonl) {
      Json j;
      try {
        j = Json::parse(text);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::parse, detail::at_line(line, e.what()));
      }
      if (!j.is_object() || !j.contains("time") || !j.contains("value") || !j["time"].is_number() ||
          !j["value"].is_number()) {
        throw Error(ErrorCode::parse, detail::at_line(line, "expected {agent, time, value}"));
      }
      Deal d{j.value("agent", std::string()), j["time"].get<double>(), j["value"].get<double>()};
      if (!std::isfinite(d.time) || !std::isfinite(d.value)) {
        throw Error(ErrorCode::parse, detail::at_line(line, "non-finite field"));
      }
      deals.push_back(std::move(d));
      continue;
    }
    const auto cols = detail::split_csv(text);
    if (!header) {
      if (cols.size() != 3 || detail::trim(cols[0]) != "agent" || detail::trim(cols[1]) != "time" ||
          detail::trim(cols[2]) != "value") {
        throw Error(ErrorCode::schema, detail::at_line(line, "expected header agent,time,value"));
      }
      header = true;
      continue;
    }
    if (cols.size() != 3) {
      throw Error(ErrorCode::parse, detail::at_line(line, "expected 3 fields, found " + std::to_string(cols.size())));
    }
    deals.push_back({std::string(detail::trim(cols[0])), detail::parse_number(cols[1], line, "time"),
                     detail::parse_number(cols[2], line, "value")});
  }
  if (format == FileFormat::csv && !header) throw Error(ErrorCode::schema, "missing header agent,time,value");
  return deals;
}

[[nodiscard]] inline std::vector<Deal> read_deals(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_deals(in, format_for_path(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

inline void write_deals_csv(std::ostream& out, std::span<const Deal> deals) {
  out << "agent,time,value\n";
  for (const auto& d : deals) out << d.agent_id << ',' << format_double(d.time) << ',' << format_double(d.value) << '\n';
}

[[nodiscard]] inline Json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }
}

namespace detail {

inline double require_number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(ErrorCode::schema, where + ": missing numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

inline void check_schema_tag(const Json& j, std::string_view expected) {
  if (!j.is_object()) throw Error(ErrorCode::schema, "document must be a JSON object");
  if (j.contains("schema") && j["schema"] != expected) {
    throw Error(ErrorCode::schema, "unsupported schema " + j["schema"].dump() + " (expected " + std::string(expected) + ")");
  }
}

inline Marginal parse_marginal(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw Error(ErrorCode::schema, where + ": expected an object with a 'family' field");
  }
  const auto family = j["family"].get<std::string>();
  if (family == "lognormal") return Marginal::lognormal(require_number(j, "mu", where), require_number(j, "sigma", where));
  if (family == "gamma") return Marginal::gamma(require_number(j, "shape", where), require_number(j, "scale", where));
  if (family == "constant") return Marginal::constant(require_number(j, "value", where));
  throw Error(ErrorCode::schema, where + ": unknown family '" + family + "'");
}

inline Json marginal_to_json(const Marginal& m) {
  switch (m.family()) {
    case Family::lognormal: return {{"family", "lognormal"}, {"mu", m.param1()}, {"sigma", m.param2()}};
    case Family::gamma: return {{"family", "gamma"}, {"shape", m.param1()}, {"scale", m.param2()}};
    case Family::constant: return {{"family", "constant"}, {"value", m.param1()}};
  }
  return {};
}

}  // namespace detail

[[nodiscard]] inline GenSpec parse_genspec(const Json& j) {
  detail::check_schema_tag(j, kGenSpecSchema);
  GenSpec s;
  if (!j.contains("n_ticks") || !j["n_ticks"].is_number_integer() || j["n_ticks"].get<long long>() < 0) {
    throw Error(ErrorCode::schema, "genspec: 'n_ticks' must be a nonnegative integer");
  }
  s.n_ticks = j["n_ticks"].get<std::size_t>();
  s.time_step = detail::require_number(j, "time_step", "genspec");
  s.start_time = j.value("start_time", 0.0);
  if (!j.contains("value") || !j.contains("volume")) throw Error(ErrorCode::schema, "genspec: 'value' and 'volume' are required");
  s.value = detail::parse_marginal(j["value"], "genspec.value");
  s.volume = detail::parse_marginal(j["volume"], "genspec.volume");
  s.target_corr_cu = j.value("target_corr_cu", 0.0);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorCode::schema, "genspec: 'seed' must be a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

[[nodiscard]] inline Json genspec_to_json(const GenSpec& s) {
  return {{"schema", kGenSpecSchema},
          {"n_ticks", s.n_ticks},
          {"time_step", s.time_step},
          {"start_time", s.start_time},
          {"value", detail::marginal_to_json(s.value)},
          {"volume", detail::marginal_to_json(s.volume)},
          {"target_corr_cu", s.target_corr_cu},
          {"seed", s.seed}};
}

/// A composite specification, either a generic linear combination or the
/// profit form (sales minus expenses).
struct CompositeSpec {
  std::vector<ComponentStat> components;
  CorrelationMatrix corr;
  bool is_profit = false;
  std::optional<std::uint64_t> mc_draws;
  std::uint64_t mc_seed = 0;
};

namespace detail {

inline std::vector<double> number_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::schema, where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::schema, where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

[[nodiscard]] inline CompositeSpec parse_composite_spec(const Json& j) {
  detail::check_schema_tag(j, kCompositeSchema);
  CompositeSpec spec;
  const std::string kind = j.value("kind", std::string("linear"));
  if (kind == "profit") {
    spec.is_profit = true;
    const auto sales = detail::number_array(j.value("sales", Json()), "composite.sales");
    const auto expenses = detail::number_array(j.value("expenses", Json()), "composite.expenses");
    spec.components = detail::profit_components(sales, expenses);
    double corr = 0.0;
    if (j.contains("corr")) {
      corr = detail::require_number(j, "corr", "composite");
    } else if (sales.size() == expenses.size()) {
      corr = cross_correlation(sales, expenses);
    } else {
      throw Error(ErrorCode::incomplete_spec, "composite: sales and expenses differ in length; supply 'corr'");
    }
    spec.corr.set("sales", "expenses", corr);
  } else if (kind == "linear") {
    if (!j.contains("components") || !j["components"].is_array()) {
      throw Error(ErrorCode::schema, "composite: 'components' array is required");
    }
    std::map<std::string, std::vector<double>> samples;
    for (const auto& c : j["components"]) {
      if (!c.is_object() || !c.contains("label") || !c["label"].is_string()) {
        throw Error(ErrorCode::schema, "composite: each component needs a 'label'");
      }
      ComponentStat s;
      s.label = c["label"].get<std::string>();
      const std::string where = "composite.components[" + s.label + "]";
      if (c.contains("samples")) {
        const auto xs = detail::number_array(c["samples"], where + ".samples");
        const auto acc = accumulate(xs);
        s.mean = acc.mean();
        s.volatility = acc.volatility();
        // "count" scales the per-deal mean to the pool total.
        if (c.contains("beta") && c["beta"] == "count") {
          s.beta = static_cast<double>(xs.size());
        } else if (c.contains("beta") && c["beta"] == "-count") {
          s.beta = -static_cast<double>(xs.size());
        } else {
          s.beta = c.contains("beta") ? detail::require_number(c, "beta", where) : 1.0;
        }
        samples[s.label] = xs;
      } else {
        s.beta = c.contains("beta") ? detail::require_number(c, "beta", where) : 1.0;
        s.mean = detail::require_number(c, "mean", where);
        s.volatility = detail::require_number(c, "volatility", where);
      }
      spec.components.push_back(std::move(s));
    }
    if (j.contains("correlations")) {
      for (const auto& e : j["correlations"]) {
        if (!e.is_object() || !e.contains("a") || !e.contains("b") || !e["a"].is_string() || !e["b"].is_string()) {
          throw Error(ErrorCode::schema, "composite.correlations: entries need 'a', 'b' and 'value'");
        }
        spec.corr.set(e["a"].get<std::string>(), e["b"].get<std::string>(),
                      detail::require_number(e, "value", "composite.correlations"));
      }
    }
    if (j.value("pairing", std::string()) == "index") {
      for (std::size_t q = 0; q < spec.components.size(); ++q) {
        for (std::size_t k = q + 1; k < spec.components.size(); ++k) {
          const auto& a = spec.components[q].label;
          const auto& b = spec.components[k].label;
          if (spec.corr.get(a, b)) continue;
          if (!samples.count(a) || !samples.count(b)) continue;
          if (samples[a].size() != samples[b].size()) {
            throw Error(ErrorCode::incomplete_spec, "composite: cannot pair '" + a + "' and '" + b +
                                                        "' of different lengths; supply the correlation");
          }
          spec.corr.set(a, b, cross_correlation(samples[a], samples[b]));
        }
      }
    }
  } else {
    throw Error(ErrorCode::schema, "composite: unknown kind '" + kind + "'");
  }
  if (j.contains("monte_carlo")) {
    const auto& mc = j["monte_carlo"];
    if (!mc.is_object() || !mc.contains("draws") || !mc["draws"].is_number_unsigned()) {
      throw Error(ErrorCode::schema, "composite.monte_carlo: 'draws' must be a positive integer");
    }
    spec.mc_draws = mc["draws"].get<std::uint64_t>();
    spec.mc_seed = mc.value("seed", std::uint64_t{0});
  }
  return spec;
}

}  // namespace tickbound
