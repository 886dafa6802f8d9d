#pragma once

// Experiment configuration: flat `key = value` text, `#` starts a comment.
// Every key is optional; an empty document is the Omega = 2 setup of `ods fig2 a`
// (D1 = D3 = 0.3, D2 = D4 = 0.2, gamma2_deph = 0.02, Gamma21 = 0.002).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ods/drive.hpp"
#include "ods/errors.hpp"
#include "ods/lindblad.hpp"
#include "ods/planner.hpp"

namespace ods {

struct RampConfig {
  RampShape shape = RampShape::kRaisedCosine;
  double tau_periods = RampSchedule::kDefaultTauPeriods;
  double t_on = 0.0;
  double t_off = std::numeric_limits<double>::infinity();

  RampSchedule schedule(double period) const {
    return {shape == RampShape::kInstantaneous ? 0.0 : tau_periods * period, t_on, t_off, shape};
  }

  bool operator==(const RampConfig&) const = default;
};

enum class InitialState { kGround1, kGround2, kExcited3, kMixed };

inline const char* to_string(InitialState s) {
  switch (s) {
    case InitialState::kGround1: return "1";
    case InitialState::kGround2: return "2";
    case InitialState::kExcited3: return "3";
    case InitialState::kMixed: return "mixed";
  }
  return "?";
}

inline DensityMatrix initial_density(InitialState s) {
  switch (s) {
    case InitialState::kGround1: return pure_density(PureState::basis(1));
    case InitialState::kGround2: return pure_density(PureState::basis(2));
    case InitialState::kExcited3: return pure_density(PureState::basis(3));
    case InitialState::kMixed: return DensityMatrix::maximally_mixed();
  }
  return DensityMatrix::maximally_mixed();
}

struct RunConfig {
  Frame frame = Frame::kFull;
  double t_end_periods = 4.0;
  int n_periods = 1000;
  InitialState initial_state = InitialState::kGround1;
  std::optional<TargetState> target;
  int retrieval_index = 0;
  bool allow_non_ods = false;

  bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
  DriveParams drive;
  DecoherenceRates rates;
  RampConfig ramp;
  IntegratorConfig integrator;
  RunConfig run;

  double period() const { return drive.period(); }
  RampSchedule schedule() const { return ramp.schedule(period()); }
  /// Sample cadence, T/200 unless set.
  double sample_interval() const {
    return integrator.sample_interval > 0.0 ? integrator.sample_interval
                                            : period() / IntegratorConfig::kDefaultSamplesPerPeriod;
  }

  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

inline void ExperimentConfig::validate() const {
  drive.validate();
  rates.validate();
  integrator.validate();
  if (drive.small_delta() == 0.0) {
    throw ValidationError("delta2", "delta1 - delta2 must be nonzero (oscillation period T = 2 pi / |delta|)");
  }
  if (!run.allow_non_ods) {
    if (std::abs(drive.small_delta() - drive.small_delta_34()) > kOdsTolerance) {
      throw ValidationError("delta4", "(delta3 - delta4)/2 must equal (delta1 - delta2)/2 for an oscillating dark state");
    }
    if (std::abs(drive.big_delta_prime()) > kOdsTolerance) {
      throw ValidationError("delta3", "delta1 + delta2 must equal delta3 + delta4 (D' = 0)");
    }
  }
  if (!(ramp.tau_periods >= 0.0) || !std::isfinite(ramp.tau_periods)) {
    throw ValidationError("ramp_tau_periods", "must be finite and >= 0");
  }
  if (!std::isfinite(ramp.t_on)) throw ValidationError("ramp_t_on", "must be finite");
  schedule().validate();
  if (!(run.t_end_periods > 0.0) || !std::isfinite(run.t_end_periods)) {
    throw ValidationError("t_end_periods", "must be > 0");
  }
  if (run.n_periods < 1) throw ValidationError("n_periods", "must be >= 1");
  if (run.retrieval_index < 0) throw ValidationError("retrieval_index", "must be >= 0");
  if (run.target) {
    if (!(run.target->alpha >= 0.0 && run.target->alpha <= 0.5 * kPi)) {
      throw ValidationError("target_alpha", "must lie in [0, pi/2]");
    }
    if (!std::isfinite(run.target->beta)) throw ValidationError("target_beta", "must be finite");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class ConfigReader {
 public:
  explicit ConfigReader(ExperimentConfig& cfg) : cfg_(cfg) {}

  void apply(std::string_view key, std::string_view value, std::size_t line) {
    const auto it = setters().find(std::string(key));
    if (it == setters().end()) throw ParseError(line, "unknown key '" + std::string(key) + "'");
    it->second(*this, value, line);
  }

 private:
  using Setter = std::function<void(ConfigReader&, std::string_view, std::size_t)>;

  static double number(std::string_view v, std::size_t line) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && v.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
      throw ParseError(line, "expected a number, got '" + std::string(v) + "'");
    }
    return out;
  }

  static int integer(std::string_view v, std::size_t line) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ParseError(line, "expected an integer, got '" + std::string(v) + "'");
    }
    return out;
  }

  static bool boolean(std::string_view v, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(line, "expected true/false, got '" + std::string(v) + "'");
  }

  TargetState& target() {
    if (!cfg_.run.target) cfg_.run.target = TargetState{};
    return *cfg_.run.target;
  }

  template <class F>
  static Setter real(F field) {
    return [field](ConfigReader& r, std::string_view v, std::size_t line) {
      field(r.cfg_) = number(v, line);
    };
  }

  static const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"omega", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.cfg_.drive.omega12 = r.cfg_.drive.omega34 = number(v, l);
         }},
        {"omega12", real([](ExperimentConfig& c) -> double& { return c.drive.omega12; })},
        {"omega34", real([](ExperimentConfig& c) -> double& { return c.drive.omega34; })},
        {"phi12", real([](ExperimentConfig& c) -> double& { return c.drive.phi12; })},
        {"phi34", real([](ExperimentConfig& c) -> double& { return c.drive.phi34; })},
        {"delta1", real([](ExperimentConfig& c) -> double& { return c.drive.delta1; })},
        {"delta2", real([](ExperimentConfig& c) -> double& { return c.drive.delta2; })},
        {"delta3", real([](ExperimentConfig& c) -> double& { return c.drive.delta3; })},
        {"delta4", real([](ExperimentConfig& c) -> double& { return c.drive.delta4; })},
        {"clock_offset", real([](ExperimentConfig& c) -> double& { return c.drive.clock_offset; })},
        {"gamma31_se", real([](ExperimentConfig& c) -> double& { return c.rates.gamma31_se; })},
        {"gamma32_se", real([](ExperimentConfig& c) -> double& { return c.rates.gamma32_se; })},
        {"gamma3_deph", real([](ExperimentConfig& c) -> double& { return c.rates.gamma3_deph; })},
        {"gamma2_deph", real([](ExperimentConfig& c) -> double& { return c.rates.gamma2_deph; })},
        {"gamma21_long", real([](ExperimentConfig& c) -> double& { return c.rates.gamma21_long; })},
        {"ramp_shape", [](ConfigReader& r, std::string_view v, std::size_t l) {
           if (v == "linear") r.cfg_.ramp.shape = RampShape::kLinear;
           else if (v == "raised-cosine") r.cfg_.ramp.shape = RampShape::kRaisedCosine;
           else if (v == "instantaneous") r.cfg_.ramp.shape = RampShape::kInstantaneous;
           else throw ParseError(l, "ramp_shape must be linear, raised-cosine or instantaneous");
         }},
        {"ramp_tau_periods", real([](ExperimentConfig& c) -> double& { return c.ramp.tau_periods; })},
        {"ramp_t_on", real([](ExperimentConfig& c) -> double& { return c.ramp.t_on; })},
        {"ramp_t_off", real([](ExperimentConfig& c) -> double& { return c.ramp.t_off; })},
        {"method", [](ConfigReader& r, std::string_view v, std::size_t l) {
           if (v == "rk45") r.cfg_.integrator.method = Method::kRk45Adaptive;
           else if (v == "rk4") r.cfg_.integrator.method = Method::kRk4Fixed;
           else throw ParseError(l, "method must be rk45 or rk4");
         }},
        {"step", real([](ExperimentConfig& c) -> double& { return c.integrator.step; })},
        {"abs_tol", real([](ExperimentConfig& c) -> double& { return c.integrator.abs_tol; })},
        {"rel_tol", real([](ExperimentConfig& c) -> double& { return c.integrator.rel_tol; })},
        {"sample_interval", real([](ExperimentConfig& c) -> double& { return c.integrator.sample_interval; })},
        {"frame", [](ConfigReader& r, std::string_view v, std::size_t l) {
           if (v == "full") r.cfg_.run.frame = Frame::kFull;
           else if (v == "effective") r.cfg_.run.frame = Frame::kEffective;
           else throw ParseError(l, "frame must be full or effective");
         }},
        {"t_end_periods", real([](ExperimentConfig& c) -> double& { return c.run.t_end_periods; })},
        {"n_periods", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.cfg_.run.n_periods = integer(v, l);
         }},
        {"initial_state", [](ConfigReader& r, std::string_view v, std::size_t l) {
           if (v == "1") r.cfg_.run.initial_state = InitialState::kGround1;
           else if (v == "2") r.cfg_.run.initial_state = InitialState::kGround2;
           else if (v == "3") r.cfg_.run.initial_state = InitialState::kExcited3;
           else if (v == "mixed") r.cfg_.run.initial_state = InitialState::kMixed;
           else throw ParseError(l, "initial_state must be 1, 2, 3 or mixed");
         }},
        {"target_alpha", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.target().alpha = number(v, l);
         }},
        {"target_beta", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.target().beta = number(v, l);
         }},
        {"retrieval_index", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.cfg_.run.retrieval_index = integer(v, l);
         }},
        {"allow_non_ods", [](ConfigReader& r, std::string_view v, std::size_t l) {
           r.cfg_.run.allow_non_ods = boolean(v, l);
         }},
    };
    return table;
  }

  ExperimentConfig& cfg_;
};

}  // namespace detail

/// Applies `key=value` lines from `text` on top of `base` without validating.
inline ExperimentConfig apply_config_text(std::string_view text, ExperimentConfig base = {}) {
  detail::ConfigReader reader(base);
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
    if (!seen.emplace(key).second) throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
    reader.apply(key, value, line_no);
    if (end == text.size()) break;
  }
  return base;
}

/// Parses and validates a configuration document.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg = apply_config_text(text);
  cfg.validate();
  return cfg;
}

/// Canonical rendering; parse_config(render_config(c)) == c.
inline std::string render_config(const ExperimentConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  const auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  os << "# drive\n";
  kv("omega12", format_double(c.drive.omega12));
  kv("omega34", format_double(c.drive.omega34));
  kv("phi12", format_double(c.drive.phi12));
  kv("phi34", format_double(c.drive.phi34));
  kv("delta1", format_double(c.drive.delta1));
  kv("delta2", format_double(c.drive.delta2));
  kv("delta3", format_double(c.drive.delta3));
  kv("delta4", format_double(c.drive.delta4));
  kv("clock_offset", format_double(c.drive.clock_offset));
  os << "# decoherence\n";
  kv("gamma31_se", format_double(c.rates.gamma31_se));
  kv("gamma32_se", format_double(c.rates.gamma32_se));
  kv("gamma3_deph", format_double(c.rates.gamma3_deph));
  kv("gamma2_deph", format_double(c.rates.gamma2_deph));
  kv("gamma21_long", format_double(c.rates.gamma21_long));
  os << "# ramp\n";
  kv("ramp_shape", to_string(c.ramp.shape));
  kv("ramp_tau_periods", format_double(c.ramp.tau_periods));
  kv("ramp_t_on", format_double(c.ramp.t_on));
  kv("ramp_t_off", format_double(c.ramp.t_off));
  os << "# integrator\n";
  kv("method", to_string(c.integrator.method));
  kv("step", format_double(c.integrator.step));
  kv("abs_tol", format_double(c.integrator.abs_tol));
  kv("rel_tol", format_double(c.integrator.rel_tol));
  kv("sample_interval", format_double(c.integrator.sample_interval));
  os << "# run\n";
  kv("frame", to_string(c.run.frame));
  kv("t_end_periods", format_double(c.run.t_end_periods));
  kv("n_periods", std::to_string(c.run.n_periods));
  kv("initial_state", to_string(c.run.initial_state));
  if (c.run.target) {
    kv("target_alpha", format_double(c.run.target->alpha));
    kv("target_beta", format_double(c.run.target->beta));
  }
  kv("retrieval_index", std::to_string(c.run.retrieval_index));
  kv("allow_non_ods", c.run.allow_non_ods ? "true" : "false");
  return os.str();
}

}  // namespace ods
