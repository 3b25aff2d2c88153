#pragma once

// Run configuration, computation dispatch and deterministic rendering for
// the command-line front end. CSV output is plain data with a fixed column
// order, 12 significant digits and LF line endings; JSON output carries a
// config echo with the derived state constants alongside the same numbers.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiggen/fock.hpp"
#include "wiggen/fock_basis.hpp"
#include "wiggen/gaussian.hpp"
#include "wiggen/states.hpp"
#include "wiggen/statistics.hpp"
#include "wiggen/subtraction.hpp"

namespace wiggen {

struct RangeSpec {
  double lo = -4.0;
  double hi = 4.0;
  double step = 0.05;

  static RangeSpec parse(const std::string& text) {
    RangeSpec r;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step,
                    &tail) != 3)
      throw std::invalid_argument("range must be lo:hi:step");
    if (!(r.step > 0.0) || !(r.hi >= r.lo))
      throw std::invalid_argument("range must satisfy hi >= lo and step > 0");
    return r;
  }

  int count() const {
    return static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  }
  double at(int i) const { return lo + i * step; }
};

enum class RunMethod { formal, heralded, npnr, squeezed_fock };
enum class OutFormat { csv, json };

inline std::string_view method_name(RunMethod m) {
  switch (m) {
    case RunMethod::formal: return "formal";
    case RunMethod::heralded: return "heralded";
    case RunMethod::npnr: return "npnr";
    case RunMethod::squeezed_fock: return "squeezed_fock";
  }
  throw std::invalid_argument("unknown method");
}

inline RunMethod method_from_name(std::string_view s) {
  if (s == "formal") return RunMethod::formal;
  if (s == "heralded") return RunMethod::heralded;
  if (s == "npnr") return RunMethod::npnr;
  if (s == "squeezed_fock" || s == "squeezed-fock")
    return RunMethod::squeezed_fock;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

struct RunConfig {
  StateSpec state = make_spec(StateKind::squeezed_vacuum, 1.0, 0.0);
  RunMethod method = RunMethod::formal;
  int n = 1;
  double zeta = 0.2;
  Axis axis = Axis::q;
  RangeSpec range;
  OutFormat format = OutFormat::csv;
  std::string out;  // empty writes to stdout
  bool oracle = false;
  bool fast = false;
  int n_report = kDefaultReport;
};

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline nlohmann::json config_json(const RunConfig& cfg) {
  auto eq = equivalent_sts(cfg.state);
  nlohmann::json j;
  j["state"] = {{"kind", std::string(kind_name(cfg.state.kind))},
                {"mean_n", cfg.state.mean_n},
                {"phi", cfg.state.phi},
                {"purity", cfg.state.purity},
                {"transmission", cfg.state.transmission}};
  j["derived"] = {{"A", cfg.state.A},
                  {"B_re", cfg.state.B.real()},
                  {"B_im", cfg.state.B.imag()},
                  {"equivalent_purity", eq.purity},
                  {"equivalent_A", eq.A},
                  {"equivalent_B_re", eq.B.real()},
                  {"equivalent_B_im", eq.B.imag()}};
  j["method"] = std::string(method_name(cfg.method));
  j["n"] = cfg.n;
  j["zeta"] = cfg.zeta;
  j["axis"] = cfg.axis == Axis::q ? "q" : "p";
  j["range"] = {{"lo", cfg.range.lo}, {"hi", cfg.range.hi},
                {"step", cfg.range.step}};
  j["n_report"] = cfg.n_report;
  j["oracle"] = cfg.oracle;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  const auto& s = j.at("state");
  cfg.state = make_spec(kind_from_name(s.at("kind").get<std::string>()),
                        s.at("mean_n").get<double>(), s.at("phi").get<double>(),
                        s.at("purity").get<double>(),
                        s.at("transmission").get<double>());
  cfg.method = method_from_name(j.at("method").get<std::string>());
  cfg.n = j.at("n").get<int>();
  cfg.zeta = j.at("zeta").get<double>();
  cfg.axis = j.at("axis").get<std::string>() == "p" ? Axis::p : Axis::q;
  cfg.range.lo = j.at("range").at("lo").get<double>();
  cfg.range.hi = j.at("range").at("hi").get<double>();
  cfg.range.step = j.at("range").at("step").get<double>();
  cfg.n_report = j.at("n_report").get<int>();
  cfg.oracle = j.at("oracle").get<bool>();
  return cfg;
}

// ---------------------------------------------------------------------------
// Computation dispatch

namespace detail {

inline void require_method_args(const RunConfig& cfg) {
  if (cfg.n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  if (cfg.method == RunMethod::heralded || cfg.method == RunMethod::npnr)
    require_tap_share(cfg.zeta);
}

/// Normalized Wigner functions W_0..W_n of the configured family (a single
/// entry for the click-conditioned method).
struct SliceFamily {
  std::vector<PolyGaussian<cplx>> members;
  std::optional<ClickConditionedState> click;

  int columns() const {
    return click ? 1 : static_cast<int>(members.size());
  }
  double value(int k, PhasePoint pt) const {
    if (click) return click->value(pt);
    return evaluate_real(members[static_cast<size_t>(k)], pt);
  }
};

inline SliceFamily make_family(const RunConfig& cfg) {
  require_method_args(cfg);
  SliceFamily fam;
  auto state = make_state(cfg.state);
  switch (cfg.method) {
    case RunMethod::formal:
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(formal_subtracted_polygaussian(state, k));
      break;
    case RunMethod::heralded:
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(heralded_subtracted_polygaussian(state, cfg.zeta, k));
      break;
    case RunMethod::npnr:
      fam.click = npnr_state(state, cfg.zeta);
      break;
    case RunMethod::squeezed_fock: {
      auto sq = squeeze_from_mean_n(cfg.state.mean_n, cfg.state.phi);
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(squeezed_fock_polygaussian(k, sq));
      break;
    }
  }
  return fam;
}

/// Fock-basis states mirroring the configured family, for --oracle columns.
struct OracleFamily {
  std::vector<fockspace::Mat> members;  // one per column
};

inline fockspace::Mat oracle_input(const StateSpec& spec, int dim) {
  auto eq = equivalent_sts(spec);
  auto rho = fockspace::thermal_dm(eq.purity, dim);
  if (eq.A > 1.0) {
    double r = 0.5 * std::acosh(eq.A);
    double phi = std::arg(eq.B);
    rho = fockspace::squeeze_dm(rho, r, phi);
  }
  return rho;
}

inline OracleFamily make_oracle_family(const RunConfig& cfg) {
  OracleFamily fam;
  switch (cfg.method) {
    case RunMethod::formal: {
      auto rho = oracle_input(cfg.state, fockspace::kDefaultDim);
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(k == 0 ? rho : fockspace::annihilate(rho, k));
      break;
    }
    case RunMethod::heralded: {
      auto rho = oracle_input(cfg.state, fockspace::kDefaultSignalDim);
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(
            k == 0 ? fockspace::beamsplit_and_herald(rho, cfg.zeta, 0).rho
                   : fockspace::beamsplit_and_herald(rho, cfg.zeta, k).rho);
      break;
    }
    case RunMethod::npnr: {
      auto rho = oracle_input(cfg.state, fockspace::kDefaultSignalDim);
      auto ts = fockspace::beamsplit_with_vacuum(rho, cfg.zeta,
                                                 fockspace::kDefaultSignalDim,
                                                 fockspace::kDefaultTapDim);
      fockspace::Mat all = fockspace::partial_trace_tap(ts);
      auto h0 = fockspace::herald_from_two_mode(ts, 0);
      fockspace::Mat mixed =
          (all - h0.probability * h0.rho) / (1.0 - h0.probability);
      fam.members.push_back(mixed);
      break;
    }
    case RunMethod::squeezed_fock: {
      auto sq = squeeze_from_mean_n(cfg.state.mean_n, cfg.state.phi);
      for (int k = 0; k <= cfg.n; ++k)
        fam.members.push_back(fockspace::squeeze_dm(
            fockspace::fock_dm(k, fockspace::kDefaultDim), sq.r, sq.phi));
      break;
    }
  }
  return fam;
}

inline PhotonDistribution stats_of(const RunConfig& cfg) {
  require_method_args(cfg);
  auto state = make_state(cfg.state);
  switch (cfg.method) {
    case RunMethod::formal:
      return subtracted_distribution_formal(state, cfg.n, cfg.n_report);
    case RunMethod::heralded:
      return subtracted_distribution_heralded(state, cfg.zeta, cfg.n,
                                              cfg.n_report);
    case RunMethod::npnr:
      return npnr_distribution(state, cfg.zeta, cfg.n_report);
    case RunMethod::squeezed_fock: {
      auto sq = squeeze_from_mean_n(cfg.state.mean_n, cfg.state.phi);
      return fock_statistics(cfg.n, sq, cfg.n_report);
    }
  }
  throw std::invalid_argument("unknown method");
}

inline PhotonDistribution oracle_stats_of(const RunConfig& cfg) {
  auto fam = make_oracle_family(cfg);
  const auto& rho = cfg.method == RunMethod::npnr
                        ? fam.members.front()
                        : fam.members.back();
  return fockspace::photon_dist_dm(rho, cfg.n_report);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rendering

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // extra labeled single rows appended after the data block (stats moments)
  std::vector<std::pair<std::string, std::vector<double>>> footer;
};

inline std::string to_csv(const ResultTable& t) {
  std::string out;
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += fmt12(row[i]);
    }
    out += '\n';
  }
  for (const auto& [label, vals] : t.footer) {
    out += label;
    for (double v : vals) {
      out += ',';
      out += fmt12(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json_text(const ResultTable& t, const RunConfig& cfg,
                                const char* command) {
  nlohmann::json j;
  j["meta"] = config_json(cfg);
  j["meta"]["command"] = command;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  if (!t.footer.empty()) {
    nlohmann::json sum;
    for (const auto& [label, vals] : t.footer)
      sum[label] = vals.size() == 1 ? nlohmann::json(vals[0])
                                    : nlohmann::json(vals);
    j["summary"] = sum;
  }
  return j.dump(2) + "\n";
}

inline ResultTable slice_table(const RunConfig& cfg) {
  auto fam = detail::make_family(cfg);
  std::optional<detail::OracleFamily> ofam;
  if (cfg.oracle) ofam = detail::make_oracle_family(cfg);
  ResultTable t;
  t.columns.push_back(cfg.axis == Axis::q ? "q" : "p");
  int cols = fam.columns();
  for (int k = 0; k < cols; ++k)
    t.columns.push_back(cols == 1 && fam.click ? "W" : "W" + std::to_string(k));
  if (ofam)
    for (size_t k = 0; k < ofam->members.size(); ++k)
      t.columns.push_back("W" + std::to_string(k) + "_ref");
  for (int i = 0; i < cfg.range.count(); ++i) {
    double c = cfg.range.at(i);
    PhasePoint pt = cfg.axis == Axis::q ? PhasePoint{c, 0.0}
                                        : PhasePoint{0.0, c};
    std::vector<double> row{c};
    for (int k = 0; k < cols; ++k) row.push_back(fam.value(k, pt));
    if (ofam && !ofam->members.empty()) {
      auto d = fockspace::displacement_op(
          pt.alpha(), static_cast<int>(ofam->members.front().rows()));
      for (const auto& rho : ofam->members)
        row.push_back(fockspace::wigner_given_displacement(rho, d));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline ResultTable grid_table(const RunConfig& cfg) {
  RunConfig one = cfg;
  auto fam = detail::make_family(one);
  int k = fam.click ? 0 : static_cast<int>(fam.members.size()) - 1;
  ResultTable t;
  t.columns = {"q", "p", "W"};
  for (int i = 0; i < cfg.range.count(); ++i)
    for (int j = 0; j < cfg.range.count(); ++j) {
      PhasePoint pt{cfg.range.at(i), cfg.range.at(j)};
      t.rows.push_back({pt.q, pt.p, fam.value(k, pt)});
    }
  return t;
}

inline ResultTable stats_table(const RunConfig& cfg) {
  PhotonDistribution d = detail::stats_of(cfg);
  std::optional<PhotonDistribution> ref;
  if (cfg.oracle) ref = detail::oracle_stats_of(cfg);
  ResultTable t;
  t.columns = {"n", "P"};
  if (ref) t.columns.push_back("P_ref");
  for (int k = 0; k <= cfg.n_report; ++k) {
    std::vector<double> row{double(k), d.p[static_cast<size_t>(k)]};
    if (ref) row.push_back(ref->p[static_cast<size_t>(k)]);
    t.rows.push_back(std::move(row));
  }
  auto moment = [&](const char* name, double v, double vr) {
    std::vector<double> vals{v};
    if (ref) vals.push_back(vr);
    t.footer.emplace_back(name, std::move(vals));
  };
  moment("mean", d.mean, ref ? ref->mean : 0.0);
  moment("variance", d.variance(), ref ? ref->variance() : 0.0);
  moment("tail_mass", d.tail_mass, ref ? ref->tail_mass : 0.0);
  return t;
}

inline void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
  f << text;
}

inline std::string render(const ResultTable& t, const RunConfig& cfg,
                          const char* command) {
  return cfg.format == OutFormat::csv ? to_csv(t)
                                      : to_json_text(t, cfg, command);
}

inline void cmd_slice(const RunConfig& cfg) {
  write_output(cfg, render(slice_table(cfg), cfg, "slice"));
}

inline void cmd_grid(const RunConfig& cfg) {
  write_output(cfg, render(grid_table(cfg), cfg, "grid"));
}

inline void cmd_stats(const RunConfig& cfg) {
  write_output(cfg, render(stats_table(cfg), cfg, "stats"));
}

}  // namespace wiggen
