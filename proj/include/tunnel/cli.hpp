#ifndef TUNNEL_CLI_HPP
#define TUNNEL_CLI_HPP

// Command-line front end. Every subcommand resolves its defaults, validates
// them, writes one or more CSV files that open with a '#' comment block, and
// writes <subcommand>.manifest.json next to them. The manifest can be fed
// back through `replay` to regenerate byte-identical CSVs.
//
// All quantities are dimensionless: lengths in units of the packet width a,
// wavenumbers in 1/a, times in m a^2 (hbar = m = 1).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tunnel/barrier.hpp"
#include "tunnel/phase_times.hpp"
#include "tunnel/spectrum.hpp"
#include "tunnel/wavepacket.hpp"

namespace tunnel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;

using json = nlohmann::ordered_json;

/// Parameters of one run. Unset optionals are filled by resolve().
struct RunConfig {
  std::string subcommand;
  std::vector<double> w_a;
  std::optional<double> k0_a;
  std::vector<double> L_a;
  std::vector<double> n;
  std::optional<double> alpha_min, alpha_max;
  std::optional<std::size_t> alpha_steps;
  std::vector<double> delta;
  std::optional<bool> uncut;
  std::optional<double> x_min, x_max;
  std::optional<std::size_t> x_points;
  std::optional<double> t_min, t_max;
  std::optional<std::size_t> t_steps;
  std::optional<double> tolerance;
  std::string out = ".";

  // Which list flags were given explicitly (an explicit empty list is an error).
  bool w_given = false, L_given = false, n_given = false, delta_given = false;
};

namespace detail {

using tunnel::detail::require;

inline std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string fmt_bool(bool b) { return b ? "1" : "0"; }

inline bool is_subcommand(const std::string& s) {
  for (const char* c : {"table1", "rates", "distortion", "cutoff", "packet", "collide"})
    if (s == c) return true;
  return false;
}

inline double single(const std::vector<double>& v, const char* what) {
  require(v.size() == 1, what);
  return v.front();
}

inline void require_grid(double lo, double hi, std::size_t points, const char* what) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo && points >= 3, what);
}

inline void require_times(double lo, double hi, std::size_t steps, const char* what) {
  require(std::isfinite(lo) && std::isfinite(hi) && steps >= 1 && (hi > lo || steps == 1), what);
}

inline std::vector<double> time_grid(double lo, double hi, std::size_t steps) {
  if (steps == 1) return {lo};
  return linspace(lo, hi, steps);
}

}  // namespace detail

/// Fills subcommand defaults and checks every precondition. Throws DomainError.
inline RunConfig resolve(RunConfig c) {
  using detail::require;
  require(detail::is_subcommand(c.subcommand), "unknown subcommand");
  if (c.w_given) require(!c.w_a.empty(), "w_a list must not be empty");
  if (c.L_given) require(!c.L_a.empty(), "L_a list must not be empty");
  if (c.n_given) require(!c.n.empty(), "n list must not be empty");
  if (c.tolerance) require(*c.tolerance > 0.0, "tolerance must be positive");
  const std::string& s = c.subcommand;

  if (s == "table1") {
    if (c.w_a.empty()) c.w_a = {1.5, 2.0, 4.0, 6.0, 8.0, 10.0, 20.0};
    if (!c.k0_a) c.k0_a = 1.0;
    if (c.L_a.empty()) c.L_a = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    require(*c.k0_a > 0.0, "k0_a must be positive");
    for (double w : c.w_a) require(w > *c.k0_a, "w_a must exceed k0_a");
    for (double L : c.L_a) require(L >= 0.0, "L_a must be non-negative");
  } else if (s == "rates") {
    if (c.n.empty()) c.n = {0.25, 0.5, 0.75, 1.0};
    if (!c.alpha_min) c.alpha_min = 1e-4;
    if (!c.alpha_max) c.alpha_max = 1e3;
    if (!c.alpha_steps) c.alpha_steps = 141;
    for (double n : c.n) require(n > 0.0 && n <= 1.0, "n must lie in (0, 1]");
    require(*c.alpha_min > 0.0, "alpha grid must be positive");
    require(*c.alpha_max > *c.alpha_min && *c.alpha_steps >= 2,
            "alpha grid needs alpha_max > alpha_min and at least two steps");
  } else if (s == "distortion") {
    if (c.w_a.empty()) c.w_a = {1.5};
    if (!c.k0_a) c.k0_a = 1.0;
    if (c.L_a.empty())
      for (int i = 0; i <= 30; ++i) c.L_a.push_back(5.0 * i / 100.0);
    require(*c.k0_a > 0.0, "k0_a must be positive");
    for (double w : c.w_a) require(w > *c.k0_a, "distortion requires k0_a < w_a");
    for (double L : c.L_a) require(L >= 0.0, "L_a must be non-negative");
  } else if (s == "cutoff") {
    if (c.w_a.empty()) c.w_a = {10.0};
    const double w = detail::single(c.w_a, "cutoff takes a single w_a");
    require(w > 0.0, "w_a must be positive");
    if (!c.k0_a) c.k0_a = 0.5 * w;
    if (!c.delta_given) c.delta = {0.1, 0.3};
    if (!c.uncut) c.uncut = true;
    if (!c.x_min) c.x_min = -12.0;
    if (!c.x_max) c.x_max = 12.0;
    if (!c.x_points) c.x_points = 1201;
    if (!c.tolerance) c.tolerance = 1e-8;
    require(*c.k0_a > 0.0, "k0_a must be positive");
    for (double d : c.delta) require(d > 0.0 && d < 1.0, "delta must lie in (0, 1)");
    require(*c.uncut || !c.delta.empty(), "cutoff needs at least one case");
    detail::require_grid(*c.x_min, *c.x_max, *c.x_points, "x grid needs x_max > x_min and >= 3 points");
    require(*c.x_max > 6.0, "x grid must reach into the tail window [6, 12]");
  } else if (s == "packet") {
    if (c.w_a.empty()) c.w_a = {4.0};
    const double w = detail::single(c.w_a, "packet takes a single w_a");
    if (!c.k0_a) c.k0_a = 1.0;
    if (c.L_a.empty()) c.L_a = {0.2, 1.0};
    if (!c.x_min) c.x_min = 0.5;
    if (!c.x_max) c.x_max = 4.5;
    if (!c.x_points) c.x_points = 401;
    if (!c.t_min) c.t_min = 0.0;
    if (!c.t_max) c.t_max = 2.0;
    if (!c.t_steps) c.t_steps = 5;
    if (!c.tolerance) c.tolerance = 1e-8;
    require(*c.k0_a > 0.0 && *c.k0_a < w, "packet requires 0 < k0_a < w_a");
    for (double L : c.L_a) {
      require(L > 0.0, "packet requires L_a > 0");
      require(*c.x_min >= 0.5 * L, "x grid must satisfy x >= L/2 (transmitted region)");
    }
    detail::require_grid(*c.x_min, *c.x_max, *c.x_points, "x grid needs x_max > x_min and >= 3 points");
    detail::require_times(*c.t_min, *c.t_max, *c.t_steps, "time grid needs t_max > t_min");
  } else if (s == "collide") {
    if (c.w_a.empty()) c.w_a = {4.0};
    const double w = detail::single(c.w_a, "collide takes a single w_a");
    if (!c.k0_a) c.k0_a = 1.0;
    if (c.L_a.empty()) c.L_a = {0.5};
    const double L = detail::single(c.L_a, "collide takes a single L_a");
    if (!c.x_max) c.x_max = 8.0;
    if (!c.x_min) c.x_min = -*c.x_max;
    if (!c.x_points) c.x_points = 801;
    if (!c.t_min) c.t_min = 0.0;
    if (!c.t_max) c.t_max = 3.0;
    if (!c.t_steps) c.t_steps = 4;
    if (!c.tolerance) c.tolerance = 1e-8;
    require(*c.k0_a > 0.0 && *c.k0_a < w, "collide requires 0 < k0_a < w_a");
    require(L > 0.0, "collide requires L_a > 0");
    require(*c.x_min == -*c.x_max, "collide needs a grid symmetric about 0 (x_min = -x_max)");
    detail::require_grid(*c.x_min, *c.x_max, *c.x_points, "x grid needs x_max > x_min and >= 3 points");
    require(*c.t_min >= 0.0, "collide times are measured from contact and must be >= 0");
    detail::require_times(*c.t_min, *c.t_max, *c.t_steps, "time grid needs t_max > t_min");
  }
  return c;
}

/// Resolved parameters relevant to the subcommand (the output directory is
/// not a parameter and is kept out so replays elsewhere stay byte-identical).
inline json parameters_json(const RunConfig& c) {
  json p;
  auto put = [&](const char* key, const auto& v) {
    if constexpr (requires { v.has_value(); }) {
      if (v) p[key] = *v;
    } else {
      p[key] = v;
    }
  };
  const std::string& s = c.subcommand;
  if (s == "rates") {
    put("n", c.n);
    put("alpha_min", c.alpha_min);
    put("alpha_max", c.alpha_max);
    put("alpha_steps", c.alpha_steps);
    return p;
  }
  put("w_a", c.w_a);
  put("k0_a", c.k0_a);
  if (s != "cutoff") put("L_a", c.L_a);
  if (s == "cutoff") {
    put("delta", c.delta);
    put("uncut", c.uncut);
  }
  if (s == "cutoff" || s == "packet" || s == "collide") {
    put("x_min", c.x_min);
    put("x_max", c.x_max);
    put("x_points", c.x_points);
    put("tolerance", c.tolerance);
  }
  if (s == "packet" || s == "collide") {
    put("t_min", c.t_min);
    put("t_max", c.t_max);
    put("t_steps", c.t_steps);
  }
  return p;
}

inline RunConfig config_from_json(const json& manifest) {
  RunConfig c;
  c.subcommand = manifest.at("subcommand").get<std::string>();
  const json& p = manifest.at("parameters");
  auto list = [&](const char* key, std::vector<double>& v, bool& given) {
    if (p.contains(key)) {
      v = p[key].get<std::vector<double>>();
      given = true;
    }
  };
  list("w_a", c.w_a, c.w_given);
  list("L_a", c.L_a, c.L_given);
  list("n", c.n, c.n_given);
  list("delta", c.delta, c.delta_given);
  auto opt = [&](const char* key, auto& v) {
    if (p.contains(key)) v = p[key].get<typename std::remove_reference_t<decltype(v)>::value_type>();
  };
  opt("k0_a", c.k0_a);
  opt("alpha_min", c.alpha_min);
  opt("alpha_max", c.alpha_max);
  opt("alpha_steps", c.alpha_steps);
  opt("uncut", c.uncut);
  opt("x_min", c.x_min);
  opt("x_max", c.x_max);
  opt("x_points", c.x_points);
  opt("t_min", c.t_min);
  opt("t_max", c.t_max);
  opt("t_steps", c.t_steps);
  opt("tolerance", c.tolerance);
  return c;
}

/// Accumulates results and notes while a subcommand runs, then writes CSVs
/// and the manifest.
class RunWriter {
 public:
  explicit RunWriter(const RunConfig& c) : config_(c) {
    manifest_["tool"] = "tunnel_cli";
    manifest_["subcommand"] = c.subcommand;
    manifest_["units"] = "lengths in a, wavenumbers in 1/a, times in m a^2; hbar = m = 1";
    manifest_["parameters"] = parameters_json(c);
    manifest_["results"] = json::object();
    manifest_["notes"] = json::array();
    manifest_["outputs"] = json::array();
  }

  json& results() { return manifest_["results"]; }
  void note(const std::string& text) { manifest_["notes"].push_back(text); }

  struct Table {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
  };

  void add(Table t) { tables_.push_back(std::move(t)); }

  /// Writes every table and the manifest. Results and notes are final by now,
  /// so each CSV comment block carries the complete manifest.
  void flush() {
    namespace fs = std::filesystem;
    const fs::path dir(config_.out);
    fs::create_directories(dir);
    for (const Table& t : tables_) manifest_["outputs"].push_back(t.file);
    const std::string block = comment_block();
    for (const Table& t : tables_) {
      std::ofstream f(dir / t.file, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (dir / t.file).string());
      f << block;
      write_row(f, t.header);
      for (const auto& r : t.rows) write_row(f, r);
    }
    std::ofstream m(dir / (config_.subcommand + ".manifest.json"), std::ios::binary);
    if (!m) throw std::runtime_error("cannot write manifest in " + dir.string());
    m << manifest_.dump(2) << '\n';
  }

  const json& manifest() const { return manifest_; }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }

  std::string comment_block() const {
    std::ostringstream os;
    os << "# tunnel_cli " << config_.subcommand << '\n';
    os << "# units: " << manifest_["units"].get<std::string>() << '\n';
    for (const auto& [k, v] : manifest_["parameters"].items()) os << "# param " << k << " = " << v.dump() << '\n';
    for (const auto& [k, v] : manifest_["results"].items()) os << "# result " << k << " = " << v.dump() << '\n';
    for (const auto& n : manifest_["notes"]) os << "# note: " << n.get<std::string>() << '\n';
    return os.str();
  }

  RunConfig config_;
  json manifest_;
  std::vector<Table> tables_;
};

namespace detail {

inline QuadratureSpec quad_spec(const RunConfig& c) {
  QuadratureSpec q;
  q.tolerance = *c.tolerance;
  return q;
}

inline void run_table1(const RunConfig& c, RunWriter& w) {
  const auto cells = table1_generate(*c.k0_a, c.w_a, c.L_a);
  RunWriter::Table grid{"table1.csv", {"L_a"}, {}};
  for (double wa : c.w_a) grid.header.push_back(fmt(wa, "%g"));
  RunWriter::Table flat{"table1_cells.csv", {"w_a", "L_a", "k_max_a", "boundary_dominated"}, {}};
  bool invariant = true;
  std::size_t starred = 0;
  for (std::size_t i = 0; i < c.L_a.size(); ++i) {
    std::vector<std::string> row{fmt(c.L_a[i], "%.2f")};
    for (std::size_t j = 0; j < c.w_a.size(); ++j) {
      const Table1Cell& cell = cells[i * c.w_a.size() + j];
      row.push_back(cell.boundary_dominated ? "*" : fmt(cell.k_max_a, "%.4f"));
      flat.rows.push_back({fmt(cell.w_a), fmt(cell.L_a), fmt(cell.k_max_a, "%.10f"),
                           fmt_bool(cell.boundary_dominated)});
      invariant = invariant && cell.k_max_a >= *c.k0_a - 1e-9 && cell.k_max_a <= cell.w_a;
      starred += cell.boundary_dominated;
    }
    grid.rows.push_back(std::move(row));
  }
  w.results()["boundary_dominated_cells"] = starred;
  w.results()["k0_le_kmax_le_w"] = invariant;
  w.note("'*' marks cells whose g|T| maximum sits at k = w (boundary-dominated)");
  w.add(std::move(grid));
  w.add(std::move(flat));
}

inline void run_rates(const RunConfig& c, RunWriter& w) {
  const auto alphas = logspace(*c.alpha_min, *c.alpha_max, *c.alpha_steps);
  const auto rows = fig3a_curves(c.n, alphas);
  RunWriter::Table t{"rates.csv", {"alpha", "n", "R_T", "R_phi"}, {}};
  for (const RateRow& r : rows)
    t.rows.push_back({fmt(r.alpha), fmt(r.n), fmt(r.r_standard), fmt(r.r_scattering)});
  json limits = json::array();
  for (double n : c.n) {
    const RateLimitNote note = standard_rate_small_alpha_limit(n);
    limits.push_back({{"n", n}, {"R_T_alpha0", note.evaluated}, {"fixed_n_formula", note.fixed_n},
                      {"R_phi_alpha0", rate_scattering(0.0, n)}, {"commutes", note.commutes}});
    if (!note.commutes)
      w.note("non-commuting limits at n = " + fmt(n) + ": R_T(alpha -> 0) = " + fmt(note.evaluated) +
             " while 1 + 1/(2n) = " + fmt(note.fixed_n) +
             "; the alpha -> 0 and n -> 1 limits do not commute");
  }
  w.results()["small_alpha_limits"] = limits;
  w.add(std::move(t));
}

inline void run_distortion(const RunConfig& c, RunWriter& w) {
  const GaussianSpectrum spectrum{*c.k0_a, 1.0, std::nullopt};
  RunWriter::Table summary{"distortion.csv",
                           {"w_a", "k0_a", "log_derivative_at_w", "L_numeric", "L_literal",
                            "L_rederived", "slope_check", "printed_limit_at_onset"},
                           {}};
  RunWriter::Table scan{"distortion_scan.csv",
                        {"w_a", "L_a", "slope_derived", "slope_printed", "slope_numeric",
                         "log_derivative_at_w"},
                        {}};
  json onsets = json::array();
  for (double wa : c.w_a) {
    const DistortionReport r = distortion_onset(spectrum, wa);
    summary.rows.push_back({fmt(wa), fmt(*c.k0_a), fmt(r.log_derivative_at_w), fmt(r.L_numeric),
                            fmt(r.L_literal), fmt(r.L_rederived), fmt(r.slope_check),
                            fmt(r.printed_limit_at_onset)});
    onsets.push_back({{"w_a", wa}, {"L_numeric", r.L_numeric}, {"L_literal", r.L_literal},
                      {"L_rederived", r.L_rederived}});
    for (double L : c.L_a)
      scan.rows.push_back({fmt(wa), fmt(L), fmt(boundary_log_slope(L, wa)),
                           fmt(boundary_log_slope_printed(L, wa)),
                           fmt(boundary_log_slope_numeric(L, wa)), fmt(r.log_derivative_at_w)});
  }
  w.results()["onsets"] = onsets;
  w.note("distortion sets in once |T|'/|T| at k = w exceeds a^2 (w - k0)/2; L_numeric solves this exactly");
  w.add(std::move(summary));
  w.add(std::move(scan));
}

inline void run_cutoff(const RunConfig& c, RunWriter& w) {
  const double wa = c.w_a.front();
  const BarrierConfig barrier = BarrierConfig::dimensionless(wa, 0.0);
  const auto x = linspace(*c.x_min, *c.x_max, *c.x_points);
  const double tail_lo = 6.0, tail_hi = 12.0;

  struct Case {
    std::string name;
    std::optional<double> delta;
  };
  std::vector<Case> cases;
  if (*c.uncut) cases.push_back({"uncut", std::nullopt});
  std::vector<double> deltas = c.delta;
  std::sort(deltas.begin(), deltas.end());
  for (double d : deltas) cases.push_back({"delta_" + fmt(d, "%g"), d});

  RunWriter::Table profile{"cutoff.csv", {"x"}, {}};
  RunWriter::Table summary{"cutoff_summary.csv",
                           {"case", "delta", "k_cut_a", "t_estimate", "tail_amplitude"},
                           {}};
  std::vector<PacketField> fields;
  std::vector<double> tails;
  for (const Case& k : cases) {
    const GaussianSpectrum spectrum{*c.k0_a, 1.0, k.delta};
    fields.push_back(cutoff_packet_profile(spectrum, barrier.w(), x, quad_spec(c)));
    tails.push_back(tail_amplitude(fields.back(), tail_lo, tail_hi));
    profile.header.push_back("abs_psi_" + k.name);
    summary.rows.push_back({k.name, k.delta ? fmt(*k.delta) : "none",
                            fmt(spectrum.support_upper(barrier.w())),
                            k.delta ? fmt(cutoff_time_estimate(*k.delta, barrier)) : "inf",
                            fmt(tails.back())});
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<std::string> row{fmt(x[i])};
    for (const PacketField& f : fields) row.push_back(fmt(std::abs(f.psi()[i]) / f.max_modulus()));
    profile.rows.push_back(std::move(row));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < tails.size(); ++i) increasing = increasing && tails[i] > tails[i - 1];
  w.results()["tail_window"] = {tail_lo, tail_hi};
  w.results()["tail_strictly_increasing"] = increasing;
  w.note("profiles are |psi(x, 0)| normalised to each case's maximum; cases ordered by decreasing k_cut");
  w.add(std::move(profile));
  w.add(std::move(summary));
}

inline void run_packet(const RunConfig& c, RunWriter& w) {
  const double wa = c.w_a.front();
  const GaussianSpectrum spectrum{*c.k0_a, 1.0, std::nullopt};
  const auto x = linspace(*c.x_min, *c.x_max, *c.x_points);
  const auto times = time_grid(*c.t_min, *c.t_max, *c.t_steps);
  RunWriter::Table snaps{"packet.csv", {"L_a", "t", "x", "re_psi", "im_psi", "abs2_psi"}, {}};
  RunWriter::Table summary{"packet_summary.csv",
                           {"L_a", "k_max_a", "boundary_dominated", "tau", "t_spm", "t_spm_k0",
                            "plane", "arrival_full", "arrival_reference", "delay",
                            "discrepancy_over_tau", "spm_consistent", "multimodal", "filter_effect"},
                           {}};
  TimingOptions opt;
  opt.quad = quad_spec(c);
  for (double L : c.L_a) {
    const BarrierConfig barrier = BarrierConfig::dimensionless(wa, L);
    for (double t : times) {
      const PacketField f = synthesize_transmitted(spectrum, barrier, x, t, quad_spec(c));
      for (std::size_t i = 0; i < f.size(); ++i)
        snaps.rows.push_back({fmt(L), fmt(t), fmt(x[i]), fmt(f.psi()[i].real()),
                              fmt(f.psi()[i].imag()), fmt(f.density(i))});
    }
    const TransmissionTiming r = transmitted_timing(spectrum, barrier, opt);
    summary.rows.push_back({fmt(L), fmt(r.kmax.k_max), fmt_bool(r.kmax.boundary_dominated),
                            fmt(r.tau), fmt(r.t_spm), fmt(r.t_spm_k0), fmt(r.plane),
                            fmt(r.arrival_full), fmt(r.arrival_reference), fmt(r.delay),
                            fmt(r.discrepancy_over_tau), fmt_bool(r.spm_consistent),
                            fmt_bool(r.multimodal), fmt_bool(r.filter_effect)});
  }
  w.results()["timing_band_over_tau"] = opt.band;
  w.results()["timing_plane_offset"] = opt.plane_offset;
  w.results()["timing_x_span"] = opt.x_span;
  w.results()["timing_x_points"] = opt.x_points;
  w.results()["timing_dt"] = opt.dt;
  w.note("delay = peak arrival at the plane minus that of the same envelope without the barrier phase");
  w.add(std::move(snaps));
  w.add(std::move(summary));
}

inline void run_collide(const RunConfig& c, RunWriter& w) {
  const double wa = c.w_a.front();
  const double L = c.L_a.front();
  const GaussianSpectrum spectrum{*c.k0_a, 1.0, std::nullopt};
  const BarrierConfig barrier = BarrierConfig::dimensionless(wa, L);
  const auto x = linspace(*c.x_min, *c.x_max, *c.x_points);
  const auto times = time_grid(*c.t_min, *c.t_max, *c.t_steps);
  RunWriter::Table snaps{"collide.csv", {"t", "x", "re_psi", "im_psi", "abs2_psi"}, {}};
  RunWriter::Table summary{"collide_summary.csv", {"t", "mirror_residual", "norm"}, {}};
  double worst = 0.0;
  for (double t : times) {
    const PacketField f = synthesize_collision(spectrum, barrier, x, t, quad_spec(c));
    const double residual = mirror_residual(f);
    worst = std::max(worst, residual);
    for (std::size_t i = 0; i < f.size(); ++i)
      snaps.rows.push_back({fmt(t), fmt(x[i]), fmt(f.psi()[i].real()), fmt(f.psi()[i].imag()),
                            fmt(f.density(i))});
    summary.rows.push_back({fmt(t), fmt(residual), fmt(f.norm())});
  }
  const PhaseTimeResult ts = scattering_phase_time(*c.k0_a, barrier);
  const SpectralWeights sw = collision_spectral_weights(spectrum, barrier);
  json& r = w.results();
  r["symmetry_residual"] = worst;
  r["scattering_time"] = ts.time;
  r["scattering_time_closed_form"] = ts.closed_form;
  if (std::isfinite(ts.printed_form)) r["scattering_time_printed_form"] = ts.printed_form;
  r["spectral_modulus_deviation"] = sw.max_modulus_deviation;
  r["spectral_weight_in"] = sw.incoming;
  r["spectral_weight_out"] = sw.outgoing;
  w.note("times are measured from the simultaneous contact of both peaks with the barrier faces");
  w.add(std::move(snaps));
  w.add(std::move(summary));
}

}  // namespace detail

/// Runs an already-resolved configuration and returns the manifest.
inline json execute(const RunConfig& c) {
  RunWriter w(c);
  const std::string& s = c.subcommand;
  if (s == "table1") detail::run_table1(c, w);
  else if (s == "rates") detail::run_rates(c, w);
  else if (s == "distortion") detail::run_distortion(c, w);
  else if (s == "cutoff") detail::run_cutoff(c, w);
  else if (s == "packet") detail::run_packet(c, w);
  else if (s == "collide") detail::run_collide(c, w);
  w.flush();
  return w.manifest();
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Tunneling-time analyses for the rectangular barrier (dimensionless units)",
               "tunnel_cli"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string manifest_path;
  std::optional<std::string> replay_out;

  auto add_common = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "output directory"); };
  auto add_w = [&](CLI::App* sub, const char* what) {
    sub->add_option("--w-a", cfg.w_a, what)->each([&](const std::string&) { cfg.w_given = true; });
  };
  auto add_k0 = [&](CLI::App* sub) { sub->add_option("--k0-a", cfg.k0_a, "central wavenumber k0 a"); };
  auto add_L = [&](CLI::App* sub, const char* what) {
    sub->add_option("--l-a", cfg.L_a, what)->each([&](const std::string&) { cfg.L_given = true; });
  };
  auto add_x = [&](CLI::App* sub) {
    sub->add_option("--x-min", cfg.x_min, "grid start (units of a)");
    sub->add_option("--x-max", cfg.x_max, "grid end (units of a)");
    sub->add_option("--x-points", cfg.x_points, "grid points");
    sub->add_option("--tolerance", cfg.tolerance, "relative k-quadrature tolerance");
  };
  auto add_t = [&](CLI::App* sub) {
    sub->add_option("--t-min", cfg.t_min, "first snapshot time (m a^2)");
    sub->add_option("--t-max", cfg.t_max, "last snapshot time (m a^2)");
    sub->add_option("--t-steps", cfg.t_steps, "number of snapshots");
  };

  auto* table1 = app.add_subcommand("table1", "k_max of g|T| over (w a, L/a)");
  add_w(table1, "barrier heights w a (repeatable)");
  add_k0(table1);
  add_L(table1, "widths L/a (repeatable)");
  add_common(table1);

  auto* rates = app.add_subcommand("rates", "R_T and R_phi versus alpha");
  rates->add_option("--n", cfg.n, "k^2/w^2 values (repeatable)")
      ->each([&](const std::string&) { cfg.n_given = true; });
  rates->add_option("--alpha-min", cfg.alpha_min, "smallest alpha");
  rates->add_option("--alpha-max", cfg.alpha_max, "largest alpha");
  rates->add_option("--alpha-steps", cfg.alpha_steps, "log-spaced alpha count");
  add_common(rates);

  auto* distortion = app.add_subcommand("distortion", "onset of boundary-dominated spectra");
  add_w(distortion, "barrier heights w a (repeatable)");
  add_k0(distortion);
  add_L(distortion, "widths L/a for the boundary-slope scan (repeatable)");
  add_common(distortion);

  auto* cutoff = app.add_subcommand("cutoff", "packet shapes for spectra cut below w");
  add_w(cutoff, "barrier height w a");
  add_k0(cutoff);
  cutoff->add_option("--delta", cfg.delta, "cutoff fractions, k_cut = (1 - delta) w (repeatable)")
      ->each([&](const std::string&) { cfg.delta_given = true; });
  cutoff->add_flag("--uncut,!--no-uncut", cfg.uncut, "include the uncut spectrum");
  add_x(cutoff);
  add_common(cutoff);

  auto* packet = app.add_subcommand("packet", "transmitted packet snapshots and peak timing");
  add_w(packet, "barrier height w a");
  add_k0(packet);
  add_L(packet, "widths L/a (repeatable)");
  add_x(packet);
  add_t(packet);
  add_common(packet);

  auto* collide = app.add_subcommand("collide", "symmetric two-packet collision");
  add_w(collide, "barrier height w a");
  add_k0(collide);
  add_L(collide, "width L/a");
  add_x(collide);
  add_t(collide);
  add_common(collide);

  auto* replay = app.add_subcommand("replay", "re-run from a manifest file");
  replay->add_option("manifest", manifest_path, "path to <subcommand>.manifest.json")->required();
  replay->add_option("--out", replay_out, "output directory (default: the manifest's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (replay->parsed()) {
      std::ifstream f(manifest_path);
      if (!f) {
        err << "error: cannot open manifest " << manifest_path << '\n';
        return kExitIo;
      }
      const json m = json::parse(f);
      cfg = config_from_json(m);
      cfg.out = replay_out ? *replay_out
                           : std::filesystem::path(manifest_path).parent_path().string();
      if (cfg.out.empty()) cfg.out = ".";
    } else {
      cfg.subcommand = app.get_subcommands().front()->get_name();
    }
    const RunConfig resolved = resolve(cfg);
    execute(resolved);
    out << "wrote " << resolved.subcommand << " outputs to " << resolved.out << '\n';
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: malformed manifest: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace tunnel::cli

#endif  // TUNNEL_CLI_HPP
