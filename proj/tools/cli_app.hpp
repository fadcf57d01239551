#pragma once

// Command-line front end. run_cli() is the whole program; main() only forwards
// argv and the standard streams, so tests drive it in-process.

#include "polsqueeze/polsqueeze.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polsq::cli {

using json = nlohmann::ordered_json;

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailedChecks = 1;  // verify only
inline constexpr int kUsage = 2;
inline constexpr int kNumeric = 3;

/// CLI-side validation failure (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string sci17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Everything an emitted artifact needs to describe its own run.
struct RunContext {
  std::string command;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::ostream* stdout_stream = nullptr;

  json header() const {
    json h;
    h["version"] = kVersion;
    h["command"] = command;
    h["config"] = config;
    h["seed"] = seed ? json(*seed) : json(nullptr);
    return h;
  }

  void write(const std::string& text) const {
    if (out_path.empty() || out_path == "-") {
      *stdout_stream << text;
      return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file: " + out_path);
    f << text;
  }

  void emit_json(const json& payload) const {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["header"] = header();
    for (auto it = payload.begin(); it != payload.end(); ++it) doc[it.key()] = it.value();
    write(doc.dump(2) + "\n");
  }

  void emit_csv(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                const std::vector<std::string>& notes = {}) const {
    std::string s = "# polsqueeze " + std::string(kVersion) + "\n";
    s += "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
    s += "# command: " + command + "\n";
    s += "# config: " + config.dump() + "\n";
    s += "# seed: " + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
    for (const auto& n : notes) s += "# " + n + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    write(s);
  }
};

/// Config echo: every option of the subcommand with its effective value.
inline json echo_options(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) cfg[name] = res.front();
      else cfg[name] = res;
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    } else {
      cfg[name] = nullptr;
    }
  }
  return cfg;
}

/// Settings file: one per line, `Z` or `phi <radians>`; `#` starts a comment.
inline std::vector<MeasurementSetting> read_schedule(const std::string& spec) {
  if (spec == "default") return default_schedule();
  std::ifstream f(spec);
  if (!f) throw UsageError("cannot read schedule file: " + spec);
  std::vector<MeasurementSetting> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream in(line);
    std::string word;
    if (!(in >> word)) continue;
    if (word == "Z" || word == "z") {
      out.push_back(MeasurementSetting::z());
    } else if (word == "phi") {
      double phi = 0.0;
      if (!(in >> phi)) throw UsageError("schedule line " + std::to_string(lineno) + ": missing angle");
      out.push_back(MeasurementSetting::equatorial(phi));
    } else {
      throw UsageError("schedule line " + std::to_string(lineno) + ": expected 'Z' or 'phi <radians>'");
    }
  }
  if (out.empty()) throw UsageError("schedule file has no settings");
  return out;
}

/// Fig. 4 style grid row.
inline std::vector<std::string> sweep_row(double nc, double ns, double nth, int n) {
  const EntanglementReport rep = make_report(reduced_two_body(StateParams::make(nc, ns, nth), n), n);
  return {num(nc), num(ns), std::to_string(n), num(rep.concurrence), num(rep.c_max), num(rep.ratio), num(rep.delta)};
}

/// P_N(n_c) / P_N(N) for the Poisson law.
inline double poisson_line_weight(double nc, int n) {
  if (nc <= 0.0) return 0.0;
  return std::exp(n * std::log(nc / n) - nc + n);
}

inline std::vector<std::vector<std::string>> parallel_rows(std::size_t count,
                                                           const std::function<std::vector<std::string>(std::size_t)>& f) {
  std::vector<std::vector<std::string>> rows(count);
  parallel_for(count, [&](std::size_t i) { rows[i] = f(i); });
  return rows;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polarization-squeezed light: N-photon density matrices and entanglement", "polsq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.option_defaults()->always_capture_default();

  RunContext ctx;
  ctx.stdout_stream = &out;
  std::function<void()> action;

  auto add_out = [&](CLI::App* s) { s->add_option("-o,--out", ctx.out_path, "output file (default stdout)"); };
  struct StateOpts {
    double nc = 0.0, ns = 0.0, nth = 0.0;
  };
  auto add_state = [](CLI::App* s, StateOpts& o, bool with_nc = true) {
    if (with_nc) s->add_option("--nc", o.nc, "coherent photons in H")->required();
    s->add_option("--ns", o.ns, "squeezed photons in V")->required();
    s->add_option("--nth", o.nth, "thermal photons in V")->default_val(0.0);
  };

  // state
  StateOpts st;
  std::optional<double> st_eta;
  auto* s_state = app.add_subcommand("state", "Stokes, quadrature and purification summary");
  add_state(s_state, st);
  s_state->add_option("--eta", st_eta, "apply polarization-independent loss first");
  add_out(s_state);
  s_state->callback([&] {
    action = [&] {
      StateParams p = StateParams::make(st.nc, st.ns, st.nth);
      if (st_eta) p = apply_loss(p, *st_eta);
      const StokesSummary s = stokes_summary(p);
      const QuadratureSummary q = quadratures(p);
      json j;
      j["state"] = {{"nc", p.nc}, {"ns", p.ns}, {"nth", p.nth}};
      j["s0"] = s.s0;
      j["sx"] = s.sx;
      j["var_sz"] = s.var_sz;
      j["wineland"] = s.wineland_squeezed;
      j["squeezing_db"] = s.squeezing_db;
      j["var_x"] = q.var_x;
      j["var_p"] = q.var_p;
      try {
        const Purified pu = purify(p);
        j["purified"] = {{"nc", pu.params.nc}, {"ns", pu.params.ns}, {"eta", pu.eta}};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonPurifiable) throw;
        j["purified"] = nullptr;
      }
      ctx.emit_json(j);
    };
  });

  // corr
  StateOpts co;
  int co_m = 0, co_n = 0;
  std::string co_format = "text";
  auto* s_corr = app.add_subcommand("corr", "Normally ordered V-mode correlator E_{m,n}");
  add_state(s_corr, co, false);
  s_corr->add_option("--m", co_m)->required();
  s_corr->add_option("--n", co_n)->required();
  s_corr->add_option("--format", co_format)->check(CLI::IsMember({"text", "json"}));
  add_out(s_corr);
  s_corr->callback([&] {
    action = [&] {
      const double v = to_double(correlation(StateParams::make(0.0, co.ns, co.nth), co_m, co_n));
      if (co_format == "text") ctx.write(sci17(v) + "\n");
      else ctx.emit_json({{"m", co_m}, {"n", co_n}, {"value", v}, {"text", sci17(v)}});
    };
  });

  // odm
  StateOpts od;
  int od_n = 1;
  bool od_decohere = false;
  std::string od_format = "json";
  auto* s_odm = app.add_subcommand("odm", "Observable N-photon density matrix");
  add_state(s_odm, od);
  s_odm->add_option("--n", od_n, "photon number")->required();
  s_odm->add_flag("--decohere", od_decohere, "drop coherences between different H-photon numbers");
  s_odm->add_option("--format", od_format)->check(CLI::IsMember({"json", "csv"}));
  add_out(s_odm);
  s_odm->callback([&] {
    action = [&] {
      Odm o = build_odm(StateParams::make(od.nc, od.ns, od.nth), od_n);
      if (od_decohere) o = o.phase_averaged();
      const Eigen::MatrixXd t = o.compressed();
      if (od_format == "csv") {
        std::vector<std::vector<std::string>> rows;
        for (int v = 0; v <= od_n; ++v)
          for (int w = 0; w <= od_n; ++w) rows.push_back({std::to_string(v), std::to_string(w), num(t(v, w))});
        ctx.emit_csv({"v_i", "v_j", "value"}, rows, {"value: normalized entry shared by all basis pairs with V counts (v_i, v_j)"});
        return;
      }
      json j;
      j["n"] = od_n;
      j["trace"] = to_double(o.trace());
      j["compressed"] = matrix_json(t);
      if (od_n <= 6) j["matrix"] = matrix_json(o.dense());
      ctx.emit_json(j);
    };
  });

  // reduced
  StateOpts re;
  std::optional<int> re_n;
  bool re_avg = false;
  auto* s_red = app.add_subcommand("reduced", "Two-photon reduced density matrix");
  add_state(s_red, re);
  s_red->add_option("--n", re_n, "photon number (ignored with --averaged)");
  s_red->add_flag("--averaged", re_avg, "average over the photon-number distribution (n_th = 0)");
  add_out(s_red);
  s_red->callback([&] {
    action = [&] {
      const StateParams p = StateParams::make(re.nc, re.ns, re.nth);
      TwoBodyOdm t;
      if (re_avg) {
        t = averaged_two_body(p);
      } else {
        if (!re_n) throw UsageError("--n is required unless --averaged is given");
        t = reduced_two_body(p, *re_n);
      }
      const DeltaResult d = delta_criterion(t);
      json j;
      j["n"] = re_avg ? json(nullptr) : json(*re_n);
      j["averaged"] = re_avg;
      j["matrix"] = matrix_json(t.matrix);
      j["concurrence"] = concurrence(t);
      j["delta"] = d.delta;
      j["ppt_negative"] = d.ppt_negative;
      ctx.emit_json(j);
    };
  });

  // entangle
  StateOpts en;
  int en_n = 2;
  bool en_opt = false;
  std::optional<int> en_cut;
  auto* s_ent = app.add_subcommand("entangle", "Entanglement report for the two-photon reduced state");
  s_ent->add_option("--nc", en.nc)->required();
  s_ent->add_option("--ns", en.ns, "required unless --optimize-ns");
  s_ent->add_option("--nth", en.nth)->default_val(0.0);
  s_ent->add_option("--n", en_n)->required();
  s_ent->add_flag("--optimize-ns", en_opt, "maximize concurrence over n_s");
  s_ent->add_option("--negativity-cut", en_cut, "also report negativity across the first-k cut (N <= 6)");
  add_out(s_ent);
  s_ent->callback([&] {
    action = [&] {
      double ns = en.ns;
      if (en_opt) ns = optimize_ns_for_concurrence(en.nc, en.nth, en_n).ns;
      else if (s_ent->count("--ns") == 0) throw UsageError("--ns is required unless --optimize-ns is given");
      const StateParams p = StateParams::make(en.nc, ns, en.nth);
      const EntanglementReport r = make_report(reduced_two_body(p, en_n), en_n);
      json j;
      j["n"] = en_n;
      j["ns"] = ns;
      j["ns_optimized"] = en_opt;
      j["concurrence"] = r.concurrence;
      j["c_max"] = r.c_max;
      j["ratio"] = r.ratio;
      j["delta"] = r.delta;
      j["ppt_negative"] = r.ppt_negative;
      j["pt_min_eigenvalue"] = r.pt_min_eigenvalue;
      if (en_cut) j["negativity"] = {{"cut", *en_cut}, {"value", bipartition_negativity(build_odm(p, en_n), *en_cut)}};
      ctx.emit_json(j);
    };
  });

  // sweep
  std::vector<int> sw_n{2, 17, 50, 100};
  std::vector<double> sw_ns{0.01, 0.05, 0.1, 0.3, 0.7, 1.0, 1.7};
  std::vector<double> sw_nc;
  double sw_nth = 0.0;
  auto* s_sweep = app.add_subcommand("sweep", "Concurrence and monogamy ratio over a parameter grid (CSV)");
  s_sweep->add_option("--n", sw_n, "photon numbers")->delimiter(',');
  s_sweep->add_option("--ns", sw_ns, "n_s values")->delimiter(',');
  s_sweep->add_option("--nc", sw_nc, "n_c values (default N * 2^(-2 + i/2), i = 0..8)")->delimiter(',');
  s_sweep->add_option("--nth", sw_nth)->default_val(0.0);
  add_out(s_sweep);
  s_sweep->callback([&] {
    action = [&] {
      struct Cell {
        double nc, ns;
        int n;
      };
      std::vector<Cell> cells;
      for (int n : sw_n)
        for (double nc : sw_nc.empty() ? verify_detail::fig4_nc(n) : sw_nc)
          for (double ns : sw_ns) cells.push_back({nc, ns, n});
      const auto rows = parallel_rows(cells.size(), [&](std::size_t i) { return sweep_row(cells[i].nc, cells[i].ns, sw_nth, cells[i].n); });
      ctx.emit_csv({"n_c", "n_s", "N", "C", "C_max", "ratio", "delta"}, rows);
    };
  });

  // depth
  StateOpts de;
  auto* s_depth = app.add_subcommand("depth", "Entanglement depth from the collective-spin bound");
  add_state(s_depth, de);
  add_out(s_depth);
  s_depth->callback([&] {
    action = [&] {
      const DepthResult r = depth_large_j(StateParams::make(de.nc, de.ns, de.nth));
      json j;
      j["k"] = r.k;
      j["fraction"] = r.fraction;
      j["v"] = r.v;
      j["defect"] = r.defect;
      j["macroscopic_fraction"] = macroscopic_fraction(de.ns, de.nth);
      j["grey"] = macroscopic_grey(de.ns, de.nth);
      ctx.emit_json(j);
    };
  });

  // depth-contour
  int dc_res = 80;
  std::vector<double> dc_ns{1e-3, 10.0}, dc_nth{1e-3, 10.0};
  auto* s_dc = app.add_subcommand("depth-contour", "Macroscopic depth fraction on an (n_s, n_th) grid (CSV)");
  s_dc->add_option("--resolution", dc_res);
  s_dc->add_option("--ns-range", dc_ns, "lo,hi")->delimiter(',')->expected(2);
  s_dc->add_option("--nth-range", dc_nth, "lo,hi")->delimiter(',')->expected(2);
  add_out(s_dc);
  s_dc->callback([&] {
    action = [&] {
      std::vector<std::vector<std::string>> rows;
      for (const auto& c : contour_data({dc_nth[0], dc_nth[1]}, {dc_ns[0], dc_ns[1]}, dc_res))
        rows.push_back({num(c.ns), num(c.nth), num(c.fraction), c.grey ? "1" : "0"});
      ctx.emit_csv({"n_s", "n_th", "fraction", "is_grey"}, rows);
    };
  });

  // simulate
  StateOpts si;
  double si_eta = 1.0;
  std::uint64_t si_m = 1u << 20, si_seed = 0;
  std::int64_t si_shots = 1000;
  std::string si_schedule = "default", si_format = "ndjson";
  std::optional<int> si_fixed;
  bool si_replace = false;
  int si_boot = 200;
  auto* s_sim = app.add_subcommand("simulate", "Detector-array shot simulation");
  add_state(s_sim, si);
  s_sim->add_option("--eta", si_eta, "detection efficiency");
  s_sim->add_option("--m", si_m, "number of analyzers");
  s_sim->add_option("--shots", si_shots);
  s_sim->add_option("--seed", si_seed);
  s_sim->add_option("--schedule", si_schedule, "'default' or a settings file");
  s_sim->add_option("--n", si_fixed, "post-select on exactly this many detected photons");
  s_sim->add_flag("--with-replacement", si_replace, "draw analyzers independently and flag collisions");
  s_sim->add_option("--bootstrap", si_boot, "bootstrap rounds for the summary");
  s_sim->add_option("--format", si_format, "ndjson (shot records), json (summary) or csv (summary row)")
      ->check(CLI::IsMember({"ndjson", "json", "csv"}));
  add_out(s_sim);
  s_sim->callback([&] {
    action = [&] {
      ctx.seed = si_seed;
      if (si_boot < 2) throw UsageError("--bootstrap must be at least 2");
      DetectorArray arr;
      arr.m = si_m;
      arr.efficiency = si_eta;
      arr.schedule = read_schedule(si_schedule);
      arr.seed = si_seed;
      arr.with_replacement = si_replace;
      arr.fixed_photons = si_fixed;
      if (si_shots < 1) throw Error(ErrorCode::InvalidShotCount, "shot count must be at least 1");
      const ShotSimulator sim(StateParams::make(si.nc, si.ns, si.nth), arr);
      json schedule = json::array();
      for (const auto& s : arr.schedule) schedule.push_back(s.label());
      if (si_format == "ndjson") {
        std::vector<std::string> lines(static_cast<std::size_t>(si_shots));
        parallel_for(lines.size(), [&](std::size_t i) { lines[i] = to_ndjson(sim.shot(i)); });
        json head;
        head["schema_version"] = kSchemaVersion;
        head["header"] = ctx.header();
        head["header"]["rng"] = "mt19937_64 per shot, seeded splitmix64(seed ^ splitmix64(shot))";
        head["header"]["schedule"] = schedule;
        std::string text = head.dump() + "\n";
        for (const auto& l : lines) text += l + "\n";
        ctx.write(text);
        return;
      }
      const Reconstruction rec = reconstruct_two_body(simulate_summaries(sim, si_shots), arr.schedule, si_seed, si_boot);
      if (si_format == "csv") {
        ctx.emit_csv({"n_c", "n_s", "n_th", "eta", "n_fixed", "shots", "used_shots", "delta_hat", "delta_se",
                      "delta_se_per_shot", "shots_to_1sigma", "collision_fraction"},
                     {{num(si.nc), num(si.ns), num(si.nth), num(si_eta), si_fixed ? std::to_string(*si_fixed) : "",
                       std::to_string(si_shots), std::to_string(rec.used_shots), num(rec.delta_hat), num(rec.delta_se),
                       num(rec.delta_se * std::sqrt(static_cast<double>(rec.used_shots))), num(rec.shots_to_1sigma),
                       num(rec.collision_fraction)}});
        return;
      }
      json j;
      j["delta_hat"] = rec.delta_hat;
      j["delta_se"] = rec.delta_se;
      j["shots_to_1sigma"] = rec.shots_to_1sigma;
      j["collision_fraction"] = rec.collision_fraction;
      j["used_shots"] = rec.used_shots;
      j["excluded_shots"] = rec.excluded_shots;
      j["schedule"] = schedule;
      j["matrix"] = matrix_json(rec.estimate.matrix);
      j["standard_errors"] = matrix_json(rec.standard_errors);
      ctx.emit_json(j);
    };
  });

  // oracle
  auto* s_or = app.add_subcommand("oracle", "Truncated Fock-space reference computations");
  s_or->require_subcommand(1);
  StateOpts oc;
  int oc_m = 0, oc_n = 0;
  std::optional<int> oc_cut;
  std::string oc_format = "text";
  auto* s_or_corr = s_or->add_subcommand("corr", "E_{m,n} from a truncated density matrix");
  add_state(s_or_corr, oc, false);
  s_or_corr->add_option("--m", oc_m)->required();
  s_or_corr->add_option("--n", oc_n)->required();
  s_or_corr->add_option("--cutoff", oc_cut, "Fock cutoff (default: chosen from the state)");
  s_or_corr->add_option("--format", oc_format)->check(CLI::IsMember({"text", "json"}));
  add_out(s_or_corr);
  s_or_corr->callback([&] {
    action = [&] {
      StateParams::make(0.0, oc.ns, oc.nth);
      const int cut = oc_cut.value_or(recommended_cutoff(oc.ns, oc.nth));
      const FockState fs = build_squeezed_thermal(oc.ns, oc.nth, cut);
      const double v = oracle_correlation(fs, oc_m, oc_n).real();
      if (oc_format == "text") ctx.write(sci17(v) + "\n");
      else ctx.emit_json({{"m", oc_m}, {"n", oc_n}, {"value", v}, {"text", sci17(v)}, {"cutoff", cut}, {"trace_deficit", fs.trace_deficit}});
    };
  });
  StateOpts oo;
  int oo_n = 1;
  std::optional<int> oo_cut;
  auto* s_or_odm = s_or->add_subcommand("odm", "ODM from a truncated Fock-space state");
  add_state(s_or_odm, oo);
  s_or_odm->add_option("--n", oo_n)->required()->check(CLI::Range(1, 5));
  s_or_odm->add_option("--cutoff", oo_cut, "Fock cutoff (default: chosen from the state)");
  add_out(s_or_odm);
  s_or_odm->callback([&] {
    action = [&] {
      const StateParams p = StateParams::make(oo.nc, oo.ns, oo.nth);
      const int cut = oo_cut.value_or(recommended_cutoff(oo.ns, oo.nth));
      const FockState fs = build_fock_state(p, cut);
      const Eigen::MatrixXd raw = oracle_odm(fs, oo_n);
      const double tr = raw.trace();
      Eigen::MatrixXd t(oo_n + 1, oo_n + 1);
      for (int v = 0; v <= oo_n; ++v)
        for (int w = 0; w <= oo_n; ++w) t(v, w) = raw((1 << v) - 1, (1 << w) - 1) / tr;
      json j;
      j["n"] = oo_n;
      j["trace"] = tr;
      j["cutoff"] = cut;
      j["trace_deficit"] = fs.trace_deficit;
      j["compressed"] = matrix_json(t);
      j["matrix"] = matrix_json(raw / tr);
      ctx.emit_json(j);
    };
  });

  // figure-data
  std::string fig;
  int fig_res = 80;
  auto* s_fig = app.add_subcommand("figure-data", "Data behind the published figures (CSV)");
  s_fig->add_option("figure", fig, "fig2, fig4 or fig5")->required()->check(CLI::IsMember({"fig2", "fig4", "fig5"}));
  s_fig->add_option("--resolution", fig_res, "fig2 grid resolution");
  add_out(s_fig);
  s_fig->callback([&] {
    action = [&] {
      if (fig == "fig2") {
        std::vector<std::vector<std::string>> rows;
        for (const auto& c : contour_data({1e-3, 10.0}, {1e-3, 10.0}, fig_res))
          rows.push_back({num(c.ns), num(c.nth), num(c.fraction), c.grey ? "1" : "0"});
        ctx.emit_csv({"n_s", "n_th", "fraction", "is_grey"}, rows,
                     {"fraction: large-n_c limit of k / (2 S_0); is_grey: no Wineland squeezing at any n_c"});
      } else if (fig == "fig4") {
        struct Cell {
          double nc, ns;
          int n;
        };
        std::vector<Cell> cells;
        for (int n : verify_detail::fig4_n())
          for (double nc : verify_detail::fig4_nc(n))
            for (double ns : verify_detail::fig4_ns()) cells.push_back({nc, ns, n});
        const auto rows = parallel_rows(cells.size(), [&](std::size_t i) {
          auto r = sweep_row(cells[i].nc, cells[i].ns, 0.0, cells[i].n);
          r.push_back(num(poisson_line_weight(cells[i].nc, cells[i].n)));
          return r;
        });
        ctx.emit_csv({"n_c", "n_s", "N", "C", "C_max", "ratio", "delta", "line_weight"}, rows,
                     {"line_weight: Poisson P_N(n_c) / P_N(N)"});
      } else {
        struct Cell {
          int n, cut;
          double nc;
        };
        std::vector<Cell> cells;
        for (int n = 3; n <= 6; ++n)
          for (int i = 0; i <= 20; ++i)
            for (int k = 1; 2 * k <= n; ++k) cells.push_back({n, k, std::pow(10.0, -2.0 + 0.2 * i)});
        const auto rows = parallel_rows(cells.size(), [&](std::size_t i) -> std::vector<std::string> {
          const Cell& c = cells[i];
          const Odm o = build_odm(StateParams::make(c.nc, 0.3, 0.0), c.n);
          const Eigen::MatrixXd pt = partial_transpose_leading(o.dense(), c.n, c.cut);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (pt + pt.transpose()), Eigen::EigenvaluesOnly);
          return {std::to_string(c.n), num(c.nc), num(0.3), std::to_string(c.cut), num(bipartition_negativity(o, c.cut)),
                  num(es.eigenvalues().minCoeff())};
        });
        ctx.emit_csv({"N", "n_c", "n_s", "cut", "negativity", "pt_min_eigenvalue"}, rows,
                     {"bipartition negativity of the full N-photon state across the first-k cut, used in place of the "
                      "witness expectation value"});
      }
    };
  });

  // verify
  VerifyOptions vo;
  std::vector<int> v_only;
  std::string v_format = "text";
  auto* s_ver = app.add_subcommand("verify", "Run the acceptance suite");
  s_ver->add_option("--shots", vo.shots, "shots per photon number in the detection check");
  s_ver->add_option("--seed", vo.seed);
  s_ver->add_option("--only", v_only, "criterion ids")->delimiter(',');
  s_ver->add_option("--format", v_format)->check(CLI::IsMember({"text", "json"}));
  add_out(s_ver);
  int verify_status = kOk;
  s_ver->callback([&] {
    action = [&] {
      ctx.seed = vo.seed;
      const auto checks = acceptance_checks(vo);
      std::vector<CriterionResult> results;
      for (std::size_t i = 0; i < checks.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!v_only.empty() && std::find(v_only.begin(), v_only.end(), id) == v_only.end()) continue;
        results.push_back(run_check(id, checks[i]));
        if (v_format == "text") *ctx.stdout_stream << format_result(results.back()) << std::endl;
      }
      int passed = 0;
      for (const auto& r : results) passed += r.pass;
      verify_status = passed == static_cast<int>(results.size()) ? kOk : kFailedChecks;
      if (v_format == "text") {
        *ctx.stdout_stream << passed << "/" << results.size() << " criteria passed" << std::endl;
        return;
      }
      json arr = json::array();
      for (const auto& r : results)
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
      ctx.emit_json({{"criteria", arr}, {"passed", passed}, {"total", results.size()}});
    };
  });

  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    json e;
    e["schema_version"] = kSchemaVersion;
    e["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    err << e.dump() << std::endl;
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  for (CLI::App* sub : app.get_subcommands()) {
    ctx.command = sub->get_name();
    CLI::App* leaf = sub;
    for (CLI::App* inner : sub->get_subcommands()) {
      ctx.command += " " + inner->get_name();
      leaf = inner;
    }
    ctx.config = echo_options(leaf);
    if (leaf == s_fig) ctx.config["figure"] = fig;
  }

  try {
    if (action) action();
    return verify_status;
  } catch (const UsageError& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const Error& e) {
    // bad input values are validation errors; everything else is numeric-domain
    if (e.code() == ErrorCode::InvalidParams) return fail(kUsage, std::string(to_string(e.code())), e.what());
    return fail(kNumeric, std::string(to_string(e.code())), e.what());
  }
}

}  // namespace polsq::cli
