#include "conslab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conslab/error.hpp"
#include "conslab/operators.hpp"
#include "conslab/snapshot.hpp"
#include "conslab/svg.hpp"
#include "json.hpp"

namespace conslab {

SweepConfig SweepConfig::from(const Config& c) {
  SweepConfig s;
  s.base = c.sim;
  s.init = c.init;
  s.eps_list = c.eps_list;
  return s;
}

void SweepConfig::validate() const {
  base.validate();
  if (eps_list.size() < 4) throw InvalidArgument("sweep: eps_list needs at least 4 entries for the scaling fits");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) throw InvalidArgument("sweep: eps values must lie in (0, 1]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InvalidArgument("sweep: eps_list must be strictly decreasing");
  }
}

void evaluate_flags(SweepReport& r) {
  SweepFlags f;
  std::vector<double> eps, amp, dzz;
  bool all_ok = !r.entries.empty();
  for (const auto& e : r.entries) {
    if (!e.ok) {
      all_ok = false;
      continue;
    }
    eps.push_back(e.eps);
    amp.push_back(e.amplitude);
    dzz.push_back(e.max_dzz_uh);
  }
  r.amp_slope = r.amp_r2 = r.dzz_slope = r.dzz_r2 = 0.0;
  try {
    const ScalingFit a = amplitude_scaling(eps, amp);
    r.amp_slope = a.slope;
    r.amp_r2 = a.r2;
    f.layer_amplitude = std::abs(a.slope - 0.5) <= 0.15 && a.r2 >= 0.95;
  } catch (const InvalidArgument&) {
  }
  try {
    const ScalingFit d = amplitude_scaling(eps, dzz);
    r.dzz_slope = d.slope;
    r.dzz_r2 = d.r2;
    f.dzz_growth = std::abs(d.slope + 0.5) <= 0.15;
  } catch (const InvalidArgument&) {
  }
  r.N2_ratio = r.N3_ratio = 0.0;
  if (!r.entries.empty() && r.entries.front().max_N2 > 0.0) {
    for (const auto& e : r.entries) {
      r.N2_ratio = std::max(r.N2_ratio, e.max_N2 / r.entries.front().max_N2);
      r.N3_ratio = std::max(r.N3_ratio, e.max_N3 / r.entries.front().max_N3);
    }
  }
  f.uniform_bound = all_ok && r.N2_ratio <= 2.0 && r.N3_ratio <= 2.0 && f.dzz_growth;

  f.inviscid_limit = all_ok;
  for (std::size_t i = 1; i < r.entries.size(); ++i)
    if (!(r.entries[i].sup_l2_diff < r.entries[i - 1].sup_l2_diff) ||
        !(r.entries[i].sup_linf_diff < r.entries[i - 1].sup_linf_diff))
      f.inviscid_limit = false;
  if (!r.entries.empty()) {
    const auto& last = r.entries.back();
    if (!(last.sup_l2_diff < 0.1 * r.norm0_l2) || !(last.sup_linf_diff < 0.1 * r.norm0_linf))
      f.inviscid_limit = false;
  }

  f.eta_trace = all_ok;
  f.invariants = all_ok && r.euler_ok && r.euler_max_div <= r.div_tol;
  for (const auto& e : r.entries) {
    if (e.eta_trace_max > r.bc_tol) f.eta_trace = false;
    if (e.max_div > r.div_tol || e.max_wall_u3 != 0.0) f.invariants = false;
  }
  r.flags = f;
}

SweepReport sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepReport rep;
  rep.div_tol = cfg.base.div_tol;
  rep.bc_tol = cfg.base.bc_tol;
  const GridPtr grid = cfg.base.grid;

  // One initial state shared by every run, divergence-free and tangent. Each
  // viscous run imposes its Navier row on it at t = 0; the mismatch between
  // that row and the Euler data is what seeds the boundary layer.
  SimConfig ecfg = cfg.base;
  ecfg.eps = 0.0;
  const VectorField raw = make_initial_data(cfg.init.kind, cfg.init.amplitude, grid, cfg.init.seed);
  const VectorField u0 = Integrator(ecfg).project(raw);
  rep.norm0_l2 = l2_norm(u0);
  rep.norm0_linf = linf_norm(u0);

  const Trajectory euler = run(ecfg, u0);
  rep.euler_ok = !euler.failed;
  for (const auto& d : euler.diagnostics) rep.euler_max_div = std::max(rep.euler_max_div, d.divergence);
  if (!euler.states.empty()) {
    rep.euler_final = euler.states.back().u;
    rep.t_final = euler.states.back().t;
  }

  for (double eps : cfg.eps_list) {
    SimConfig c = cfg.base;
    c.eps = eps;
    SweepEntry e;
    e.eps = eps;
    e.layer_nodes = layer_nodes(*grid, eps);
    const Trajectory tr = run(c, u0);
    e.ok = !tr.failed && rep.euler_ok;
    e.failure = tr.failed ? tr.failure : (rep.euler_ok ? "" : "euler baseline failed");
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const VectorField& u = tr.states[i].u;
      const double t = tr.states[i].t;
      e.times.push_back(t);
      e.N2_trace.push_back(N_m(u, 2));
      e.N3_trace.push_back(N_m(u, 3));
      e.max_N2 = std::max(e.max_N2, e.N2_trace.back());
      e.max_N3 = std::max(e.max_N3, e.N3_trace.back());
      e.max_dz_uh = std::max(e.max_dz_uh, dz_tangential_max(u));
      // At t = 0 the Navier row has just been imposed on Euler data, a jump
      // resolved by one cell whatever eps is; the layer is measured after it.
      if (i > 0) e.max_dzz_uh = std::max(e.max_dzz_uh, dzz_tangential_max(u));
      e.eta_trace_max = std::max(e.eta_trace_max, tr.reports[i].eta_boundary_max);
      e.max_div = std::max(e.max_div, tr.diagnostics[i].divergence);
      e.max_wall_u3 = std::max(e.max_wall_u3, tr.diagnostics[i].wall_normal);
      if (i < euler.states.size() && std::abs(euler.states[i].t - t) < 1e-9) {
        const ConvergenceMetrics cm = convergence_metrics(u, euler.states[i].u);
        e.sup_l2_diff = std::max(e.sup_l2_diff, cm.l2);
        e.sup_linf_diff = std::max(e.sup_linf_diff, cm.linf);
        e.amplitude = std::max(e.amplitude, tangential_difference_max(u, euler.states[i].u));
      } else {
        e.ok = false;
        if (e.failure.empty()) e.failure = "report times do not match the euler baseline";
      }
    }
    rep.finals.push_back(tr.states.empty() ? VectorField() : tr.states.back().u);
    rep.entries.push_back(std::move(e));
  }
  evaluate_flags(rep);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

const char* kEntryCols[] = {"eps",          "ok",          "max_N2",      "max_N3",        "max_dz_uh",
                            "max_dzz_uh",   "sup_l2_diff", "sup_linf_diff", "amplitude",   "eta_trace_max",
                            "max_div",      "max_wall_u3", "layer_nodes"};
const char* kSummaryCols[] = {"norm0_l2",  "norm0_linf", "euler_ok",   "euler_max_div",  "div_tol",
                              "bc_tol",    "amp_slope",  "amp_r2",     "dzz_slope",      "dzz_r2",
                              "N2_ratio",  "N3_ratio",   "uniform_bound", "dzz_growth",  "layer_amplitude",
                              "inviscid_limit", "eta_trace", "invariants"};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream o;
  bool first = true;
  for (const char* c : kEntryCols) o << (first ? "" : ",") << c, first = false;
  for (const char* c : kSummaryCols) o << ',' << c;
  o << '\n';
  const std::size_t nsum = std::size(kSummaryCols);
  for (const auto& e : r.entries) {
    o << fmt(e.eps) << ',' << (e.ok ? 1 : 0) << ',' << fmt(e.max_N2) << ',' << fmt(e.max_N3) << ','
      << fmt(e.max_dz_uh) << ',' << fmt(e.max_dzz_uh) << ',' << fmt(e.sup_l2_diff) << ',' << fmt(e.sup_linf_diff)
      << ',' << fmt(e.amplitude) << ',' << fmt(e.eta_trace_max) << ',' << fmt(e.max_div) << ','
      << fmt(e.max_wall_u3) << ',' << e.layer_nodes;
    for (std::size_t i = 0; i < nsum; ++i) o << ',';
    o << '\n';
  }
  if (!r.entries.empty()) {
    o << "summary," << (r.flags.all() ? 1 : 0);
    for (std::size_t i = 2; i < std::size(kEntryCols); ++i) o << ',';
    const auto& f = r.flags;
    o << ',' << fmt(r.norm0_l2) << ',' << fmt(r.norm0_linf) << ',' << (r.euler_ok ? 1 : 0) << ','
      << fmt(r.euler_max_div) << ',' << fmt(r.div_tol) << ',' << fmt(r.bc_tol) << ',' << fmt(r.amp_slope) << ','
      << fmt(r.amp_r2) << ',' << fmt(r.dzz_slope) << ',' << fmt(r.dzz_r2) << ',' << fmt(r.N2_ratio) << ','
      << fmt(r.N3_ratio) << ',' << f.uniform_bound << ',' << f.dzz_growth << ',' << f.layer_amplitude << ','
      << f.inviscid_limit << ',' << f.eta_trace << ',' << f.invariants << '\n';
  }
  return o.str();
}

std::string sweep_json(const SweepReport& r) {
  using nlohmann::json;
  json j;
  j["entries"] = json::array();
  for (const auto& e : r.entries) {
    j["entries"].push_back({{"eps", e.eps},
                            {"ok", e.ok},
                            {"failure", e.failure},
                            {"max_N2", e.max_N2},
                            {"max_N3", e.max_N3},
                            {"max_dz_uh", e.max_dz_uh},
                            {"max_dzz_uh", e.max_dzz_uh},
                            {"sup_l2_diff", e.sup_l2_diff},
                            {"sup_linf_diff", e.sup_linf_diff},
                            {"amplitude", e.amplitude},
                            {"eta_trace_max", e.eta_trace_max},
                            {"max_div", e.max_div},
                            {"max_wall_u3", e.max_wall_u3},
                            {"layer_nodes", e.layer_nodes},
                            {"times", e.times},
                            {"N2_trace", e.N2_trace},
                            {"N3_trace", e.N3_trace}});
  }
  const auto& f = r.flags;
  j["summary"] = {{"norm0_l2", r.norm0_l2},
                  {"norm0_linf", r.norm0_linf},
                  {"euler_ok", r.euler_ok},
                  {"euler_max_div", r.euler_max_div},
                  {"div_tol", r.div_tol},
                  {"bc_tol", r.bc_tol},
                  {"amp_slope", r.amp_slope},
                  {"amp_r2", r.amp_r2},
                  {"dzz_slope", r.dzz_slope},
                  {"dzz_r2", r.dzz_r2},
                  {"N2_ratio", r.N2_ratio},
                  {"N3_ratio", r.N3_ratio},
                  {"t_final", r.t_final},
                  {"flags",
                   {{"uniform_bound", f.uniform_bound},
                    {"dzz_growth", f.dzz_growth},
                    {"layer_amplitude", f.layer_amplitude},
                    {"inviscid_limit", f.inviscid_limit},
                    {"eta_trace", f.eta_trace},
                    {"invariants", f.invariants},
                    {"all", f.all()}}}};
  return j.dump(2) + "\n";
}

SweepReport parse_sweep_json(const std::string& text) {
  using nlohmann::json;
  SweepReport r;
  try {
    const json j = json::parse(text);
    for (const auto& x : j.at("entries")) {
      SweepEntry e;
      e.eps = x.at("eps");
      e.ok = x.at("ok");
      e.failure = x.at("failure");
      e.max_N2 = x.at("max_N2");
      e.max_N3 = x.at("max_N3");
      e.max_dz_uh = x.at("max_dz_uh");
      e.max_dzz_uh = x.at("max_dzz_uh");
      e.sup_l2_diff = x.at("sup_l2_diff");
      e.sup_linf_diff = x.at("sup_linf_diff");
      e.amplitude = x.at("amplitude");
      e.eta_trace_max = x.at("eta_trace_max");
      e.max_div = x.at("max_div");
      e.max_wall_u3 = x.at("max_wall_u3");
      e.layer_nodes = x.at("layer_nodes");
      e.times = x.at("times").get<std::vector<double>>();
      e.N2_trace = x.at("N2_trace").get<std::vector<double>>();
      e.N3_trace = x.at("N3_trace").get<std::vector<double>>();
      r.entries.push_back(std::move(e));
    }
    const auto& s = j.at("summary");
    r.norm0_l2 = s.at("norm0_l2");
    r.norm0_linf = s.at("norm0_linf");
    r.euler_ok = s.at("euler_ok");
    r.euler_max_div = s.at("euler_max_div");
    r.div_tol = s.at("div_tol");
    r.bc_tol = s.at("bc_tol");
    r.t_final = s.value("t_final", 0.0);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("sweep json: ") + e.what());
  }
  evaluate_flags(r);
  return r;
}

SweepReport parse_sweep_csv(const std::string& text) {
  SweepReport r;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return r;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
  };
  const std::vector<std::string> header = split(line);
  auto col = [&](const std::vector<std::string>& row, const std::string& name) -> std::string {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i < row.size() ? row[i] : "";
    throw InvalidArgument("sweep csv: missing column " + name);
  };
  auto d = [&](const std::vector<std::string>& row, const std::string& name) { return std::stod(col(row, name)); };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = split(line);
    if (row[0] == "summary") {
      r.norm0_l2 = d(row, "norm0_l2");
      r.norm0_linf = d(row, "norm0_linf");
      r.euler_ok = d(row, "euler_ok") != 0.0;
      r.euler_max_div = d(row, "euler_max_div");
      r.div_tol = d(row, "div_tol");
      r.bc_tol = d(row, "bc_tol");
      continue;
    }
    SweepEntry e;
    e.eps = d(row, "eps");
    e.ok = d(row, "ok") != 0.0;
    e.max_N2 = d(row, "max_N2");
    e.max_N3 = d(row, "max_N3");
    e.max_dz_uh = d(row, "max_dz_uh");
    e.max_dzz_uh = d(row, "max_dzz_uh");
    e.sup_l2_diff = d(row, "sup_l2_diff");
    e.sup_linf_diff = d(row, "sup_linf_diff");
    e.amplitude = d(row, "amplitude");
    e.eta_trace_max = d(row, "eta_trace_max");
    e.max_div = d(row, "max_div");
    e.max_wall_u3 = d(row, "max_wall_u3");
    e.layer_nodes = static_cast<int>(d(row, "layer_nodes"));
    r.entries.push_back(std::move(e));
  }
  evaluate_flags(r);
  return r;
}

void emit_report(const SweepReport& r, const std::string& format, const std::string& dir) {
  namespace fs = std::filesystem;
  if (format != "csv" && format != "json") throw InvalidArgument("emit_report: format must be csv or json");
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "plots", ec);
  if (ec) throw Error("emit_report: cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("emit_report: cannot write '" + p.string() + "'");
    f << s;
    if (!f) throw Error("emit_report: write failed for '" + p.string() + "'");
  };
  const fs::path root(dir);
  write(root / ("sweep." + format), format == "csv" ? sweep_csv(r) : sweep_json(r));

  std::vector<PlotSeries> nm;
  for (const auto& e : r.entries) {
    std::ostringstream lab;
    lab << "eps=" << e.eps;
    nm.push_back({lab.str() + " m=2", e.times, e.N2_trace});
    nm.push_back({lab.str() + " m=3", e.times, e.N3_trace, true});
  }
  write(root / "plots" / "nm_vs_t.svg", svg_plot({"N_m proxy against time", "t", "N_m", false, true}, nm));

  std::vector<double> eps, amp, fit, l2, linf;
  for (const auto& e : r.entries) {
    eps.push_back(e.eps);
    amp.push_back(e.amplitude);
    l2.push_back(e.sup_l2_diff);
    linf.push_back(e.sup_linf_diff);
  }
  if (!amp.empty() && amp.front() > 0) {
    // Fitted line through the geometric centre of the data.
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) cx += std::log(eps[i]), cy += std::log(std::max(amp[i], 1e-300));
    cx /= eps.size(), cy /= eps.size();
    for (double x : eps) fit.push_back(std::exp(cy + r.amp_slope * (std::log(x) - cx)));
  }
  std::ostringstream fl;
  fl.precision(3);
  fl << "fit slope " << r.amp_slope;
  write(root / "plots" / "amplitude_vs_eps.svg",
        svg_plot({"Layer amplitude against viscosity", "eps", "sup_t |(u_eps - u_0)_h|_inf", true, true},
                 {{"amplitude", eps, amp}, {fl.str(), eps, fit, true, false}}));
  write(root / "plots" / "convergence_vs_eps.svg",
        svg_plot({"Distance to the inviscid solution", "eps", "sup_t norm", true, true},
                 {{"L2", eps, l2}, {"Linf", eps, linf}}));

  if (r.euler_final.grid()) write_snapshot(root / "euler.cslb", r.euler_final);
  for (std::size_t i = 0; i < r.finals.size(); ++i)
    if (r.finals[i].grid()) write_snapshot(root / ("eps_" + std::to_string(i) + ".cslb"), r.finals[i]);
}

}  // namespace conslab
