// conslab: command-line driver for runs, sweeps and the standalone checks.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conslab/checks.hpp"
#include "conslab/config.hpp"
#include "conslab/conormal.hpp"
#include "conslab/error.hpp"
#include "conslab/layer.hpp"
#include "conslab/snapshot.hpp"
#include "conslab/sweep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace conslab;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::string format = "csv";
};

/// Collects named hard assertions and prints one line per assertion.
class Assertions {
 public:
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "ok    " : "FAIL  ") << name << "  " << detail << "\n";
    all_ &= ok;
  }
  int exit_code() const { return all_ ? 0 : 1; }

 private:
  bool all_ = true;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

/// Rows of a flat table, written as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write(const fs::path& stem, const std::string& format) const {
    std::ofstream f(stem.string() + "." + format, std::ios::binary);
    if (!f) throw Error("cannot write '" + stem.string() + "." + format + "'");
    if (format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json o;
        for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
        j.push_back(o);
      }
      f << j.dump(2) << "\n";
      return;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) f << (c ? "," : "") << columns[c];
    f << "\n";
    f.precision(17);
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) f << (c ? "," : "") << r[c];
      f << "\n";
    }
  }
};

Config load(const Options& o) { return o.config.empty() ? parse_config("") : load_config(o.config); }

void prepare(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw InvalidArgument("--format must be csv or json");
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error("cannot create output directory '" + o.out + "': " + ec.message());
}

int cmd_run(const Options& o) {
  prepare(o);
  const Config c = load(o);
  const VectorField u0 = make_initial_data(c.init.kind, c.init.amplitude, c.sim.grid, c.init.seed);
  const Trajectory tr = run(c.sim, u0);
  const fs::path out(o.out);

  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const State& s = tr.states[i];
    std::vector<ScalarField> comps{s.u[0], s.u[1], s.u[2]};
    if (s.has_pressure()) comps.insert(comps.end(), {s.p1, s.p2});
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.cslb", i);
    write_snapshot(out / name, comps);
  }
  {
    std::ofstream f(out / "trace.csv", std::ios::binary);
    f << conormal_csv_header(c.sim.m) << "\n";
    for (const auto& r : tr.reports) f << to_csv_row(r) << "\n";
  }
  Table energy{{"t", "kinetic", "dissipation", "boundary", "residual"}, {}};
  std::vector<EnergyResidual> bal;
  if (tr.energy.size() >= 3) bal = energy_balance(tr.energy);
  for (std::size_t i = 0; i < tr.energy.size(); ++i) {
    const auto& e = tr.energy[i];
    double res = NAN;
    for (const auto& b : bal)
      if (b.t == e.t) res = b.residual;
    energy.rows.push_back({e.t, e.kinetic, e.dissipation, e.boundary, res});
  }
  energy.write(out / "energy", o.format);

  Assertions a;
  a.check("run completed", !tr.failed, tr.failed ? tr.failure : "t = " + num(c.sim.T));
  double div = 0, wall = 0, robin = 0, eta = 0, bal_max = 0;
  for (const auto& d : tr.diagnostics) {
    div = std::max(div, d.divergence);
    wall = std::max(wall, d.wall_normal);
    robin = std::max(robin, d.robin);
  }
  for (const auto& r : tr.reports) eta = std::max(eta, r.eta_boundary_max);
  for (const auto& b : bal) bal_max = std::max(bal_max, std::abs(b.residual));
  a.check("divergence", div <= c.sim.div_tol, "max " + num(div));
  a.check("wall normal velocity", wall <= c.sim.div_tol, "max " + num(wall));
  if (c.sim.eps > 0) {
    a.check("navier condition", robin <= c.sim.bc_tol, "max " + num(robin));
    a.check("eta wall trace", eta <= c.sim.bc_tol, "max " + num(eta));
  }
  std::cout << "energy residual max " << num(bal_max) << " (recorded)\n";
  return a.exit_code();
}

int cmd_sweep(const Options& o) {
  prepare(o);
  const SweepConfig sc = SweepConfig::from(load(o));
  const SweepReport r = sweep(sc);
  emit_report(r, o.format, o.out);
  Assertions a;
  for (const auto& e : r.entries)
    if (!e.ok) a.check("run eps=" + num(e.eps), false, e.failure);
  a.check("euler baseline", r.euler_ok, "max div " + num(r.euler_max_div));
  a.check("uniform conormal bound", r.flags.uniform_bound,
          "N2 ratio " + num(r.N2_ratio) + ", N3 ratio " + num(r.N3_ratio));
  a.check("d_zz u_h growth", r.flags.dzz_growth, "slope " + num(r.dzz_slope));
  a.check("layer amplitude", r.flags.layer_amplitude, "slope " + num(r.amp_slope) + ", r2 " + num(r.amp_r2));
  a.check("inviscid limit", r.flags.inviscid_limit, "");
  a.check("eta wall trace", r.flags.eta_trace, "");
  a.check("divergence and u3(0)", r.flags.invariants, "");
  return a.exit_code();
}

int cmd_fpcheck(const Options& o) {
  prepare(o);
  const FPCheckResult r = fp_check();
  Table t{{"case", "eps", "sup_f0", "sup_g", "max_principle_margin", "weighted_ratio", "mass_defect"}, {}};
  for (const auto& c : r.coarse.cases)
    if (!c.skipped)
      t.rows.push_back({double(c.id), c.eps, c.sup_f0, c.sup_g, c.max_principle_margin, c.weighted_ratio,
                        c.mass_defect});
  t.write(fs::path(o.out) / "fp_bounds", o.format);
  Assertions a;
  a.check("corpus size", t.rows.size() >= 50, num(double(t.rows.size())) + " cases");
  a.check("kernel variance", r.coarse.kept == KernelCandidate::derived,
          "residual derived " + num(r.coarse.residual_derived) + ", printed " + num(r.coarse.residual_printed));
  a.check("kernel mass", r.coarse.max_mass_defect <= 1e-10, "max defect " + num(r.coarse.max_mass_defect));
  a.check("maximum principle", r.coarse.violations == 0 && r.fine.violations == 0,
          num(double(r.coarse.violations + r.fine.violations)) + " violations");
  a.check("weighted bound constant", r.C_change <= 0.1,
          "C " + num(r.coarse.C) + " -> " + num(r.fine.C) + " (change " + num(r.C_change) + ")");
  return a.exit_code();
}

int cmd_presscheck(const Options& o) {
  prepare(o);
  const auto cases = pressure_cases();
  Table t{{"case", "nz", "rel_error", "order"}, {}};
  Assertions a;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    for (std::size_t j = 0; j < c.nz.size(); ++j) t.rows.push_back({double(i), double(c.nz[j]), c.rel_error[j], c.order});
    double at128 = NAN;
    for (std::size_t j = 0; j < c.nz.size(); ++j)
      if (c.nz[j] == 128) at128 = c.rel_error[j];
    a.check(c.name + " error at nz=128", at128 <= 1e-2, num(at128));
    a.check(c.name + " order", std::abs(c.order - 2.0) <= 0.3, num(c.order));
  }
  t.write(fs::path(o.out) / "pressure", o.format);
  const double p2 = p2_closed_vs_fd({0.5, 1.0, 2.0, 4.0, 8.0});
  a.check("p2 closed form", p2 <= 1e-8, "max relative difference " + num(p2));
  return a.exit_code();
}

/// Rebuilds layer profiles from a previous sweep directory.
int cmd_report(const Options& o) {
  const fs::path dir(o.out);
  SweepReport r;
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  };
  if (fs::exists(dir / "sweep.json"))
    r = parse_sweep_json(slurp(dir / "sweep.json"));
  else if (fs::exists(dir / "sweep.csv"))
    r = parse_sweep_csv(slurp(dir / "sweep.csv"));
  else
    throw Error("report: no sweep.json or sweep.csv in '" + o.out + "'");
  if (o.format != "csv" && o.format != "json") throw InvalidArgument("--format must be csv or json");

  Table layer{{"eps", "amplitude", "slope_so_far", "layer_nodes"}, {}};
  std::vector<double> eps, amp;
  for (const auto& e : r.entries) {
    if (!e.ok) continue;
    eps.push_back(e.eps);
    amp.push_back(e.amplitude);
    double slope = NAN;
    if (eps.size() >= 2) {
      const std::size_t n = eps.size();
      slope = std::log(amp[n - 1] / amp[n - 2]) / std::log(eps[n - 1] / eps[n - 2]);
    }
    layer.rows.push_back({e.eps, e.amplitude, slope, double(e.layer_nodes)});
  }
  layer.write(dir / "layer", o.format);

  const bool have_euler = fs::exists(dir / "euler.cslb");
  if (have_euler) {
    const Snapshot se = read_snapshot(dir / "euler.cslb");
    const VectorField ue(se.components.at(0), se.components.at(1), se.components.at(2));
    fs::create_directories(dir / "profiles");
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      const fs::path p = dir / ("eps_" + std::to_string(i) + ".cslb");
      if (!fs::exists(p)) continue;
      const Snapshot s = read_snapshot(p);
      // Snapshots carry their own grid; rebind the baseline onto it.
      const VectorField u(s.components.at(0), s.components.at(1), s.components.at(2));
      const VectorField ub(ScalarField(u.grid(), ue[0].values()), ScalarField(u.grid(), ue[1].values()),
                           ScalarField(u.grid(), ue[2].values()));
      const LayerProfile lp = layer_profile(u, ub, r.entries[i].eps, r.t_final);
      // Horizontal mean of V_h against zeta.
      Table prof{{"zeta", "V1_mean", "V2_mean", "V1_max"}, {}};
      const Grid& g = *lp.V.grid();
      for (int k = 0; k < g.Nz; ++k) {
        double m1 = 0, m2 = 0, mx = 0;
        for (int a = 0; a < g.N1; ++a)
          for (int b = 0; b < g.N2; ++b) {
            m1 += lp.V[0].at(a, b, k);
            m2 += lp.V[1].at(a, b, k);
            mx = std::max(mx, std::abs(lp.V[0].at(a, b, k)));
          }
        const double n = double(g.N1) * g.N2;
        prof.rows.push_back({lp.zeta_nodes[k], m1 / n, m2 / n, mx});
      }
      prof.write(dir / "profiles" / ("eps_" + std::to_string(i)), o.format);
    }
  }
  std::cout << "report: " << layer.rows.size() << " entries" << (have_euler ? ", profiles written" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Navier-slip half-space laboratory"};
  app.require_subcommand(1);
  Options o;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", o.config, "key = value configuration file");
    s->add_option("--out", o.out, "output directory")->capture_default_str();
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    return s;
  };
  CLI::App* run_cmd = add("run", "single simulation with snapshots and traces");
  CLI::App* sweep_cmd = add("sweep", "viscosity sweep against the inviscid baseline");
  CLI::App* fp_cmd = add("fpcheck", "propagator kernel checks");
  CLI::App* pr_cmd = add("presscheck", "pressure kernels against finite differences");
  CLI::App* rep_cmd = add("report", "layer tables and profiles from a sweep directory");
  CLI11_PARSE(app, argc, argv);
  try {
    if (run_cmd->parsed()) return cmd_run(o);
    if (sweep_cmd->parsed()) return cmd_sweep(o);
    if (fp_cmd->parsed()) return cmd_fpcheck(o);
    if (pr_cmd->parsed()) return cmd_presscheck(o);
    if (rep_cmd->parsed()) return cmd_report(o);
  } catch (const std::exception& e) {
    std::cerr << "conslab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
