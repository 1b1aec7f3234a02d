#pragma once

// Command-line front end. dispatch() parses argv, runs one subcommand and
// writes one CSV or JSON artifact. Exit codes: 0 success, 2 validation error,
// 3 computation or IO error.

#include <cerrno>
#include <charconv>
#include <cstring>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chains.hpp"
#include "core.hpp"
#include "fixedpoints.hpp"
#include "horseshoe.hpp"
#include "lyapunov.hpp"
#include "maps.hpp"
#include "parallel.hpp"
#include "pulses.hpp"

namespace bykov::cli {

inline constexpr const char* version = "bykov-model 0.1.0";

// ------------------------------------------------------------------ emission

/// A table cell. Text holds values that must not pass through double, such
/// as extended-precision thresholds.
struct Text {
  std::string s;
};
using Cell = std::variant<double, long long, bool, std::string, Text>;

struct Table {
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string rows_key = "rows";
};

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_extended(const extended& v) { return v.str(50, std::ios_base::scientific); }

inline std::string cell_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else return v.s;
      },
      c);
}

inline nlohmann::json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
          return v;
        } else if constexpr (std::is_same_v<T, Text>) {
          return v.s;
        } else {
          return v;
        }
      },
      c);
}

inline std::string render_csv(const Table& t) {
  std::string s;
  for (const auto& [k, v] : t.meta) s += "# " + k + "=" + cell_csv(v) + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_csv(row[i]);
    s += "\n";
  }
  return s;
}

/// Keys are sorted (nlohmann's default object is an ordered map).
inline std::string render_json(const Table& t) {
  nlohmann::json j;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : t.meta) meta[k] = cell_json(v);
  j["meta"] = meta;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = cell_json(row[i]);
    rows.push_back(o);
  }
  j[t.rows_key] = rows;
  return j.dump(2) + "\n";
}

// ------------------------------------------------------------------ options

struct Options {
  double C1 = 0, E1 = 0, C2 = 0, E2 = 0, lambda = 0;
  std::string out;
  std::string format = "csv";
  std::string precision = "auto";
  int ell = 1, ell_from = 0, ell_to = 0;
  double x = 0, y = 0, dt = 0.1;
  int steps = 10, renorm = 1, warmup = 0;
  double center = 0, tau = 0.25;
  int n = 1, n_from = 1, n_to = 4;
  double x_lo = 0, x_hi = pi, residual_tol = 1e-10;
  double lambda_lo = 1e-6, lambda_hi = 0.5;
  double lambda_from = 1e-3, lambda_to = 1e-1;
  int lambda_steps = 10;
  double epsilon = 0.05, chain_tau = pi;
  int nx = 512, ny = 512, max_iterates = 6;
  std::string seed = "curve";
  unsigned workers = 0;
};

/// Raised for argument problems detected after parsing (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ModelParams params_of(const Options& o) { return ModelParams(o.C1, o.E1, o.C2, o.E2, o.lambda); }

inline std::vector<std::pair<std::string, Cell>> base_meta(const std::string& cmd, const ModelParams& p) {
  return {{"command", cmd},     {"version", std::string(version)},
          {"C1", p.C1()},       {"E1", p.E1()},
          {"C2", p.C2()},       {"E2", p.E2()},
          {"lambda", p.lambda()}, {"delta", p.delta()},
          {"K", p.K()}};
}

// --------------------------------------------------------------- commands

inline Table cmd_fixed_points(const Options& o) {
  const ModelParams p = params_of(o);
  Table t{base_meta("fixed-points", p), {"ell", "branch", "x", "y", "lambda", "residual", "trace", "det", "stability"}, {}};
  t.meta.push_back({"ell", static_cast<long long>(o.ell)});
  t.rows_key = "fixed_points";
  for (const FixedPoint& fp : fixed_point_family(p, o.ell)) {
    const EigenData ed = eigen_data(fp, p);
    t.rows.push_back({static_cast<long long>(fp.ell), std::string(to_string(fp.branch)), fp.x, fp.y, fp.lambda,
                      fixed_point_residual(fp.point(), p), ed.trace, ed.det, std::string(to_string(ed.stability))});
  }
  return t;
}

inline Precision parse_precision(const std::string& s) {
  return s == "extended" ? Precision::Extended : Precision::Double;
}

inline Table cmd_thresholds(const Options& o) {
  const ModelParams p = params_of(o);
  const int lo = o.ell_from > 0 ? o.ell_from : o.ell;
  const int hi = o.ell_to > 0 ? o.ell_to : lo;
  if (hi < lo) throw UsageError("--ell-to must be >= --ell-from");
  Table t{base_meta("thresholds", p), {"ell", "a", "b", "c", "d", "precision"}, {}};
  t.meta.push_back({"precision_mode", o.precision});
  t.rows_key = "thresholds";
  for (int ell = lo; ell <= hi; ++ell) {
    const ThresholdReport r = o.precision == "auto" ? bifurcation_thresholds_auto(p, ell)
                                                    : bifurcation_thresholds(p, ell, parse_precision(o.precision));
    if (r.precision == Precision::Double) {
      t.rows.push_back({static_cast<long long>(ell), static_cast<double>(r.a), static_cast<double>(r.b),
                        static_cast<double>(r.c), static_cast<double>(r.d), std::string("double")});
    } else {
      t.rows.push_back({static_cast<long long>(ell), Text{format_extended(r.a)}, Text{format_extended(r.b)},
                        Text{format_extended(r.c)}, Text{format_extended(r.d)}, std::string("extended")});
    }
  }
  return t;
}

inline Table cmd_eigen_scan(const Options& o) {
  const ModelParams p = params_of(o);
  const int lo = o.ell_from > 0 ? o.ell_from : o.ell;
  const int hi = o.ell_to > 0 ? o.ell_to : lo;
  Table t{base_meta("eigen-scan", p),
          {"ell", "lambda", "trace", "det", "mu_s", "mu_u", "vs_x", "vs_y", "vu_x", "vu_y", "chi_s", "chi_u"},
          {}};
  for (const EigenScanRow& r : eigen_asymptotics_scan(p, lo, hi))
    t.rows.push_back({static_cast<long long>(r.ell), r.lambda, r.trace, r.det, r.mu_s, r.mu_u, r.v_s.x, r.v_s.y,
                      r.v_u.x, r.v_u.y, r.chi_s, r.chi_u});
  return t;
}

inline Table cmd_lyapunov(const Options& o, bool from_point) {
  const ModelParams p = params_of(o);
  Table t{base_meta("lyapunov", p), {"kind", "ell", "branch", "x", "y", "steps", "chi_s", "chi_u", "focus"}, {}};
  const LyapunovOptions lo{o.renorm, o.warmup};
  t.meta.push_back({"renorm_period", static_cast<long long>(o.renorm)});
  t.meta.push_back({"warmup", static_cast<long long>(o.warmup)});
  if (from_point) {
    const SectionPoint q = SectionPoint::make(o.x, o.y);
    const LyapunovData d = lyapunov_numeric(q, p, o.steps, lo);
    t.rows.push_back({std::string("numeric"), 0LL, std::string(""), q.x, q.y, static_cast<long long>(o.steps), d.chi_s,
                      d.chi_u, d.focus});
    return t;
  }
  for (const FixedPoint& fp : fixed_point_family(p, o.ell)) {
    const LyapunovData a = lyapunov_fixed_point(fp, p);
    t.rows.push_back({std::string("closed-form"), static_cast<long long>(fp.ell), std::string(to_string(fp.branch)),
                      fp.x, fp.y, 0LL, a.chi_s, a.chi_u, a.focus});
    if (a.focus) continue;
    const SectionPoint cyc[1] = {fp.point()};
    const LyapunovData b = lyapunov_numeric(std::span<const SectionPoint>(cyc, 1), p, o.steps, lo);
    t.rows.push_back({std::string("numeric"), static_cast<long long>(fp.ell), std::string(to_string(fp.branch)), fp.x,
                      fp.y, static_cast<long long>(o.steps), b.chi_s, b.chi_u, b.focus});
  }
  return t;
}

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::HitStableManifold: return "hit-stable-manifold";
    case Termination::Escaped: return "escaped";
  }
  return "unknown";
}

inline Table cmd_orbit(const Options& o) {
  const ModelParams p = params_of(o);
  const SectionPoint q = SectionPoint::make(o.x, o.y);
  const OrbitRecord rec = iterate_orbit(q, p, static_cast<std::size_t>(o.steps));
  Table t{base_meta("orbit", p), {"step", "x", "y", "time"}, {}};
  t.meta.push_back({"termination", std::string(to_string(rec.termination))});
  t.meta.push_back({"total_time", rec.total_time});
  if (rec.landing_x) t.meta.push_back({"landing_x", *rec.landing_x});
  for (std::size_t i = 0; i < rec.points.size(); ++i)
    t.rows.push_back({static_cast<long long>(i), rec.points[i].x, rec.points[i].y,
                      i == 0 ? 0.0 : rec.times[i - 1]});
  return t;
}

inline std::string_view to_string(FlowSegment s) {
  switch (s) {
    case FlowSegment::InsideV1: return "V1";
    case FlowSegment::Transition12: return "sigma1->sigma2";
    case FlowSegment::InsideV2: return "V2";
    case FlowSegment::Transition21: return "sigma2->sigma1";
  }
  return "unknown";
}

inline Table cmd_flow(const Options& o) {
  const ModelParams p = params_of(o);
  const FlowPath path = flow_trajectory(SectionPoint::make(o.x, o.y), p, o.dt);
  Table t{base_meta("flow", p), {"segment", "t", "rho", "theta", "z"}, {}};
  t.meta.push_back({"duration", path.duration()});
  for (const FlowSample& s : path.samples)
    t.rows.push_back({std::string(to_string(s.segment)), s.t, s.rho, s.theta, s.z});
  return t;
}

inline Table cmd_strips(const Options& o) {
  const ModelParams p = params_of(o);
  const StripRectangle rect(o.center, o.tau);
  Table t{base_meta("strips", p),
          {"n", "height", "crossed", "below", "above", "image_x_lo", "image_x_hi", "image_y_lo", "image_y_hi",
           "expansion", "contraction", "det_reference"},
          {}};
  t.meta.push_back({"center", rect.center_x});
  t.meta.push_back({"tau", rect.tau});
  const auto strips = detect_strips(p, rect, o.n_from, o.n_to);
  std::vector<CrossingReport> reps(strips.size());
  parallel_for(strips.size(), [&](std::size_t i) { reps[i] = strip_crossing_check(strips[i], p); }, o.workers ? o.workers : 1);
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const CrossingReport& r = reps[i];
    t.rows.push_back({static_cast<long long>(strips[i].n), strips[i].height, r.crossed, r.below, r.above,
                      r.image_x_extent.lo, r.image_x_extent.hi, r.image_y_extent.lo, r.image_y_extent.hi,
                      r.expansion_estimate, r.contraction_estimate, r.det_reference});
  }
  return t;
}

inline Table cmd_pulses(const Options& o) {
  const ModelParams p = params_of(o);
  PulseOptions po;
  po.residual_tol = o.residual_tol;
  const PulseResult r = find_pulses(p, o.n, o.x_lo, o.x_hi, po);
  Table t{base_meta("pulses", p), {"n", "lambda", "x_root", "residual"}, {}};
  t.meta.push_back({"degenerate", r.degenerate});
  t.meta.push_back({"discarded", static_cast<long long>(r.discarded)});
  t.meta.push_back({"x_lo", o.x_lo});
  t.meta.push_back({"x_hi", o.x_hi});
  for (const PulseConnection& c : r.roots)
    t.rows.push_back({static_cast<long long>(c.n), c.lambda, c.x_root, c.residual});
  return t;
}

inline Table cmd_tangencies(const Options& o) {
  const ModelParams p = params_of(o);
  Table t{base_meta("tangencies", p), {"n", "lambda_star", "x_star", "g", "g_x", "g_xx", "quadratic"}, {}};
  t.meta.push_back({"lambda_lo", o.lambda_lo});
  t.meta.push_back({"lambda_hi", o.lambda_hi});
  for (const TangencyParameter& tp : find_tangency_lambda(p, o.n, o.lambda_lo, o.lambda_hi))
    t.rows.push_back({static_cast<long long>(tp.n), tp.lambda_star, tp.x_star, tp.g, tp.g_x, tp.g_xx, tp.quadratic});
  return t;
}

inline Table cmd_chain(const Options& o) {
  const ModelParams p = params_of(o);
  ChainConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.tau = o.chain_tau;
  cfg.grid_nx = o.nx;
  cfg.grid_ny = o.ny;
  cfg.max_iterates_per_hop = o.max_iterates;
  cfg.workers = o.workers;
  const ChainGraph g = build_chain_graph(p, cfg);
  const ChainSeed seed =
      o.seed == "collar" ? seed_stable_collar(g.grid, cfg.epsilon) : seed_unstable_curve(g.grid, p);
  const ChainRegion region = accessible_set(g, seed);
  Table t{base_meta("chain", p), {"x_center", "y_center", "member"}, {}};
  t.meta.push_back({"epsilon", cfg.epsilon});
  t.meta.push_back({"tau", cfg.tau});
  t.meta.push_back({"grid_nx", static_cast<long long>(cfg.grid_nx)});
  t.meta.push_back({"grid_ny", static_cast<long long>(cfg.grid_ny)});
  t.meta.push_back({"seed", seed.description});
  t.meta.push_back({"members", static_cast<long long>(region.count())});
  t.meta.push_back({"note", std::string("approximates the chain-accessible set B_lambda, not A_lambda")});
  t.rows_key = "cells";
  for (int col = 0; col < g.grid.nx(); ++col)
    for (int row = 0; row < g.grid.ny(); ++row)
      t.rows.push_back({g.grid.x_center(col), g.grid.y_center(row),
                        static_cast<long long>(region.contains(g.grid.index(col, row)))});
  return t;
}

/// Principal-branch data on an (ell, lambda) grid, lambda log-spaced; rows
/// sorted by (ell, lambda).
inline Table cmd_scan(const Options& o) {
  const ModelParams p0 = params_of(o);
  const int lo = o.ell_from > 0 ? o.ell_from : o.ell;
  const int hi = o.ell_to > 0 ? o.ell_to : lo;
  if (hi < lo) throw UsageError("--ell-to must be >= --ell-from");
  if (!(o.lambda_from > 0 && o.lambda_from <= o.lambda_to && o.lambda_to < 1))
    throw UsageError("need 0 < --lambda-from <= --lambda-to < 1");
  if (o.lambda_steps < 1) throw UsageError("--lambda-steps must be >= 1");
  Table t{base_meta("scan", p0), {"ell", "lambda", "exists", "trace", "det", "stability", "chi_s", "chi_u"}, {}};
  t.meta.push_back({"lambda_from", o.lambda_from});
  t.meta.push_back({"lambda_to", o.lambda_to});
  t.meta.push_back({"lambda_steps", static_cast<long long>(o.lambda_steps)});
  t.meta.push_back({"branch", std::string("principal")});
  const std::size_t nl = static_cast<std::size_t>(o.lambda_steps);
  const std::size_t total = static_cast<std::size_t>(hi - lo + 1) * nl;
  std::vector<std::vector<Cell>> rows(total);
  parallel_for(
      total,
      [&](std::size_t i) {
        const int ell = lo + static_cast<int>(i / nl);
        const std::size_t k = i % nl;
        const double lam = nl == 1 ? o.lambda_from
                                   : o.lambda_from * std::pow(o.lambda_to / o.lambda_from,
                                                              static_cast<double>(k) / static_cast<double>(nl - 1));
        const ModelParams p = p0.with_lambda(lam);
        const auto fp = principal_fixed_point(p, ell);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (!fp) {
          rows[i] = {static_cast<long long>(ell), lam, false, nan, nan, std::string("none"), nan, nan};
          return;
        }
        const EigenData ed = eigen_data(*fp, p);
        const LyapunovData ly = lyapunov_fixed_point(*fp, p);
        rows[i] = {static_cast<long long>(ell), lam, true, ed.trace, ed.det, std::string(to_string(ed.stability)),
                   ly.chi_s, ly.chi_u};
      },
      o.workers ? o.workers : std::thread::hardware_concurrency());
  t.rows = std::move(rows);
  return t;
}

// ------------------------------------------------------------------ dispatch

inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::InvalidParams:
    case Errc::InvalidIndex:
    case Errc::RangeInvalid:
    case Errc::ResolutionTooCoarse:
    case Errc::EmptySeed:
      return 2;
    default:
      return 3;
  }
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Return-map model of a Bykov heteroclinic cycle"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);
  Options o;

  const auto add_params = [&](CLI::App* sc, bool need_lambda) {
    sc->add_option("--C1", o.C1, "contracting rate at sigma1")->required();
    sc->add_option("--E1", o.E1, "expanding rate at sigma1")->required();
    sc->add_option("--C2", o.C2, "contracting rate at sigma2")->required();
    sc->add_option("--E2", o.E2, "expanding rate at sigma2")->required();
    auto* l = sc->add_option("--lambda", o.lambda, "perturbation size, 0 <= lambda < 1");
    if (need_lambda) l->required();
    sc->add_option("--out", o.out, "output path (default stdout)");
    sc->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--workers", o.workers, "worker threads (0: all cores)");
  };

  auto* fp = app.add_subcommand("fixed-points", "fixed points p_ell and their eigen data");
  add_params(fp, true);
  fp->add_option("--ell", o.ell)->required();

  auto* th = app.add_subcommand("thresholds", "bifurcation thresholds a < b < c < d");
  add_params(th, false);
  th->add_option("--ell", o.ell);
  th->add_option("--ell-from", o.ell_from);
  th->add_option("--ell-to", o.ell_to);
  th->add_option("--precision", o.precision)->check(CLI::IsMember({"double", "extended", "auto"}));

  auto* es = app.add_subcommand("eigen-scan", "eigen data of the principal p_ell over an ell range");
  add_params(es, true);
  es->add_option("--ell-from", o.ell_from)->required();
  es->add_option("--ell-to", o.ell_to)->required();

  auto* ly = app.add_subcommand("lyapunov", "Lyapunov exponents at fixed points or along an orbit");
  add_params(ly, true);
  auto* ly_ell = ly->add_option("--ell", o.ell);
  auto* ly_x = ly->add_option("--x", o.x);
  auto* ly_y = ly->add_option("--y", o.y);
  ly->add_option("--steps", o.steps);
  ly->add_option("--renorm", o.renorm);
  ly->add_option("--warmup", o.warmup);
  ly_x->needs(ly_y);
  ly_y->needs(ly_x);
  ly_ell->excludes(ly_x);

  auto* ob = app.add_subcommand("orbit", "iterate the return map");
  add_params(ob, true);
  ob->add_option("--x", o.x)->required();
  ob->add_option("--y", o.y)->required();
  ob->add_option("--steps", o.steps);

  auto* fl = app.add_subcommand("flow", "reconstruct one return of the flow");
  add_params(fl, true);
  fl->add_option("--x", o.x)->required();
  fl->add_option("--y", o.y)->required();
  fl->add_option("--dt", o.dt);

  auto* sp = app.add_subcommand("strips", "horizontal strips and crossing checks");
  add_params(sp, true);
  sp->add_option("--center", o.center);
  sp->add_option("--tau", o.tau);
  sp->add_option("--n-from", o.n_from);
  sp->add_option("--n-to", o.n_to);

  auto* pu = app.add_subcommand("pulses", "n-pulse roots on the unstable curve");
  add_params(pu, true);
  pu->add_option("--n", o.n);
  pu->add_option("--x-lo", o.x_lo);
  pu->add_option("--x-hi", o.x_hi);
  pu->add_option("--residual-tol", o.residual_tol);

  auto* tg = app.add_subcommand("tangencies", "parameters where two n-pulses merge");
  add_params(tg, false);
  tg->add_option("--n", o.n);
  tg->add_option("--lambda-lo", o.lambda_lo);
  tg->add_option("--lambda-hi", o.lambda_hi);

  auto* ch = app.add_subcommand("chain", "epsilon-chain accessible region");
  add_params(ch, true);
  ch->add_option("--epsilon", o.epsilon);
  ch->add_option("--tau", o.chain_tau);
  ch->add_option("--nx", o.nx);
  ch->add_option("--ny", o.ny);
  ch->add_option("--max-iterates", o.max_iterates);
  ch->add_option("--seed", o.seed)->check(CLI::IsMember({"curve", "collar"}));

  auto* sc = app.add_subcommand("scan", "principal fixed point over an (ell, lambda) grid");
  add_params(sc, false);
  sc->add_option("--ell", o.ell);
  sc->add_option("--ell-from", o.ell_from);
  sc->add_option("--ell-to", o.ell_to);
  sc->add_option("--lambda-from", o.lambda_from);
  sc->add_option("--lambda-to", o.lambda_to);
  sc->add_option("--lambda-steps", o.lambda_steps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  Table table;
  try {
    if (fp->parsed()) table = cmd_fixed_points(o);
    else if (th->parsed()) table = cmd_thresholds(o);
    else if (es->parsed()) table = cmd_eigen_scan(o);
    else if (ly->parsed()) table = cmd_lyapunov(o, ly_x->count() > 0);
    else if (ob->parsed()) table = cmd_orbit(o);
    else if (fl->parsed()) table = cmd_flow(o);
    else if (sp->parsed()) table = cmd_strips(o);
    else if (pu->parsed()) table = cmd_pulses(o);
    else if (tg->parsed()) table = cmd_tangencies(o);
    else if (ch->parsed()) table = cmd_chain(o);
    else table = cmd_scan(o);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << (code == 2 ? "usage error: " : "computation error: ") << e.what() << "\n";
    return code;
  }

  const std::string body = o.format == "json" ? render_json(table) : render_csv(table);
  if (o.out.empty()) {
    out << body;
    return 0;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) {
    err << "io error: cannot open " << o.out << " for writing: " << std::strerror(errno) << "\n";
    return 3;
  }
  f << body;
  f.close();
  if (!f) {
    err << "io error: write to " << o.out << " failed: " << std::strerror(errno) << "\n";
    return 3;
  }
  return 0;
}

}  // namespace bykov::cli
