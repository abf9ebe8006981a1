#include "fluxlab/runner.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace fluxlab {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "fluxlab 1.0.0";
constexpr double kPi = 3.14159265358979323846;

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> k = {
      "spectral-flow", "index",      "verify",     "bulk-edge",
      "classify",      "zero-modes", "gauge-check"};
  return k;
}

const std::set<std::string>& known_models() {
  static const std::set<std::string> k = {"harper", "p_ip", "d_id",
                                          "wilson_dirac", "km_double"};
  return k;
}

Boundary parse_boundary(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic_x") return Boundary::periodic_x;
  if (s == "periodic_xy") return Boundary::periodic_xy;
  throw ConfigError("unknown boundary '" + s + "'");
}

FluxGauge parse_flux_gauge(const std::string& s) {
  if (s == "ab") return FluxGauge::ab;
  if (s == "half_line") return FluxGauge::half_line;
  throw ConfigError("unknown gauge '" + s + "'");
}

std::string ops_kind_for(const std::string& model, const json& params) {
  if (model == "harper") return "spinless";
  if (model == "p_ip" || model == "d_id") return "bdg";
  if (model == "wilson_dirac") return "majorana";
  if (model == "km_double") {
    const std::string block = params.value("block", std::string("wilson_dirac"));
    return block == "p_ip" ? "bdg_doubled" : "doubled";
  }
  return "none";
}

int eta_for(const std::string& model) { return model == "d_id" ? -1 : +1; }

LatticeSpace space_for(const ExperimentConfig& c) {
  const HoppingSpec hs = named_model_hoppings(c.model, c.params);
  return build_lattice(c.x_min, c.x_max, c.y_min, c.y_max, hs.fiber(),
                       parse_boundary(c.boundary));
}

json params_with_disorder(const ExperimentConfig& c, std::uint64_t seed) {
  json p = c.params;
  if (c.disorder_w > 0.0) {
    p["disorder_w"] = c.disorder_w;
    p["seed"] = static_cast<double>(seed);
  }
  return p;
}

FluxFamily family_for(const ExperimentConfig& c, std::uint64_t seed) {
  const LatticeSpace space = space_for(c);
  const FluxGauge fg = parse_flux_gauge(c.gauge);
  if (c.flux_cells.size() > 1) {
    const FluxFamily base = named_model(c.model, params_with_disorder(c, seed),
                                        space, fg, {c.flux_cells.front()});
    return multi_flux_family(base, c.flux_cells);
  }
  return named_model(c.model, params_with_disorder(c, seed), space, fg,
                     c.flux_cells);
}

std::vector<double> alpha_grid_for(const ExperimentConfig& c) {
  std::vector<double> grid(c.alpha_points);
  for (int i = 0; i < c.alpha_points; ++i) {
    grid[i] = static_cast<double>(i) / (c.alpha_points - 1);
  }
  return grid;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name,
                    std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
  out << content;
}

json crossing_json(const Crossing& c) {
  return json{{"alpha", c.alpha},
              {"direction", c.direction},
              {"weight", c.weight},
              {"eigenvalue", c.eigenvalue}};
}

// ---- per-kind execution -------------------------------------------------

json run_spectral_flow(const ExperimentConfig& c, std::string& status,
                       std::string& diagnostic) {
  const FluxFamily family = family_for(c, c.seed_base);
  const double loc =
      default_flux_radius(family.space, family.cells.front());
  const std::vector<double> grid = alpha_grid_for(c);
  const SpectralFlowResult flow =
      spectral_flow(family, grid, c.mu, c.window_delta, loc);
  json res;
  res["raw"] = flow.raw;
  res["localized"] = flow.localized;
  res["evaluations"] = flow.evaluations;
  res["loc_radius"] = loc;
  res["crossings"] = json::array();
  for (const Crossing& cr : flow.crossings) {
    res["crossings"].push_back(crossing_json(cr));
  }

  // spectral curves near mu for plotting, one row per (alpha, state)
  if (!c.out_dir.empty()) {
    const int ncurves = std::min<int>(12, static_cast<int>(family.dim()));
    std::ostringstream csv;
    csv << "alpha,index,energy,localization_weight\n";
    for (double a : grid) {
      const arma::cx_mat H = family.build(a);
      const arma::vec ev = eigenvalues_only(H);
      const arma::uvec order = arma::sort_index(arma::abs(ev - c.mu));
      arma::vec sel(ncurves);
      for (int k = 0; k < ncurves; ++k) sel(k) = ev(order(k));
      const SpectrumResult win =
          diagonalize_window(H, sel.min() - 1e-9, sel.max() + 1e-9, true);
      const arma::uvec near =
          arma::sort_index(arma::abs(win.eigenvalues - c.mu));
      arma::uvec keep =
          arma::sort(near.head(std::min<arma::uword>(ncurves, near.n_elem)));
      for (arma::uword k = 0; k < keep.n_elem; ++k) {
        const arma::uword j = keep(k);
        csv << round_sig(a) << "," << k << ","
            << round_sig(win.eigenvalues(j)) << ","
            << round_sig(flux_mass(win.eigenvectors.col(j), family, loc))
            << "\n";
      }
    }
    write_file(c.out_dir, "curves.csv", csv.str());
  }
  (void)status;
  (void)diagnostic;
  return res;
}

json run_index(const ExperimentConfig& c, std::string& status,
               std::string& diagnostic) {
  const FluxFamily family = family_for(c, c.seed_base);
  const SpectrumResult spec = diagonalize(family.build(0.0));
  const FermiProjection proj = fermi_projection(spec, c.mu);
  const IndexReport rep =
      index_pfp(proj.occupied, family.space, family.cells.front());
  json res;
  res["index"] = rep.index;
  res["kernel"] = rep.kernel;
  res["cokernel"] = rep.cokernel;
  res["excluded"] = rep.excluded;
  res["sigma_floor"] = rep.sigma_floor;
  res["tiny_sigmas"] = rep.tiny_sigmas;
  res["kernel_masses"] = rep.kernel_masses;
  res["cokernel_masses"] = rep.cokernel_masses;
  res["occupied_rank"] = proj.rank;
  if (rep.excluded > 0) {
    status = "indeterminate";
    diagnostic = "tiny singular vectors without flux localization";
  }
  return res;
}

json run_verify(const ExperimentConfig& c, std::string& status,
                std::string& diagnostic) {
  const FluxFamily family = family_for(c, c.seed_base);
  const double loc =
      default_flux_radius(family.space, family.cells.front());
  const VerifyReport rep = verify_sf_equals_index(family, c.mu, c.window_delta,
                                                  loc, c.alpha_points);
  json res;
  res["sf_localized"] = rep.sf_localized;
  res["ind_pfp"] = rep.index;
  res["chern_rounded"] = rep.chern_rounded;
  res["chern_value"] = rep.chern_value;
  res["chern_residual"] = rep.chern_residual;
  res["agree"] = rep.agree;
  if (!rep.agree) {
    status = "violation";
    diagnostic = "spectral flow, index, and Chern number disagree";
  }
  return res;
}

json run_bulk_edge(const ExperimentConfig& c, std::string& status,
                   std::string& diagnostic) {
  if (parse_boundary(c.boundary) != Boundary::periodic_x) {
    throw ConfigError("bulk-edge requires boundary periodic_x (strip)");
  }
  const LatticeSpace space = space_for(c);
  SwitchFunction sw;
  if (c.window_delta > 0) {
    sw = make_switch(c.mu - c.window_delta, c.mu + c.window_delta, 5);
  } else {
    const double gap = named_model_bulk_gap(c.model, c.params);
    if (!(gap > 0)) {
      throw ConfigError("bulk-edge: model has no gap about 0; set window_delta");
    }
    sw = gap_switch(gap);
  }
  auto make_disordered = [&](std::uint64_t seed) {
    return named_model(c.model, params_with_disorder(c, seed), space,
                       parse_flux_gauge(c.gauge), c.flux_cells)
        .build(0.0);
  };
  std::vector<std::uint64_t> seeds;
  const int nseeds = (c.disorder_w > 0.0) ? c.seeds : 1;
  for (int i = 0; i < nseeds; ++i) seeds.push_back(c.seed_base + i);
  const AveragedCurrent avg =
      averaged_edge_current(make_disordered, space, sw, seeds);

  // clean reference and per-site map
  json clean_params = c.params;
  const arma::cx_mat H0 =
      named_model(c.model, clean_params, space, parse_flux_gauge(c.gauge),
                  c.flux_cells)
          .build(0.0);
  const int mid_col = c.x_min + space.nx() / 2;
  const double clean_bottom = edge_current(H0, space, sw, mid_col, true);
  const double clean_top = edge_current(H0, space, sw, mid_col, false);

  if (!c.out_dir.empty()) {
    const arma::vec summand = edge_current_summand(H0, space, sw);
    std::ostringstream csv;
    csv << "x,y,value\n";
    for (int x = space.x_min; x <= space.x_max; ++x) {
      for (int y = space.y_min; y <= space.y_max; ++y) {
        double site = 0.0;
        for (int l = 0; l < space.orbitals; ++l) {
          site += summand(space.flatten(x, y, l));
        }
        csv << x << "," << y << "," << round_sig(site) << "\n";
      }
    }
    write_file(c.out_dir, "current_map.csv", csv.str());
  }

  json res;
  res["mean_bottom"] = avg.mean;
  res["stderr"] = avg.stderr_mean;
  res["per_seed"] = avg.per_seed;
  res["clean_bottom"] = clean_bottom;
  res["clean_top"] = clean_top;
  res["two_pi_times_mean"] = 2.0 * kPi * avg.mean;
  (void)status;
  (void)diagnostic;
  return res;
}

json run_classify(const ExperimentConfig& c, std::string& status,
                  std::string& diagnostic) {
  const FluxFamily family = family_for(c, c.seed_base);
  const SymmetryOps ops = standard_symmetry_ops(
      family.space, ops_kind_for(c.model, c.params), eta_for(c.model));
  const SymmetryDetection det = detect_symmetries(family.build(0.0), ops);
  const InvariantReport inv = strong_invariant(family, ops, c.mu);
  json res;
  res["caz"] = to_string(inv.caz);
  res["invariant_kind"] = inv.kind;
  res["value"] = inv.value;
  res["valid"] = inv.valid;
  res["has_trs"] = det.has_trs;
  res["has_phs"] = det.has_phs;
  res["has_sls"] = det.has_sls;
  res["trs_sign"] = det.trs_sign;
  res["phs_sign"] = det.phs_sign;
  res["trs_residual"] = det.trs_residual;
  res["phs_residual"] = det.phs_residual;
  res["sls_residual"] = det.sls_residual;
  if (!inv.valid) {
    status = "violation";
    diagnostic = "invariant inconsistent with symmetry class";
  }
  return res;
}

json run_zero_modes(const ExperimentConfig& c, std::string& status,
                    std::string& diagnostic) {
  const FluxFamily family = family_for(c, c.seed_base);
  double cap = c.window_delta;
  if (cap <= 0) {
    if (!(family.bulk_gap > 0)) {
      throw ConfigError("zero-modes: model has no gap about 0; set window_delta");
    }
    cap = family.bulk_gap / 5.0;
  }
  const double loc =
      default_flux_radius(family.space, family.cells.front());
  const SymmetryOps ops = standard_symmetry_ops(
      family.space, ops_kind_for(c.model, c.params), eta_for(c.model));
  const ZeroModeReport rep = half_flux_zero_modes(family, ops, cap, loc);
  json res;
  res["caz"] = to_string(rep.caz);
  res["dim_raw"] = rep.kernel.dim_raw;
  res["dim_localized"] = rep.kernel.dim_localized;
  res["parity"] = rep.kernel.parity;
  res["cluster_edge"] = rep.kernel.cluster_edge;
  res["first_outside"] = rep.kernel.first_outside;
  res["smallest_abs_eigenvalue"] = rep.smallest_abs_eigenvalue;
  res["doublet_splitting"] = rep.doublet_splitting;
  res["protected_expected"] = rep.protected_expected;
  res["consistent"] = rep.consistent;
  if (!rep.consistent) {
    status = "violation";
    diagnostic = "half-flux kernel inconsistent with symmetry class";
  }
  return res;
}

json run_gauge_check(const ExperimentConfig& c, std::string& status,
                     std::string& diagnostic) {
  LatticeSpace space = build_lattice(c.x_min, c.x_max, c.y_min, c.y_max, 1,
                                     parse_boundary(c.boundary));
  const Cell m = c.flux_cells.front();
  if (!space.contains(m.first, m.second) ||
      !space.contains(m.first + 1, m.second + 1)) {
    throw ConfigError("gauge-check: flux cell outside the lattice");
  }
  const double alpha = 0.37;
  const MagneticPotential A_ab = ab_gauge(alpha, m);
  const MagneticPotential A_hl = half_line_gauge(alpha, m);

  double hol_ab = 0.0, hol_hl = 0.0;
  for (int x = space.x_min; x < space.x_max; ++x) {
    for (int y = space.y_min; y < space.y_max; ++y) {
      const double target =
          (x == m.first && y == m.second) ? 2.0 * kPi * alpha : 0.0;
      hol_ab = std::max(hol_ab, std::abs(holonomy(A_ab, x, y) - target));
      hol_hl = std::max(hol_hl, std::abs(holonomy(A_hl, x, y) - target));
    }
  }

  // the solved gauge function must match the closed form up to a constant
  const GaugeFunction G = gauge_transform_solve(A_ab, A_hl, space);
  double lo = arma::datum::inf, hi = -arma::datum::inf;
  for (int x = space.x_min; x <= space.x_max; ++x) {
    for (int y = space.y_min; y <= space.y_max; ++y) {
      const double d = G(x, y) + alpha * flux_gauge_function(x, y, m);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  const double gauge_residual = hi - lo;

  // uniform field: both gauges produce the same per-cell holonomy
  const double B = 0.3;
  const MagneticPotential A_sym = uniform_field_gauge(B, FieldGauge::symmetric);
  const MagneticPotential A_lan = uniform_field_gauge(B, FieldGauge::landau);
  double hol_field = 0.0;
  for (int x = space.x_min; x < space.x_max; ++x) {
    for (int y = space.y_min; y < space.y_max; ++y) {
      hol_field = std::max(hol_field, std::abs(holonomy(A_sym, x, y) - B));
      hol_field = std::max(hol_field, std::abs(holonomy(A_lan, x, y) - B));
    }
  }
  gauge_transform_solve(A_sym, A_lan, space);  // throws if not equivalent

  json res;
  res["holonomy_ab_residual"] = hol_ab;
  res["holonomy_halfline_residual"] = hol_hl;
  res["gauge_function_residual"] = gauge_residual;
  res["field_holonomy_residual"] = hol_field;
  const bool pass =
      hol_ab < 1e-12 && hol_hl < 1e-12 && gauge_residual < 1e-9 &&
      hol_field < 1e-12;
  res["pass"] = pass;
  if (!pass) {
    status = "violation";
    diagnostic = "gauge identity residual above tolerance";
  }
  return res;
}

json execute(const ExperimentConfig& c, std::string& status,
             std::string& diagnostic) {
  if (c.kind == "spectral-flow") return run_spectral_flow(c, status, diagnostic);
  if (c.kind == "index") return run_index(c, status, diagnostic);
  if (c.kind == "verify") return run_verify(c, status, diagnostic);
  if (c.kind == "bulk-edge") return run_bulk_edge(c, status, diagnostic);
  if (c.kind == "classify") return run_classify(c, status, diagnostic);
  if (c.kind == "zero-modes") return run_zero_modes(c, status, diagnostic);
  if (c.kind == "gauge-check") return run_gauge_check(c, status, diagnostic);
  throw ConfigError("unknown experiment kind '" + c.kind + "'");
}

void write_outputs(const ExperimentConfig& c, const json& doc) {
  if (c.out_dir.empty()) return;
  write_file(c.out_dir, "result.json", doc.dump(2) + "\n");
  std::ostringstream log;
  log << kVersion << "\n"
      << "kind: " << c.kind << "\n"
      << "status: " << doc.value("status", std::string("?")) << "\n"
      << "config: " << doc.at("config").dump() << "\n";
  write_file(c.out_dir, "run.log", log.str());
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys = {
      "kind",        "model",       "params",     "x_min",     "x_max",
      "y_min",       "y_max",       "boundary",   "flux_cells", "gauge",
      "alpha_points", "mu",         "window_delta", "disorder_w", "seeds",
      "seed_base",   "out_dir"};
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  ExperimentConfig c;
  try {
    if (!j.contains("kind")) throw ConfigError("missing required key 'kind'");
    c.kind = j.at("kind").get<std::string>();
    c.model = j.value("model", c.model);
    c.params = j.value("params", c.params);
    c.x_min = j.value("x_min", c.x_min);
    c.x_max = j.value("x_max", c.x_max);
    c.y_min = j.value("y_min", c.y_min);
    c.y_max = j.value("y_max", c.y_max);
    c.boundary = j.value("boundary", c.boundary);
    c.gauge = j.value("gauge", c.gauge);
    c.alpha_points = j.value("alpha_points", c.alpha_points);
    c.mu = j.value("mu", c.mu);
    c.window_delta = j.value("window_delta", c.window_delta);
    c.disorder_w = j.value("disorder_w", c.disorder_w);
    c.seeds = j.value("seeds", c.seeds);
    c.seed_base = j.value("seed_base", c.seed_base);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("flux_cells")) {
      c.flux_cells.clear();
      for (const auto& cell : j.at("flux_cells")) {
        if (!cell.is_array() || cell.size() != 2) {
          throw ConfigError("flux_cells entries must be [mx, my]");
        }
        c.flux_cells.push_back({cell.at(0).get<int>(), cell.at(1).get<int>()});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!known_kinds().count(c.kind)) {
    throw ConfigError("unknown experiment kind '" + c.kind + "'");
  }
  if (!known_models().count(c.model)) {
    throw ConfigError("unknown model '" + c.model + "'");
  }
  if (!c.params.is_object()) throw ConfigError("params must be an object");
  parse_boundary(c.boundary);
  parse_flux_gauge(c.gauge);
  if (c.x_min >= c.x_max || c.y_min >= c.y_max) {
    throw ConfigError("lattice extents must satisfy min < max");
  }
  if (c.alpha_points < 2) throw ConfigError("alpha_points must be >= 2");
  if (c.disorder_w < 0) throw ConfigError("disorder_w must be >= 0");
  if (c.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (c.flux_cells.empty()) throw ConfigError("flux_cells must be nonempty");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = c.kind;
  j["model"] = c.model;
  j["params"] = c.params;
  j["x_min"] = c.x_min;
  j["x_max"] = c.x_max;
  j["y_min"] = c.y_min;
  j["y_max"] = c.y_max;
  j["boundary"] = c.boundary;
  json cells = json::array();
  for (const Cell& m : c.flux_cells) cells.push_back({m.first, m.second});
  j["flux_cells"] = cells;
  j["gauge"] = c.gauge;
  j["alpha_points"] = c.alpha_points;
  j["mu"] = c.mu;
  j["window_delta"] = c.window_delta;
  j["disorder_w"] = c.disorder_w;
  j["seeds"] = c.seeds;
  j["seed_base"] = c.seed_base;
  j["out_dir"] = c.out_dir;
  return j;
}

json config_schema() {
  json s;
  s["kind"] = {{"type", "string"},
               {"required", true},
               {"enum", json(known_kinds())}};
  s["model"] = {{"type", "string"},
                {"default", "p_ip"},
                {"enum", json(known_models())}};
  s["params"] = {{"type", "object"},
                 {"default", json::object()},
                 {"doc", "model parameters; disorder_w/seed/lambda_dis common"}};
  s["x_min"] = {{"type", "int"}, {"default", -8}};
  s["x_max"] = {{"type", "int"}, {"default", 7}};
  s["y_min"] = {{"type", "int"}, {"default", -8}};
  s["y_max"] = {{"type", "int"}, {"default", 7}};
  s["boundary"] = {{"type", "string"},
                   {"default", "open"},
                   {"enum", {"open", "periodic_x", "periodic_xy"}}};
  s["flux_cells"] = {{"type", "array of [int,int]"}, {"default", {{-1, -1}}}};
  s["gauge"] = {{"type", "string"},
                {"default", "ab"},
                {"enum", {"ab", "half_line"}}};
  s["alpha_points"] = {{"type", "int"}, {"default", 41}};
  s["mu"] = {{"type", "number"}, {"default", 0.0}};
  s["window_delta"] = {{"type", "number"},
                       {"default", -1.0},
                       {"doc", "<= 0 derives the window from the model gap"}};
  s["disorder_w"] = {{"type", "number"}, {"default", 0.0}};
  s["seeds"] = {{"type", "int"}, {"default", 1}};
  s["seed_base"] = {{"type", "int"}, {"default", 1000}};
  s["out_dir"] = {{"type", "string"},
                  {"default", "."},
                  {"doc", "empty string disables file output"}};
  return s;
}

json run_experiment(const ExperimentConfig& config) {
  json doc;
  doc["version"] = kVersion;
  doc["kind"] = config.kind;
  doc["config"] = config_to_json(config);
  std::string status = "ok";
  std::string diagnostic;
  json res;
  try {
    res = execute(config, status, diagnostic);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvariantViolation& e) {
    doc["status"] = "violation";
    doc["error"] = e.what();
    doc = round_json(doc);
    write_outputs(config, doc);
    throw;
  } catch (const std::exception& e) {
    doc["status"] = "indeterminate";
    doc["error"] = e.what();
    doc = round_json(doc);
    write_outputs(config, doc);
    throw IndeterminateError(e.what());
  }
  doc["result"] = res;
  doc["status"] = status;
  if (!diagnostic.empty()) doc["diagnostic"] = diagnostic;
  doc = round_json(doc);
  write_outputs(config, doc);
  return doc;
}

json sweep_experiment(const ExperimentConfig& config, const std::string& axis,
                      const std::vector<double>& values, int workers) {
  if (axis.empty()) throw ConfigError("sweep axis must be named");
  auto apply_axis = [&](ExperimentConfig c, double v) {
    c.out_dir.clear();
    if (axis == "size") {
      const int n = static_cast<int>(std::lround(v));
      if (n < 4 || n % 2 != 0) {
        throw ConfigError("size axis values must be even and >= 4");
      }
      c.x_min = -n / 2;
      c.x_max = n / 2 - 1;
      c.y_min = -n / 2;
      c.y_max = n / 2 - 1;
    } else if (axis == "disorder_w") {
      c.disorder_w = v;
    } else if (axis == "mu_level") {
      c.mu = v;
    } else {
      c.params[axis] = v;
    }
    return c;
  };

  std::vector<json> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) break;
      json row;
      row["axis"] = axis;
      row["value"] = values[i];
      try {
        const ExperimentConfig c = apply_axis(config, values[i]);
        const json doc = run_experiment(c);
        row["status"] = doc.at("status");
        for (const auto& item : doc.at("result").items()) {
          if (item.value().is_primitive()) row[item.key()] = item.value();
        }
      } catch (const std::exception& e) {
        row["status"] = "error";
        row["error"] = e.what();
      }
      rows[i] = std::move(row);
    }
  };
  const int nw =
      std::max(1, std::min(workers, static_cast<int>(values.size())));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  json doc;
  doc["version"] = kVersion;
  doc["kind"] = "sweep";
  doc["axis"] = axis;
  doc["config"] = config_to_json(config);
  doc["rows"] = rows;
  doc = round_json(doc);

  if (!config.out_dir.empty()) {
    // union of scalar keys, alphabetical, for the CSV header
    std::set<std::string> cols;
    for (const json& row : doc.at("rows")) {
      for (const auto& item : row.items()) {
        if (item.value().is_primitive()) cols.insert(item.key());
      }
    }
    std::ostringstream csv;
    bool first = true;
    for (const std::string& k : cols) {
      csv << (first ? "" : ",") << k;
      first = false;
    }
    csv << "\n";
    for (const json& row : doc.at("rows")) {
      first = true;
      for (const std::string& k : cols) {
        csv << (first ? "" : ",");
        first = false;
        if (row.contains(k)) {
          const json& v = row.at(k);
          if (v.is_string()) {
            csv << v.get<std::string>();
          } else {
            csv << v.dump();
          }
        }
      }
      csv << "\n";
    }
    write_file(config.out_dir, "sweep.csv", csv.str());
    write_file(config.out_dir, "sweep.json", doc.dump(2) + "\n");
  }
  return doc;
}

double round_sig(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

json round_json(const json& j, int digits) {
  if (j.is_number_float()) return round_sig(j.get<double>(), digits);
  if (j.is_object()) {
    json out = json::object();
    for (const auto& item : j.items()) {
      out[item.key()] = round_json(item.value(), digits);
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(round_json(e, digits));
    return out;
  }
  return j;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"flux-tube spectral-flow and index laboratory"};
  app.require_subcommand(1);
  std::string config_path, out_dir, axis, values_str;
  int seeds = -1;
  int workers = 1;
  bool quiet = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seeds", seeds, "override the seed count");
    sub->add_option("--workers", workers, "worker pool size");
    sub->add_flag("--quiet", quiet, "suppress the summary line");
  };
  CLI::App* cmd_run = app.add_subcommand("run", "execute one experiment");
  add_common(cmd_run);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep a numeric parameter");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--axis", axis, "parameter name")->required();
  cmd_sweep->add_option("--values", values_str, "comma-separated values")
      ->required();
  CLI::App* cmd_models =
      app.add_subcommand("list-models", "print the model catalog");
  CLI::App* cmd_schema =
      app.add_subcommand("schema", "print the config schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_models->parsed()) {
      json cat;
      cat["harper"] = {{"B", "flux per cell (default 2*pi/3)"},
                       {"mu", "on-site energy (default 0)"}};
      cat["p_ip"] = {{"mu", "chemical potential (default 2)"},
                     {"delta", "pairing strength (default 1)"}};
      cat["d_id"] = {{"mu", "chemical potential (default 2)"},
                     {"delta", "pairing strength (default 0.5)"}};
      cat["wilson_dirac"] = {{"mu", "mass (default 2)"},
                             {"lambda", "Wilson coupling (default 1)"}};
      cat["km_double"] = {
          {"block", "wilson_dirac (default) or p_ip"},
          {"gamma", "time-reversal-odd interblock coupling (default 0)"},
          {"mu", "block parameter"},
          {"lambda", "block parameter (wilson_dirac)"},
          {"delta", "block parameter (p_ip)"}};
      json common = {{"disorder_w", "uniform disorder amplitude"},
                     {"seed", "disorder seed"},
                     {"lambda_dis", "disorder coupling scale (default 1)"}};
      json out = {{"models", cat}, {"common_params", common}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (cmd_schema->parsed()) {
      std::cout << config_schema().dump(2) << "\n";
      return 0;
    }

    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file " + config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg = parse_config(j);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seeds > 0) cfg.seeds = seeds;

    if (cmd_run->parsed()) {
      const json doc = run_experiment(cfg);
      const std::string status = doc.at("status").get<std::string>();
      if (!quiet) {
        std::cout << cfg.kind << ": " << status;
        if (doc.contains("diagnostic")) {
          std::cout << " (" << doc.at("diagnostic").get<std::string>() << ")";
        }
        std::cout << "\n";
      }
      if (status == "ok") return 0;
      return status == "violation" ? 4 : 3;
    }

    // sweep
    std::vector<double> values;
    std::stringstream ss(values_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        throw ConfigError("sweep value '" + tok + "' is not a number");
      }
      if (pos != tok.size()) {
        throw ConfigError("sweep value '" + tok + "' is not a number");
      }
      values.push_back(v);
    }
    const json doc = sweep_experiment(cfg, axis, values, workers);
    if (!quiet) {
      std::cout << "sweep " << axis << ": " << doc.at("rows").size()
                << " points\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const IndeterminateError& e) {
    std::cerr << "indeterminate: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fluxlab
