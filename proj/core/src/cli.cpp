#include "gapmode/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gapmode/config.hpp"
#include "gapmode/errors.hpp"
#include "gapmode/oracle.hpp"
#include "gapmode/pipeline.hpp"
#include "gapmode/report.hpp"
#include "gapmode/version.hpp"

namespace gapmode {

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<double> kx0;
  std::optional<int> cells;
  std::optional<int> order;
  std::optional<int> bands;
  std::optional<std::string> grid;
  std::optional<double> tol_cross;
  std::string amplitudes;
  std::string cell_list = "11,15,19";
  std::string order_list = "4,6,8";
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw ConfigError("empty numeric list: \"" + s + "\"");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

RunConfig load_config(const CommonArgs& a) {
  RunConfig cfg = RunConfig::from_file(a.config_path);
  if (a.kx0) {
    cfg.kx0 = *a.kx0;
    cfg.kx0_set = true;
  }
  if (a.cells) cfg.n_cells = *a.cells;
  if (a.order) cfg.half_order = *a.order;
  if (a.bands) cfg.n_bands = *a.bands;
  if (a.tol_cross) cfg.crossing.tol_cross = *a.tol_cross;
  if (a.grid) {
    auto x = a.grid->find('x');
    if (x == std::string::npos) throw ConfigError("--grid must be AxB");
    cfg.grid_a = std::stoi(a.grid->substr(0, x));
    cfg.grid_b = std::stoi(a.grid->substr(x + 1));
  }
  return cfg;
}

PipelineOptions pipeline_options(const RunConfig& cfg) {
  PipelineOptions opt;
  opt.k_grid_a = cfg.grid_a;
  opt.k_grid_b = cfg.grid_b;
  opt.n_bands = cfg.n_bands;
  opt.gap_index = cfg.gap_index;
  opt.edge = cfg.edge;
  opt.tau = cfg.tau;
  opt.crossing = cfg.crossing;
  opt.tol_couple = cfg.tol_couple;
  return opt;
}

Json report_header(const RunConfig& cfg) {
  Json j = Json::object();
  j.set("tool", "gapmode");
  j.set("version", kVersion);
  j.set("config_hash", cfg.config_hash);
  return j;
}

Json json_gap(const Gap& g) {
  Json j = Json::object();
  j.set("lower", g.lower);
  j.set("upper", g.upper);
  j.set("band_below", g.band_below);
  j.set("band_above", g.band_above);
  j.set("width", g.width());
  return j;
}

Json json_edge(const GapEdge& e) {
  Json j = Json::object();
  j.set("lambda0", e.lambda0);
  j.set("lambda1", e.lambda1);
  j.set("edge_band", e.edge_band);
  j.set("k0x", e.k0x);
  j.set("k0y", e.k0y);
  j.set("alpha", e.alpha);
  j.set("simple_edge", e.simple_edge);
  return j;
}

Json json_norms(const NormBundle& n) {
  Json j = Json::object();
  j.set("ratio_sup", n.ratio_sup);
  j.set("inv_diff_sup", n.inv_diff_sup);
  j.set("inv_diff_weighted", n.inv_diff_weighted);
  j.set("g1_norm_bound", n.g1_norm_bound);
  return j;
}

Json json_condition(const ConditionReport& c) {
  Json j = Json::object();
  j.set("lhs_cond", c.lhs_cond);
  j.set("lhs_cond1", c.lhs_cond1);
  j.set("rhs", c.rhs);
  j.set("cond_satisfied", c.cond_satisfied);
  j.set("cond1_satisfied", c.cond1_satisfied);
  j.set("assumptions_hold", c.assumptions_hold);
  j.set("note",
        c.assumptions_hold
            ? "condition is sufficient, not necessary"
            : "no strict-perturbation witness; localization criterion does not apply");
  return j;
}

Json json_curve(const KappaCurve& c) {
  Json j = Json::object();
  Json mu = Json::array(), kap = Json::array(), nb = Json::array();
  for (double v : c.mu_samples) mu.push(Json::real(v));
  for (double v : c.kappa_values) kap.push(Json::real(v));
  for (int v : c.n_below_minus_one) nb.push(Json::integer(v));
  j.set("mu", std::move(mu));
  j.set("kappa", std::move(kap));
  j.set("n_below_minus_one", std::move(nb));
  return j;
}

int cmd_bands(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  DielectricMap map = cfg.build_map();
  BandStructure bs = compute_bands(map, make_k_grid(cfg.grid_a, cfg.grid_b),
                                   cfg.n_bands, PlaneWaveBasis(cfg.half_order));
  std::string csv = "kx,ky,s,lambda\n";
  for (size_t i = 0; i < bs.k_grid.size(); ++i)
    for (int s = 0; s < bs.bands.cols(); ++s) {
      csv += format_g17(bs.k_grid[i][0]) + "," + format_g17(bs.k_grid[i][1]) +
             "," + std::to_string(s + 1) + "," + format_g17(bs.bands(i, s)) +
             "\n";
    }
  std::string out = a.out_path.empty() ? "bands.csv" : a.out_path;
  write_text_file(out, csv);
  std::cout << "wrote " << out << " (" << bs.k_grid.size() << " k-points, "
            << bs.bands.cols() << " bands)\n";
  return 0;
}

int cmd_gaps(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  DielectricMap map = cfg.build_map();
  BandStructure bs = compute_bands(map, make_k_grid(cfg.grid_a, cfg.grid_b),
                                   cfg.n_bands, PlaneWaveBasis(cfg.half_order));
  std::vector<Gap> gaps = find_gaps(bs);
  Json j = report_header(cfg);
  j.set("grid_a", cfg.grid_a);
  j.set("grid_b", cfg.grid_b);
  j.set("bands", cfg.n_bands);
  Json arr = Json::array();
  for (const Gap& g : gaps) arr.push(json_gap(g));
  j.set("gaps", std::move(arr));
  std::string out = a.out_path.empty() ? "gaps.json" : a.out_path;
  write_text_file(out, j.dump());
  std::cout << "wrote " << out << " (" << gaps.size() << " gaps)\n";
  return 0;
}

int cmd_edge(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("edge requires --kx0 (or kx0 in config)");
  DielectricMap map = cfg.build_map();
  PlaneWaveBasis basis(cfg.half_order);
  auto [gap, edge] = locate_fixture_gap(map, cfg.kx0, pipeline_options(cfg), basis);
  Json j = report_header(cfg);
  j.set("gap", json_gap(gap));
  j.set("edge", json_edge(edge));
  std::string out = a.out_path.empty() ? "edge.json" : a.out_path;
  write_text_file(out, j.dump());
  std::cout << "wrote " << out << " (lambda1 = " << format_g17(edge.lambda1)
            << ")\n";
  return 0;
}

int cmd_check_condition(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("check-condition requires --kx0");
  DielectricMap map = cfg.build_map();
  PlaneWaveBasis basis(cfg.half_order);
  auto [gap, edge] = locate_fixture_gap(map, cfg.kx0, pipeline_options(cfg), basis);
  NormBundle norms = map.compute_norms();
  AssumptionReport ar = map.validate_assumptions();
  ConditionReport cr = check_condition(norms, edge, ar.strict_witness_ok);
  Json j = report_header(cfg);
  j.set("gap", json_gap(gap));
  j.set("edge", json_edge(edge));
  j.set("norms", json_norms(norms));
  j.set("condition", json_condition(cr));
  std::string out = a.out_path.empty() ? "condition.json" : a.out_path;
  write_text_file(out, j.dump());
  std::cout << "wrote " << out << " (cond "
            << (cr.cond_satisfied ? "satisfied" : "not satisfied") << ")\n";
  return 0;
}

int cmd_defect_mode(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("defect-mode requires --kx0");
  DielectricMap map = cfg.build_map();
  PipelineResult pr = run_defect_pipeline(map, cfg.kx0, cfg.n_cells,
                                          cfg.half_order, pipeline_options(cfg));
  Json j = report_header(cfg);
  j.set("gap", json_gap(pr.gap));
  j.set("edge", json_edge(pr.edge));
  j.set("norms", json_norms(pr.norms));
  j.set("condition", json_condition(pr.condition));
  j.set("subspace_rank", pr.subspace_rank);
  {
    Json ei = Json::object();
    ei.set("value", pr.edge_interaction.value);
    ei.set("node_offset", pr.edge_interaction.node_offset);
    ei.set("below_tolerance", pr.edge_interaction.below_tolerance);
    ei.set("tol_couple", 1e-12);
    j.set("edge_interaction", std::move(ei));
  }
  j.set("kappa_curve", json_curve(pr.curve));
  if (pr.curve.crossing_mu) {
    Json c = Json::object();
    c.set("mu", *pr.curve.crossing_mu);
    c.set("lambda", *pr.curve.crossing_lambda);
    c.set("kappa", pr.curve.crossing_kappa);
    c.set("reconstruction_residual", pr.curve.crossing_residual);
    j.set("crossing", std::move(c));
  } else {
    j.set("crossing", Json());
    j.set("no_crossing_note",
          "kappa stayed above -1 on the sampled window; perturbation below "
          "threshold at this discretization");
  }
  std::string out = a.out_path.empty() ? "defect_mode.json" : a.out_path;
  write_text_file(out, j.dump());
  if (pr.curve.crossing_lambda)
    std::cout << "wrote " << out
              << " (crossing lambda = " << format_g17(*pr.curve.crossing_lambda)
              << ")\n";
  else
    std::cout << "wrote " << out << " (no crossing)\n";
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("sweep requires --kx0");
  if (a.amplitudes.empty()) throw ConfigError("sweep requires --amplitudes");
  std::vector<double> ts = parse_double_list(a.amplitudes);
  DielectricMap base = cfg.build_map();
  PipelineOptions opt = pipeline_options(cfg);

  std::string csv = "t,crossing_lambda,kappa_at_midgap\n";
  for (double t : ts) {
    DielectricMap map = scale_defect(base, t);
    PipelineResult pr;
    double kappa_mid = std::numeric_limits<double>::quiet_NaN();
    double lam = std::numeric_limits<double>::quiet_NaN();
    try {
      pr = run_defect_pipeline(map, cfg.kx0, cfg.n_cells, cfg.half_order, opt);
      if (pr.curve.crossing_lambda) lam = *pr.curve.crossing_lambda;
      // kappa at the midpoint of the mu window
      auto [space, forms] = build_strip(map, cfg.kx0, cfg.n_cells, cfg.half_order);
      BlochDecomposition decomp = diagonalize_background(space, forms);
      DefectSubspace sub = build_defect_subspace(space, forms, decomp, opt.tau);
      double mu_mid = 0.5 * (1.0 / (pr.edge.lambda1 + 1.0) +
                             1.0 / (pr.edge.lambda0 + 1.0));
      kappa_mid = kappa(space, decomp, sub, mu_mid,
                        opt.crossing.exclusion_rel *
                            (pr.edge.lambda1 - pr.edge.lambda0));
    } catch (const EmptySubspace&) {
      // amplitude zero: no subspace, no crossing; row records NaNs
    }
    csv += format_g17(t) + "," + format_g17(lam) + "," + format_g17(kappa_mid) +
           "\n";
  }
  std::string out = a.out_path.empty() ? "sweep.csv" : a.out_path;
  write_text_file(out, csv);
  std::cout << "wrote " << out << " (" << ts.size() << " amplitudes)\n";
  return 0;
}

int cmd_oracle(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("oracle requires --kx0");
  DielectricMap map = cfg.build_map();
  PlaneWaveBasis basis(cfg.half_order);
  auto [gap, edge] = locate_fixture_gap(map, cfg.kx0, pipeline_options(cfg), basis);
  auto [space, forms] = build_strip(map, cfg.kx0, cfg.n_cells, cfg.half_order);
  OracleResult orc =
      supercell_eigensolve(space, forms, map, edge, 8, cfg.tol_ess_rel);

  Json j = report_header(cfg);
  j.set("gap", json_gap(gap));
  j.set("edge", json_edge(edge));
  Json evs = Json::array();
  for (size_t i = 0; i < orc.gap_eigenvalues.size(); ++i) {
    Json e = Json::object();
    e.set("lambda", orc.gap_eigenvalues[i]);
    e.set("decay_gamma", orc.decay[i].gamma);
    e.set("fit_r2", orc.decay[i].r2);
    e.set("poor_fit", orc.decay[i].poor_fit);
    evs.push(std::move(e));
  }
  j.set("gap_eigenvalues", std::move(evs));
  j.set("min_dist_to_folded", orc.min_dist_to_folded);
  Json folded = Json::array();
  for (double v : orc.folded_bulk_spectrum) folded.push(Json::real(v));
  j.set("folded_bulk_spectrum", std::move(folded));
  std::string out = a.out_path.empty() ? "oracle.json" : a.out_path;
  write_text_file(out, j.dump());
  std::cout << "wrote " << out << " (" << orc.gap_eigenvalues.size()
            << " gap eigenvalues)\n";
  return 0;
}

int cmd_converge(const CommonArgs& a) {
  RunConfig cfg = load_config(a);
  if (!cfg.kx0_set) throw ConfigError("converge requires --kx0");
  DielectricMap map = cfg.build_map();
  ConvergenceOptions copt;
  copt.base_cells = cfg.n_cells;
  copt.base_order = cfg.half_order;
  ConvergenceTable table = convergence_study(
      map, cfg.kx0, parse_int_list(a.cell_list), parse_int_list(a.order_list),
      copt);
  std::string csv =
      "axis,value,crossed,crossing_lambda,oracle_lambda,gap_lower,gap_upper,"
      "cauchy_prev\n";
  size_t ci = 0, oi = 0;
  std::string prev_axis;
  for (const auto& row : table.rows) {
    double cauchy = std::numeric_limits<double>::quiet_NaN();
    if (row.axis == prev_axis) {
      if (row.axis == "cells" && ci < table.cauchy_cells.size())
        cauchy = table.cauchy_cells[ci++];
      if (row.axis == "order" && oi < table.cauchy_orders.size())
        cauchy = table.cauchy_orders[oi++];
    }
    prev_axis = row.axis;
    csv += row.axis + "," + std::to_string(row.value) + "," +
           (row.crossed ? "1" : "0") + "," + format_g17(row.crossing_lambda) +
           "," + format_g17(row.oracle_lambda) + "," +
           format_g17(row.gap_lower) + "," + format_g17(row.gap_upper) + "," +
           format_g17(cauchy) + "\n";
  }
  std::string out = a.out_path.empty() ? "converge.csv" : a.out_path;
  write_text_file(out, csv);
  std::cout << "wrote " << out << " (" << table.rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"TE band structures and weak line-defect gap modes of 2D "
               "periodic dielectric media"};
  app.require_subcommand(1);

  CommonArgs a;
  auto add_common = [&](CLI::App* sub, bool scalar_cells = true) {
    sub->add_option("--config", a.config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", a.out_path, "output file path");
    sub->add_option("--kx0", a.kx0, "Bloch fiber quasimomentum");
    if (scalar_cells)
      sub->add_option("--cells", a.cells, "supercell size N_c (odd)");
    sub->add_option("--order", a.order, "plane-wave half order G");
    sub->add_option("--bands", a.bands, "number of bands");
    sub->add_option("--grid", a.grid, "k grid AxB");
    sub->add_option("--tol-cross", a.tol_cross, "crossing bisection tolerance");
  };

  CLI::App* bands = app.add_subcommand("bands", "band structure CSV");
  add_common(bands);
  CLI::App* gaps = app.add_subcommand("gaps", "gap report JSON");
  add_common(gaps);
  CLI::App* edge = app.add_subcommand("edge", "gap edge data JSON");
  add_common(edge);
  CLI::App* cond = app.add_subcommand("check-condition",
                                      "localization condition report");
  add_common(cond);
  CLI::App* dm = app.add_subcommand("defect-mode",
                                    "Birman-Schwinger defect mode search");
  add_common(dm);
  CLI::App* sweep = app.add_subcommand("sweep", "defect amplitude sweep CSV");
  add_common(sweep);
  sweep->add_option("--amplitudes", a.amplitudes, "comma list of scales")
      ->required();
  CLI::App* orc = app.add_subcommand("oracle", "direct supercell eigensolve");
  add_common(orc);
  CLI::App* conv = app.add_subcommand("converge", "convergence study CSV");
  add_common(conv, /*scalar_cells=*/false);
  conv->add_option("--cells", a.cell_list, "comma list of N_c values");
  conv->add_option("--orders", a.order_list, "comma list of G values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      // --help path
      std::cout << app.help();
      return 0;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (bands->parsed()) return cmd_bands(a);
    if (gaps->parsed()) return cmd_gaps(a);
    if (edge->parsed()) return cmd_edge(a);
    if (cond->parsed()) return cmd_check_condition(a);
    if (dm->parsed()) return cmd_defect_mode(a);
    if (sweep->parsed()) return cmd_sweep(a);
    if (orc->parsed()) return cmd_oracle(a);
    if (conv->parsed()) return cmd_converge(a);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gapmode
