#include "gapmode/config.hpp"

#include <fstream>
#include <sstream>

#include "gapmode/errors.hpp"
#include "gapmode/report.hpp"
#include "json.hpp"

namespace gapmode {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& text, size_t byte,
                          const std::string& msg) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw ConfigError("line " + std::to_string(line) + ", column " +
                    std::to_string(col) + ": " + msg);
}

Shape parse_shape(const json& j) {
  if (!j.contains("kind") || !j.contains("eps"))
    throw ConfigError("shape needs \"kind\" and \"eps\"");
  std::string kind = j.at("kind").get<std::string>();
  double eps = j.at("eps").get<double>();
  if (kind == "fill") return Shape::fill(eps);
  auto center = j.value("center", std::vector<double>{0.5, 0.5});
  if (center.size() != 2) throw ConfigError("shape center needs 2 entries");
  if (kind == "rect") {
    auto size = j.value("size", std::vector<double>{0.5, 0.5});
    if (size.size() != 2) throw ConfigError("rect size needs 2 entries");
    return Shape::rect(eps, center[0], center[1], size[0], size[1]);
  }
  if (kind == "disc") {
    double r = j.value("radius", 0.25);
    return Shape::disc(eps, center[0], center[1], r);
  }
  throw ConfigError("unknown shape kind \"" + kind + "\"");
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_at(text, e.byte, e.what());
  }

  RunConfig cfg;
  cfg.config_hash = fnv1a_hex(text);
  try {
    cfg.resolution = j.at("lattice_resolution").get<int>();
    for (const auto& s : j.at("background")) cfg.background.push_back(parse_shape(s));
    if (j.contains("defect")) {
      const auto& d = j.at("defect");
      cfg.defect_rows = d.value("rows", 1);
      if (d.contains("shapes"))
        for (const auto& s : d.at("shapes")) cfg.defect.push_back(parse_shape(s));
    }
    if (j.contains("kx0")) {
      cfg.kx0 = j.at("kx0").get<double>();
      cfg.kx0_set = true;
    }
    cfg.n_cells = j.value("n_cells", cfg.n_cells);
    cfg.half_order = j.value("half_order", cfg.half_order);
    cfg.n_bands = j.value("bands", cfg.n_bands);
    cfg.gap_index = j.value("gap_index", cfg.gap_index);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.is_string()) {
        std::string s = g.get<std::string>();
        auto x = s.find('x');
        if (x == std::string::npos) throw ConfigError("grid must be \"AxB\"");
        cfg.grid_a = std::stoi(s.substr(0, x));
        cfg.grid_b = std::stoi(s.substr(x + 1));
      } else {
        cfg.grid_a = g.at(0).get<int>();
        cfg.grid_b = g.at(1).get<int>();
      }
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      cfg.edge.fine_grid = t.value("fine_grid", cfg.edge.fine_grid);
      cfg.edge.tol_edge_rel = t.value("tol_edge_rel", cfg.edge.tol_edge_rel);
      cfg.tau = t.value("tau", cfg.tau);
      cfg.crossing.n_samples = t.value("mu_samples", cfg.crossing.n_samples);
      cfg.crossing.eta_min_rel = t.value("eta_min_rel", cfg.crossing.eta_min_rel);
      cfg.crossing.tol_cross = t.value("tol_cross", cfg.crossing.tol_cross);
      cfg.crossing.exclusion_rel = t.value("exclusion_rel", cfg.crossing.exclusion_rel);
      cfg.tol_couple = t.value("tol_couple", cfg.tol_couple);
      cfg.tol_ess_rel = t.value("tol_ess_rel", cfg.tol_ess_rel);
      for (auto it = t.begin(); it != t.end(); ++it) {
        double v = it.value().is_number() ? it.value().get<double>() : 1.0;
        if (!(v > 0.0))
          throw ConfigError("tolerance \"" + it.key() + "\" must be positive");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (std::abs(cfg.kx0) > kPi + 1e-12)
    throw ConfigError("kx0 outside [-pi, pi]");
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

DielectricMap RunConfig::build_map() const {
  return DielectricMap::build(background, defect, defect_rows, resolution);
}

DielectricMap scale_defect(const DielectricMap& map, double t) {
  if (t < 0) throw DefectSignViolation("amplitude scale must be >= 0");
  int n = map.resolution();
  std::vector<double> e0(map.eps0_samples()), e1(e0);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      e1[static_cast<size_t>(ix) * n + iy] =
          map.eps0(ix, iy) + t * (map.eps1(ix, iy) - map.eps0(ix, iy));
  return DielectricMap::from_samples(std::move(e0), std::move(e1),
                                     map.defect_rows(), n);
}

}  // namespace gapmode
