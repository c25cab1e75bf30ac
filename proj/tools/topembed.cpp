#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "topembed/covers.hpp"
#include "topembed/embed.hpp"
#include "topembed/error.hpp"
#include "topembed/geometry.hpp"
#include "topembed/io.hpp"
#include "topembed/maps.hpp"
#include "topembed/space.hpp"
#include "topembed/subdivision.hpp"

namespace {

using namespace topembed;
using io::Json;

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> inputs;
  std::uint64_t seed = 0;
  bool exact = true;
  int stages = 6;
  double mesh = 0.25;
  double tau = kFiberTau;
  std::string out;
};

RunConfig config;

Json config_json() {
  Json j;
  j["command"] = config.command;
  Json inputs = Json::object();
  for (const auto& [k, v] : config.inputs) {
    if (!v.empty()) inputs[k] = v;
  }
  j["inputs"] = inputs;
  j["seed"] = config.seed;
  j["exact"] = config.exact;
  j["stages"] = config.stages;
  j["mesh"] = config.mesh;
  j["tau"] = config.tau;
  j["out"] = config.out.empty() ? Json(nullptr) : Json(config.out);
  return j;
}

void emit(Json body) {
  Json j;
  j["command"] = config.command;
  j["config"] = config_json();
  for (auto& [k, v] : body.items()) j[k] = std::move(v);
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!config.out.empty()) io::write_file(config.out, text);
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

IdSet resolve_ids(const std::vector<std::string>& names, const std::vector<std::string>& universe) {
  std::vector<PointId> ids;
  for (const auto& name : names) {
    auto it = std::find(universe.begin(), universe.end(), name);
    if (it == universe.end()) throw ContractError("unknown point id '" + name + "'");
    ids.push_back(static_cast<PointId>(it - universe.begin()));
  }
  return make_id_set(std::move(ids));
}

std::shared_ptr<const SimplicialComplex> load_complex(const std::string& path) {
  return std::make_shared<const SimplicialComplex>(io::complex_from_json(io::read_json(path)));
}

Realization load_realization(std::shared_ptr<const SimplicialComplex> complex, const std::string& coords_path) {
  const PointCloud coords = coords_path.empty() ? standard_simplex_coords(*complex)
                                                : io::vertex_coords(*complex, io::read_points_csv(coords_path));
  return realize_metric(std::move(complex), coords, config.mesh);
}

// cover ---------------------------------------------------------------------

struct CoverArgs {
  std::string cover, target, space, refiner, x1, x2;
  int d = 1;
  int n = 1;
  double lambda = 3.0;
  double lo = -2.0;
  double hi = 2.0;
  double pitch = 0.1;
};

struct LoadedCover {
  Cover cover;
  std::vector<std::string> labels;
  std::optional<FiniteMetricSpace> space;
};

LoadedCover load_cover(const std::string& path, const std::string& space_path) {
  LoadedCover out;
  const Json j = io::read_json(path);
  if (!space_path.empty()) {
    out.space = io::space_from_json(io::read_json(space_path));
    out.labels = out.space->ids();
    out.cover = io::cover_from_json(j, &out.labels);
  } else {
    out.labels = io::cover_ground_labels(j);
    out.cover = io::cover_from_json(j);
  }
  return out;
}

Json set_summary(const LoadedCover& c) {
  Json sets = Json::array();
  for (std::size_t i = 0; i < c.cover.size(); ++i) {
    Json s;
    s["label"] = c.cover.labels[i];
    s["size"] = c.cover.sets[i].size();
    if (c.space) s["diameter"] = c.space->diameter_of(c.cover.sets[i]);
    sets.push_back(s);
  }
  return sets;
}

void cmd_cover_order(const CoverArgs& a) {
  const LoadedCover c = load_cover(a.cover, a.space);
  const auto mult = multiplicities(c.cover);
  const int ord = order(c.cover);
  Json witness = nullptr;
  if (!mult.empty()) {
    const auto at = static_cast<std::size_t>(std::max_element(mult.begin(), mult.end()) - mult.begin());
    const PointId x = c.cover.ground[at];
    Json containing = Json::array();
    for (std::size_t i = 0; i < c.cover.size(); ++i) {
      if (std::binary_search(c.cover.sets[i].begin(), c.cover.sets[i].end(), x)) containing.push_back(c.cover.labels[i]);
    }
    witness = {{"point", c.labels[x]}, {"sets", containing}};
  }
  Json body;
  body["order"] = ord;
  body["witness"] = witness;
  body["sets"] = set_summary(c);
  emit(body);
}

void cmd_cover_refines(const CoverArgs& a) {
  const LoadedCover v = load_cover(a.cover, a.space);
  const Json uj = io::read_json(a.target);
  const Cover u = io::cover_from_json(uj, &v.labels);
  if (u.ground != v.cover.ground) throw ContractError("covers have different ground sets");
  const auto result = refines(v.cover, u);
  Json witness = Json::object();
  for (std::size_t i = 0; i < v.cover.size(); ++i) {
    witness[v.cover.labels[i]] = result.witness[i] ? Json(u.labels[*result.witness[i]]) : Json(nullptr);
  }
  Json body;
  body["refines"] = result.refines;
  body["witness"] = witness;
  body["offending"] = result.offending ? Json(v.cover.labels[*result.offending]) : Json(nullptr);
  emit(body);
}

void cmd_cover_lebesgue(const CoverArgs& a) {
  if (a.space.empty()) throw InputError("--space is required");
  const LoadedCover c = load_cover(a.cover, a.space);
  Json body;
  body["lebesgue_number"] = lebesgue_number(c.cover, *c.space);
  body["sets"] = set_summary(c);
  emit(body);
}

void cmd_cover_cube(const CoverArgs& a) {
  CubeCoverSpec spec;
  spec.n = a.n;
  spec.lambda = a.lambda;
  spec.lo.assign(static_cast<std::size_t>(std::max(a.n, 0)), a.lo);
  spec.hi.assign(static_cast<std::size_t>(std::max(a.n, 0)), a.hi);
  spec.pitch = a.pitch;
  const CubeCover cube = cube_cover(spec);
  std::map<int, std::size_t> strata;
  for (int s : cube.stratum) ++strata[s];
  Json strata_j = Json::object();
  for (const auto& [s, count] : strata) strata_j[std::to_string(s)] = count;
  Json body;
  body["n"] = a.n;
  body["lambda"] = a.lambda;
  body["box"] = {a.lo, a.hi};
  body["pitch"] = a.pitch;
  body["grid_points"] = cube.grid.size();
  body["sets"] = cube.cover.size();
  body["order"] = order(cube.cover);
  body["max_diameter"] = cube.diameter.empty() ? 0.0 : *std::max_element(cube.diameter.begin(), cube.diameter.end());
  body["diameter_bound"] = a.lambda / 2;
  body["diameters_within_bound_exact"] = cube.diameters_exact_within;
  body["sets_per_stratum"] = strata_j;
  emit(body);
}

void cmd_cover_merge(const CoverArgs& a) {
  const LoadedCover a1 = load_cover(a.cover, a.space);
  const Cover a2 = io::cover_from_json(io::read_json(a.target), &a1.labels);
  const IdSet x1 = resolve_ids(split_ids(a.x1), a1.labels);
  const IdSet x2 = a.x2.empty() ? set_difference(a1.cover.ground, x1) : resolve_ids(split_ids(a.x2), a1.labels);
  const Cover merged = merge_refinements(a1.cover, a2, x1, x2);
  const auto o1 = order_in(a1.cover, x1);
  const auto o2 = order_in(a2, x2);
  Json body;
  body["order"] = order(merged);
  body["order_in_x1"] = o1 ? Json(*o1) : Json(nullptr);
  body["order_in_x2"] = o2 ? Json(*o2) : Json(nullptr);
  body["refines_first"] = refines(merged, a1.cover).refines;
  body["cover"] = io::cover_to_json(merged, a1.labels);
  emit(body);
}

void cmd_cover_staged(const CoverArgs& a) {
  if (a.space.empty()) throw InputError("--space is required");
  const LoadedCover u = load_cover(a.cover, a.space);
  const Exhaustion ex = build_exhaustion(*u.space, config.stages);
  Cover base;
  if (a.refiner.empty()) {
    std::vector<IdSet> singletons;
    std::vector<std::string> names;
    for (PointId x : u.cover.ground) {
      singletons.push_back({x});
      names.push_back("{" + u.labels[x] + "}");
    }
    base = Cover::make(u.cover.ground, std::move(singletons), std::move(names));
  } else {
    base = io::cover_from_json(io::read_json(a.refiner), &u.labels);
  }
  const StagedCoverResult result = staged_cover(u.cover, ex, split_refiner(base), a.d);
  Json witness = Json::object();
  for (std::size_t i = 0; i < result.cover.size(); ++i) {
    witness[result.cover.labels[i]] = result.witness[i] ? Json(u.cover.labels[*result.witness[i]]) : Json(nullptr);
  }
  Json body;
  body["d"] = a.d;
  body["order"] = order(result.cover);
  body["stage_orders"] = result.stage_orders;
  body["refiner_calls"] = result.refiner_calls;
  body["refines"] = refines(result.cover, u.cover).refines;
  body["witness"] = witness;
  body["cover"] = io::cover_to_json(result.cover, u.labels);
  emit(body);
}

// dim -----------------------------------------------------------------------

void cmd_dim(const std::string& complex_path, int rounds) {
  auto complex = load_complex(complex_path);
  const Realization real = load_realization(complex, "");
  const std::uint32_t m = std::max(real.samples.resolution(), chain_resolution(complex->dimension()));
  const SampleSet samples(complex, m, config.mesh);
  const int bound = dimension_upper_bound(*complex, samples, rounds);
  Json body;
  body["n"] = complex->dimension();
  body["rounds"] = rounds;
  body["resolution"] = m;
  body["samples"] = samples.size();
  body["dimension_upper_bound"] = bound;
  body["within_n"] = bound <= complex->dimension();
  emit(body);
  if (bound > complex->dimension()) throw PipelineError("star-cover order exceeds n");
}

// embed ---------------------------------------------------------------------

struct EmbedArgs {
  std::string complex, coords, map, map_out, obj, svg;
  std::optional<std::size_t> force_dim;
  double resolution = 0.0;
  bool properness = false;
};

void export_geometry(const EmbedArgs& a, const PLMap& map) {
  if (!a.map_out.empty()) io::write_file(a.map_out, io::map_to_json(map).dump(2) + "\n");
  if (!a.obj.empty()) {
    if (map.complex().dimension() > 2) throw ContractError("OBJ export supports complexes with n <= 2");
    io::write_file(a.obj, io::to_obj(map));
  }
  if (!a.svg.empty()) io::write_file(a.svg, io::to_svg(map));
}

int finish_certificate(const EmbeddingCertificate& cert, const SimplicialComplex& complex) {
  Json body;
  body["certificate"] = io::certificate_to_json(cert, complex);
  emit(body);
  return cert.passed ? 0 : 4;
}

int cmd_embed_run(const EmbedArgs& a) {
  auto complex = load_complex(a.complex);
  const Realization real = load_realization(complex, a.coords);
  const Exhaustion ex = build_exhaustion(real.space, config.stages);
  const IterativeEmbedding result = embed_iterative(real, ex, config.stages, config.seed);
  export_geometry(a, result.vertex_map);
  return finish_certificate(result.certificate, *complex);
}

int cmd_embed_pl(const EmbedArgs& a) {
  auto complex = load_complex(a.complex);
  const PLEmbedding result = pl_embed(complex, config.seed, a.force_dim, config.mesh);
  export_geometry(a, result.map);
  return finish_certificate(result.certificate, *complex);
}

int cmd_embed_verify(const EmbedArgs& a) {
  auto complex = load_complex(a.complex);
  const PLMap map = io::map_from_json(io::read_json(a.map), complex);
  const Realization real = load_realization(complex, a.coords);
  std::optional<Exhaustion> ex;
  if (a.properness) ex = build_exhaustion(real.space, config.stages);
  const double resolution = a.resolution > 0 ? a.resolution : 1.0 / config.stages;
  const EmbeddingCertificate cert =
      verify_embedding(map, real.samples, real.space, ex ? &*ex : nullptr, resolution);
  return finish_certificate(cert, *complex);
}

// points --------------------------------------------------------------------

void cmd_points_perturb(const std::string& path, double r, const std::string& csv_out) {
  const io::LabeledPoints pts = io::read_points_csv(path);
  PerturbOptions options;
  options.mode = config.exact ? Arithmetic::exact : Arithmetic::floating;
  const PerturbResult result = perturb_to_general_position(pts.points, r, config.seed, options);
  double displacement = 0.0;
  for (std::size_t i = 0; i < pts.points.size(); ++i) {
    for (std::size_t k = 0; k < pts.points[i].size(); ++k) {
      displacement = std::max(displacement, std::abs(result.points[i][k] - pts.points[i][k]));
    }
  }
  if (!csv_out.empty()) io::write_file(csv_out, io::points_to_csv({pts.ids, result.points}));
  Json body;
  body["r"] = r;
  body["points"] = pts.points.size();
  body["dimension"] = pts.points.empty() ? 0 : pts.points[0].size();
  body["max_displacement"] = displacement;
  body["within_r"] = displacement < r;
  body["general_position"] = is_general_position(result.points, options.mode);
  body["redraws"] = result.redraws;
  body["subset_checks"] = result.subset_checks;
  Json rows = Json::object();
  for (std::size_t i = 0; i < pts.ids.size(); ++i) rows[pts.ids[i]] = result.points[i];
  body["perturbed"] = rows;
  emit(body);
}

void cmd_points_check(const std::string& path) {
  const io::LabeledPoints pts = io::read_points_csv(path);
  const Arithmetic mode = config.exact ? Arithmetic::exact : Arithmetic::floating;
  Json body;
  body["points"] = pts.points.size();
  body["dimension"] = pts.points.empty() ? 0 : pts.points[0].size();
  body["affine_rank"] = affine_rank(pts.points, mode);
  body["affinely_independent"] = is_affinely_independent(pts.points, mode);
  body["general_position"] = is_general_position(pts.points, mode);
  emit(body);
}

// map -----------------------------------------------------------------------

struct MapArgs {
  std::string complex, coords, map, other;
};

void cmd_map_delta(const MapArgs& a) {
  auto complex = load_complex(a.complex);
  const PLMap map = io::map_from_json(io::read_json(a.map), complex);
  const Realization real = load_realization(complex, a.coords);
  const PointCloud f = map.on_samples(real.samples);
  const IdSet all = iota_ids(real.samples.size());
  const FiberResult exact = fiber_diameter(f, all, 0.0, real.space);
  const FiberResult loose = fiber_diameter(f, all, config.tau, real.space);
  const auto labels = real.samples.labels();
  auto entry = [&](const FiberResult& r, double tau) {
    Json j;
    j["tau"] = tau;
    j["value"] = r.value;
    j["witness"] = r.witness ? Json::array({labels[r.witness->first], labels[r.witness->second]}) : Json(nullptr);
    return j;
  };
  Json body;
  body["samples"] = real.samples.size();
  body["delta"] = Json::array({entry(exact, 0.0), entry(loose, config.tau)});
  emit(body);
}

void cmd_map_rho(const MapArgs& a) {
  auto complex = load_complex(a.complex);
  const PLMap f = io::map_from_json(io::read_json(a.map), complex);
  const PLMap g = io::map_from_json(io::read_json(a.other), complex);
  if (f.target_dim() != g.target_dim()) throw ContractError("maps have different target dimensions");
  const Realization real = load_realization(complex, a.coords);
  const RhoResult r =
      rho_metric(f.on_samples(real.samples), g.on_samples(real.samples), iota_ids(real.samples.size()));
  Json body;
  body["samples"] = real.samples.size();
  body["rho"] = r.value;
  body["witness"] = r.witness ? Json(real.samples.labels()[*r.witness]) : Json(nullptr);
  emit(body);
}

void cmd_samples_export(const std::string& complex_path, const std::string& coords) {
  auto complex = load_complex(complex_path);
  const Realization real = load_realization(complex, coords);
  Json body = io::samples_to_json(real.samples);
  body["space_diameter"] = real.space.diameter();
  emit(body);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covering-dimension tools and embeddings of finite simplicial complexes"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto add_common = [](CLI::App* cmd) {
    cmd->add_option("--seed", config.seed, "Random seed");
    cmd->add_flag("--exact,!--no-exact", config.exact, "Exact rational predicates");
    cmd->add_option("--mesh", config.mesh, "Sample mesh in reference coordinates")->check(CLI::PositiveNumber);
    cmd->add_option("--stages", config.stages, "Number of exhaustion stages")->check(CLI::PositiveNumber);
    cmd->add_option("--tau", config.tau, "Image coincidence tolerance")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", config.out, "Write the JSON report here");
  };

  std::map<CLI::App*, std::function<int()>> actions;

  CoverArgs cover_args;
  auto* cover = app.add_subcommand("cover", "Cover order, refinement and constructions");
  cover->require_subcommand(1);
  auto add_cover_file = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--cover", cover_args.cover, "Cover JSON");
    if (required) opt->required();
    cmd->add_option("--space", cover_args.space, "Metric space JSON");
    add_common(cmd);
  };
  auto* c_order = cover->add_subcommand("order", "Order of a cover");
  add_cover_file(c_order, true);
  actions[c_order] = [&] { cmd_cover_order(cover_args); return 0; };
  auto* c_ref = cover->add_subcommand("refines", "Check that --cover refines --target");
  add_cover_file(c_ref, true);
  c_ref->add_option("--target", cover_args.target, "Coarser cover JSON")->required();
  actions[c_ref] = [&] { cmd_cover_refines(cover_args); return 0; };
  auto* c_leb = cover->add_subcommand("lebesgue", "Lebesgue number");
  add_cover_file(c_leb, true);
  actions[c_leb] = [&] { cmd_cover_lebesgue(cover_args); return 0; };
  auto* c_cube = cover->add_subcommand("cube", "Scaled cube cover on a grid");
  c_cube->add_option("--n", cover_args.n, "Dimension")->check(CLI::Range(1, 6));
  c_cube->add_option("--lambda", cover_args.lambda, "Lebesgue scale")->check(CLI::PositiveNumber);
  c_cube->add_option("--lo", cover_args.lo, "Lower box bound per axis");
  c_cube->add_option("--hi", cover_args.hi, "Upper box bound per axis");
  c_cube->add_option("--pitch", cover_args.pitch, "Grid pitch")->check(CLI::PositiveNumber);
  add_common(c_cube);
  actions[c_cube] = [&] { cmd_cover_cube(cover_args); return 0; };
  auto* c_merge = cover->add_subcommand("merge", "Merge a refinement over a split X1 and X2");
  add_cover_file(c_merge, true);
  c_merge->add_option("--target", cover_args.target, "Refinement of --cover")->required();
  c_merge->add_option("--x1", cover_args.x1, "Comma-separated ids of X1")->required();
  c_merge->add_option("--x2", cover_args.x2, "Comma-separated ids of X2 (default: complement of X1)");
  actions[c_merge] = [&] { cmd_cover_merge(cover_args); return 0; };
  auto* c_staged = cover->add_subcommand("staged", "Staged refinement of order at most d");
  add_cover_file(c_staged, true);
  c_staged->add_option("--d", cover_args.d, "Order bound")->check(CLI::NonNegativeNumber);
  c_staged->add_option("--refiner", cover_args.refiner, "Base cover split by the refiner (default: singletons)");
  actions[c_staged] = [&] { cmd_cover_staged(cover_args); return 0; };

  std::string complex_path;
  int rounds = 1;
  auto* dim = app.add_subcommand("dim", "Upper bound on covering dimension via star covers");
  dim->add_option("--complex", complex_path, "Complex JSON")->required();
  dim->add_option("--rounds", rounds, "Barycentric subdivision rounds")->check(CLI::PositiveNumber);
  add_common(dim);
  actions[dim] = [&] { cmd_dim(complex_path, rounds); return 0; };

  EmbedArgs embed_args;
  auto* embed = app.add_subcommand("embed", "Embeddings into R^(2n+1)");
  embed->require_subcommand(1);
  auto add_embed = [&](CLI::App* cmd) {
    cmd->add_option("--complex", embed_args.complex, "Complex JSON")->required();
    cmd->add_option("--coords", embed_args.coords, "Reference vertex coordinates CSV");
    cmd->add_option("--map-out", embed_args.map_out, "Write the vertex map JSON here");
    cmd->add_option("--obj", embed_args.obj, "Write an OBJ export (n <= 2)");
    cmd->add_option("--svg", embed_args.svg, "Write an SVG export (n <= 1)");
    add_common(cmd);
  };
  auto* e_run = embed->add_subcommand("run", "Iterated perturbation along an exhaustion");
  add_embed(e_run);
  actions[e_run] = [&] { return cmd_embed_run(embed_args); };
  auto* e_pl = embed->add_subcommand("pl", "General-position PL embedding");
  add_embed(e_pl);
  e_pl->add_option("--force-dim", embed_args.force_dim, "Target dimension instead of 2n+1");
  actions[e_pl] = [&] { return cmd_embed_pl(embed_args); };
  auto* e_verify = embed->add_subcommand("verify", "Certify a given PL map");
  add_embed(e_verify);
  e_verify->add_option("--map", embed_args.map, "Map JSON")->required();
  e_verify->add_option("--resolution", embed_args.resolution, "Margin resolution (default 1/stages)");
  e_verify->add_flag("--properness", embed_args.properness, "Check the escape ladder along the exhaustion");
  actions[e_verify] = [&] { return cmd_embed_verify(embed_args); };

  std::string points_path, points_out;
  double radius = 0.1;
  auto* points = app.add_subcommand("points", "Point sets and general position");
  points->require_subcommand(1);
  auto* p_perturb = points->add_subcommand("perturb", "Perturb into general position");
  p_perturb->add_option("--points", points_path, "Points CSV")->required();
  p_perturb->add_option("--radius,-r", radius, "Sup-norm perturbation radius")->check(CLI::PositiveNumber);
  p_perturb->add_option("--csv-out", points_out, "Write perturbed points CSV here");
  add_common(p_perturb);
  actions[p_perturb] = [&] { cmd_points_perturb(points_path, radius, points_out); return 0; };
  auto* p_check = points->add_subcommand("check", "Affine rank and general position");
  p_check->add_option("--points", points_path, "Points CSV")->required();
  add_common(p_check);
  actions[p_check] = [&] { cmd_points_check(points_path); return 0; };

  MapArgs map_args;
  auto* map = app.add_subcommand("map", "Metrics of PL maps on samples");
  map->require_subcommand(1);
  auto add_map = [&](CLI::App* cmd) {
    cmd->add_option("--complex", map_args.complex, "Complex JSON")->required();
    cmd->add_option("--coords", map_args.coords, "Reference vertex coordinates CSV");
    cmd->add_option("--map", map_args.map, "Map JSON")->required();
    add_common(cmd);
  };
  auto* m_delta = map->add_subcommand("delta", "Largest fiber diameter");
  add_map(m_delta);
  actions[m_delta] = [&] { cmd_map_delta(map_args); return 0; };
  auto* m_rho = map->add_subcommand("rho", "Bounded distance between two maps");
  add_map(m_rho);
  m_rho->add_option("--other", map_args.other, "Second map JSON")->required();
  actions[m_rho] = [&] { cmd_map_rho(map_args); return 0; };

  std::string sample_coords;
  auto* samples = app.add_subcommand("samples", "Sample sets");
  samples->require_subcommand(1);
  auto* s_export = samples->add_subcommand("export", "List samples with exact barycentric coordinates");
  s_export->add_option("--complex", complex_path, "Complex JSON")->required();
  s_export->add_option("--coords", sample_coords, "Reference vertex coordinates CSV");
  add_common(s_export);
  actions[s_export] = [&] { cmd_samples_export(complex_path, sample_coords); return 0; };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) {
    leaf = leaf->get_subcommands().front();
    config.command += (config.command.empty() ? "" : " ") + leaf->get_name();
  }
  static const std::vector<std::string> common = {"--seed", "--exact", "--mesh", "--stages", "--tau", "--out"};
  for (const CLI::Option* opt : leaf->get_options()) {
    const std::string name = opt->get_name();
    if (name.rfind("--", 0) != 0 || std::find(common.begin(), common.end(), name) != common.end()) continue;
    if (opt->count() > 0 && !opt->results().empty()) {
      config.inputs[name.substr(2)] = opt->results().front();
    } else {
      config.inputs[name.substr(2)] = opt->get_default_str();
    }
  }

  try {
    return actions.at(leaf)();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return 2;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return 3;
  }
}
