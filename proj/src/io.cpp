#include "topembed/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "topembed/error.hpp"

namespace topembed::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("failed writing '" + path + "'");
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in " + origin + ": " + e.what());
  }
}

Json read_json(const std::string& path) { return parse_json(read_file(path), "'" + path + "'"); }

namespace {

std::string id_string(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("identifiers must be strings or integers");
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing field '") + name + "'");
  return j.at(name);
}

double number(const Json& v) {
  if (!v.is_number()) throw InputError("expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError("non-finite number");
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

SimplicialComplex complex_from_json(const Json& j) {
  const Json& n = field(j, "n");
  if (!n.is_number_integer()) throw InputError("'n' must be an integer");
  std::vector<std::string> labels;
  for (const auto& v : field(j, "vertices")) labels.push_back(id_string(v));
  std::map<std::string, PointId> index;
  for (PointId i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  std::vector<Simplex> simplices;
  for (const auto& s : field(j, "simplices")) {
    if (!s.is_array()) throw InputError("each simplex must be an array");
    Simplex simplex;
    for (const auto& v : s) {
      auto it = index.find(id_string(v));
      if (it == index.end()) throw ContractError("simplex references unknown vertex '" + id_string(v) + "'");
      simplex.push_back(it->second);
    }
    simplices.push_back(std::move(simplex));
  }
  SimplicialComplex complex(n.get<int>(), std::move(labels), std::move(simplices));
  complex.validate();
  return complex;
}

Json complex_to_json(const SimplicialComplex& complex) {
  Json j;
  j["n"] = complex.dimension();
  j["vertices"] = complex.vertex_labels();
  Json simplices = Json::array();
  for (const auto& s : complex.simplices()) {
    Json row = Json::array();
    for (PointId v : s) row.push_back(complex.vertex_labels()[v]);
    simplices.push_back(row);
  }
  j["simplices"] = simplices;
  return j;
}

LabeledPoints parse_points_csv(const std::string& text, const std::string& origin) {
  LabeledPoints out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() < 2) throw InputError(origin + ":" + std::to_string(line_no) + ": expected id and coordinates");
    Point p;
    bool numeric = true;
    for (std::size_t i = 1; i < cells.size() && numeric; ++i) {
      double v = 0.0;
      numeric = parse_double(cells[i], v);
      p.push_back(v);
    }
    if (!numeric) {
      if (out.ids.empty() && line_no == 1) continue;  // header
      throw InputError(origin + ":" + std::to_string(line_no) + ": malformed coordinate");
    }
    if (dim == 0) dim = p.size();
    if (p.size() != dim) throw InputError(origin + ":" + std::to_string(line_no) + ": inconsistent dimension");
    out.ids.push_back(cells[0]);
    out.points.push_back(std::move(p));
  }
  if (out.ids.empty()) throw InputError(origin + ": no points");
  return out;
}

LabeledPoints read_points_csv(const std::string& path) { return parse_points_csv(read_file(path), "'" + path + "'"); }

std::string points_to_csv(const LabeledPoints& points) {
  std::ostringstream out;
  out << "id";
  const std::size_t dim = points.points.empty() ? 0 : points.points[0].size();
  for (std::size_t k = 0; k < dim; ++k) out << ",x" << (k + 1);
  out << "\n";
  for (std::size_t i = 0; i < points.ids.size(); ++i) {
    out << points.ids[i];
    for (double v : points.points[i]) {
      char buffer[32];
      auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
      out << "," << std::string(buffer, end);
    }
    out << "\n";
  }
  return out.str();
}

PointCloud vertex_coords(const SimplicialComplex& complex, const LabeledPoints& points) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < points.ids.size(); ++i) index.emplace(points.ids[i], i);
  const std::size_t dim = points.points.empty() ? 0 : points.points[0].size();
  PointCloud coords(complex.vertex_count(), dim);
  for (PointId v = 0; v < complex.vertex_count(); ++v) {
    auto it = index.find(complex.vertex_labels()[v]);
    if (it == index.end()) throw ContractError("no coordinates for vertex '" + complex.vertex_labels()[v] + "'");
    coords.set_point(v, points.points[it->second]);
  }
  return coords;
}

std::vector<std::string> cover_ground_labels(const Json& j) {
  std::vector<std::string> labels;
  for (const auto& v : field(j, "ground")) labels.push_back(id_string(v));
  return labels;
}

Cover cover_from_json(const Json& j, const std::vector<std::string>* labels) {
  const std::vector<std::string> ground_labels = cover_ground_labels(j);
  const std::vector<std::string>& universe = labels ? *labels : ground_labels;
  std::map<std::string, PointId> index;
  for (PointId i = 0; i < universe.size(); ++i) index.emplace(universe[i], i);
  auto resolve = [&](const Json& v) {
    auto it = index.find(id_string(v));
    if (it == index.end()) throw ContractError("unknown point id '" + id_string(v) + "'");
    return it->second;
  };
  IdSet ground;
  for (const auto& v : field(j, "ground")) ground.push_back(resolve(v));
  std::vector<IdSet> sets;
  std::vector<std::string> set_labels;
  for (const auto& s : field(j, "sets")) {
    IdSet ids;
    for (const auto& v : field(s, "ids")) ids.push_back(resolve(v));
    sets.push_back(std::move(ids));
    set_labels.push_back(s.contains("label") ? id_string(s.at("label")) : "");
  }
  Cover cover = Cover::make(std::move(ground), std::move(sets), std::move(set_labels));
  cover.validate();
  return cover;
}

Json cover_to_json(const Cover& cover, const std::vector<std::string>& labels) {
  Json j;
  Json ground = Json::array();
  for (PointId x : cover.ground) ground.push_back(labels[x]);
  j["ground"] = ground;
  Json sets = Json::array();
  for (std::size_t i = 0; i < cover.sets.size(); ++i) {
    Json ids = Json::array();
    for (PointId x : cover.sets[i]) ids.push_back(labels[x]);
    Json s;
    s["label"] = cover.labels[i];
    s["ids"] = ids;
    sets.push_back(s);
  }
  j["sets"] = sets;
  return j;
}

FiniteMetricSpace space_from_json(const Json& j) {
  std::vector<std::string> ids;
  for (const auto& v : field(j, "ids")) ids.push_back(id_string(v));
  if (j.contains("coords")) {
    const Json& rows = j.at("coords");
    if (rows.size() != ids.size()) throw InputError("coordinate rows do not match ids");
    const std::size_t dim = ids.empty() ? 0 : rows.at(0).size();
    PointCloud cloud(ids.size(), dim);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (rows.at(i).size() != dim) throw InputError("inconsistent coordinate dimension");
      for (std::size_t k = 0; k < dim; ++k) cloud(i, k) = number(rows.at(i).at(k));
    }
    return FiniteMetricSpace::from_coordinates(std::move(ids), cloud);
  }
  const Json& rows = field(j, "dist");
  if (rows.size() != ids.size()) throw InputError("distance rows do not match ids");
  std::vector<double> dist;
  for (const auto& row : rows) {
    if (row.size() != ids.size()) throw InputError("distance matrix is not square");
    for (const auto& v : row) dist.push_back(number(v));
  }
  return FiniteMetricSpace::from_matrix(std::move(ids), std::move(dist));
}

PLMap map_from_json(const Json& j, std::shared_ptr<const SimplicialComplex> complex) {
  const Json& n = field(j, "N");
  if (!n.is_number_integer() || n.get<int>() < 1) throw InputError("'N' must be a positive integer");
  const auto N = static_cast<std::size_t>(n.get<int>());
  const Json& images = field(j, "vertex_images");
  if (!images.is_object()) throw InputError("'vertex_images' must be an object");
  PointCloud cloud(complex->vertex_count(), N);
  for (PointId v = 0; v < complex->vertex_count(); ++v) {
    const std::string& label = complex->vertex_labels()[v];
    if (!images.contains(label)) throw ContractError("no image for vertex '" + label + "'");
    const Json& row = images.at(label);
    if (row.size() != N) throw ContractError("image of '" + label + "' does not have N coordinates");
    for (std::size_t k = 0; k < N; ++k) cloud(v, k) = number(row.at(k));
  }
  return PLMap(std::move(complex), std::move(cloud));
}

Json map_to_json(const PLMap& map) {
  Json j;
  j["N"] = map.target_dim();
  Json images = Json::object();
  for (PointId v = 0; v < map.complex().vertex_count(); ++v) images[map.complex().vertex_labels()[v]] = map.image(v);
  j["vertex_images"] = images;
  return j;
}

Json samples_to_json(const SampleSet& samples) {
  Json j;
  j["resolution"] = samples.resolution();
  j["mesh"] = samples.mesh();
  const auto labels = samples.labels();
  Json list = Json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    Json entry;
    entry["id"] = labels[i];
    entry["simplex"] = s.simplex;
    Json verts = Json::array();
    for (PointId v : samples.complex().simplices()[s.simplex]) verts.push_back(samples.complex().vertex_labels()[v]);
    entry["vertices"] = verts;
    Json exact = Json::array();
    for (auto l : s.lattice) {
      const auto g = std::gcd(l, samples.resolution());
      exact.push_back(std::to_string(l / g) + "/" + std::to_string(samples.resolution() / g));
    }
    entry["barycentric_exact"] = exact;
    entry["barycentric"] = samples.barycentric(i);
    list.push_back(entry);
  }
  j["samples"] = list;
  return j;
}

Json report_to_json(const PerturbationReport& r) {
  Json j;
  j["status"] = r.status;
  j["seed"] = r.seed;
  j["eps"] = r.eps;
  j["r"] = r.r;
  j["rho"] = r.rho;
  j["rho_within_r"] = r.rho <= r.r;
  j["tau"] = r.tau;
  j["delta_before"] = {{"tau_0", r.delta_before_exact}, {"tau", r.delta_before_tau}};
  j["delta_after"] = {{"tau_0", r.delta_after_exact}, {"tau", r.delta_after_tau}};
  j["claim1_max_displacement"] = r.claim1_max;
  j["cover_order"] = r.cover_order;
  j["subdivision_rounds"] = r.rounds;
  j["cover_sets"] = r.cover_sets;
  j["zs_general_position"] = r.zs_general_position;
  j["general_position_scope"] = r.general_position_scope;
  j["general_position_redraws"] = r.gp_redraws;
  j["blend_width"] = r.blend_width;
  j["claim2"] = {{"tau", r.tau}, {"near_coincident_pairs", r.claim2_pairs},
                 {"max_weight_difference", r.claim2_max_weight_diff}};
  return j;
}

Json certificate_to_json(const EmbeddingCertificate& cert, const SimplicialComplex& complex) {
  auto simplex_labels = [&](std::size_t s) {
    Json row = Json::array();
    for (PointId v : complex.simplices()[s]) row.push_back(complex.vertex_labels()[v]);
    return row;
  };
  Json j;
  j["method"] = cert.method;
  j["passed"] = cert.passed;
  j["failures"] = cert.failures;
  j["target_dim"] = cert.target_dim;
  j["simplex_pairs"] = {{"checked", cert.pairs_checked},
                        {"disjoint", cert.disjoint_pairs},
                        {"intersect_in_common_face", cert.common_face_pairs},
                        {"intersect_improperly", cert.improper_pairs.size()}};
  Json improper = Json::array();
  for (const auto& p : cert.improper_pairs) improper.push_back({simplex_labels(p.first), simplex_labels(p.second)});
  j["improper_pairs"] = improper;
  Json margin;
  margin["resolution"] = cert.resolution;
  margin["value"] = std::isfinite(cert.injectivity_margin) ? Json(cert.injectivity_margin) : Json(nullptr);
  if (cert.margin_witness) {
    margin["witness"] = {"s" + std::to_string(cert.margin_witness->first), "s" + std::to_string(cert.margin_witness->second)};
  }
  j["injectivity_margin"] = margin;
  j["continuum_injective"] = cert.continuum_injective;
  if (cert.properness) {
    Json p;
    p["escapes"] = cert.properness->escapes;
    Json table = Json::array();
    for (std::size_t i = 0; i < cert.properness->ladder.size(); ++i) {
      const auto& w = cert.properness->witness_stage[i];
      table.push_back({{"R", cert.properness->ladder[i]}, {"stage", w ? Json(*w + 1) : Json(nullptr)}});
    }
    p["ladder"] = table;
    j["properness"] = p;
  }
  if (!cert.steps.empty()) {
    j["rho_budget"] = cert.rho_budget;
    j["rho_total"] = cert.rho_total;
    j["initial_equal_image_pairs"] = cert.initial_equal_image_pairs;
    j["equal_image_pairs_nonincreasing"] = cert.equal_pairs_nonincreasing;
    Json steps = Json::array();
    for (const auto& s : cert.steps) {
      Json e;
      e["k"] = s.k;
      e["stage"] = s.stage + 1;
      e["eps"] = s.eps;
      e["r"] = s.r;
      e["equal_image_pairs"] = s.equal_image_pairs;
      e["report"] = report_to_json(s.report);
      steps.push_back(e);
    }
    j["steps"] = steps;
  }
  return j;
}

namespace {

std::string fmt(double v) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, end);
}

}  // namespace

std::string to_obj(const PLMap& map) {
  std::ostringstream out;
  out << "# " << map.complex().vertex_count() << " vertices, first 3 of " << map.target_dim() << " coordinates\n";
  for (PointId v = 0; v < map.complex().vertex_count(); ++v) {
    out << "v";
    for (std::size_t k = 0; k < 3; ++k) out << " " << fmt(k < map.target_dim() ? map.vertex_images()(v, k) : 0.0);
    out << "\n";
  }
  for (const auto& s : map.complex().simplices()) {
    if (s.size() == 2) out << "l " << s[0] + 1 << " " << s[1] + 1 << "\n";
    if (s.size() == 3) out << "f " << s[0] + 1 << " " << s[1] + 1 << " " << s[2] + 1 << "\n";
  }
  return out.str();
}

std::string to_svg(const PLMap& map) {
  if (map.complex().dimension() > 1) throw ContractError("SVG export supports complexes with n <= 1");
  const auto& img = map.vertex_images();
  auto coord = [&](PointId v, std::size_t k) { return k < img.dim() ? img(v, k) : 0.0; };
  double lo[2] = {0, 0}, hi[2] = {0, 0};
  for (PointId v = 0; v < img.size(); ++v) {
    for (std::size_t k = 0; k < 2; ++k) {
      lo[k] = v == 0 ? coord(v, k) : std::min(lo[k], coord(v, k));
      hi[k] = v == 0 ? coord(v, k) : std::max(hi[k], coord(v, k));
    }
  }
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-9});
  const double size = 400.0;
  const double pad = 20.0;
  auto px = [&](PointId v) { return pad + (coord(v, 0) - lo[0]) / span * size; };
  auto py = [&](PointId v) { return pad + (hi[1] - coord(v, 1)) / span * size; };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
  for (const auto& s : map.complex().simplices()) {
    if (s.size() != 2) continue;
    out << "  <line x1=\"" << fmt(px(s[0])) << "\" y1=\"" << fmt(py(s[0])) << "\" x2=\"" << fmt(px(s[1]))
        << "\" y2=\"" << fmt(py(s[1])) << "\" stroke=\"black\"/>\n";
  }
  for (PointId v = 0; v < img.size(); ++v) {
    out << "  <circle cx=\"" << fmt(px(v)) << "\" cy=\"" << fmt(py(v)) << "\" r=\"3\"><title>"
        << map.complex().vertex_labels()[v] << "</title></circle>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace topembed::io
