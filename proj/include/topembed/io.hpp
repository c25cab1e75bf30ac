#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "topembed/covers.hpp"
#include "topembed/embed.hpp"
#include "topembed/maps.hpp"
#include "topembed/space.hpp"

namespace topembed::io {

using Json = nlohmann::ordered_json;

/// Whole file as a string; InputError when unreadable.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Parses JSON, mapping syntax errors to InputError.
Json parse_json(const std::string& text, const std::string& origin);
Json read_json(const std::string& path);

/// {"n": int, "vertices": [id...], "simplices": [[id...]...]}; validated.
SimplicialComplex complex_from_json(const Json& j);
Json complex_to_json(const SimplicialComplex& complex);

struct LabeledPoints {
  std::vector<std::string> ids;
  std::vector<Point> points;
};

/// CSV rows "id,x1,...,xm"; a header row whose coordinates are not numbers is skipped.
LabeledPoints parse_points_csv(const std::string& text, const std::string& origin);
LabeledPoints read_points_csv(const std::string& path);
std::string points_to_csv(const LabeledPoints& points);

/// Reference coordinates ordered by the complex's vertex labels.
PointCloud vertex_coords(const SimplicialComplex& complex, const LabeledPoints& points);

/// {"ground": [id...], "sets": [{"label": str, "ids": [id...]}...]}. Ids are
/// resolved against `labels` when given, otherwise against the ground listing.
Cover cover_from_json(const Json& j, const std::vector<std::string>* labels = nullptr);
Json cover_to_json(const Cover& cover, const std::vector<std::string>& labels);

/// Point labels of a cover file's ground listing, in order.
std::vector<std::string> cover_ground_labels(const Json& j);

/// {"ids": [...], "coords": [[...]...]} (sup-norm) or {"ids": [...], "dist": [[...]...]}.
FiniteMetricSpace space_from_json(const Json& j);

/// {"N": int, "vertex_images": {id: [coords...]}}.
PLMap map_from_json(const Json& j, std::shared_ptr<const SimplicialComplex> complex);
Json map_to_json(const PLMap& map);

Json samples_to_json(const SampleSet& samples);
Json report_to_json(const PerturbationReport& report);
Json certificate_to_json(const EmbeddingCertificate& cert, const SimplicialComplex& complex);

/// Wavefront OBJ of the first three coordinates (zero-padded); edges as lines,
/// triangles as faces.
std::string to_obj(const PLMap& map);

/// SVG of the first two coordinates of a map of a complex with n <= 1.
std::string to_svg(const PLMap& map);

}  // namespace topembed::io
