#pragma once

#include <string>

#include <json.hpp>

#include "geomsub/analysis.hpp"
#include "geomsub/multiscale.hpp"
#include "geomsub/subdivision.hpp"

namespace geomsub {

using json = nlohmann::json;

// SequenceFile:
//   {"manifold": "euclidean"|"sphere"|"so3"|"spd", "dim": d,
//    "boundary": "periodic"|"open", "points": [[...], ...]}
// so3 points are unit quaternions [w,x,y,z]; spd points are row-major full
// symmetric matrices. Parsing validates every point and reports its index.
json sequence_to_json(const Sequence& seq);
Sequence sequence_from_json(const json& j);

// MaskFile: {"dilation": N, "offset": o, "coefficients": [...], "name"?: s}.
// Affine invariance is checked at load.
json mask_to_json(const Mask& mask);
Mask mask_from_json(const json& j);

// PyramidFile:
//   {"scheme": {"type": "haar"} | {"type": "interpolatory", "mask": MaskFile,
//               "variant": ..., "basepoint": ...},
//    "coarse": SequenceFile, "original_length": L,
//    "details": [[{"base_index": i, "vec": [...]}, ...], ...]}
// Detail bases are recomputed from the reconstruction cascade on load.
json pyramid_to_json(const Pyramid& pyr);
Pyramid pyramid_from_json(const json& j);

json report_to_json(const ConvergenceReport& report);

std::string variant_name(const SchemeVariant& v);
SchemeVariant variant_from_name(const std::string& name, BasePointRule bp);

Sequence read_sequence_file(const std::string& path);
void write_sequence_file(const std::string& path, const Sequence& seq,
                         const std::vector<double>* params = nullptr);
Mask read_mask_file(const std::string& path);
void write_mask_file(const std::string& path, const Mask& mask);
Pyramid read_pyramid_file(const std::string& path);
void write_pyramid_file(const std::string& path, const Pyramid& pyr);

}  // namespace geomsub
