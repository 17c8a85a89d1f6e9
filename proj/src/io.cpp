#include "geomsub/io.hpp"

#include <fstream>

namespace geomsub {

namespace {

ManifoldKind kind_from_json(const json& j) {
    const std::string m = j.at("manifold").get<std::string>();
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw ValidationError("sequence file: dim must be positive");
    if (m == "euclidean") return ManifoldKind::euclidean(dim);
    if (m == "sphere") return ManifoldKind::sphere(dim);
    if (m == "so3") return ManifoldKind::rotation3();
    if (m == "spd") return ManifoldKind::spd(dim);
    throw ValidationError("sequence file: unknown manifold '" + m + "'");
}

// Stored representation differs from coords only for spd (full matrix).
json point_payload(const ManifoldPoint& p) {
    if (p.kind.geometry == Geometry::Spd) {
        Eigen::MatrixXd m = unpack_sym(p.coords, p.kind.dim);
        json arr = json::array();
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
        return arr;
    }
    json arr = json::array();
    for (Eigen::Index i = 0; i < p.coords.size(); ++i) arr.push_back(p.coords[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ValidationError(where + ": expected an array of numbers");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ValidationError(where + ": non-numeric entry");
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

Eigen::VectorXd packed_from_full(const Eigen::VectorXd& flat, int n, const std::string& where) {
    if (flat.size() != static_cast<Eigen::Index>(n) * n)
        throw ValidationError(where + ": expected a full " + std::to_string(n) + "x" +
                              std::to_string(n) + " matrix (" + std::to_string(n * n) +
                              " numbers), got " + std::to_string(flat.size()));
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError(where + ": matrix is not symmetric within 1e-12");
    return pack_sym(m);
}

ManifoldPoint point_from_json(const ManifoldKind& kind, const json& arr,
                              const std::string& where) {
    Eigen::VectorXd flat = vector_from_json(arr, where);
    ManifoldPoint p{kind, {}};
    if (kind.geometry == Geometry::Spd) {
        p.coords = packed_from_full(flat, kind.dim, where);
    } else {
        p.coords = flat;
    }
    validate_point(p, where);
    return p;
}

json tangent_payload(const TangentVector& v) {
    if (v.base.kind.geometry == Geometry::Spd) {
        Eigen::MatrixXd m = unpack_sym(v.vec, v.base.kind.dim);
        json arr = json::array();
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
        return arr;
    }
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.vec.size(); ++i) arr.push_back(v.vec[i]);
    return arr;
}

Eigen::VectorXd tangent_vec_from_json(const ManifoldKind& kind, const json& arr,
                                      const std::string& where) {
    Eigen::VectorXd flat = vector_from_json(arr, where);
    if (kind.geometry == Geometry::Spd) return packed_from_full(flat, kind.dim, where);
    if (flat.size() != kind.tangent_size())
        throw ValidationError(where + ": expected " + std::to_string(kind.tangent_size()) +
                              " tangent coordinates, got " + std::to_string(flat.size()));
    return flat;
}

json scheme_to_json(const PyramidScheme& s) {
    if (s.kind == PyramidScheme::Kind::Haar) return json{{"type", "haar"}};
    json j{{"type", "interpolatory"},
           {"mask", mask_to_json(s.mask)},
           {"variant", variant_name(s.variant)}};
    if (s.variant.tag == SchemeVariant::Tag::LogExp)
        j["basepoint"] =
            s.variant.basepoint == BasePointRule::EdgeMidpoint ? "edge-midpoint" : "floor";
    return j;
}

PyramidScheme scheme_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "haar") return PyramidScheme::haar();
    if (type != "interpolatory")
        throw ValidationError("pyramid file: unknown scheme type '" + type + "'");
    Mask mask = mask_from_json(j.at("mask"));
    BasePointRule bp = canonical_basepoint(mask);
    if (j.contains("basepoint")) {
        const std::string b = j.at("basepoint").get<std::string>();
        if (b == "floor")
            bp = BasePointRule::FloorPoint;
        else if (b == "edge-midpoint")
            bp = BasePointRule::EdgeMidpoint;
        else
            throw ValidationError("pyramid file: unknown basepoint '" + b + "'");
    }
    SchemeVariant v = variant_from_name(j.at("variant").get<std::string>(), bp);
    return PyramidScheme::interpolatory(std::move(mask), std::move(v));
}

json details_to_json(const Pyramid& pyr) {
    json levels = json::array();
    for (const DetailLevel& dl : pyr.details) {
        json level = json::array();
        for (std::size_t i = 0; i < dl.vecs.size(); ++i) {
            level.push_back(json{{"base_index", dl.start + static_cast<std::int64_t>(i)},
                                 {"vec", tangent_payload(dl.vecs[i])}});
        }
        levels.push_back(std::move(level));
    }
    return levels;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace

json sequence_to_json(const Sequence& seq) {
    json points = json::array();
    for (const ManifoldPoint& p : seq.points) points.push_back(point_payload(p));
    return json{{"manifold", geometry_name(seq.kind.geometry)},
                {"dim", seq.kind.dim},
                {"boundary", seq.boundary == Boundary::Periodic ? "periodic" : "open"},
                {"points", std::move(points)}};
}

Sequence sequence_from_json(const json& j) {
    Sequence seq;
    seq.kind = kind_from_json(j);
    const std::string b = j.at("boundary").get<std::string>();
    if (b == "periodic")
        seq.boundary = Boundary::Periodic;
    else if (b == "open")
        seq.boundary = Boundary::Open;
    else
        throw ValidationError("sequence file: unknown boundary '" + b + "'");
    const json& pts = j.at("points");
    if (!pts.is_array()) throw ValidationError("sequence file: points must be an array");
    seq.points.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        seq.points.push_back(
            point_from_json(seq.kind, pts[i], "points[" + std::to_string(i) + "]"));
    validate_sequence(seq, "sequence file");
    return seq;
}

json mask_to_json(const Mask& mask) {
    json j{{"dilation", mask.dilation}, {"offset", mask.offset}, {"coefficients", mask.coeffs}};
    if (!mask.name.empty()) j["name"] = mask.name;
    return j;
}

Mask mask_from_json(const json& j) {
    Mask m;
    m.dilation = j.at("dilation").get<int>();
    m.offset = j.at("offset").get<int>();
    m.coeffs = j.at("coefficients").get<std::vector<double>>();
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
    validate_affine(m);
    return m;
}

std::string variant_name(const SchemeVariant& v) {
    switch (v.tag) {
        case SchemeVariant::Tag::Linear: return "linear";
        case SchemeVariant::Tag::Frechet: return "frechet";
        case SchemeVariant::Tag::LogExp: return "logexp";
        case SchemeVariant::Tag::Projection: return "projection";
        case SchemeVariant::Tag::GeodesicPipeline: return "pipeline";
    }
    return "?";
}

SchemeVariant variant_from_name(const std::string& name, BasePointRule bp) {
    if (name == "linear") return SchemeVariant::linear();
    if (name == "frechet") return SchemeVariant::frechet();
    if (name == "logexp") return SchemeVariant::logexp(bp);
    if (name == "projection") return SchemeVariant::projection();
    throw ValidationError("unknown variant '" + name +
                          "' (expected linear|frechet|logexp|projection)");
}

json pyramid_to_json(const Pyramid& pyr) {
    return json{{"scheme", scheme_to_json(pyr.scheme)},
                {"coarse", sequence_to_json(pyr.coarse)},
                {"original_length", pyr.original_length},
                {"details", details_to_json(pyr)}};
}

Pyramid pyramid_from_json(const json& j) {
    Pyramid pyr;
    pyr.scheme = scheme_from_json(j.at("scheme"));
    pyr.coarse = sequence_from_json(j.at("coarse"));
    pyr.boundary = pyr.coarse.boundary;
    pyr.original_length = j.at("original_length").get<std::int64_t>();
    const json& levels = j.at("details");
    if (!levels.is_array()) throw ValidationError("pyramid file: details must be an array");

    // Bases are not stored; replay the reconstruction cascade to attach each
    // detail to its canonical base point.
    Sequence cur = pyr.coarse;
    const bool haar = pyr.scheme.kind == PyramidScheme::Kind::Haar;
    for (std::size_t lvl = 0; lvl < levels.size(); ++lvl) {
        const json& entries = levels[lvl];
        const std::string where = "details[" + std::to_string(lvl) + "]";
        if (!entries.is_array()) throw ValidationError(where + ": expected an array");
        DetailLevel dl;
        dl.vecs.reserve(entries.size());
        Sequence pred;
        if (haar) {
            pred = cur;  // detail i is based at the level point i
        } else {
            pred = subdivide_once(cur, pyr.scheme.mask, pyr.scheme.variant);
        }
        const std::int64_t pred_n = static_cast<std::int64_t>(pred.points.size());
        std::int64_t expect = 0;
        bool first = true;
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const json& entry = entries[e];
            const std::string ewhere = where + "[" + std::to_string(e) + "]";
            std::int64_t bi = entry.at("base_index").get<std::int64_t>();
            if (first) {
                dl.start = bi;
                expect = bi;
                first = false;
            }
            if (bi != expect) throw ValidationError(ewhere + ": base_index not contiguous");
            ++expect;
            std::int64_t local = bi - pred.start;
            if (pyr.boundary == Boundary::Periodic) {
                local %= pred_n;
                if (local < 0) local += pred_n;
            } else if (local < 0 || local >= pred_n) {
                throw ValidationError(ewhere + ": base_index out of range");
            }
            const ManifoldPoint& base = pred.points[static_cast<std::size_t>(local)];
            TangentVector v{base, tangent_vec_from_json(cur.kind, entry.at("vec"), ewhere)};
            dl.vecs.push_back(std::move(v));
        }
        if (pyr.boundary == Boundary::Periodic &&
            static_cast<std::int64_t>(dl.vecs.size()) != pred_n)
            throw ValidationError(where + ": wrong number of details for this level");

        // Advance one level so the next details find their bases.
        Sequence fine{cur.kind, {}, cur.boundary, haar ? 0 : dl.start};
        if (haar) {
            if (dl.vecs.size() != cur.points.size())
                throw ValidationError(where + ": wrong number of details for this level");
            for (std::size_t i = 0; i < cur.points.size(); ++i) {
                fine.points.push_back(exp_point(cur.points[i], dl.vecs[i]));
                TangentVector neg = dl.vecs[i];
                neg.vec = -neg.vec;
                fine.points.push_back(exp_point(cur.points[i], neg));
            }
        } else {
            for (std::size_t i = 0; i < dl.vecs.size(); ++i)
                fine.points.push_back(exp_point(dl.vecs[i].base, dl.vecs[i]));
            if (pyr.boundary == Boundary::Periodic) fine.start = 0;
        }
        pyr.details.push_back(std::move(dl));
        cur = std::move(fine);
    }
    return pyr;
}

json report_to_json(const ConvergenceReport& report) {
    json norms = json::array();
    for (const auto& e : report.norms) norms.push_back(json::array({e.power, e.scaled_norm}));
    json j{{"norms", std::move(norms)},
           {"gamma", report.gamma},
           {"verdict",
            report.verdict == ConvergenceReport::Verdict::Proven ? "Proven" : "NotProven"},
           {"max_power_tried", report.max_power_tried}};
    if (report.holder_exponent)
        j["holder_exponent"] = *report.holder_exponent;
    else
        j["holder_exponent"] = nullptr;
    return j;
}

Sequence read_sequence_file(const std::string& path) {
    return sequence_from_json(parse_file(path));
}

void write_sequence_file(const std::string& path, const Sequence& seq,
                         const std::vector<double>* params) {
    json j = sequence_to_json(seq);
    if (params) j["params"] = *params;
    open_out(path) << j.dump(2) << "\n";
}

Mask read_mask_file(const std::string& path) { return mask_from_json(parse_file(path)); }

void write_mask_file(const std::string& path, const Mask& mask) {
    open_out(path) << mask_to_json(mask).dump(2) << "\n";
}

Pyramid read_pyramid_file(const std::string& path) {
    return pyramid_from_json(parse_file(path));
}

void write_pyramid_file(const std::string& path, const Pyramid& pyr) {
    open_out(path) << pyramid_to_json(pyr).dump(2) << "\n";
}

}  // namespace geomsub
