// Command-line driver for intrinsic subdivision and multiscale transforms.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "geomsub/io.hpp"

namespace {

using namespace geomsub;

Mask named_mask(const std::string& scheme) {
    if (scheme == "chaikin") return chaikin_mask();
    if (scheme == "midpoint") return midpoint_mask();
    if (scheme.rfind("fourpoint:", 0) == 0) {
        double omega = std::stod(scheme.substr(10));
        if (!four_point_guaranteed(omega))
            std::cerr << "warning: |omega| >= 1/6, outside the proven convergence range\n";
        return four_point_mask(omega);
    }
    if (scheme.rfind("lane-riesenfeld:", 0) == 0)
        return lane_riesenfeld_mask(std::stoi(scheme.substr(16)));
    throw ValidationError(
        "unknown scheme '" + scheme +
        "' (expected chaikin|midpoint|fourpoint:<omega>|lane-riesenfeld:<k>)");
}

struct RuleOptions {
    std::string mask_path;
    std::string scheme;
    std::string variant = "linear";
    std::string basepoint;  // "", "floor", "edge-midpoint"

    void attach(CLI::App* cmd) {
        auto* m = cmd->add_option("--mask", mask_path, "mask JSON file");
        auto* s = cmd->add_option(
            "--scheme", scheme,
            "named scheme: chaikin|midpoint|fourpoint:<omega>|lane-riesenfeld:<k>");
        m->excludes(s);
        cmd->add_option("--variant", variant, "linear|frechet|logexp|projection")
            ->capture_default_str();
        cmd->add_option("--basepoint", basepoint,
                        "floor|edge-midpoint (default: canonical for the mask)");
    }

    Mask mask() const {
        if (!mask_path.empty()) return read_mask_file(mask_path);
        if (!scheme.empty()) return named_mask(scheme);
        throw ValidationError("one of --mask or --scheme is required");
    }

    SchemeVariant make_variant(const Mask& m) const {
        BasePointRule bp = canonical_basepoint(m);
        if (basepoint == "floor")
            bp = BasePointRule::FloorPoint;
        else if (basepoint == "edge-midpoint")
            bp = BasePointRule::EdgeMidpoint;
        else if (!basepoint.empty())
            throw ValidationError("unknown basepoint '" + basepoint + "'");
        return variant_from_name(variant, bp);
    }
};

int run(int argc, char** argv) {
    CLI::App app{"intrinsic averages, subdivision, and multiscale transforms"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for randomized commands")->capture_default_str();

    // subdivide
    auto* sub = app.add_subcommand("subdivide", "refine a sequence file");
    std::string sub_in, sub_out, sub_params;
    int rounds = 1;
    bool emit_params = false;
    RuleOptions sub_rule;
    sub->add_option("--input", sub_in, "input SequenceFile")->required();
    sub_rule.attach(sub);
    sub->add_option("--rounds", rounds, "number of refinement rounds")->capture_default_str();
    sub->add_option("--output", sub_out, "output SequenceFile")->required();
    sub->add_flag("--emit-params", emit_params,
                  "also store the dyadic limit parameters in the output");
    sub->callback([&] {
        Sequence seq = read_sequence_file(sub_in);
        Mask mask = sub_rule.mask();
        Rule rule = Rule::masked(mask, sub_rule.make_variant(mask));
        if (emit_params) {
            std::vector<LimitSample> samples = limit_samples(seq, rule, rounds);
            Sequence out{seq.kind, {}, seq.boundary, 0};
            std::vector<double> params;
            out.points.reserve(samples.size());
            params.reserve(samples.size());
            for (auto& s : samples) {
                params.push_back(s.param);
                out.points.push_back(std::move(s.point));
            }
            write_sequence_file(sub_out, out, &params);
        } else {
            write_sequence_file(sub_out, subdivide(seq, rule, rounds));
        }
    });

    // analyze
    auto* ana = app.add_subcommand("analyze", "derived-mask contractivity report");
    RuleOptions ana_rule;
    int max_power = 6;
    ana_rule.attach(ana);
    ana->add_option("--max-power", max_power, "highest rule power to test")
        ->capture_default_str();
    ana->callback([&] {
        ConvergenceReport report = contractivity_report(ana_rule.mask(), max_power);
        std::cout << report_to_json(report).dump(2) << "\n";
    });

    // decompose
    auto* dec = app.add_subcommand("decompose", "build a multiscale pyramid");
    std::string dec_in, dec_out;
    int levels = 1;
    bool use_haar = false;
    RuleOptions dec_rule;
    dec->add_option("--input", dec_in, "input SequenceFile")->required();
    dec->add_option("--levels", levels, "number of pyramid levels")->required();
    dec->add_flag("--haar", use_haar, "geometric Haar pyramid");
    dec_rule.attach(dec);
    dec->add_option("--output", dec_out, "output PyramidFile")->required();
    dec->callback([&] {
        Sequence seq = read_sequence_file(dec_in);
        Pyramid pyr;
        if (use_haar) {
            pyr = haar_decompose(seq, levels);
        } else {
            Mask mask = dec_rule.mask();
            pyr = wavelet_decompose(seq, mask, dec_rule.make_variant(mask), levels);
        }
        write_pyramid_file(dec_out, pyr);
    });

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "invert a pyramid");
    std::string rec_in, rec_out;
    rec->add_option("--input", rec_in, "input PyramidFile")->required();
    rec->add_option("--output", rec_out, "output SequenceFile")->required();
    rec->callback([&] {
        Pyramid pyr = read_pyramid_file(rec_in);
        Sequence seq = pyr.scheme.kind == PyramidScheme::Kind::Haar ? haar_reconstruct(pyr)
                                                                    : wavelet_reconstruct(pyr);
        write_sequence_file(rec_out, seq);
    });

    // compress
    auto* cmp = app.add_subcommand("compress", "threshold pyramid details");
    std::string cmp_in, cmp_out;
    double tau = -1.0, keep_top = -1.0, mu = 1.0;
    cmp->add_option("--input", cmp_in, "input PyramidFile")->required();
    cmp->add_option("--threshold", tau, "hard threshold tau");
    cmp->add_option("--keep-top", keep_top, "keep this fraction of detail slots");
    cmp->add_option("--per-level-scale", mu, "level scale mu (threshold tau*mu^level)")
        ->capture_default_str();
    cmp->add_option("--output", cmp_out, "output PyramidFile")->required();
    cmp->callback([&] {
        if ((tau < 0.0) == (keep_top < 0.0))
            throw ValidationError("exactly one of --threshold or --keep-top is required");
        Pyramid pyr = read_pyramid_file(cmp_in);
        ThresholdPolicy policy = tau >= 0.0 ? ThresholdPolicy::hard(tau, mu)
                                            : ThresholdPolicy::keep_top(keep_top);
        ThresholdStats stats;
        Pyramid out = threshold(pyr, policy, &stats);
        write_pyramid_file(cmp_out, out);
        std::cout << json{{"kept", stats.kept},
                          {"dropped", stats.dropped},
                          {"dropped_energy", stats.dropped_energy}}
                         .dump(2)
                  << "\n";
    });

    // regularity
    auto* reg = app.add_subcommand("regularity", "detail-decay regularity estimate");
    std::string reg_in;
    reg->add_option("--input", reg_in, "input PyramidFile")->required();
    reg->callback([&] {
        RegularityEstimate est = estimate_regularity(read_pyramid_file(reg_in));
        json j{{"per_level_max", est.per_level_max}};
        if (std::isfinite(est.alpha_hat))
            j["alpha_hat"] = est.alpha_hat;
        else
            j["alpha_hat"] = nullptr;
        std::cout << j.dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag/usage problems are input errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CutLocusError& e) {
        std::cerr << "numerical error: " << e.what();
        if (e.index >= 0) std::cerr << " (index " << e.index << ")";
        if (e.round >= 0) std::cerr << " (round " << e.round << ")";
        std::cerr << "\n";
        return 3;
    } catch (const NoConvergenceError& e) {
        std::cerr << "numerical error: " << e.what();
        if (e.index >= 0) std::cerr << " (index " << e.index << ")";
        if (e.round >= 0) std::cerr << " (round " << e.round << ")";
        std::cerr << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
