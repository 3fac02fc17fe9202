#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pedcross/domain.hpp"

namespace pedcross {

// Synthetic stand-in for the (private) distributed-simulator dataset.
// The experimental design is replicated exactly: every participant pair sees
// every (TTA level, crossing site) condition once per block, in a seeded
// random order. Outcomes come from a configurable ground-truth behavior
// model so that downstream learners have real signal to recover.

struct TruncatedNormal {
    double mean = 0.0;
    double sd = 1.0;
    double low = 0.0;
    double high = 1.0;
};

struct SiteConfig {
    std::string id;
    Location type = Location::zebra;
};

// Coefficients over the generator's ground-truth feature family:
// (tta, zebra indicator, standardized waiting time, standardized pedestrian
// AISS, standardized dSVO) plus zebra interactions for tta and the two
// continuous covariates. The interactions make covariate effects
// location-dependent — the planted structure an additive linear model
// cannot represent, which is what separates the tree/net learners from the
// linear ones downstream.
struct FeatureCoeffs {
    double tta = 0.0;
    double zebra = 0.0;
    double waiting_time = 0.0;
    double ped_aiss = 0.0;
    double dsvo = 0.0;
    double tta_zebra = 0.0;
    double waiting_time_zebra = 0.0;
    double ped_aiss_zebra = 0.0;
};

struct BehaviorModelParams {
    // Crossing decision: Bernoulli(sigmoid(intercept + coeffs . x + eps)),
    // eps ~ N(0, decision_noise_sd).
    double decision_intercept = 0.0;
    FeatureCoeffs decision_coeffs;
    double decision_noise_sd = 0.0;

    // Crossing initiation time, crossing trials only:
    // max(floor, cit_base + cit_coeffs . x) * exp(N(0, cit_noise_sigma)).
    double cit_base = 1.0;
    FeatureCoeffs cit_coeffs;
    double cit_noise_sigma = 0.0;

    // Crossing duration, crossing trials only:
    // max(floor, cd_base(location) + cd_coeffs . x + N(0, cd_noise_sd)).
    double cd_base_zebra = 1.0;
    double cd_base_nonzebra = 1.0;
    FeatureCoeffs cd_coeffs;
    double cd_noise_sd = 0.0;
};

struct GeneratorConfig {
    int n_pairs = 32;
    std::vector<double> tta_levels = {3, 4, 5, 6, 7};
    std::vector<SiteConfig> locations = {
        {"zebra_a", Location::zebra},
        {"zebra_b", Location::zebra},
        {"nonzebra_a", Location::non_zebra},
        {"nonzebra_b", Location::non_zebra},
    };
    int blocks = 2;

    TruncatedNormal waiting_time_dist{52.71, 19.04, 13.8, 106.98};
    TruncatedNormal svo_driver{53.17, 8.35, 45.00, 78.38};
    TruncatedNormal svo_pedestrian{53.67, 7.82, 43.92, 75.26};
    TruncatedNormal aiss_driver{53.78, 6.70, 43.00, 69.00};
    TruncatedNormal aiss_pedestrian{50.47, 7.17, 27.00, 61.00};
    // Reported age spreads for this population are implausibly tight, so the
    // spread is a plain config parameter rather than a literature value.
    TruncatedNormal age_driver{31.53, 7.0, 21.0, 50.0};
    TruncatedNormal age_pedestrian{25.09, 4.0, 19.0, 34.0};

    BehaviorModelParams behavior;  // defaulted in the constructor

    std::uint64_t seed = 42;

    GeneratorConfig();
};

// Defaults calibrated once against the acceptance targets (crossing fraction,
// location separability, TTA difficulty trend); they are artifact values,
// not measurements.
BehaviorModelParams default_behavior_params();

// Throws ConfigError naming the offending field.
void validate(const GeneratorConfig& config);

// Standardized ground-truth features for one trial condition. The
// standardization anchors come from the configured sampling distributions,
// not from data.
struct BehaviorFeatures {
    double tta = 0.0;
    double zebra = 0.0;  // 1.0 at zebra sites
    double waiting_time_std = 0.0;
    double ped_aiss_std = 0.0;
    double dsvo_std = 0.0;

    double tta_zebra() const { return tta * zebra; }
};

BehaviorFeatures behavior_features(const GeneratorConfig& config, double tta,
                                   Location location, double waiting_time,
                                   double ped_aiss, double dsvo);

// sigmoid(intercept + coeffs . x), no noise term. Exposed for generator
// tests and oracle checks.
double ground_truth_crossing_probability(const BehaviorModelParams& params,
                                         const BehaviorFeatures& x);

// Deterministic given (config, seed): n_pairs * |tta_levels| * |locations| *
// blocks trials, grouped by pair, shuffled within each pair.
std::vector<Trial> generate_dataset(const GeneratorConfig& config);

// Config files may override any subset of fields; everything omitted keeps
// its default. Serialization always writes the full resolved config.
nlohmann::ordered_json generator_config_to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const nlohmann::json& j);  // throws ConfigError

}  // namespace pedcross
