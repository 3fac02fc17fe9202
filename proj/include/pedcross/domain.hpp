#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pedcross {

// Core vocabulary for pedestrian-vehicle interaction trials at unsignalized
// crossings. All types here are immutable-by-convention value types: nothing
// mutates them after construction, so they are safe to share across threads.

enum class Role { driver, pedestrian };
enum class Gender { female, male };
enum class Location { zebra, non_zebra };

std::string to_string(Role r);
std::string to_string(Gender g);
std::string to_string(Location l);

struct Participant {
    std::string id;
    Role role = Role::pedestrian;
    int age = 0;          // whole years, valid range [18, 100]
    Gender gender = Gender::female;
    double svo = 0.0;     // social value orientation slider angle, degrees
    double aiss = 0.0;    // Arnett inventory of sensation seeking score
};

// Interaction outcome. cit/cd are present iff the pedestrian crossed.
struct Outcome {
    int decision = 0;               // 1 = cross, 0 = wait
    std::optional<double> cit;      // crossing initiation time, seconds
    std::optional<double> cd;       // crossing duration, seconds
};

// One pedestrian-vehicle interaction trial.
struct Trial {
    std::string pair_id;
    Participant driver;
    Participant pedestrian;
    double tta = 0.0;            // time to arrival, seconds
    double waiting_time = 0.0;   // seconds
    Location location = Location::zebra;
    Outcome outcome;
};

// Returns every violated invariant; empty means the trial is well formed.
// Violations are data, not failures, so this never throws.
std::vector<std::string> validate_trial(const Trial& trial);

struct DeltaFeatures {
    double dsvo;   // SVO_p - SVO_d
    double daiss;  // AISS_p - AISS_d
};

DeltaFeatures derive_delta_features(const Trial& trial);

// Identifiers for every input feature a model can consume, including the
// derived deltas and the participant-pair identity.
enum class FeatureId {
    Ta,
    Tw,
    L,
    Ad,
    Ap,
    Gd,
    Gp,
    SvoD,
    SvoP,
    AissD,
    AissP,
    DSvo,
    DAiss,
    PairId,
};

std::string to_string(FeatureId f);
std::optional<FeatureId> feature_from_string(const std::string& s);

enum class FeatureSetName {
    baseline,
    ours,
    ours_delta,
    subset1,
    subset2,
    subset3,
    subset4,
};

std::string to_string(FeatureSetName n);
std::optional<FeatureSetName> feature_set_from_string(const std::string& s);

// A named, ordered selection of input features. Only the seven canonical
// sets exist; construction from any other name is rejected.
struct FeatureSetSpec {
    FeatureSetName name;
    std::vector<FeatureId> columns;

    static FeatureSetSpec make(FeatureSetName name);
    static FeatureSetSpec parse(const std::string& name);  // throws ConfigError
};

}  // namespace pedcross
